//! Graded pieces of the stalk algebras `Q[M ∩ σ∨]` (flavor A) and
//! `Q[M_σ⁺]` (flavor B). Every homogeneous component has dimension 0 or 1,
//! so the algebras exist here only as membership predicates.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice_fan::{ConeId, Fan, LatticeVector};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Flavor {
    A,
    B,
}

impl Flavor {
    pub fn name(self) -> &'static str {
        match self {
            Flavor::A => "A",
            Flavor::B => "B",
        }
    }
}

/// A stalk algebra of a fan: the cone and which of the two gradings.
#[derive(Clone, Copy, Debug)]
pub struct StalkAlgebraRef<'a> {
    pub fan: &'a Fan,
    pub cone: ConeId,
    pub flavor: Flavor,
}

impl<'a> StalkAlgebraRef<'a> {
    pub fn new(fan: &'a Fan, cone: ConeId, flavor: Flavor) -> Self {
        StalkAlgebraRef { fan, cone, flavor }
    }

    /// Piece dimension at a degree given in the native coordinates of the
    /// flavor (`M` for A, `Z^dim σ` for B).
    pub fn piece_dim(&self, degree: &[i64]) -> Result<usize> {
        match self.flavor {
            Flavor::A => piece_dim_a(self.fan, self.cone, &LatticeVector(degree.to_vec())),
            Flavor::B => piece_dim_b(self.fan, self.cone, degree),
        }
    }
}

pub fn piece_dim_a(fan: &Fan, sigma: ConeId, m: &LatticeVector) -> Result<usize> {
    Ok(fan.dual_membership(sigma, m)? as usize)
}

pub fn piece_dim_b(fan: &Fan, sigma: ConeId, m_sigma: &[i64]) -> Result<usize> {
    let d = fan.dim(sigma);
    if m_sigma.len() != d {
        return Err(Error::LengthMismatch { expected: d, got: m_sigma.len() });
    }
    Ok(m_sigma.iter().all(|&x| x >= 0) as usize)
}

pub fn piece_dim_a_dual(fan: &Fan, sigma: ConeId, m: &LatticeVector) -> Result<usize> {
    piece_dim_a(fan, sigma, &-m)
}

/// Support of the top local cohomology of a rank-one free module along the
/// orbit of `tau`: every ray of `tau` pairs strictly negatively with `m`.
pub fn local_coh_indicator(fan: &Fan, tau: ConeId, m: &LatticeVector) -> Result<usize> {
    let pairings = fan.b_degree(tau, m)?;
    Ok(pairings.iter().all(|&x| x < 0) as usize)
}

/// The three sign conditions on `M_τ`-coordinates used throughout.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Support {
    /// all coordinates ≥ 0
    Free,
    /// all coordinates ≤ 0
    Dual,
    /// all coordinates < 0
    LocalCohomology,
}

impl Support {
    pub fn contains(self, coords: &[i64]) -> bool {
        match self {
            Support::Free => coords.iter().all(|&x| x >= 0),
            Support::Dual => coords.iter().all(|&x| x <= 0),
            Support::LocalCohomology => coords.iter().all(|&x| x < 0),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice_fan::{builtin_fan, ZERO_CONE};

    fn lv(x: &[i64]) -> LatticeVector {
        LatticeVector(x.to_vec())
    }

    #[test]
    fn a_pieces() {
        let f = builtin_fan("a2").unwrap();
        assert_eq!(piece_dim_a(&f, ZERO_CONE, &lv(&[-4, 9])).unwrap(), 1);
        let e1 = f.cone_id(&[0]).unwrap();
        assert_eq!(piece_dim_a(&f, e1, &lv(&[2, -7])).unwrap(), 1);
        assert_eq!(piece_dim_a(&f, e1, &lv(&[-1, 0])).unwrap(), 0);
    }

    #[test]
    fn hilbert_box_count() {
        let f = builtin_fan("a2").unwrap();
        let s = f.cone_id(&[0, 1]).unwrap();
        let mut count = 0;
        for a in -3..=3 {
            for b in -3..=3 {
                if (0..=3).contains(&a) && (0..=3).contains(&b) {
                    count += piece_dim_a(&f, s, &lv(&[a, b])).unwrap();
                } else if piece_dim_a(&f, s, &lv(&[a, b])).unwrap() == 1 {
                    assert!(a >= 0 && b >= 0);
                }
            }
        }
        assert_eq!(count, 16);
    }

    #[test]
    fn b_pieces() {
        let f = builtin_fan("a2").unwrap();
        let s = f.cone_id(&[0, 1]).unwrap();
        assert_eq!(piece_dim_b(&f, ZERO_CONE, &[]).unwrap(), 1);
        assert_eq!(piece_dim_b(&f, s, &[0, 0]).unwrap(), 1);
        assert_eq!(piece_dim_b(&f, s, &[-1, 2]).unwrap(), 0);
        assert!(matches!(piece_dim_b(&f, s, &[1]), Err(Error::LengthMismatch { .. })));
    }

    #[test]
    fn dual_and_local_cohomology() {
        let f = builtin_fan("a2").unwrap();
        let e1 = f.cone_id(&[0]).unwrap();
        let s = f.cone_id(&[0, 1]).unwrap();
        assert_eq!(piece_dim_a_dual(&f, ZERO_CONE, &lv(&[3, 3])).unwrap(), 1);
        assert_eq!(piece_dim_a_dual(&f, e1, &lv(&[1, 0])).unwrap(), 0);
        assert_eq!(local_coh_indicator(&f, ZERO_CONE, &lv(&[5, 5])).unwrap(), 1);
        assert_eq!(local_coh_indicator(&f, s, &lv(&[-1, -1])).unwrap(), 1);
        assert_eq!(local_coh_indicator(&f, s, &lv(&[0, -1])).unwrap(), 0);
    }

    #[test]
    fn a_and_b_agree_on_top_cones() {
        let f = builtin_fan("p2").unwrap();
        for s in f.cones_of_dim(2) {
            for a in -3..=3 {
                for b in -3..=3 {
                    let m = lv(&[a, b]);
                    let bd = f.b_degree(s, &m).unwrap();
                    assert_eq!(piece_dim_a(&f, s, &m).unwrap(), piece_dim_b(&f, s, &bd).unwrap());
                }
            }
        }
    }
}
