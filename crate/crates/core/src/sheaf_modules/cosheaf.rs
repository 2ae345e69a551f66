//! Torsion-cofinite cosheaves, kept as formal graded duals of sheaves.

use std::sync::Arc;

use super::SheafOfModules;
use crate::graded_modules::{dual_morphism_at, graded_dual, vneg, GradedDualModule};
use crate::lattice_fan::{ConeId, Fan};
use crate::linalg::QMatrix;
use crate::stalk_algebras::Flavor;

/// A cosheaf `C = F∨`: costalk `C_σ = (F_σ)∨` and corestriction
/// `β_{τσ} = (ρ_{στ})∨ : C_τ → C_σ`.
#[derive(Clone, Debug)]
pub struct CoSheafTcf {
    underlying: SheafOfModules,
}

pub fn sheaf_dual(f: &SheafOfModules) -> CoSheafTcf {
    CoSheafTcf { underlying: f.clone() }
}

pub fn cosheaf_dual(c: &CoSheafTcf) -> SheafOfModules {
    c.underlying.clone()
}

impl CoSheafTcf {
    pub fn underlying(&self) -> &SheafOfModules {
        &self.underlying
    }

    pub fn fan(&self) -> &Arc<Fan> {
        self.underlying.fan()
    }

    pub fn flavor(&self) -> Flavor {
        self.underlying.flavor()
    }

    pub fn costalk(&self, cone: ConeId) -> GradedDualModule {
        graded_dual(self.underlying.stalk(cone))
    }

    pub fn piece_dim(&self, cone: ConeId, m: &[i64]) -> usize {
        self.underlying.piece_dim(cone, &vneg(m))
    }

    /// `β_{τσ}` at degree `m` (for `τ ⊆ σ`), as a matrix from the piece of
    /// `C_τ` to the piece of `C_σ`. For flavor B the degree is given in the
    /// coordinates of `σ`.
    pub fn corestriction(&self, tau: ConeId, sigma: ConeId, m: &[i64]) -> QMatrix {
        dual_morphism_at(&self.underlying.restriction(sigma, tau), m)
    }

    pub fn is_zero(&self) -> bool {
        self.underlying.is_zero()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice_fan::builtin_fan;
    use crate::sheaf_modules::standard_open;
    use crate::stalk_algebras::piece_dim_a_dual;
    use crate::lattice_fan::LatticeVector;

    #[test]
    fn dual_of_standard_open_has_dual_pieces() {
        let f = Arc::new(builtin_fan("p2").unwrap());
        let s = f.cone_id(&[0, 1]).unwrap();
        let c = sheaf_dual(&standard_open(&f, s, Flavor::A, &[0, 0]).unwrap());
        for t in f.faces(s) {
            for a in -2..=2 {
                for b in -2..=2 {
                    let m = LatticeVector(vec![a, b]);
                    assert_eq!(c.piece_dim(t, &m.0), piece_dim_a_dual(&f, t, &m).unwrap());
                }
            }
        }
    }

    #[test]
    fn cosheaf_law_and_round_trip() {
        let f = Arc::new(builtin_fan("a2").unwrap());
        let s = f.cone_id(&[0, 1]).unwrap();
        let e = f.cone_id(&[0]).unwrap();
        let sheaf = standard_open(&f, s, Flavor::A, &[1, 0]).unwrap();
        let c = sheaf_dual(&sheaf);
        for a in -3..=3 {
            for b in -3..=3 {
                let m = [a, b];
                let direct = c.corestriction(0, s, &m);
                let via = c.corestriction(e, s, &m).mul(&c.corestriction(0, e, &m));
                assert_eq!(direct, via);
            }
        }
        let back = cosheaf_dual(&c);
        assert_eq!(back.stalks(), sheaf.stalks());
        assert!(sheaf_dual(&SheafOfModules::zero(f, Flavor::A)).is_zero());
    }
}
