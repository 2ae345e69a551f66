//! Inverse and direct images along a morphism of fans.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::{ToPrimitive, Zero};

use super::{frame, SheafOfModules};
use crate::error::{Error, Result};
use crate::graded_modules::{Degree, FgGradedModule, ModuleMorphism};
use crate::lattice_fan::{ConeId, Fan, FanMorphism, LatticeVector};
use crate::linalg::{QMatrix, Q};
use crate::stalk_algebras::Flavor;

fn apply(f: &FanMorphism, v: &LatticeVector) -> LatticeVector {
    LatticeVector(f.lattice_map.iter().map(|row| row.iter().zip(&v.0).map(|(a, b)| a * b).sum()).collect())
}

/// The map from native degrees of the target stalk at `f(τ)` to native
/// degrees of the source stalk at `τ`.
fn degree_map(f: &FanMorphism, tau: ConeId, flavor: Flavor) -> impl Fn(&[i64]) -> Degree {
    let matrix: Vec<Vec<i64>> = match flavor {
        // m ↦ Lᵀ m
        Flavor::A => (0..f.source.rank()).map(|j| (0..f.target.rank()).map(|i| f.lattice_map[i][j]).collect()).collect(),
        // b ↦ (Σ_k c_k(L r) b_k)_r over the rays r of τ
        Flavor::B => f
            .source
            .ray_vectors(tau)
            .into_iter()
            .map(|r| {
                f.target
                    .cone_coordinates(f.image(tau), &apply(f, r))
                    .expect("image ray outside its cone")
                    .iter()
                    .map(|c| c.to_integer().to_i64().expect("coordinate overflow"))
                    .collect()
            })
            .collect(),
    };
    move |d: &[i64]| matrix.iter().map(|row| row.iter().zip(d).map(|(a, b)| a * b).sum()).collect()
}

/// `f*G`: the stalk at `τ` is `G_{f(τ)}` with its characters pulled back to
/// the source lattice.
pub fn pullback(f: &FanMorphism, g: &SheafOfModules) -> Result<SheafOfModules> {
    if g.fan().rays() != f.target.rays() || g.fan().num_cones() != f.target.num_cones() {
        return Err(Error::ConeMismatch);
    }
    let flavor = g.flavor();
    let fan = Arc::new(f.source.clone());
    let mut stalks = Vec::with_capacity(fan.num_cones());
    for tau in fan.cone_ids() {
        let src = g.stalk(f.image(tau));
        let map = degree_map(f, tau, flavor);
        let gens = src.gens().iter().map(|d| map(d)).collect();
        let relations = src
            .relations
            .columns()
            .into_iter()
            .zip(&src.relations.col_degrees)
            .map(|(col, d)| (map(d), col))
            .collect();
        stalks.push(FgGradedModule::new(frame(&fan, tau, flavor), gens, relations)?);
    }
    let mut given = BTreeMap::new();
    for tau in fan.cone_ids() {
        for &t in fan.facets(tau) {
            let (a, b) = (f.image(tau), f.image(t));
            let matrix = if a == b { g.stalk(a).identity().matrix } else { g.restriction(a, b).matrix };
            let shift = vec![0; stalks[t].frame.degree_len()];
            given.insert((tau, t), ModuleMorphism::new(stalks[tau].clone(), stalks[t].clone(), matrix, shift)?);
        }
    }
    SheafOfModules::new(fan, flavor, stalks, given)
}

/// `f_*F`, evaluated lazily: its stalk at a target cone `σ` is the module of
/// sections of `F` over the open set `f⁻¹[σ] = {τ : f(τ) ⊆ σ}`. Degrees stay
/// in the source lattice.
#[derive(Clone, Debug)]
pub struct PushforwardSheaf {
    pub morphism: FanMorphism,
    pub source: SheafOfModules,
}

pub fn pushforward(f: &FanMorphism, source: &SheafOfModules) -> Result<PushforwardSheaf> {
    if source.fan().rays() != f.source.rays() || source.fan().num_cones() != f.source.num_cones() {
        return Err(Error::ConeMismatch);
    }
    if source.flavor() != Flavor::A {
        return Err(Error::FlavorMismatch { expected: "A" });
    }
    Ok(PushforwardSheaf { morphism: f.clone(), source: source.clone() })
}

impl PushforwardSheaf {
    pub fn target(&self) -> &Fan {
        &self.morphism.target
    }

    /// Source cones over `[σ]`.
    pub fn preimage(&self, sigma: ConeId) -> Vec<ConeId> {
        let t = &self.morphism.target;
        self.source.fan().cone_ids().filter(|&tau| t.is_face(self.morphism.image(tau), sigma)).collect()
    }

    /// Dimension of the degree-`m` sections over `f⁻¹[σ]`.
    pub fn piece_dim(&self, sigma: ConeId, m: &[i64]) -> usize {
        let fan = self.source.fan();
        let cones = self.preimage(sigma);
        let mut offset: BTreeMap<ConeId, (usize, usize)> = BTreeMap::new();
        let mut nvars = 0;
        for &c in &cones {
            let d = self.source.piece_dim(c, m);
            offset.insert(c, (nvars, d));
            nvars += d;
        }
        let mut rows: Vec<Vec<Q>> = Vec::new();
        for &c in &cones {
            for &t in fan.facets(c) {
                let e: QMatrix = self.source.restriction(c, t).evaluate(m);
                let (oc, _) = offset[&c];
                let (ot, dt) = offset[&t];
                for r in 0..dt {
                    let mut row = vec![Q::zero(); nvars];
                    for k in 0..e.ncols() {
                        row[oc + k] = e.get(r, k).clone();
                    }
                    row[ot + r] -= Q::from_integer(1.into());
                    rows.push(row);
                }
            }
        }
        if rows.is_empty() {
            return nvars;
        }
        nvars - QMatrix::from_rows(rows.len(), nvars, rows.into_iter().flatten().collect()).rank()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice_fan::{builtin_fan, fan_morphism, ZERO_CONE};
    use crate::sheaf_modules::{hom_pieces, standard_open, with_unit_restrictions};

    fn structure_sheaf(fan: &Arc<Fan>) -> SheafOfModules {
        let stalks = fan
            .cone_ids()
            .map(|c| FgGradedModule::free(frame(fan, c, Flavor::A), vec![vec![0; fan.rank()]]).unwrap())
            .collect();
        with_unit_restrictions(fan.clone(), Flavor::A, stalks)
    }

    fn projection() -> FanMorphism {
        let src = builtin_fan("p1xp1").unwrap();
        let tgt = builtin_fan("p1").unwrap();
        fan_morphism(&src, &tgt, vec![vec![1, 0]]).unwrap()
    }

    #[test]
    fn identity_functors_preserve_pieces() {
        let fan = Arc::new(builtin_fan("p2").unwrap());
        let id = fan_morphism(&fan, &fan, vec![vec![1, 0], vec![0, 1]]).unwrap();
        let g = standard_open(&fan, 4, Flavor::A, &[1, 2]).unwrap();
        let pulled = pullback(&id, &g).unwrap();
        let pushed = pushforward(&id, &g).unwrap();
        for c in fan.cone_ids() {
            for a in -2..=2 {
                for b in -2..=2 {
                    assert_eq!(pulled.piece_dim(c, &[a, b]), g.piece_dim(c, &[a, b]));
                }
            }
        }
        // Sections over [σ] of a sheaf are its stalk at σ.
        for c in fan.cone_ids() {
            for a in -2..=2 {
                assert_eq!(pushed.piece_dim(c, &[a, 1]), g.piece_dim(c, &[a, 1]));
            }
        }
    }

    #[test]
    fn global_sections_of_p1_are_constants() {
        let p1 = Arc::new(builtin_fan("p1").unwrap());
        let pt = builtin_fan("point").unwrap();
        let f = fan_morphism(&p1, &pt, vec![]).unwrap();
        let pushed = pushforward(&f, &structure_sheaf(&p1)).unwrap();
        for m in -3..=3 {
            assert_eq!(pushed.piece_dim(ZERO_CONE, &[m]), (m == 0) as usize);
        }
    }

    #[test]
    fn pullback_commutes_with_regrading() {
        let f = projection();
        let tgt = Arc::new(f.target.clone());
        let top = tgt.cone_id(&[0]).unwrap();
        let g = standard_open(&tgt, top, Flavor::A, &[1]).unwrap();
        let a = pullback(&f, &g).unwrap().delta().unwrap();
        let b = pullback(&f, &g.delta().unwrap()).unwrap();
        for c in a.fan().cone_ids() {
            for x in -3..=3 {
                for y in -3..=3 {
                    let bd = a.fan().b_degree(c, &LatticeVector(vec![x, y])).unwrap();
                    assert_eq!(a.piece_dim(c, &bd), b.piece_dim(c, &bd));
                }
            }
        }
    }

    #[test]
    fn adjunction_on_generators() {
        let f = projection();
        let src = Arc::new(f.source.clone());
        let tgt = Arc::new(f.target.clone());
        let sheaf = structure_sheaf(&src).twist(&LatticeVector(vec![0, 1]));
        let pushed = pushforward(&f, &sheaf).unwrap();
        for s in tgt.cone_ids() {
            for k in -2..=2 {
                let g = standard_open(&tgt, s, Flavor::A, &[k]).unwrap();
                let pulled = pullback(&f, &g).unwrap();
                for x in -2..=2 {
                    for y in -2..=2 {
                        let d = LatticeVector(vec![x, y]);
                        let lhs = hom_pieces(&pulled, &sheaf, &d).unwrap();
                        assert_eq!(lhs, pushed.piece_dim(s, &[k + x, y]), "{s} {k} {d:?}");
                    }
                }
            }
        }
    }
}
