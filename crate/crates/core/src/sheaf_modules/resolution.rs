//! Resolutions by finite sums of the projectives `𝒜(a)_{[σ]}`.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::Zero;

use super::{frame, SheafComplex, SheafMorphism, SheafOfModules};
use crate::error::{Error, Result};
use crate::graded_modules::{kernel_presentation, vsub, Degree, FgGradedModule, ModuleMorphism};
use crate::lattice_fan::{ConeId, Fan};
use crate::linalg::{QMatrix, Q};
use crate::stalk_algebras::Flavor;

/// `⊕_s 𝒜(a_s)_{[σ_s]}`; each degree is native to its own cone.
#[derive(Clone, Debug)]
pub struct ProjectiveSum {
    pub fan: Arc<Fan>,
    pub flavor: Flavor,
    pub summands: Vec<(ConeId, Degree)>,
}

impl ProjectiveSum {
    /// Summands whose cone contains `tau`, in order; these are the
    /// generators of the stalk at `tau`.
    pub fn indices_at(&self, tau: ConeId) -> Vec<usize> {
        (0..self.summands.len()).filter(|&s| self.fan.is_face(tau, self.summands[s].0)).collect()
    }

    pub fn stalk(&self, tau: ConeId) -> FgGradedModule {
        let fr = frame(&self.fan, tau, self.flavor);
        let gens = self
            .indices_at(tau)
            .into_iter()
            .map(|s| {
                let (c, d) = &self.summands[s];
                frame(&self.fan, *c, self.flavor).transport(&fr, d)
            })
            .collect();
        FgGradedModule::free(fr, gens).expect("degree length")
    }

    pub fn to_sheaf(&self) -> SheafOfModules {
        let stalks: Vec<FgGradedModule> = self.fan.cone_ids().map(|c| self.stalk(c)).collect();
        let mut restrictions = BTreeMap::new();
        for s in self.fan.cone_ids() {
            let here = self.indices_at(s);
            for t in self.fan.faces(s) {
                if t == s {
                    continue;
                }
                let there = self.indices_at(t);
                let matrix = here
                    .iter()
                    .enumerate()
                    .map(|(k, idx)| ((there.iter().position(|x| x == idx).unwrap(), k), Q::from_integer(1.into())))
                    .collect();
                let shift = vec![0; stalks[t].frame.degree_len()];
                restrictions.insert((s, t), ModuleMorphism::new_unchecked(stalks[s].clone(), stalks[t].clone(), matrix, shift));
            }
        }
        SheafOfModules::from_parts_unchecked(self.fan.clone(), self.flavor, stalks, restrictions)
    }
}

/// A map of projective sums; entry `(t, s)` scales the canonical map from
/// summand `s` to summand `t` (which needs `σ_s ⊆ σ_t`).
#[derive(Clone, Debug)]
pub struct ProjectiveMap {
    pub source: ProjectiveSum,
    pub target: ProjectiveSum,
    pub entries: BTreeMap<(usize, usize), Q>,
}

impl ProjectiveMap {
    pub fn to_sheaf_morphism(&self) -> Result<SheafMorphism> {
        let (src, tgt) = (self.source.to_sheaf(), self.target.to_sheaf());
        let fan = &self.source.fan;
        let mut maps = Vec::with_capacity(fan.num_cones());
        for c in fan.cone_ids() {
            let (si, ti) = (self.source.indices_at(c), self.target.indices_at(c));
            let mut entries = Vec::new();
            for (&(t, s), v) in &self.entries {
                if let (Some(r), Some(k)) = (ti.iter().position(|&x| x == t), si.iter().position(|&x| x == s)) {
                    entries.push(((r, k), v.clone()));
                }
            }
            let shift = vec![0; src.stalk(c).frame.degree_len()];
            maps.push(ModuleMorphism::new(src.stalk(c).clone(), tgt.stalk(c).clone(), entries, shift)?);
        }
        SheafMorphism::new(&src, &tgt, maps)
    }
}

/// `P_L → … → P_0 → F`; `diffs[k]` maps `terms[k + 1]` to `terms[k]`.
#[derive(Clone, Debug)]
pub struct Resolution {
    pub terms: Vec<ProjectiveSum>,
    pub diffs: Vec<ProjectiveMap>,
    pub augmentation: SheafMorphism,
    pub resolved: SheafOfModules,
}

impl Resolution {
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// The resolution as a complex with `P_k` in degree `−k`.
    pub fn complex(&self) -> Result<SheafComplex> {
        let l = self.terms.len();
        let terms = self.terms.iter().rev().map(|p| p.to_sheaf()).collect();
        let diffs = self.diffs.iter().rev().map(|d| d.to_sheaf_morphism()).collect::<Result<_>>()?;
        SheafComplex::new(-(l as i64 - 1), terms, diffs)
    }
}

/// Summands covering `f`, each with its image as an ambient vector over the
/// generators of `f` at the summand's cone. Cones are processed from the
/// top dimension down, and a generator gets a summand only when the images
/// of the summands already chosen miss it.
fn cover(f: &SheafOfModules) -> (Vec<(ConeId, Degree)>, Vec<Vec<Q>>) {
    let fan = f.fan();
    let mut summands: Vec<(ConeId, Degree)> = Vec::new();
    let mut images: Vec<Vec<Q>> = Vec::new();
    for dim in (0..=fan.rank()).rev() {
        for sigma in fan.cones_of_dim(dim) {
            let stalk = f.stalk(sigma);
            for (i, gi) in stalk.gens().iter().enumerate() {
                let piece = stalk.piece(gi);
                let project = |amb: &[Q]| -> Vec<Q> {
                    let v: Vec<Q> = piece.gens.iter().map(|&j| amb[j].clone()).collect();
                    piece.quotient.projection.mul_vec(&v)
                };
                let mut cols: Vec<Vec<Q>> = Vec::new();
                for (s, (c, a)) in summands.iter().enumerate() {
                    if !fan.is_face(sigma, *c) {
                        continue;
                    }
                    let moved = frame(fan, *c, f.flavor()).transport(&stalk.frame, a);
                    if !stalk.frame.in_semigroup(&vsub(gi, &moved)) {
                        continue;
                    }
                    cols.push(project(&restrict(f, *c, sigma, &images[s])));
                }
                let mut e = vec![Q::zero(); stalk.num_gens()];
                e[i] = Q::from_integer(1.into());
                let target = project(&e);
                if target.iter().all(|x| x.is_zero()) {
                    continue;
                }
                let before = rank_of(&cols, target.len());
                cols.push(target);
                if rank_of(&cols, cols[0].len()) > before {
                    summands.push((sigma, gi.clone()));
                    images.push(e);
                }
            }
        }
    }
    (summands, images)
}

fn rank_of(cols: &[Vec<Q>], height: usize) -> usize {
    if cols.is_empty() || height == 0 {
        return 0;
    }
    QMatrix::from_columns(height, cols).rank()
}

/// Push an ambient vector over the generators of `F_σ` to `F_τ`.
fn restrict(f: &SheafOfModules, sigma: ConeId, tau: ConeId, v: &[Q]) -> Vec<Q> {
    if sigma == tau {
        return v.to_vec();
    }
    let r = f.restriction_ref(sigma, tau).expect("restriction");
    let mut out = vec![Q::zero(); f.stalk(tau).num_gens()];
    for (&(i, j), c) in &r.matrix {
        out[i] += c * &v[j];
    }
    out
}

/// The map `P → F` at each cone, given the images of the summands.
fn cover_maps(f: &SheafOfModules, p: &ProjectiveSum, images: &[Vec<Q>]) -> Result<Vec<ModuleMorphism>> {
    let fan = f.fan();
    let mut maps = Vec::with_capacity(fan.num_cones());
    for tau in fan.cone_ids() {
        let idx = p.indices_at(tau);
        let mut entries = Vec::new();
        for (k, &s) in idx.iter().enumerate() {
            for (i, c) in restrict(f, p.summands[s].0, tau, &images[s]).into_iter().enumerate() {
                if !c.is_zero() {
                    entries.push(((i, k), c));
                }
            }
        }
        let shift = vec![0; f.stalk(tau).frame.degree_len()];
        maps.push(ModuleMorphism::new(p.stalk(tau), f.stalk(tau).clone(), entries, shift)?);
    }
    Ok(maps)
}

/// The kernel sheaf of `P → F` with its stalkwise inclusions.
fn kernel_sheaf(p: &SheafOfModules, maps: &[ModuleMorphism]) -> Result<(SheafOfModules, Vec<ModuleMorphism>)> {
    let fan = p.fan();
    let mut stalks = Vec::with_capacity(fan.num_cones());
    let mut incls = Vec::with_capacity(fan.num_cones());
    for m in maps {
        let (k, inc) = kernel_presentation(m)?;
        stalks.push(k);
        incls.push(inc);
    }
    let mut given = BTreeMap::new();
    for sigma in fan.cone_ids() {
        for &tau in fan.facets(sigma) {
            let rp = p.restriction_ref(sigma, tau).expect("restriction");
            let (ks, kt) = (&stalks[sigma], &stalks[tau]);
            let mut entries = Vec::new();
            for (k, d) in ks.gens().iter().enumerate() {
                // The generator as an element of P_σ, pushed into P_τ.
                let mut w = vec![Q::zero(); p.stalk(tau).num_gens()];
                for (&(j, kk), c) in &incls[sigma].matrix {
                    if kk != k {
                        continue;
                    }
                    for (&(i, jj), r) in &rp.matrix {
                        if jj == j {
                            w[i] += c * r;
                        }
                    }
                }
                let dt = ks.frame.transport(&kt.frame, d);
                let ppiece = p.stalk(tau).piece(&dt);
                let rhs: Vec<Q> = ppiece.gens.iter().map(|&i| w[i].clone()).collect();
                let y = incls[tau]
                    .evaluate(&dt)
                    .solve(&rhs)
                    .ok_or_else(|| Error::BadMorphism("kernel does not restrict into kernel".into()))?;
                let kpiece = kt.piece(&dt);
                let amb = kpiece.quotient.section.mul_vec(&y);
                for (pos, c) in amb.into_iter().enumerate() {
                    if !c.is_zero() {
                        entries.push(((kpiece.gens[pos], k), c));
                    }
                }
            }
            let shift = vec![0; kt.frame.degree_len()];
            given.insert((sigma, tau), ModuleMorphism::new(ks.clone(), kt.clone(), entries, shift)?);
        }
    }
    let sheaf = SheafOfModules::new(fan.clone(), p.flavor(), stalks, given)?;
    Ok((sheaf, incls))
}

/// A finite resolution of `f` by sums of `𝒜(a)_{[σ]}`, built by covering
/// and taking kernels until the kernel vanishes.
pub fn projective_resolution(f: &SheafOfModules, max_length: usize) -> Result<Resolution> {
    let fan = f.fan().clone();
    let flavor = f.flavor();
    let (summands, images) = cover(f);
    let p0 = ProjectiveSum { fan: fan.clone(), flavor, summands };
    let maps = cover_maps(f, &p0, &images)?;
    let augmentation = SheafMorphism::new(&p0.to_sheaf(), f, maps.clone())?;
    let mut terms = vec![p0];
    let mut diffs = Vec::new();
    let mut maps = maps;
    loop {
        let prev = terms.last().unwrap().clone();
        let (k, incls) = kernel_sheaf(&prev.to_sheaf(), &maps)?;
        if k.is_zero() {
            break;
        }
        if terms.len() > max_length {
            return Err(Error::ResolutionTooLong(max_length));
        }
        let (summands, images) = cover(&k);
        let next = ProjectiveSum { fan: fan.clone(), flavor, summands };
        let mut entries = BTreeMap::new();
        for (s, x) in images.iter().enumerate() {
            let c = next.summands[s].0;
            let idx = prev.indices_at(c);
            for (&(j, kk), v) in &incls[c].matrix {
                let coeff = v * &x[kk];
                if !coeff.is_zero() {
                    *entries.entry((idx[j], s)).or_insert_with(Q::zero) += coeff;
                }
            }
        }
        entries.retain(|_, v| !v.is_zero());
        maps = cover_maps(&k, &next, &images)?
            .into_iter()
            .zip(&incls)
            .map(|(m, inc)| m.then(inc))
            .collect::<Result<_>>()?;
        diffs.push(ProjectiveMap { source: next.clone(), target: prev, entries });
        terms.push(next);
    }
    Ok(Resolution { terms, diffs, augmentation, resolved: f.clone() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice_fan::{builtin_fan, LatticeVector, ZERO_CONE};
    use crate::linalg::q;
    use crate::sheaf_modules::{standard_open, standard_point, with_unit_restrictions};

    /// Degreewise exactness of `P_• → F → 0` and `d² = 0`.
    fn check(res: &Resolution, radius: i64) {
        let f = &res.resolved;
        let fan = f.fan();
        let n = fan.rank();
        let mut degrees = vec![vec![]];
        for _ in 0..n {
            degrees = degrees
                .into_iter()
                .flat_map(|p: Vec<i64>| {
                    (-radius..=radius).map(move |x| {
                        let mut p = p.clone();
                        p.push(x);
                        p
                    })
                })
                .collect();
        }
        let diffs: Vec<SheafMorphism> = res.diffs.iter().map(|d| d.to_sheaf_morphism().unwrap()).collect();
        for c in fan.cone_ids() {
            for m in &degrees {
                let m = LatticeVector(m.clone());
                let d = match f.flavor() {
                    Flavor::A => m.0.clone(),
                    Flavor::B => fan.b_degree(c, &m).unwrap(),
                };
                // matrices: P_{k+1} → P_k, and P_0 → F
                let mut mats = vec![res.augmentation.maps[c].evaluate(&d)];
                mats.extend(diffs.iter().map(|x| x.maps[c].evaluate(&d)));
                let fdim = f.piece_dim(c, &d);
                assert_eq!(mats[0].rank(), fdim, "surjectivity at {c} {d:?}");
                for k in 0..mats.len() {
                    let dim = mats[k].ncols();
                    let rank_out = mats[k].rank();
                    let rank_in = mats.get(k + 1).map(|x| x.rank()).unwrap_or(0);
                    if let Some(next) = mats.get(k + 1) {
                        assert!(mats[k].mul(next).is_zero());
                    }
                    assert_eq!(dim, rank_out + rank_in, "exactness at P_{k}, cone {c}, degree {d:?}");
                }
            }
        }
    }

    #[test]
    fn projective_is_its_own_resolution() {
        let f = Arc::new(builtin_fan("p2").unwrap());
        let s = f.cone_id(&[1, 2]).unwrap();
        let o = standard_open(&f, s, Flavor::A, &[1, 0]).unwrap();
        let r = projective_resolution(&o, 4).unwrap();
        assert_eq!(r.len(), 1);
        assert_eq!(r.terms[0].summands, vec![(s, vec![1, 0])]);
        check(&r, 2);
    }

    #[test]
    fn skyscraper_on_affine_line() {
        let f = Arc::new(builtin_fan("a1").unwrap());
        // [0] = {0}, so the skyscraper at the open point is projective.
        let z = standard_point(&f, ZERO_CONE, Flavor::A, &[0]).unwrap();
        assert_eq!(projective_resolution(&z, 4).unwrap().len(), 1);
        let s = standard_point(&f, 1, Flavor::A, &[0]).unwrap();
        let r = projective_resolution(&s, 4).unwrap();
        assert_eq!(r.len(), 2);
        check(&r, 3);
    }

    #[test]
    fn torsion_stalk_gives_koszul_length_two() {
        let f = Arc::new(builtin_fan("a2").unwrap());
        let s = f.cone_id(&[0, 1]).unwrap();
        let fr = frame(&f, s, Flavor::A);
        let residue = FgGradedModule::new(
            fr,
            vec![vec![0, 0]],
            vec![(vec![1, 0], vec![(0, q(1))]), (vec![0, 1], vec![(0, q(1))])],
        )
        .unwrap();
        let stalks = f
            .cone_ids()
            .map(|c| if c == s { residue.clone() } else { FgGradedModule::zero(frame(&f, c, Flavor::A)) })
            .collect();
        let sheaf = with_unit_restrictions(f.clone(), Flavor::A, stalks);
        let r = projective_resolution(&sheaf, 4).unwrap();
        assert_eq!(r.len(), 3);
        check(&r, 3);
    }

    #[test]
    fn line_bundle_and_flavor_b() {
        let f = Arc::new(builtin_fan("p1").unwrap());
        let z = standard_point(&f, 1, Flavor::A, &[2]).unwrap();
        let r = projective_resolution(&z, 4).unwrap();
        check(&r, 3);
        let zb = z.delta().unwrap();
        let rb = projective_resolution(&zb, 4).unwrap();
        check(&rb, 3);
    }
}
