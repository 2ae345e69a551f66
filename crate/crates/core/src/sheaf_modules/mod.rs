//! Sheaves of graded modules on the finite space of cones, where the open
//! sets are unions of the basic opens `[σ] = {τ ⊆ σ}`. A sheaf is a stalk
//! per cone plus restriction maps to faces.

mod cosheaf;
mod functors;
mod hom;
mod resolution;

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use num_traits::One;

use crate::error::{Error, Result};
use crate::graded_modules::{ConeFrame, Degree, FgGradedModule, ModuleMorphism};
use crate::lattice_fan::{ConeId, Fan, LatticeVector};
use crate::linalg::Q;
use crate::stalk_algebras::Flavor;

pub use cosheaf::{cosheaf_dual, sheaf_dual, CoSheafTcf};
pub use functors::{pullback, pushforward, PushforwardSheaf};
pub use hom::{cosheaf_hom_pieces, hom_pieces};
pub use resolution::{projective_resolution, ProjectiveMap, ProjectiveSum, Resolution};

#[derive(Clone, Debug)]
pub struct SheafOfModules {
    fan: Arc<Fan>,
    flavor: Flavor,
    stalks: Vec<FgGradedModule>,
    /// One entry per proper face pair `(σ, τ)`, `τ ⊊ σ`.
    restrictions: BTreeMap<(ConeId, ConeId), ModuleMorphism>,
}

pub fn frame(fan: &Fan, cone: ConeId, flavor: Flavor) -> ConeFrame {
    ConeFrame::new(fan, cone, flavor)
}

impl SheafOfModules {
    /// Assembles a sheaf from stalks and restriction maps. Maps for facet
    /// pairs are required (a missing one is the zero map); maps for deeper
    /// face pairs are derived by composition, and any that are supplied must
    /// agree with the composite.
    pub fn new(
        fan: Arc<Fan>,
        flavor: Flavor,
        stalks: Vec<FgGradedModule>,
        given: BTreeMap<(ConeId, ConeId), ModuleMorphism>,
    ) -> Result<Self> {
        if stalks.len() != fan.num_cones() {
            return Err(Error::LengthMismatch { expected: fan.num_cones(), got: stalks.len() });
        }
        for (c, s) in stalks.iter().enumerate() {
            if s.frame != frame(&fan, c, flavor) {
                return Err(Error::ConeMismatch);
            }
        }
        for (&(s, t), r) in &given {
            if s == t || !fan.is_face(t, s) {
                return Err(Error::NotAFacet { sigma: fan.cone(s).rays.clone(), tau: fan.cone(t).rays.clone() });
            }
            if r.source != stalks[s] || r.target != stalks[t] || !r.is_degree_zero() {
                return Err(Error::BadMorphism(format!("restriction {s}->{t} does not match the stalks")));
            }
        }
        let mut restrictions: BTreeMap<(ConeId, ConeId), ModuleMorphism> = BTreeMap::new();
        // Cones in increasing dimension, so facet composites already exist.
        for sigma in fan.cone_ids() {
            for &tau in fan.facets(sigma) {
                let r = given.get(&(sigma, tau)).cloned().unwrap_or_else(|| zero_map(&stalks[sigma], &stalks[tau]));
                restrictions.insert((sigma, tau), r);
            }
            for xi in fan.faces(sigma) {
                if fan.dim(xi) + 2 > fan.dim(sigma) {
                    continue;
                }
                // Path through the facet obtained by dropping the first extra ray.
                let extra = fan.cone(sigma).rays.iter().find(|r| !fan.cone(xi).rays.contains(r)).copied().unwrap();
                let rays: Vec<usize> = fan.cone(sigma).rays.iter().copied().filter(|&r| r != extra).collect();
                let tau = fan.cone_id(&rays).unwrap();
                let comp = restrictions[&(sigma, tau)].then(&restrictions[&(tau, xi)])?;
                if let Some(g) = given.get(&(sigma, xi)) {
                    if !g.same_map(&comp) {
                        return Err(Error::BadMorphism(format!("restriction {sigma}->{xi} is not the composite")));
                    }
                }
                restrictions.insert((sigma, xi), comp);
            }
        }
        let sheaf = SheafOfModules { fan, flavor, stalks, restrictions };
        sheaf.check_sheaf_law()?;
        Ok(sheaf)
    }

    pub(crate) fn from_parts_unchecked(
        fan: Arc<Fan>,
        flavor: Flavor,
        stalks: Vec<FgGradedModule>,
        restrictions: BTreeMap<(ConeId, ConeId), ModuleMorphism>,
    ) -> Self {
        SheafOfModules { fan, flavor, stalks, restrictions }
    }

    /// `ρ_{τξ} ∘ ρ_{στ} = ρ_{σξ}` for every chain, checked on generators.
    pub fn check_sheaf_law(&self) -> Result<()> {
        for sigma in self.fan.cone_ids() {
            for &tau in self.fan.facets(sigma) {
                for &xi in self.fan.facets(tau) {
                    let comp = self.restrictions[&(sigma, tau)].then(&self.restrictions[&(tau, xi)])?;
                    if !comp.same_map(&self.restrictions[&(sigma, xi)]) {
                        return Err(Error::BadMorphism(format!("sheaf law fails on {sigma}->{tau}->{xi}")));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn fan(&self) -> &Arc<Fan> {
        &self.fan
    }

    pub fn flavor(&self) -> Flavor {
        self.flavor
    }

    pub fn stalk(&self, cone: ConeId) -> &FgGradedModule {
        &self.stalks[cone]
    }

    pub fn stalks(&self) -> &[FgGradedModule] {
        &self.stalks
    }

    /// The restriction `F_σ → F_τ` for `τ ⊆ σ` (the identity when equal).
    pub fn restriction(&self, sigma: ConeId, tau: ConeId) -> ModuleMorphism {
        if sigma == tau {
            return self.stalks[sigma].identity();
        }
        self.restrictions[&(sigma, tau)].clone()
    }

    pub fn restriction_ref(&self, sigma: ConeId, tau: ConeId) -> Option<&ModuleMorphism> {
        self.restrictions.get(&(sigma, tau))
    }

    pub fn is_zero(&self) -> bool {
        self.stalks.iter().all(|s| s.num_gens() == 0)
    }

    pub fn is_locally_free(&self) -> bool {
        self.stalks.iter().all(|s| s.is_free())
    }

    pub fn piece_dim(&self, cone: ConeId, m: &[i64]) -> usize {
        self.stalks[cone].piece_dim(m)
    }

    /// Degree of `m ∈ M` in the native coordinates of the stalk at `cone`.
    pub fn native(&self, cone: ConeId, m: &LatticeVector) -> Degree {
        match self.flavor {
            Flavor::A => m.0.clone(),
            Flavor::B => self.fan.pairings(cone, m),
        }
    }

    pub fn zero(fan: Arc<Fan>, flavor: Flavor) -> Self {
        let stalks = fan.cone_ids().map(|c| FgGradedModule::zero(frame(&fan, c, flavor))).collect();
        let mut restrictions = BTreeMap::new();
        for s in fan.cone_ids() {
            for t in fan.faces(s) {
                if t != s {
                    restrictions.insert((s, t), zero_map(&stalks_ref(&fan, flavor, s), &stalks_ref(&fan, flavor, t)));
                }
            }
        }
        SheafOfModules { fan, flavor, stalks, restrictions }
    }

    /// `F(u)` for `u ∈ M`: every stalk regraded so its generators move by `u`.
    pub fn twist(&self, u: &LatticeVector) -> Self {
        let stalks: Vec<FgGradedModule> =
            self.stalks.iter().enumerate().map(|(c, s)| s.twist(&self.native(c, u))).collect();
        let restrictions = self
            .restrictions
            .iter()
            .map(|(&(s, t), r)| {
                let m = ModuleMorphism::new_unchecked(stalks[s].clone(), stalks[t].clone(), r.matrix.clone(), r.shift.clone());
                ((s, t), m)
            })
            .collect();
        SheafOfModules { fan: self.fan.clone(), flavor: self.flavor, stalks, restrictions }
    }

    pub fn direct_sum(parts: &[&SheafOfModules]) -> Result<Self> {
        let first = parts.first().ok_or(Error::ConeMismatch)?;
        let (fan, flavor) = (first.fan.clone(), first.flavor);
        let stalks: Vec<FgGradedModule> = fan
            .cone_ids()
            .map(|c| FgGradedModule::direct_sum(&parts.iter().map(|p| &p.stalks[c]).collect::<Vec<_>>(), frame(&fan, c, flavor)))
            .collect();
        let mut restrictions = BTreeMap::new();
        for (&(s, t), _) in &first.restrictions {
            let mut matrix = BTreeMap::new();
            let (mut ro, mut co) = (0, 0);
            for p in parts {
                for (&(i, j), v) in &p.restrictions[&(s, t)].matrix {
                    matrix.insert((i + ro, j + co), v.clone());
                }
                ro += p.stalks[t].num_gens();
                co += p.stalks[s].num_gens();
            }
            let shift = vec![0; stalks[t].frame.degree_len()];
            restrictions.insert((s, t), ModuleMorphism::new_unchecked(stalks[s].clone(), stalks[t].clone(), matrix, shift));
        }
        Ok(SheafOfModules { fan, flavor, stalks, restrictions })
    }

    /// Stalkwise regrading to flavor B along `M → M_σ`.
    pub fn delta(&self) -> Result<Self> {
        if self.flavor != Flavor::A {
            return Err(Error::FlavorMismatch { expected: "A" });
        }
        let stalks: Vec<FgGradedModule> = self.stalks.iter().map(|s| s.delta_extension()).collect::<Result<_>>()?;
        let restrictions = self
            .restrictions
            .iter()
            .map(|(&(s, t), r)| {
                let shift = vec![0; stalks[t].frame.degree_len()];
                ((s, t), ModuleMorphism::new_unchecked(stalks[s].clone(), stalks[t].clone(), r.matrix.clone(), shift))
            })
            .collect();
        Ok(SheafOfModules { fan: self.fan.clone(), flavor: Flavor::B, stalks, restrictions })
    }

    /// Whether every structure map `𝒜_τ ⊗ F_σ → F_τ` is an isomorphism.
    pub fn is_coherent(&self) -> bool {
        self.fan.cone_ids().all(|s| {
            self.fan.facets(s).iter().all(|&t| self.base_change_iso(s, t).unwrap_or(false))
        })
    }

    fn base_change_iso(&self, sigma: ConeId, tau: ConeId) -> Result<bool> {
        let target = &self.stalks[tau];
        let bc = self.stalks[sigma].base_change(&target.frame);
        let r = &self.restrictions[&(sigma, tau)];
        let map = ModuleMorphism::new(bc, target.clone(), r.matrix.clone(), r.shift.clone())?;
        for g in target.gens() {
            if map.evaluate(g).rank() != target.piece_dim(g) {
                return Ok(false);
            }
        }
        let (kernel, _) = crate::graded_modules::kernel_presentation(&map)?;
        Ok(kernel.num_gens() == 0)
    }

    /// All generator and relation degrees of all stalks, in `M` when the
    /// flavor is A (used to size verification windows).
    pub fn degrees(&self) -> Vec<Degree> {
        let mut out = BTreeSet::new();
        for s in &self.stalks {
            out.extend(s.relations.row_degrees.iter().cloned());
            out.extend(s.relations.col_degrees.iter().cloned());
        }
        out.into_iter().collect()
    }
}

fn stalks_ref(fan: &Fan, flavor: Flavor, cone: ConeId) -> FgGradedModule {
    FgGradedModule::zero(frame(fan, cone, flavor))
}

pub(crate) fn zero_map(source: &FgGradedModule, target: &FgGradedModule) -> ModuleMorphism {
    ModuleMorphism::new_unchecked(source.clone(), target.clone(), BTreeMap::new(), vec![0; target.frame.degree_len()])
}

fn unit_map(source: &FgGradedModule, target: &FgGradedModule) -> ModuleMorphism {
    let matrix = (0..source.num_gens()).map(|i| ((i, i), Q::one())).collect();
    ModuleMorphism::new_unchecked(source.clone(), target.clone(), matrix, vec![0; target.frame.degree_len()])
}

/// `𝒜(m)_{[σ]}` (flavor A, `m ∈ M`) or `ℬ(m)_{[σ]}` (flavor B, `m` in the
/// coordinates of `M_σ`): free of rank one on every face of `σ`.
pub fn standard_open(fan: &Arc<Fan>, sigma: ConeId, flavor: Flavor, m: &[i64]) -> Result<SheafOfModules> {
    let top = frame(fan, sigma, flavor);
    top.check_len(m)?;
    let faces = fan.faces(sigma);
    let stalks: Vec<FgGradedModule> = fan
        .cone_ids()
        .map(|c| {
            let fr = frame(fan, c, flavor);
            if faces.contains(&c) {
                let d = top.transport(&fr, m);
                FgGradedModule::free(fr, vec![d]).expect("degree length")
            } else {
                FgGradedModule::zero(fr)
            }
        })
        .collect();
    Ok(with_unit_restrictions(fan.clone(), flavor, stalks))
}

/// `𝒜(m)_{{σ}}`: a single rank-one free stalk at `σ`.
pub fn standard_point(fan: &Arc<Fan>, sigma: ConeId, flavor: Flavor, m: &[i64]) -> Result<SheafOfModules> {
    let top = frame(fan, sigma, flavor);
    top.check_len(m)?;
    let stalks: Vec<FgGradedModule> = fan
        .cone_ids()
        .map(|c| {
            let fr = frame(fan, c, flavor);
            if c == sigma {
                FgGradedModule::free(fr, vec![m.to_vec()]).expect("degree length")
            } else {
                FgGradedModule::zero(fr)
            }
        })
        .collect();
    Ok(with_unit_restrictions(fan.clone(), flavor, stalks))
}

/// Restrictions that send generator `i` to generator `i` wherever both
/// stalks have it, zero elsewhere.
pub(crate) fn with_unit_restrictions(fan: Arc<Fan>, flavor: Flavor, stalks: Vec<FgGradedModule>) -> SheafOfModules {
    let mut restrictions = BTreeMap::new();
    for s in fan.cone_ids() {
        for t in fan.faces(s) {
            if t == s {
                continue;
            }
            let r = if stalks[s].num_gens() > 0 && stalks[s].num_gens() == stalks[t].num_gens() {
                unit_map(&stalks[s], &stalks[t])
            } else {
                zero_map(&stalks[s], &stalks[t])
            };
            restrictions.insert((s, t), r);
        }
    }
    SheafOfModules { fan, flavor, stalks, restrictions }
}

/// A locally closed subset of the fan space: a set of cones that is convex
/// for the face order (`ξ ⊆ τ ⊆ σ` with `ξ, σ` in it forces `τ` in it).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocallyClosed {
    cones: BTreeSet<ConeId>,
}

impl LocallyClosed {
    pub fn new(fan: &Fan, cones: impl IntoIterator<Item = ConeId>) -> Result<Self> {
        let cones: BTreeSet<ConeId> = cones.into_iter().collect();
        for &s in &cones {
            for &x in &cones {
                if x != s && fan.is_face(x, s) {
                    for t in fan.faces(s) {
                        if fan.is_face(x, t) && !cones.contains(&t) {
                            return Err(Error::NotLocallyClosed);
                        }
                    }
                }
            }
        }
        Ok(LocallyClosed { cones })
    }

    /// `U₁ ∖ U₂` for the opens generated by the given cones.
    pub fn difference(fan: &Fan, u1: &[ConeId], u2: &[ConeId]) -> Result<Self> {
        let open = |gens: &[ConeId]| -> BTreeSet<ConeId> { gens.iter().flat_map(|&g| fan.faces(g)).collect() };
        let (a, b) = (open(u1), open(u2));
        Self::new(fan, a.difference(&b).copied())
    }

    pub fn open(fan: &Fan, gens: &[ConeId]) -> Result<Self> {
        Self::difference(fan, gens, &[])
    }

    /// The complement of an open set, which is closed.
    pub fn complement(&self, fan: &Fan) -> Result<Self> {
        Self::new(fan, fan.cone_ids().filter(|c| !self.cones.contains(c)))
    }

    pub fn contains(&self, cone: ConeId) -> bool {
        self.cones.contains(&cone)
    }
}

/// `F_Z`: stalks on `Z` kept with their restrictions, all others zeroed.
pub fn extension_by_zero(f: &SheafOfModules, z: &LocallyClosed) -> SheafOfModules {
    let fan = f.fan.clone();
    let stalks: Vec<FgGradedModule> = fan
        .cone_ids()
        .map(|c| if z.contains(c) { f.stalks[c].clone() } else { FgGradedModule::zero(frame(&fan, c, f.flavor)) })
        .collect();
    let restrictions = f
        .restrictions
        .iter()
        .map(|(&(s, t), r)| {
            let m = if z.contains(s) && z.contains(t) { r.clone() } else { zero_map(&stalks[s], &stalks[t]) };
            ((s, t), m)
        })
        .collect();
    SheafOfModules { fan, flavor: f.flavor, stalks, restrictions }
}

/// A degree-zero map of sheaves, one module map per cone.
#[derive(Clone, Debug)]
pub struct SheafMorphism {
    pub maps: Vec<ModuleMorphism>,
}

impl SheafMorphism {
    /// Checks compatibility with restrictions on generators.
    pub fn new(source: &SheafOfModules, target: &SheafOfModules, maps: Vec<ModuleMorphism>) -> Result<Self> {
        let fan = &source.fan;
        if maps.len() != fan.num_cones() {
            return Err(Error::LengthMismatch { expected: fan.num_cones(), got: maps.len() });
        }
        for (c, m) in maps.iter().enumerate() {
            if m.source != source.stalks[c] || m.target != target.stalks[c] || !m.is_degree_zero() {
                return Err(Error::BadMorphism(format!("sheaf map component at cone {c} does not match")));
            }
        }
        for s in fan.cone_ids() {
            for &t in fan.facets(s) {
                let a = maps[s].then(&target.restrictions[&(s, t)])?;
                let b = source.restrictions[&(s, t)].then(&maps[t])?;
                if !a.same_map(&b) {
                    return Err(Error::BadMorphism(format!("sheaf map is not natural on {s}->{t}")));
                }
            }
        }
        Ok(SheafMorphism { maps })
    }

    pub fn zero(source: &SheafOfModules, target: &SheafOfModules) -> Self {
        SheafMorphism { maps: source.stalks.iter().zip(&target.stalks).map(|(a, b)| zero_map(a, b)).collect() }
    }
}

/// A bounded complex of sheaves; term `k` sits in cohomological degree
/// `start + k` and `diffs[k]` maps it to term `k + 1`.
#[derive(Clone, Debug)]
pub struct SheafComplex {
    pub start: i64,
    pub terms: Vec<SheafOfModules>,
    pub diffs: Vec<SheafMorphism>,
}

impl SheafComplex {
    /// A single sheaf placed in degree 0.
    pub fn single(f: SheafOfModules) -> Self {
        SheafComplex { start: 0, terms: vec![f], diffs: Vec::new() }
    }

    pub fn new(start: i64, terms: Vec<SheafOfModules>, diffs: Vec<SheafMorphism>) -> Result<Self> {
        if terms.is_empty() || diffs.len() + 1 != terms.len() {
            return Err(Error::LengthMismatch { expected: terms.len().saturating_sub(1), got: diffs.len() });
        }
        Ok(SheafComplex { start, terms, diffs })
    }

    pub fn fan(&self) -> &Arc<Fan> {
        self.terms[0].fan()
    }

    pub fn flavor(&self) -> Flavor {
        self.terms[0].flavor()
    }
}

impl ConeFrame {
    pub(crate) fn check_len(&self, d: &[i64]) -> Result<()> {
        if d.len() != self.degree_len() {
            return Err(Error::LengthMismatch { expected: self.degree_len(), got: d.len() });
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice_fan::{builtin_fan, ZERO_CONE};
    use crate::linalg::q;

    fn fan(name: &str) -> Arc<Fan> {
        Arc::new(builtin_fan(name).unwrap())
    }

    #[test]
    fn standard_objects_have_expected_stalks() {
        let f = fan("a2");
        let top = f.cone_id(&[0, 1]).unwrap();
        let o = standard_open(&f, top, Flavor::A, &[0, 0]).unwrap();
        assert!(f.cone_ids().all(|c| o.stalk(c).num_gens() == 1));
        assert!(o.is_coherent());
        let p = standard_point(&f, top, Flavor::A, &[0, 0]).unwrap();
        assert_eq!(p.stalk(ZERO_CONE).num_gens(), 0);
        assert!(!p.is_coherent());
        let z = standard_open(&f, ZERO_CONE, Flavor::A, &[0, 0]).unwrap();
        assert!((1..f.num_cones()).all(|c| z.stalk(c).num_gens() == 0));
    }

    #[test]
    fn extension_by_zero_sequence_on_p1() {
        let f = fan("p1");
        let stalks = f.cone_ids().map(|c| FgGradedModule::free(frame(&f, c, Flavor::A), vec![vec![0]]).unwrap()).collect();
        let a = with_unit_restrictions(f.clone(), Flavor::A, stalks);
        let u = LocallyClosed::open(&f, &[ZERO_CONE]).unwrap();
        let z = u.complement(&f).unwrap();
        let fu = extension_by_zero(&a, &u);
        let fz = extension_by_zero(&a, &z);
        for c in f.cone_ids() {
            for m in -2..=2 {
                assert_eq!(fu.piece_dim(c, &[m]) + fz.piece_dim(c, &[m]), a.piece_dim(c, &[m]));
            }
        }
        assert_eq!(fu.stalk(ZERO_CONE).num_gens(), 1);
        assert_eq!(fz.stalk(ZERO_CONE).num_gens(), 0);
        assert_eq!(extension_by_zero(&a, &LocallyClosed::new(&f, f.cone_ids()).unwrap()).stalks(), a.stalks());
    }

    #[test]
    fn non_convex_subset_rejected() {
        let f = fan("a2");
        let top = f.cone_id(&[0, 1]).unwrap();
        assert_eq!(LocallyClosed::new(&f, [ZERO_CONE, top]), Err(Error::NotLocallyClosed));
    }

    #[test]
    fn inconsistent_restrictions_rejected() {
        let f = fan("a2");
        let stalks: Vec<FgGradedModule> =
            f.cone_ids().map(|c| FgGradedModule::free(frame(&f, c, Flavor::A), vec![vec![0, 0]]).unwrap()).collect();
        let top = f.cone_id(&[0, 1]).unwrap();
        let mut given = BTreeMap::new();
        for s in f.cone_ids() {
            for &t in f.facets(s) {
                let c = if s == top && t == f.cone_id(&[0]).unwrap() { q(2) } else { q(1) };
                given.insert((s, t), ModuleMorphism::new(stalks[s].clone(), stalks[t].clone(), [((0, 0), c)], vec![0, 0]).unwrap());
            }
        }
        assert!(SheafOfModules::new(f, Flavor::A, stalks, given).is_err());
    }
}
