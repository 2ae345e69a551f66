//! Smooth fans in an integer lattice: cones, the face poset, dual-cone
//! membership, orientations with their incidence signs, and fan morphisms.

mod lp;

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;
use std::ops::{Add, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::intmat::{determinant, gcd, smith_normal_form, IntMatrix};
use crate::linalg::{q, QMatrix, Q};

/// An element of `N` or of `M`; which one is fixed by context.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize, Default)]
#[serde(transparent)]
pub struct LatticeVector(pub Vec<i64>);

impl fmt::Debug for LatticeVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

impl LatticeVector {
    pub fn new(coords: Vec<i64>) -> Self {
        LatticeVector(coords)
    }

    pub fn zero(rank: usize) -> Self {
        LatticeVector(vec![0; rank])
    }

    pub fn rank(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[i64] {
        &self.0
    }

    pub fn pairing(&self, other: &LatticeVector) -> i64 {
        debug_assert_eq!(self.rank(), other.rank());
        self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&x| x == 0)
    }
}

impl From<Vec<i64>> for LatticeVector {
    fn from(v: Vec<i64>) -> Self {
        LatticeVector(v)
    }
}

impl From<&[i64]> for LatticeVector {
    fn from(v: &[i64]) -> Self {
        LatticeVector(v.to_vec())
    }
}

impl<const K: usize> From<[i64; K]> for LatticeVector {
    fn from(v: [i64; K]) -> Self {
        LatticeVector(v.to_vec())
    }
}

impl Add for &LatticeVector {
    type Output = LatticeVector;
    fn add(self, rhs: &LatticeVector) -> LatticeVector {
        assert_eq!(self.rank(), rhs.rank(), "rank mismatch");
        LatticeVector(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &LatticeVector {
    type Output = LatticeVector;
    fn sub(self, rhs: &LatticeVector) -> LatticeVector {
        assert_eq!(self.rank(), rhs.rank(), "rank mismatch");
        LatticeVector(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl Neg for &LatticeVector {
    type Output = LatticeVector;
    fn neg(self) -> LatticeVector {
        LatticeVector(self.0.iter().map(|a| -a).collect())
    }
}

/// Index of a cone inside its fan. The zero cone is always `0`.
pub type ConeId = usize;

pub const ZERO_CONE: ConeId = 0;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cone {
    /// Sorted ray indices.
    pub rays: Vec<usize>,
    /// Sign of the stored ordering relative to the sorted one.
    pub orientation: i8,
}

impl Cone {
    pub fn dim(&self) -> usize {
        self.rays.len()
    }

    /// The ray ordering this cone is oriented by (sorted, with the first two
    /// entries swapped for a negative orientation).
    pub fn oriented_rays(&self) -> Vec<usize> {
        let mut r = self.rays.clone();
        if self.orientation < 0 && r.len() >= 2 {
            r.swap(0, 1);
        }
        r
    }
}

#[derive(Clone, Debug)]
pub struct Fan {
    rank: usize,
    rays: Vec<LatticeVector>,
    cones: Vec<Cone>,
    index: BTreeMap<Vec<usize>, ConeId>,
    max_cones: Vec<ConeId>,
    complete: bool,
    facets: Vec<Vec<ConeId>>,
    cofacets: Vec<Vec<ConeId>>,
    incidence: BTreeMap<(ConeId, ConeId), i8>,
}

/// Builds and validates a smooth fan; top-dimensional cones are oriented by
/// the standard orientation of `N_R`.
pub fn build_fan(rank: usize, rays: Vec<LatticeVector>, max_cone_ray_sets: &[Vec<usize>]) -> Result<Fan> {
    build_fan_oriented(rank, rays, max_cone_ray_sets, 1)
}

/// As [`build_fan`], with an explicit global orientation sign (±1).
pub fn build_fan_oriented(
    rank: usize,
    rays: Vec<LatticeVector>,
    max_cone_ray_sets: &[Vec<usize>],
    global_orientation: i8,
) -> Result<Fan> {
    for (i, r) in rays.iter().enumerate() {
        if r.rank() != rank || r.is_zero() || rays[..i].contains(r) {
            return Err(Error::InvalidRay { index: i });
        }
        if r.0.iter().fold(0, |g, &x| gcd(g, x)) != 1 {
            return Err(Error::NonPrimitiveRay { index: i, coords: r.0.clone() });
        }
    }
    let mut all: BTreeSet<Vec<usize>> = BTreeSet::new();
    let mut given: Vec<Vec<usize>> = Vec::new();
    for set in max_cone_ray_sets {
        let mut s = set.clone();
        s.sort_unstable();
        s.dedup();
        if s.iter().any(|&i| i >= rays.len()) {
            return Err(Error::UnknownCone(s));
        }
        for mask in 0u64..(1u64 << s.len()) {
            let sub: Vec<usize> = s.iter().enumerate().filter(|(k, _)| mask >> k & 1 == 1).map(|(_, &i)| i).collect();
            all.insert(sub);
        }
        given.push(s);
    }
    all.insert(Vec::new());

    // Smoothness of every cone.
    for s in &all {
        if s.is_empty() {
            continue;
        }
        let m = IntMatrix::from_rows(&s.iter().map(|&i| rays[i].0.clone()).collect::<Vec<_>>(), rank);
        let factors = smith_normal_form(&m).invariant_factors();
        if factors.len() != s.len() || factors.iter().any(|&f| f != 1) {
            return Err(Error::NonSmoothCone { rays: s.clone(), factors });
        }
    }

    let mut sorted: Vec<Vec<usize>> = all.into_iter().collect();
    sorted.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    let index: BTreeMap<Vec<usize>, ConeId> = sorted.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect();

    let is_subset = |a: &[usize], b: &[usize]| a.iter().all(|x| b.contains(x));
    let mut max_cones: Vec<ConeId> = Vec::new();
    for (id, s) in sorted.iter().enumerate() {
        if !sorted.iter().any(|t| t.len() > s.len() && is_subset(s, t)) {
            max_cones.push(id);
        }
    }

    // Pairwise intersections of maximal cones must be common faces.
    for (i, &a) in max_cones.iter().enumerate() {
        for &b in &max_cones[i + 1..] {
            if !meets_in_common_face(&rays, &sorted[a], &sorted[b]) {
                return Err(Error::NotAFan { a: sorted[a].clone(), b: sorted[b].clone() });
            }
        }
    }

    let mut cones: Vec<Cone> = sorted.iter().map(|s| Cone { rays: s.clone(), orientation: 1 }).collect();
    for c in cones.iter_mut() {
        if c.dim() == rank && rank > 0 {
            let cols: Vec<Vec<i64>> = c.rays.iter().map(|&i| rays[i].0.clone()).collect();
            let det = determinant(&IntMatrix::from_rows(&cols, rank));
            c.orientation = if det > 0 { global_orientation } else { -global_orientation };
        }
    }

    let n = cones.len();
    let mut facets = vec![Vec::new(); n];
    let mut cofacets = vec![Vec::new(); n];
    let mut incidence = BTreeMap::new();
    for (sid, c) in cones.iter().enumerate() {
        for p in 0..c.rays.len() {
            let mut sub = c.rays.clone();
            sub.remove(p);
            let tid = index[&sub];
            facets[sid].push(tid);
            cofacets[tid].push(sid);
            let sign = if p % 2 == 0 { 1 } else { -1 };
            incidence.insert((sid, tid), sign * c.orientation * cones[tid].orientation);
        }
        facets[sid].sort_unstable();
    }
    for c in cofacets.iter_mut() {
        c.sort_unstable();
    }

    let complete = completeness(rank, &cones, &facets, &cofacets);
    Ok(Fan { rank, rays, cones, index, max_cones, complete, facets, cofacets, incidence })
}

fn completeness(rank: usize, cones: &[Cone], facets: &[Vec<ConeId>], cofacets: &[Vec<ConeId>]) -> bool {
    let top: Vec<ConeId> = (0..cones.len()).filter(|&i| cones[i].dim() == rank).collect();
    if top.is_empty() {
        return false;
    }
    if rank == 0 {
        return true;
    }
    for (id, c) in cones.iter().enumerate() {
        if c.dim() + 1 == rank && cofacets[id].iter().filter(|&&s| cones[s].dim() == rank).count() != 2 {
            return false;
        }
    }
    // Connectivity of top cones through shared facets.
    let mut seen = BTreeSet::from([top[0]]);
    let mut queue = VecDeque::from([top[0]]);
    while let Some(s) = queue.pop_front() {
        for &f in &facets[s] {
            for &t in &cofacets[f] {
                if cones[t].dim() == rank && seen.insert(t) {
                    queue.push_back(t);
                }
            }
        }
    }
    seen.len() == top.len()
}

/// Simplicial cones on ray sets `s` and `t` meet in the cone on `s ∩ t`
/// unless some point of the intersection has positive weight on `s \ t`.
fn meets_in_common_face(rays: &[LatticeVector], s: &[usize], t: &[usize]) -> bool {
    let only_s: Vec<usize> = s.iter().copied().filter(|i| !t.contains(i)).collect();
    let only_t: Vec<usize> = t.iter().copied().filter(|i| !s.contains(i)).collect();
    let common: Vec<usize> = s.iter().copied().filter(|i| t.contains(i)).collect();
    if only_s.is_empty() || only_t.is_empty() {
        return true;
    }
    let rank = rays[0].rank();
    // Columns: λ (only_s), μ (only_t), ν+ and ν- (common).
    let mut cols: Vec<Vec<i64>> = Vec::new();
    for &i in &only_s {
        cols.push(rays[i].0.clone());
    }
    for &i in &only_t {
        cols.push((-&rays[i]).0);
    }
    for &i in &common {
        cols.push(rays[i].0.clone());
    }
    for &i in &common {
        cols.push((-&rays[i]).0);
    }
    let mut a: Vec<Vec<Q>> = (0..rank).map(|r| cols.iter().map(|c| q(c[r])).collect()).collect();
    let mut norm = vec![q(0); cols.len()];
    for slot in norm.iter_mut().take(only_s.len()) {
        *slot = q(1);
    }
    a.push(norm);
    let mut b = vec![q(0); rank];
    b.push(q(1));
    !lp::feasible(&a, &b)
}

/// Integer vectors `u_i` with `⟨u_i, r_j⟩ = δ_ij`: the dual basis of a
/// unimodular completion of the (smooth) ray set `rays`.
pub fn dual_basis(rays: &[LatticeVector], rank: usize) -> Vec<LatticeVector> {
    let d = rays.len();
    if d == 0 {
        return Vec::new();
    }
    let rows: Vec<Vec<i64>> = rays.iter().map(|r| r.0.clone()).collect();
    let s = smith_normal_form(&IntMatrix::from_rows(&rows, rank));
    // a = u⁻¹ d v⁻¹ with d = [I 0]; a x = e_i  ⇔  x = v [u e_i; 0].
    (0..d)
        .map(|i| {
            let x: Vec<i64> = (0..rank).map(|r| (0..d).map(|c| s.v.get(r, c) * s.u.get(c, i)).sum::<i128>() as i64).collect();
            LatticeVector(x)
        })
        .collect()
}

impl Fan {
    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn rays(&self) -> &[LatticeVector] {
        &self.rays
    }

    pub fn cones(&self) -> &[Cone] {
        &self.cones
    }

    pub fn cone(&self, id: ConeId) -> &Cone {
        &self.cones[id]
    }

    pub fn num_cones(&self) -> usize {
        self.cones.len()
    }

    pub fn cone_ids(&self) -> std::ops::Range<ConeId> {
        0..self.cones.len()
    }

    pub fn dim(&self, id: ConeId) -> usize {
        self.cones[id].dim()
    }

    pub fn max_cones(&self) -> &[ConeId] {
        &self.max_cones
    }

    pub fn is_complete(&self) -> bool {
        self.complete
    }

    pub fn cone_id(&self, rays: &[usize]) -> Option<ConeId> {
        let mut s = rays.to_vec();
        s.sort_unstable();
        self.index.get(&s).copied()
    }

    pub fn cone_id_or_err(&self, rays: &[usize]) -> Result<ConeId> {
        self.cone_id(rays).ok_or_else(|| Error::UnknownCone(rays.to_vec()))
    }

    pub fn cones_of_dim(&self, d: usize) -> impl Iterator<Item = ConeId> + '_ {
        self.cone_ids().filter(move |&c| self.dim(c) == d)
    }

    /// `tau ⊆ sigma` as cones.
    pub fn is_face(&self, tau: ConeId, sigma: ConeId) -> bool {
        let s = &self.cones[sigma].rays;
        self.cones[tau].rays.iter().all(|r| s.contains(r))
    }

    /// All faces of `sigma`, including itself, in cone-id order.
    pub fn faces(&self, sigma: ConeId) -> Vec<ConeId> {
        self.cone_ids().filter(|&t| self.is_face(t, sigma)).collect()
    }

    /// All cones containing `tau`, including itself.
    pub fn star(&self, tau: ConeId) -> Vec<ConeId> {
        self.cone_ids().filter(|&s| self.is_face(tau, s)).collect()
    }

    pub fn facets(&self, sigma: ConeId) -> &[ConeId] {
        &self.facets[sigma]
    }

    pub fn cofacets(&self, tau: ConeId) -> &[ConeId] {
        &self.cofacets[tau]
    }

    /// Smallest cone containing both, if any (the cone on the union of rays).
    pub fn join(&self, a: ConeId, b: ConeId) -> Option<ConeId> {
        let mut s: Vec<usize> = self.cones[a].rays.iter().chain(&self.cones[b].rays).copied().collect();
        s.sort_unstable();
        s.dedup();
        self.cone_id(&s)
    }

    pub fn meet(&self, a: ConeId, b: ConeId) -> ConeId {
        let s: Vec<usize> = self.cones[a].rays.iter().copied().filter(|r| self.cones[b].rays.contains(r)).collect();
        self.index[&s]
    }

    pub fn ray_vectors(&self, sigma: ConeId) -> Vec<&LatticeVector> {
        self.cones[sigma].rays.iter().map(|&i| &self.rays[i]).collect()
    }

    fn check_rank(&self, m: &LatticeVector) -> Result<()> {
        if m.rank() != self.rank {
            return Err(Error::RankMismatch { expected: self.rank, got: m.rank() });
        }
        Ok(())
    }

    /// `m ∈ σ∨`: every ray of `sigma` pairs nonnegatively with `m`.
    pub fn dual_membership(&self, sigma: ConeId, m: &LatticeVector) -> Result<bool> {
        self.check_rank(m)?;
        Ok(self.in_dual(sigma, m))
    }

    pub(crate) fn in_dual(&self, sigma: ConeId, m: &LatticeVector) -> bool {
        self.cones[sigma].rays.iter().all(|&i| self.rays[i].pairing(m) >= 0)
    }

    /// Image of `m` in `M_σ ≅ Z^dim σ`: the pairings with the sorted rays.
    pub fn b_degree(&self, sigma: ConeId, m: &LatticeVector) -> Result<Vec<i64>> {
        self.check_rank(m)?;
        Ok(self.pairings(sigma, m))
    }

    pub(crate) fn pairings(&self, sigma: ConeId, m: &LatticeVector) -> Vec<i64> {
        self.cones[sigma].rays.iter().map(|&i| self.rays[i].pairing(m)).collect()
    }

    /// Positions in `sigma`'s ray list of the rays of its face `tau`.
    pub fn face_positions(&self, sigma: ConeId, tau: ConeId) -> Vec<usize> {
        let s = &self.cones[sigma].rays;
        self.cones[tau].rays.iter().map(|r| s.iter().position(|x| x == r).expect("not a face")).collect()
    }

    pub fn incidence_sign(&self, sigma: ConeId, tau: ConeId) -> Result<i8> {
        self.incidence.get(&(sigma, tau)).copied().ok_or_else(|| Error::NotAFacet {
            sigma: self.cones[sigma].rays.clone(),
            tau: self.cones[tau].rays.clone(),
        })
    }

    /// Flip one stored incidence sign. Only useful for fault-injection tests:
    /// afterwards cellular differentials through this pair fail `d² = 0`.
    pub fn mutate_incidence_sign(&mut self, sigma: ConeId, tau: ConeId) -> Result<()> {
        let s = self.incidence_sign(sigma, tau)?;
        self.incidence.insert((sigma, tau), -s);
        Ok(())
    }

    /// Every codimension-two pair has opposite sign products along its two paths.
    pub fn check_sign_coherence(&self) -> Result<()> {
        for sigma in self.cone_ids() {
            for xi in self.faces(sigma) {
                if self.dim(xi) + 2 != self.dim(sigma) {
                    continue;
                }
                let total: i32 = self.facets[sigma]
                    .iter()
                    .filter(|&&t| self.is_face(xi, t))
                    .map(|&t| self.incidence[&(sigma, t)] as i32 * self.incidence[&(t, xi)] as i32)
                    .sum();
                if total != 0 {
                    return Err(Error::SignIncoherence {
                        sigma: self.cones[sigma].rays.clone(),
                        xi: self.cones[xi].rays.clone(),
                    });
                }
            }
        }
        Ok(())
    }

    /// Integer `u_1..u_d ∈ M` with `⟨u_i, r_j⟩ = δ_ij` for the sorted rays of
    /// `sigma`.
    pub fn dual_section(&self, sigma: ConeId) -> Vec<LatticeVector> {
        let rays: Vec<LatticeVector> = self.ray_vectors(sigma).into_iter().cloned().collect();
        dual_basis(&rays, self.rank)
    }

    /// Lift of a `M_σ` degree along [`Fan::dual_section`].
    pub fn section_lift(&self, sigma: ConeId, b: &[i64]) -> LatticeVector {
        let mut m = LatticeVector::zero(self.rank);
        for (u, &k) in self.dual_section(sigma).iter().zip(b) {
            for (slot, x) in m.0.iter_mut().zip(&u.0) {
                *slot += k * x;
            }
        }
        m
    }

    /// Whether `v ∈ N` lies in the cone `sigma`; returns the ray coefficients.
    pub fn cone_coordinates(&self, sigma: ConeId, v: &LatticeVector) -> Option<Vec<Q>> {
        let d = self.dim(sigma);
        let cols: Vec<Vec<Q>> = self.ray_vectors(sigma).iter().map(|r| r.0.iter().map(|&x| q(x)).collect()).collect();
        let a = QMatrix::from_columns(self.rank, &cols);
        let b: Vec<Q> = v.0.iter().map(|&x| q(x)).collect();
        if d == 0 {
            return if v.is_zero() { Some(Vec::new()) } else { None };
        }
        let x = a.solve(&b)?;
        if x.iter().any(|c| c < &q(0)) {
            return None;
        }
        Some(x)
    }

    /// Whether the ray set describes a cone of this fan.
    pub fn contains_cone(&self, rays: &[usize]) -> bool {
        self.cone_id(rays).is_some()
    }
}

/// A toric morphism: a lattice map sending every source cone into some
/// target cone, together with the minimal such target cone per source cone.
#[derive(Clone, Debug)]
pub struct FanMorphism {
    pub source: Fan,
    pub target: Fan,
    /// `target.rank() × source.rank()` integer matrix.
    pub lattice_map: Vec<Vec<i64>>,
    pub cone_image: Vec<ConeId>,
}

pub fn fan_morphism(source: &Fan, target: &Fan, lattice_map: Vec<Vec<i64>>) -> Result<FanMorphism> {
    if lattice_map.len() != target.rank() {
        return Err(Error::RankMismatch { expected: target.rank(), got: lattice_map.len() });
    }
    for row in &lattice_map {
        if row.len() != source.rank() {
            return Err(Error::RankMismatch { expected: source.rank(), got: row.len() });
        }
    }
    let apply = |v: &LatticeVector| -> LatticeVector {
        LatticeVector(lattice_map.iter().map(|row| row.iter().zip(&v.0).map(|(a, b)| a * b).sum()).collect())
    };
    let mut cone_image = Vec::with_capacity(source.num_cones());
    for tau in source.cone_ids() {
        let images: Vec<LatticeVector> = source.ray_vectors(tau).into_iter().map(apply).collect();
        let best = target
            .cone_ids()
            .filter(|&s| images.iter().all(|v| target.cone_coordinates(s, v).is_some()))
            .min_by_key(|&s| (target.dim(s), s));
        match best {
            Some(s) => cone_image.push(s),
            None => return Err(Error::NoContainingCone { cone: source.cone(tau).rays.clone() }),
        }
    }
    Ok(FanMorphism { source: source.clone(), target: target.clone(), lattice_map, cone_image })
}

impl FanMorphism {
    /// Pull back a character of the target torus: `m ↦ m ∘ f`.
    pub fn pullback_character(&self, m: &LatticeVector) -> LatticeVector {
        LatticeVector(
            (0..self.source.rank())
                .map(|j| (0..self.target.rank()).map(|i| self.lattice_map[i][j] * m.0[i]).sum())
                .collect(),
        )
    }

    pub fn image(&self, tau: ConeId) -> ConeId {
        self.cone_image[tau]
    }
}

/// Named fans usable without input files.
pub fn builtin_fan(name: &str) -> Result<Fan> {
    let v = |x: &[i64]| LatticeVector(x.to_vec());
    match name {
        "point" => build_fan(0, vec![], &[]),
        "a1" => build_fan(1, vec![v(&[1])], &[vec![0]]),
        "a2" => build_fan(2, vec![v(&[1, 0]), v(&[0, 1])], &[vec![0, 1]]),
        "a3" => build_fan(3, vec![v(&[1, 0, 0]), v(&[0, 1, 0]), v(&[0, 0, 1])], &[vec![0, 1, 2]]),
        "p1" => build_fan(1, vec![v(&[1]), v(&[-1])], &[vec![0], vec![1]]),
        "p2" => build_fan(
            2,
            vec![v(&[1, 0]), v(&[0, 1]), v(&[-1, -1])],
            &[vec![0, 1], vec![1, 2], vec![0, 2]],
        ),
        "p1xp1" => build_fan(
            2,
            vec![v(&[1, 0]), v(&[0, 1]), v(&[-1, 0]), v(&[0, -1])],
            &[vec![0, 1], vec![1, 2], vec![2, 3], vec![0, 3]],
        ),
        "hirzebruch1" => build_fan(
            2,
            vec![v(&[1, 0]), v(&[0, 1]), v(&[-1, 1]), v(&[0, -1])],
            &[vec![0, 1], vec![1, 2], vec![2, 3], vec![0, 3]],
        ),
        _ => Err(Error::Unknown { kind: "builtin fan", name: name.to_string() }),
    }
}

pub const BUILTIN_FANS: [&str; 5] = ["a2", "p1", "p2", "p1xp1", "hirzebruch1"];
