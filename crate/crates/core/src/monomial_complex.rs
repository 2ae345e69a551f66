//! Complexes whose terms are finite sums of rank-one monomial objects:
//! free modules, their graded duals and top local cohomology modules,
//! placed on an open `[σ]`, a point `{σ}`, the whole fan, or a chart.
//!
//! Every such object has pieces of dimension 0 or 1 spanned by a single
//! character, and the canonical maps between them (restrictions,
//! projections, multiplication by characters) send basis to basis whenever
//! source and target pieces are both nonzero. A differential is therefore a
//! sparse scalar matrix over summands, and its value at a degree is that
//! matrix restricted to the summands alive there.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::Zero;
use rayon::prelude::*;

use crate::degreewise_homology::{cohomology_dims, EvaluatedComplex};
use crate::error::Error;
use crate::graded_modules::vsub;
use crate::lattice_fan::{ConeId, Fan, LatticeVector};
use crate::linalg::{QMatrix, Q};
use crate::stalk_algebras::{Flavor, Support};

/// Where a summand lives.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Place {
    /// On `[σ]`: nonzero at every face of `σ`.
    Open(ConeId),
    /// On `{σ}` only.
    Point(ConeId),
    /// Everywhere on the fan.
    Global,
    /// The direct image from `st(o_τ)`: seen by every chart containing `τ`,
    /// with the sign condition on the rays of `τ`.
    Orbit(ConeId),
    /// A module on the chart of the maximal cone `σ` only.
    Chart(ConeId),
}

/// Where a complex is evaluated: the stalk at a cone, or the chart of a
/// maximal cone.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Site {
    Stalk(ConeId),
    Chart(ConeId),
}

impl Site {
    pub fn cone(self) -> ConeId {
        match self {
            Site::Stalk(c) | Site::Chart(c) => c,
        }
    }
}

/// A rank-one object `X(t)`: its piece at `m` is nonzero iff the sign
/// condition holds for the coordinates of `m − t`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Summand {
    pub place: Place,
    pub support: Support,
    /// In `M` for flavor A; in the coordinates of the anchor cone of
    /// `place` for flavor B.
    pub twist: Vec<i64>,
    /// Free-form tag for reports (source cone, generator index, …).
    pub label: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct MonomialComplex {
    pub fan: Arc<Fan>,
    pub flavor: Flavor,
    pub start: i64,
    pub terms: Vec<Vec<Summand>>,
    /// `diffs[k]` maps term `k` to term `k + 1`; keys are
    /// `(target summand, source summand)`.
    pub diffs: Vec<BTreeMap<(usize, usize), Q>>,
}

impl MonomialComplex {
    pub fn new(fan: Arc<Fan>, flavor: Flavor, start: i64, terms: Vec<Vec<Summand>>) -> Self {
        let n = terms.len().saturating_sub(1);
        MonomialComplex { fan, flavor, start, terms, diffs: vec![BTreeMap::new(); n] }
    }

    /// Terms gathered by degree from a flat list of `(degree, summand)`.
    pub fn from_graded(fan: Arc<Fan>, flavor: Flavor, items: Vec<(i64, Summand)>) -> (Self, Vec<(usize, usize)>) {
        let lo = items.iter().map(|(d, _)| *d).min().unwrap_or(0);
        let hi = items.iter().map(|(d, _)| *d).max().unwrap_or(0);
        let mut terms = vec![Vec::new(); (hi - lo + 1) as usize];
        let mut positions = Vec::with_capacity(items.len());
        for (d, s) in items {
            let k = (d - lo) as usize;
            positions.push((k, terms[k].len()));
            terms[k].push(s);
        }
        (Self::new(fan, flavor, lo, terms), positions)
    }

    pub fn end(&self) -> i64 {
        self.start + self.terms.len() as i64 - 1
    }

    pub fn term_at(&self, degree: i64) -> &[Summand] {
        let k = degree - self.start;
        if k < 0 || k as usize >= self.terms.len() {
            return &[];
        }
        &self.terms[k as usize]
    }

    /// Adds `c` to the entry from summand `(k, s)` to summand `(k + 1, t)`.
    pub fn add_entry(&mut self, k: usize, t: usize, s: usize, c: Q) {
        let e = self.diffs[k].entry((t, s)).or_insert_with(Q::zero);
        *e += c;
        if e.is_zero() {
            self.diffs[k].remove(&(t, s));
        }
    }

    /// Sign-pattern coordinates of `m − twist` for a summand at a site, or
    /// `None` when the summand is invisible there.
    fn coordinates(&self, s: &Summand, site: Site, m: &[i64]) -> Option<Vec<i64>> {
        let fan = &self.fan;
        let (rays_of, anchor) = match (site, s.place) {
            (Site::Stalk(x), Place::Open(sigma)) if fan.is_face(x, sigma) => (x, Some(sigma)),
            (Site::Stalk(x), Place::Point(sigma)) if x == sigma => (x, Some(sigma)),
            (Site::Stalk(x), Place::Global) => (x, None),
            (Site::Chart(rho), Place::Orbit(tau)) if fan.is_face(tau, rho) => (tau, Some(tau)),
            (Site::Chart(rho), Place::Chart(sigma)) if rho == sigma => (rho, Some(rho)),
            _ => return None,
        };
        match self.flavor {
            Flavor::A => {
                let d = LatticeVector(vsub(m, &s.twist));
                Some(fan.pairings(rays_of, &d))
            }
            Flavor::B => {
                // `m` is in the coordinates of the site's stalk.
                let t: Vec<i64> = match anchor {
                    Some(a) => fan.face_positions(a, rays_of).iter().map(|&p| s.twist[p]).collect(),
                    None => vec![0; m.len()],
                };
                Some(vsub(m, &t))
            }
        }
    }

    pub fn is_alive(&self, s: &Summand, site: Site, m: &[i64]) -> bool {
        self.coordinates(s, site, m).is_some_and(|c| s.support.contains(&c))
    }

    /// Values at one site and degree. For flavor B, `m` is given in the
    /// coordinates of the site's cone.
    pub fn evaluate(&self, site: Site, m: &[i64]) -> EvaluatedComplex {
        let alive: Vec<Vec<usize>> = self
            .terms
            .iter()
            .map(|t| (0..t.len()).filter(|&i| self.is_alive(&t[i], site, m)).collect())
            .collect();
        let maps = self
            .diffs
            .iter()
            .enumerate()
            .map(|(k, d)| {
                let (src, tgt) = (&alive[k], &alive[k + 1]);
                let mut a = QMatrix::zeros(tgt.len(), src.len());
                for (&(t, s), c) in d {
                    if let (Ok(r), Ok(col)) = (tgt.binary_search(&t), src.binary_search(&s)) {
                        a.set(r, col, c.clone());
                    }
                }
                a
            })
            .collect();
        EvaluatedComplex { start: self.start, dims: alive.iter().map(|a| a.len()).collect(), maps }
    }

    /// Evaluation at a degree of `M`, converted to the site's coordinates
    /// for flavor B.
    pub fn evaluate_m(&self, site: Site, m: &LatticeVector) -> EvaluatedComplex {
        match self.flavor {
            Flavor::A => self.evaluate(site, &m.0),
            Flavor::B => self.evaluate(site, &self.fan.pairings(site.cone(), m)),
        }
    }

    /// Every `(target, source)` product of consecutive differentials, as
    /// sparse matrices, summed over all middle summands.
    pub fn symbolic_square(&self) -> Vec<BTreeMap<(usize, usize), Q>> {
        (0..self.diffs.len().saturating_sub(1))
            .map(|k| {
                let mut out: BTreeMap<(usize, usize), Q> = BTreeMap::new();
                for (&(t, mid), b) in &self.diffs[k + 1] {
                    for (&(mid2, s), a) in &self.diffs[k] {
                        if mid == mid2 {
                            *out.entry((t, s)).or_insert_with(Q::zero) += b * a;
                        }
                    }
                }
                out.retain(|_, v| !v.is_zero());
                out
            })
            .collect()
    }

    /// The complex shifted so that term `k` sits in degree `start + k − shift`.
    pub fn shifted(mut self, shift: i64) -> Self {
        self.start -= shift;
        self
    }

    /// All twists, for sizing windows.
    pub fn twists(&self) -> Vec<Vec<i64>> {
        let mut t: Vec<Vec<i64>> = self.terms.iter().flatten().map(|s| s.twist.clone()).collect();
        t.sort();
        t.dedup();
        t
    }

    pub fn sites(&self, charts: bool) -> Vec<Site> {
        if charts {
            self.fan.max_cones().iter().map(|&c| Site::Chart(c)).collect()
        } else {
            self.fan.cone_ids().map(Site::Stalk).collect()
        }
    }
}

/// A failed check at one site and degree, with the evaluated complex.
#[derive(Clone, Debug)]
pub struct Counterexample {
    pub site: Site,
    pub degree: Vec<i64>,
    pub complex: EvaluatedComplex,
    pub cohomology: Option<Vec<usize>>,
}

/// Runs `check` over every site and degree in parallel and returns the
/// first failure in (site, degree) order.
pub fn sweep<F>(c: &MonomialComplex, sites: &[Site], degrees: &[LatticeVector], check: F) -> Option<Counterexample>
where
    F: Fn(Site, &LatticeVector, &EvaluatedComplex, &[usize]) -> bool + Sync,
{
    let grid: Vec<(Site, &LatticeVector)> = sites.iter().flat_map(|&s| degrees.iter().map(move |m| (s, m))).collect();
    grid.par_iter()
        .map(|&(site, m)| {
            let ec = c.evaluate_m(site, m);
            match cohomology_dims(&ec) {
                Ok(h) if check(site, m, &ec, &h) => None,
                Ok(h) => Some(Counterexample { site, degree: m.0.clone(), complex: ec, cohomology: Some(h) }),
                Err(Error::NotAComplex { .. }) | Err(_) => {
                    Some(Counterexample { site, degree: m.0.clone(), complex: ec, cohomology: None })
                }
            }
        })
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .next()
}
