//! Complexes of finite-dimensional vector spaces obtained by evaluating a
//! complex at one site and one degree, their cohomology, and the finite
//! degree sets on which claims are checked.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graded_modules::vadd;
use crate::lattice_fan::{ConeId, Fan, LatticeVector};
use crate::linalg::QMatrix;
use crate::sheaf_modules::SheafComplex;

/// `V_0 → V_1 → …` with `V_k` in cohomological degree `start + k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EvaluatedComplex {
    pub start: i64,
    pub dims: Vec<usize>,
    /// `maps[k]: V_k → V_{k+1}`, a `dims[k+1] × dims[k]` matrix.
    pub maps: Vec<QMatrix>,
}

impl EvaluatedComplex {
    pub fn new(start: i64, dims: Vec<usize>, maps: Vec<QMatrix>) -> Result<Self> {
        if dims.len() != maps.len() + 1 && !(dims.is_empty() && maps.is_empty()) {
            return Err(Error::LengthMismatch { expected: dims.len().saturating_sub(1), got: maps.len() });
        }
        for (k, m) in maps.iter().enumerate() {
            if m.shape() != (dims[k + 1], dims[k]) {
                return Err(Error::BadMorphism(format!("map {k} has shape {:?}", m.shape())));
            }
        }
        Ok(EvaluatedComplex { start, dims, maps })
    }

    pub fn zero(start: i64, len: usize) -> Self {
        let maps = (1..len).map(|_| QMatrix::zeros(0, 0)).collect();
        EvaluatedComplex { start, dims: vec![0; len], maps }
    }

    /// `d_{k+1} d_k = 0` everywhere; the first failing position otherwise.
    pub fn check_complex(&self) -> Result<()> {
        for k in 0..self.maps.len().saturating_sub(1) {
            if !self.maps[k + 1].mul(&self.maps[k]).is_zero() {
                return Err(Error::NotAComplex { position: k });
            }
        }
        Ok(())
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.dims.iter().enumerate().map(|(k, &d)| if k % 2 == 0 { d as i64 } else { -(d as i64) }).sum()
    }
}

/// `dim H^k = dim V_k − rank d_k − rank d_{k−1}`.
pub fn cohomology_dims(ec: &EvaluatedComplex) -> Result<Vec<usize>> {
    ec.check_complex()?;
    let ranks: Vec<usize> = ec.maps.iter().map(|m| m.rank()).collect();
    Ok(ec
        .dims
        .iter()
        .enumerate()
        .map(|(k, &d)| {
            let out = ranks.get(k).copied().unwrap_or(0);
            let inc = if k > 0 { ranks[k - 1] } else { 0 };
            d - out - inc
        })
        .collect())
}

pub fn is_exact(ec: &EvaluatedComplex) -> Result<bool> {
    Ok(cohomology_dims(ec)?.iter().all(|&h| h == 0))
}

/// A complex of sheaves at a cone and a degree in the native coordinates
/// of that cone.
pub fn evaluate_sheaf_complex(c: &SheafComplex, cone: ConeId, m: &[i64]) -> Result<EvaluatedComplex> {
    let dims = c.terms.iter().map(|t| t.piece_dim(cone, m)).collect();
    let maps = c.diffs.iter().map(|d| d.maps[cone].evaluate(m)).collect();
    EvaluatedComplex::new(c.start, dims, maps)
}

/// An integer box `[lo, hi]` in `M`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DegreeWindow {
    pub lo: Vec<i64>,
    pub hi: Vec<i64>,
}

impl DegreeWindow {
    pub fn cube(rank: usize, lo: i64, hi: i64) -> Self {
        DegreeWindow { lo: vec![lo; rank], hi: vec![hi; rank] }
    }

    /// Bounding box of `degrees`, expanded by `radius` in each coordinate.
    pub fn around(rank: usize, degrees: &[Vec<i64>], radius: i64) -> Self {
        let mut lo = vec![0; rank];
        let mut hi = vec![0; rank];
        for d in degrees {
            for i in 0..rank {
                lo[i] = lo[i].min(d[i]);
                hi[i] = hi[i].max(d[i]);
            }
        }
        DegreeWindow { lo: lo.iter().map(|x| x - radius).collect(), hi: hi.iter().map(|x| x + radius).collect() }
    }

    pub fn rank(&self) -> usize {
        self.lo.len()
    }

    pub fn contains(&self, m: &[i64]) -> bool {
        m.iter().zip(self.lo.iter().zip(&self.hi)).all(|(x, (l, h))| l <= x && x <= h)
    }

    pub fn clamp(&self, m: &[i64]) -> Vec<i64> {
        m.iter().zip(self.lo.iter().zip(&self.hi)).map(|(x, (l, h))| *x.max(l).min(h)).collect()
    }

    /// All lattice points, in lexicographic order.
    pub fn degrees(&self) -> Vec<LatticeVector> {
        let mut out = vec![Vec::new()];
        for (l, h) in self.lo.iter().zip(&self.hi) {
            out = out
                .into_iter()
                .flat_map(|p| {
                    (*l..=*h).map(move |x| {
                        let mut p = p.clone();
                        p.push(x);
                        p
                    })
                })
                .collect();
        }
        out.into_iter().map(LatticeVector).collect()
    }

    pub fn translate(&self, u: &[i64]) -> Self {
        DegreeWindow { lo: vadd(&self.lo, u), hi: vadd(&self.hi, u) }
    }
}

/// One representative per sign pattern of `m ↦ ⟨m − t, r⟩` over all rays
/// `r` and job twists `t`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ChamberSet {
    pub representatives: Vec<LatticeVector>,
}

pub fn sign_pattern(fan: &Fan, twists: &[Vec<i64>], m: &LatticeVector) -> Vec<i8> {
    let mut out = Vec::new();
    for r in fan.rays() {
        for t in twists {
            let v: i64 = r.0.iter().zip(m.0.iter().zip(t)).map(|(a, (x, y))| a * (x - y)).sum();
            out.push(v.signum() as i8);
        }
    }
    out
}

/// Chamber representatives found in `search`, the first in lexicographic
/// order for each pattern.
pub fn chambers(fan: &Fan, twists: &[Vec<i64>], search: &DegreeWindow) -> ChamberSet {
    let mut seen: BTreeMap<Vec<i8>, LatticeVector> = BTreeMap::new();
    for m in search.degrees() {
        seen.entry(sign_pattern(fan, twists, &m)).or_insert(m);
    }
    let mut representatives: Vec<LatticeVector> = seen.into_values().collect();
    representatives.sort();
    ChamberSet { representatives }
}

/// The degrees a job is checked on: the window around its degrees (radius
/// 2), plus chamber representatives from a box twice as wide when asked.
pub fn verification_degrees(
    fan: &Fan,
    job_degrees: &[Vec<i64>],
    with_chambers: bool,
) -> (DegreeWindow, Option<ChamberSet>) {
    let window = DegreeWindow::around(fan.rank(), job_degrees, 2);
    let chamber = with_chambers.then(|| {
        let mut twists: Vec<Vec<i64>> = job_degrees.to_vec();
        if twists.is_empty() {
            twists.push(vec![0; fan.rank()]);
        }
        let search = DegreeWindow::around(fan.rank(), job_degrees, 4);
        chambers(fan, &twists, &search)
    });
    (window, chamber)
}
