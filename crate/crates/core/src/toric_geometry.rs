//! Equivariant line bundles, the functors `ψ` and `φ`, global sections, the
//! Cousin complex, and the Serre functor check.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::{One, Zero};

use crate::degreewise_homology::cohomology_dims;
use crate::error::{Error, Result};
use crate::graded_modules::{vsub, FgGradedModule, ModuleMorphism};
use crate::koszul::{complex_check, exactness_check, koszul_k};
use crate::lattice_fan::{ConeId, Fan, LatticeVector, ZERO_CONE};
use crate::linalg::{q, QMatrix, Q};
use crate::monomial_complex::{sweep, MonomialComplex, Place, Site, Summand};
use crate::report::{combine, Check};
use crate::sheaf_modules::{frame, with_unit_restrictions, SheafComplex, SheafOfModules};
use crate::stalk_algebras::{local_coh_indicator, Flavor, Support};

/// `𝒪(Σ a_i D_i)`: on each cone `τ` the character `m_τ` with
/// `⟨m_τ, r_i⟩ = −a_i` for the rays of `τ`.
#[derive(Clone, Debug)]
pub struct EquivariantLineBundle {
    pub fan: Arc<Fan>,
    pub divisor: Vec<i64>,
    pub characters: Vec<LatticeVector>,
}

pub fn line_bundle(fan: &Arc<Fan>, divisor: &[i64]) -> Result<EquivariantLineBundle> {
    if divisor.len() != fan.rays().len() {
        return Err(Error::LengthMismatch { expected: fan.rays().len(), got: divisor.len() });
    }
    let mut characters = Vec::with_capacity(fan.num_cones());
    for c in fan.cone_ids() {
        let rays = &fan.cone(c).rays;
        let b: Vec<i64> = rays.iter().map(|&i| -divisor[i]).collect();
        let m = fan.section_lift(c, &b);
        if fan.pairings(c, &m) != b {
            return Err(Error::IncompatibleDivisor(rays.clone()));
        }
        characters.push(m);
    }
    Ok(EquivariantLineBundle { fan: fan.clone(), divisor: divisor.to_vec(), characters })
}

/// `ω_X`: every coefficient `−1`.
pub fn canonical(fan: &Arc<Fan>) -> Result<EquivariantLineBundle> {
    line_bundle(fan, &vec![-1; fan.rays().len()])
}

impl EquivariantLineBundle {
    pub fn trivial(fan: &Arc<Fan>) -> Self {
        line_bundle(fan, &vec![0; fan.rays().len()]).expect("zero divisor")
    }

    pub fn tensor(&self, other: &EquivariantLineBundle) -> Result<Self> {
        let d: Vec<i64> = self.divisor.iter().zip(&other.divisor).map(|(a, b)| a + b).collect();
        line_bundle(&self.fan, &d)
    }

    /// Stalk at `τ` is `𝒜_τ(m_τ)`; restrictions are the canonical maps.
    pub fn to_sheaf(&self) -> SheafOfModules {
        let stalks = self
            .fan
            .cone_ids()
            .map(|c| FgGradedModule::free(frame(&self.fan, c, Flavor::A), vec![self.characters[c].0.clone()]).expect("rank one"))
            .collect();
        with_unit_restrictions(self.fan.clone(), Flavor::A, stalks)
    }
}

/// Input to `ψ`: a sum of line bundles given by divisors, or a sheaf of
/// `𝒜_Σ`-modules already in chart form.
#[derive(Clone, Debug)]
pub enum CoherentData {
    LineBundles(Vec<EquivariantLineBundle>),
    Sheaf(SheafOfModules),
}

/// `ψ`: the sheaf of `𝒜_Σ`-modules of a coherent sheaf.
pub fn psi(data: &CoherentData) -> Result<SheafOfModules> {
    match data {
        CoherentData::LineBundles(bundles) => {
            if bundles.is_empty() {
                return Err(Error::NotCoherentInput);
            }
            let sheaves: Vec<SheafOfModules> = bundles.iter().map(|b| b.to_sheaf()).collect();
            if sheaves.len() == 1 {
                return Ok(sheaves.into_iter().next().unwrap());
            }
            SheafOfModules::direct_sum(&sheaves.iter().collect::<Vec<_>>())
        }
        CoherentData::Sheaf(s) => {
            if s.flavor() != Flavor::A || !s.is_coherent() {
                return Err(Error::NotCoherentInput);
            }
            Ok(s.clone())
        }
    }
}

/// `F ⊗ L` for a sheaf with free stalks: stalk generators move by `m_τ`,
/// restriction coefficients stay.
pub fn tensor_line_bundle(f: &SheafOfModules, l: &EquivariantLineBundle) -> Result<SheafOfModules> {
    if f.flavor() != Flavor::A || !f.stalks().iter().all(|s| s.is_free()) {
        return Err(Error::NotLocallyFree);
    }
    let fan = f.fan().clone();
    let stalks: Vec<FgGradedModule> = fan.cone_ids().map(|c| f.stalk(c).twist(&l.characters[c].0)).collect();
    let mut given = BTreeMap::new();
    for s in fan.cone_ids() {
        for &t in fan.facets(s) {
            let r = f.restriction_ref(s, t).expect("restriction");
            let m = ModuleMorphism::new(stalks[s].clone(), stalks[t].clone(), r.matrix.clone(), r.shift.clone())?;
            given.insert((s, t), m);
        }
    }
    SheafOfModules::new(fan, Flavor::A, stalks, given)
}

/// Dimension of the degree-`m` global sections: compatible families over
/// the maximal cones.
pub fn global_sections_degree(f: &SheafOfModules, m: &LatticeVector) -> usize {
    let fan = f.fan();
    let tops = fan.max_cones();
    let mut offset = BTreeMap::new();
    let mut nvars = 0;
    for &s in tops {
        let d = f.piece_dim(s, &f.native(s, m));
        offset.insert(s, nvars);
        nvars += d;
    }
    let mut rows: Vec<Vec<Q>> = Vec::new();
    for (a, &s) in tops.iter().enumerate() {
        for &t in &tops[a + 1..] {
            let meet = fan.meet(s, t);
            let eval = |c: ConeId| -> QMatrix {
                if c == meet {
                    QMatrix::identity(f.piece_dim(c, &f.native(c, m)))
                } else {
                    f.restriction(c, meet).evaluate(&f.native(c, m))
                }
            };
            let (es, et) = (eval(s), eval(t));
            for r in 0..es.nrows() {
                let mut row = vec![Q::zero(); nvars];
                for k in 0..es.ncols() {
                    row[offset[&s] + k] += es.get(r, k);
                }
                for k in 0..et.ncols() {
                    row[offset[&t] + k] -= et.get(r, k);
                }
                rows.push(row);
            }
        }
    }
    if rows.is_empty() {
        return nvars;
    }
    nvars - QMatrix::from_rows(rows.len(), nvars, rows.into_iter().flatten().collect()).rank()
}

/// Cones carrying a costalk of a tcf summand.
fn costalk_cones(fan: &Fan, place: Place) -> Result<Vec<ConeId>> {
    match place {
        Place::Open(s) => Ok(fan.faces(s)),
        Place::Point(s) => Ok(vec![s]),
        Place::Global => Ok(fan.cone_ids().collect()),
        _ => Err(Error::BadMorphism("φ needs a complex of tcf cosheaves".into())),
    }
}

fn transport_twist(fan: &Fan, flavor: Flavor, place: Place, tau: ConeId, twist: &[i64]) -> Vec<i64> {
    match (flavor, place) {
        (Flavor::A, _) => twist.to_vec(),
        (Flavor::B, Place::Open(s) | Place::Point(s)) => fan.face_positions(s, tau).iter().map(|&p| twist[p]).collect(),
        (Flavor::B, _) => vec![0; fan.dim(tau)],
    }
}

/// `φ(C)`: a summand of `C` in degree `k` contributes its costalk at each
/// cone `τ`, as the direct image from `st(o_τ)`, in degree `k + dim τ`.
pub fn phi(c: &MonomialComplex) -> Result<MonomialComplex> {
    let fan = c.fan.clone();
    let mut items = Vec::new();
    let mut keys = Vec::new();
    for (kk, term) in c.terms.iter().enumerate() {
        for (s, summand) in term.iter().enumerate() {
            if summand.support != Support::Dual {
                return Err(Error::BadMorphism("φ needs a complex of tcf cosheaves".into()));
            }
            for tau in costalk_cones(&fan, summand.place)? {
                let deg = c.start + kk as i64 + fan.dim(tau) as i64;
                let twist = transport_twist(&fan, c.flavor, summand.place, tau, &summand.twist);
                let mut label = summand.label.clone();
                label.push(tau);
                items.push((deg, Summand { place: Place::Orbit(tau), support: Support::Dual, twist, label }));
                keys.push((kk, s, tau));
            }
        }
    }
    let (mut out, pos) = MonomialComplex::from_graded(fan.clone(), c.flavor, items);
    let index: BTreeMap<(usize, usize, ConeId), (usize, usize)> = keys.into_iter().zip(pos).collect();
    for (&(kk, s, tau), &(k, p)) in &index {
        let sign = if (c.start + kk as i64).rem_euclid(2) == 0 { Q::one() } else { -Q::one() };
        for &rho in fan.cofacets(tau) {
            if let Some(&(_, pr)) = index.get(&(kk, s, rho)) {
                out.add_entry(k, pr, p, &sign * q(fan.incidence_sign(rho, tau)? as i64));
            }
        }
    }
    for (kk, d) in c.diffs.iter().enumerate() {
        for (&(t, s), a) in d {
            for tau in costalk_cones(&fan, c.terms[kk][s].place)? {
                if let (Some(&(k, ps)), Some(&(_, pt))) = (index.get(&(kk, s, tau)), index.get(&(kk + 1, t, tau))) {
                    out.add_entry(k, pt, ps, a.clone());
                }
            }
        }
    }
    Ok(out)
}

/// Square, invertible restriction coefficients `G_σ → G_τ`.
fn inverse_restriction(g: &SheafOfModules, s: ConeId, t: ConeId) -> Result<QMatrix> {
    let r = g.restriction_ref(s, t).expect("restriction");
    let (rows, cols) = (g.stalk(t).num_gens(), g.stalk(s).num_gens());
    if rows != cols {
        return Err(Error::NotLocallyFree);
    }
    let mut m = QMatrix::zeros(rows, cols);
    for (&(i, j), a) in &r.matrix {
        m.set(i, j, a.clone());
    }
    if m.rank() != rows {
        return Err(Error::NotLocallyFree);
    }
    let cols: Vec<Vec<Q>> = (0..rows)
        .map(|i| {
            let e: Vec<Q> = (0..rows).map(|k| if k == i { Q::one() } else { Q::zero() }).collect();
            m.solve(&e).expect("invertible")
        })
        .collect();
    Ok(QMatrix::from_columns(rows, &cols))
}

fn check_locally_free(g: &SheafOfModules) -> Result<()> {
    if g.flavor() != Flavor::A {
        return Err(Error::FlavorMismatch { expected: "A" });
    }
    if !g.stalks().iter().all(|s| s.is_free()) {
        return Err(Error::NotLocallyFree);
    }
    Ok(())
}

/// Summands `(Orbit(τ), support, g_{τ,i})` in degree `dim τ`, with
/// differential `τ → ρ` given by `±R_{ρτ}⁻¹`.
fn orbit_complex(g: &SheafOfModules, support: Support, augmented: bool) -> Result<MonomialComplex> {
    check_locally_free(g)?;
    let fan = g.fan().clone();
    let mut items = Vec::new();
    let mut keys = Vec::new();
    if augmented {
        for &rho in fan.max_cones() {
            for (i, d) in g.stalk(rho).gens().iter().enumerate() {
                items.push((-1, Summand { place: Place::Chart(rho), support: Support::Free, twist: d.clone(), label: vec![rho, i] }));
                keys.push((None, rho, i));
            }
        }
    }
    for tau in fan.cone_ids() {
        for (i, d) in g.stalk(tau).gens().iter().enumerate() {
            items.push((fan.dim(tau) as i64, Summand { place: Place::Orbit(tau), support, twist: d.clone(), label: vec![tau, i] }));
            keys.push((Some(()), tau, i));
        }
    }
    let (mut out, pos) = MonomialComplex::from_graded(fan.clone(), Flavor::A, items);
    let index: BTreeMap<(Option<()>, ConeId, usize), (usize, usize)> = keys.into_iter().zip(pos).collect();
    for tau in fan.cone_ids() {
        for &rho in fan.cofacets(tau) {
            let inv = inverse_restriction(g, rho, tau)?;
            let sign = q(fan.incidence_sign(rho, tau)? as i64);
            for i in 0..inv.ncols() {
                for j in 0..inv.nrows() {
                    let a = inv.get(j, i);
                    if a.is_zero() {
                        continue;
                    }
                    let (k, ps) = index[&(Some(()), tau, i)];
                    let (_, pt) = index[&(Some(()), rho, j)];
                    out.add_entry(k, pt, ps, &sign * a);
                }
            }
        }
    }
    if augmented {
        for &rho in fan.max_cones() {
            let r = if rho == ZERO_CONE { None } else { g.restriction_ref(rho, ZERO_CONE) };
            for j in 0..g.stalk(rho).num_gens() {
                let (k, ps) = index[&(None, rho, j)];
                match r {
                    Some(r) => {
                        for (&(i, jj), a) in &r.matrix {
                            if jj == j {
                                out.add_entry(k, index[&(Some(()), ZERO_CONE, i)].1, ps, a.clone());
                            }
                        }
                    }
                    None => out.add_entry(k, index[&(Some(()), ZERO_CONE, j)].1, ps, Q::one()),
                }
            }
        }
    }
    Ok(out)
}

/// The augmented Cousin complex `G → ⊕_{dim τ = 0} … → ⊕_{dim τ = n} …`
/// of a locally free sheaf, with `G` (as chart modules) in degree `−1`.
pub fn cousin_complex(g: &SheafOfModules) -> Result<MonomialComplex> {
    orbit_complex(g, Support::LocalCohomology, true)
}

/// `φ(𝒜∨_Σ ⊗ G)` for locally free `G`, in degrees `dim τ`.
pub fn phi_dual_tensor(g: &SheafOfModules) -> Result<MonomialComplex> {
    orbit_complex(g, Support::Dual, false)
}

/// `ω → φ(𝒜∨_Σ)` on the chart of every maximal cone.
pub fn canonical_sequence(fan: &Arc<Fan>) -> Result<MonomialComplex> {
    let omega = canonical(fan)?.to_sheaf();
    let mut c = orbit_complex(&EquivariantLineBundle::trivial(fan).to_sheaf(), Support::Dual, false)?;
    // Prepend ω on each chart, mapping by 1 to the Laurent term.
    let mut first = Vec::new();
    for &rho in fan.max_cones() {
        first.push(Summand { place: Place::Chart(rho), support: Support::Free, twist: omega.stalk(rho).gens()[0].clone(), label: vec![rho] });
    }
    let n = first.len();
    c.terms.insert(0, first);
    c.diffs.insert(0, BTreeMap::new());
    c.start -= 1;
    for s in 0..n {
        c.add_entry(0, 0, s, Q::one());
    }
    Ok(c)
}

fn shifted_h(h: &[usize], start: i64, d: i64) -> usize {
    let i = d - start;
    if i < 0 || i as usize >= h.len() {
        0
    } else {
        h[i as usize]
    }
}

/// The pieces of the summands alive at each degree, per term.
fn alive_by_degree(c: &MonomialComplex, site: Site, m: &[i64]) -> BTreeMap<i64, usize> {
    let ec = c.evaluate(site, m);
    (0..ec.dims.len()).map(|k| (ec.start + k as i64, ec.dims[k])).filter(|(_, d)| *d > 0).collect()
}

/// Everything the Serre functor check computes.
#[derive(Clone, Debug)]
pub struct SerreReport {
    pub checks: Vec<Check>,
}

impl SerreReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed())
    }
}

/// `φ K ψ(F) ≅ ω ⊗ F [n]` for `F` a sum of line bundles.
pub fn serre_check(fan: &Arc<Fan>, bundles: &[EquivariantLineBundle], degrees: &[LatticeVector]) -> Result<SerreReport> {
    if !fan.is_complete() {
        return Err(Error::FanNotComplete);
    }
    let n = fan.rank() as i64;
    let f = psi(&CoherentData::LineBundles(bundles.to_vec()))?;
    let omega = canonical(fan)?;
    let twisted: Vec<EquivariantLineBundle> = bundles.iter().map(|b| b.tensor(&omega)).collect::<Result<_>>()?;
    let wf = psi(&CoherentData::LineBundles(twisted))?;
    let pkp = phi(&koszul_k(&SheafComplex::single(f.clone()))?)?;
    let charts: Vec<Site> = fan.max_cones().iter().map(|&c| Site::Chart(c)).collect();
    let grid = charts.len() * degrees.len();
    let mut checks = vec![complex_check("phi-k-psi d^2", &pkp, degrees, true)];

    let found = sweep(&pkp, &charts, degrees, |site, m, ec, h| {
        let want = wf.piece_dim(site.cone(), &m.0);
        (ec.start..ec.start + h.len() as i64).all(|d| shifted_h(h, ec.start, d) == if d == -n { want } else { 0 })
            && (want == 0 || (-n >= ec.start && -n < ec.start + h.len() as i64))
    });
    checks.push(Check::from_sweep("serre concentration", grid, found));

    let trivial = phi(&koszul_k(&SheafComplex::single(EquivariantLineBundle::trivial(fan).to_sheaf()))?)?;
    let mut twist_checks = Vec::new();
    for b in bundles {
        let single = phi(&koszul_k(&SheafComplex::single(b.to_sheaf()))?)?;
        let found = sweep(&single, &charts, degrees, |site, m, ec, _| {
            let back = vsub(&m.0, &b.characters[site.cone()].0);
            trivial.evaluate(site, &back) == *ec
        });
        twist_checks.push(Check::from_sweep(format!("divisor {:?}", b.divisor), grid, found));
    }
    checks.push(combine("twist comparison", twist_checks));

    let cousin = cousin_complex(&wf)?;
    let dual_side = phi_dual_tensor(&f)?;
    let found = sweep(&dual_side, &charts, degrees, |site, m, ec, h| {
        // Cousin terms sit one degree up from the augmentation; drop it.
        let mut cz = alive_by_degree(&cousin, site, &m.0);
        cz.remove(&-1);
        let phi_terms = alive_by_degree(&dual_side, site, &m.0);
        let reference = pkp.evaluate(site, &m.0);
        let Ok(hr) = cohomology_dims(&reference) else { return false };
        let same_cohomology = (-n - 1..=n + 1).all(|d| shifted_h(h, ec.start, d + n) == shifted_h(&hr, reference.start, d));
        cz == phi_terms && same_cohomology
    });
    checks.push(Check::from_sweep("cousin termwise", grid, found));
    Ok(SerreReport { checks })
}

/// Exactness of the augmented Cousin complex and the orbit-sum formula for
/// its terms.
pub fn cousin_check(g: &SheafOfModules, degrees: &[LatticeVector]) -> Result<Vec<Check>> {
    let c = cousin_complex(g)?;
    let fan = g.fan().clone();
    let mut checks = vec![complex_check("cousin d^2", &c, degrees, true), exactness_check("cousin exactness", &c, degrees, true)];
    let charts: Vec<Site> = fan.max_cones().iter().map(|&x| Site::Chart(x)).collect();
    let found = sweep(&c, &charts, degrees, |site, m, ec, _| {
        let rho = site.cone();
        (0..=fan.rank()).all(|i| {
            let want: usize = fan
                .faces(rho)
                .into_iter()
                .filter(|&t| fan.dim(t) == i)
                .flat_map(|t| g.stalk(t).gens().iter().map(move |d| (t, d)))
                .map(|(t, d)| local_coh_indicator(&fan, t, &LatticeVector(vsub(&m.0, d))).unwrap_or(0))
                .sum();
            shifted_h(&ec.dims, ec.start, i as i64) == want
        }) && (ec.start..ec.start + ec.dims.len() as i64)
            .all(|d| (d >= -1 && d <= fan.rank() as i64) || shifted_h(&ec.dims, ec.start, d) == 0)
    });
    checks.push(Check::from_sweep("cousin orbit formula", charts.len() * degrees.len(), found));
    Ok(checks)
}
