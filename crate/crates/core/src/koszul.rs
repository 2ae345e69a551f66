//! Σ-diagrams, their cellular complexes, and the Koszul functor `K`.
//!
//! `K(N)` is the totalization of the cellular complex of `𝒦 ⊗ N`, where
//! `𝒦_σ = 𝒜∨_{[σ]}`. For a free stalk `N_σ = ⊕ 𝒜_σ(f_j)` the tensor product
//! is `⊕ 𝒜∨_{[σ]}(f_j)`, so `K(N)` is a [`MonomialComplex`] whose summands
//! are `(Open(σ), Dual, f_j)` in degree `k − dim σ`.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::One;

use crate::degreewise_homology::cohomology_dims;
use crate::error::{Error, Result};
use crate::lattice_fan::{ConeId, Fan, LatticeVector};
use crate::linalg::{q, Q};
use crate::monomial_complex::{sweep, MonomialComplex, Place, Summand};
use crate::report::{combine, Check};
use crate::sheaf_modules::{
    cosheaf_hom_pieces, hom_pieces, projective_resolution, sheaf_dual, standard_open, standard_point, SheafComplex,
    SheafMorphism, SheafOfModules,
};
use crate::stalk_algebras::{Flavor, Support};

/// Per-cone objects with maps along facet pairs `σ ⊋ τ`.
#[derive(Clone, Debug)]
pub struct SigmaDiagram {
    pub fan: Arc<Fan>,
    pub flavor: Flavor,
    pub objects: Vec<Vec<Summand>>,
    /// `(σ, τ) ↦ {(i, j) ↦ coefficient}` from summand `j` at `σ` to summand
    /// `i` at `τ`.
    pub maps: BTreeMap<(ConeId, ConeId), BTreeMap<(usize, usize), Q>>,
}

impl SigmaDiagram {
    /// `object` on each cone of `cones`, identities between them.
    pub fn constant(fan: Arc<Fan>, flavor: Flavor, cones: &[ConeId], object: Summand) -> Self {
        let mut objects = vec![Vec::new(); fan.num_cones()];
        let mut maps = BTreeMap::new();
        for &s in cones {
            objects[s].push(object.clone());
            for &t in fan.facets(s) {
                if cones.contains(&t) {
                    maps.insert((s, t), BTreeMap::from([((0, 0), Q::one())]));
                }
            }
        }
        SigmaDiagram { fan, flavor, objects, maps }
    }

    /// The cones `τ` with `ξ ⊆ τ ⊆ σ`.
    pub fn interval(fan: &Fan, xi: ConeId, sigma: ConeId) -> Vec<ConeId> {
        fan.faces(sigma).into_iter().filter(|&t| fan.is_face(xi, t)).collect()
    }
}

/// `d² = 0` symbolically; a failure names the labels of the two ends of a
/// nonzero composite.
pub fn check_signs(c: &MonomialComplex) -> Result<()> {
    for (k, sq) in c.symbolic_square().iter().enumerate() {
        if let Some((&(t, s), _)) = sq.iter().next() {
            return Err(Error::SignIncoherence {
                sigma: c.terms[k][s].label.clone(),
                xi: c.terms[k + 2][t].label.clone(),
            });
        }
    }
    Ok(())
}

/// The object of `σ` in degree `−dim σ`, with differential `±p_{στ}`.
pub fn cellular_complex(d: &SigmaDiagram) -> Result<MonomialComplex> {
    let fan = &d.fan;
    let mut items = Vec::new();
    let mut keys = Vec::new();
    for s in fan.cone_ids() {
        for (j, obj) in d.objects[s].iter().enumerate() {
            items.push((-(fan.dim(s) as i64), obj.clone()));
            keys.push((s, j));
        }
    }
    let (mut c, pos) = MonomialComplex::from_graded(fan.clone(), d.flavor, items);
    let index: BTreeMap<(ConeId, usize), (usize, usize)> = keys.into_iter().zip(pos).collect();
    for (&(s, t), m) in &d.maps {
        let sign = q(fan.incidence_sign(s, t)? as i64);
        for (&(i, j), a) in m {
            let (ks, ps) = index[&(s, j)];
            let (_, pt) = index[&(t, i)];
            c.add_entry(ks, pt, ps, &sign * a);
        }
    }
    check_signs(&c)?;
    Ok(c)
}

/// Replaces a single non-free sheaf by its projective resolution.
fn free_model(n: &SheafComplex) -> Result<SheafComplex> {
    let free = |f: &SheafOfModules| f.stalks().iter().all(|s| s.is_free());
    if let Some(k) = n.terms.iter().position(|t| !free(t)) {
        if n.terms.len() > 1 {
            return Err(Error::NeedsResolution { term: k });
        }
        let res = projective_resolution(&n.terms[0], 4 * n.fan().rank() + 4)?;
        let mut c = res.complex()?;
        c.start += n.start;
        return Ok(c);
    }
    Ok(n.clone())
}

/// `K(N)` for a bounded complex of sheaves whose stalks are free, or a
/// single coherent sheaf (resolved first).
pub fn koszul_k(n: &SheafComplex) -> Result<MonomialComplex> {
    let n = free_model(n)?;
    let fan = n.fan().clone();
    let mut items = Vec::new();
    let mut keys = Vec::new();
    for (k, term) in n.terms.iter().enumerate() {
        for s in fan.cone_ids() {
            for (j, f) in term.stalk(s).gens().iter().enumerate() {
                let deg = n.start + k as i64 - fan.dim(s) as i64;
                let summand = Summand { place: Place::Open(s), support: Support::Dual, twist: f.clone(), label: vec![k, s, j] };
                items.push((deg, summand));
                keys.push((k, s, j));
            }
        }
    }
    let (mut c, pos) = MonomialComplex::from_graded(fan.clone(), n.flavor(), items);
    let index: BTreeMap<(usize, ConeId, usize), (usize, usize)> = keys.into_iter().zip(pos).collect();
    for (k, term) in n.terms.iter().enumerate() {
        for s in fan.cone_ids() {
            for &t in fan.facets(s) {
                let sign = q(fan.incidence_sign(s, t)? as i64);
                let r = term.restriction_ref(s, t).expect("restriction");
                for (&(i, j), a) in &r.matrix {
                    let (ks, ps) = index[&(k, s, j)];
                    let (_, pt) = index[&(k, t, i)];
                    c.add_entry(ks, pt, ps, &sign * a);
                }
            }
        }
    }
    for (k, d) in n.diffs.iter().enumerate() {
        for s in fan.cone_ids() {
            let m = &d.maps[s];
            if !m.is_degree_zero() {
                return Err(Error::BadMorphism(format!("differential {k} is not of degree zero at cone {s}")));
            }
            let sign = if fan.dim(s) % 2 == 0 { Q::one() } else { -Q::one() };
            for (&(i, j), a) in &m.matrix {
                let (ks, ps) = index[&(k, s, j)];
                let (_, pt) = index[&(k + 1, s, i)];
                c.add_entry(ks, pt, ps, &sign * a);
            }
        }
    }
    Ok(c)
}

/// `K_B`: the same construction over `ℬ`.
pub fn koszul_k_b(n: &SheafComplex) -> Result<MonomialComplex> {
    if n.flavor() != Flavor::B {
        return Err(Error::FlavorMismatch { expected: "B" });
    }
    koszul_k(n)
}

/// `K̃(𝒜_Σ)`: `𝒜∨_Σ` in degree `−n − 1` followed by `K(𝒜_Σ)`, with
/// augmentation `1` into every top cone.
pub fn augmented_k_structure(fan: &Arc<Fan>) -> Result<MonomialComplex> {
    if !fan.is_complete() {
        return Err(Error::FanNotComplete);
    }
    let n = fan.rank() as i64;
    let zero = vec![0; fan.rank()];
    let mut items = vec![(
        -n - 1,
        Summand { place: Place::Global, support: Support::Dual, twist: zero.clone(), label: vec![] },
    )];
    for s in fan.cone_ids() {
        let summand = Summand { place: Place::Open(s), support: Support::Dual, twist: zero.clone(), label: vec![s] };
        items.push((-(fan.dim(s) as i64), summand));
    }
    let (mut c, pos) = MonomialComplex::from_graded(fan.clone(), Flavor::A, items);
    let at: BTreeMap<ConeId, (usize, usize)> = fan.cone_ids().zip(pos[1..].iter().copied()).collect();
    for &s in fan.max_cones() {
        c.add_entry(0, at[&s].1, 0, Q::one());
    }
    for s in fan.cone_ids() {
        for &t in fan.facets(s) {
            let (ks, ps) = at[&s];
            c.add_entry(ks, at[&t].1, ps, q(fan.incidence_sign(s, t)? as i64));
        }
    }
    Ok(c)
}

/// `d² = 0` at every stalk and degree.
pub fn complex_check(name: &str, c: &MonomialComplex, degrees: &[LatticeVector], charts: bool) -> Check {
    let sites = c.sites(charts);
    let found = sweep(c, &sites, degrees, |_, _, _, _| true);
    Check::from_sweep(name, sites.len() * degrees.len(), found)
}

/// Degreewise exactness at every site.
pub fn exactness_check(name: &str, c: &MonomialComplex, degrees: &[LatticeVector], charts: bool) -> Check {
    let sites = c.sites(charts);
    let found = sweep(c, &sites, degrees, |_, _, _, h| h.iter().all(|&x| x == 0));
    Check::from_sweep(name, sites.len() * degrees.len(), found)
}

/// The constant diagram on every interval `ξ ⊊ σ` is exact.
pub fn ball_check(fan: &Arc<Fan>, degrees: &[LatticeVector]) -> Result<Check> {
    let object = Summand { place: Place::Global, support: Support::Dual, twist: vec![0; fan.rank()], label: vec![] };
    let mut checks = Vec::new();
    for sigma in fan.cone_ids() {
        for xi in fan.faces(sigma) {
            if xi == sigma {
                continue;
            }
            let cones = SigmaDiagram::interval(fan, xi, sigma);
            let d = SigmaDiagram::constant(fan.clone(), Flavor::A, &cones, object.clone());
            let c = cellular_complex(&d)?;
            checks.push(exactness_check(&format!("interval {xi} < {sigma}"), &c, degrees, false));
        }
    }
    Ok(combine("ball-acyclicity", checks))
}

/// `K` of `𝒜_{{σ}}(m)` and `𝒜_{[σ]}(m)`: cohomology only in `−dim σ`,
/// there equal to the pieces of `𝒜∨_{[σ]}(m)` and `𝒜∨_{{σ}}(m)`.
pub fn generator_check(fan: &Arc<Fan>, flavor: Flavor, degrees: &[LatticeVector], twists: &[LatticeVector]) -> Result<Check> {
    let mut checks = Vec::new();
    for sigma in fan.cone_ids() {
        let spot = -(fan.dim(sigma) as i64);
        for m in twists {
            let native = native_twist(fan, sigma, flavor, m);
            let neg: Vec<i64> = native.iter().map(|x| -x).collect();
            for (point, name) in [(true, "point"), (false, "open")] {
                let (src, expected) = if point {
                    (standard_point(fan, sigma, flavor, &native)?, sheaf_dual(&standard_open(fan, sigma, flavor, &neg)?))
                } else {
                    (standard_open(fan, sigma, flavor, &native)?, sheaf_dual(&standard_point(fan, sigma, flavor, &neg)?))
                };
                let k = koszul_k(&SheafComplex::single(src))?;
                let sites = k.sites(false);
                let found = sweep(&k, &sites, degrees, |site, d, ec, h| {
                    let want = expected.piece_dim(site.cone(), &native_degree(fan, site.cone(), flavor, d));
                    (0..h.len()).all(|i| {
                        let deg = ec.start + i as i64;
                        h[i] == if deg == spot { want } else { 0 }
                    }) && (spot >= ec.start && spot < ec.start + h.len() as i64 || want == 0)
                });
                checks.push(Check::from_sweep(
                    format!("K({name} {sigma}, {:?})", m.0),
                    sites.len() * degrees.len(),
                    found,
                ));
            }
        }
    }
    Ok(combine(format!("koszul-generators-{}", flavor.name()), checks))
}

fn native_twist(fan: &Fan, sigma: ConeId, flavor: Flavor, m: &LatticeVector) -> Vec<i64> {
    match flavor {
        Flavor::A => m.0.clone(),
        Flavor::B => fan.pairings(sigma, m),
    }
}

fn native_degree(fan: &Fan, cone: ConeId, flavor: Flavor, d: &LatticeVector) -> Vec<i64> {
    native_twist(fan, cone, flavor, d)
}

/// `Hom(𝒜_{[τ]}(m), 𝒜_{{ξ}}(n))` against `Hom(K𝒜_{[τ]}(m), K𝒜_{{ξ}}(n))`
/// and the closed form.
pub fn hom_matching_check(fan: &Arc<Fan>, twists: &[LatticeVector]) -> Result<Check> {
    let zero = LatticeVector::zero(fan.rank());
    let mut examined = 0;
    for tau in fan.cone_ids() {
        for xi in fan.cone_ids() {
            for m in twists {
                for n in twists {
                    let lhs = hom_pieces(&standard_open(fan, tau, Flavor::A, &m.0)?, &standard_point(fan, xi, Flavor::A, &n.0)?, &zero)?;
                    let neg = |v: &LatticeVector| v.0.iter().map(|x| -x).collect::<Vec<i64>>();
                    // K-images: 𝒜∨_{{τ}}(m)[dim τ] and 𝒜∨_{[ξ]}(n)[dim ξ].
                    let ka = sheaf_dual(&standard_point(fan, tau, Flavor::A, &neg(m))?);
                    let kb = sheaf_dual(&standard_open(fan, xi, Flavor::A, &neg(n))?);
                    let rhs = if fan.dim(tau) == fan.dim(xi) { cosheaf_hom_pieces(&ka, &kb, &zero)? } else { 0 };
                    let diff = LatticeVector(m.0.iter().zip(&n.0).map(|(a, b)| a - b).collect());
                    let closed = if tau == xi { fan.dual_membership(tau, &diff)? as usize } else { 0 };
                    examined += 1;
                    if lhs != closed || rhs != closed {
                        return Ok(Check::fail(
                            "hom-matching",
                            format!("τ={tau} ξ={xi} m={:?} n={:?}: sheaf side {lhs}, K side {rhs}, expected {closed}", m.0, n.0),
                        ));
                    }
                }
            }
        }
    }
    Ok(Check::pass("hom-matching", examined))
}

/// `δ*` applied termwise to a complex of `𝒜`-sheaves.
pub fn delta_complex(n: &SheafComplex) -> Result<SheafComplex> {
    let terms: Vec<SheafOfModules> = n.terms.iter().map(|t| t.delta()).collect::<Result<_>>()?;
    let mut diffs = Vec::new();
    for (k, d) in n.diffs.iter().enumerate() {
        let maps = d.maps.iter().map(|m| m.delta_extension()).collect::<Result<Vec<_>>>()?;
        diffs.push(SheafMorphism::new(&terms[k], &terms[k + 1], maps)?);
    }
    SheafComplex::new(n.start, terms, diffs)
}

/// `δ*` of a flavor-A monomial complex: twists become their pairings with
/// the rays of the anchor cone.
pub fn delta_monomial(c: &MonomialComplex) -> MonomialComplex {
    let fan = &c.fan;
    let mut out = c.clone();
    out.flavor = Flavor::B;
    for s in out.terms.iter_mut().flatten() {
        let anchor = match s.place {
            Place::Open(x) | Place::Point(x) | Place::Orbit(x) | Place::Chart(x) => Some(x),
            Place::Global => None,
        };
        s.twist = match anchor {
            Some(x) => fan.pairings(x, &LatticeVector(s.twist.clone())),
            None => Vec::new(),
        };
    }
    out
}

/// `δ* ∘ K_A` and `K_B ∘ δ*` agree: same summands, same differentials, and
/// the same dimensions and cohomology at every stalk and degree.
pub fn commute_square_check(n: &SheafComplex, degrees: &[LatticeVector]) -> Result<Check> {
    let n = &free_model(n)?;
    let left = delta_monomial(&koszul_k(n)?);
    let right = koszul_k_b(&delta_complex(n)?)?;
    let name = "commute-square";
    if left.start != right.start || left.terms != right.terms || left.diffs != right.diffs {
        let count = |c: &MonomialComplex| c.terms.iter().map(|t| t.len()).collect::<Vec<_>>();
        return Ok(Check::fail(name, format!("summands differ: {:?} vs {:?}", count(&left), count(&right))));
    }
    let sites = left.sites(false);
    let found = sweep(&left, &sites, degrees, |site, m, ec, h| {
        let other = right.evaluate_m(site, m);
        ec.dims == other.dims && cohomology_dims(&other).is_ok_and(|g| g == h)
    });
    Ok(Check::from_sweep(name, sites.len() * degrees.len(), found))
}
