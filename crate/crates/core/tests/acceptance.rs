//! Acceptance suite: one line per criterion, exit status 1 if any fails.

use std::collections::BTreeMap;
use std::sync::Arc;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use toric_koszul::degreewise_homology::DegreeWindow;
use toric_koszul::graded_modules::{kernel_presentation, ConeFrame, FgGradedModule, ModuleMorphism};
use toric_koszul::koszul::{
    augmented_k_structure, ball_check, cellular_complex, complex_check, exactness_check, generator_check,
    hom_matching_check, SigmaDiagram,
};
use toric_koszul::lattice_fan::{builtin_fan, Fan, LatticeVector, BUILTIN_FANS};
use toric_koszul::linalg::Q;
use toric_koszul::monomial_complex::{Place, Site, Summand};
use toric_koszul::report::Status;
use toric_koszul::sheaf_modules::{frame, hom_pieces, standard_open, standard_point, SheafOfModules};
use toric_koszul::stalk_algebras::{Flavor, Support};
use toric_koszul::suite::{projective_hom_check, run, run_with_threads, Job, Suite};
use toric_koszul::toric_geometry::{
    canonical, canonical_sequence, cousin_check, line_bundle, serre_check, tensor_line_bundle, EquivariantLineBundle,
};
use toric_koszul::Error;

type Outcome = Result<(), String>;

fn fan(name: &str) -> Arc<Fan> {
    Arc::new(builtin_fan(name).unwrap())
}

fn window(f: &Fan, r: i64) -> Vec<LatticeVector> {
    DegreeWindow::cube(f.rank(), -r, r).degrees()
}

fn ok(b: bool, msg: impl FnOnce() -> String) -> Outcome {
    if b {
        Ok(())
    } else {
        Err(msg())
    }
}

fn require(c: toric_koszul::Check, context: &str) -> Outcome {
    ok(c.passed(), || format!("{context}: {} failed: {:?} {:?}", c.name, c.detail, c.counterexample))
}

fn rational(rng: &mut ChaCha8Rng) -> Q {
    let n: i64 = rng.gen_range(-3..=3);
    let d: i64 = rng.gen_range(1..=2);
    Q::new(n.into(), d.into())
}

/// A random presented module over `frame`: 1–3 generators, up to two
/// relations whose terms are chosen among generators below the relation
/// degree.
fn random_module(rng: &mut ChaCha8Rng, frame: &ConeFrame) -> FgGradedModule {
    let n = frame.degree_len();
    let deg = |rng: &mut ChaCha8Rng| (0..n).map(|_| rng.gen_range(-1..=1)).collect::<Vec<i64>>();
    let gens: Vec<Vec<i64>> = (0..rng.gen_range(1..=3)).map(|_| deg(rng)).collect();
    let mut relations = Vec::new();
    for _ in 0..rng.gen_range(0..=2) {
        let d: Vec<i64> = deg(rng).iter().map(|x| x + 1).collect();
        let entries: Vec<(usize, Q)> = (0..gens.len())
            .filter(|&j| frame.in_semigroup(&d.iter().zip(&gens[j]).map(|(a, b)| a - b).collect::<Vec<_>>()))
            .map(|j| (j, rational(rng)))
            .filter(|(_, c)| *c != Q::from_integer(0.into()))
            .collect();
        if !entries.is_empty() {
            relations.push((d, entries));
        }
    }
    FgGradedModule::new(frame.clone(), gens, relations).unwrap()
}

/// A sheaf with one nonzero stalk.
fn point_sheaf(fan: &Arc<Fan>, cone: usize, m: FgGradedModule) -> SheafOfModules {
    let stalks = fan
        .cone_ids()
        .map(|c| if c == cone { m.clone() } else { FgGradedModule::zero(frame(fan, c, Flavor::A)) })
        .collect();
    SheafOfModules::new(fan.clone(), Flavor::A, stalks, BTreeMap::new()).unwrap()
}

fn c1_projective_hom() -> Outcome {
    for name in BUILTIN_FANS {
        let f = fan(name);
        let zero = vec![0; f.rank()];
        let mut targets = Vec::new();
        for s in f.cone_ids() {
            targets.push(standard_open(&f, s, Flavor::A, &zero).unwrap());
            targets.push(standard_point(&f, s, Flavor::A, &zero).unwrap());
        }
        targets.push(EquivariantLineBundle::trivial(&f).to_sheaf());
        targets.push(canonical(&f).unwrap().to_sheaf());
        let mut d = vec![0; f.rays().len()];
        d[0] = 1;
        targets.push(line_bundle(&f, &d).unwrap().to_sheaf());
        let c = projective_hom_check(&f, &targets, &window(&f, 1), &window(&f, 2)).unwrap();
        require(c, name)?;
    }
    Ok(())
}

fn c2_delta_fidelity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let (mut nonzero_hom, mut with_relations) = (0, 0);
    for name in BUILTIN_FANS {
        let f = fan(name);
        let degrees = window(&f, 2);
        for trial in 0..20 {
            let cone = rng.gen_range(0..f.num_cones());
            let fr = frame(&f, cone, Flavor::A);
            let (m, n) = (random_module(&mut rng, &fr), random_module(&mut rng, &fr));
            with_relations += !m.is_free() as usize;
            let dm = m.delta_extension().unwrap();
            for d in &degrees {
                let b = fr.bdeg(&d.0);
                if m.piece_dim(&d.0) != dm.piece_dim(&b) {
                    return Err(format!("{name} trial {trial}: piece at {:?} changed under regrading", d.0));
                }
            }
            let (sm, sn) = (point_sheaf(&f, cone, m), point_sheaf(&f, cone, n));
            let (bm, bn) = (sm.delta().unwrap(), sn.delta().unwrap());
            for d in window(&f, 1) {
                let (a, b) = (hom_pieces(&sm, &sn, &d).unwrap(), hom_pieces(&bm, &bn, &d).unwrap());
                if a != b {
                    return Err(format!("{name} trial {trial}: Hom at {:?} is {a} before and {b} after regrading", d.0));
                }
                nonzero_hom += (a > 0) as usize;
            }
        }
    }
    ok(nonzero_hom > 0 && with_relations > 0, || format!("vacuous: {nonzero_hom} nonzero Homs, {with_relations} presented"))
}

fn c3_balls() -> Outcome {
    for name in BUILTIN_FANS {
        let f = fan(name);
        require(ball_check(&f, &window(&f, 2)).unwrap(), name)?;
    }
    Ok(())
}

fn c4_generators() -> Outcome {
    for name in BUILTIN_FANS {
        let f = fan(name);
        let w = window(&f, 2);
        require(generator_check(&f, Flavor::A, &w, &w).unwrap(), name)?;
    }
    Ok(())
}

fn c5_hom_matching() -> Outcome {
    for name in BUILTIN_FANS {
        let f = fan(name);
        require(hom_matching_check(&f, &window(&f, 1)).unwrap(), name)?;
    }
    Ok(())
}

fn c6_complete_acyclicity() -> Outcome {
    for name in ["p1", "p2", "p1xp1", "hirzebruch1"] {
        let f = fan(name);
        let c = augmented_k_structure(&f).unwrap();
        let w = window(&f, 2);
        require(complex_check("d^2", &c, &w, false), name)?;
        require(exactness_check("exact", &c, &w, false), name)?;
    }
    let a2 = fan("a2");
    ok(augmented_k_structure(&a2).unwrap_err() == Error::FanNotComplete, || "a2 not rejected".into())?;
    let r = run(&Job::new(a2, "a2", Suite::CompleteAcyclicity)).unwrap();
    ok(r.checks.iter().all(|c| c.status == Status::Inapplicable), || "a2 suite not marked inapplicable".into())
}

fn c7_a2_sequence() -> Outcome {
    let f = fan("a2");
    let c = canonical_sequence(&f).unwrap();
    let top = Site::Chart(f.max_cones()[0]);
    let (d00, d11) = (c.evaluate(top, &[0, 0]).dims, c.evaluate(top, &[1, 1]).dims);
    ok(d00 == vec![0, 1, 2, 1], || format!("dims at (0,0): {d00:?}"))?;
    ok(d11 == vec![1, 1, 0, 0], || format!("dims at (1,1): {d11:?}"))?;
    require(exactness_check("a2 sequence", &c, &window(&f, 3), true), "a2")
}

fn serre_inputs() -> Vec<(Arc<Fan>, EquivariantLineBundle, String)> {
    let p1 = fan("p1");
    let minus = p1.rays().iter().position(|r| r.0 == vec![-1]).unwrap();
    let mut out: Vec<_> = (-2..=2)
        .map(|k| {
            let mut d = vec![0, 0];
            d[minus] = k;
            (p1.clone(), line_bundle(&p1, &d).unwrap(), format!("p1 O({k})"))
        })
        .collect();
    for name in ["p2", "p1xp1", "hirzebruch1"] {
        let f = fan(name);
        out.push((f.clone(), EquivariantLineBundle::trivial(&f), format!("{name} O")));
    }
    out
}

fn c8_serre() -> Outcome {
    for (f, b, label) in serre_inputs() {
        let r = serre_check(&f, &[b], &window(&f, 3)).unwrap();
        for c in r.checks {
            require(c, &label)?;
        }
    }
    Ok(())
}

fn c9_cousin() -> Outcome {
    for (f, b, label) in serre_inputs() {
        let g = tensor_line_bundle(&b.to_sheaf(), &canonical(&f).unwrap()).unwrap();
        for c in cousin_check(&g, &window(&f, 3)).unwrap() {
            require(c, &label)?;
        }
    }
    Ok(())
}

/// A random degree-zero map between free modules on a cone of `a3`.
fn random_free_map(rng: &mut ChaCha8Rng, f: &Fan) -> ModuleMorphism {
    let cone = rng.gen_range(0..f.num_cones());
    let fr = frame(f, cone, Flavor::A);
    let (rows, cols) = (rng.gen_range(1..=4), rng.gen_range(1..=4));
    let deg = |rng: &mut ChaCha8Rng| (0..3).map(|_| rng.gen_range(-1..=1)).collect::<Vec<i64>>();
    let target_gens: Vec<Vec<i64>> = (0..rows).map(|_| deg(rng)).collect();
    let source_gens: Vec<Vec<i64>> = (0..cols)
        .map(|_| {
            let base = &target_gens[rng.gen_range(0..rows)];
            base.iter().map(|x| x + rng.gen_range(0..=1)).collect()
        })
        .collect();
    let mut entries = Vec::new();
    for (j, s) in source_gens.iter().enumerate() {
        for (i, t) in target_gens.iter().enumerate() {
            let diff: Vec<i64> = s.iter().zip(t).map(|(a, b)| a - b).collect();
            if fr.in_semigroup(&diff) && rng.gen_bool(0.7) {
                entries.push(((i, j), rational(rng)));
            }
        }
    }
    let src = FgGradedModule::free(fr.clone(), source_gens).unwrap();
    let tgt = FgGradedModule::free(fr.clone(), target_gens).unwrap();
    ModuleMorphism::new(src, tgt, entries, vec![0; fr.degree_len()]).unwrap()
}

fn c10_syzygy_oracle() -> Outcome {
    let f = builtin_fan("a3").unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut nonzero = 0;
    for trial in 0..50 {
        let phi = random_free_map(&mut rng, &f);
        let (k, inc) = kernel_presentation(&phi).map_err(|e| format!("trial {trial}: {e}"))?;
        nonzero += (k.num_gens() > 0 && !phi.matrix.is_empty()) as usize;
        let degs: Vec<Vec<i64>> = phi.source.gens().iter().chain(phi.target.gens()).cloned().collect();
        for m in DegreeWindow::around(3, &degs, 2).degrees() {
            let e = phi.evaluate(&m.0);
            let ker = e.ncols() - e.rank();
            let i = inc.evaluate(&m.0);
            if k.piece_dim(&m.0) != ker || i.rank() != ker || !e.mul(&i).is_zero() {
                return Err(format!("trial {trial} at {:?}: kernel piece {} vs brute force {ker}", m.0, k.piece_dim(&m.0)));
            }
        }
    }
    ok(nonzero >= 10, || format!("only {nonzero} maps had a nonzero kernel and nonzero entries"))
}

fn c11_determinism() -> Outcome {
    for name in ["p1", "p2"] {
        let f = fan(name);
        for suite in Suite::ALL {
            let mut job = Job::new(f.clone(), name, suite);
            job.chambers = true;
            let a = run(&job).map(|r| r.to_json()).map_err(|e| e.to_string())?;
            let b = run_with_threads(&job, 2).map(|r| r.to_json()).map_err(|e| e.to_string())?;
            ok(a == b, || format!("{name} {suite}: reports differ between runs"))?;
        }
    }
    let mut f = builtin_fan("p2").unwrap();
    let sigma = f.max_cones()[0];
    let tau = f.facets(sigma)[0];
    f.mutate_incidence_sign(sigma, tau).unwrap();
    let f = Arc::new(f);
    let c = augmented_k_structure(&f).unwrap();
    let check = complex_check("mutated", &c, &window(&f, 1), false);
    let x = check.counterexample.as_ref().ok_or("mutated sign not caught")?;
    ok(x.cohomology.is_none(), || "counterexample is not a d² failure".into())?;
    let object = Summand { place: Place::Global, support: Support::Dual, twist: vec![0, 0], label: vec![] };
    let cones = SigmaDiagram::interval(&f, 0, sigma);
    let d = SigmaDiagram::constant(f.clone(), Flavor::A, &cones, object);
    ok(matches!(cellular_complex(&d), Err(Error::SignIncoherence { .. })), || "cellular build accepted bad signs".into())?;
    println!("      mutated sign localized at {} {} degree {:?}", x.site, x.cone, x.degree);
    Ok(())
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("projective Hom identity", c1_projective_hom),
        ("regrading fidelity", c2_delta_fidelity),
        ("ball acyclicity", c3_balls),
        ("Koszul on generators", c4_generators),
        ("Hom matching under K", c5_hom_matching),
        ("complete-fan acyclicity", c6_complete_acyclicity),
        ("explicit A2 sequence", c7_a2_sequence),
        ("Serre functor", c8_serre),
        ("Cousin complex", c9_cousin),
        ("syzygy oracle", c10_syzygy_oracle),
        ("determinism and sign robustness", c11_determinism),
    ];
    let started = Instant::now();
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let outcome = f();
        let secs = t.elapsed().as_secs_f64();
        match outcome {
            Ok(()) => println!("criterion {:>2} PASS  {name} ({secs:.1}s)", i + 1),
            Err(e) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name} ({secs:.1}s): {e}", i + 1);
            }
        }
    }
    println!("acceptance: {} of 11 passed in {:.1}s", 11 - failed, started.elapsed().as_secs_f64());
    if failed > 0 {
        std::process::exit(1);
    }
}
