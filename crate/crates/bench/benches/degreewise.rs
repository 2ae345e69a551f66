use criterion::{criterion_group, criterion_main, Criterion};

use toric_koszul::koszul::{augmented_k_structure, exactness_check};
use toric_koszul::suite::{run, Job, Suite};
use toric_koszul::toric_geometry::{line_bundle, serre_check};
use toric_koszul_bench::{cube, fan};

fn augmented_sweep(c: &mut Criterion) {
    let f = fan("p2");
    let k = augmented_k_structure(&f).unwrap();
    let degrees = cube(&f, 2);
    c.bench_function("augmented exactness p2 r=2", |b| b.iter(|| assert!(exactness_check("augmented", &k, &degrees, false).passed())));
}

fn serre(c: &mut Criterion) {
    let f = fan("p2");
    let bundles = vec![line_bundle(&f, &[0, 0, 1]).unwrap()];
    let degrees = cube(&f, 2);
    c.bench_function("serre p2 O(1) r=2", |b| b.iter(|| serre_check(&f, &bundles, &degrees).unwrap()));
}

fn suites(c: &mut Criterion) {
    let job = Job::new(fan("hirzebruch1"), "hirzebruch1", Suite::KoszulSelfcheck);
    c.bench_function("koszul-selfcheck hirzebruch1", |b| b.iter(|| assert!(run(&job).unwrap().passed())));
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(10);
    targets = augmented_sweep, serre, suites
}
criterion_main!(benches);
