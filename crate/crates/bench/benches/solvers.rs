use criterion::{black_box, criterion_group, criterion_main, Criterion};
use polylyap::dynamics::{integrate, SimConfig};
use polylyap::lyap::{search_sos_lyapunov, LyapunovProblem};
use polylyap::reductions::{gallery, motzkin, one_in_three_brute_force, GalleryParams, ReductionChain};
use polylyap::sos::{check_sos, rationalize_with_schedule, BasisMode, SosVerdict};
use polylyap_bench::{fixed_instance, ternary_quartic};

fn sos(c: &mut Criterion) {
    let m = motzkin();
    c.bench_function("check_sos/motzkin", |b| b.iter(|| check_sos(black_box(&m), BasisMode::Newton).unwrap()));
    let q = ternary_quartic();
    c.bench_function("check_sos/ternary_quartic", |b| {
        b.iter(|| check_sos(black_box(&q), BasisMode::Homogeneous).unwrap())
    });
    let SosVerdict::Sos(cert) = check_sos(&q, BasisMode::Homogeneous).unwrap() else {
        panic!("quartic is SOS")
    };
    c.bench_function("rationalize/ternary_quartic", |b| {
        b.iter(|| rationalize_with_schedule(black_box(&q), &cert).unwrap())
    });
}

fn lyapunov(c: &mut Criterion) {
    let f = gallery("septic-planar", &GalleryParams::default()).unwrap().field;
    let mut g = c.benchmark_group("lyapunov");
    g.sample_size(10);
    for d in [6, 8] {
        let p = LyapunovProblem::new(f.clone(), d, true);
        g.bench_function(format!("septic/degree{d}"), |b| b.iter(|| search_sos_lyapunov(black_box(&p)).unwrap()));
    }
    g.finish();
}

fn simulation(c: &mut Criterion) {
    let f = gallery("krstic", &GalleryParams::default()).unwrap().field;
    let cfg = SimConfig::default();
    c.bench_function("integrate/krstic", |b| b.iter(|| integrate(&f, black_box(&[2.0, 2.0]), &cfg).unwrap()));
}

fn reductions(c: &mut Criterion) {
    let inst = fixed_instance(16);
    c.bench_function("oracle/n16", |b| b.iter(|| one_in_three_brute_force(black_box(&inst)).unwrap()));
    c.bench_function("chain/n16", |b| b.iter(|| ReductionChain::build(black_box(&inst)).unwrap()));
}

criterion_group!(benches, sos, lyapunov, simulation, reductions);
criterion_main!(benches);
