use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use rearrange_bench::fixture;
use rearrange_core::envelopes::standard_nodes;
use rearrange_core::generators::{rademacher_system, StableSampler};
use rearrange_core::rng::substream;
use rearrange_core::subspaces::{eta, SearchConfig};
use rearrange_core::{MFunction, SpaceSpec};

fn rearrangement(c: &mut Criterion) {
    let mut g = c.benchmark_group("rearrangement");
    for k in [10u32, 14, 16] {
        let x = fixture(1 << k, 0);
        g.bench_with_input(BenchmarkId::new("sort", k), &x, |b, x| b.iter(|| x.rearrangement()));
        g.bench_with_input(BenchmarkId::new("head_integral", k), &x, |b, x| {
            b.iter(|| x.head_integral(black_box(0.01)).unwrap())
        });
    }
    g.finish();
}

fn norms(c: &mut Criterion) {
    let n = 1 << 14;
    let x = fixture(n, 1);
    let nodes = standard_nodes(0, n);
    let spaces = [
        ("l2", SpaceSpec::lp(2.0).unwrap()),
        ("lorentz", SpaceSpec::lorentz(MFunction::power(&nodes, 0.5).unwrap()).unwrap()),
        ("marcinkiewicz", SpaceSpec::marcinkiewicz(MFunction::power(&nodes, 0.5).unwrap(), false)),
        ("orlicz", SpaceSpec::orlicz_exp_square(false)),
    ];
    let mut g = c.benchmark_group("norms");
    for (name, s) in &spaces {
        g.bench_function(*name, |b| b.iter(|| s.norm(black_box(&x)).unwrap()));
    }
    g.finish();
}

fn eta_search(c: &mut Criterion) {
    let span = rademacher_system(6, 1 << 10).unwrap();
    let cfg = SearchConfig { n_restarts: 8, tol: 1e-7, ..SearchConfig::default() };
    let mut g = c.benchmark_group("eta");
    g.sample_size(10);
    g.bench_function("rademacher6_tau_1_64", |b| b.iter(|| eta(&span, black_box(1.0 / 64.0), &cfg).unwrap()));
    g.finish();
}

fn stable_sampling(c: &mut Criterion) {
    let sampler = StableSampler::new(1.5).unwrap();
    let mut buf = vec![0.0; 1 << 14];
    c.bench_function("stable_fill_16k", |b| {
        let mut rng = substream(0, 0);
        b.iter(|| sampler.fill(&mut rng, black_box(&mut buf)))
    });
}

criterion_group!(benches, rearrangement, norms, eta_search, stable_sampling);
criterion_main!(benches);
