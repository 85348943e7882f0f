use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use sic_core::exec::Exec;
use sic_core::sic::{self, SearchOptions, Subspace};
use sic_core::wh;

const POLICIES: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn search(c: &mut Criterion) {
    let mut g = c.benchmark_group("search_fiducial");
    g.sample_size(10);
    for d in [5u64, 7] {
        for (name, exec) in POLICIES {
            let opts = SearchOptions { restarts: 8, subspace: Subspace::Full, exec, ..Default::default() };
            g.bench_with_input(BenchmarkId::new(name, d), &opts, |b, o| b.iter(|| sic::search_fiducial(d, o).unwrap()));
        }
    }
    g.finish();
}

fn grassmann(c: &mut Criterion) {
    let mut g = c.benchmark_group("grassmann_equidistance");
    g.sample_size(10);
    for d in [5u64, 9] {
        for (name, exec) in POLICIES {
            g.bench_with_input(BenchmarkId::new(name, d), &exec, |b, &e| b.iter(|| wh::grassmann_equidistance_check(d, 1e-10, e).unwrap()));
        }
    }
    g.finish();
}

fn group_law(c: &mut Criterion) {
    let mut g = c.benchmark_group("group_law");
    g.sample_size(10);
    for d in [7u64, 15] {
        for (name, exec) in POLICIES {
            g.bench_with_input(BenchmarkId::new(name, d), &exec, |b, &e| b.iter(|| wh::group_law_residual(d, e).unwrap()));
        }
    }
    g.finish();
}

criterion_group!(benches, search, grassmann, group_law);
criterion_main!(benches);
