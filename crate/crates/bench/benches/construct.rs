use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use sldgm::peg::girth;
use sldgm_bench::{ldgm_lattice, peg_graph};

fn peg(c: &mut Criterion) {
    let mut group = c.benchmark_group("peg");
    for k in [64, 128, 256] {
        group.bench_with_input(BenchmarkId::from_parameter(k), &k, |b, &k| b.iter(|| peg_graph(k, 1)));
    }
    group.finish();
}

fn lattice(c: &mut Criterion) {
    c.bench_function("construction_d_n256", |b| b.iter(|| ldgm_lattice(128, 1)));
    let lat = ldgm_lattice(128, 1);
    c.bench_function("determinant_n256", |b| b.iter(|| lat.determinant_from_basis()));
    let graph = peg_graph(128, 1);
    c.bench_function("girth_n256", |b| b.iter(|| girth(&graph)));
}

criterion_group!(benches, peg, lattice);
criterion_main!(benches);
