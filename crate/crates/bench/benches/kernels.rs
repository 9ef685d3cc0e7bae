use std::sync::Arc;

use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use tensoria_core::abelian::{gamma_whitehead, smith_normal_form, AbelianGroup, IntMatrix};
use tensoria_core::coset_enum::{enumerate, EnumLimits, Strategy};
use tensoria_core::group::FinGroup;
use tensoria_core::homology::h2_via_cocycles;
use tensoria_core::presentation::parse_presentation;
use tensoria_core::tensor::{build_nu, tensor_power, BuildLimits};

fn group(text: &str) -> Arc<FinGroup> {
    let p = parse_presentation(text).unwrap();
    Arc::new(FinGroup::from_presentation(&p, EnumLimits::default()).unwrap())
}

fn coset_enumeration(c: &mut Criterion) {
    let p = parse_presentation("<a,b | a^2, b^3, (a b)^7, [a,b]^4>").unwrap();
    let mut g = c.benchmark_group("enumerate PSL(2,7)");
    for (name, strategy) in [("hlt", Strategy::Hlt), ("felsch", Strategy::Felsch)] {
        let limits = EnumLimits { strategy, ..EnumLimits::default() };
        g.bench_function(name, |b| b.iter(|| enumerate(black_box(&p), &[], limits).unwrap()));
    }
    g.finish();
}

fn tensor_squares(c: &mut Criterion) {
    let mut g = c.benchmark_group("tensor square");
    g.sample_size(10);
    for (name, text) in [("S3", "<a,b | a^3, b^2, (a b)^2>"), ("Q8", "<a,b | a^4, a^2 b^-2, b^-1 a b a>"), ("S4", "<a,b | a^4, b^2, (a b)^3>")] {
        let grp = group(text);
        g.bench_with_input(BenchmarkId::from_parameter(name), &grp, |b, grp| {
            b.iter(|| build_nu(grp.clone(), &BuildLimits::default()).unwrap())
        });
    }
    g.finish();
}

fn tensor_cube(c: &mut Criterion) {
    let grp = group("<a,b | a^4, b^2, (a b)^2>");
    let mut g = c.benchmark_group("tensor cube");
    g.sample_size(10);
    g.bench_function("D4", |b| b.iter(|| tensor_power(grp.clone(), 3, &BuildLimits::default()).unwrap()));
    g.finish();
}

fn multipliers(c: &mut Criterion) {
    let mut g = c.benchmark_group("H2 via cocycles");
    g.sample_size(10);
    for (name, text) in [("D4", "<a,b | a^4, b^2, (a b)^2>"), ("A4", "<a,b | a^2, b^3, (a b)^3>"), ("S4", "<a,b | a^4, b^2, (a b)^3>")] {
        let grp = group(text);
        g.bench_with_input(BenchmarkId::from_parameter(name), &grp, |b, grp| b.iter(|| h2_via_cocycles(grp).unwrap()));
    }
    g.finish();
}

fn abelian_kernels(c: &mut Criterion) {
    let rows: Vec<Vec<i64>> = (0..12).map(|i| (0..12).map(|j| ((i * 7 + j * 13 + i * j) % 23) as i64 - 11).collect()).collect();
    let m = IntMatrix::from_rows(12, &rows);
    c.bench_function("smith normal form 12x12", |b| b.iter(|| smith_normal_form(black_box(&m))));
    let a = AbelianGroup::from_cyclic_factors(&[2, 4, 4], 0);
    c.bench_function("whitehead gamma Z2+Z4+Z4", |b| b.iter(|| gamma_whitehead(black_box(&a)).unwrap()));
}

criterion_group!(benches, coset_enumeration, tensor_squares, tensor_cube, multipliers, abelian_kernels);
criterion_main!(benches);
