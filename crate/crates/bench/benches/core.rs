use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use jdisc_bench::{dense_field, quadratic_chart, quadratic_datum};
use jdisc_core::cgreen::{analyze, cauchy_green, synthesize};
use jdisc_core::discsolve::solve_disc;
use jdisc_core::vekua::DiscretizedOperator;
use jdisc_core::{DiscGrid, DiscProblem, Method, SolverOptions, SpectralField};

fn bench_cauchy_green(c: &mut Criterion) {
    let mut group = c.benchmark_group("cauchy_green");
    for degree in [8, 16, 32] {
        let u = dense_field(degree);
        group.bench_with_input(BenchmarkId::from_parameter(degree), &u, |b, u| {
            b.iter(|| cauchy_green(u, false).unwrap())
        });
    }
    group.finish();
}

fn bench_grid_transforms(c: &mut Criterion) {
    let mut group = c.benchmark_group("grid");
    for degree in [8, 16] {
        let u = dense_field(degree);
        let grid = DiscGrid::for_degree(degree);
        let values = synthesize(&u, &grid);
        group.bench_with_input(BenchmarkId::new("synthesize", degree), &u, |b, u| {
            b.iter(|| synthesize(u, &grid))
        });
        group.bench_with_input(BenchmarkId::new("analyze", degree), &values, |b, v| {
            b.iter(|| analyze(v, &grid, degree).unwrap())
        });
    }
    group.finish();
}

fn problem(degree: usize, method: Method) -> DiscProblem {
    let options = SolverOptions {
        method,
        degree,
        ..SolverOptions::default()
    };
    DiscProblem::new(quadratic_chart(), options).unwrap()
}

fn bench_assembly(c: &mut Criterion) {
    let mut group = c.benchmark_group("operator_assembly");
    group.sample_size(20);
    for degree in [8, 16] {
        let p = problem(degree, Method::Newton);
        let g = quadratic_datum().to_field();
        let lin = p.linearize(&g).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(degree), &lin, |b, lin| {
            b.iter(|| DiscretizedOperator::assemble(lin, degree).unwrap())
        });
    }
    group.finish();
}

fn bench_solve(c: &mut Criterion) {
    let mut group = c.benchmark_group("disc_solve");
    group.sample_size(10);
    let phi = quadratic_datum();
    for degree in [8, 16] {
        for (name, method) in [("newton", Method::Newton), ("continuation", Method::Continuation)] {
            let p = problem(degree, method);
            group.bench_function(BenchmarkId::new(name, degree), |b| {
                b.iter(|| {
                    let sol = solve_disc(&p, &phi).unwrap();
                    let g: &SpectralField = &sol.g;
                    g.l2_norm()
                })
            });
        }
    }
    group.finish();
}

criterion_group!(benches, bench_cauchy_green, bench_grid_transforms, bench_assembly, bench_solve);
criterion_main!(benches);
