use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

use lobachevsky::engine::mixed_parseval_with;
use lobachevsky::exec::Execution;
use lobachevsky::kernels::kernel_bspline;
use lobachevsky::oracle::{oracle_integral_with, Method, OracleOptions};
use lobachevsky::periodic::{parse_periodic, PeriodicFunction};
use lobachevsky::rational::int;

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn oracle_blocks(c: &mut Criterion) {
    let p = PeriodicFunction::square_wave(int(1)).unwrap();
    let kernel = kernel_bspline(1).unwrap();
    let mut group = c.benchmark_group("oracle_block_averaged");
    group.sample_size(10);
    for (name, execution) in MODES {
        let options = OracleOptions { execution, max_blocks: None };
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| {
                oracle_integral_with(black_box(&p), &kernel, 200.0, 1e-8, Method::BlockAveraged, options).unwrap()
            })
        });
    }
    group.finish();
}

fn engine_coefficients(c: &mut Criterion) {
    // Long period with a non-polynomial expression: many nodes, each by quadrature.
    let p = parse_periodic("cos(pi*x/8)^2 * abs(sin(pi*x/16))", int(32), None).unwrap();
    let kernel = kernel_bspline(1).unwrap();
    let mut group = c.benchmark_group("engine_expression_coefficients");
    group.sample_size(10);
    for (name, execution) in MODES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| mixed_parseval_with(black_box(&p), &kernel, 1e-10, execution).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, oracle_blocks, engine_coefficients);
criterion_main!(benches);
