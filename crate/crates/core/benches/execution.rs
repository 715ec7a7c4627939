use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use hyperac::dirichlet::solve_ladder;
use hyperac::plateau::{certify_all, rho_sweep, CertifyConfig, CutWindow};
use hyperac::runner::ExperimentConfig;
use hyperac::Execution;
use std::hint::black_box;

const CONFIG: &str = r#"
name = "bench"
group = { backend = "free", rank = 2 }
boundary = { d0 = ["a"] }

[solve]
radii = [6]
k = 0.5
sweep = "gauss_seidel"
max_sweeps = 200000
"#;

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn bench(c: &mut Criterion) {
    let r = ExperimentConfig::from_toml(CONFIG).unwrap().resolve().unwrap();
    let sweep = rho_sweep(&r.problem, &r.ladder, r.c_hat, r.geometry.entropy, 4, Execution::Parallel).unwrap();
    let limit = sweep.limit();
    let mut windows = vec![CutWindow::ball_window(&limit.ball, 3).unwrap()];
    windows.extend(r.windows().windows(&limit.ball).unwrap());

    let mut g = c.benchmark_group("certify_all");
    g.sample_size(10);
    for (name, exec) in MODES {
        let cfg = CertifyConfig {
            exec,
            ..Default::default()
        };
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| certify_all(black_box(limit), &windows, &cfg).unwrap())
        });
    }
    g.finish();

    let mut g = c.benchmark_group("solve_ladder");
    g.sample_size(10);
    for (name, exec) in MODES {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| solve_ladder(black_box(&r.problem), &r.ladder, exec).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, bench);
criterion_main!(benches);
