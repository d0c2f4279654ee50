use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use spinorbit::cascade::run_cascade_with;
use spinorbit::measurement::hbsm_table;
use spinorbit::protocol::{run_teleportation_with, NoiseParams};
use spinorbit::sources::InputStateId;
use spinorbit::Exec;

const MODES: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn teleport(c: &mut Criterion) {
    let mut g = c.benchmark_group("teleport_e_calibrated");
    g.sample_size(10);
    let noise = NoiseParams::calibrated();
    for (name, exec) in MODES {
        g.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| run_teleportation_with(InputStateId::E, &noise, exec).unwrap())
        });
    }
    g.finish();
}

fn hbsm(c: &mut Criterion) {
    let mut g = c.benchmark_group("hbsm_table");
    g.sample_size(20);
    for (name, exec) in MODES {
        g.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| hbsm_table(exec).unwrap())
        });
    }
    g.finish();
}

fn cascade(c: &mut Criterion) {
    let mut g = c.benchmark_group("cascade_n8");
    g.sample_size(10);
    for (name, exec) in MODES {
        g.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| run_cascade_with(8, exec).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, teleport, hbsm, cascade);
criterion_main!(benches);
