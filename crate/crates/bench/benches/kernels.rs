use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use resetld::mc::oracle::wiener_sup_oracle;
use resetld::process::{ProcessState, Walker};
use resetld::rng::{stream, Domain};
use resetld::{rate_reset, simulate_trajectory, sup_rate, variational_minimize, ModelParams, PiecewiseLinearPath};

fn simulation(c: &mut Criterion) {
    let params = ModelParams::new(1.0, 4).with_bridge_correction(true);
    c.bench_function("simulate_trajectory_2048", |b| {
        let mut i = 0;
        b.iter(|| {
            i += 1;
            let mut rng = stream(1, Domain::Trajectory, &[], i);
            black_box(simulate_trajectory(&params, &mut rng))
        })
    });
    c.bench_function("walker_first_passage_2048", |b| {
        let mut i = 0;
        b.iter(|| {
            i += 1;
            let mut rng = stream(1, Domain::Crude, &[], i);
            let mut w = Walker::lazy(&params, ProcessState::origin(), &mut rng);
            black_box(w.run_until_level(1.0, &mut rng))
        })
    });
}

fn functionals(c: &mut Criterion) {
    let values: Vec<f64> = (0..=256).map(|i| ((i as f64) * 0.1).sin().max(0.0)).collect();
    let path = PiecewiseLinearPath::uniform(values).unwrap();
    c.bench_function("rate_reset_256", |b| b.iter(|| black_box(rate_reset(&path, 1.0))));
    c.bench_function("sup_rate", |b| b.iter(|| black_box(sup_rate(black_box(1.3), 1.0))));
    c.bench_function("wiener_sup_oracle", |b| b.iter(|| black_box(wiener_sup_oracle(black_box(2.0)))));
    c.bench_function("variational_64x8", |b| {
        let mut rng = stream(1, Domain::Variational, &[], 0);
        b.iter(|| black_box(variational_minimize(1.0, 1.0, 64, 8, &mut rng).unwrap()))
    });
}

criterion_group!(benches, simulation, functionals);
criterion_main!(benches);
