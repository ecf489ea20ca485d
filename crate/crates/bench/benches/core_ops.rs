//! Microbenchmarks for the numeric hot paths: raw group operations, the
//! semi-direct-product machinery, a single observer update, and a full
//! short scenario run. Criterion compares runs, so keep the fixtures
//! deterministic (fixed seeds).

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use eqobs_core::group::{random_algebra, random_group};
use eqobs_core::sim::{
    run_scenario, InputSource, Integrator, ObserverInitConfig, OriginConfig, ScenarioConfig,
    TrueInitConfig,
};
use eqobs_core::symmetry::{state_action, SymmetryElement};
use eqobs_core::system::{lift, InputVelocity, State};
use eqobs_core::{by_name, AlgebraElement, Gains, ObserverState, OriginPoint};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const GROUPS: &[&str] = &["se2", "so3", "se3"];

fn group_ops(c: &mut Criterion) {
    let mut g = c.benchmark_group("group");
    for name in GROUPS {
        let desc = by_name(name).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let a = random_group(&desc, &mut rng);
        let b = random_group(&desc, &mut rng);
        let w = random_algebra(&desc, &mut rng);

        g.bench_function(BenchmarkId::new("compose", name), |bch| {
            bch.iter(|| black_box(&a).compose(black_box(&b)).unwrap())
        });
        g.bench_function(BenchmarkId::new("inverse", name), |bch| {
            bch.iter(|| black_box(&a).inverse().unwrap())
        });
        g.bench_function(BenchmarkId::new("adjoint", name), |bch| {
            bch.iter(|| black_box(&a).adjoint(black_box(&w)).unwrap())
        });
        g.bench_function(BenchmarkId::new("exp", name), |bch| {
            bch.iter(|| black_box(&w).exp())
        });
        g.bench_function(BenchmarkId::new("project", name), |bch| {
            bch.iter(|| AlgebraElement::project(&desc, black_box(w.matrix())))
        });
    }
    g.finish();
}

fn symmetry_ops(c: &mut Criterion) {
    let mut g = c.benchmark_group("symmetry");
    for name in GROUPS {
        let desc = by_name(name).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let x = SymmetryElement::new(
            random_group(&desc, &mut rng),
            random_algebra(&desc, &mut rng),
        )
        .unwrap();
        let y = SymmetryElement::new(
            random_group(&desc, &mut rng),
            random_algebra(&desc, &mut rng),
        )
        .unwrap();
        let xi = State::new(
            random_group(&desc, &mut rng),
            random_algebra(&desc, &mut rng),
        )
        .unwrap();
        let u = InputVelocity::new(
            random_algebra(&desc, &mut rng),
            random_algebra(&desc, &mut rng),
        )
        .unwrap();

        g.bench_function(BenchmarkId::new("compose", name), |bch| {
            bch.iter(|| black_box(&x).compose(black_box(&y)).unwrap())
        });
        g.bench_function(BenchmarkId::new("state_action", name), |bch| {
            bch.iter(|| state_action(black_box(&x), black_box(&xi)).unwrap())
        });
        g.bench_function(BenchmarkId::new("lift", name), |bch| {
            bch.iter(|| lift(black_box(&xi), black_box(&u)).unwrap())
        });
    }
    g.finish();
}

fn observer_step(c: &mut Criterion) {
    let mut g = c.benchmark_group("observer");
    for name in GROUPS {
        let desc = by_name(name).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let observer =
            ObserverState::at_identity(OriginPoint::identity(&desc), Gains::new(1.0, 1.0).unwrap());
        let measured_pose = random_group(&desc, &mut rng);
        let u = InputVelocity::new(
            random_algebra(&desc, &mut rng),
            random_algebra(&desc, &mut rng),
        )
        .unwrap();

        g.bench_function(BenchmarkId::new("innovation", name), |bch| {
            bch.iter(|| {
                black_box(&observer)
                    .innovation(black_box(&measured_pose))
                    .unwrap()
            })
        });
        let delta = observer.innovation(&measured_pose).unwrap();
        g.bench_function(BenchmarkId::new("dynamics", name), |bch| {
            bch.iter(|| {
                black_box(&observer)
                    .dynamics(black_box(&u), black_box(&delta))
                    .unwrap()
            })
        });
    }
    g.finish();
}

/// One second of the planar hovercraft benchmark at the shipped step size.
fn hovercraft_1s(integrator: Integrator) -> ScenarioConfig {
    let identity9 = vec![1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0];
    ScenarioConfig {
        group: "se2".into(),
        dt: 1e-3,
        duration: 1.0,
        integrator,
        gains: Gains::new(1.0, 1.0).unwrap(),
        origin: OriginConfig {
            p0: identity9.clone(),
            v0: vec![0.0; 3],
        },
        true_init: TrueInitConfig {
            p: identity9.clone(),
            v: vec![1.0, 1.0, 2.0],
        },
        observer_init: ObserverInitConfig {
            ahat_matrix: identity9,
            ahat_coords: vec![0.0; 3],
        },
        input_source: InputSource::HovercraftLissajous,
        seed: 0,
        log_every: 100,
        manifold_tol: 1e-3,
    }
}

fn scenario(c: &mut Criterion) {
    let mut g = c.benchmark_group("scenario");
    g.sample_size(20);
    for integrator in [Integrator::Euler, Integrator::Exp] {
        let cfg = hovercraft_1s(integrator);
        let label = format!("{integrator:?}").to_lowercase();
        g.bench_function(BenchmarkId::new("hovercraft_1s", label), |bch| {
            bch.iter(|| run_scenario(black_box(&cfg)).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, group_ops, symmetry_ops, observer_step, scenario);
criterion_main!(benches);
