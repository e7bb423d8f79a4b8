//! Hot-path throughput at the desk-scale shapes the experiments use:
//! forward passes, single online steps of both trainers, the hedge update
//! alone, and raw synthetic stream generation.

use criterion::{black_box, criterion_group, criterion_main, Criterion};

use odl_core::stream::recipes;
use odl_core::train::hedge_update;
use odl_core::{
    BaselineHyperParams, HbpHyperParams, HbpTrainer, HedgedNetwork, InitScheme, LabeledInstance,
    NetConfig, OgdTrainer, OnlineTrainer, SeededRng, Vector,
};

const DEPTH: usize = 8;
const WIDTH: usize = 32;

fn desk_config() -> NetConfig {
    NetConfig::new(recipes::DESK_INPUT_DIM, vec![WIDTH; DEPTH], recipes::DESK_NUM_CLASSES)
}

fn instances(n: usize) -> Vec<LabeledInstance> {
    recipes::syn8(40, n as u64)
        .open(7)
        .unwrap()
        .map(|r| r.unwrap())
        .collect()
}

fn bench_forward(c: &mut Criterion) {
    let net = HedgedNetwork::init_hedged(
        &desk_config(),
        InitScheme::relu_default(),
        &mut SeededRng::new(11),
    )
    .unwrap();
    let x = instances(1)[0].features.clone();
    c.bench_function("forward_hedged_8x32", move |b| {
        b.iter(|| net.forward(black_box(&x)))
    });
}

fn bench_hedged_step(c: &mut Criterion) {
    let net = HedgedNetwork::init_hedged(
        &desk_config(),
        InitScheme::relu_default(),
        &mut SeededRng::new(11),
    )
    .unwrap();
    let mut trainer = HbpTrainer::new(net, HbpHyperParams::default()).unwrap();
    let pool = instances(256);
    let mut i = 0usize;
    c.bench_function("hedged_step_8x32", move |b| {
        b.iter(|| {
            let inst = &pool[i % pool.len()];
            i += 1;
            trainer.step(black_box(&inst.features), inst.label).unwrap()
        })
    });
}

fn bench_fixed_step(c: &mut Criterion) {
    let net = HedgedNetwork::init_fixed_depth(
        &desk_config(),
        InitScheme::relu_default(),
        &mut SeededRng::new(11),
    )
    .unwrap();
    let mut trainer = OgdTrainer::new(net, BaselineHyperParams::default()).unwrap();
    let pool = instances(256);
    let mut i = 0usize;
    c.bench_function("fixed_step_8x32", move |b| {
        b.iter(|| {
            let inst = &pool[i % pool.len()];
            i += 1;
            trainer.step(black_box(&inst.features), inst.label).unwrap()
        })
    });
}

fn bench_hedge_update(c: &mut Criterion) {
    let k = 20;
    let alphas = Vector::from_vec(vec![1.0 / k as f64; k]);
    let mut rng = SeededRng::new(3);
    let losses: Vec<f64> = (0..k).map(|_| rng.uniform()).collect();
    c.bench_function("hedge_update_k20", move |b| {
        b.iter(|| hedge_update(black_box(&alphas), black_box(&losses), 0.99, 0.2))
    });
}

fn bench_stream(c: &mut Criterion) {
    let spec = recipes::syn8(40, 1000);
    c.bench_function("syn8_generate_1000", move |b| {
        b.iter(|| spec.open(black_box(7)).unwrap().map(|r| r.unwrap()).count())
    });
}

criterion_group!(
    benches,
    bench_forward,
    bench_hedged_step,
    bench_fixed_step,
    bench_hedge_update,
    bench_stream
);
criterion_main!(benches);
