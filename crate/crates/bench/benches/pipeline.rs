use std::collections::BTreeMap;
use std::hint::black_box;
use std::ops::ControlFlow;
use std::sync::Arc;

use criterion::{criterion_group, criterion_main, Criterion};
use ctlhorn::chc::{emit_chc, for_each_candidate, prepare, InfiniteConfig};
use ctlhorn::finite::{solve_finite, FiniteInstance};
use ctlhorn::frontend::{normalize, parse_ctl, parse_system};
use ctlhorn::proofsys::generate;

const WLOOP: &str = include_str!("../../../fixtures/wloop.ts");

fn setup() -> (Arc<ctlhorn::TransitionSystem>, ctlhorn::CtlFormula) {
    let ts = Arc::new(parse_system(WLOOP).unwrap());
    (ts, normalize(&parse_ctl("AG(EF(w >= 1))").unwrap()))
}

fn bench_generate(c: &mut Criterion) {
    let (ts, f) = setup();
    c.bench_function("generate", |b| b.iter(|| generate(ts.clone(), black_box(&f)).unwrap()));
}

fn bench_solve_finite(c: &mut Criterion) {
    let (ts, f) = setup();
    let bounds = BTreeMap::from([("w".to_string(), (-3, 8))]);
    let inst = FiniteInstance::with_inferred_bounds(ts.clone(), &bounds, true, 10_000).unwrap();
    let cs = generate(ts, &f).unwrap();
    c.bench_function("solve_finite", |b| b.iter(|| solve_finite(&inst, black_box(&cs))));
}

fn bench_emit(c: &mut Criterion) {
    let (ts, f) = setup();
    let cs = prepare(ts, &f).unwrap();
    let cfg = InfiniteConfig::default();
    c.bench_function("emit_first_candidate", |b| {
        b.iter(|| {
            for_each_candidate(black_box(&cs), &cfg, |_, _, u| ControlFlow::Break(emit_chc(&u))).unwrap()
        })
    });
}

criterion_group!(benches, bench_generate, bench_solve_finite, bench_emit);
criterion_main!(benches);
