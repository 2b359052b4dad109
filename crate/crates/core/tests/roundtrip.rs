mod common;

use std::ops::ControlFlow;
use std::sync::Arc;

use common::{atom, formula, wloop};
use ctlhorn::chc::{emit_chc, for_each_candidate, lower, prepare, read_chc, InfiniteConfig};
use ctlhorn::finite::random::{random_system, rng, RandomConfig};
use ctlhorn::frontend::{normalize, parse_assertion, parse_ctl, parse_system, print_system};
use ctlhorn::{Assertion, LinExpr, TransitionSystem, Update, Var};
use proptest::prelude::*;

fn pairs_in(ts: &TransitionSystem, a: &Assertion, lo: i64, hi: i64) -> Vec<bool> {
    let n = ts.vars().len();
    let span = (hi - lo + 1) as usize;
    let total = span.pow(2 * n as u32);
    (0..total)
        .map(|mut code| {
            let mut vals = vec![0i64; 2 * n];
            for v in vals.iter_mut() {
                *v = lo + (code % span) as i64;
                code /= span;
            }
            let env = |v: &Var| {
                let i = ts.vars().iter().position(|x| *x == v.name)?;
                Some(if v.is_primed() { vals[n + i] } else { vals[i] })
            };
            a.eval(&env) == Some(true)
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn assertions_reparse(a in atom()) {
        prop_assert_eq!(parse_assertion(&a.to_string()).unwrap(), a);
    }

    #[test]
    fn formulas_reparse(f in formula(true)) {
        prop_assert_eq!(parse_ctl(&f.to_string()).unwrap(), f);
    }

    #[test]
    fn systems_reparse(seed in any::<u64>()) {
        let ts = random_system(&mut rng(seed), &RandomConfig::default());
        let text = print_system(&ts);
        let back = parse_system(&text).unwrap();
        prop_assert_eq!(&back, &ts);
        // site ids come from source order
        let sites: Vec<usize> = back.commands().iter().map(|c| c.site).collect();
        prop_assert_eq!(sites, (0..ts.commands().len()).collect::<Vec<_>>());
    }

    #[test]
    fn added_command_weakens_next(seed in any::<u64>(), g in atom(), k in 0i64..3) {
        let cfg = RandomConfig { locations: 3, data: 3, ..RandomConfig::default() };
        let ts = random_system(&mut rng(seed), &cfg);
        let bigger = ts
            .with_command(g, vec![Update::Expr(LinExpr::constant(k)), Update::Expr(LinExpr::var(Var::state("x")))])
            .unwrap();
        let before = pairs_in(&ts, &ts.induced_next(), 0, 2);
        let after = pairs_in(&bigger, &bigger.induced_next(), 0, 2);
        prop_assert!(before.iter().zip(&after).all(|(b, a)| !b || *a));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn scripts_read_back(seed in any::<u64>(), f in formula(false)) {
        let ts = Arc::new(random_system(&mut rng(seed), &RandomConfig::default()));
        let cs = prepare(ts, &normalize(&f)).unwrap();
        for_each_candidate(&cs, &InfiniteConfig::default(), |i, _, u| {
            let script = lower(&u).unwrap();
            assert_eq!(read_chc(&script.to_string()).unwrap(), script);
            if i >= 3 { ControlFlow::Break(()) } else { ControlFlow::Continue(()) }
        })
        .unwrap();
    }
}

#[test]
fn fixtures_reparse() {
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/../../fixtures/bench");
    let mut seen = 0;
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "ts") {
            let ts = parse_system(&std::fs::read_to_string(&path).unwrap()).unwrap();
            assert_eq!(parse_system(&print_system(&ts)).unwrap(), ts, "{}", path.display());
            seen += 1;
        }
    }
    assert_eq!(seen, 7);
    let ts = wloop();
    assert_eq!(parse_system(&print_system(&ts)).unwrap(), *ts);
}

#[test]
fn candidate_sequence_is_deterministic() {
    let f = normalize(&parse_ctl("AG(EF(w >= 1))").unwrap());
    let run = || {
        let cs = prepare(wloop(), &f).unwrap();
        let mut seq = Vec::new();
        for_each_candidate(&cs, &InfiniteConfig::default(), |_, d, u| {
            seq.push((d, emit_chc(&u).unwrap()));
            ControlFlow::<()>::Continue(())
        })
        .unwrap();
        seq
    };
    let a = run();
    assert!(!a.is_empty());
    assert_eq!(a, run());
}
