mod common;

use std::collections::BTreeMap;
use std::ops::ControlFlow;
use std::process::Command;
use std::sync::Arc;

use common::{brute_holds, wloop};
use ctlhorn::chc::{
    emit_chc, for_each_candidate, prepare, solve_external, verify_infinite, Certifier, InfiniteConfig,
    SolverVerdict, Verdict, DEFAULT_TIMEOUT,
};
use ctlhorn::finite::FiniteInstance;
use ctlhorn::frontend::{normalize, parse_assertion, parse_ctl};
use ctlhorn::proofsys::generate;
use ctlhorn::{CtlFormula, LinExpr, TransitionSystem, Update, Var};

const LISTING: &str = "\
init(v) -> inv1(v).
inv1(v) & next(v,v') -> inv1(v').
inv1(v) -> p1(v).
p1(v) -> inv2(v).
inv2(v) & !p2(v) -> exists(w',pc'). next(v,v') & inv2(v') & rank1(v,v').
p2(v) -> w >= 1.
wf(rank1).
";

const SCRIPT: &str = include_str!("../../../fixtures/golden/wloop-candidate1.smt2");

fn property() -> CtlFormula {
    normalize(&parse_ctl("AG(EF(w >= 1))").unwrap())
}

fn bounded(ts: Arc<TransitionSystem>) -> Arc<FiniteInstance> {
    let bounds = BTreeMap::from([("w".to_string(), (-3, 8))]);
    Arc::new(FiniteInstance::with_inferred_bounds(ts, &bounds, true, 10_000).unwrap())
}

/// The loop with `w := w + 1` replaced by `w := w`: the first inner loop
/// never terminates once entered.
fn mutant() -> Arc<TransitionSystem> {
    let ts = wloop();
    let site = ts.commands().iter().position(|c| c.guard == parse_assertion("pc = 5").unwrap()).unwrap();
    Arc::new(
        ts.without_command(site)
            .with_command(
                parse_assertion("pc = 5").unwrap(),
                vec![Update::Expr(LinExpr::var(Var::state("w"))), Update::Expr(LinExpr::constant(6))],
            )
            .unwrap(),
    )
}

fn z3_present() -> bool {
    Command::new("z3").arg("--version").output().is_ok_and(|o| o.status.success())
}

#[test]
fn worked_example_listing() {
    assert_eq!(generate(wloop(), &property()).unwrap().to_string(), LISTING);
}

#[test]
fn worked_example_holds_on_bounded_instance() {
    assert!(brute_holds(&bounded(wloop()), &property()));
}

#[test]
fn finite_pipeline_finds_the_expected_witness() {
    let ts = wloop();
    let cert = Certifier::Finite(bounded(ts.clone()));
    let v = verify_infinite(ts, &property(), &InfiniteConfig::default(), &cert).unwrap();
    let Verdict::Holds(w) = v else { panic!("{v:?}") };
    assert!(w.candidate.contains(&"sel1@pc=4 := 1".to_string()), "{:?}", w.candidate);
    let delta = w.candidate.iter().find(|l| l.starts_with("delta1 := ")).unwrap();
    let coeff: i64 = delta["delta1 := ".len()..].split("*w").next().unwrap().trim().parse().unwrap();
    assert!(coeff <= -4, "{delta}");
}

#[test]
fn mutant_is_not_proven() {
    let ts = mutant();
    assert!(!brute_holds(&bounded(ts.clone()), &property()));
    let cert = Certifier::Finite(bounded(ts.clone()));
    let v = verify_infinite(ts, &property(), &InfiniteConfig::default(), &cert).unwrap();
    assert!(matches!(v, Verdict::NotProven(_)), "{v:?}");
}

#[test]
fn first_candidate_script_is_stable() {
    let cs = prepare(wloop(), &property()).unwrap();
    let script =
        for_each_candidate(&cs, &InfiniteConfig::default(), |_, _, u| ControlFlow::Break(emit_chc(&u)))
            .unwrap()
            .unwrap()
            .unwrap();
    assert_eq!(script, SCRIPT);
}

#[test]
fn solver_accepts_the_witness() {
    if !z3_present() {
        eprintln!("warning: z3 not found, skipping");
        return;
    }
    assert!(matches!(solve_external(SCRIPT, "z3", DEFAULT_TIMEOUT), SolverVerdict::Solved(_)));
}

#[test]
fn solver_rejects_every_mutant_candidate() {
    if !z3_present() {
        eprintln!("warning: z3 not found, skipping");
        return;
    }
    let cs = prepare(mutant(), &property()).unwrap();
    let mut verdicts = Vec::new();
    for_each_candidate(&cs, &InfiniteConfig::default(), |_, _, u| {
        verdicts.push(solve_external(&emit_chc(&u).unwrap(), "z3", DEFAULT_TIMEOUT));
        ControlFlow::<()>::Continue(())
    })
    .unwrap();
    assert_eq!(verdicts.len(), 22);
    assert!(verdicts.iter().all(|v| matches!(v, SolverVerdict::Refuted(_))), "{verdicts:?}");
}
