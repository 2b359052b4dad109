use std::collections::BTreeMap;
use std::ops::ControlFlow;
use std::path::Path;
use std::process::{Command, ExitCode};
use std::sync::Arc;
use std::time::{Duration, Instant};

use ctlhorn::chc::{
    emit_chc, for_each_candidate, prepare, solve_external, verify_infinite, Certifier, InfiniteConfig,
    SolverVerdict, Verdict, DEFAULT_TIMEOUT,
};
use ctlhorn::finite::random::{random_formula, random_system, rng, RandomConfig};
use ctlhorn::finite::{holds, mc_ctl, solve_finite, FiniteInstance};
use ctlhorn::frontend::{negate, normalize, parse_assertion, parse_ctl, parse_system};
use ctlhorn::proofsys::generate;
use ctlhorn::{CtlFormula, LinExpr, TransitionSystem, UnaryOp, Update, Var};
use ctlhorn_cli::manifest;
use ctlhorn_cli::task::{run_batch, Engine, VerifyOptions};
use rayon::prelude::*;

const WLOOP: &str = include_str!("../../../fixtures/wloop.ts");
const LISTING: &str = "\
init(v) -> inv1(v).
inv1(v) & next(v,v') -> inv1(v').
inv1(v) -> p1(v).
p1(v) -> inv2(v).
inv2(v) & !p2(v) -> exists(w',pc'). next(v,v') & inv2(v') & rank1(v,v').
p2(v) -> w >= 1.
wf(rank1).
";

const EQUIVALENCE_SEEDS: u64 = 500;
const DUALITY_SEEDS: u64 = 200;
const MAX_DEPTH: usize = 10;
const MIN_W_COEFF: i64 = -4;
const MUTANT_CANDIDATES: usize = 22;

type Criterion = (&'static str, fn() -> Outcome, Duration);

enum Outcome {
    Pass(String),
    Fail(String),
    Skip(String),
}

fn wloop() -> Arc<TransitionSystem> {
    Arc::new(parse_system(WLOOP).unwrap())
}

fn property() -> CtlFormula {
    normalize(&parse_ctl("AG(EF(w >= 1))").unwrap())
}

fn bounded(ts: Arc<TransitionSystem>) -> Arc<FiniteInstance> {
    let bounds = BTreeMap::from([("w".to_string(), (-3, 8))]);
    Arc::new(FiniteInstance::with_inferred_bounds(ts, &bounds, true, 10_000).unwrap())
}

fn golden() -> Outcome {
    let got = generate(wloop(), &property()).unwrap().to_string();
    if got == LISTING {
        Outcome::Pass("7 constraints match".into())
    } else {
        Outcome::Fail(format!("listing differs:\n{got}"))
    }
}

fn worked_verdict() -> Outcome {
    let ts = wloop();
    let inst = bounded(ts.clone());
    if !holds(&inst, &property()) {
        return Outcome::Fail("model checker says false".into());
    }
    let v = verify_infinite(ts, &property(), &InfiniteConfig::default(), &Certifier::Finite(inst)).unwrap();
    let Verdict::Holds(w) = v else { return Outcome::Fail(format!("{v:?}")) };
    let branch = w.candidate.iter().any(|l| l == "sel1@pc=4 := 1");
    let coeff = w
        .candidate
        .iter()
        .find_map(|l| l.strip_prefix("delta1 := "))
        .and_then(|d| d.split("*w").next()?.trim().parse::<i64>().ok());
    match coeff {
        Some(a) if branch && a <= MIN_W_COEFF => {
            Outcome::Pass(format!("candidate {} picks pc=4 -> pc=5, w coefficient {a}", w.index))
        }
        _ => Outcome::Fail(format!("witness {:?}", w.candidate)),
    }
}

fn equivalence() -> Outcome {
    let cfg = RandomConfig { general_until: false, ..RandomConfig::default() };
    assert!(cfg.num_states() <= 30);
    let bad: Vec<String> = (0..EQUIVALENCE_SEEDS)
        .into_par_iter()
        .filter_map(|seed| {
            let mut r = rng(seed);
            let ts = Arc::new(random_system(&mut r, &cfg));
            let f = random_formula(&mut r, &cfg);
            let inst = FiniteInstance::new(ts.clone(), cfg.bounds(), true, cfg.num_states()).unwrap();
            let solvable = solve_finite(&inst, &generate(ts, &f).unwrap()).is_solvable();
            (solvable != holds(&inst, &f)).then(|| format!("seed {seed}: {f}"))
        })
        .collect();
    if bad.is_empty() {
        Outcome::Pass(format!("{EQUIVALENCE_SEEDS} seeds agree"))
    } else {
        Outcome::Fail(format!("{} disagreements, first {}", bad.len(), bad[0]))
    }
}

fn linearity() -> Outcome {
    for n in 1..=MAX_DEPTH {
        let mut f = parse_ctl("w >= 1").unwrap();
        for i in (0..n).rev() {
            f = CtlFormula::unary(if i % 2 == 0 { UnaryOp::AG } else { UnaryOp::EF }, f);
        }
        let cs = generate(wloop(), &normalize(&f)).unwrap();
        let count = cs.clauses().len() + cs.wf_marks().len();
        if count > 4 * n + 3 {
            return Outcome::Fail(format!("depth {n}: {count} > {}", 4 * n + 3));
        }
    }
    Outcome::Pass(format!("depths 1..{MAX_DEPTH} within 4n+3"))
}

fn duality() -> Outcome {
    let cfg = RandomConfig { general_until: false, ..RandomConfig::default() };
    let bad: Vec<u64> = (0..DUALITY_SEEDS)
        .into_par_iter()
        .filter(|&seed| {
            let mut r = rng(seed);
            let ts = Arc::new(random_system(&mut r, &cfg));
            let f = random_formula(&mut r, &cfg);
            let inst = FiniteInstance::new(ts, cfg.bounds(), true, cfg.num_states()).unwrap();
            let pos = mc_ctl(&inst, &f);
            let neg = mc_ctl(&inst, &negate(&f).unwrap());
            pos.iter().zip(&neg).any(|(a, b)| a == b)
        })
        .collect();
    if bad.is_empty() {
        Outcome::Pass(format!("{DUALITY_SEEDS} seeds complement"))
    } else {
        Outcome::Fail(format!("seeds {bad:?}"))
    }
}

fn bench_protocol() -> Outcome {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/bench/manifest.json");
    let loaded = match manifest::load(&path) {
        Ok(l) => l,
        Err(e) => return Outcome::Fail(format!("{e:#}")),
    };
    let jobs = loaded.jobs().unwrap();
    let opts = VerifyOptions { engine: Engine::Finite, ..VerifyOptions::default() };
    let rows = run_batch(&jobs, &opts, None);
    let doubled = rows.iter().filter(|r| r.inconsistent()).count();
    let bad = manifest::mismatches(&rows, &loaded.expected());
    if doubled == 0 && bad.is_empty() && loaded.manifest.fixtures.len() == 7 && rows.len() == 28 {
        Outcome::Pass(format!("{} rows match, none hold both ways", rows.len()))
    } else {
        Outcome::Fail(format!("{doubled} double holds, mismatches {bad:?}"))
    }
}

fn chc_smoke() -> Outcome {
    if !Command::new("z3").arg("--version").output().is_ok_and(|o| o.status.success()) {
        return Outcome::Skip("z3 not found".into());
    }
    let witness = prepare(wloop(), &property())
        .ok()
        .and_then(|cs| {
            for_each_candidate(&cs, &InfiniteConfig::default(), |_, _, u| ControlFlow::Break(emit_chc(&u)))
                .ok()
                .flatten()
        })
        .and_then(Result::ok);
    let Some(script) = witness else { return Outcome::Fail("no candidate script".into()) };
    if !matches!(solve_external(&script, "z3", DEFAULT_TIMEOUT), SolverVerdict::Solved(_)) {
        return Outcome::Fail("worked example candidate 1 not sat".into());
    }
    let ts = wloop();
    let site = ts.commands().iter().position(|c| c.guard == parse_assertion("pc = 5").unwrap()).unwrap();
    let mutant = Arc::new(
        ts.without_command(site)
            .with_command(
                parse_assertion("pc = 5").unwrap(),
                vec![Update::Expr(LinExpr::var(Var::state("w"))), Update::Expr(LinExpr::constant(6))],
            )
            .unwrap(),
    );
    let cs = prepare(mutant, &property()).unwrap();
    let (mut total, mut unsat) = (0, 0);
    for_each_candidate(&cs, &InfiniteConfig::default(), |_, _, u| {
        total += 1;
        if let Ok(s) = emit_chc(&u) {
            unsat += matches!(solve_external(&s, "z3", DEFAULT_TIMEOUT), SolverVerdict::Refuted(_)) as usize;
        }
        ControlFlow::<()>::Continue(())
    })
    .unwrap();
    if total == MUTANT_CANDIDATES && unsat == total {
        Outcome::Pass(format!("witness sat, {unsat}/{total} mutant candidates unsat"))
    } else {
        Outcome::Fail(format!("{unsat}/{total} mutant candidates unsat, expected {MUTANT_CANDIDATES}"))
    }
}

fn main() -> ExitCode {
    let criteria: [Criterion; 7] = [
        ("golden listing", golden, Duration::from_secs(1)),
        ("worked example verdict", worked_verdict, Duration::from_secs(10)),
        ("oracle equivalence", equivalence, Duration::from_secs(300)),
        ("linear size", linearity, Duration::from_secs(1)),
        ("negation duality", duality, Duration::from_secs(60)),
        ("benchmark consistency", bench_protocol, Duration::from_secs(120)),
        ("chc smoke", chc_smoke, Duration::from_secs(120)),
    ];
    let mut failed = false;
    for (i, (name, run, limit)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let took = start.elapsed();
        let line = match outcome {
            Outcome::Pass(m) if took <= *limit => format!("PASS {} {name}: {m} ({took:.2?})", i + 1),
            Outcome::Pass(m) => {
                failed = true;
                format!("FAIL {} {name}: {m}, but took {took:.2?} > {limit:?}", i + 1)
            }
            Outcome::Fail(m) => {
                failed = true;
                format!("FAIL {} {name}: {m} ({took:.2?})", i + 1)
            }
            Outcome::Skip(m) => format!("PASS {} {name}: skipped, warning: {m}", i + 1),
        };
        println!("{line}");
    }
    if failed {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
