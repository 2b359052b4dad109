//! Seeded oracle-agreement battery: constraint solving on random finite
//! instances against explicit-state model checking, negation duality, and
//! the worked example.

use std::sync::Arc;

use ctlhorn::finite::random::{random_formula, random_system, rng, RandomConfig};
use ctlhorn::finite::{holds, mc_ctl, solve_finite, FiniteInstance};
use ctlhorn::frontend::{negate, normalize, parse_ctl, parse_system};
use ctlhorn::proofsys::generate;
use ctlhorn::{ConstraintSystem, Literal};
use rayon::prelude::*;

pub const WLOOP_SOURCE: &str = include_str!("../../../fixtures/wloop.ts");
pub const WLOOP_PROPERTY: &str = "AG(EF(w >= 1))";

/// The expected constraint listing for the worked example.
pub const WLOOP_GOLDEN: &str = "\
init(v) -> inv1(v).
inv1(v) & next(v,v') -> inv1(v').
inv1(v) -> p1(v).
p1(v) -> inv2(v).
inv2(v) & !p2(v) -> exists(w',pc'). next(v,v') & inv2(v') & rank1(v,v').
p2(v) -> w >= 1.
wf(rank1).
";

#[derive(Debug, Clone, Copy)]
pub struct SelftestConfig {
    pub cases: usize,
    pub seed: u64,
    /// Drop every clause with `init` in its body before solving, so that
    /// the battery must notice disagreements.
    pub inject_mutant: bool,
}

impl Default for SelftestConfig {
    fn default() -> Self {
        SelftestConfig { cases: 500, seed: 0, inject_mutant: false }
    }
}

#[derive(Debug, Clone, Default)]
pub struct SelftestReport {
    pub lines: Vec<String>,
    pub warnings: Vec<String>,
    pub failures: usize,
}

fn drop_init_clauses(cs: &ConstraintSystem) -> ConstraintSystem {
    let kept = cs.clauses().iter().filter(|c| !c.body.contains(&Literal::Init)).cloned().collect();
    cs.with_parts(cs.decls().to_vec(), kept, cs.wf_marks().to_vec()).expect("subset of a valid system")
}

/// `Some(description)` on disagreement.
fn equivalence_case(seed: u64, cfg: &RandomConfig, mutant: bool) -> Option<String> {
    let mut r = rng(seed);
    let ts = Arc::new(random_system(&mut r, cfg));
    let f = random_formula(&mut r, cfg);
    let inst = FiniteInstance::new(ts.clone(), cfg.bounds(), true, cfg.num_states()).ok()?;
    let cs = match generate(ts, &f) {
        Ok(cs) => cs,
        Err(e) => return Some(format!("seed {seed}: generate failed on `{f}`: {e}")),
    };
    let cs = if mutant { drop_init_clauses(&cs) } else { cs };
    let expected = holds(&inst, &f);
    let got = solve_finite(&inst, &cs).is_solvable();
    (expected != got).then(|| format!("seed {seed}: `{f}` holds={expected} solvable={got}"))
}

fn duality_case(seed: u64, cfg: &RandomConfig) -> Option<String> {
    let mut r = rng(seed);
    let ts = Arc::new(random_system(&mut r, cfg));
    let cfg = RandomConfig { general_until: false, ..*cfg };
    let f = random_formula(&mut r, &cfg);
    let inst = FiniteInstance::new(ts, cfg.bounds(), true, cfg.num_states()).ok()?;
    let neg = match negate(&f) {
        Ok(n) => n,
        Err(e) => return Some(format!("seed {seed}: negate failed on `{f}`: {e}")),
    };
    let pos = mc_ctl(&inst, &f);
    let neg = mc_ctl(&inst, &neg);
    pos.iter().zip(&neg).any(|(a, b)| a == b).then(|| format!("seed {seed}: `{f}` and its negation overlap"))
}

fn golden() -> Result<(), String> {
    let ts = Arc::new(parse_system(WLOOP_SOURCE).map_err(|e| e.to_string())?);
    let f = normalize(&parse_ctl(WLOOP_PROPERTY).map_err(|e| e.to_string())?);
    let cs = generate(ts, &f).map_err(|e| e.to_string())?;
    let got = cs.to_string();
    if got == WLOOP_GOLDEN {
        Ok(())
    } else {
        Err(format!("worked example listing differs:\n{got}"))
    }
}

pub fn run(cfg: &SelftestConfig) -> SelftestReport {
    let mut rep = SelftestReport::default();
    let rc = RandomConfig::default();
    let seeds: Vec<u64> = (0..cfg.cases as u64).map(|i| cfg.seed.wrapping_add(i)).collect();
    if seeds.is_empty() {
        rep.warnings.push("no random cases requested; the battery passes vacuously".into());
    }

    let bad: Vec<String> =
        seeds.par_iter().filter_map(|&s| equivalence_case(s, &rc, cfg.inject_mutant)).collect();
    rep.lines.push(format!("equivalence: {} cases, {} disagreements", seeds.len(), bad.len()));
    rep.failures += bad.len();
    rep.lines.extend(bad.into_iter().take(10).map(|b| format!("  {b}")));

    let bad: Vec<String> = seeds.par_iter().filter_map(|&s| duality_case(s, &rc)).collect();
    rep.lines.push(format!("negation duality: {} cases, {} disagreements", seeds.len(), bad.len()));
    rep.failures += bad.len();
    rep.lines.extend(bad.into_iter().take(10).map(|b| format!("  {b}")));

    match golden() {
        Ok(()) => rep.lines.push("worked example: listing matches".into()),
        Err(e) => {
            rep.failures += 1;
            rep.lines.push(format!("worked example: {e}"));
        }
    }
    rep
}
