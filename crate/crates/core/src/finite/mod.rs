//! Finite-domain ground truth: explicit-state model checking and exact
//! evaluation of constraint systems over a bounded state space.

mod check;
mod instance;
mod mc;
pub mod random;

use thiserror::Error;

use crate::ir::ConstraintSystem;
use crate::skolem::{build_template, find_nondet, skolemize, SkolemConfig};

pub use check::{
    check_clauses, construct_candidate, find_cycle, solve_least, CandidateSolution, CheckResult, FailureSite,
};
pub use instance::{infer_bounds, FiniteInstance, DEFAULT_STATE_CAP};
pub use mc::{holds, mc_ctl, StateSet};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FiniteError {
    #[error("state space of {states} states exceeds the cap of {cap}")]
    StateCap { states: usize, cap: usize },
    #[error("invalid bounds: {0}")]
    Bounds(String),
}

/// Selector tables tried before giving up in [`solve_finite`].
pub const FALLBACK_CANDIDATES: usize = 512;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FiniteVerdict {
    Solvable(CandidateSolution),
    Unsolvable,
}

impl FiniteVerdict {
    pub fn is_solvable(&self) -> bool {
        matches!(self, FiniteVerdict::Solvable(_))
    }
}

/// Decide a generated system on a finite instance: try the canonical
/// candidate first, then selector tables with least interpretations.
pub fn solve_finite(inst: &FiniteInstance, cs: &ConstraintSystem) -> FiniteVerdict {
    let cand = construct_candidate(inst, cs);
    if check_clauses(inst, cs, &cand).is_valid() {
        return FiniteVerdict::Solvable(cand);
    }
    if !cs.has_exists() {
        return match solve_least(inst, cs) {
            Ok(c) => FiniteVerdict::Solvable(c),
            Err(_) => FiniteVerdict::Unsolvable,
        };
    }
    let report = find_nondet(cs.system());
    // Havoc is explored exhaustively by the instance, so only selectors vary.
    let mut tpl = build_template(&report, cs.system(), SkolemConfig::default());
    tpl.affine.clear();
    for sk in tpl.candidates().take(FALLBACK_CANDIDATES) {
        let Ok(universal) = skolemize(cs, &tpl, &sk) else { continue };
        if let Ok(c) = solve_least(inst, &universal) {
            return FiniteVerdict::Solvable(c);
        }
    }
    FiniteVerdict::Unsolvable
}
