//! CHC emission, the external solver interface and the candidate loop for
//! unbounded instances.

mod script;
mod solver;

use std::collections::BTreeMap;
use std::ops::ControlFlow;
use std::sync::Arc;
use std::time::Duration;

use thiserror::Error;

use crate::finite::{solve_least, FiniteInstance};
use crate::frontend::FrontendError;
use crate::ir::{ConstraintSystem, CtlFormula, Role, TransitionSystem};
use crate::proofsys::{generate, inline_assertions, ProofError};
use crate::skolem::{
    apply_ranking, build_template, find_nondet, ranking_domain, skolemize, split_rank_clauses, GuardTemplate,
    RankingCandidate, RankingTemplate, SkolemConfig, SkolemError, SkolemTemplate,
};

pub use script::{emit_chc, lower, read_chc, ChcAtom, ChcHead, ChcRule, ChcScript, HEADER};
pub use solver::{solve_external, SolverVerdict, DEFAULT_TIMEOUT};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ChcError {
    #[error("clause {0} still has an existential head")]
    ResidualExists(usize),
    #[error("`{0}` is still marked well-founded")]
    ResidualWf(String),
    #[error("negated unknown predicate `{0}` has no Horn encoding")]
    NegatedPredicate(String),
    #[error("clause {0} has a transition literal in its head")]
    TransitionInHead(usize),
    #[error("no command at site {0}")]
    UnknownSite(usize),
    #[error("malformed script: {0}")]
    Read(FrontendError),
    #[error(transparent)]
    Proof(#[from] ProofError),
    #[error(transparent)]
    Skolem(#[from] SkolemError),
}

/// Decides a discharged (universal, wf-free) system.
#[derive(Debug, Clone)]
pub enum Certifier {
    External { command: String, timeout: Duration },
    Finite(Arc<FiniteInstance>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InfiniteConfig {
    pub skolem: SkolemConfig,
    /// Range of ranking coefficients on data variables.
    pub rank_range: (i64, i64),
    /// Ranking candidates kept per rank symbol and selector table.
    pub rankings_per_symbol: usize,
    /// Overall cap on discharged systems tried; skeletons without any
    /// ranking count against it as well.
    pub max_candidates: usize,
    /// List ranking coefficients with exact location offsets first.
    pub exact_rankings_first: bool,
}

impl Default for InfiniteConfig {
    fn default() -> Self {
        InfiniteConfig {
            skolem: SkolemConfig::default(),
            rank_range: (-5, 5),
            rankings_per_symbol: 16,
            max_candidates: 512,
            exact_rankings_first: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    /// Selector, update and ranking assignments, one per line.
    pub candidate: Vec<String>,
    /// Echo of the solver's model, when an external solver certified.
    pub model: Option<String>,
    /// 1-based index of the certified candidate.
    pub index: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Holds(Witness),
    /// Not a refutation: the candidate space was exhausted or the solver
    /// could not decide.
    NotProven(String),
}

impl Verdict {
    pub fn is_holds(&self) -> bool {
        matches!(self, Verdict::Holds(_))
    }
}

/// Generate constraints for a normalized formula and inline the unknowns
/// that stand for plain assertions.
pub fn prepare(ts: Arc<TransitionSystem>, f: &CtlFormula) -> Result<ConstraintSystem, ChcError> {
    Ok(inline_assertions(&generate(ts, f)?)?)
}

/// Enumerate discharged systems in deterministic order: guesses for
/// negated unknowns vary slowest, then selector and update tables, then one
/// ranking per wf-marked symbol. `visit` gets the 1-based index, the
/// candidate description and the universal system.
pub fn for_each_candidate<B>(
    cs: &ConstraintSystem,
    cfg: &InfiniteConfig,
    mut visit: impl FnMut(usize, Vec<String>, ConstraintSystem) -> ControlFlow<B>,
) -> Result<Option<B>, ChcError> {
    let ts = cs.system();
    let guards = GuardTemplate::new(cs);
    let rt = RankingTemplate::new(ts, cfg.rank_range);
    let mut index = 0;
    let mut spent = 0;
    for choice in guards.candidates() {
        let guarded = guards.apply(cs, &choice)?;
        let tpl = if guarded.has_exists() {
            build_template(&find_nondet(ts), ts, cfg.skolem)
        } else {
            SkolemTemplate { selectors: vec![], affine: vec![], vars: ts.vars().to_vec(), config: cfg.skolem }
        };
        let ranks: Vec<String> = guarded
            .decls()
            .iter()
            .filter(|d| d.role == Role::Rank && guarded.wf_marks().contains(&d.name))
            .map(|d| d.name.clone())
            .collect();
        for sk in tpl.candidates() {
            if spent >= cfg.max_candidates {
                return Ok(None);
            }
            spent += 1;
            let universal =
                if guarded.has_exists() { skolemize(&guarded, &tpl, &sk)? } else { guarded.clone() };
            let split = split_rank_clauses(&universal)?;
            let per_rank: Vec<Vec<RankingCandidate>> = ranks
                .iter()
                .map(|r| {
                    ranking_domain(&split, &rt, r, cfg.exact_rankings_first)
                        .take(cfg.rankings_per_symbol)
                        .collect()
                })
                .collect();
            if per_rank.iter().any(Vec::is_empty) {
                continue;
            }
            let mut digits = vec![0usize; ranks.len()];
            loop {
                if index >= cfg.max_candidates {
                    return Ok(None);
                }
                index += 1;
                spent += 1;
                let chosen: BTreeMap<String, RankingCandidate> = ranks
                    .iter()
                    .zip(&digits)
                    .zip(&per_rank)
                    .map(|((r, &d), cands)| (r.clone(), cands[d].clone()))
                    .collect();
                let discharged = apply_ranking(&split, &rt, &chosen)?;
                let mut desc = guards.describe(&choice);
                desc.extend(tpl.describe(&sk));
                desc.extend(chosen.iter().map(|(r, c)| rt.describe(r, c)));
                if let ControlFlow::Break(b) = visit(index, desc, discharged) {
                    return Ok(Some(b));
                }
                // odometer over ranking choices, last symbol fastest
                let mut carried = true;
                for i in (0..digits.len()).rev() {
                    digits[i] += 1;
                    if digits[i] < per_rank[i].len() {
                        carried = false;
                        break;
                    }
                    digits[i] = 0;
                }
                if carried {
                    break;
                }
            }
        }
    }
    Ok(None)
}

/// Prove `f` on `ts` by finding a candidate whose discharged system the
/// certifier accepts. Holds is only returned after certification.
pub fn verify_infinite(
    ts: Arc<TransitionSystem>,
    f: &CtlFormula,
    cfg: &InfiniteConfig,
    certifier: &Certifier,
) -> Result<Verdict, ChcError> {
    let cs = prepare(ts, f)?;
    let mut tried = 0;
    let mut undecided: Option<String> = None;
    let found = for_each_candidate(&cs, cfg, |index, candidate, discharged| {
        tried = index;
        match certifier {
            Certifier::Finite(inst) => {
                if solve_least(inst, &discharged).is_ok() {
                    return ControlFlow::Break(Ok(Witness { candidate, model: None, index }));
                }
            }
            Certifier::External { command, timeout } => {
                let text = match emit_chc(&discharged) {
                    Ok(t) => t,
                    Err(e) => return ControlFlow::Break(Err(format!("emit: {e}"))),
                };
                match solve_external(&text, command, *timeout) {
                    SolverVerdict::Solved(model) => {
                        return ControlFlow::Break(Ok(Witness { candidate, model: Some(model), index }))
                    }
                    SolverVerdict::Refuted(_) => {}
                    SolverVerdict::ToolError(m) if m.starts_with("spawn failed") => {
                        return ControlFlow::Break(Err(format!("tool error: {m}")))
                    }
                    SolverVerdict::ToolError(m) => undecided = Some(format!("tool error: {m}")),
                    v => undecided = Some(format!("solver {}", v.label())),
                }
            }
        }
        ControlFlow::Continue(())
    })?;
    Ok(match found {
        Some(Ok(w)) => Verdict::Holds(w),
        Some(Err(reason)) => Verdict::NotProven(reason),
        None => Verdict::NotProven(match undecided {
            Some(u) => format!("{u} on some of {tried} candidates, none certified"),
            None => format!("candidate space exhausted after {tried} candidates"),
        }),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::{normalize, parse_ctl, parse_system};

    fn counter() -> Arc<TransitionSystem> {
        Arc::new(
            parse_system(
                "(system (vars (x Int)) (init (= x 0))
                   (trans (rule (< x 3) ((x (+ x 1)))) (rule (>= x 3) ((x 0)))))",
            )
            .unwrap(),
        )
    }

    fn finite(ts: &Arc<TransitionSystem>) -> Certifier {
        Certifier::Finite(Arc::new(FiniteInstance::new(ts.clone(), vec![(-2, 5)], true, 1000).unwrap()))
    }

    #[test]
    fn true_needs_no_candidates() {
        let ts = counter();
        let v = verify_infinite(ts.clone(), &CtlFormula::tt(), &InfiniteConfig::default(), &finite(&ts));
        assert!(matches!(v, Ok(Verdict::Holds(w)) if w.candidate.is_empty()));
    }

    #[test]
    fn af_needs_a_ranking() {
        let ts = counter();
        let f = normalize(&parse_ctl("AF(x = 3)").unwrap());
        let v = verify_infinite(ts.clone(), &f, &InfiniteConfig::default(), &finite(&ts)).unwrap();
        let Verdict::Holds(w) = v else { panic!("{v:?}") };
        assert!(w.candidate.iter().any(|l| l.starts_with("delta")));
    }

    #[test]
    fn unreachable_goal_is_not_proven() {
        let ts = counter();
        let f = normalize(&parse_ctl("EF(x = 7)").unwrap());
        let v = verify_infinite(ts.clone(), &f, &InfiniteConfig::default(), &finite(&ts)).unwrap();
        assert!(matches!(v, Verdict::NotProven(_)));
    }

    #[test]
    fn emission_preconditions() {
        let ts = counter();
        let cs = generate(ts, &normalize(&parse_ctl("AF(x = 3)").unwrap())).unwrap();
        assert!(matches!(emit_chc(&cs), Err(ChcError::ResidualExists(_) | ChcError::ResidualWf(_))));
    }

    #[test]
    fn emitted_scripts_read_back() {
        let ts = counter();
        let f = normalize(&parse_ctl("AF(x = 3) && EX(x > 0)").unwrap());
        let cs = prepare(ts, &f).unwrap();
        let mut seen = 0;
        for_each_candidate(&cs, &InfiniteConfig::default(), |_, _, u| {
            let script = lower(&u).unwrap();
            assert_eq!(read_chc(&script.to_string()).unwrap(), script);
            seen += 1;
            ControlFlow::<()>::Continue(())
        })
        .unwrap();
        assert!(seen > 0);
    }

    #[test]
    fn reader_rejects_foreign_text() {
        assert!(read_chc("(set-logic HORN)\n(check-sat)\n").is_err());
        let bad = format!("{HEADER}\n(assert (forall ((x Int)) (=> (and (q x)) false)))\n");
        assert!(read_chc(&bad).is_err());
    }

    #[test]
    fn empty_system_is_only_the_query() {
        let ts = counter();
        let cs = ConstraintSystem::new(ts, vec![], vec![], vec![]).unwrap();
        assert_eq!(emit_chc(&cs).unwrap(), format!("{HEADER}\n(set-logic HORN)\n(check-sat)\n(get-model)\n"));
    }
}
