//! Witness templates for existential heads and linear rankings for
//! well-foundedness marks.

mod guards;
mod ranking;

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::ir::{
    Assertion, ConstraintSystem, Head, HornClause, IrError, LinExpr, Literal, StepLit, TransitionSystem, Var,
};

pub use guards::{GuardSlot, GuardTemplate};
pub use ranking::{
    apply_ranking, ranking_candidates, ranking_domain, split_rank_clauses, RankingCandidate, RankingTemplate,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SkolemError {
    #[error("candidate outside the template domain: {0}")]
    OutOfDomain(String),
    #[error("existential head without a transition step in clause {0}")]
    MissingNext(usize),
    #[error(transparent)]
    Ir(#[from] IrError),
}

/// Commands sharing one canonical guard.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GuardGroup {
    pub guard: Assertion,
    /// Site ids in source order; always at least two.
    pub members: Vec<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct NondetReport {
    pub groups: Vec<GuardGroup>,
    /// Site id and havocked variables.
    pub havoc_sites: Vec<(usize, Vec<String>)>,
}

impl NondetReport {
    pub fn is_empty(&self) -> bool {
        self.groups.is_empty() && self.havoc_sites.is_empty()
    }
}

/// Group commands by syntactically equal canonical guards and list every
/// havoc update.
pub fn find_nondet(ts: &TransitionSystem) -> NondetReport {
    let mut by_guard: BTreeMap<Assertion, Vec<usize>> = BTreeMap::new();
    let mut order: Vec<Assertion> = Vec::new();
    for c in ts.commands() {
        let g = c.guard.canonical();
        let entry = by_guard.entry(g.clone()).or_default();
        if entry.is_empty() {
            order.push(g);
        }
        entry.push(c.site);
    }
    let groups = order
        .into_iter()
        .filter_map(|g| {
            let members = by_guard.remove(&g)?;
            (members.len() >= 2).then_some(GuardGroup { guard: g, members })
        })
        .collect();
    let havoc_sites = ts
        .commands()
        .iter()
        .filter(|c| c.has_havoc())
        .map(|c| (c.site, c.havoc_vars(ts.vars()).cloned().collect()))
        .collect();
    NondetReport { groups, havoc_sites }
}

/// The variable every guard pins to a constant, if there is one. It plays
/// the role of the program counter for selector tables and ranking offsets.
pub fn location_var(ts: &TransitionSystem) -> Option<String> {
    if ts.commands().is_empty() {
        return None;
    }
    ts.vars()
        .iter()
        .find(|v| {
            let var = Var::state(v.as_str());
            ts.commands().iter().all(|c| c.guard.pinned_value(&var).is_some())
        })
        .cloned()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SkolemConfig {
    /// Range of affine coefficients on state variables.
    pub coeff_range: (i64, i64),
    /// Range of affine constants.
    pub const_range: (i64, i64),
}

impl Default for SkolemConfig {
    fn default() -> Self {
        SkolemConfig { coeff_range: (-2, 2), const_range: (-5, 5) }
    }
}

/// One choice-table entry: which member of a guard group fires at the
/// location value the group's guard pins.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SelectorSlot {
    pub group: usize,
    pub location: Option<(String, i64)>,
    pub members: Vec<usize>,
}

/// `x' = T·v + t` for a havocked `x` at one site.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AffineSlot {
    pub site: usize,
    pub var: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SkolemTemplate {
    pub selectors: Vec<SelectorSlot>,
    pub affine: Vec<AffineSlot>,
    pub vars: Vec<String>,
    pub config: SkolemConfig,
}

/// Concrete values for a template: a 0-based branch per selector and an
/// update expression per affine slot.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SkolemCandidate {
    pub branches: Vec<usize>,
    pub updates: Vec<LinExpr>,
}

pub fn build_template(report: &NondetReport, ts: &TransitionSystem, config: SkolemConfig) -> SkolemTemplate {
    let loc = location_var(ts);
    let selectors = report
        .groups
        .iter()
        .enumerate()
        .map(|(i, g)| SelectorSlot {
            group: i,
            location: loc
                .as_ref()
                .and_then(|l| g.guard.pinned_value(&Var::state(l.as_str())).map(|k| (l.clone(), k))),
            members: g.members.clone(),
        })
        .collect();
    let affine = report
        .havoc_sites
        .iter()
        .flat_map(|(site, vars)| vars.iter().map(|v| AffineSlot { site: *site, var: v.clone() }))
        .collect();
    SkolemTemplate { selectors, affine, vars: ts.vars().to_vec(), config }
}

/// Integers of a range ordered by absolute value, negatives first on ties.
pub fn small_first(range: (i64, i64)) -> Vec<i64> {
    let mut xs: Vec<i64> = (range.0..=range.1).collect();
    xs.sort_by_key(|&x| (x.abs(), x > 0));
    xs
}

impl SkolemTemplate {
    pub fn is_empty(&self) -> bool {
        self.selectors.is_empty() && self.affine.is_empty()
    }

    /// Candidates in deterministic order: selector tables vary slowest,
    /// then affine coefficients, each over values ordered by magnitude.
    pub fn candidates(&self) -> impl Iterator<Item = SkolemCandidate> + '_ {
        let coeffs = small_first(self.config.coeff_range);
        let consts = small_first(self.config.const_range);
        let mut radices: Vec<usize> = self.selectors.iter().map(|s| s.members.len()).collect();
        for _ in &self.affine {
            radices.extend(std::iter::repeat_n(coeffs.len(), self.vars.len()));
            radices.push(consts.len());
        }
        let mut digits = vec![0usize; radices.len()];
        let mut done = radices.contains(&0);
        std::iter::from_fn(move || {
            if done {
                return None;
            }
            let out = self.decode(&digits, &coeffs, &consts);
            // advance the odometer, last digit fastest
            done = true;
            for i in (0..digits.len()).rev() {
                digits[i] += 1;
                if digits[i] < radices[i] {
                    done = false;
                    break;
                }
                digits[i] = 0;
            }
            Some(out)
        })
    }

    fn decode(&self, digits: &[usize], coeffs: &[i64], consts: &[i64]) -> SkolemCandidate {
        let n_sel = self.selectors.len();
        let branches = digits[..n_sel].to_vec();
        let per = self.vars.len() + 1;
        let updates = (0..self.affine.len())
            .map(|j| {
                let d = &digits[n_sel + j * per..n_sel + (j + 1) * per];
                let mut e = LinExpr::constant(consts[d[self.vars.len()]]);
                for (v, &di) in self.vars.iter().zip(d) {
                    e.add_term(coeffs[di], Var::state(v.as_str()));
                }
                e
            })
            .collect();
        SkolemCandidate { branches, updates }
    }

    fn check(&self, cand: &SkolemCandidate) -> Result<(), SkolemError> {
        if cand.branches.len() != self.selectors.len() || cand.updates.len() != self.affine.len() {
            return Err(SkolemError::OutOfDomain("wrong number of entries".into()));
        }
        for (s, &b) in self.selectors.iter().zip(&cand.branches) {
            if b >= s.members.len() {
                return Err(SkolemError::OutOfDomain(format!(
                    "branch {} of a {}-way group",
                    b + 1,
                    s.members.len()
                )));
            }
        }
        let (clo, chi) = self.config.coeff_range;
        let (klo, khi) = self.config.const_range;
        for e in &cand.updates {
            let coeff_ok = e
                .terms()
                .all(|(v, c)| !v.is_primed() && self.vars.contains(&v.name) && (clo..=chi).contains(&c));
            if !coeff_ok || !(klo..=khi).contains(&e.constant_part()) {
                return Err(SkolemError::OutOfDomain(format!("update `{e}`")));
            }
        }
        Ok(())
    }

    /// Sites dropped by the candidate's selector choices.
    fn dropped_sites(&self, cand: &SkolemCandidate) -> Vec<usize> {
        self.selectors
            .iter()
            .zip(&cand.branches)
            .flat_map(|(s, &b)| s.members.iter().enumerate().filter(move |(i, _)| *i != b).map(|(_, &m)| m))
            .collect()
    }

    fn fill_for(&self, cand: &SkolemCandidate, site: usize) -> BTreeMap<String, LinExpr> {
        self.affine
            .iter()
            .zip(&cand.updates)
            .filter(|(slot, _)| slot.site == site)
            .map(|(slot, e)| (slot.var.clone(), e.clone()))
            .collect()
    }

    /// `sel<k>@<loc>=<v> := <branch>` and `upd<site>.<var> := <expr>` lines.
    pub fn describe(&self, cand: &SkolemCandidate) -> Vec<String> {
        let mut out = Vec::new();
        for (s, &b) in self.selectors.iter().zip(&cand.branches) {
            let key = match &s.location {
                Some((l, k)) => format!("sel{}@{l}={k}", s.group + 1),
                None => format!("sel{}", s.group + 1),
            };
            out.push(format!("{key} := {}", b + 1));
        }
        for (slot, e) in self.affine.iter().zip(&cand.updates) {
            out.push(format!("upd{}.{} := {e}", slot.site, slot.var));
        }
        out
    }
}

impl fmt::Display for SkolemCandidate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let b: Vec<String> = self.branches.iter().map(|b| (b + 1).to_string()).collect();
        let u: Vec<String> = self.updates.iter().map(|e| e.to_string()).collect();
        write!(f, "[{}] [{}]", b.join(","), u.join("; "))
    }
}

/// Replace every existential head by universal clauses, one per retained
/// command: `body ∧ guard ∧ step → items`. Guard-group members not chosen by
/// the candidate are dropped, havocked variables follow the candidate's
/// affine updates, and a totality clause `body → ⋁ guards` keeps stuck
/// states from satisfying the obligation vacuously.
pub fn skolemize(
    cs: &ConstraintSystem,
    tpl: &SkolemTemplate,
    cand: &SkolemCandidate,
) -> Result<ConstraintSystem, SkolemError> {
    tpl.check(cand)?;
    let ts = cs.system();
    let dropped = tpl.dropped_sites(cand);
    let retained: Vec<_> = ts.commands().iter().filter(|c| !dropped.contains(&c.site)).collect();
    let mut clauses = Vec::new();
    for (i, c) in cs.clauses().iter().enumerate() {
        let Head::Exists(items) = &c.head else {
            clauses.push(c.clone());
            continue;
        };
        if !items.contains(&Literal::Next) {
            return Err(SkolemError::MissingNext(i));
        }
        let (later, now): (Vec<Literal>, Vec<Literal>) =
            items.iter().cloned().partition(Literal::mentions_next);
        for item in now {
            clauses.push(HornClause::implies(c.body.clone(), item));
        }
        let enabled = Assertion::or_all(retained.iter().map(|cmd| cmd.guard.clone()));
        if !enabled.is_true() {
            clauses.push(HornClause::implies(c.body.clone(), Literal::Constraint(enabled)));
        }
        let later: Vec<Literal> = later.into_iter().filter(|l| *l != Literal::Next).collect();
        for cmd in &retained {
            let mut body = c.body.clone();
            if !cmd.guard.is_true() {
                body.push(Literal::Constraint(cmd.guard.clone()));
            }
            body.push(Literal::Step(StepLit { site: cmd.site, havoc_fill: tpl.fill_for(cand, cmd.site) }));
            clauses.push(HornClause::new(body, Head::Conj(later.clone())));
        }
    }
    Ok(cs.with_parts(cs.decls().to_vec(), clauses, cs.wf_marks().to_vec())?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::parse_system;

    #[test]
    fn deterministic_system_has_empty_report() {
        let ts = parse_system(
            "(system (vars (x Int)) (init true) (trans (rule (< x 3) ((x (+ x 1)))) (rule (>= x 3) ((x 0)))))",
        )
        .unwrap();
        assert!(find_nondet(&ts).is_empty());
    }

    #[test]
    fn havoc_site_reported() {
        let ts = parse_system(
            "(system (vars (w Int) (pc Int)) (init true) (trans (rule (= pc 2) ((pc 3) (w *)))))",
        )
        .unwrap();
        let r = find_nondet(&ts);
        assert_eq!(r.havoc_sites, vec![(0, vec!["w".to_string()])]);
        let tpl = build_template(&r, &ts, SkolemConfig::default());
        let first: Vec<String> = tpl.candidates().take(3).map(|c| c.updates[0].to_string()).collect();
        assert_eq!(first, ["0", "-1", "1"]);
        assert_eq!(tpl.candidates().count(), 5 * 5 * 11);
    }

    #[test]
    fn small_first_order() {
        assert_eq!(small_first((-2, 2)), vec![0, -1, 1, -2, 2]);
    }
}
