//! Explicit interpretations of predicate symbols and exact clause checking.

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use crate::ir::{ConstraintSystem, CtlFormula, Head, HornClause, Literal, PredApp, Role, Tuple};

use super::mc::{au_layers, eu_layers, mc_ctl, StateSet};
use super::FiniteInstance;

/// Interpretation of every declared symbol: a state set for unary symbols,
/// a set of state pairs for binary ones.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CandidateSolution {
    pub sets: BTreeMap<String, StateSet>,
    pub relations: BTreeMap<String, HashSet<(u32, u32)>>,
}

impl CandidateSolution {
    fn lookup(&self, app: &PredApp, s: usize, t: Option<usize>) -> bool {
        match app.args.as_slice() {
            [Tuple::Current, Tuple::Next] => match (t, self.relations.get(&app.name)) {
                (Some(t), Some(rel)) => rel.contains(&(s as u32, t as u32)),
                _ => false,
            },
            [tuple] => {
                let idx = match tuple {
                    Tuple::Current => s,
                    Tuple::Next => match t {
                        Some(t) => t,
                        None => return false,
                    },
                };
                self.sets.get(&app.name).is_some_and(|set| set[idx])
            }
            _ => false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FailureSite {
    Clause(usize),
    Wf(String),
}

impl fmt::Display for FailureSite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FailureSite::Clause(i) => write!(f, "clause {i}"),
            FailureSite::Wf(name) => write!(f, "wf({name})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CheckResult {
    Valid,
    /// The violated clause or wf condition and the offending states (for
    /// wf, a cycle).
    FailingClause {
        site: FailureSite,
        witness: Vec<usize>,
    },
}

impl CheckResult {
    pub fn is_valid(&self) -> bool {
        matches!(self, CheckResult::Valid)
    }
}

struct Eval<'a> {
    inst: &'a FiniteInstance,
    cs: &'a ConstraintSystem,
    cand: &'a CandidateSolution,
}

impl Eval<'_> {
    fn literal(&self, lit: &Literal, s: usize, t: Option<usize>) -> bool {
        match lit {
            Literal::Init => self.inst.is_initial(s),
            Literal::Next => t.is_some_and(|t| self.inst.successors(s).binary_search(&(t as u32)).is_ok()),
            Literal::Step(st) => t.is_some_and(|t| self.step_images(st, s).contains(&t)),
            Literal::Pred(app) => self.cand.lookup(app, s, t),
            Literal::NotPred(app) => !self.cand.lookup(app, s, t),
            Literal::Constraint(a) => self.inst.eval(a, s, t),
        }
    }

    fn step_images(&self, st: &crate::ir::StepLit, s: usize) -> Vec<usize> {
        let cmd = self.cs.system().command(st.site).expect("validated site");
        self.inst.images(&self.inst.decode(s), cmd, &st.havoc_fill)
    }

    /// Successor candidates to try for `v'` given the literals that mention it.
    fn next_range(&self, lits: &[&Literal], s: usize) -> Vec<usize> {
        if lits.iter().any(|l| matches!(l, Literal::Next)) {
            return self.inst.successors(s).iter().map(|&t| t as usize).collect();
        }
        if let Some(Literal::Step(st)) = lits.iter().find(|l| matches!(l, Literal::Step(_))) {
            return self.step_images(st, s);
        }
        (0..self.inst.num_states()).collect()
    }

    /// First failing valuation of a clause, if any.
    fn clause(&self, c: &HornClause) -> Option<Vec<usize>> {
        let (now, later): (Vec<&Literal>, Vec<&Literal>) = c.body.iter().partition(|l| !l.mentions_next());
        for s in 0..self.inst.num_states() {
            if !now.iter().all(|l| self.literal(l, s, None)) {
                continue;
            }
            match &c.head {
                Head::Conj(items) => {
                    let needs_next = !later.is_empty() || items.iter().any(|l| l.mentions_next());
                    if !needs_next {
                        if !items.iter().all(|l| self.literal(l, s, None)) {
                            return Some(vec![s]);
                        }
                        continue;
                    }
                    for t in self.next_range(&later, s) {
                        if later.iter().all(|l| self.literal(l, s, Some(t)))
                            && !items.iter().all(|l| self.literal(l, s, Some(t)))
                        {
                            return Some(vec![s, t]);
                        }
                    }
                }
                Head::Exists(items) => {
                    debug_assert!(later.is_empty(), "existential clause with primed body");
                    let refs: Vec<&Literal> = items.iter().collect();
                    let ok = self
                        .next_range(&refs, s)
                        .into_iter()
                        .any(|t| items.iter().all(|l| self.literal(l, s, Some(t))));
                    if !ok {
                        return Some(vec![s]);
                    }
                }
            }
        }
        None
    }
}

/// A cycle in the relation, if there is one.
pub fn find_cycle(rel: &HashSet<(u32, u32)>) -> Option<Vec<usize>> {
    let mut adj: BTreeMap<u32, Vec<u32>> = BTreeMap::new();
    for &(a, b) in rel {
        adj.entry(a).or_default().push(b);
    }
    // 0 = unvisited, 1 = on stack, 2 = done
    let mut color: BTreeMap<u32, u8> = BTreeMap::new();
    let roots: Vec<u32> = adj.keys().copied().collect();
    for root in roots {
        if color.get(&root).copied().unwrap_or(0) != 0 {
            continue;
        }
        let mut stack: Vec<(u32, usize)> = vec![(root, 0)];
        color.insert(root, 1);
        while let Some(&mut (node, ref mut i)) = stack.last_mut() {
            let succ = adj.get(&node).map(Vec::as_slice).unwrap_or(&[]);
            if *i < succ.len() {
                let next = succ[*i];
                *i += 1;
                match color.get(&next).copied().unwrap_or(0) {
                    0 => {
                        color.insert(next, 1);
                        stack.push((next, 0));
                    }
                    1 => {
                        let start = stack.iter().position(|&(n, _)| n == next).unwrap();
                        return Some(stack[start..].iter().map(|&(n, _)| n as usize).collect());
                    }
                    _ => {}
                }
            } else {
                color.insert(node, 2);
                stack.pop();
            }
        }
    }
    None
}

/// Evaluate every clause over all in-bounds valuations and check each
/// wf-marked relation for cycles.
pub fn check_clauses(inst: &FiniteInstance, cs: &ConstraintSystem, cand: &CandidateSolution) -> CheckResult {
    let ev = Eval { inst, cs, cand };
    for (i, c) in cs.clauses().iter().enumerate() {
        if let Some(witness) = ev.clause(c) {
            return CheckResult::FailingClause { site: FailureSite::Clause(i), witness };
        }
    }
    for w in cs.wf_marks() {
        let empty = HashSet::new();
        let rel = cand.relations.get(w).unwrap_or(&empty);
        if let Some(cycle) = find_cycle(rel) {
            return CheckResult::FailingClause { site: FailureSite::Wf(w.clone()), witness: cycle };
        }
    }
    CheckResult::Valid
}

fn layers(inst: &FiniteInstance, f: &CtlFormula) -> Option<Vec<Option<u32>>> {
    let n = inst.num_states();
    Some(match f {
        CtlFormula::EU(l, r) => eu_layers(inst, &mc_ctl(inst, l), &mc_ctl(inst, r)),
        CtlFormula::AU(l, r) => au_layers(inst, &mc_ctl(inst, l), &mc_ctl(inst, r)),
        CtlFormula::EF(g) => eu_layers(inst, &vec![true; n], &mc_ctl(inst, g)),
        CtlFormula::AF(g) => au_layers(inst, &vec![true; n], &mc_ctl(inst, g)),
        _ => return None,
    })
}

/// Transition pairs along which the layer strictly decreases.
fn decrease_pairs(inst: &FiniteInstance, layer: &[Option<u32>]) -> HashSet<(u32, u32)> {
    let mut rel = HashSet::new();
    for s in 0..inst.num_states() {
        let Some(ds) = layer[s] else { continue };
        for &t in inst.successors(s) {
            if matches!(layer[t as usize], Some(dt) if dt < ds) {
                rel.insert((s as u32, t));
            }
        }
    }
    rel
}

/// Interpretation of one symbol from its recorded meaning: the denotation
/// of the formula for state sets, the left disjunct for selectors, and
/// layer decrease toward the until target for ranks.
pub fn canonical_interpretation(
    inst: &FiniteInstance,
    role: Role,
    meaning: Option<&CtlFormula>,
    cand: &mut CandidateSolution,
    name: &str,
) {
    let n = inst.num_states();
    match (role, meaning) {
        (Role::Rank, Some(f)) => {
            let rel = layers(inst, f).map(|l| decrease_pairs(inst, &l)).unwrap_or_default();
            cand.relations.insert(name.to_string(), rel);
        }
        (Role::Rank, None) => {
            cand.relations.insert(name.to_string(), HashSet::new());
        }
        (Role::Selector, Some(CtlFormula::Or(l, _))) => {
            cand.sets.insert(name.to_string(), mc_ctl(inst, l));
        }
        (Role::AuxP | Role::Invariant | Role::Selector, Some(f)) => {
            cand.sets.insert(name.to_string(), mc_ctl(inst, f));
        }
        _ => {
            cand.sets.insert(name.to_string(), vec![false; n]);
        }
    }
}

/// Assign every symbol its canonical interpretation.
pub fn construct_candidate(inst: &FiniteInstance, cs: &ConstraintSystem) -> CandidateSolution {
    let mut cand = CandidateSolution::default();
    for d in cs.decls() {
        canonical_interpretation(inst, d.role, d.meaning.as_ref(), &mut cand, &d.name);
    }
    cand
}

/// For systems without existential heads: fix symbols that never occur
/// positively in a head to their canonical interpretation, compute the
/// least interpretation of the others, then check.
pub fn solve_least(inst: &FiniteInstance, cs: &ConstraintSystem) -> Result<CandidateSolution, CheckResult> {
    assert!(!cs.has_exists(), "solve_least needs a universal system");
    let n = inst.num_states();
    let defined: HashSet<&str> = cs
        .clauses()
        .iter()
        .flat_map(|c| c.head.items())
        .filter_map(|l| match l {
            Literal::Pred(p) => Some(p.name.as_str()),
            _ => None,
        })
        .collect();
    let mut cand = CandidateSolution::default();
    for d in cs.decls() {
        if defined.contains(d.name.as_str()) {
            if d.arity == 2 {
                cand.relations.insert(d.name.clone(), HashSet::new());
            } else {
                cand.sets.insert(d.name.clone(), vec![false; n]);
            }
        } else {
            canonical_interpretation(inst, d.role, d.meaning.as_ref(), &mut cand, &d.name);
        }
    }
    loop {
        let mut additions: Vec<(PredApp, usize, Option<usize>)> = Vec::new();
        {
            let ev = Eval { inst, cs, cand: &cand };
            for c in cs.clauses() {
                let heads: Vec<&PredApp> = c
                    .head
                    .items()
                    .iter()
                    .filter_map(|l| match l {
                        Literal::Pred(p) => Some(p),
                        _ => None,
                    })
                    .collect();
                if heads.is_empty() {
                    continue;
                }
                let (now, later): (Vec<&Literal>, Vec<&Literal>) =
                    c.body.iter().partition(|l| !l.mentions_next());
                let needs_next = !later.is_empty() || heads.iter().any(|p| p.mentions_next());
                for s in 0..n {
                    if !now.iter().all(|l| ev.literal(l, s, None)) {
                        continue;
                    }
                    let ts: Vec<Option<usize>> = if needs_next {
                        ev.next_range(&later, s).into_iter().map(Some).collect()
                    } else {
                        vec![None]
                    };
                    for t in ts {
                        if t.is_some() && !later.iter().all(|l| ev.literal(l, s, t)) {
                            continue;
                        }
                        for p in &heads {
                            if !cand.lookup(p, s, t) {
                                additions.push(((*p).clone(), s, t));
                            }
                        }
                    }
                }
            }
        }
        if additions.is_empty() {
            break;
        }
        for (p, s, t) in additions {
            match p.args.as_slice() {
                [Tuple::Current, Tuple::Next] => {
                    cand.relations
                        .get_mut(&p.name)
                        .expect("declared")
                        .insert((s as u32, t.expect("pair") as u32));
                }
                [Tuple::Current] => cand.sets.get_mut(&p.name).expect("declared")[s] = true,
                [Tuple::Next] => cand.sets.get_mut(&p.name).expect("declared")[t.expect("next")] = true,
                _ => {}
            }
        }
    }
    match check_clauses(inst, cs, &cand) {
        CheckResult::Valid => Ok(cand),
        failure => Err(failure),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cycles_are_found() {
        let rel: HashSet<(u32, u32)> = [(0, 1), (1, 2), (2, 1)].into_iter().collect();
        let cycle = find_cycle(&rel).unwrap();
        assert_eq!(cycle.len(), 2);
        let dag: HashSet<(u32, u32)> = [(0, 1), (1, 2), (0, 2)].into_iter().collect();
        assert!(find_cycle(&dag).is_none());
        let self_loop: HashSet<(u32, u32)> = [(3, 3)].into_iter().collect();
        assert_eq!(find_cycle(&self_loop), Some(vec![3]));
    }
}
