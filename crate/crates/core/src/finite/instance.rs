use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use crate::ir::{Assertion, GuardedCommand, LinExpr, TransitionSystem, Update, Var};

use super::FiniteError;

pub const DEFAULT_STATE_CAP: usize = 100_000;

/// A transition system restricted to a box of integer valuations.
///
/// With `clamp` set, updates that leave the box saturate at its edge, so
/// every enabled command keeps a successor; otherwise such transitions
/// are dropped.
#[derive(Debug, Clone)]
pub struct FiniteInstance {
    ts: Arc<TransitionSystem>,
    bounds: Vec<(i64, i64)>,
    clamp: bool,
    n_states: usize,
    succ: Vec<Vec<u32>>,
    init: Vec<bool>,
}

impl FiniteInstance {
    pub fn new(
        ts: Arc<TransitionSystem>,
        bounds: Vec<(i64, i64)>,
        clamp: bool,
        cap: usize,
    ) -> Result<Self, FiniteError> {
        if bounds.len() != ts.vars().len() {
            return Err(FiniteError::Bounds(format!(
                "{} bounds for {} variables",
                bounds.len(),
                ts.vars().len()
            )));
        }
        let mut n: usize = 1;
        for (name, &(lo, hi)) in ts.vars().iter().zip(&bounds) {
            if lo > hi {
                return Err(FiniteError::Bounds(format!("empty range {lo}..{hi} for {name}")));
            }
            let width = usize::try_from(hi - lo + 1).unwrap_or(usize::MAX);
            n = n.saturating_mul(width);
        }
        if n > cap {
            return Err(FiniteError::StateCap { states: n, cap });
        }
        let mut inst = FiniteInstance { ts, bounds, clamp, n_states: n, succ: Vec::new(), init: Vec::new() };
        let mut succ = Vec::with_capacity(n);
        let mut init = Vec::with_capacity(n);
        for s in 0..n {
            let vals = inst.decode(s);
            init.push(eval_state(inst.ts.init(), inst.ts.vars(), &vals));
            let mut out = BTreeSet::new();
            for c in inst.ts.commands() {
                if eval_state(&c.guard, inst.ts.vars(), &vals) {
                    out.extend(inst.images(&vals, c, &BTreeMap::new()));
                }
            }
            succ.push(out.into_iter().map(|t| t as u32).collect());
        }
        inst.succ = succ;
        inst.init = init;
        Ok(inst)
    }

    /// Bounds from `explicit`, with unlisted variables given a range around
    /// the constants the system mentions.
    pub fn with_inferred_bounds(
        ts: Arc<TransitionSystem>,
        explicit: &BTreeMap<String, (i64, i64)>,
        clamp: bool,
        cap: usize,
    ) -> Result<Self, FiniteError> {
        for name in explicit.keys() {
            if ts.var_index(name).is_none() {
                return Err(FiniteError::Bounds(format!("bound for unknown variable `{name}`")));
            }
        }
        let bounds = infer_bounds(&ts, explicit);
        FiniteInstance::new(ts, bounds, clamp, cap)
    }

    pub fn system(&self) -> &TransitionSystem {
        &self.ts
    }

    pub fn system_arc(&self) -> &Arc<TransitionSystem> {
        &self.ts
    }

    pub fn bounds(&self) -> &[(i64, i64)] {
        &self.bounds
    }

    pub fn num_states(&self) -> usize {
        self.n_states
    }

    pub fn successors(&self, s: usize) -> &[u32] {
        &self.succ[s]
    }

    pub fn is_initial(&self, s: usize) -> bool {
        self.init[s]
    }

    pub fn initial_states(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.n_states).filter(|&s| self.init[s])
    }

    /// Mixed-radix decoding, first variable most significant.
    pub fn decode(&self, mut s: usize) -> Vec<i64> {
        let mut vals = vec![0; self.bounds.len()];
        for (i, &(lo, hi)) in self.bounds.iter().enumerate().rev() {
            let width = (hi - lo + 1) as usize;
            vals[i] = lo + (s % width) as i64;
            s /= width;
        }
        vals
    }

    /// Index of an in-bounds valuation.
    pub fn encode(&self, vals: &[i64]) -> Option<usize> {
        let mut s = 0usize;
        for (&v, &(lo, hi)) in vals.iter().zip(&self.bounds) {
            if v < lo || v > hi {
                return None;
            }
            s = s * (hi - lo + 1) as usize + (v - lo) as usize;
        }
        Some(s)
    }

    fn fit(&self, i: usize, v: i64) -> Option<i64> {
        let (lo, hi) = self.bounds[i];
        if self.clamp {
            Some(v.clamp(lo, hi))
        } else {
            (lo..=hi).contains(&v).then_some(v)
        }
    }

    /// States reached by the update of `cmd` from `vals`, ignoring its guard.
    /// Havocked variables range over their bounds unless fixed by `fill`.
    pub fn images(&self, vals: &[i64], cmd: &GuardedCommand, fill: &BTreeMap<String, LinExpr>) -> Vec<usize> {
        let vars = self.ts.vars();
        let env = state_env(vars, vals);
        let mut choices: Vec<Vec<i64>> = Vec::with_capacity(vars.len());
        for (i, (name, upd)) in vars.iter().zip(&cmd.updates).enumerate() {
            let expr = match upd {
                Update::Expr(e) => Some(e),
                Update::Havoc => fill.get(name),
            };
            match expr {
                Some(e) => match e.eval(&env).and_then(|v| self.fit(i, v)) {
                    Some(v) => choices.push(vec![v]),
                    None => return Vec::new(),
                },
                None => {
                    let (lo, hi) = self.bounds[i];
                    choices.push((lo..=hi).collect());
                }
            }
        }
        let mut out = Vec::new();
        let mut cur = vec![0i64; vars.len()];
        product(&choices, 0, &mut cur, &mut |v| out.push(self.encode(v).expect("in bounds")));
        out
    }

    /// Evaluate an assertion over `(s, t)`; primed variables read `t`.
    pub fn eval(&self, a: &Assertion, s: usize, t: Option<usize>) -> bool {
        let sv = self.decode(s);
        let tv = t.map(|t| self.decode(t));
        let vars = self.ts.vars();
        let env = |v: &Var| -> Option<i64> {
            let i = vars.iter().position(|n| *n == v.name)?;
            if v.is_primed() {
                tv.as_ref().map(|tv| tv[i])
            } else {
                Some(sv[i])
            }
        };
        a.eval(&env).unwrap_or(false)
    }

    /// The set of states satisfying a state assertion.
    pub fn states_where(&self, a: &Assertion) -> Vec<bool> {
        (0..self.n_states).map(|s| self.eval(a, s, None)).collect()
    }

    pub fn format_state(&self, s: usize) -> String {
        let vals = self.decode(s);
        let parts: Vec<String> = self.ts.vars().iter().zip(vals).map(|(n, v)| format!("{n}={v}")).collect();
        format!("({})", parts.join(", "))
    }
}

fn product(choices: &[Vec<i64>], i: usize, cur: &mut Vec<i64>, f: &mut dyn FnMut(&[i64])) {
    if i == choices.len() {
        f(cur);
        return;
    }
    for &v in &choices[i] {
        cur[i] = v;
        product(choices, i + 1, cur, f);
    }
}

fn state_env<'a>(vars: &'a [String], vals: &'a [i64]) -> impl Fn(&Var) -> Option<i64> + 'a {
    move |v: &Var| {
        if v.is_primed() {
            return None;
        }
        vars.iter().position(|n| *n == v.name).map(|i| vals[i])
    }
}

fn eval_state(a: &Assertion, vars: &[String], vals: &[i64]) -> bool {
    a.eval(&state_env(vars, vals)).unwrap_or(false)
}

/// Per-variable range: explicit bounds where given, otherwise the span of
/// constants compared against or assigned to the variable, widened by 2.
pub fn infer_bounds(ts: &TransitionSystem, explicit: &BTreeMap<String, (i64, i64)>) -> Vec<(i64, i64)> {
    let mut consts: BTreeMap<String, Vec<i64>> = BTreeMap::new();
    let mut note_atoms = |a: &Assertion| {
        let mut stack = vec![a];
        while let Some(a) = stack.pop() {
            match a {
                Assertion::Cmp(_, l, r) => {
                    let diff = l.sub(r);
                    let k = -diff.constant_part();
                    for (v, c) in diff.terms() {
                        if c != 0 && k % c == 0 {
                            consts.entry(v.name.clone()).or_default().push(k / c);
                        }
                    }
                }
                Assertion::Not(x) => stack.push(x),
                Assertion::And(xs) | Assertion::Or(xs) => stack.extend(xs),
                Assertion::Bool(_) => {}
            }
        }
    };
    note_atoms(ts.init());
    for c in ts.commands() {
        note_atoms(&c.guard);
    }
    for c in ts.commands() {
        for (name, u) in ts.vars().iter().zip(&c.updates) {
            if let Update::Expr(e) = u {
                if let Some(k) = e.as_constant() {
                    consts.entry(name.clone()).or_default().push(k);
                }
            }
        }
    }
    ts.vars()
        .iter()
        .map(|name| {
            if let Some(&b) = explicit.get(name) {
                return b;
            }
            match consts.get(name) {
                Some(ks) if !ks.is_empty() => {
                    let lo = *ks.iter().min().unwrap();
                    let hi = *ks.iter().max().unwrap();
                    (lo - 2, hi + 2)
                }
                _ => (-3, 3),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::parse_system;

    #[test]
    fn clamped_increment_saturates() {
        let ts =
            parse_system("(system (vars (x Int)) (init (= x 0)) (trans (rule true ((x (+ x 1))))))").unwrap();
        let inst = FiniteInstance::new(Arc::new(ts.clone()), vec![(0, 2)], true, 100).unwrap();
        assert_eq!(inst.successors(2), &[2]);
        let open = FiniteInstance::new(Arc::new(ts), vec![(0, 2)], false, 100).unwrap();
        assert!(open.successors(2).is_empty());
    }

    #[test]
    fn havoc_branches_over_bounds() {
        let ts =
            parse_system("(system (vars (x Int) (y Int)) (init true) (trans (rule true ((x *)))))").unwrap();
        let inst = FiniteInstance::new(Arc::new(ts), vec![(0, 2), (0, 1)], true, 100).unwrap();
        let s = inst.encode(&[1, 1]).unwrap();
        let succ: Vec<Vec<i64>> = inst.successors(s).iter().map(|&t| inst.decode(t as usize)).collect();
        assert_eq!(succ, vec![vec![0, 1], vec![1, 1], vec![2, 1]]);
    }

    #[test]
    fn state_cap_enforced() {
        let ts = parse_system("(system (vars (x Int)) (init true) (trans))").unwrap();
        let err = FiniteInstance::new(Arc::new(ts), vec![(0, 1000)], true, 10).unwrap_err();
        assert!(matches!(err, FiniteError::StateCap { .. }));
    }
}
