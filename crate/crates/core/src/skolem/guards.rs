//! Assertion guesses for unknowns that occur negated in clause bodies.
//!
//! A body literal `¬r(v)` has no Horn encoding. For a negated auxiliary
//! predicate, a guessed assertion `g` turns `B ∧ ¬r → H` into `B ∧ g → r`
//! and `B ∧ ¬g → H`; any solution of the pair solves the original clause.
//! A disjunction selector is replaced by `g` outright.

use std::collections::BTreeSet;

use crate::ir::{Assertion, ConstraintSystem, CtlFormula, Head, HornClause, Literal, PredApp, Role, Tuple};

use super::SkolemError;

/// Options tried per slot, at most.
const MAX_OPTIONS: usize = 6;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GuardSlot {
    pub pred: String,
    pub role: Role,
    pub options: Vec<Assertion>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GuardTemplate {
    pub slots: Vec<GuardSlot>,
}

/// The formula with temporal sub-formulas replaced by `fill`.
fn skeleton(f: &CtlFormula, fill: bool) -> Assertion {
    let temporal = || if fill { Assertion::tt() } else { Assertion::ff() };
    match f {
        CtlFormula::Atom(a) => a.clone(),
        CtlFormula::And(l, r) => Assertion::and_all([skeleton(l, fill), skeleton(r, fill)]),
        CtlFormula::Or(l, r) => Assertion::or_all([skeleton(l, fill), skeleton(r, fill)]),
        CtlFormula::Implies(a, g) => Assertion::or_all([a.negate(), skeleton(g, fill)]),
        _ => temporal(),
    }
}

fn options_for(f: &CtlFormula) -> Vec<Assertion> {
    let mut out: Vec<Assertion> = Vec::new();
    let mut seen = BTreeSet::new();
    let mut push = |a: Assertion| {
        if seen.insert(a.canonical()) {
            out.push(a);
        }
    };
    push(skeleton(f, true));
    push(skeleton(f, false));
    let mut atoms = Vec::new();
    f.for_each_assertion(&mut |a| atoms.push(a.clone()));
    atoms.into_iter().for_each(&mut push);
    push(Assertion::tt());
    push(Assertion::ff());
    out.truncate(MAX_OPTIONS);
    out
}

fn negated_preds(cs: &ConstraintSystem) -> BTreeSet<&str> {
    cs.clauses()
        .iter()
        .flat_map(|c| c.body.iter())
        .filter_map(|l| match l {
            Literal::NotPred(p) => Some(p.name.as_str()),
            _ => None,
        })
        .collect()
}

impl GuardTemplate {
    /// One slot per selector still present and per auxiliary predicate that
    /// occurs negated.
    pub fn new(cs: &ConstraintSystem) -> Self {
        let negated = negated_preds(cs);
        let slots = cs
            .decls()
            .iter()
            .filter_map(|d| {
                let options = match (d.role, &d.meaning) {
                    (Role::Selector, Some(CtlFormula::Or(l, _))) => options_for(l),
                    (Role::Selector, _) => vec![Assertion::tt(), Assertion::ff()],
                    (Role::AuxP, Some(f)) if negated.contains(d.name.as_str()) => options_for(f),
                    (Role::AuxP, None) if negated.contains(d.name.as_str()) => {
                        vec![Assertion::tt(), Assertion::ff()]
                    }
                    _ => return None,
                };
                Some(GuardSlot { pred: d.name.clone(), role: d.role, options })
            })
            .collect();
        GuardTemplate { slots }
    }

    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }

    /// Every table of option indices, first slot slowest.
    pub fn candidates(&self) -> impl Iterator<Item = Vec<usize>> + '_ {
        let mut digits = vec![0usize; self.slots.len()];
        let mut done = self.slots.iter().any(|s| s.options.is_empty());
        std::iter::from_fn(move || {
            if done {
                return None;
            }
            let out = digits.clone();
            done = true;
            for i in (0..digits.len()).rev() {
                digits[i] += 1;
                if digits[i] < self.slots[i].options.len() {
                    done = false;
                    break;
                }
                digits[i] = 0;
            }
            Some(out)
        })
    }

    /// `case(sel1) := ...` for selectors, `guard(p1) := ...` for negated
    /// predicates.
    pub fn describe(&self, choice: &[usize]) -> Vec<String> {
        self.slots
            .iter()
            .zip(choice)
            .map(|(s, &i)| {
                let kind = if s.role == Role::Selector { "case" } else { "guard" };
                format!("{kind}({}) := {}", s.pred, s.options[i])
            })
            .collect()
    }

    pub fn apply(&self, cs: &ConstraintSystem, choice: &[usize]) -> Result<ConstraintSystem, SkolemError> {
        if choice.len() != self.slots.len()
            || self.slots.iter().zip(choice).any(|(s, &i)| i >= s.options.len())
        {
            return Err(SkolemError::OutOfDomain("guard table".into()));
        }
        if self.is_empty() {
            return Ok(cs.clone());
        }
        let chosen = |name: &str| -> Option<(&GuardSlot, &Assertion)> {
            let k = self.slots.iter().position(|s| s.pred == name)?;
            Some((&self.slots[k], &self.slots[k].options[choice[k]]))
        };
        let at = |g: &Assertion, app: &PredApp| match app.args.as_slice() {
            [Tuple::Next] => g.primed(),
            _ => g.clone(),
        };
        let selector = |l: &Literal| -> Literal {
            let (app, positive) = match l {
                Literal::Pred(p) => (p, true),
                Literal::NotPred(p) => (p, false),
                other => return other.clone(),
            };
            match chosen(&app.name) {
                Some((slot, g)) if slot.role == Role::Selector => {
                    let a = at(g, app);
                    Literal::Constraint(if positive { a } else { a.negate() })
                }
                _ => l.clone(),
            }
        };
        let mut clauses = Vec::new();
        for c in cs.clauses() {
            let mut body: Vec<Literal> = c.body.iter().map(selector).collect();
            let head = match &c.head {
                Head::Conj(items) => Head::Conj(items.iter().map(selector).collect()),
                Head::Exists(items) => Head::Exists(items.iter().map(selector).collect()),
            };
            // split on every negated predicate left in the body
            while let Some(pos) = body.iter().position(|l| matches!(l, Literal::NotPred(_))) {
                let Literal::NotPred(app) = body.remove(pos) else { unreachable!() };
                let Some((_, g)) = chosen(&app.name) else {
                    body.insert(pos, Literal::NotPred(app));
                    break;
                };
                let g = at(g, &app);
                let mut guarded = body.clone();
                guarded.push(Literal::Constraint(g.clone()));
                clauses.push(HornClause::implies(guarded, Literal::Pred(app)));
                body.push(Literal::Constraint(g.negate()));
            }
            clauses.push(HornClause::new(body, head));
        }
        let decls = cs
            .decls()
            .iter()
            .filter(|d| !matches!(chosen(&d.name), Some((s, _)) if s.role == Role::Selector))
            .cloned()
            .collect();
        Ok(cs.with_parts(decls, clauses, cs.wf_marks().to_vec())?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::{normalize, parse_ctl, parse_system};
    use crate::proofsys::{generate, inline_assertions};
    use std::sync::Arc;

    fn system() -> Arc<crate::ir::TransitionSystem> {
        Arc::new(
            parse_system("(system (vars (x Int)) (init (= x 0)) (trans (rule (< x 3) ((x (+ x 1))))))")
                .unwrap(),
        )
    }

    fn prepared(f: &str) -> ConstraintSystem {
        inline_assertions(&generate(system(), &normalize(&parse_ctl(f).unwrap())).unwrap()).unwrap()
    }

    #[test]
    fn negated_aux_gets_guesses() {
        let cs = prepared("EF(x = 2 && EG(x >= 0))");
        let tpl = GuardTemplate::new(&cs);
        assert_eq!(tpl.slots.len(), 1);
        assert_eq!(tpl.slots[0].options[0].to_string(), "x = 2");
        for choice in tpl.candidates() {
            let out = tpl.apply(&cs, &choice).unwrap();
            assert!(out.clauses().iter().all(|c| !c.body.iter().any(|l| matches!(l, Literal::NotPred(_)))));
        }
    }

    #[test]
    fn selector_is_replaced() {
        let cs = prepared("AG(x <= 3) || AF(x = 9)");
        let tpl = GuardTemplate::new(&cs);
        assert!(tpl.slots.iter().any(|s| s.role == Role::Selector));
        let out = tpl.apply(&cs, &vec![0; tpl.slots.len()]).unwrap();
        assert!(out.decls().iter().all(|d| d.role != Role::Selector));
    }

    #[test]
    fn nothing_to_guess() {
        let cs = prepared("AG(EF(x >= 1))");
        assert!(GuardTemplate::new(&cs).is_empty());
        assert_eq!(GuardTemplate::new(&cs).candidates().count(), 1);
    }
}
