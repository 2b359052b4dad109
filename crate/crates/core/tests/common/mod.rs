#![allow(dead_code)]

use std::sync::Arc;

use ctlhorn::finite::FiniteInstance;
use ctlhorn::frontend::parse_system;
use ctlhorn::{Assertion, BinaryOp, CmpOp, CtlFormula, LinExpr, TransitionSystem, UnaryOp, Var};
use proptest::prelude::*;

pub const WLOOP: &str = include_str!("../../../../fixtures/wloop.ts");

pub fn wloop() -> Arc<TransitionSystem> {
    Arc::new(parse_system(WLOOP).unwrap())
}

/// Maximal paths from `s`, cut at the first repeated state: the path and,
/// for a lasso, the index the last state loops back to.
fn maximal_paths(inst: &FiniteInstance, s: usize, out: &mut Vec<(Vec<usize>, Option<usize>)>) {
    fn go(inst: &FiniteInstance, path: &mut Vec<usize>, out: &mut Vec<(Vec<usize>, Option<usize>)>) {
        let last = *path.last().unwrap();
        let succ = inst.successors(last);
        if succ.is_empty() {
            out.push((path.clone(), None));
            return;
        }
        for &t in succ {
            let t = t as usize;
            if let Some(i) = path.iter().position(|&p| p == t) {
                out.push((path.clone(), Some(i)));
            } else {
                path.push(t);
                go(inst, path, out);
                path.pop();
            }
        }
    }
    go(inst, &mut vec![s], out);
}

/// `G q` on a path: every visited state satisfies `q`; finite paths count.
fn path_g(path: &[usize], lasso: Option<usize>, q: &[bool]) -> Option<bool> {
    let all = path.iter().all(|&s| q[s]);
    match lasso {
        Some(_) => Some(all),
        // EG needs an infinite path; AG accepts a finite one
        None => {
            if all {
                None
            } else {
                Some(false)
            }
        }
    }
}

/// `q U r` on a path: (strict, weak). The weak reading accepts a finite
/// maximal path that never meets `r`, with no demand on its stuck last
/// state, which is how the universal until treats stuck states.
fn path_u(path: &[usize], finite: bool, q: &[bool], r: &[bool]) -> (bool, bool) {
    for (i, &s) in path.iter().enumerate() {
        if r[s] {
            return (true, true);
        }
        if !q[s] {
            return (false, finite && i + 1 == path.len());
        }
    }
    (false, finite)
}

/// State labels of `f` by path enumeration; independent of the fixpoint
/// model checker. Meant for instances of a handful of states.
pub fn brute_sat(inst: &FiniteInstance, f: &CtlFormula) -> Vec<bool> {
    let n = inst.num_states();
    let each = |pred: &dyn Fn(usize) -> bool| (0..n).map(pred).collect::<Vec<bool>>();
    let paths = |s: usize| {
        let mut out = Vec::new();
        maximal_paths(inst, s, &mut out);
        out
    };
    match f {
        CtlFormula::Atom(a) => each(&|s| inst.eval(a, s, None)),
        CtlFormula::And(l, r) => {
            let (l, r) = (brute_sat(inst, l), brute_sat(inst, r));
            each(&|s| l[s] && r[s])
        }
        CtlFormula::Or(l, r) => {
            let (l, r) = (brute_sat(inst, l), brute_sat(inst, r));
            each(&|s| l[s] || r[s])
        }
        CtlFormula::Implies(c, g) => {
            let g = brute_sat(inst, g);
            each(&|s| !inst.eval(c, s, None) || g[s])
        }
        CtlFormula::EX(g) => {
            let g = brute_sat(inst, g);
            each(&|s| inst.successors(s).iter().any(|&t| g[t as usize]))
        }
        CtlFormula::AX(g) => {
            let g = brute_sat(inst, g);
            each(&|s| inst.successors(s).iter().all(|&t| g[t as usize]))
        }
        CtlFormula::EG(g) => {
            let g = brute_sat(inst, g);
            each(&|s| paths(s).iter().any(|(p, l)| path_g(p, *l, &g) == Some(true)))
        }
        CtlFormula::AG(g) => {
            let g = brute_sat(inst, g);
            each(&|s| paths(s).iter().all(|(p, l)| path_g(p, *l, &g) != Some(false)))
        }
        CtlFormula::EF(g) => {
            brute_sat(inst, &CtlFormula::binary(BinaryOp::EU, CtlFormula::tt(), (**g).clone()))
        }
        CtlFormula::AF(g) => {
            brute_sat(inst, &CtlFormula::binary(BinaryOp::AU, CtlFormula::tt(), (**g).clone()))
        }
        CtlFormula::EU(q, r) => {
            let (q, r) = (brute_sat(inst, q), brute_sat(inst, r));
            each(&|s| paths(s).iter().any(|(p, l)| path_u(p, l.is_none(), &q, &r).0))
        }
        CtlFormula::AU(q, r) => {
            let (q, r) = (brute_sat(inst, q), brute_sat(inst, r));
            each(&|s| paths(s).iter().all(|(p, l)| path_u(p, l.is_none(), &q, &r).1))
        }
    }
}

pub fn brute_holds(inst: &FiniteInstance, f: &CtlFormula) -> bool {
    let sat = brute_sat(inst, f);
    inst.initial_states().all(|s| sat[s])
}

fn var(name: &str) -> LinExpr {
    LinExpr::var(Var::state(name))
}

/// Comparisons over `pc` and `x` with small constants.
pub fn atom() -> impl Strategy<Value = Assertion> {
    let op = prop_oneof![Just(CmpOp::Lt), Just(CmpOp::Le), Just(CmpOp::Eq), Just(CmpOp::Ge), Just(CmpOp::Gt)];
    let lhs = prop_oneof![
        Just(var("pc")),
        Just(var("x")),
        Just(var("x").add(&var("pc"))),
        Just(var("x").sub(&var("pc"))),
    ];
    (op, lhs, -1i64..6).prop_map(|(op, l, k)| Assertion::cmp(op, l, LinExpr::constant(k)))
}

fn unary_op() -> impl Strategy<Value = UnaryOp> {
    prop_oneof![
        Just(UnaryOp::AX),
        Just(UnaryOp::EX),
        Just(UnaryOp::AG),
        Just(UnaryOp::EG),
        Just(UnaryOp::AF),
        Just(UnaryOp::EF)
    ]
}

/// Formulas over `pc` and `x`. `until` admits AU/EU with arbitrary left
/// operands; without it the only eventualities are AF/EF.
pub fn formula(until: bool) -> impl Strategy<Value = CtlFormula> {
    let leaf = prop_oneof![
        4 => atom().prop_map(CtlFormula::atom),
        1 => Just(CtlFormula::tt()),
    ];
    leaf.prop_recursive(4, 16, 2, move |inner| {
        let bin = if until {
            prop_oneof![Just(BinaryOp::And), Just(BinaryOp::Or), Just(BinaryOp::AU), Just(BinaryOp::EU)]
                .boxed()
        } else {
            prop_oneof![Just(BinaryOp::And), Just(BinaryOp::Or)].boxed()
        };
        prop_oneof![
            (unary_op(), inner.clone()).prop_map(|(op, f)| CtlFormula::unary(op, f)),
            (bin, inner.clone(), inner.clone()).prop_map(|(op, l, r)| CtlFormula::binary(op, l, r)),
            (atom(), inner).prop_map(|(a, f)| CtlFormula::Implies(a, Box::new(f))),
        ]
    })
}
