//! Constraint generation: one top-down pass over the formula, decomposing
//! nested satisfactions and emitting the clause schema of each basic rule.

use std::sync::Arc;

use thiserror::Error;

use crate::ir::{
    Assertion, ConstraintSystem, CtlFormula, Head, HornClause, IrError, Literal, PredApp, PredicateSymbol,
    Role, TransitionSystem,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProofError {
    #[error("formula is not normalized: `{0}` (run normalize first)")]
    NotNormalized(String),
    #[error("not a basic formula: `{0}`")]
    NotBasic(String),
    #[error(transparent)]
    Ir(#[from] IrError),
}

/// The set of states a satisfaction is about.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Pre {
    Init,
    Pred(String),
}

impl Pre {
    fn literal(&self) -> Literal {
        match self {
            Pre::Init => Literal::Init,
            Pre::Pred(p) => Literal::Pred(PredApp::current(p.clone())),
        }
    }
}

/// `(pre, next) ⊨ formula`; the transition relation lives in the context.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Satisfaction {
    pub pre: Pre,
    pub formula: CtlFormula,
}

/// Argument of a basic formula: an inlined assertion or an auxiliary predicate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Operand {
    Assert(Assertion),
    Pred(String),
}

impl Operand {
    fn is_true(&self) -> bool {
        matches!(self, Operand::Assert(a) if a.is_true())
    }

    fn holds_now(&self) -> Literal {
        match self {
            Operand::Assert(a) => Literal::Constraint(a.clone()),
            Operand::Pred(p) => Literal::Pred(PredApp::current(p.clone())),
        }
    }

    fn fails_now(&self) -> Literal {
        match self {
            Operand::Assert(a) => Literal::Constraint(a.negate()),
            Operand::Pred(p) => Literal::NotPred(PredApp::current(p.clone())),
        }
    }

    fn holds_next(&self) -> Literal {
        match self {
            Operand::Assert(a) => Literal::Constraint(a.primed()),
            Operand::Pred(p) => Literal::Pred(PredApp::next(p.clone())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BasicOp {
    AX,
    EX,
    AG,
    EG,
    AU,
    EU,
}

/// A single quantifier/operator pair over operands. For unary operators
/// `left` is `true` and unused.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Basic {
    pub pre: Pre,
    pub op: BasicOp,
    pub left: Operand,
    pub right: Operand,
    /// The source formula, recorded as the meaning of fresh `inv`/`rank`.
    pub meaning: CtlFormula,
}

/// Fresh-name counters and the accumulated output.
#[derive(Debug, Default)]
pub struct GenContext {
    n_p: usize,
    n_inv: usize,
    n_rank: usize,
    n_sel: usize,
    decls: Vec<PredicateSymbol>,
    clauses: Vec<HornClause>,
    wf_marks: Vec<String>,
}

impl GenContext {
    fn fresh(&mut self, role: Role, meaning: &CtlFormula) -> String {
        let (prefix, counter, arity) = match role {
            Role::AuxP => ("p", &mut self.n_p, 1),
            Role::Invariant => ("inv", &mut self.n_inv, 1),
            Role::Rank => ("rank", &mut self.n_rank, 2),
            Role::Selector => ("sel", &mut self.n_sel, 1),
            Role::Plumbing => ("aux", &mut self.n_p, 1),
        };
        *counter += 1;
        let name = format!("{prefix}{counter}");
        self.decls.push(PredicateSymbol { name: name.clone(), arity, role, meaning: Some(meaning.clone()) });
        name
    }

    fn emit(&mut self, body: Vec<Literal>, head: Head) {
        self.clauses.push(HornClause::new(body, head));
    }

    fn emit_implies(&mut self, body: Vec<Literal>, item: Literal) {
        self.clauses.push(HornClause::implies(body, item));
    }
}

/// A propositional sub-formula read as one assertion.
fn as_assertion(f: &CtlFormula) -> Option<Assertion> {
    match f {
        CtlFormula::Atom(a) => Some(a.clone()),
        CtlFormula::And(l, r) => Some(Assertion::And(vec![as_assertion(l)?, as_assertion(r)?])),
        CtlFormula::Or(l, r) => Some(Assertion::Or(vec![as_assertion(l)?, as_assertion(r)?])),
        _ => None,
    }
}

fn is_constant(f: &CtlFormula) -> Option<Assertion> {
    match f {
        CtlFormula::Atom(a) if a.is_true() || a.is_false() => Some(a.clone()),
        _ => None,
    }
}

/// Operand for a child of a temporal operator: constants are inlined, any
/// other child gets a fresh `p` and a nested satisfaction.
fn temporal_operand(ctx: &mut GenContext, child: &CtlFormula, nested: &mut Vec<Satisfaction>) -> Operand {
    match is_constant(child) {
        Some(a) => Operand::Assert(a),
        None => {
            let q = ctx.fresh(Role::AuxP, child);
            nested.push(Satisfaction { pre: Pre::Pred(q.clone()), formula: child.clone() });
            Operand::Pred(q)
        }
    }
}

/// Operand for a child of `∧`/`∨`: assertions are used directly.
fn boolean_operand(ctx: &mut GenContext, child: &CtlFormula, nested: &mut Vec<Satisfaction>) -> Operand {
    match as_assertion(child) {
        Some(a) => Operand::Assert(a),
        None => temporal_operand(ctx, child, nested),
    }
}

/// Split `(p, next) ⊨ f(ψ)` for a unary temporal `f` into the reduced
/// satisfaction over an operand and the nested satisfaction for `ψ`.
pub fn decompose_uni(
    ctx: &mut GenContext,
    sat: &Satisfaction,
) -> Result<(Basic, Vec<Satisfaction>), ProofError> {
    let (op, child) = match &sat.formula {
        CtlFormula::AX(g) => (BasicOp::AX, g),
        CtlFormula::EX(g) => (BasicOp::EX, g),
        CtlFormula::AG(g) => (BasicOp::AG, g),
        CtlFormula::EG(g) => (BasicOp::EG, g),
        other => return Err(ProofError::NotBasic(other.to_string())),
    };
    let mut nested = Vec::new();
    let right = temporal_operand(ctx, child, &mut nested);
    let basic = Basic {
        pre: sat.pre.clone(),
        op,
        left: Operand::Assert(Assertion::tt()),
        right,
        meaning: sat.formula.clone(),
    };
    Ok((basic, nested))
}

/// Split a binary node. Until yields a reduced satisfaction; `∧` and `∨`
/// emit their clauses directly and yield none.
pub fn decompose_bin(
    ctx: &mut GenContext,
    sat: &Satisfaction,
) -> Result<(Option<Basic>, Vec<Satisfaction>), ProofError> {
    let mut nested = Vec::new();
    let pre = sat.pre.literal();
    match &sat.formula {
        CtlFormula::AU(l, r) | CtlFormula::EU(l, r) => {
            let op = if matches!(sat.formula, CtlFormula::AU(..)) { BasicOp::AU } else { BasicOp::EU };
            let left = temporal_operand(ctx, l, &mut nested);
            let right = temporal_operand(ctx, r, &mut nested);
            let basic = Basic { pre: sat.pre.clone(), op, left, right, meaning: sat.formula.clone() };
            Ok((Some(basic), nested))
        }
        CtlFormula::And(l, r) => {
            let q1 = boolean_operand(ctx, l, &mut nested);
            let q2 = boolean_operand(ctx, r, &mut nested);
            ctx.emit_implies(vec![pre.clone()], q1.holds_now());
            ctx.emit_implies(vec![pre], q2.holds_now());
            Ok((None, nested))
        }
        CtlFormula::Or(l, r) => {
            let sel = ctx.fresh(Role::Selector, &sat.formula);
            let q1 = boolean_operand(ctx, l, &mut nested);
            let q2 = boolean_operand(ctx, r, &mut nested);
            let on = Literal::Pred(PredApp::current(sel.clone()));
            let off = Literal::NotPred(PredApp::current(sel));
            ctx.emit_implies(vec![pre.clone(), on], q1.holds_now());
            ctx.emit_implies(vec![pre, off], q2.holds_now());
            Ok((None, nested))
        }
        other => Err(ProofError::NotBasic(other.to_string())),
    }
}

/// Emit the clause schema of one basic rule.
pub fn gen_basic(ctx: &mut GenContext, b: &Basic) {
    let pre = b.pre.literal();
    let q = &b.right;
    match b.op {
        BasicOp::AX => ctx.emit_implies(vec![pre, Literal::Next], q.holds_next()),
        BasicOp::EX => ctx.emit(vec![pre], Head::Exists(vec![Literal::Next, q.holds_next()])),
        BasicOp::AG | BasicOp::EG => {
            let inv = ctx.fresh(Role::Invariant, &b.meaning);
            let now = Literal::Pred(PredApp::current(inv.clone()));
            let next = Literal::Pred(PredApp::next(inv));
            ctx.emit_implies(vec![pre], now.clone());
            if b.op == BasicOp::AG {
                ctx.emit_implies(vec![now.clone(), Literal::Next], next);
            } else {
                ctx.emit(vec![now.clone()], Head::Exists(vec![Literal::Next, next]));
            }
            ctx.emit_implies(vec![now], q.holds_now());
        }
        BasicOp::AU | BasicOp::EU => {
            let inv = ctx.fresh(Role::Invariant, &b.meaning);
            let rank = ctx.fresh(Role::Rank, &b.meaning);
            let now = Literal::Pred(PredApp::current(inv.clone()));
            let next = Literal::Pred(PredApp::next(inv));
            let step = Literal::Pred(PredApp::relation(rank.clone()));
            ctx.emit_implies(vec![pre], now.clone());
            let mut head = Vec::new();
            if !b.left.is_true() {
                head.push(b.left.holds_now());
            }
            if b.op == BasicOp::AU {
                head.extend([next, step]);
                ctx.emit(vec![now, q.fails_now(), Literal::Next], Head::Conj(head));
            } else {
                head.extend([Literal::Next, next, step]);
                ctx.emit(vec![now, q.fails_now()], Head::Exists(head));
            }
            ctx.wf_marks.push(rank);
        }
    }
}

fn descend(ctx: &mut GenContext, sat: Satisfaction) -> Result<(), ProofError> {
    if let Some(a) = as_assertion(&sat.formula) {
        ctx.emit_implies(vec![sat.pre.literal()], Literal::Constraint(a));
        return Ok(());
    }
    let nested = match &sat.formula {
        CtlFormula::Implies(..) | CtlFormula::AF(_) | CtlFormula::EF(_) => {
            return Err(ProofError::NotNormalized(sat.formula.to_string()))
        }
        CtlFormula::AX(_) | CtlFormula::EX(_) | CtlFormula::AG(_) | CtlFormula::EG(_) => {
            let (basic, nested) = decompose_uni(ctx, &sat)?;
            gen_basic(ctx, &basic);
            nested
        }
        _ => {
            let (basic, nested) = decompose_bin(ctx, &sat)?;
            if let Some(b) = basic {
                gen_basic(ctx, &b);
            }
            nested
        }
    };
    for n in nested {
        descend(ctx, n)?;
    }
    Ok(())
}

/// Constraints that are solvable iff every initial state of `ts` satisfies `f`.
pub fn generate(ts: Arc<TransitionSystem>, f: &CtlFormula) -> Result<ConstraintSystem, ProofError> {
    let mut ctx = GenContext::default();
    descend(&mut ctx, Satisfaction { pre: Pre::Init, formula: f.clone() })?;
    Ok(ConstraintSystem::new(ts, ctx.decls, ctx.clauses, ctx.wf_marks)?)
}

/// Replace auxiliary predicates that stand for an assertion, and selectors
/// with an assertion disjunct, by that assertion. Clauses that become
/// tautologies are dropped. Any solution of the result is a solution of the
/// input, and the canonical solution survives the substitution.
pub fn inline_assertions(cs: &ConstraintSystem) -> Result<ConstraintSystem, ProofError> {
    let mut subst: std::collections::BTreeMap<&str, Assertion> = Default::default();
    for d in cs.decls() {
        let a = match (d.role, &d.meaning) {
            (Role::AuxP, Some(f)) => as_assertion(f),
            (Role::Selector, Some(CtlFormula::Or(l, r))) => {
                as_assertion(l).or_else(|| as_assertion(r).map(|b| b.negate()))
            }
            _ => None,
        };
        if let Some(a) = a {
            subst.insert(d.name.as_str(), a);
        }
    }
    if subst.is_empty() {
        return Ok(cs.clone());
    }
    let rewrite = |l: &Literal| -> Literal {
        let (app, positive) = match l {
            Literal::Pred(p) => (p, true),
            Literal::NotPred(p) => (p, false),
            other => return other.clone(),
        };
        let Some(a) = subst.get(app.name.as_str()) else { return l.clone() };
        let a = if positive { a.clone() } else { a.negate() };
        match app.args.as_slice() {
            [crate::ir::Tuple::Next] => Literal::Constraint(a.primed()),
            _ => Literal::Constraint(a),
        }
    };
    let mut clauses = Vec::new();
    for c in cs.clauses() {
        let body: Vec<Literal> = c
            .body
            .iter()
            .map(rewrite)
            .filter(|l| !matches!(l, Literal::Constraint(a) if a.is_true()))
            .collect();
        let head = match &c.head {
            Head::Conj(items) => Head::Conj(items.iter().map(rewrite).collect()),
            Head::Exists(items) => Head::Exists(items.iter().map(rewrite).collect()),
        };
        let trivial = matches!(&head, Head::Conj(items) if items.iter().all(|l| {
            matches!(l, Literal::Constraint(a) if a.is_true()) || body.contains(l)
        }));
        if !trivial {
            clauses.push(HornClause::new(body, head));
        }
    }
    let decls = cs.decls().iter().filter(|d| !subst.contains_key(d.name.as_str())).cloned().collect();
    Ok(cs.with_parts(decls, clauses, cs.wf_marks().to_vec())?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::{normalize, parse_ctl, parse_system};

    fn sys() -> Arc<TransitionSystem> {
        Arc::new(
            parse_system("(system (vars (w Int)) (init (= w 0)) (trans (rule true ((w (+ w 1))))))").unwrap(),
        )
    }

    fn gen(src: &str) -> ConstraintSystem {
        generate(sys(), &normalize(&parse_ctl(src).unwrap())).unwrap()
    }

    #[test]
    fn trivial_formula() {
        assert_eq!(gen("true").to_string(), "init(v) -> true.\n");
    }

    #[test]
    fn eg_has_one_exists_head() {
        let cs = gen("EG(w >= 0)");
        assert_eq!(cs.clauses().len(), 4);
        assert_eq!(cs.clauses().iter().filter(|c| c.head.is_exists()).count(), 1);
    }

    #[test]
    fn disjunction_uses_selector() {
        let cs = gen("AF(w >= 3) || AF(w <= -3)");
        let text = cs.to_string();
        assert!(text.starts_with("init(v) & sel1(v) -> p1(v).\ninit(v) & !sel1(v) -> p2(v).\n"), "{text}");
    }

    #[test]
    fn propositional_children_are_inlined() {
        let cs = gen("w >= 1 && EX(w >= 2)");
        assert!(cs.to_string().starts_with("init(v) -> w >= 1.\ninit(v) -> p1(v).\n"));
    }

    #[test]
    fn rejects_unnormalized() {
        let f = parse_ctl("EF(w >= 1)").unwrap();
        assert!(matches!(generate(sys(), &f), Err(ProofError::NotNormalized(_))));
    }
}
