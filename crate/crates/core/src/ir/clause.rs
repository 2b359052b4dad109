use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use super::assertion::{Assertion, LinExpr, Var};
use super::formula::CtlFormula;
use super::system::TransitionSystem;
use super::IrError;

/// Which copy of the state tuple a predicate argument refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Tuple {
    Current,
    Next,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Role {
    /// Auxiliary assertion introduced by decomposition (`p1`, `p2`, ...).
    AuxP,
    Invariant,
    /// Binary relation over `(v, v')` subject to well-foundedness.
    Rank,
    /// Case split for a disjunction.
    Selector,
    Plumbing,
}

/// A declared unknown predicate.
///
/// `meaning` records the CTL formula whose denotation is the canonical
/// interpretation of the symbol: the nested sub-formula for `AuxP`, the
/// basic formula for `Invariant` and `Rank`, and the disjunction for
/// `Selector` (whose canonical value is the left disjunct).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PredicateSymbol {
    pub name: String,
    /// Number of state tuples taken: 1 for state sets, 2 for relations.
    pub arity: usize,
    pub role: Role,
    pub meaning: Option<CtlFormula>,
}

impl PredicateSymbol {
    /// Formal parameters: the state variables, followed by their primed
    /// copies for binary symbols.
    pub fn params(&self, ts: &TransitionSystem) -> Vec<Var> {
        let mut out = ts.state_vars();
        if self.arity == 2 {
            out.extend(ts.primed_vars());
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PredApp {
    pub name: String,
    pub args: Vec<Tuple>,
}

impl PredApp {
    pub fn current(name: impl Into<String>) -> Self {
        PredApp { name: name.into(), args: vec![Tuple::Current] }
    }

    pub fn next(name: impl Into<String>) -> Self {
        PredApp { name: name.into(), args: vec![Tuple::Next] }
    }

    pub fn relation(name: impl Into<String>) -> Self {
        PredApp { name: name.into(), args: vec![Tuple::Current, Tuple::Next] }
    }

    pub fn mentions_next(&self) -> bool {
        self.args.contains(&Tuple::Next)
    }
}

/// `v' = upd(v)` for one command, with havocked variables optionally fixed
/// by an affine witness. The command's guard is not implied.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StepLit {
    pub site: usize,
    pub havoc_fill: BTreeMap<String, LinExpr>,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Literal {
    /// `init(v)` of the underlying system.
    Init,
    /// `next(v, v')` of the underlying system.
    Next,
    Step(StepLit),
    Pred(PredApp),
    /// Negated predicate; only allowed in bodies.
    NotPred(PredApp),
    Constraint(Assertion),
}

impl Literal {
    pub fn mentions_next(&self) -> bool {
        match self {
            Literal::Init => false,
            Literal::Next | Literal::Step(_) => true,
            Literal::Pred(p) | Literal::NotPred(p) => p.mentions_next(),
            Literal::Constraint(a) => a.mentions_primed(),
        }
    }

    pub fn pred(&self) -> Option<&PredApp> {
        match self {
            Literal::Pred(p) | Literal::NotPred(p) => Some(p),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Head {
    /// Conjunction; empty means `true`.
    Conj(Vec<Literal>),
    /// `∃v'. ⋀ items`; items that do not mention `v'` may be pulled out.
    Exists(Vec<Literal>),
}

impl Head {
    pub fn items(&self) -> &[Literal] {
        match self {
            Head::Conj(items) | Head::Exists(items) => items,
        }
    }

    pub fn is_exists(&self) -> bool {
        matches!(self, Head::Exists(_))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct HornClause {
    pub body: Vec<Literal>,
    pub head: Head,
}

impl HornClause {
    pub fn new(body: Vec<Literal>, head: Head) -> Self {
        HornClause { body, head }
    }

    /// `body → item`.
    pub fn implies(body: Vec<Literal>, item: Literal) -> Self {
        HornClause::new(body, Head::Conj(vec![item]))
    }

    /// True if the universally quantified part ranges over `v'` as well as `v`.
    pub fn mentions_next(&self) -> bool {
        self.body.iter().any(Literal::mentions_next)
            || matches!(&self.head, Head::Conj(items) if items.iter().any(Literal::mentions_next))
    }

    pub fn literals(&self) -> impl Iterator<Item = &Literal> {
        self.body.iter().chain(self.head.items())
    }
}

/// Generated constraints: declarations, clauses and well-foundedness marks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstraintSystem {
    system: Arc<TransitionSystem>,
    decls: Vec<PredicateSymbol>,
    clauses: Vec<HornClause>,
    wf_marks: Vec<String>,
}

impl ConstraintSystem {
    pub fn new(
        system: Arc<TransitionSystem>,
        decls: Vec<PredicateSymbol>,
        clauses: Vec<HornClause>,
        wf_marks: Vec<String>,
    ) -> Result<Self, IrError> {
        let cs = ConstraintSystem { system, decls, clauses, wf_marks };
        cs.validate()?;
        Ok(cs)
    }

    pub fn system(&self) -> &TransitionSystem {
        &self.system
    }

    pub fn system_arc(&self) -> &Arc<TransitionSystem> {
        &self.system
    }

    pub fn decls(&self) -> &[PredicateSymbol] {
        &self.decls
    }

    pub fn decl(&self, name: &str) -> Option<&PredicateSymbol> {
        self.decls.iter().find(|d| d.name == name)
    }

    pub fn clauses(&self) -> &[HornClause] {
        &self.clauses
    }

    pub fn wf_marks(&self) -> &[String] {
        &self.wf_marks
    }

    /// Clauses plus well-foundedness constraints.
    pub fn constraint_count(&self) -> usize {
        self.clauses.len() + self.wf_marks.len()
    }

    pub fn has_exists(&self) -> bool {
        self.clauses.iter().any(|c| c.head.is_exists())
    }

    /// Rebuild with the same system.
    pub fn with_parts(
        &self,
        decls: Vec<PredicateSymbol>,
        clauses: Vec<HornClause>,
        wf_marks: Vec<String>,
    ) -> Result<Self, IrError> {
        ConstraintSystem::new(self.system.clone(), decls, clauses, wf_marks)
    }

    fn validate(&self) -> Result<(), IrError> {
        let mut names = BTreeSet::new();
        for d in &self.decls {
            if !names.insert(d.name.as_str()) {
                return Err(IrError::Clause(format!("predicate {} declared twice", d.name)));
            }
            if d.role == Role::Rank && d.arity != 2 {
                return Err(IrError::Clause(format!("rank symbol {} must be binary", d.name)));
            }
        }
        let n_vars = self.system.vars().len();
        for (i, c) in self.clauses.iter().enumerate() {
            for lit in c.literals() {
                if let Some(p) = lit.pred() {
                    let d = self.decl(&p.name).ok_or_else(|| {
                        IrError::Clause(format!("clause {i}: undeclared predicate {}", p.name))
                    })?;
                    if d.arity != p.args.len() {
                        return Err(IrError::Clause(format!(
                            "clause {i}: {} applied to {} tuples, declared with {}",
                            p.name,
                            p.args.len(),
                            d.arity
                        )));
                    }
                }
                if let Literal::Constraint(a) = lit {
                    for v in a.vars() {
                        if self.system.var_index(&v.name).is_none() {
                            return Err(IrError::UndeclaredVariable(v.to_string()));
                        }
                    }
                }
                if let Literal::Step(s) = lit {
                    if self.system.command(s.site).is_none() {
                        return Err(IrError::Clause(format!("clause {i}: unknown command {}", s.site)));
                    }
                }
            }
            for lit in c.head.items() {
                if matches!(lit, Literal::NotPred(_) | Literal::Init | Literal::Step(_)) {
                    return Err(IrError::Clause(format!("clause {i}: {lit} not allowed in a head")));
                }
                if matches!(lit, Literal::Next) && !c.head.is_exists() {
                    return Err(IrError::Clause(format!("clause {i}: next in a universal head")));
                }
            }
        }
        debug_assert!(n_vars == self.system.vars().len());
        for w in &self.wf_marks {
            match self.decl(w) {
                Some(d) if d.role == Role::Rank => {}
                _ => return Err(IrError::Clause(format!("wf mark on non-rank symbol {w}"))),
            }
            let used =
                self.clauses.iter().any(|c| c.literals().any(|l| l.pred().is_some_and(|p| &p.name == w)));
            if !used {
                return Err(IrError::Clause(format!("wf-marked {w} appears in no clause")));
            }
        }
        Ok(())
    }
}

impl fmt::Display for Tuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tuple::Current => write!(f, "v"),
            Tuple::Next => write!(f, "v'"),
        }
    }
}

impl fmt::Display for PredApp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(", self.name)?;
        for (i, t) in self.args.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{t}")?;
        }
        write!(f, ")")
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Literal::Init => write!(f, "init(v)"),
            Literal::Next => write!(f, "next(v,v')"),
            Literal::Step(s) => {
                write!(f, "step{}", s.site)?;
                if !s.havoc_fill.is_empty() {
                    let fills: Vec<String> = s.havoc_fill.iter().map(|(x, e)| format!("{x}:={e}")).collect();
                    write!(f, "[{}]", fills.join(","))?;
                }
                write!(f, "(v,v')")
            }
            Literal::Pred(p) => write!(f, "{p}"),
            Literal::NotPred(p) => write!(f, "!{p}"),
            Literal::Constraint(a) => write!(f, "{a}"),
        }
    }
}

fn join_literals(f: &mut fmt::Formatter<'_>, items: &[Literal]) -> fmt::Result {
    if items.is_empty() {
        return write!(f, "true");
    }
    for (i, l) in items.iter().enumerate() {
        if i > 0 {
            write!(f, " & ")?;
        }
        write!(f, "{l}")?;
    }
    Ok(())
}

/// Renders a clause with the primed variable list of its system.
pub struct ClauseDisplay<'a> {
    pub clause: &'a HornClause,
    pub vars: &'a [String],
}

impl fmt::Display for ClauseDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        join_literals(f, &self.clause.body)?;
        write!(f, " -> ")?;
        match &self.clause.head {
            Head::Conj(items) => join_literals(f, items)?,
            Head::Exists(items) => {
                let primed: Vec<String> = self.vars.iter().map(|v| format!("{v}'")).collect();
                write!(f, "exists({}). ", primed.join(","))?;
                join_literals(f, items)?;
            }
        }
        write!(f, ".")
    }
}

impl fmt::Display for ConstraintSystem {
    /// One clause per line, well-foundedness marks last.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.clauses {
            writeln!(f, "{}", ClauseDisplay { clause: c, vars: self.system.vars() })?;
        }
        for w in &self.wf_marks {
            writeln!(f, "wf({w}).")?;
        }
        Ok(())
    }
}
