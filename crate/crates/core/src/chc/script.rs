//! Lowering of universal constraint systems to plain CHC rules, and the
//! SMT-LIB HORN text format.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Write};

use crate::frontend::sexpr::{read_all, SExp};
use crate::frontend::{assertion_from_sexp, FrontendError, SourceSpan};
use crate::ir::{
    sexpr_var, Assertion, CmpOp, ConstraintSystem, Head, LinExpr, Literal, PredApp, SExpr, StepLit,
    TransitionSystem, Tuple, Update, Var,
};

use super::ChcError;

pub const HEADER: &str = "; ctlhorn chc v1";

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ChcAtom {
    App(String, Vec<Var>),
    Constraint(Assertion),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ChcHead {
    App(String, Vec<Var>),
    False,
}

/// `∀ vars. body → head`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChcRule {
    pub vars: Vec<Var>,
    pub body: Vec<ChcAtom>,
    pub head: ChcHead,
}

/// Predicate declarations (name, number of Int arguments) and rules.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ChcScript {
    pub decls: Vec<(String, usize)>,
    pub rules: Vec<ChcRule>,
}

fn args(ts: &TransitionSystem, p: &PredApp) -> Vec<Var> {
    p.args
        .iter()
        .flat_map(|t| match t {
            Tuple::Current => ts.state_vars(),
            Tuple::Next => ts.primed_vars(),
        })
        .collect()
}

/// `x' = e` for every non-havoc update; havocked variables follow the fill
/// when one is given and are otherwise unconstrained.
fn step_relation(ts: &TransitionSystem, step: &StepLit) -> Result<Assertion, ChcError> {
    let cmd = ts.command(step.site).ok_or(ChcError::UnknownSite(step.site))?;
    let eqs = ts.vars().iter().zip(&cmd.updates).filter_map(|(v, u)| {
        let rhs = match u {
            Update::Expr(e) => e.clone(),
            Update::Havoc => step.havoc_fill.get(v)?.clone(),
        };
        Some(Assertion::cmp(CmpOp::Eq, LinExpr::var(Var::primed(v.as_str())), rhs))
    });
    Ok(Assertion::and_all(eqs))
}

fn rule_vars(ts: &TransitionSystem, body: &[ChcAtom], head: &ChcHead) -> Vec<Var> {
    let mut used = BTreeSet::new();
    for a in body {
        match a {
            ChcAtom::App(_, vs) => used.extend(vs.iter().cloned()),
            ChcAtom::Constraint(c) => used.extend(c.vars()),
        }
    }
    if let ChcHead::App(_, vs) = head {
        used.extend(vs.iter().cloned());
    }
    ts.state_vars().into_iter().chain(ts.primed_vars()).filter(|v| used.contains(v)).collect()
}

/// Lower a skolemized, ranking-discharged system: `init` and `step` become
/// constraints, `next` in a body becomes one rule per command, and every
/// constraint head `a` becomes a query `body ∧ ¬a → false`.
pub fn lower(cs: &ConstraintSystem) -> Result<ChcScript, ChcError> {
    if let Some(w) = cs.wf_marks().first() {
        return Err(ChcError::ResidualWf(w.clone()));
    }
    let ts = cs.system();
    let decls = cs.decls().iter().map(|d| (d.name.clone(), d.arity * ts.vars().len())).collect();
    let mut rules = Vec::new();
    for (i, c) in cs.clauses().iter().enumerate() {
        let Head::Conj(items) = &c.head else {
            return Err(ChcError::ResidualExists(i));
        };
        // One alternative per command when the body mentions next.
        let mut bodies: Vec<Vec<ChcAtom>> = vec![Vec::new()];
        for l in &c.body {
            let atom = match l {
                Literal::Init => ChcAtom::Constraint(ts.init().clone()),
                Literal::Next => {
                    let alts: Vec<Assertion> = ts
                        .commands()
                        .iter()
                        .map(|cmd| {
                            let step = StepLit { site: cmd.site, havoc_fill: BTreeMap::new() };
                            Ok(Assertion::and_all([cmd.guard.clone(), step_relation(ts, &step)?]))
                        })
                        .collect::<Result<_, ChcError>>()?;
                    bodies = bodies
                        .iter()
                        .flat_map(|b| {
                            alts.iter().map(move |a| {
                                let mut b = b.clone();
                                b.push(ChcAtom::Constraint(a.clone()));
                                b
                            })
                        })
                        .collect();
                    continue;
                }
                Literal::Step(s) => ChcAtom::Constraint(step_relation(ts, s)?),
                Literal::Pred(p) => ChcAtom::App(p.name.clone(), args(ts, p)),
                Literal::NotPred(p) => return Err(ChcError::NegatedPredicate(p.name.clone())),
                Literal::Constraint(a) => ChcAtom::Constraint(a.clone()),
            };
            for b in &mut bodies {
                b.push(atom.clone());
            }
        }
        for item in items {
            let (extra, head) = match item {
                Literal::Pred(p) => (None, ChcHead::App(p.name.clone(), args(ts, p))),
                Literal::Constraint(a) => (Some(a.negate()), ChcHead::False),
                Literal::Init => (Some(ts.init().negate()), ChcHead::False),
                Literal::NotPred(p) => return Err(ChcError::NegatedPredicate(p.name.clone())),
                Literal::Next | Literal::Step(_) => return Err(ChcError::TransitionInHead(i)),
            };
            for b in &bodies {
                let mut body: Vec<ChcAtom> = b.clone();
                body.extend(extra.clone().map(ChcAtom::Constraint));
                if body.iter().any(|a| matches!(a, ChcAtom::Constraint(c) if c.is_false())) {
                    continue;
                }
                body.retain(|a| !matches!(a, ChcAtom::Constraint(c) if c.is_true()));
                rules.push(ChcRule { vars: rule_vars(ts, &body, &head), body, head: head.clone() });
            }
        }
    }
    Ok(ChcScript { decls, rules })
}

/// The script text for a discharged system.
pub fn emit_chc(cs: &ConstraintSystem) -> Result<String, ChcError> {
    Ok(lower(cs)?.to_string())
}

fn write_app(f: &mut fmt::Formatter<'_>, name: &str, vs: &[Var]) -> fmt::Result {
    if vs.is_empty() {
        return write!(f, "{name}");
    }
    write!(f, "({name}")?;
    for v in vs {
        write!(f, " {}", sexpr_var(v))?;
    }
    write!(f, ")")
}

impl fmt::Display for ChcScript {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{HEADER}")?;
        writeln!(f, "(set-logic HORN)")?;
        for (name, n) in &self.decls {
            writeln!(f, "(declare-fun {name} ({}) Bool)", vec!["Int"; *n].join(" "))?;
        }
        for r in &self.rules {
            write!(f, "(assert ")?;
            if !r.vars.is_empty() {
                let bound: Vec<String> = r.vars.iter().map(|v| format!("({} Int)", sexpr_var(v))).collect();
                write!(f, "(forall ({}) ", bound.join(" "))?;
            }
            write!(f, "(=> ")?;
            if r.body.is_empty() {
                write!(f, "true")?;
            } else {
                write!(f, "(and")?;
                for a in &r.body {
                    write!(f, " ")?;
                    match a {
                        ChcAtom::App(name, vs) => write_app(f, name, vs)?,
                        ChcAtom::Constraint(c) => write!(f, "{}", SExpr(c))?,
                    }
                }
                write!(f, ")")?;
            }
            write!(f, " ")?;
            match &r.head {
                ChcHead::App(name, vs) => write_app(f, name, vs)?,
                ChcHead::False => write!(f, "false")?,
            }
            write!(f, ")")?;
            if !r.vars.is_empty() {
                write!(f, ")")?;
            }
            writeln!(f, ")")?;
        }
        writeln!(f, "(check-sat)")?;
        writeln!(f, "(get-model)")
    }
}

fn syntax(span: SourceSpan, msg: impl Into<String>) -> ChcError {
    ChcError::Read(FrontendError::syntax(span, msg))
}

fn parse_var(name: &str) -> Var {
    match name.strip_suffix('\'') {
        Some(base) => Var::primed(base),
        None => Var::state(name),
    }
}

fn atom(e: &SExp) -> Option<&str> {
    match e {
        SExp::Atom(a, _) => Some(a),
        SExp::List(..) => None,
    }
}

/// Read back a script produced by [`emit_chc`].
pub fn read_chc(text: &str) -> Result<ChcScript, ChcError> {
    if text.lines().next() != Some(HEADER) {
        return Err(syntax(SourceSpan::default(), format!("missing `{HEADER}` header")));
    }
    let mut script = ChcScript::default();
    for cmd in read_all(text).map_err(ChcError::Read)? {
        let SExp::List(items, span) = &cmd else {
            return Err(syntax(cmd.span(), "expected a command"));
        };
        match items.first().and_then(atom) {
            Some("set-logic" | "check-sat" | "get-model") => {}
            Some("declare-fun") => match items.as_slice() {
                [_, SExp::Atom(name, _), SExp::List(sorts, _), _] => {
                    script.decls.push((name.clone(), sorts.len()))
                }
                _ => return Err(syntax(*span, "malformed declare-fun")),
            },
            Some("assert") if items.len() == 2 => {
                let rule = read_rule(&items[1], &script.decls)?;
                script.rules.push(rule);
            }
            _ => return Err(syntax(*span, "unsupported command")),
        }
    }
    Ok(script)
}

fn read_rule(e: &SExp, decls: &[(String, usize)]) -> Result<ChcRule, ChcError> {
    let (vars, imp) = match e {
        SExp::List(items, span) if items.first().and_then(atom) == Some("forall") => {
            let [_, SExp::List(bound, _), imp] = items.as_slice() else {
                return Err(syntax(*span, "malformed forall"));
            };
            let vars = bound
                .iter()
                .map(|b| match b {
                    SExp::List(pair, _) => pair.first().and_then(atom).map(parse_var),
                    _ => None,
                })
                .collect::<Option<Vec<Var>>>()
                .ok_or_else(|| syntax(*span, "malformed binder"))?;
            (vars, imp)
        }
        other => (Vec::new(), other),
    };
    let SExp::List(parts, span) = imp else {
        return Err(syntax(imp.span(), "expected an implication"));
    };
    let [op, body, head] = parts.as_slice() else {
        return Err(syntax(*span, "expected (=> body head)"));
    };
    if atom(op) != Some("=>") {
        return Err(syntax(op.span(), "expected `=>`"));
    }
    let bound: BTreeSet<Var> = vars.iter().cloned().collect();
    let resolve = |name: &str, span: SourceSpan| -> Result<Var, FrontendError> {
        let v = parse_var(name);
        if bound.contains(&v) {
            Ok(v)
        } else {
            Err(FrontendError::UndeclaredVariable { name: name.to_string(), span })
        }
    };
    let app = |e: &SExp| -> Option<Result<(String, Vec<Var>), ChcError>> {
        let (name, rest) = match e {
            SExp::Atom(a, _) => (a.as_str(), &[][..]),
            SExp::List(items, _) => (atom(items.first()?)?, &items[1..]),
        };
        decls.iter().find(|(d, _)| d == name)?;
        Some(
            rest.iter()
                .map(|a| {
                    let n = atom(a).ok_or_else(|| syntax(a.span(), "expected a variable"))?;
                    resolve(n, a.span()).map_err(ChcError::Read)
                })
                .collect::<Result<Vec<Var>, ChcError>>()
                .map(|vs| (name.to_string(), vs)),
        )
    };
    let body_items: &[SExp] = match body {
        SExp::Atom(a, _) if a == "true" => &[],
        SExp::List(items, _) if items.first().and_then(atom) == Some("and") => &items[1..],
        other => std::slice::from_ref(other),
    };
    let mut out = Vec::new();
    for b in body_items {
        out.push(match app(b) {
            Some(r) => {
                let (n, vs) = r?;
                ChcAtom::App(n, vs)
            }
            None => ChcAtom::Constraint(assertion_from_sexp(b, &resolve).map_err(ChcError::Read)?),
        });
    }
    let head = match head {
        SExp::Atom(a, _) if a == "false" => ChcHead::False,
        h => {
            let (n, vs) = app(h).ok_or_else(|| syntax(h.span(), "expected a predicate head"))??;
            ChcHead::App(n, vs)
        }
    };
    Ok(ChcRule { vars, body: out, head })
}

impl ChcScript {
    /// Human-readable rule listing, one rule per line.
    pub fn listing(&self) -> String {
        let mut out = String::new();
        for r in &self.rules {
            let body: Vec<String> = r
                .body
                .iter()
                .map(|a| match a {
                    ChcAtom::App(n, vs) => format!("{n}({})", join_vars(vs)),
                    ChcAtom::Constraint(c) => c.to_string(),
                })
                .collect();
            let head = match &r.head {
                ChcHead::App(n, vs) => format!("{n}({})", join_vars(vs)),
                ChcHead::False => "false".to_string(),
            };
            let body = if body.is_empty() { "true".to_string() } else { body.join(" & ") };
            writeln!(out, "{body} -> {head}").unwrap();
        }
        out
    }
}

fn join_vars(vs: &[Var]) -> String {
    vs.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")
}
