//! The s-expression transition-system format.
//!
//! ```text
//! (system
//!   (vars (w Int) (pc Int))
//!   (init (= pc 1))
//!   (trans
//!     (rule (= pc 2) ((pc 3) (w *)))))
//! ```
//!
//! Variables omitted from a rule keep their value.

use std::fmt::Write;

use super::sexpr::{read_one, SExp};
use super::{FrontendError, SourceSpan};
use crate::ir::{Assertion, CmpOp, GuardedCommand, LinExpr, SExpr, TransitionSystem, Update, Var};

type Resolver<'a> = &'a dyn Fn(&str, SourceSpan) -> Result<Var, FrontendError>;

fn parse_int(s: &str) -> Option<i64> {
    let digits = s.strip_prefix('-').unwrap_or(s);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    s.parse().ok()
}

/// Linear expression: numerals, variables, `+`, `-` (unary or n-ary) and
/// `*` with at most one non-constant factor.
pub fn expr_from_sexp(e: &SExp, resolve: Resolver<'_>) -> Result<LinExpr, FrontendError> {
    match e {
        SExp::Atom(a, span) => match parse_int(a) {
            Some(k) => Ok(LinExpr::constant(k)),
            None => Ok(LinExpr::var(resolve(a, *span)?)),
        },
        SExp::List(..) => {
            let (head, args) =
                e.head().ok_or_else(|| FrontendError::syntax(e.span(), "expected an expression"))?;
            let parsed: Vec<LinExpr> =
                args.iter().map(|a| expr_from_sexp(a, resolve)).collect::<Result<_, _>>()?;
            match (head, parsed.as_slice()) {
                ("+", xs) if !xs.is_empty() => Ok(xs.iter().fold(LinExpr::constant(0), |acc, x| acc.add(x))),
                ("-", [x]) => Ok(x.scale(-1)),
                ("-", [x, rest @ ..]) => Ok(rest.iter().fold(x.clone(), |acc, y| acc.sub(y))),
                ("*", xs) if !xs.is_empty() => {
                    let mut acc = LinExpr::constant(1);
                    for x in xs {
                        acc = match (acc.as_constant(), x.as_constant()) {
                            (Some(k), _) => x.scale(k),
                            (_, Some(k)) => acc.scale(k),
                            _ => return Err(FrontendError::syntax(e.span(), "non-linear multiplication")),
                        };
                    }
                    Ok(acc)
                }
                _ => Err(FrontendError::syntax(e.span(), format!("unknown operator `{head}`"))),
            }
        }
    }
}

/// Boolean combination of comparisons in prefix form.
pub fn assertion_from_sexp(e: &SExp, resolve: Resolver<'_>) -> Result<Assertion, FrontendError> {
    match e {
        SExp::Atom(a, span) => match a.as_str() {
            "true" => Ok(Assertion::tt()),
            "false" => Ok(Assertion::ff()),
            _ => Err(FrontendError::syntax(*span, format!("expected an assertion, found `{a}`"))),
        },
        SExp::List(..) => {
            let (head, args) =
                e.head().ok_or_else(|| FrontendError::syntax(e.span(), "expected an assertion"))?;
            let sub = |xs: &[SExp]| -> Result<Vec<Assertion>, FrontendError> {
                xs.iter().map(|x| assertion_from_sexp(x, resolve)).collect()
            };
            match head {
                "and" => Ok(Assertion::And(sub(args)?)),
                "or" => Ok(Assertion::Or(sub(args)?)),
                "not" if args.len() == 1 => {
                    Ok(Assertion::Not(Box::new(assertion_from_sexp(&args[0], resolve)?)))
                }
                op => match (CmpOp::from_symbol(op), args) {
                    (Some(cmp), [l, r]) if op != "==" => {
                        Ok(Assertion::cmp(cmp, expr_from_sexp(l, resolve)?, expr_from_sexp(r, resolve)?))
                    }
                    _ => Err(FrontendError::syntax(e.span(), format!("malformed assertion `({op} ...)`"))),
                },
            }
        }
    }
}

fn section<'a>(e: &'a SExp, name: &str) -> Result<&'a [SExp], FrontendError> {
    match e.head() {
        Some((h, rest)) if h == name => Ok(rest),
        _ => Err(FrontendError::syntax(e.span(), format!("expected `({name} ...)`"))),
    }
}

/// Parse a transition system. Commands get site ids in source order.
pub fn parse_system(text: &str) -> Result<TransitionSystem, FrontendError> {
    let root = read_one(text)?;
    let parts = section(&root, "system")?;
    let [vars_e, init_e, trans_e] = parts else {
        return Err(FrontendError::syntax(
            root.span(),
            "expected `(system (vars ...) (init ...) (trans ...))`",
        ));
    };

    let mut vars: Vec<String> = Vec::new();
    let decls = section(vars_e, "vars")?;
    if decls.is_empty() {
        return Err(FrontendError::syntax(vars_e.span(), "at least one variable is required"));
    }
    for d in decls {
        let (name, sort) = match d.as_list() {
            Some([n, s]) => (n.expect_atom("a variable name")?, s.expect_atom("a sort")?),
            _ => return Err(FrontendError::syntax(d.span(), "expected `(<name> Int)`")),
        };
        if sort != "Int" {
            return Err(FrontendError::syntax(d.span(), format!("unsupported sort `{sort}`")));
        }
        if !is_identifier(name) {
            return Err(FrontendError::syntax(d.span(), format!("invalid variable name `{name}`")));
        }
        if vars.iter().any(|v| v == name) {
            return Err(FrontendError::DuplicateVariable { name: name.to_string(), span: d.span() });
        }
        vars.push(name.to_string());
    }

    let resolve = |name: &str, span: SourceSpan| -> Result<Var, FrontendError> {
        if vars.iter().any(|v| v == name) {
            Ok(Var::state(name))
        } else {
            Err(FrontendError::UndeclaredVariable { name: name.to_string(), span })
        }
    };

    let init = match section(init_e, "init")? {
        [a] => assertion_from_sexp(a, &resolve)?,
        _ => return Err(FrontendError::syntax(init_e.span(), "expected `(init <assertion>)`")),
    };

    let mut commands = Vec::new();
    for (site, rule) in section(trans_e, "trans")?.iter().enumerate() {
        let [guard_e, upd_e] = section(rule, "rule")? else {
            return Err(FrontendError::syntax(rule.span(), "expected `(rule <guard> ((<var> <expr>)...))`"));
        };
        let guard = assertion_from_sexp(guard_e, &resolve)?;
        let mut updates: Vec<Option<Update>> = vec![None; vars.len()];
        for u in upd_e.expect_list("an update list")? {
            let (name_e, rhs) = match u.as_list() {
                Some([n, r]) => (n, r),
                _ => return Err(FrontendError::syntax(u.span(), "expected `(<var> <expr>)`")),
            };
            let name = name_e.expect_atom("a variable name")?;
            let idx = resolve(name, name_e.span()).map(|_| vars.iter().position(|v| v == name).unwrap())?;
            if updates[idx].is_some() {
                return Err(FrontendError::syntax(u.span(), format!("`{name}` updated twice")));
            }
            updates[idx] = Some(match rhs.as_atom() {
                Some("*") => Update::Havoc,
                _ => Update::Expr(expr_from_sexp(rhs, &resolve)?),
            });
        }
        let updates = updates
            .into_iter()
            .zip(&vars)
            .map(|(u, v)| u.unwrap_or_else(|| Update::Expr(LinExpr::var(Var::state(v)))))
            .collect();
        commands.push(GuardedCommand { site, guard, updates });
    }
    Ok(TransitionSystem::new(vars, init, commands)?)
}

pub(crate) fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Render a system in the DSL. Every update is written explicitly, so the
/// output re-parses to an equal system.
pub fn print_system(ts: &TransitionSystem) -> String {
    let mut out = String::from("(system\n  (vars");
    for v in ts.vars() {
        write!(out, " ({v} Int)").unwrap();
    }
    writeln!(out, ")\n  (init {})", SExpr(ts.init())).unwrap();
    out.push_str("  (trans");
    for c in ts.commands() {
        write!(out, "\n    (rule {} (", SExpr(&c.guard)).unwrap();
        for (i, (v, u)) in ts.vars().iter().zip(&c.updates).enumerate() {
            if i > 0 {
                out.push(' ');
            }
            match u {
                Update::Havoc => write!(out, "({v} *)").unwrap(),
                Update::Expr(e) => write!(out, "({v} {})", SExpr(e)).unwrap(),
            }
        }
        out.push_str("))");
    }
    out.push_str("))\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_trans() {
        let ts = parse_system("(system (vars (x Int)) (init (= x 0)) (trans))").unwrap();
        assert!(ts.commands().is_empty());
        assert_eq!(ts.induced_next(), Assertion::ff());
    }

    #[test]
    fn havoc_and_identity_fill() {
        let ts = parse_system(
            "(system (vars (w Int) (pc Int)) (init true) (trans (rule (= pc 2) ((pc 3) (w *)))))",
        )
        .unwrap();
        let c = &ts.commands()[0];
        assert_eq!(c.updates[0], Update::Havoc);
        assert_eq!(c.updates[1], Update::Expr(LinExpr::constant(3)));
        let ts = parse_system("(system (vars (w Int) (pc Int)) (init true) (trans (rule true ((pc 1)))))")
            .unwrap();
        assert_eq!(ts.commands()[0].updates[0], Update::Expr(LinExpr::var(Var::state("w"))));
    }

    #[test]
    fn errors_carry_spans() {
        let err = parse_system("(system (vars (x Int) (x Int)) (init true) (trans))").unwrap_err();
        assert!(matches!(err, FrontendError::DuplicateVariable { .. }));
        let err = parse_system("(system (vars (x Int))\n (init (= y 0)) (trans))").unwrap_err();
        match err {
            FrontendError::UndeclaredVariable { name, span } => {
                assert_eq!(name, "y");
                assert_eq!(span.line, 2);
            }
            other => panic!("unexpected {other}"),
        }
        assert!(parse_system("(system (vars (x Int)) (init true)").is_err());
    }

    #[test]
    fn nonlinear_rejected() {
        let err = parse_system("(system (vars (x Int)) (init true) (trans (rule true ((x (* x x))))))");
        assert!(err.is_err());
    }
}
