//! Infix property language.
//!
//! Precedence from loosest to tightest: `->` (right associative, assertion
//! antecedent only), `||`, `&&`, `!`, then temporal prefixes and atoms.
//! A bracketed `[...]` is always a single assertion atom. A bare variable
//! used as a formula means `x != 0`.

use super::normalize::negate;
use super::{FrontendError, SourceSpan};
use crate::ir::{Assertion, CmpOp, CtlFormula, LinExpr, TransitionSystem, UnaryOp, Var};

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(i64),
    Sym(&'static str),
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    col: usize,
}

const SYMBOLS: [&str; 19] =
    ["->", "&&", "||", "<=", ">=", "==", "!=", "<", ">", "=", "!", "(", ")", "[", "]", ",", "+", "-", "*"];

fn lex(text: &str) -> Result<Vec<Token>, FrontendError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = i + 1;
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            while i < chars.len() && chars[i] == '\'' {
                i += 1;
            }
            out.push(Token { tok: Tok::Ident(chars[start..i].iter().collect()), col });
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            let k = s.parse().map_err(|_| {
                FrontendError::syntax(SourceSpan::point(1, col), format!("integer `{s}` out of range"))
            })?;
            out.push(Token { tok: Tok::Int(k), col });
        } else {
            let rest: String = chars[i..chars.len().min(i + 2)].iter().collect();
            let sym = SYMBOLS.iter().find(|s| rest.starts_with(**s)).ok_or_else(|| {
                FrontendError::syntax(SourceSpan::point(1, col), format!("unexpected character `{c}`"))
            })?;
            i += sym.len();
            out.push(Token { tok: Tok::Sym(sym), col });
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    end_col: usize,
}

type PResult<T> = Result<T, FrontendError>;

fn unary_op(name: &str) -> Option<UnaryOp> {
    Some(match name {
        "AX" => UnaryOp::AX,
        "EX" => UnaryOp::EX,
        "AG" => UnaryOp::AG,
        "EG" => UnaryOp::EG,
        "AF" => UnaryOp::AF,
        "EF" => UnaryOp::EF,
        _ => return None,
    })
}

fn is_keyword(name: &str) -> bool {
    unary_op(name).is_some() || matches!(name, "AU" | "EU" | "true" | "false")
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    fn peek_at(&self, k: usize) -> Option<&Tok> {
        self.toks.get(self.pos + k).map(|t| &t.tok)
    }

    fn span(&self) -> SourceSpan {
        let col = self.toks.get(self.pos).map_or(self.end_col, |t| t.col);
        SourceSpan::point(1, col)
    }

    fn err<T>(&self, msg: impl Into<String>) -> PResult<T> {
        Err(FrontendError::syntax(self.span(), msg))
    }

    fn eat(&mut self, sym: &str) -> bool {
        if matches!(self.peek(), Some(Tok::Sym(s)) if *s == sym) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, sym: &str) -> PResult<()> {
        if self.eat(sym) {
            Ok(())
        } else {
            let found = match self.peek() {
                Some(Tok::Ident(s)) => format!("`{s}`"),
                Some(Tok::Int(k)) => format!("`{k}`"),
                Some(Tok::Sym(s)) => format!("`{s}`"),
                None => "end of input".to_string(),
            };
            self.err(format!("expected `{sym}`, found {found}"))
        }
    }

    /// Run `f`, rewinding on failure.
    fn attempt<T>(&mut self, f: impl FnOnce(&mut Self) -> PResult<T>) -> Option<T> {
        let save = self.pos;
        match f(self) {
            Ok(v) => Some(v),
            Err(_) => {
                self.pos = save;
                None
            }
        }
    }

    // ---- formulas ----

    fn formula(&mut self) -> PResult<CtlFormula> {
        let start = self.span();
        let lhs = self.or()?;
        if self.eat("->") {
            let rhs = self.formula()?;
            let ante = to_assertion(&lhs)
                .ok_or_else(|| FrontendError::syntax(start, "the antecedent of `->` must be an assertion"))?;
            return Ok(CtlFormula::Implies(ante, Box::new(rhs)));
        }
        Ok(lhs)
    }

    fn or(&mut self) -> PResult<CtlFormula> {
        let mut lhs = self.and()?;
        while self.eat("||") {
            let rhs = self.and()?;
            lhs = CtlFormula::Or(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn and(&mut self) -> PResult<CtlFormula> {
        let mut lhs = self.unary()?;
        while self.eat("&&") {
            let rhs = self.unary()?;
            lhs = CtlFormula::And(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> PResult<CtlFormula> {
        if self.eat("!") {
            let inner = self.unary()?;
            return match inner {
                CtlFormula::Atom(a) => Ok(CtlFormula::Atom(Assertion::Not(Box::new(a)))),
                other => negate(&other),
            };
        }
        if let Some(Tok::Ident(name)) = self.peek().cloned() {
            if let Some(op) = unary_op(&name) {
                self.pos += 1;
                let inner = self.unary()?;
                return Ok(CtlFormula::unary(op, inner));
            }
            if name == "AU" || name == "EU" {
                self.pos += 1;
                self.expect("(")?;
                let l = self.formula()?;
                self.expect(",")?;
                let r = self.formula()?;
                self.expect(")")?;
                return Ok(if name == "AU" {
                    CtlFormula::AU(Box::new(l), Box::new(r))
                } else {
                    CtlFormula::EU(Box::new(l), Box::new(r))
                });
            }
            if matches!(name.as_str(), "G" | "F" | "X" | "U")
                && !matches!(self.peek_at(1), Some(Tok::Sym(s)) if is_infix_after_ident(s))
            {
                return Err(FrontendError::UnquantifiedPathOperator { op: name, span: self.span() });
            }
        }
        self.primary()
    }

    fn primary(&mut self) -> PResult<CtlFormula> {
        if self.eat("[") {
            let a = self.assertion()?;
            self.expect("]")?;
            return Ok(CtlFormula::Atom(a));
        }
        if matches!(self.peek(), Some(Tok::Sym("("))) {
            if let Some(a) = self.attempt(|p| p.comparison()) {
                return Ok(CtlFormula::Atom(a));
            }
            self.pos += 1;
            let f = self.formula()?;
            self.expect(")")?;
            return Ok(f);
        }
        self.atom().map(CtlFormula::Atom)
    }

    // ---- assertions ----

    fn assertion(&mut self) -> PResult<Assertion> {
        let mut items = vec![self.a_and()?];
        while self.eat("||") {
            items.push(self.a_and()?);
        }
        Ok(if items.len() == 1 { items.pop().unwrap() } else { Assertion::Or(items) })
    }

    fn a_and(&mut self) -> PResult<Assertion> {
        let mut items = vec![self.a_unary()?];
        while self.eat("&&") {
            items.push(self.a_unary()?);
        }
        Ok(if items.len() == 1 { items.pop().unwrap() } else { Assertion::And(items) })
    }

    fn a_unary(&mut self) -> PResult<Assertion> {
        if self.eat("!") {
            return Ok(Assertion::Not(Box::new(self.a_unary()?)));
        }
        if matches!(self.peek(), Some(Tok::Sym("("))) {
            if let Some(a) = self.attempt(|p| p.comparison()) {
                return Ok(a);
            }
            self.pos += 1;
            let a = self.assertion()?;
            self.expect(")")?;
            return Ok(a);
        }
        self.atom()
    }

    /// `true`, `false`, a comparison, or a bare variable.
    fn atom(&mut self) -> PResult<Assertion> {
        match self.peek().cloned() {
            Some(Tok::Ident(s)) if s == "true" => {
                self.pos += 1;
                Ok(Assertion::tt())
            }
            Some(Tok::Ident(s)) if s == "false" => {
                self.pos += 1;
                Ok(Assertion::ff())
            }
            Some(Tok::Ident(s)) if is_keyword(&s) => self.err(format!("unexpected `{s}`")),
            Some(Tok::Ident(s)) if !matches!(self.peek_at(1), Some(Tok::Sym(t)) if is_expr_continuation(t)) =>
            {
                self.pos += 1;
                let x = LinExpr::var(parse_var(&s));
                Ok(Assertion::Not(Box::new(Assertion::cmp(CmpOp::Eq, x, LinExpr::constant(0)))))
            }
            Some(_) => self.comparison(),
            None => self.err("unexpected end of input"),
        }
    }

    fn comparison(&mut self) -> PResult<Assertion> {
        let l = self.expr()?;
        let op = match self.peek() {
            Some(Tok::Sym(s)) if *s == "!=" => None,
            Some(Tok::Sym(s)) => match CmpOp::from_symbol(s) {
                Some(op) => Some(op),
                None => return self.err("expected a comparison operator"),
            },
            _ => return self.err("expected a comparison operator"),
        };
        self.pos += 1;
        let r = self.expr()?;
        Ok(match op {
            Some(op) => Assertion::cmp(op, l, r),
            None => Assertion::Not(Box::new(Assertion::cmp(CmpOp::Eq, l, r))),
        })
    }

    // ---- linear expressions ----

    fn expr(&mut self) -> PResult<LinExpr> {
        let mut acc = self.term()?;
        loop {
            if self.eat("+") {
                acc = acc.add(&self.term()?);
            } else if self.eat("-") {
                acc = acc.sub(&self.term()?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> PResult<LinExpr> {
        let mut acc = self.factor()?;
        while self.eat("*") {
            let rhs = self.factor()?;
            acc = match (acc.as_constant(), rhs.as_constant()) {
                (Some(k), _) => rhs.scale(k),
                (_, Some(k)) => acc.scale(k),
                _ => return self.err("non-linear multiplication"),
            };
        }
        Ok(acc)
    }

    fn factor(&mut self) -> PResult<LinExpr> {
        if self.eat("-") {
            return Ok(self.factor()?.scale(-1));
        }
        match self.peek().cloned() {
            Some(Tok::Int(k)) => {
                self.pos += 1;
                Ok(LinExpr::constant(k))
            }
            Some(Tok::Ident(s)) if !is_keyword(&s) => {
                self.pos += 1;
                Ok(LinExpr::var(parse_var(&s)))
            }
            Some(Tok::Sym("(")) => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(")")?;
                Ok(e)
            }
            _ => self.err("expected an expression"),
        }
    }
}

fn is_expr_continuation(sym: &str) -> bool {
    matches!(sym, "+" | "-" | "*" | "<" | "<=" | "=" | "==" | "!=" | ">=" | ">")
}

fn is_infix_after_ident(sym: &str) -> bool {
    is_expr_continuation(sym) || matches!(sym, "&&" | "||" | "->" | ")" | "]" | ",")
}

fn parse_var(s: &str) -> Var {
    match s.strip_suffix('\'') {
        Some(base) => Var::primed(base),
        None => Var::state(s),
    }
}

/// A temporal-free formula read back as an assertion.
fn to_assertion(f: &CtlFormula) -> Option<Assertion> {
    match f {
        CtlFormula::Atom(a) => Some(a.clone()),
        CtlFormula::And(l, r) => Some(Assertion::And(vec![to_assertion(l)?, to_assertion(r)?])),
        CtlFormula::Or(l, r) => Some(Assertion::Or(vec![to_assertion(l)?, to_assertion(r)?])),
        _ => None,
    }
}

fn parse_with<T>(text: &str, f: impl FnOnce(&mut Parser) -> PResult<T>) -> PResult<T> {
    let toks = lex(text)?;
    let mut p = Parser { toks, pos: 0, end_col: text.chars().count() + 1 };
    if p.toks.is_empty() {
        return p.err("empty formula");
    }
    let out = f(&mut p)?;
    if p.pos != p.toks.len() {
        return p.err("unexpected trailing input");
    }
    Ok(out)
}

/// Parse a CTL formula.
pub fn parse_ctl(text: &str) -> Result<CtlFormula, FrontendError> {
    parse_with(text, |p| p.formula())
}

/// Parse an infix assertion, as used inside `[...]`.
pub fn parse_assertion(text: &str) -> Result<Assertion, FrontendError> {
    parse_with(text, |p| p.assertion())
}

/// Reject formulas that mention primed or undeclared variables.
pub fn check_formula_vars(ts: &TransitionSystem, f: &CtlFormula) -> Result<(), FrontendError> {
    let mut bad = None;
    f.for_each_assertion(&mut |a| {
        for v in a.vars() {
            if bad.is_none() && (v.is_primed() || ts.var_index(&v.name).is_none()) {
                bad = Some(v.to_string());
            }
        }
    });
    match bad {
        Some(name) => Err(FrontendError::UndeclaredVariable { name, span: SourceSpan::default() }),
        None => Ok(()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w_ge(k: i64) -> Assertion {
        Assertion::cmp(CmpOp::Ge, LinExpr::var(Var::state("w")), LinExpr::constant(k))
    }

    #[test]
    fn nested_prefixes() {
        let f = parse_ctl("AG(EF(w >= 1))").unwrap();
        assert_eq!(f, CtlFormula::AG(Box::new(CtlFormula::EF(Box::new(CtlFormula::Atom(w_ge(1)))))));
    }

    #[test]
    fn until_with_true() {
        let f = parse_ctl("EU(true, w >= 1)").unwrap();
        assert_eq!(f, CtlFormula::EU(Box::new(CtlFormula::tt()), Box::new(CtlFormula::Atom(w_ge(1)))));
    }

    #[test]
    fn bare_path_operator_rejected() {
        let err = parse_ctl("G p").unwrap_err();
        assert!(matches!(err, FrontendError::UnquantifiedPathOperator { .. }), "{err}");
        assert!(parse_ctl("AG(F p)").is_err());
    }

    #[test]
    fn precedence_and_implication() {
        let f = parse_ctl("w >= 1 -> AF w >= 2 || w >= 3 && w >= 4").unwrap();
        let CtlFormula::Implies(a, rest) = f else { panic!() };
        assert_eq!(a, w_ge(1));
        assert!(matches!(*rest, CtlFormula::Or(..)));
        assert!(parse_ctl("AF(w >= 1) -> w >= 2").is_err());
    }

    #[test]
    fn parenthesized_expression_vs_formula() {
        let f = parse_ctl("(w + 1) * 2 >= 3").unwrap();
        let CtlFormula::Atom(Assertion::Cmp(CmpOp::Ge, l, _)) = f else { panic!() };
        assert_eq!(l.constant_part(), 2);
        let g = parse_ctl("(w >= 1 && p)").unwrap();
        assert!(matches!(g, CtlFormula::And(..)));
    }

    #[test]
    fn bracketed_atoms_round_trip() {
        let src = "AG([(w >= 1 && !(pc = 3))] -> EX(w' - 2*w >= -3))";
        let f = parse_ctl(src).unwrap();
        assert_eq!(parse_ctl(&f.to_string()).unwrap(), f);
    }
}
