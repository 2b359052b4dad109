//! Quantifier-free linear integer arithmetic over state variables.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

/// Whether a variable refers to the current state or to the successor state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum VarKind {
    State,
    Primed,
}

/// An integer-sorted variable. `w` and `w'` share a name and differ in kind.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var {
    pub name: String,
    pub kind: VarKind,
}

impl Var {
    pub fn state(name: impl Into<String>) -> Self {
        Var { name: name.into(), kind: VarKind::State }
    }

    pub fn primed(name: impl Into<String>) -> Self {
        Var { name: name.into(), kind: VarKind::Primed }
    }

    pub fn is_primed(&self) -> bool {
        self.kind == VarKind::Primed
    }

    /// The same variable with the given kind.
    pub fn with_kind(&self, kind: VarKind) -> Self {
        Var { name: self.name.clone(), kind }
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            VarKind::State => write!(f, "{}", self.name),
            VarKind::Primed => write!(f, "{}'", self.name),
        }
    }
}

/// Canonical linear expression `Σ cᵢ·xᵢ + k`. Zero coefficients are never stored.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct LinExpr {
    coeffs: BTreeMap<Var, i64>,
    constant: i64,
}

impl LinExpr {
    pub fn constant(k: i64) -> Self {
        LinExpr { coeffs: BTreeMap::new(), constant: k }
    }

    pub fn var(v: Var) -> Self {
        Self::term(1, v)
    }

    pub fn term(coeff: i64, v: Var) -> Self {
        let mut e = LinExpr::default();
        e.add_term(coeff, v);
        e
    }

    pub fn add_term(&mut self, coeff: i64, v: Var) {
        let entry = self.coeffs.entry(v).or_insert(0);
        *entry += coeff;
        if *entry == 0 {
            self.coeffs.retain(|_, c| *c != 0);
        }
    }

    pub fn constant_part(&self) -> i64 {
        self.constant
    }

    pub fn coeff(&self, v: &Var) -> i64 {
        self.coeffs.get(v).copied().unwrap_or(0)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Var, i64)> {
        self.coeffs.iter().map(|(v, c)| (v, *c))
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn as_constant(&self) -> Option<i64> {
        self.is_constant().then_some(self.constant)
    }

    /// `Some(v)` if this expression is exactly the variable `v`.
    pub fn as_var(&self) -> Option<&Var> {
        if self.constant != 0 || self.coeffs.len() != 1 {
            return None;
        }
        let (v, c) = self.coeffs.iter().next()?;
        (*c == 1).then_some(v)
    }

    pub fn add(&self, other: &LinExpr) -> LinExpr {
        let mut out = self.clone();
        for (v, c) in other.terms() {
            out.add_term(c, v.clone());
        }
        out.constant += other.constant;
        out
    }

    pub fn scale(&self, k: i64) -> LinExpr {
        if k == 0 {
            return LinExpr::default();
        }
        LinExpr {
            coeffs: self.coeffs.iter().map(|(v, c)| (v.clone(), c * k)).collect(),
            constant: self.constant * k,
        }
    }

    pub fn sub(&self, other: &LinExpr) -> LinExpr {
        self.add(&other.scale(-1))
    }

    pub fn vars(&self) -> impl Iterator<Item = &Var> {
        self.coeffs.keys()
    }

    pub fn eval(&self, env: &dyn Fn(&Var) -> Option<i64>) -> Option<i64> {
        let mut acc = self.constant;
        for (v, c) in &self.coeffs {
            acc = acc.checked_add(c.checked_mul(env(v)?)?)?;
        }
        Some(acc)
    }

    /// Replace variables by expressions; unmapped variables are kept.
    pub fn substitute(&self, map: &dyn Fn(&Var) -> Option<LinExpr>) -> LinExpr {
        let mut out = LinExpr::constant(self.constant);
        for (v, c) in &self.coeffs {
            match map(v) {
                Some(e) => out = out.add(&e.scale(*c)),
                None => out.add_term(*c, v.clone()),
            }
        }
        out
    }

    fn fmt_with(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "{}", self.constant);
        }
        let mut first = true;
        for (v, c) in &self.coeffs {
            let c = *c;
            if first {
                match c {
                    1 => write!(f, "{v}")?,
                    -1 => write!(f, "-{v}")?,
                    _ => write!(f, "{c}*{v}")?,
                }
                first = false;
            } else {
                let sign = if c < 0 { "-" } else { "+" };
                match c.abs() {
                    1 => write!(f, " {sign} {v}")?,
                    a => write!(f, " {sign} {a}*{v}")?,
                }
            }
        }
        match self.constant {
            0 => Ok(()),
            k if k < 0 => write!(f, " - {}", -k),
            k => write!(f, " + {k}"),
        }
    }
}

impl fmt::Display for LinExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_with(f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CmpOp {
    Lt,
    Le,
    Eq,
    Ge,
    Gt,
}

impl CmpOp {
    pub fn holds(self, lhs: i64, rhs: i64) -> bool {
        match self {
            CmpOp::Lt => lhs < rhs,
            CmpOp::Le => lhs <= rhs,
            CmpOp::Eq => lhs == rhs,
            CmpOp::Ge => lhs >= rhs,
            CmpOp::Gt => lhs > rhs,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Eq => "=",
            CmpOp::Ge => ">=",
            CmpOp::Gt => ">",
        }
    }

    pub fn from_symbol(s: &str) -> Option<CmpOp> {
        Some(match s {
            "<" => CmpOp::Lt,
            "<=" => CmpOp::Le,
            "=" | "==" => CmpOp::Eq,
            ">=" => CmpOp::Ge,
            ">" => CmpOp::Gt,
            _ => return None,
        })
    }

    /// The complementary comparison, if it is a single comparison.
    fn complement(self) -> Option<CmpOp> {
        match self {
            CmpOp::Lt => Some(CmpOp::Ge),
            CmpOp::Le => Some(CmpOp::Gt),
            CmpOp::Ge => Some(CmpOp::Lt),
            CmpOp::Gt => Some(CmpOp::Le),
            CmpOp::Eq => None,
        }
    }
}

/// Boolean combination of linear comparisons.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Assertion {
    Bool(bool),
    Cmp(CmpOp, LinExpr, LinExpr),
    Not(Box<Assertion>),
    And(Vec<Assertion>),
    Or(Vec<Assertion>),
}

impl Assertion {
    pub fn tt() -> Self {
        Assertion::Bool(true)
    }

    pub fn ff() -> Self {
        Assertion::Bool(false)
    }

    pub fn cmp(op: CmpOp, lhs: LinExpr, rhs: LinExpr) -> Self {
        Assertion::Cmp(op, lhs, rhs)
    }

    /// `x = k` for a state variable.
    pub fn var_eq(name: &str, k: i64) -> Self {
        Assertion::Cmp(CmpOp::Eq, LinExpr::var(Var::state(name)), LinExpr::constant(k))
    }

    /// Conjunction that drops `true` operands, short-circuits on `false`
    /// and unwraps singletons.
    pub fn and_all(items: impl IntoIterator<Item = Assertion>) -> Self {
        let mut out = Vec::new();
        for a in items {
            match a {
                Assertion::Bool(true) => {}
                Assertion::Bool(false) => return Assertion::ff(),
                other => out.push(other),
            }
        }
        match out.len() {
            0 => Assertion::tt(),
            1 => out.pop().unwrap(),
            _ => Assertion::And(out),
        }
    }

    /// Disjunction, dual to [`Assertion::and_all`].
    pub fn or_all(items: impl IntoIterator<Item = Assertion>) -> Self {
        let mut out = Vec::new();
        for a in items {
            match a {
                Assertion::Bool(false) => {}
                Assertion::Bool(true) => return Assertion::tt(),
                other => out.push(other),
            }
        }
        match out.len() {
            0 => Assertion::ff(),
            1 => out.pop().unwrap(),
            _ => Assertion::Or(out),
        }
    }

    pub fn is_true(&self) -> bool {
        matches!(self, Assertion::Bool(true))
    }

    pub fn is_false(&self) -> bool {
        matches!(self, Assertion::Bool(false))
    }

    /// Theory-level negation: comparisons are flipped, connectives dualized.
    pub fn negate(&self) -> Assertion {
        match self {
            Assertion::Bool(b) => Assertion::Bool(!b),
            Assertion::Cmp(op, l, r) => match op.complement() {
                Some(c) => Assertion::Cmp(c, l.clone(), r.clone()),
                None => Assertion::Not(Box::new(self.clone())),
            },
            Assertion::Not(inner) => (**inner).clone(),
            Assertion::And(items) => Assertion::Or(items.iter().map(Assertion::negate).collect()),
            Assertion::Or(items) => Assertion::And(items.iter().map(Assertion::negate).collect()),
        }
    }

    pub fn eval(&self, env: &dyn Fn(&Var) -> Option<i64>) -> Option<bool> {
        Some(match self {
            Assertion::Bool(b) => *b,
            Assertion::Cmp(op, l, r) => op.holds(l.eval(env)?, r.eval(env)?),
            Assertion::Not(a) => !a.eval(env)?,
            Assertion::And(items) => {
                for a in items {
                    if !a.eval(env)? {
                        return Some(false);
                    }
                }
                true
            }
            Assertion::Or(items) => {
                for a in items {
                    if a.eval(env)? {
                        return Some(true);
                    }
                }
                false
            }
        })
    }

    pub fn vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<Var>) {
        match self {
            Assertion::Bool(_) => {}
            Assertion::Cmp(_, l, r) => out.extend(l.vars().chain(r.vars()).cloned()),
            Assertion::Not(a) => a.collect_vars(out),
            Assertion::And(items) | Assertion::Or(items) => items.iter().for_each(|a| a.collect_vars(out)),
        }
    }

    pub fn mentions_primed(&self) -> bool {
        self.vars().iter().any(Var::is_primed)
    }

    pub fn substitute(&self, map: &dyn Fn(&Var) -> Option<LinExpr>) -> Assertion {
        match self {
            Assertion::Bool(b) => Assertion::Bool(*b),
            Assertion::Cmp(op, l, r) => Assertion::Cmp(*op, l.substitute(map), r.substitute(map)),
            Assertion::Not(a) => Assertion::Not(Box::new(a.substitute(map))),
            Assertion::And(items) => Assertion::And(items.iter().map(|a| a.substitute(map)).collect()),
            Assertion::Or(items) => Assertion::Or(items.iter().map(|a| a.substitute(map)).collect()),
        }
    }

    /// Rename every state variable to its primed copy.
    pub fn primed(&self) -> Assertion {
        self.substitute(&|v: &Var| {
            (v.kind == VarKind::State).then(|| LinExpr::var(v.with_kind(VarKind::Primed)))
        })
    }

    /// Top-level conjuncts (a non-conjunction is its own single conjunct).
    pub fn conjuncts(&self) -> Vec<&Assertion> {
        match self {
            Assertion::And(items) => items.iter().flat_map(|a| a.conjuncts()).collect(),
            Assertion::Bool(true) => Vec::new(),
            other => vec![other],
        }
    }

    /// If a top-level conjunct pins `var` to a constant, return it.
    pub fn pinned_value(&self, var: &Var) -> Option<i64> {
        self.conjuncts().into_iter().find_map(|c| match c {
            Assertion::Cmp(CmpOp::Eq, l, r) => {
                let diff = l.sub(r);
                let coeff = diff.coeff(var);
                if diff.terms().count() == 1 && coeff.abs() == 1 {
                    // coeff·var + k = 0
                    Some(-diff.constant_part() * coeff)
                } else {
                    None
                }
            }
            _ => None,
        })
    }

    /// Canonical form used for syntactic guard comparison: nested
    /// conjunctions flattened, each atom moved to `Σ cᵢxᵢ ⋈ k` with
    /// strict integer comparisons tightened, conjuncts sorted and deduplicated.
    pub fn canonical(&self) -> Assertion {
        match self {
            Assertion::Cmp(op, l, r) => canonical_atom(*op, l, r),
            Assertion::Not(a) => match a.canonical() {
                Assertion::Bool(b) => Assertion::Bool(!b),
                other => Assertion::Not(Box::new(other)),
            },
            Assertion::And(_) => {
                let mut parts: Vec<Assertion> = self
                    .conjuncts()
                    .into_iter()
                    .map(Assertion::canonical)
                    .flat_map(|c| match c {
                        Assertion::And(xs) => xs,
                        other => vec![other],
                    })
                    .collect();
                parts.sort();
                parts.dedup();
                Assertion::and_all(parts)
            }
            Assertion::Or(items) => {
                let mut parts: Vec<Assertion> = items.iter().map(Assertion::canonical).collect();
                parts.sort();
                parts.dedup();
                Assertion::or_all(parts)
            }
            Assertion::Bool(b) => Assertion::Bool(*b),
        }
    }

    /// Number of syntax nodes.
    pub fn size(&self) -> usize {
        match self {
            Assertion::Bool(_) | Assertion::Cmp(..) => 1,
            Assertion::Not(a) => 1 + a.size(),
            Assertion::And(items) | Assertion::Or(items) => {
                1 + items.iter().map(Assertion::size).sum::<usize>()
            }
        }
    }
}

fn canonical_atom(op: CmpOp, l: &LinExpr, r: &LinExpr) -> Assertion {
    // Move everything left: diff ⋈ 0, then to terms ⋈ -constant.
    let diff = l.sub(r);
    let k = -diff.constant_part();
    let mut lhs = diff.clone();
    lhs.constant = 0;
    if lhs.is_constant() {
        return Assertion::Bool(op.holds(0, k));
    }
    let (op, k) = match op {
        CmpOp::Lt => (CmpOp::Le, k - 1),
        CmpOp::Gt => (CmpOp::Ge, k + 1),
        other => (other, k),
    };
    // Orient so the leading coefficient is positive.
    let lead = lhs.coeffs.values().next().copied().unwrap_or(1);
    if lead < 0 {
        let op = match op {
            CmpOp::Le => CmpOp::Ge,
            CmpOp::Ge => CmpOp::Le,
            other => other,
        };
        Assertion::Cmp(op, lhs.scale(-1), LinExpr::constant(-k))
    } else {
        Assertion::Cmp(op, lhs, LinExpr::constant(k))
    }
}

impl fmt::Display for Assertion {
    /// Infix rendering in the property-language syntax; re-parses to an equal value.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Assertion::Bool(b) => write!(f, "{b}"),
            Assertion::Cmp(op, l, r) => write!(f, "{l} {} {r}", op.symbol()),
            Assertion::Not(a) => write!(f, "!({a})"),
            Assertion::And(items) => write_joined(f, items, " && "),
            Assertion::Or(items) => write_joined(f, items, " || "),
        }
    }
}

fn write_joined(f: &mut fmt::Formatter<'_>, items: &[Assertion], sep: &str) -> fmt::Result {
    write!(f, "(")?;
    for (i, a) in items.iter().enumerate() {
        if i > 0 {
            write!(f, "{sep}")?;
        }
        write!(f, "{a}")?;
    }
    write!(f, ")")
}

/// S-expression rendering shared by the system DSL and SMT-LIB output.
pub struct SExpr<'a, T: ?Sized>(pub &'a T);

impl fmt::Display for SExpr<'_, LinExpr> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let e = self.0;
        let mut parts: Vec<String> = e
            .coeffs
            .iter()
            .map(|(v, c)| match c {
                1 => sexpr_var(v),
                c => format!("(* {} {})", sexpr_int(*c), sexpr_var(v)),
            })
            .collect();
        if e.constant != 0 || parts.is_empty() {
            parts.push(sexpr_int(e.constant));
        }
        if parts.len() == 1 {
            write!(f, "{}", parts[0])
        } else {
            write!(f, "(+ {})", parts.join(" "))
        }
    }
}

impl fmt::Display for SExpr<'_, Assertion> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            Assertion::Bool(b) => write!(f, "{b}"),
            Assertion::Cmp(op, l, r) => {
                write!(f, "({} {} {})", op.symbol(), SExpr(l), SExpr(r))
            }
            Assertion::Not(a) => write!(f, "(not {})", SExpr(&**a)),
            Assertion::And(items) | Assertion::Or(items) => {
                let head = if matches!(self.0, Assertion::And(_)) { "and" } else { "or" };
                write!(f, "({head}")?;
                for a in items {
                    write!(f, " {}", SExpr(a))?;
                }
                write!(f, ")")
            }
        }
    }
}

pub fn sexpr_int(k: i64) -> String {
    if k < 0 {
        format!("(- {})", k.unsigned_abs())
    } else {
        k.to_string()
    }
}

/// Primed variables are rendered as quoted symbols (`|w'|`).
pub fn sexpr_var(v: &Var) -> String {
    match v.kind {
        VarKind::State => v.name.clone(),
        VarKind::Primed => format!("|{}'|", v.name),
    }
}
