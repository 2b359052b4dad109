use std::fmt;

use super::assertion::Assertion;

/// CTL state formula. Path operators only occur paired with a quantifier.
///
/// `Implies` exists only between parsing and normalization; the proof system
/// never sees it.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CtlFormula {
    Atom(Assertion),
    And(Box<CtlFormula>, Box<CtlFormula>),
    Or(Box<CtlFormula>, Box<CtlFormula>),
    Implies(Assertion, Box<CtlFormula>),
    AX(Box<CtlFormula>),
    EX(Box<CtlFormula>),
    AG(Box<CtlFormula>),
    EG(Box<CtlFormula>),
    AF(Box<CtlFormula>),
    EF(Box<CtlFormula>),
    AU(Box<CtlFormula>, Box<CtlFormula>),
    EU(Box<CtlFormula>, Box<CtlFormula>),
}

/// Path-quantified unary operators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum UnaryOp {
    AX,
    EX,
    AG,
    EG,
    AF,
    EF,
}

/// Binary operators: path-quantified until, or a boolean connective.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BinaryOp {
    AU,
    EU,
    And,
    Or,
}

impl UnaryOp {
    pub fn name(self) -> &'static str {
        match self {
            UnaryOp::AX => "AX",
            UnaryOp::EX => "EX",
            UnaryOp::AG => "AG",
            UnaryOp::EG => "EG",
            UnaryOp::AF => "AF",
            UnaryOp::EF => "EF",
        }
    }
}

impl BinaryOp {
    pub fn name(self) -> &'static str {
        match self {
            BinaryOp::AU => "AU",
            BinaryOp::EU => "EU",
            BinaryOp::And => "&&",
            BinaryOp::Or => "||",
        }
    }
}

impl CtlFormula {
    pub fn atom(a: Assertion) -> Self {
        CtlFormula::Atom(a)
    }

    pub fn tt() -> Self {
        CtlFormula::Atom(Assertion::tt())
    }

    pub fn unary(op: UnaryOp, inner: CtlFormula) -> Self {
        let b = Box::new(inner);
        match op {
            UnaryOp::AX => CtlFormula::AX(b),
            UnaryOp::EX => CtlFormula::EX(b),
            UnaryOp::AG => CtlFormula::AG(b),
            UnaryOp::EG => CtlFormula::EG(b),
            UnaryOp::AF => CtlFormula::AF(b),
            UnaryOp::EF => CtlFormula::EF(b),
        }
    }

    pub fn binary(op: BinaryOp, lhs: CtlFormula, rhs: CtlFormula) -> Self {
        let (l, r) = (Box::new(lhs), Box::new(rhs));
        match op {
            BinaryOp::AU => CtlFormula::AU(l, r),
            BinaryOp::EU => CtlFormula::EU(l, r),
            BinaryOp::And => CtlFormula::And(l, r),
            BinaryOp::Or => CtlFormula::Or(l, r),
        }
    }

    pub fn as_unary(&self) -> Option<(UnaryOp, &CtlFormula)> {
        Some(match self {
            CtlFormula::AX(f) => (UnaryOp::AX, f),
            CtlFormula::EX(f) => (UnaryOp::EX, f),
            CtlFormula::AG(f) => (UnaryOp::AG, f),
            CtlFormula::EG(f) => (UnaryOp::EG, f),
            CtlFormula::AF(f) => (UnaryOp::AF, f),
            CtlFormula::EF(f) => (UnaryOp::EF, f),
            _ => return None,
        })
    }

    pub fn as_binary(&self) -> Option<(BinaryOp, &CtlFormula, &CtlFormula)> {
        Some(match self {
            CtlFormula::AU(l, r) => (BinaryOp::AU, l, r),
            CtlFormula::EU(l, r) => (BinaryOp::EU, l, r),
            CtlFormula::And(l, r) => (BinaryOp::And, l, r),
            CtlFormula::Or(l, r) => (BinaryOp::Or, l, r),
            _ => return None,
        })
    }

    pub fn as_atom(&self) -> Option<&Assertion> {
        match self {
            CtlFormula::Atom(a) => Some(a),
            _ => None,
        }
    }

    /// Node count of the syntax tree; assertions count as one node.
    pub fn size(&self) -> usize {
        match self {
            CtlFormula::Atom(_) => 1,
            CtlFormula::Implies(_, f) => 2 + f.size(),
            other => {
                if let Some((_, f)) = other.as_unary() {
                    1 + f.size()
                } else if let Some((_, l, r)) = other.as_binary() {
                    1 + l.size() + r.size()
                } else {
                    unreachable!()
                }
            }
        }
    }

    /// True if no temporal operator occurs.
    pub fn is_propositional(&self) -> bool {
        match self {
            CtlFormula::Atom(_) => true,
            CtlFormula::And(l, r) | CtlFormula::Or(l, r) => l.is_propositional() && r.is_propositional(),
            CtlFormula::Implies(_, f) => f.is_propositional(),
            _ => false,
        }
    }

    /// Visit every assertion leaf.
    pub fn for_each_assertion(&self, f: &mut dyn FnMut(&Assertion)) {
        match self {
            CtlFormula::Atom(a) => f(a),
            CtlFormula::Implies(a, g) => {
                f(a);
                g.for_each_assertion(f);
            }
            other => {
                if let Some((_, g)) = other.as_unary() {
                    g.for_each_assertion(f);
                } else if let Some((_, l, r)) = other.as_binary() {
                    l.for_each_assertion(f);
                    r.for_each_assertion(f);
                }
            }
        }
    }
}

impl fmt::Display for CtlFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            // Compound assertions are bracketed so they re-parse as a single atom.
            CtlFormula::Atom(a) => match a {
                Assertion::Bool(_) | Assertion::Cmp(..) => write!(f, "{a}"),
                _ => write!(f, "[{a}]"),
            },
            CtlFormula::And(l, r) => write!(f, "({l} && {r})"),
            CtlFormula::Or(l, r) => write!(f, "({l} || {r})"),
            CtlFormula::Implies(a, g) => write!(f, "({} -> {g})", CtlFormula::Atom(a.clone())),
            CtlFormula::AU(l, r) => write!(f, "AU({l}, {r})"),
            CtlFormula::EU(l, r) => write!(f, "EU({l}, {r})"),
            other => {
                let (op, g) = other.as_unary().expect("unary");
                write!(f, "{}({g})", op.name())
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ir::{CmpOp, LinExpr, Var};

    fn w_ge_1() -> CtlFormula {
        CtlFormula::Atom(Assertion::cmp(CmpOp::Ge, LinExpr::var(Var::state("w")), LinExpr::constant(1)))
    }

    #[test]
    fn size_counts_nodes() {
        assert_eq!(w_ge_1().size(), 1);
        let f = CtlFormula::AG(Box::new(CtlFormula::EF(Box::new(w_ge_1()))));
        assert_eq!(f.size(), 3);
        let eu = CtlFormula::EU(Box::new(CtlFormula::tt()), Box::new(w_ge_1()));
        assert_eq!(eu.size(), 3);
    }

    #[test]
    fn display_is_parenthesized() {
        let f = CtlFormula::AG(Box::new(CtlFormula::EF(Box::new(w_ge_1()))));
        assert_eq!(f.to_string(), "AG(EF(w >= 1))");
    }
}
