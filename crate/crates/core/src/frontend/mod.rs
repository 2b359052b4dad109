//! Parsers and printers for the system DSL and the property language, plus
//! formula normalization and negation.

mod ctl;
mod dsl;
mod normalize;
pub mod sexpr;

use std::fmt;

use thiserror::Error;

use crate::ir::IrError;

pub use ctl::{check_formula_vars, parse_assertion, parse_ctl};
pub use dsl::{assertion_from_sexp, expr_from_sexp, parse_system, print_system};
pub use normalize::{negate, normalize};

/// 1-based position range in the source text.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SourceSpan {
    pub line: usize,
    pub col: usize,
    pub end_line: usize,
    pub end_col: usize,
}

impl SourceSpan {
    pub fn point(line: usize, col: usize) -> Self {
        SourceSpan { line, col, end_line: line, end_col: col }
    }
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FrontendError {
    #[error("{span}: syntax error: {msg}")]
    Syntax { span: SourceSpan, msg: String },
    #[error("{span}: undeclared variable `{name}`")]
    UndeclaredVariable { name: String, span: SourceSpan },
    #[error("{span}: duplicate variable `{name}`")]
    DuplicateVariable { name: String, span: SourceSpan },
    #[error("{span}: path operator `{op}` must be preceded by A or E")]
    UnquantifiedPathOperator { op: String, span: SourceSpan },
    #[error("cannot negate until formula `{0}`: the logic has no release operator")]
    NonNegatableUntil(String),
    #[error(transparent)]
    Ir(#[from] IrError),
}

impl FrontendError {
    pub fn syntax(span: SourceSpan, msg: impl Into<String>) -> Self {
        FrontendError::Syntax { span, msg: msg.into() }
    }
}
