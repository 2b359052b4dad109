//! Symbolic data model shared by every stage of the pipeline.

mod assertion;
mod clause;
mod formula;
mod system;

pub use assertion::{sexpr_int, sexpr_var, Assertion, CmpOp, LinExpr, SExpr, Var, VarKind};
pub use clause::{
    ClauseDisplay, ConstraintSystem, Head, HornClause, Literal, PredApp, PredicateSymbol, Role, StepLit,
    Tuple,
};
pub use formula::{BinaryOp, CtlFormula, UnaryOp};
pub use system::{GuardedCommand, TransitionSystem, Update};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IrError {
    #[error("duplicate variable `{0}`")]
    DuplicateVariable(String),
    #[error("undeclared variable `{0}`")]
    UndeclaredVariable(String),
    #[error("primed variable in {0}")]
    PrimedInGuard(String),
    #[error("command {site} updates {found} variables, expected {expected}")]
    UpdateArity { site: usize, expected: usize, found: usize },
    #[error("malformed constraint system: {0}")]
    Clause(String),
}
