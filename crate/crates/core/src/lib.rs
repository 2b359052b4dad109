//! CTL verification of transition systems through forall-exists Horn
//! constraints with well-foundedness conditions.

pub mod chc;
pub mod finite;
pub mod frontend;
pub mod ir;
pub mod proofsys;
pub mod skolem;

pub use ir::*;
