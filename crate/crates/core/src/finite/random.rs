//! Seeded random transition systems and formulas for equivalence testing.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::frontend::normalize;
use crate::ir::{Assertion, CmpOp, CtlFormula, GuardedCommand, LinExpr, TransitionSystem, Update, Var};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RandomConfig {
    /// Values of the location variable `pc` are `0..locations`.
    pub locations: i64,
    /// Values of the data variable `x` are `0..data`.
    pub data: i64,
    pub max_commands: usize,
    /// Maximum formula size after normalization.
    pub max_formula_size: usize,
    /// Allow until formulas with a non-trivial left operand (these cannot
    /// be negated).
    pub general_until: bool,
}

impl Default for RandomConfig {
    fn default() -> Self {
        RandomConfig { locations: 5, data: 6, max_commands: 9, max_formula_size: 9, general_until: true }
    }
}

impl RandomConfig {
    pub fn bounds(&self) -> Vec<(i64, i64)> {
        vec![(0, self.locations - 1), (0, self.data - 1)]
    }

    pub fn num_states(&self) -> usize {
        (self.locations * self.data) as usize
    }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn pc() -> LinExpr {
    LinExpr::var(Var::state("pc"))
}

fn x() -> LinExpr {
    LinExpr::var(Var::state("x"))
}

fn random_atom(rng: &mut impl Rng, cfg: &RandomConfig) -> Assertion {
    let op = *[CmpOp::Lt, CmpOp::Le, CmpOp::Eq, CmpOp::Ge, CmpOp::Gt].choose(rng).unwrap();
    match rng.gen_range(0..5) {
        0 => Assertion::cmp(op, pc(), LinExpr::constant(rng.gen_range(0..cfg.locations))),
        1 => Assertion::cmp(op, x().add(&pc()), LinExpr::constant(rng.gen_range(0..cfg.data + 2))),
        _ => Assertion::cmp(op, x(), LinExpr::constant(rng.gen_range(0..cfg.data))),
    }
}

/// Two variables, `pc` and `x`; every guard pins `pc`, and some locations
/// get two commands under one guard.
pub fn random_system(rng: &mut impl Rng, cfg: &RandomConfig) -> TransitionSystem {
    let n_cmd = rng.gen_range(1..=cfg.max_commands);
    let mut commands = Vec::with_capacity(n_cmd);
    let mut site = 0;
    while commands.len() < n_cmd {
        let at = rng.gen_range(0..cfg.locations);
        let mut guard = Assertion::var_eq("pc", at);
        if rng.gen_bool(0.3) {
            guard = Assertion::And(vec![guard, random_atom(rng, cfg)]);
        }
        let copies = if rng.gen_bool(0.25) { 2 } else { 1 };
        for _ in 0..copies {
            let target = LinExpr::constant(rng.gen_range(0..cfg.locations));
            let upd_x = match rng.gen_range(0..8) {
                0 => Update::Havoc,
                1 => Update::Expr(LinExpr::constant(rng.gen_range(0..cfg.data))),
                2 | 3 => Update::Expr(x().add(&LinExpr::constant(1))),
                4 => Update::Expr(x().sub(&LinExpr::constant(1))),
                _ => Update::Expr(x()),
            };
            commands.push(GuardedCommand {
                site,
                guard: guard.clone(),
                updates: vec![Update::Expr(target), upd_x],
            });
            site += 1;
        }
    }
    let init = match rng.gen_range(0..3) {
        0 => Assertion::var_eq("pc", 0),
        1 => Assertion::And(vec![Assertion::var_eq("pc", 0), random_atom(rng, cfg)]),
        _ => random_atom(rng, cfg),
    };
    TransitionSystem::new(vec!["pc".into(), "x".into()], init, commands).expect("well formed")
}

fn formula_of_depth(rng: &mut impl Rng, cfg: &RandomConfig, depth: usize) -> CtlFormula {
    let b = Box::new;
    if depth == 0 || rng.gen_bool(0.2) {
        return match rng.gen_range(0..12) {
            0 => CtlFormula::tt(),
            1 => CtlFormula::Atom(Assertion::ff()),
            _ => CtlFormula::Atom(random_atom(rng, cfg)),
        };
    }
    let sub = |rng: &mut _| b(formula_of_depth(rng, cfg, depth - 1));
    match rng.gen_range(0..13) {
        0 => CtlFormula::AX(sub(rng)),
        1 => CtlFormula::EX(sub(rng)),
        2 => CtlFormula::AG(sub(rng)),
        3 => CtlFormula::EG(sub(rng)),
        4 => CtlFormula::AF(sub(rng)),
        5 => CtlFormula::EF(sub(rng)),
        6 => CtlFormula::And(sub(rng), sub(rng)),
        7 => CtlFormula::Or(sub(rng), sub(rng)),
        8 => CtlFormula::Implies(random_atom(rng, cfg), sub(rng)),
        9 if cfg.general_until => CtlFormula::AU(sub(rng), sub(rng)),
        10 if cfg.general_until => CtlFormula::EU(sub(rng), sub(rng)),
        _ => {
            if rng.gen_bool(0.5) {
                CtlFormula::AU(b(CtlFormula::tt()), sub(rng))
            } else {
                CtlFormula::EU(b(CtlFormula::tt()), sub(rng))
            }
        }
    }
}

/// A normalized formula of at most `cfg.max_formula_size` nodes.
pub fn random_formula(rng: &mut impl Rng, cfg: &RandomConfig) -> CtlFormula {
    loop {
        let depth = rng.gen_range(1..=4);
        let f = normalize(&formula_of_depth(rng, cfg, depth));
        if f.size() <= cfg.max_formula_size {
            return f;
        }
    }
}
