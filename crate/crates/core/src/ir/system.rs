use std::collections::HashMap;

use super::assertion::{Assertion, CmpOp, LinExpr, Var};
use super::IrError;

/// Right-hand side of a state-variable update.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Update {
    Expr(LinExpr),
    Havoc,
}

/// One disjunct of the transition relation.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GuardedCommand {
    /// Position in the source; stable across re-parses.
    pub site: usize,
    pub guard: Assertion,
    /// One entry per state variable, in declaration order.
    pub updates: Vec<Update>,
}

impl GuardedCommand {
    pub fn havoc_vars<'a>(&'a self, vars: &'a [String]) -> impl Iterator<Item = &'a String> + 'a {
        self.updates.iter().zip(vars).filter(|(u, _)| matches!(u, Update::Havoc)).map(|(_, v)| v)
    }

    pub fn has_havoc(&self) -> bool {
        self.updates.iter().any(|u| matches!(u, Update::Havoc))
    }
}

/// `(init(v), next(v, v'))` with `next` given as guarded commands.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TransitionSystem {
    vars: Vec<String>,
    init: Assertion,
    commands: Vec<GuardedCommand>,
}

impl TransitionSystem {
    /// Builds a system, checking that variables are unique, every command
    /// updates every variable exactly once, guards and init are unprimed and
    /// only mention declared variables.
    pub fn new(vars: Vec<String>, init: Assertion, commands: Vec<GuardedCommand>) -> Result<Self, IrError> {
        let mut seen = HashMap::new();
        for (i, v) in vars.iter().enumerate() {
            if seen.insert(v.clone(), i).is_some() {
                return Err(IrError::DuplicateVariable(v.clone()));
            }
        }
        let check = |a: &Assertion, ctx: &str| -> Result<(), IrError> {
            for v in a.vars() {
                if v.is_primed() {
                    return Err(IrError::PrimedInGuard(format!("{ctx}: {v}")));
                }
                if !seen.contains_key(&v.name) {
                    return Err(IrError::UndeclaredVariable(v.name));
                }
            }
            Ok(())
        };
        check(&init, "init")?;
        for c in &commands {
            check(&c.guard, &format!("guard of command {}", c.site))?;
            if c.updates.len() != vars.len() {
                return Err(IrError::UpdateArity {
                    site: c.site,
                    expected: vars.len(),
                    found: c.updates.len(),
                });
            }
            for u in &c.updates {
                if let Update::Expr(e) = u {
                    for v in e.vars() {
                        if v.is_primed() || !seen.contains_key(&v.name) {
                            return Err(IrError::UndeclaredVariable(v.to_string()));
                        }
                    }
                }
            }
        }
        Ok(TransitionSystem { vars, init, commands })
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn state_vars(&self) -> Vec<Var> {
        self.vars.iter().map(Var::state).collect()
    }

    pub fn primed_vars(&self) -> Vec<Var> {
        self.vars.iter().map(Var::primed).collect()
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v == name)
    }

    pub fn init(&self) -> &Assertion {
        &self.init
    }

    pub fn commands(&self) -> &[GuardedCommand] {
        &self.commands
    }

    pub fn command(&self, site: usize) -> Option<&GuardedCommand> {
        self.commands.iter().find(|c| c.site == site)
    }

    /// Same system with one more command appended.
    pub fn with_command(&self, guard: Assertion, updates: Vec<Update>) -> Result<Self, IrError> {
        let site = self.commands.iter().map(|c| c.site + 1).max().unwrap_or(0);
        let mut commands = self.commands.clone();
        commands.push(GuardedCommand { site, guard, updates });
        TransitionSystem::new(self.vars.clone(), self.init.clone(), commands)
    }

    /// Same system without the command at `site`.
    pub fn without_command(&self, site: usize) -> Self {
        TransitionSystem {
            vars: self.vars.clone(),
            init: self.init.clone(),
            commands: self.commands.iter().filter(|c| c.site != site).cloned().collect(),
        }
    }

    /// The step relation of one command: `guard(v) ∧ ⋀ₓ x' = upd(x)`.
    /// Havoc updates contribute no conjunct.
    pub fn command_relation(&self, cmd: &GuardedCommand) -> Assertion {
        let mut parts = vec![cmd.guard.clone()];
        for (name, upd) in self.vars.iter().zip(&cmd.updates) {
            if let Update::Expr(e) = upd {
                parts.push(Assertion::cmp(CmpOp::Eq, LinExpr::var(Var::primed(name)), e.clone()));
            }
        }
        Assertion::And(parts)
    }

    /// `next(v, v')` as a disjunction over commands; `false` when there are none.
    pub fn induced_next(&self) -> Assertion {
        match self.commands.len() {
            0 => Assertion::ff(),
            _ => Assertion::Or(self.commands.iter().map(|c| self.command_relation(c)).collect()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_trans_is_false() {
        let ts = TransitionSystem::new(vec!["x".into()], Assertion::var_eq("x", 0), vec![]).unwrap();
        assert_eq!(ts.induced_next(), Assertion::ff());
    }

    #[test]
    fn single_increment() {
        let w = Var::state("w");
        let cmd = GuardedCommand {
            site: 0,
            guard: Assertion::tt(),
            updates: vec![Update::Expr(LinExpr::var(w.clone()).add(&LinExpr::constant(1)))],
        };
        let ts = TransitionSystem::new(vec!["w".into()], Assertion::tt(), vec![cmd]).unwrap();
        let expected = Assertion::And(vec![
            Assertion::tt(),
            Assertion::cmp(
                CmpOp::Eq,
                LinExpr::var(Var::primed("w")),
                LinExpr::var(w).add(&LinExpr::constant(1)),
            ),
        ]);
        assert_eq!(ts.induced_next(), Assertion::Or(vec![expected]));
    }

    #[test]
    fn rejects_duplicates_and_undeclared() {
        let err = TransitionSystem::new(vec!["x".into(), "x".into()], Assertion::tt(), vec![]);
        assert!(matches!(err, Err(IrError::DuplicateVariable(_))));
        let err = TransitionSystem::new(vec!["x".into()], Assertion::var_eq("y", 1), vec![]);
        assert!(matches!(err, Err(IrError::UndeclaredVariable(_))));
    }
}
