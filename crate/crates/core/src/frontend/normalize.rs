use super::FrontendError;
use crate::ir::CtlFormula;

fn b(f: CtlFormula) -> Box<CtlFormula> {
    Box::new(f)
}

/// Rewrite `EF`, `AF` and implications away:
/// `EF ψ = EU(true, ψ)`, `AF ψ = AU(true, ψ)`, `c -> ψ = !c || ψ`.
pub fn normalize(f: &CtlFormula) -> CtlFormula {
    use CtlFormula::*;
    match f {
        Atom(a) => Atom(a.clone()),
        And(l, r) => And(b(normalize(l)), b(normalize(r))),
        Or(l, r) => Or(b(normalize(l)), b(normalize(r))),
        Implies(c, g) => Or(b(Atom(c.negate())), b(normalize(g))),
        AX(g) => AX(b(normalize(g))),
        EX(g) => EX(b(normalize(g))),
        AG(g) => AG(b(normalize(g))),
        EG(g) => EG(b(normalize(g))),
        AF(g) => AU(b(CtlFormula::tt()), b(normalize(g))),
        EF(g) => EU(b(CtlFormula::tt()), b(normalize(g))),
        AU(l, r) => AU(b(normalize(l)), b(normalize(r))),
        EU(l, r) => EU(b(normalize(l)), b(normalize(r))),
    }
}

fn is_true(f: &CtlFormula) -> bool {
    f.as_atom().is_some_and(|a| a.is_true())
}

/// A formula satisfied exactly by the states that do not satisfy `f`.
///
/// Until formulas can only be negated when they are really `F`, since the
/// logic has no release operator.
pub fn negate(f: &CtlFormula) -> Result<CtlFormula, FrontendError> {
    use CtlFormula::*;
    Ok(match f {
        Atom(a) => Atom(a.negate()),
        And(l, r) => Or(b(negate(l)?), b(negate(r)?)),
        Or(l, r) => And(b(negate(l)?), b(negate(r)?)),
        Implies(c, g) => And(b(Atom(c.clone())), b(negate(g)?)),
        AX(g) => EX(b(negate(g)?)),
        EX(g) => AX(b(negate(g)?)),
        AG(g) => EF(b(negate(g)?)),
        EF(g) => AG(b(negate(g)?)),
        AF(g) => EG(b(negate(g)?)),
        EG(g) => AF(b(negate(g)?)),
        AU(l, r) if is_true(l) => EG(b(negate(r)?)),
        EU(l, r) if is_true(l) => AG(b(negate(r)?)),
        AU(..) | EU(..) => return Err(FrontendError::NonNegatableUntil(f.to_string())),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::parse_ctl;

    #[test]
    fn rewrites_eventualities() {
        let f = normalize(&parse_ctl("EF(w >= 1)").unwrap());
        assert_eq!(f, parse_ctl("EU(true, w >= 1)").unwrap());
        let g = normalize(&parse_ctl("AG(p -> AF q)").unwrap());
        assert_eq!(g, parse_ctl("AG(p = 0 || AU(true, q))").unwrap());
        assert_eq!(normalize(&g), g);
    }

    #[test]
    fn negation_dualities() {
        let f = normalize(&parse_ctl("AG(w >= 1 -> AF(x >= 2))").unwrap());
        let n = negate(&f).unwrap();
        assert_eq!(n, parse_ctl("EF(w >= 1 && EG(x < 2))").unwrap());
        assert_eq!(negate(&parse_ctl("w >= 1").unwrap()).unwrap(), parse_ctl("w < 1").unwrap());
        let err = negate(&parse_ctl("EU(p, q)").unwrap()).unwrap_err();
        assert!(matches!(err, FrontendError::NonNegatableUntil(_)));
    }
}
