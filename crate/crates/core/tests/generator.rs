mod common;

use std::collections::BTreeSet;
use std::sync::Arc;

use common::{formula, wloop};
use ctlhorn::finite::random::{random_system, rng, RandomConfig};
use ctlhorn::frontend::{normalize, parse_ctl};
use ctlhorn::proofsys::generate;
use ctlhorn::{CtlFormula, Literal, Role, UnaryOp};
use proptest::prelude::*;

/// AG(EF(AG(...(w >= 1)))) with `n` temporal operators.
fn alternating(n: usize) -> CtlFormula {
    let mut f = parse_ctl("w >= 1").unwrap();
    for i in (0..n).rev() {
        let op = if i % 2 == 0 { UnaryOp::AG } else { UnaryOp::EF };
        f = CtlFormula::unary(op, f);
    }
    normalize(&f)
}

fn size(cs: &ctlhorn::ConstraintSystem) -> usize {
    cs.clauses().len() + cs.wf_marks().len()
}

#[test]
fn clause_count_is_linear_in_depth() {
    let counts: Vec<usize> = (1..=10).map(|n| size(&generate(wloop(), &alternating(n)).unwrap())).collect();
    for (i, &c) in counts.iter().enumerate() {
        let n = i + 1;
        assert!(c <= 4 * n + 3, "depth {n}: {c} constraints");
    }
    // constant growth per alternation pair
    let steps: BTreeSet<usize> = counts.windows(3).map(|w| w[2] - w[0]).collect();
    assert_eq!(steps.len(), 1, "{counts:?}");
}

#[test]
fn generation_is_deterministic() {
    let f = alternating(6);
    assert_eq!(generate(wloop(), &f).unwrap().to_string(), generate(wloop(), &f).unwrap().to_string());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn generated_systems_are_well_formed(seed in any::<u64>(), f in formula(true)) {
        let ts = Arc::new(random_system(&mut rng(seed), &RandomConfig::default()));
        let f = normalize(&f);
        let cs = generate(ts.clone(), &f).unwrap();
        let declared: BTreeSet<&str> = cs.decls().iter().map(|d| d.name.as_str()).collect();
        for c in cs.clauses() {
            for l in c.body.iter().chain(c.head.items()) {
                if let Literal::Pred(p) | Literal::NotPred(p) = l {
                    prop_assert!(declared.contains(p.name.as_str()), "{}", p.name);
                }
            }
        }
        let ranks: Vec<&str> =
            cs.decls().iter().filter(|d| d.role == Role::Rank).map(|d| d.name.as_str()).collect();
        let mut marks: Vec<&str> = cs.wf_marks().iter().map(String::as_str).collect();
        marks.sort();
        let mut sorted = ranks.clone();
        sorted.sort();
        prop_assert_eq!(marks, sorted);
        prop_assert_eq!(cs.to_string(), generate(ts, &f).unwrap().to_string());
    }
}
