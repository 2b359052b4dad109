mod common;

use std::sync::Arc;

use common::{brute_holds, formula};
use ctlhorn::chc::{verify_infinite, Certifier, InfiniteConfig, Verdict};
use ctlhorn::finite::random::{random_system, rng, RandomConfig};
use ctlhorn::finite::{solve_least, FiniteInstance};
use ctlhorn::frontend::normalize;
use ctlhorn::proofsys::{generate, inline_assertions};
use ctlhorn::skolem::{build_template, find_nondet, skolemize, GuardTemplate, SkolemConfig};
use proptest::prelude::*;

const SMALL: RandomConfig =
    RandomConfig { locations: 3, data: 3, max_commands: 6, max_formula_size: 9, general_until: true };

fn instance(seed: u64) -> Arc<FiniteInstance> {
    let ts = Arc::new(random_system(&mut rng(seed), &SMALL));
    Arc::new(FiniteInstance::new(ts, SMALL.bounds(), true, SMALL.num_states()).unwrap())
}

/// Selector tables only; havoc is explored by the instance.
fn solvable_tables(inst: &FiniteInstance, cs: &ctlhorn::ConstraintSystem) -> Vec<bool> {
    let ts = inst.system();
    let mut tpl = build_template(&find_nondet(ts), ts, SkolemConfig::default());
    tpl.affine.clear();
    tpl.candidates().map(|sk| solve_least(inst, &skolemize(cs, &tpl, &sk).unwrap()).is_ok()).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn skolemization_is_sound(seed in any::<u64>(), f in formula(true)) {
        let inst = instance(seed);
        let f = normalize(&f);
        let cs = generate(inst.system_arc().clone(), &f).unwrap();
        let proven = solvable_tables(&inst, &cs).into_iter().any(|b| b);
        prop_assert!(!proven || brute_holds(&inst, &f));
    }

    #[test]
    fn guesses_never_prove_false_properties(seed in any::<u64>(), f in formula(false)) {
        let inst = instance(seed);
        let f = normalize(&f);
        let cs = inline_assertions(&generate(inst.system_arc().clone(), &f).unwrap()).unwrap();
        let guards = GuardTemplate::new(&cs);
        let proven = guards
            .candidates()
            .any(|choice| solvable_tables(&inst, &guards.apply(&cs, &choice).unwrap()).into_iter().any(|b| b));
        prop_assert!(!proven || brute_holds(&inst, &f));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn certified_candidates_are_sound(seed in any::<u64>(), f in formula(false)) {
        let inst = instance(seed);
        let f = normalize(&f);
        let cfg = InfiniteConfig { max_candidates: 64, ..InfiniteConfig::default() };
        let v = verify_infinite(inst.system_arc().clone(), &f, &cfg, &Certifier::Finite(inst.clone())).unwrap();
        if let Verdict::Holds(w) = v {
            prop_assert!(brute_holds(&inst, &f), "{} proven by {:?}", f, w.candidate);
        }
    }
}
