mod common;

use std::sync::Arc;

use common::{brute_holds, brute_sat, formula};
use ctlhorn::finite::random::{random_system, rng, RandomConfig};
use ctlhorn::finite::{mc_ctl, solve_finite, FiniteInstance};
use ctlhorn::frontend::{negate, normalize};
use ctlhorn::proofsys::generate;
use proptest::prelude::*;

/// Small enough for path enumeration.
const SMALL: RandomConfig =
    RandomConfig { locations: 3, data: 3, max_commands: 6, max_formula_size: 9, general_until: true };

fn instance(seed: u64) -> Arc<FiniteInstance> {
    let ts = Arc::new(random_system(&mut rng(seed), &SMALL));
    Arc::new(FiniteInstance::new(ts, SMALL.bounds(), true, SMALL.num_states()).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn fixpoints_match_path_enumeration(seed in any::<u64>(), f in formula(true)) {
        let inst = instance(seed);
        prop_assert_eq!(mc_ctl(&inst, &f), brute_sat(&inst, &f));
    }

    #[test]
    fn solvable_iff_formula_holds(seed in any::<u64>(), f in formula(true)) {
        let inst = instance(seed);
        let f = normalize(&f);
        let cs = generate(inst.system_arc().clone(), &f).unwrap();
        prop_assert_eq!(solve_finite(&inst, &cs).is_solvable(), brute_holds(&inst, &f), "{}", f);
    }

    #[test]
    fn negation_complements(seed in any::<u64>(), f in formula(false)) {
        let inst = instance(seed);
        let pos = brute_sat(&inst, &f);
        let neg = brute_sat(&inst, &negate(&normalize(&f)).unwrap());
        prop_assert!(pos.iter().zip(&neg).all(|(a, b)| a != b));
    }

    #[test]
    fn normalize_keeps_denotation(seed in any::<u64>(), f in formula(true)) {
        let inst = instance(seed);
        let g = normalize(&f);
        prop_assert_eq!(brute_sat(&inst, &f), brute_sat(&inst, &g));
        prop_assert_eq!(normalize(&g), g);
    }
}
