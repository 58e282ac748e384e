use proptest::prelude::*;

use hrap_env::{generate_with_seed, partial_makespan, HrapConfig};

fn small_config() -> impl Strategy<Value = HrapConfig> {
    (1usize..5, 1usize..4, 1usize..3, 1u32..10, 0u32..15).prop_map(|(o, e, t, lo, span)| {
        HrapConfig {
            num_officers: o,
            num_events: e,
            num_tasks: t,
            value_lo: lo,
            value_hi: lo + span,
            seed: 0,
        }
    })
}

proptest! {
    #[test]
    fn sampled_instances_always_validate(config in small_config(), seed in any::<u64>()) {
        let instance = generate_with_seed(&config, seed).unwrap();
        prop_assert!(instance.validate().is_ok());
    }

    #[test]
    fn filling_slots_never_decreases_the_partial_makespan(
        config in small_config(),
        seed in any::<u64>(),
        picks in proptest::collection::vec(any::<usize>(), 12),
    ) {
        let instance = generate_with_seed(&config, seed).unwrap();
        let slots = config.num_slots();
        let mut assignment = vec![None; slots];
        let mut prev = 0u64;
        for (slot, pick) in (0..slots).zip(picks) {
            assignment[slot] = Some(pick % config.num_officers);
            let pm = partial_makespan(&instance, &assignment).unwrap();
            prop_assert!(pm >= prev);
            prop_assert!(pm <= instance.psi());
            prev = pm;
        }
    }
}
