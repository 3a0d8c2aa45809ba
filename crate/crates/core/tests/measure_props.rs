//! Measure invariants on small random channels.

use proptest::prelude::*;
use pptkit::measures::{ln_max, log_negativity, negativity};
use pptkit::quantum::{random_channel, random_ppt_channel, ChannelDims};

const SOLVE_TOL: f64 = 1e-6;

fn shape() -> impl Strategy<Value = ChannelDims> {
    prop_oneof![
        Just(ChannelDims::new(1, 1, 2, 2)),
        Just(ChannelDims::new(1, 2, 2, 1)),
        Just(ChannelDims::new(2, 1, 1, 2)),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn negativities_are_nonnegative_and_ordered(seed in any::<u64>(), d in shape()) {
        let n = random_channel(d, seed).unwrap();
        let neg = negativity(&n).unwrap().value;
        let ln = log_negativity(&n).unwrap().value;
        let max = ln_max(&n).unwrap().value;
        prop_assert!(neg >= -SOLVE_TOL);
        prop_assert!(ln >= -SOLVE_TOL);
        prop_assert!((ln - (2.0 * neg + 1.0).log2()).abs() <= SOLVE_TOL);
        prop_assert!(ln <= max + SOLVE_TOL);
    }

    #[test]
    fn ppt_channels_carry_no_entanglement(seed in any::<u64>(), d in shape()) {
        let n = random_ppt_channel(d, seed).unwrap();
        prop_assert!(negativity(&n).unwrap().value.abs() <= SOLVE_TOL);
        prop_assert!(ln_max(&n).unwrap().value.abs() <= SOLVE_TOL);
    }
}
