use super::*;
use crate::quantum::{
    depolarizing_channel, isotropic_state, phi_plus_preparation, random_channel, random_ppt_channel, state_preparation, swap_channel,
    BipartiteChannel, ChannelDims, A0, B0,
};
use crate::tensor::{DimSpec, LabeledMatrix};

fn maximally_mixed() -> BipartiteChannel {
    let spec = DimSpec::new([("A1", 2), ("B1", 2)]).unwrap();
    state_preparation(&LabeledMatrix::identity(&spec).scale(0.25)).unwrap()
}

fn werner_boundary() -> BipartiteChannel {
    state_preparation(&isotropic_state(2, 0.5)).unwrap()
}

#[test]
fn diamond_norm_of_channels_and_states() {
    let n = random_channel(ChannelDims::new(2, 1, 1, 2), 4).unwrap();
    let r = diamond_norm_hp(n.choi(), &[A0, B0]).unwrap();
    assert!((r.value - 1.0).abs() < 1e-7, "{}", r.value);
    let zero = n.as_map().sub(&n.as_map()).unwrap();
    let r = diamond_norm_hp(zero.choi(), &[A0, B0]).unwrap();
    assert!(r.value.abs() < 1e-7);
    // trivial input: trace norm of F/2
    let g = phi_plus_preparation(2).gamma();
    let r = diamond_norm_hp(g.choi(), &[A0, B0]).unwrap();
    assert!((r.value - 2.0).abs() < 1e-7, "{}", r.value);
    assert!(r.gap <= 1e-6 && r.residual <= 1e-7);
}

#[test]
fn negativity_values() {
    let phi = phi_plus_preparation(2);
    assert!((negativity(&phi).unwrap().value - 0.5).abs() < 1e-6);
    assert!((log_negativity(&phi).unwrap().value - 1.0).abs() < 1e-6);
    assert!(negativity(&maximally_mixed()).unwrap().value.abs() < 1e-7);
    let ppt = random_ppt_channel(ChannelDims::new(2, 1, 1, 2), 9).unwrap();
    assert!(log_negativity(&ppt).unwrap().value.abs() < 1e-6);
}

#[test]
fn swap_has_two_edits() {
    let s = swap_channel(2);
    assert!((log_negativity(&s).unwrap().value - 2.0).abs() < 1e-5);
    let l = ln_max(&s).unwrap();
    assert!((l.value - 2.0).abs() < 1e-5, "{}", l.value);
    assert!(!l.is_flagged(), "{:?} {:?}", l.zero.flag, l.one.flag);
}

#[test]
fn ln_max_of_maximally_entangled_state() {
    let l = ln_max(&phi_plus_preparation(2)).unwrap();
    assert!((l.zero.value - 1.0).abs() < 1e-6);
    assert!((l.one.value - 1.0).abs() < 1e-6);
    assert!((l.zero.dual_value.unwrap() - 1.0).abs() < 1e-6);
    assert!(!l.is_flagged());
    let mm = ln_max_minimax(&phi_plus_preparation(2)).unwrap();
    assert!((mm.value - 1.0).abs() < 1e-6);
}

#[test]
fn ln_max_vanishes_on_ppt_inputs() {
    for n in [werner_boundary(), maximally_mixed(), random_ppt_channel(ChannelDims::new(2, 1, 2, 2), 3).unwrap()] {
        let l = ln_max(&n).unwrap();
        assert!(l.value.abs() < 1e-6, "{}", l.value);
        assert!(!l.is_flagged(), "{:?}", l.zero.flag);
    }
}

#[test]
fn ln_max_duals_agree_on_random_channel() {
    let n = random_channel(ChannelDims::new(2, 2, 1, 2), 17).unwrap();
    let l = ln_max(&n).unwrap();
    for r in [&l.zero, &l.one] {
        assert!((r.value - r.dual_value.unwrap()).abs() < 1e-5, "{} vs {:?}", r.value, r.dual_value);
        assert!(r.value >= -1e-9);
    }
    let mm = ln_max_minimax(&n).unwrap();
    assert!(mm.value >= l.value - 1e-6);
}

#[test]
fn conversion_distance_examples() {
    let target = phi_plus_preparation(2);
    for src in [maximally_mixed(), werner_boundary()] {
        let d = conversion_distance_ppt(&src, &target).unwrap();
        assert!((d.value - 0.5).abs() < 1e-5, "{}", d.value);
        assert!(!d.is_flagged(), "{:?}", d.flag);
    }
    let d = conversion_distance_ppt(&target, &target).unwrap();
    assert!(d.value.abs() < 1e-6);
    let d = conversion_distance_ppt(&werner_boundary(), &maximally_mixed()).unwrap();
    assert!(d.value.abs() < 1e-6);
    assert!(!d.is_flagged(), "{:?}", d.flag);
}

#[test]
fn family_on_depolarizing_probe() {
    let probe = depolarizing_channel(ChannelDims::new(2, 1, 1, 2));
    let n = random_channel(ChannelDims::new(1, 1, 2, 2), 5).unwrap();
    let f = f_p(&n, &probe).unwrap();
    assert!((f.value - 1.0).abs() < 1e-6, "{}", f.value);
    let g = g_p(&n, &probe).unwrap();
    assert!(g.value.abs() < 1e-6);
}

#[test]
fn family_vanishes_on_ppt_channels() {
    let probe = phi_plus_preparation(2);
    let n = random_ppt_channel(ChannelDims::new(2, 1, 1, 2), 2).unwrap();
    let g = g_p(&n, &probe).unwrap();
    assert!(g.value.abs() < 1e-5, "{}", g.value);
    // the φ⁺ preparation itself reaches the target exactly
    let g = g_p(&probe, &probe).unwrap();
    assert!((g.value - 0.5).abs() < 1e-5, "{}", g.value);
}

#[test]
fn exact_cost_examples() {
    let c = exact_cost_single_shot(&phi_plus_preparation(2), M_MAX).unwrap();
    assert_eq!(c.m, Some(2));
    assert!(!c.below.unwrap().feasible);
    assert!(c.below.unwrap().margin < -0.1);
    assert!(c.certificate_slack.unwrap() > -1e-7);
    assert!(c.relaxed_margin.unwrap() > -1e-7);
    for n in [maximally_mixed(), werner_boundary()] {
        let c = exact_cost_single_shot(&n, M_MAX).unwrap();
        assert_eq!(c.m, Some(1));
        assert_eq!(c.log2_m(), Some(0.0));
    }
}

#[test]
fn exact_cost_budget_is_reported() {
    let c = exact_cost_single_shot(&swap_channel(2), 2).unwrap();
    assert!(c.exceeds_budget());
    assert!(c.probes.iter().all(|p| !p.feasible));
}

#[test]
fn cost_bounds_for_maximally_entangled_state() {
    let b = cost_bounds_check(&phi_plus_preparation(2)).unwrap();
    assert!((b.ln_max - 1.0).abs() < 1e-6);
    assert!(b.lower.abs() < 1e-6 && (b.upper - 2.0).abs() < 1e-6);
    assert_eq!(b.sequence.len(), 2);
    assert!((b.sequence[1].1 - 1.0).abs() < 1e-12);
    assert!((b.ln_max_square.unwrap() - 2.0).abs() < 1e-5);
}

#[test]
fn solver_failure_carries_dump() {
    let e = MeasureError::NotOptimal { what: "x".into(), status: crate::solver::Status::MaxIter, message: "m".into(), dump: "1 0".into() };
    assert!(e.to_string().contains("max_iter"));
}
