//! Acceptance suite: twelve analytic and property criteria at their stated
//! tolerances and runtimes. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any fails. Positional arguments `C3 C7 ...` select a subset.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use pptkit::measures::{
    conversion_distance_ppt, exact_cost_single_shot, f_p, g_p, ln_max, ln_max_kind, log_negativity, negativity, sandwich_slack, ExactCost, LnKind,
    M_MAX,
};
use pptkit::quantum::{
    apply_superchannel, apply_supermap_choi, comb_apply, comb_apply_choi, comb_from_channels, comb_gamma, isotropic_state, one_way_identity,
    phi_plus_preparation, phi_plus_state, random_channel, random_channel_with, random_hermitian, random_ppt_channel, random_ppt_superchannel,
    random_superchannel, rng, state_preparation, superchannel_gamma, swap_channel, BipartiteChannel, ChannelDims, SuperchannelShape, A0,
    A1, A1P, B0, B1, B1P, SUPERCHANNEL_B_SIDE,
};
use pptkit::solver::{audit_take, AuditEntry, Status};
use pptkit::tensor::{DimSpec, LabeledMatrix};
use pptkit::witness_scenarios::{bound_povm_channel, no_go_trial, random_witness, tiles_state, witness_affine_part, witness_validate};

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn e<E: std::fmt::Display>(x: E) -> String {
    x.to_string()
}

/// Channel dims with total Choi dimension four and every factor at most two.
const FOUR_DIM: [ChannelDims; 4] = [ChannelDims::new(2, 1, 1, 2), ChannelDims::new(1, 1, 2, 2), ChannelDims::new(1, 2, 2, 1), ChannelDims::new(2, 1, 2, 1)];

fn maximally_mixed() -> BipartiteChannel {
    let spec = DimSpec::new([(A1, 2), (B1, 2)]).unwrap();
    state_preparation(&LabeledMatrix::identity(&spec).scale(0.25)).unwrap()
}

fn werner_half() -> BipartiteChannel {
    state_preparation(&isotropic_state(2, 0.5)).unwrap()
}

fn c1() -> Outcome {
    let phi = phi_plus_preparation(2);
    // oracle: Γ-image is F/2 with eigenvalues ±1/2, trace norm 2
    let ev = phi.gamma().choi().eigenvalues().map_err(e)?;
    let tn: f64 = ev.iter().map(|x| x.abs()).sum();
    ensure((tn - 2.0).abs() < 1e-12, || format!("trace norm of F/2 = {tn}"))?;
    let (on, oln) = ((tn - 1.0) / 2.0, tn.log2());
    let l = ln_max(&phi).map_err(e)?.value;
    let n = negativity(&phi).map_err(e)?.value;
    let ln = log_negativity(&phi).map_err(e)?.value;
    ensure((l - 1.0).abs() <= 1e-5, || format!("LN_max = {l}"))?;
    ensure((n - on).abs() <= 1e-5, || format!("negativity = {n}"))?;
    ensure((ln - oln).abs() <= 1e-5, || format!("LN = {ln}"))?;
    Ok(format!("LN_max = {l:.9}, negativity = {n:.9}, LN = {ln:.9}"))
}

fn c2() -> Outcome {
    let l = ln_max(&swap_channel(2)).map_err(e)?;
    ensure((l.value - 2.0).abs() <= 1e-4, || format!("LN_max(swap) = {}", l.value))?;
    Ok(format!("LN_max(swap) = {:.9}", l.value))
}

fn c3() -> Outcome {
    let phi = phi_plus_preparation(2);
    let c = exact_cost_single_shot(&phi, M_MAX).map_err(e)?;
    ensure(c.m == Some(2), || format!("m* = {:?}", c.m))?;
    let slack = c.certificate_slack.unwrap_or(f64::NEG_INFINITY);
    ensure(slack >= -1e-7, || format!("certificate slack {slack:.3e}"))?;
    let below = c.below.ok_or("no probe at m = 1")?;
    ensure(!below.feasible && below.m == 1, || format!("m = 1 probe {below:?}"))?;
    // analytic oracles: R = (I − φ⁺)/3 works at m = 2; at m = 1 the lower side needs F/2 ⪰ 0
    let spec = DimSpec::new([(A1, 2), (B1, 2)]).unwrap();
    let r = state_preparation(&LabeledMatrix::identity(&spec).sub(&phi_plus_state(2)).map_err(e)?.scale(1.0 / 3.0)).map_err(e)?;
    let oracle = sandwich_slack(phi.choi(), r.choi(), 2).map_err(e)?;
    ensure(oracle >= -1e-10, || format!("analytic R slack {oracle:.3e}"))?;
    let f_min = phi.gamma().choi().min_eigenvalue().map_err(e)?;
    ensure(f_min < -0.4, || format!("min eig of F/2 = {f_min}"))?;
    Ok(format!("E = log2 {} = {:.1}; m=1 margin {:.3e}; certificate slack {slack:.2e}", 2, c.log2_m().unwrap(), below.margin))
}

fn c4() -> Outcome {
    let probes = [phi_plus_preparation(2), one_way_identity(2), random_channel(ChannelDims::new(1, 2, 2, 1), 404).map_err(e)?];
    let (mut worst_n, mut worst_l, mut worst_g) = (0.0f64, 0.0f64, 0.0f64);
    for seed in 0..50u64 {
        let dims = FOUR_DIM[(seed % 3) as usize];
        let n = random_ppt_channel(dims, 1000 + seed).map_err(e)?;
        let neg = negativity(&n).map_err(e)?.value;
        let l = ln_max(&n).map_err(e)?.value;
        let c = exact_cost_single_shot(&n, M_MAX).map_err(e)?;
        ensure(neg <= 1e-6, || format!("seed {seed}: negativity {neg:.3e}"))?;
        ensure(l <= 1e-5, || format!("seed {seed}: LN_max {l:.3e}"))?;
        ensure(c.m == Some(1), || format!("seed {seed}: m* = {:?}", c.m))?;
        for (k, p) in probes.iter().enumerate() {
            let g = g_p(&n, p).map_err(e)?.value;
            ensure(g.abs() <= 1e-5, || format!("seed {seed}, probe {k}: g_p = {g:.3e}"))?;
            worst_g = worst_g.max(g.abs());
        }
        worst_n = worst_n.max(neg);
        worst_l = worst_l.max(l);
    }
    Ok(format!("50 channels: max negativity {worst_n:.2e}, max LN_max {worst_l:.2e}, cost 0, max |g_p| {worst_g:.2e}"))
}

fn c5() -> Outcome {
    let probe = phi_plus_preparation(2);
    let mut r = rng(55);
    let mut worst = f64::NEG_INFINITY;
    for k in 0..100u64 {
        let slot = FOUR_DIM[(k % 4) as usize];
        let out = FOUR_DIM[((k / 4) % 4) as usize];
        let memory = if k % 2 == 0 { (1, 1) } else { (2, 1) };
        let n = random_channel_with(&mut r, slot).map_err(e)?;
        let t = random_ppt_superchannel(SuperchannelShape::new(slot, out, memory), 5000 + k).map_err(e)?;
        let tn = apply_superchannel(&t, &n).map_err(e)?;
        let pairs = [
            ("LN_max", ln_max(&tn).map_err(e)?.value, ln_max(&n).map_err(e)?.value),
            ("negativity", negativity(&tn).map_err(e)?.value, negativity(&n).map_err(e)?.value),
            ("f_p", f_p(&tn, &probe).map_err(e)?.value, f_p(&n, &probe).map_err(e)?.value),
        ];
        for (name, after, before) in pairs {
            ensure(after <= before + 1e-5, || format!("pair {k}: {name} {after:.9} > {before:.9}"))?;
            worst = worst.max(after - before);
        }
    }
    Ok(format!("100 pairs; largest increase {worst:.2e}"))
}

fn c6() -> Outcome {
    let mut r = rng(66);
    let mut worst = 0.0f64;
    for k in 0..20usize {
        let n = random_channel_with(&mut r, FOUR_DIM[k % 4]).map_err(e)?;
        let m = random_channel_with(&mut r, FOUR_DIM[(k / 4 + k) % 4]).map_err(e)?;
        let nm = n.tensor(&m).map_err(e)?;
        for kind in [LnKind::Zero, LnKind::One] {
            let joint = ln_max_kind(&nm, kind).map_err(e)?.value;
            let sum = ln_max_kind(&n, kind).map_err(e)?.value + ln_max_kind(&m, kind).map_err(e)?.value;
            let d = (joint - sum).abs();
            ensure(d <= 1e-4, || format!("pair {k} {kind:?}: {joint:.9} vs {sum:.9}"))?;
            worst = worst.max(d);
        }
    }
    Ok(format!("20 pairs; largest deviation {worst:.2e}"))
}

fn sandwich_holds(c: &ExactCost) -> Result<(f64, f64, f64), String> {
    let base = c.ln_max.exp2();
    let lower = if base - 1.0 > 1.0 { (base - 1.0).log2() } else { 0.0 };
    let upper = (base + 2.0).log2();
    let cost = c.log2_m().ok_or_else(|| format!("no feasible rank up to {}", c.m_max))?;
    ensure(lower - 1e-4 <= cost && cost <= upper + 1e-4, || format!("E = {cost} outside [{lower}, {upper}]"))?;
    Ok((lower, cost, upper))
}

fn c7() -> Outcome {
    let mut channels: Vec<BipartiteChannel> = (0..20).map(|s| random_channel(ChannelDims::new(2, 2, 2, 2), 700 + s)).collect::<Result<_, _>>().map_err(e)?;
    channels.push(phi_plus_preparation(2));
    channels.push(random_ppt_channel(ChannelDims::new(2, 2, 2, 2), 777).map_err(e)?);
    let mut ranks = std::collections::BTreeMap::new();
    for (k, n) in channels.iter().enumerate() {
        let c = exact_cost_single_shot(n, M_MAX).map_err(e)?;
        sandwich_holds(&c).map_err(|m| format!("channel {k}: {m}"))?;
        *ranks.entry(c.m.unwrap()).or_insert(0) += 1;
    }
    Ok(format!("22 channels inside the sandwich; m* counts {ranks:?}"))
}

fn c8() -> Outcome {
    let target = phi_plus_preparation(2);
    let mut worst_pd = 0.0f64;
    let mut check = |name: &str, src: &BipartiteChannel, dst: &BipartiteChannel, want: Option<f64>, tol: f64| -> Result<f64, String> {
        let d = conversion_distance_ppt(src, dst).map_err(e)?;
        let dual = d.dual_value.ok_or("no dual value")?;
        let pd = (d.primal_value - dual).abs();
        ensure(pd <= 1e-4, || format!("{name}: primal {} vs dual {dual}", d.primal_value))?;
        worst_pd = worst_pd.max(pd);
        match want {
            Some(w) => ensure((d.value - w).abs() <= tol, || format!("{name}: d = {}", d.value))?,
            None => ensure(d.value <= tol, || format!("{name}: d = {}", d.value))?,
        }
        Ok(d.value)
    };
    let du = check("u", &maximally_mixed(), &target, Some(0.5), 1e-4)?;
    let dw = check("Werner 1/2", &werner_half(), &target, Some(0.5), 1e-4)?;
    let dp = check("phi+ to phi+", &target, &target, None, 1e-5)?;
    let ppt_src = random_ppt_channel(ChannelDims::new(2, 1, 1, 2), 81).map_err(e)?;
    let ppt_dst = random_ppt_channel(ChannelDims::new(1, 1, 2, 2), 82).map_err(e)?;
    let dq = check("PPT to PPT", &ppt_src, &ppt_dst, None, 1e-6)?;
    let dq2 = check("u to Werner 1/2", &maximally_mixed(), &werner_half(), None, 1e-6)?;
    Ok(format!("d(u) = {du:.7}, d(W) = {dw:.7}, d(phi+) = {dp:.1e}, d(PPT) = {:.1e}; max |primal - dual| {worst_pd:.1e}", dq.max(dq2)))
}

fn c9() -> Outcome {
    let mut worst = 0.0f64;
    let mut note = |d: f64, what: &str| -> Result<(), String> {
        worst = worst.max(d);
        ensure(d <= 1e-10, || format!("{what}: {d:.3e}"))
    };
    for seed in 0..5u64 {
        let slot = FOUR_DIM[seed as usize % 4];
        let out = FOUR_DIM[(seed as usize + 1) % 4];
        let shape = SuperchannelShape::new(slot, out, (2, 1));
        let t = random_superchannel(shape, 900 + seed).map_err(e)?;
        let n = random_channel(slot, 950 + seed).map_err(e)?;
        // (Θ[N])^Γ = Θ^Γ[N^Γ]
        let lhs = apply_superchannel(&t, &n).map_err(e)?.gamma();
        let rhs = apply_supermap_choi(superchannel_gamma(&t).choi(), n.gamma().choi()).map_err(e)?;
        note(lhs.choi().max_abs_diff(rhs.choi()).map_err(e)?, "superchannel Γ covariance")?;
        // marginal conditions of the pre/post construction
        let j = t.choi();
        let d11 = (slot.a1 * slot.b1) as f64;
        let m1 = j.trace_out(&[A1P, B1P]).map_err(e)?;
        let pre = j.trace_out(&[A1, B1, A1P, B1P]).map_err(e)?.expand_to(m1.spec()).map_err(e)?.scale(1.0 / d11);
        note(m1.max_abs_diff(&pre).map_err(e)?, "causal marginal")?;
        let m2 = j.trace_out(&[A0, B0, A1P, B1P]).map_err(e)?;
        note(m2.max_abs_diff(&LabeledMatrix::identity(m2.spec())).map_err(e)?, "unital marginal")?;
        // PT involution on channels and superchannels
        let x = random_hermitian(&mut rng(990 + seed), j.spec());
        let back = x.partial_transpose(&SUPERCHANNEL_B_SIDE).map_err(e)?.partial_transpose(&SUPERCHANNEL_B_SIDE).map_err(e)?;
        note(back.max_abs_diff(&x).map_err(e)?, "PT involution")?;
        note(n.gamma().gamma().choi().max_abs_diff(n.choi()).map_err(e)?, "channel Γ involution")?;
        // (C[N1, N2])^Γ = C^Γ[N1^Γ, N2^Γ]
        let mut r = rng(970 + seed);
        let memory = [(2, 1), (1, 2)];
        let layers = [ChannelDims::new(1, 1, 2, 2), ChannelDims::new(2, 2, 2, 2), ChannelDims::new(2, 2, 1, 1)];
        let layers: Vec<BipartiteChannel> = layers.iter().map(|&d| random_channel_with(&mut r, d)).collect::<Result<_, _>>().map_err(e)?;
        let c = comb_from_channels(&layers, &memory).map_err(e)?;
        let ins = [random_channel_with(&mut r, c.layout().slot_dims(1)).map_err(e)?, random_channel_with(&mut r, c.layout().slot_dims(2)).map_err(e)?];
        let lhs = comb_apply(&c, &ins).map_err(e)?.gamma();
        let g_ins: Vec<LabeledMatrix> = ins.iter().map(|n| n.gamma().choi().clone()).collect();
        let rhs = comb_apply_choi(c.layout(), comb_gamma(&c).choi(), &g_ins).map_err(e)?;
        note(lhs.choi().max_abs_diff(rhs.choi()).map_err(e)?, "comb Γ covariance")?;
    }
    Ok(format!("5 seeds x 6 identities; largest defect {worst:.2e}"))
}

fn c10() -> Outcome {
    let mut min_ev = f64::INFINITY;
    for seed in 0..100u64 {
        let r = no_go_trial(2, 10_000 + seed, seed % 2 == 1).map_err(e)?;
        ensure(r.two_qubit_state, || format!("trial {seed}: output is not a two-qubit state"))?;
        ensure(r.pt_min_eigenvalue >= -1e-8 && !r.violation, || format!("trial {seed}: PT min eigenvalue {:.3e}", r.pt_min_eigenvalue))?;
        min_ev = min_ev.min(r.pt_min_eigenvalue);
    }
    let (_, rep) = bound_povm_channel(&tiles_state()).map_err(e)?;
    ensure(rep.is_ppt_channel, || "tiles POVM channel is not PPT".into())?;
    ensure(rep.ln_max <= 1e-5, || format!("tiles POVM LN_max = {:.3e}", rep.ln_max))?;
    Ok(format!("100 trials, smallest PT eigenvalue {min_ev:.3e}; tiles POVM PPT with LN_max {:.1e}", rep.ln_max))
}

fn c11() -> Outcome {
    let (slot, out) = (ChannelDims::new(2, 1, 1, 2), ChannelDims::new(1, 2, 2, 1));
    let mut r = rng(1111);
    let (mut min, mut affine) = (f64::INFINITY, 0.0f64);
    let supers: Vec<_> = (0..20).map(|s| random_superchannel(SuperchannelShape::new(slot, out, (2, 2)), 1200 + s)).collect::<Result<_, _>>().map_err(e)?;
    for k in 0..50 {
        let w = random_witness(&mut r, slot, out).map_err(e)?;
        let c = witness_validate(&w).map_err(e)?;
        ensure(c.min_value >= -1e-6, || format!("witness {k}: minimum {:.3e}", c.min_value))?;
        min = min.min(c.min_value);
        if k < 20 {
            let a = witness_affine_part(&w, supers[k].choi()).map_err(e)?.abs();
            ensure(a <= 1e-10, || format!("witness {k}: Y/Z contribution {a:.3e}"))?;
            affine = affine.max(a);
        }
    }
    Ok(format!("50 witnesses, smallest cone minimum {min:.3e}; largest Y/Z contribution {affine:.1e}"))
}

fn c12(log: &[(usize, AuditEntry)]) -> Outcome {
    let optimal: Vec<_> = log.iter().filter(|(_, a)| a.status == Status::Optimal).collect();
    let other = log.len() - optimal.len();
    let gap = optimal.iter().map(|(_, a)| a.gap).fold(0.0f64, f64::max);
    let res = optimal.iter().map(|(_, a)| a.residual).fold(0.0f64, f64::max);
    if let Some((c, a)) = optimal.iter().find(|(_, a)| !(a.gap <= 1e-6 && a.residual <= 1e-7)) {
        return Err(format!("criterion {c}: gap {:.3e}, residual {:.3e} ({} optimal solves, max gap {gap:.2e}, max residual {res:.2e})", a.gap, a.residual, optimal.len()));
    }
    ensure(!optimal.is_empty(), || "no solves recorded".into())?;
    Ok(format!("{} optimal solves (+{other} certified infeasible/other): max gap {gap:.2e}, max residual {res:.2e}", optimal.len()))
}

struct Criterion {
    id: usize,
    name: &'static str,
    limit: Option<Duration>,
    run: fn() -> Outcome,
}

fn main() {
    let criteria = [
        Criterion { id: 1, name: "phi+ measures", limit: Some(Duration::from_secs(5)), run: c1 },
        Criterion { id: 2, name: "swap LN_max", limit: Some(Duration::from_secs(60)), run: c2 },
        Criterion { id: 3, name: "phi+ exact cost", limit: Some(Duration::from_secs(10)), run: c3 },
        Criterion { id: 4, name: "PPT channels are free", limit: Some(Duration::from_secs(600)), run: c4 },
        Criterion { id: 5, name: "monotonicity", limit: Some(Duration::from_secs(1800)), run: c5 },
        Criterion { id: 6, name: "additivity", limit: Some(Duration::from_secs(1800)), run: c6 },
        Criterion { id: 7, name: "cost sandwich", limit: None, run: c7 },
        Criterion { id: 8, name: "conversion distance", limit: None, run: c8 },
        Criterion { id: 9, name: "algebraic identities", limit: None, run: c9 },
        Criterion { id: 10, name: "bound-entanglement no-go", limit: None, run: c10 },
        Criterion { id: 11, name: "witness cone", limit: None, run: c11 },
    ];
    let selected: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.strip_prefix('C').and_then(|n| n.parse().ok())).collect();
    let wanted = |id: usize| selected.is_empty() || selected.contains(&id);

    let _ = audit_take();
    let mut log: Vec<(usize, AuditEntry)> = Vec::new();
    let mut failed = 0;
    for c in criteria.iter().filter(|c| wanted(c.id)) {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(c.run)).unwrap_or_else(|p| {
            let msg = p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        let took = start.elapsed();
        log.extend(audit_take().into_iter().map(|a| (c.id, a)));
        let result = match (result, c.limit) {
            (Ok(_), Some(l)) if took > l => Err(format!("runtime {:.1}s exceeds {}s", took.as_secs_f64(), l.as_secs())),
            (r, _) => r,
        };
        failed += report(c.id, c.name, took, &result);
    }
    if wanted(12) {
        failed += report(12, "solver certification", Duration::ZERO, &c12(&log));
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}

fn report(id: usize, name: &str, took: Duration, r: &Outcome) -> usize {
    let (tag, detail) = match r {
        Ok(d) => ("PASS", d),
        Err(d) => ("FAIL", d),
    };
    println!("C{id:<2} {tag} {name:<26} {:>7.2}s  {detail}", took.as_secs_f64());
    r.is_err() as usize
}
