//! PPT conversion distance and the monotone family `f_P`, `G_P`.

use crate::quantum::BipartiteChannel;

use super::programs::{distance_dual_program, distance_primal_program, family_program, ppt_overlap_program};
use super::{run, MeasureResult, Result};

/// Smallest `½‖Θ[N] − M‖⋄` over PPT superchannels `Θ`, with its dual.
pub fn conversion_distance_ppt(n: &BipartiteChannel, m: &BipartiteChannel) -> Result<MeasureResult> {
    let primal = distance_primal_program(n.choi(), m.choi())?;
    let ps = run("conversion distance primal", &primal.program)?;
    let dual = distance_dual_program(n.choi(), m.choi())?;
    let ds = run("conversion distance dual", &dual.program)?;
    let (p, d) = (ps.solution.primal_value, ds.solution.primal_value);
    Ok(MeasureResult::from_primal(p, ps).with_dual(ds, (p - d).abs()))
}

/// `max Tr[Θ[N] P]` over PPT superchannels `Θ` into `P`'s dims.
pub fn f_p(n: &BipartiteChannel, p: &BipartiteChannel) -> Result<MeasureResult> {
    let fp = family_program(n.choi(), p.choi())?;
    let s = run("family maximum", &fp.program)?;
    let v = s.solution.primal_value;
    Ok(MeasureResult::from_primal(v, s))
}

/// `f_P(N) − max_M Tr[J^M J^P]` over PPT channels `M`. The certificate
/// holds the superchannel block followed by the best PPT channel.
pub fn g_p(n: &BipartiteChannel, p: &BipartiteChannel) -> Result<MeasureResult> {
    let mut r = f_p(n, p)?;
    let ov = ppt_overlap_program(p.choi())?;
    let s = run("PPT overlap", &ov.program)?;
    let base = s.solution.primal_value;
    r.value -= base;
    r.primal_value = r.value;
    r.dual_value = r.dual_value.map(|d| d - s.solution.dual_value);
    r.gap = r.gap.max(s.solution.gap);
    r.residual = r.residual.max(s.solution.residual);
    r.primal_certificate.push(s.solution.value(ov.m).clone());
    r.sizes.push(s.size);
    r.seconds += s.seconds;
    Ok(r)
}
