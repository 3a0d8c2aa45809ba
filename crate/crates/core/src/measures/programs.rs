//! Program builders. Each takes Choi matrices and returns a [`ConicProgram`]
//! plus the handles of its variable blocks; nothing here calls the solver.

use crate::quantum::{superchannel_spec, ChannelDims, A0, A0P, A1, A1P, B0, B0P, B1, B1P, CHANNEL_ORDER, OUTPUT_ORDER, SUPERCHANNEL_B_SIDE, SUPERCHANNEL_ORDER};
use crate::solver::{ConicProgram, HermExpr, Sense, VarId};
use crate::tensor::{DimSpec, LabeledMatrix};

use super::{MeasureError, Result};

const PRIMED: [(&str, &str); 4] = [(A0, A0P), (B0, B0P), (A1, A1P), (B1, B1P)];

/// Channel-ordered copy of a bipartite Choi matrix and its dims.
pub fn channel_choi(choi: &LabeledMatrix) -> Result<(LabeledMatrix, ChannelDims)> {
    let s = choi.spec();
    if s.len() != 4 || !CHANNEL_ORDER.iter().all(|l| s.contains(l)) {
        return Err(MeasureError::Invalid(format!("expected factors A0 B0 A1 B1, got {s}")));
    }
    if !choi.is_hermitian() {
        return Err(MeasureError::Invalid("Choi matrix is not Hermitian".into()));
    }
    let c = choi.permute(&CHANNEL_ORDER)?;
    let d = ChannelDims::new(s.dim_of(A0)?, s.dim_of(B0)?, s.dim_of(A1)?, s.dim_of(B1)?);
    Ok((c, d))
}

fn gamma(e: &HermExpr) -> Result<HermExpr> {
    Ok(e.partial_transpose(&[B0, B1])?)
}

fn times_identity(e: &HermExpr, spec: &DimSpec) -> Result<HermExpr> {
    Ok(e.kron_const(&LabeledMatrix::identity(spec))?)
}

pub struct DiamondProgram {
    pub program: ConicProgram,
    pub y: VarId,
    pub t: VarId,
}

/// `min ‖Tr_out Y‖∞  s.t.  Y ± J ⪰ 0` for a Hermitian Choi matrix `J`;
/// `input` lists the input factors, every other factor is an output.
pub fn diamond_program(choi: &LabeledMatrix, input: &[&str]) -> Result<DiamondProgram> {
    if !choi.is_hermitian() {
        return Err(MeasureError::Invalid("Choi matrix is not Hermitian".into()));
    }
    let spec = choi.spec().clone();
    let in_spec = spec.subset(input)?;
    let mut p = ConicProgram::new(Sense::Minimize);
    let y = p.free_hermitian("Y", &spec);
    let t = p.free_scalar("t");
    let ye = p.var(y);
    p.psd_constraint("Y-J", ye.sub_const(choi)?);
    p.psd_constraint("Y+J", ye.add_const(choi)?);
    let marg = ye.partial_trace(&in_spec.labels())?;
    p.psd_constraint("norm", times_identity(&p.var(t), &in_spec)?.sub(&marg)?);
    p.set_objective(p.var(t))?;
    Ok(DiamondProgram { program: p, y, t })
}

/// Which marginal norm bounds the envelope in the max-log-negativity programs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LnKind {
    /// `‖P_{A0B0}‖∞`.
    Zero,
    /// `‖P_{A0B0}^{T_{B0}}‖∞`.
    One,
}

pub struct LnPrimal {
    pub program: ConicProgram,
    pub p: VarId,
    pub t: VarId,
}

/// Envelope program `min t  s.t.  P ⪰ 0, P^Γ ± J^Γ ⪰ 0, t I ⪰ (marginal of P)`.
/// With both kinds the epigraph bounds the two norms at once.
pub fn ln_max_primal_program(choi: &LabeledMatrix, kinds: &[LnKind]) -> Result<LnPrimal> {
    let (j, d) = channel_choi(choi)?;
    let spec = d.spec();
    let jg = j.partial_transpose(&[B0, B1])?;
    let mut p = ConicProgram::new(Sense::Minimize);
    let pv = p.psd("P", &spec);
    let t = p.free_scalar("t");
    let pg = gamma(&p.var(pv))?;
    p.psd_constraint("P^G-J^G", pg.sub_const(&jg)?);
    p.psd_constraint("P^G+J^G", pg.add_const(&jg)?);
    let marg = p.var(pv).trace_out(&[A1, B1])?;
    let in_spec = marg.spec().clone();
    let ti = times_identity(&p.var(t), &in_spec)?;
    for k in kinds {
        let (name, m) = match k {
            LnKind::Zero => ("norm0", marg.clone()),
            LnKind::One => ("norm1", marg.partial_transpose(&[B0])?),
        };
        p.psd_constraint(name, ti.sub(&m)?);
    }
    p.set_objective(p.var(t))?;
    Ok(LnPrimal { program: p, p: pv, t })
}

pub struct LnDual {
    pub program: ConicProgram,
    pub v: VarId,
    pub w: VarId,
    pub rho: VarId,
}

/// Dual envelope program
/// `max Tr[J(V − W)]  s.t.  V^Γ, W^Γ ⪰ 0, V + W ⪯ σ ⊗ I_{A1B1}, Tr ρ = 1`,
/// with `σ = ρ` for [`LnKind::Zero`] and `σ = ρ^{T_{B0}}` for [`LnKind::One`].
pub fn ln_max_dual_program(choi: &LabeledMatrix, kind: LnKind) -> Result<LnDual> {
    let (j, d) = channel_choi(choi)?;
    let spec = d.spec();
    let in_spec = spec.subset(&[A0, B0])?;
    let mut p = ConicProgram::new(Sense::Maximize);
    let v = p.free_hermitian("V", &spec);
    let w = p.free_hermitian("W", &spec);
    let rho = p.psd("rho", &in_spec);
    p.equal("tr rho", p.var(rho).trace().sub(&HermExpr::scalar(1.0))?);
    p.psd_constraint("V^G", gamma(&p.var(v))?);
    p.psd_constraint("W^G", gamma(&p.var(w))?);
    let sigma = match kind {
        LnKind::Zero => p.var(rho),
        LnKind::One => p.var(rho).partial_transpose(&[B0])?,
    };
    let bound = sigma.expand_to(&spec)?;
    p.psd_constraint("dominance", bound.sub(&p.var(v))?.sub(&p.var(w))?);
    p.set_objective(p.var(v).sub(&p.var(w))?.inner_const(&j)?)?;
    Ok(LnDual { program: p, v, w, rho })
}

/// Adds a PSD variable over `superchannel_spec(slot, out)` constrained to
/// the Choi matrices of PPT superchannels.
pub fn add_ppt_superchannel(p: &mut ConicProgram, name: &str, slot: ChannelDims, out: ChannelDims) -> Result<VarId> {
    let spec = superchannel_spec(slot, out);
    let j = p.psd(name, &spec);
    let e = p.var(j);
    let lhs = e.trace_out(&[A1P, B1P])?;
    let pre = e.trace_out(&[A1, B1, A1P, B1P])?;
    let d11 = (slot.a1 * slot.b1) as f64;
    p.equal(&format!("{name} causal"), lhs.sub(&pre.expand_to(lhs.spec())?.scale(1.0 / d11))?);
    let m2 = e.trace_out(&[A0, B0, A1P, B1P])?;
    let id = LabeledMatrix::identity(m2.spec());
    p.equal(&format!("{name} unital"), m2.sub_const(&id)?);
    p.psd_constraint(&format!("{name} ppt"), e.partial_transpose(&SUPERCHANNEL_B_SIDE)?);
    Ok(j)
}

fn primed(choi: &LabeledMatrix) -> Result<LabeledMatrix> {
    Ok(choi.relabel(&PRIMED)?.permute(&OUTPUT_ORDER)?)
}

pub struct DistancePrimal {
    pub program: ConicProgram,
    pub alpha: VarId,
    pub theta: VarId,
}

/// `min Tr α / |A0'B0'|` over `α ⪰ 0` with uniform `A0'B0'` marginal,
/// `α ⪰ Θ[N] − M` and `Θ` a PPT superchannel from `N`'s dims to `M`'s.
pub fn distance_primal_program(n: &LabeledMatrix, m: &LabeledMatrix) -> Result<DistancePrimal> {
    let (jn, nd) = channel_choi(n)?;
    let (jm, md) = channel_choi(m)?;
    let jm = primed(&jm)?;
    let mut p = ConicProgram::new(Sense::Minimize);
    let out_spec = jm.spec().clone();
    let alpha = p.psd("alpha", &out_spec);
    let theta = add_ppt_superchannel(&mut p, "theta", nd, md)?;
    let d0p = md.input_dim() as f64;
    let a = p.var(alpha);
    let marg = a.trace_out(&[A1P, B1P])?;
    let unif = times_identity(&a.trace(), marg.spec())?.scale(1.0 / d0p);
    p.equal("alpha uniform", marg.sub(&unif)?);
    let image = HermExpr::link_const(&jn, &p.var(theta))?.permute(&OUTPUT_ORDER)?;
    p.psd_constraint("alpha dominance", a.sub(&image)?.add_const(&jm)?);
    p.set_objective(a.trace().scale(1.0 / d0p))?;
    Ok(DistancePrimal { program: p, alpha, theta })
}

pub struct DistanceDual {
    pub program: ConicProgram,
    pub zeta: VarId,
    pub eta: VarId,
    pub y: VarId,
    pub z: VarId,
    pub x: VarId,
}

/// Dual of [`distance_primal_program`]:
/// `max Tr Z − Tr[ζ J^M]` subject to `0 ⪯ ζ ⪯ η ⊗ I_{A1'B1'}`, `Tr η = 1`,
/// `Tr_{A1B1} Y = 0`, `X ⪰ 0` and
/// `(J^N)^T ⊗ ζ − I ⊗ Z − Y ⊗ I − X^{T_{BB'}} ⪰ 0`.
pub fn distance_dual_program(n: &LabeledMatrix, m: &LabeledMatrix) -> Result<DistanceDual> {
    let (jn, nd) = channel_choi(n)?;
    let (jm, md) = channel_choi(m)?;
    let jm = primed(&jm)?;
    let spec = superchannel_spec(nd, md);
    let mut p = ConicProgram::new(Sense::Maximize);
    let zeta = p.psd("zeta", jm.spec());
    let eta = p.free_hermitian("eta", &spec.subset(&[A0P, B0P])?);
    let y = p.free_hermitian("Y", &spec.subset(&[A0, A1, B0, B1, A0P, B0P])?);
    let z = p.free_hermitian("Z", &spec.subset(&[A1, B1, A0P, B0P])?);
    let x = p.psd("X", &spec);
    p.equal("tr eta", p.var(eta).trace().sub(&HermExpr::scalar(1.0))?);
    p.psd_constraint("zeta bound", p.var(eta).expand_to(jm.spec())?.sub(&p.var(zeta))?);
    p.equal("Y marginal", p.var(y).trace_out(&[A1, B1])?);
    let lhs = HermExpr::const_kron(&jn.transpose(), &p.var(zeta))?.permute(&SUPERCHANNEL_ORDER)?;
    let lhs = lhs
        .sub(&p.var(z).expand_to(&spec)?)?
        .sub(&p.var(y).expand_to(&spec)?)?
        .sub(&p.var(x).partial_transpose(&SUPERCHANNEL_B_SIDE)?)?;
    p.psd_constraint("witness", lhs);
    p.set_objective(p.var(z).trace().sub(&p.var(zeta).inner_const(&jm)?)?)?;
    Ok(DistanceDual { program: p, zeta, eta, y, z, x })
}

/// `Tr[J ((J^N)^T ⊗ J^P)]` as a constant over the superchannel factors.
pub fn family_weight(n: &LabeledMatrix, probe: &LabeledMatrix) -> Result<LabeledMatrix> {
    let (jn, _) = channel_choi(n)?;
    let (jp, _) = channel_choi(probe)?;
    let jp = jp.relabel(&PRIMED)?;
    Ok(jn.transpose().kron(&jp)?.permute(&SUPERCHANNEL_ORDER)?)
}

pub struct FamilyProgram {
    pub program: ConicProgram,
    pub theta: VarId,
}

/// `max Tr[J^Θ ((J^N)^T ⊗ J^P)]` over PPT superchannels from `N`'s dims to `P`'s.
pub fn family_program(n: &LabeledMatrix, probe: &LabeledMatrix) -> Result<FamilyProgram> {
    let (_, nd) = channel_choi(n)?;
    let (_, pd) = channel_choi(probe)?;
    let c = family_weight(n, probe)?;
    let mut p = ConicProgram::new(Sense::Maximize);
    let theta = add_ppt_superchannel(&mut p, "theta", nd, pd)?;
    p.set_objective(p.var(theta).inner_const(&c)?)?;
    Ok(FamilyProgram { program: p, theta })
}

pub struct PptOverlapProgram {
    pub program: ConicProgram,
    pub m: VarId,
}

/// `max Tr[J^M J^P]` over PPT channels `M` with `P`'s dims.
pub fn ppt_overlap_program(probe: &LabeledMatrix) -> Result<PptOverlapProgram> {
    let (jp, pd) = channel_choi(probe)?;
    let mut p = ConicProgram::new(Sense::Maximize);
    let m = p.psd("M", &pd.spec());
    let marg = p.var(m).trace_out(&[A1, B1])?;
    let id = LabeledMatrix::identity(marg.spec());
    p.equal("trace preserving", marg.sub_const(&id)?);
    p.psd_constraint("ppt", gamma(&p.var(m))?);
    p.set_objective(p.var(m).inner_const(&jp)?)?;
    Ok(PptOverlapProgram { program: p, m })
}

pub struct CostProgram {
    pub program: ConicProgram,
    pub r: VarId,
}

/// Feasibility of `−(m−1) R^Γ ⪯ N^Γ ⪯ (m+1) R^Γ` over channels `R`.
/// With `relaxed`, `R` only needs `R ⪰ 0` and both `A0B0` marginals below `I`.
pub fn exact_cost_program(n: &LabeledMatrix, m: usize, relaxed: bool) -> Result<CostProgram> {
    if m == 0 {
        return Err(MeasureError::Invalid("Schmidt rank must be positive".into()));
    }
    let (j, d) = channel_choi(n)?;
    let jg = j.partial_transpose(&[B0, B1])?;
    let mut p = ConicProgram::new(Sense::Minimize);
    let r = p.psd("R", &d.spec());
    let marg = p.var(r).trace_out(&[A1, B1])?;
    let id = LabeledMatrix::identity(marg.spec());
    if relaxed {
        p.psd_constraint("marginal", marg.neg().add_const(&id)?);
        p.psd_constraint("marginal^T", marg.partial_transpose(&[B0])?.neg().add_const(&id)?);
    } else {
        p.equal("trace preserving", marg.sub_const(&id)?);
    }
    let rg = gamma(&p.var(r))?;
    p.psd_constraint("lower", rg.scale((m - 1) as f64).add_const(&jg)?);
    p.psd_constraint("upper", rg.scale((m + 1) as f64).sub_const(&jg)?);
    Ok(CostProgram { program: p, r })
}
