//! Diamond norm, negativity and max-logarithmic negativity.

use crate::quantum::{BipartiteChannel, A0, B0};
use crate::tensor::LabeledMatrix;

use super::programs::{diamond_program, ln_max_dual_program, ln_max_primal_program, LnKind};
use super::{run, MeasureResult, Result};

/// `‖Φ‖⋄` of the Hermitian-preserving map with Choi matrix `choi`;
/// `input` lists its input factors.
pub fn diamond_norm_hp(choi: &LabeledMatrix, input: &[&str]) -> Result<MeasureResult> {
    let dp = diamond_program(choi, input)?;
    let s = run("diamond norm", &dp.program)?;
    let t = s.solution.scalar(dp.t);
    Ok(MeasureResult::from_primal(t, s))
}

fn gamma_diamond(n: &BipartiteChannel) -> Result<MeasureResult> {
    diamond_norm_hp(n.gamma().choi(), &[A0, B0])
}

/// `(‖Υ_B[N]‖⋄ − 1) / 2`.
pub fn negativity(n: &BipartiteChannel) -> Result<MeasureResult> {
    let mut r = gamma_diamond(n)?;
    r.value = (r.value - 1.0) / 2.0;
    Ok(r)
}

/// `log₂ ‖Υ_B[N]‖⋄`.
pub fn log_negativity(n: &BipartiteChannel) -> Result<MeasureResult> {
    let mut r = gamma_diamond(n)?;
    r.value = r.value.log2();
    Ok(r)
}

/// One of the two envelope quantities, solved as primal and as dual.
pub fn ln_max_kind(n: &BipartiteChannel, kind: LnKind) -> Result<MeasureResult> {
    let primal = ln_max_primal_program(n.choi(), &[kind])?;
    let ps = run("max-log-negativity primal", &primal.program)?;
    let t = ps.solution.scalar(primal.t);
    let dual = ln_max_dual_program(n.choi(), kind)?;
    let ds = run("max-log-negativity dual", &dual.program)?;
    let d = ds.solution.primal_value;
    // both values on the log scale
    let value = t.log2();
    let mut r = MeasureResult::from_primal(value, ps).with_dual(ds, (value - d.log2()).abs());
    r.primal_value = value;
    r.dual_value = Some(d.log2());
    Ok(r)
}

pub fn ln_max0(n: &BipartiteChannel) -> Result<MeasureResult> {
    ln_max_kind(n, LnKind::Zero)
}

pub fn ln_max1(n: &BipartiteChannel) -> Result<MeasureResult> {
    ln_max_kind(n, LnKind::One)
}

#[derive(Clone, Debug, PartialEq)]
pub struct LnMax {
    /// `max(LN⁰, LN¹)`.
    pub value: f64,
    pub zero: MeasureResult,
    pub one: MeasureResult,
}

impl LnMax {
    pub fn is_flagged(&self) -> bool {
        self.zero.is_flagged() || self.one.is_flagged()
    }
}

pub fn ln_max(n: &BipartiteChannel) -> Result<LnMax> {
    let zero = ln_max0(n)?;
    let one = ln_max1(n)?;
    Ok(LnMax { value: zero.value.max(one.value), zero, one })
}

/// Single envelope bounding both marginal norms. Never below [`ln_max`].
pub fn ln_max_minimax(n: &BipartiteChannel) -> Result<MeasureResult> {
    let primal = ln_max_primal_program(n.choi(), &[LnKind::Zero, LnKind::One])?;
    let s = run("max-log-negativity minimax", &primal.program)?;
    let t = s.solution.scalar(primal.t);
    Ok(MeasureResult::from_primal(t.log2(), s))
}
