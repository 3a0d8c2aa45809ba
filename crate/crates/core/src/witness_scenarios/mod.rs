//! NPT witnesses against the PPT-superchannel cone, and the separable,
//! bound-entangled and distillation scenarios.

mod scenarios;

use thiserror::Error;

use crate::measures::programs::add_ppt_superchannel;
use crate::measures::{MeasureError, MeasureResult};
use crate::quantum::{
    random_hermitian, random_psd, superchannel_spec, ChaCha, ChannelDims, QuantumError, A0, A0P, A1, B0, B0P, B1, SUPERCHANNEL_B_SIDE,
    SUPERCHANNEL_ORDER,
};
use crate::solver::{ConicProgram, Sense};
use crate::tensor::{LabeledMatrix, TensorError};

pub use scenarios::*;

/// Tolerance on the linear conditions of the `Y` and `Z` components.
pub const COMPONENT_TOL: f64 = 1e-9;
/// `min Tr[W J]` at or above this counts as nonnegative on the cone.
pub const CONE_TOL: f64 = 1e-6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ScenarioError {
    #[error(transparent)]
    Quantum(#[from] QuantumError),
    #[error(transparent)]
    Tensor(#[from] TensorError),
    #[error(transparent)]
    Measure(#[from] MeasureError),
    #[error("invalid witness component: {0}")]
    Component(String),
    #[error("Kraus operator {0} is not a product across the cut")]
    NonProduct(usize),
    #[error("second POVM element I - beta is not PSD")]
    ComplementNotPsd,
    #[error("precondition failed: {0}")]
    Precondition(String),
}

pub type Result<T> = std::result::Result<T, ScenarioError>;

/// Factors of the `Y` component: the superchannel factors without `A1' B1'`.
pub const Y_FACTORS: [&str; 6] = [A0, A1, B0, B1, A0P, B0P];
/// Factors of the `Z` component.
pub const Z_FACTORS: [&str; 4] = [A1, B1, A0P, B0P];

/// `W = P + X^{T_{BB'}} + Y ⊗ I_{A1'B1'} + I_{A0B0A1'B1'} ⊗ Z` over the
/// superchannel factors of `slot → out`.
#[derive(Clone, Debug, PartialEq)]
pub struct Witness {
    pub slot: ChannelDims,
    pub out: ChannelDims,
    pub p: LabeledMatrix,
    pub x: LabeledMatrix,
    pub y: LabeledMatrix,
    pub z: LabeledMatrix,
    pub w: LabeledMatrix,
    /// `W` is not PSD.
    pub proper: bool,
}

fn ordered(m: &LabeledMatrix, labels: &[&str], what: &str) -> Result<LabeledMatrix> {
    let s = m.spec();
    if s.len() != labels.len() || !labels.iter().all(|l| s.contains(l)) {
        return Err(ScenarioError::Component(format!("{what} must have factors {labels:?}, got {s}")));
    }
    if !m.is_hermitian() {
        return Err(ScenarioError::Component(format!("{what} is not Hermitian")));
    }
    Ok(m.permute(labels)?)
}

fn tol_for(m: &LabeledMatrix) -> f64 {
    COMPONENT_TOL * m.matrix().max_abs().max(1.0)
}

/// Assembles a witness from its components; `y` and `z` may be given in
/// any factor order.
pub fn witness_assemble(p: &LabeledMatrix, x: &LabeledMatrix, y: &LabeledMatrix, z: &LabeledMatrix, slot: ChannelDims, out: ChannelDims) -> Result<Witness> {
    let spec = superchannel_spec(slot, out);
    let p = ordered(p, &SUPERCHANNEL_ORDER, "P")?;
    let x = ordered(x, &SUPERCHANNEL_ORDER, "X")?;
    let y = ordered(y, &Y_FACTORS, "Y")?;
    let z = ordered(z, &Z_FACTORS, "Z")?;
    for (m, name) in [(&p, "P"), (&x, "X")] {
        if m.spec() != &spec {
            return Err(ScenarioError::Component(format!("{name} has spec {} instead of {spec}", m.spec())));
        }
        if !m.is_psd()? {
            return Err(ScenarioError::Component(format!("{name} is not PSD")));
        }
    }
    let ym = y.trace_out(&[A1, B1])?;
    if ym.matrix().max_abs() > tol_for(&y) {
        return Err(ScenarioError::Component(format!("Tr_(A1 B1) Y is not zero ({:.3e})", ym.matrix().max_abs())));
    }
    let tz = z.trace();
    if tz.norm() > tol_for(&z) {
        return Err(ScenarioError::Component(format!("Tr Z = {:.3e} is not zero", tz.re)));
    }
    let w = p
        .add(&x.partial_transpose(&SUPERCHANNEL_B_SIDE)?)?
        .add(&y.expand_to(&spec)?)?
        .add(&z.expand_to(&spec)?)?;
    let proper = !w.is_psd()?;
    Ok(Witness { slot, out, p, x, y, z, w, proper })
}

/// `Tr[W J]` for a superchannel Choi `j`.
pub fn witness_pairing(w: &Witness, j: &LabeledMatrix) -> Result<f64> {
    let j = j.permute(&SUPERCHANNEL_ORDER)?;
    Ok(w.w.matrix().inner_re(j.matrix()))
}

/// Contribution of the `Y` and `Z` components alone to `Tr[W J]`.
pub fn witness_affine_part(w: &Witness, j: &LabeledMatrix) -> Result<f64> {
    let spec = superchannel_spec(w.slot, w.out);
    let yz = w.y.expand_to(&spec)?.add(&w.z.expand_to(&spec)?)?;
    Ok(yz.matrix().inner_re(j.permute(&SUPERCHANNEL_ORDER)?.matrix()))
}

#[derive(Clone, Debug, PartialEq)]
pub struct WitnessCheck {
    /// `min Tr[W J]` over PPT superchannel Choi matrices.
    pub min_value: f64,
    /// Nonnegative on the cone and proper.
    pub is_witness: bool,
    pub result: MeasureResult,
}

pub fn witness_validate(w: &Witness) -> Result<WitnessCheck> {
    let result = cone_minimum(&w.w, w.slot, w.out)?;
    let v = result.value;
    Ok(WitnessCheck { min_value: v, is_witness: v >= -CONE_TOL && w.proper, result })
}

/// `min Tr[W J]` over PPT superchannels `slot → out` for a bare operator `W`.
pub fn cone_minimum(w: &LabeledMatrix, slot: ChannelDims, out: ChannelDims) -> Result<MeasureResult> {
    let w = ordered(w, &SUPERCHANNEL_ORDER, "W")?;
    let spec = superchannel_spec(slot, out);
    if w.spec() != &spec {
        return Err(ScenarioError::Component(format!("W has spec {} instead of {spec}", w.spec())));
    }
    let mut p = ConicProgram::new(Sense::Minimize);
    let j = add_ppt_superchannel(&mut p, "J", slot, out)?;
    p.set_objective(p.var(j).inner_const(&w).map_err(MeasureError::from)?).map_err(MeasureError::from)?;
    let s = crate::measures::run("witness minimum", &p)?;
    let v = s.solution.primal_value;
    Ok(MeasureResult::from_primal(v, s))
}

/// Random components: Wishart `P`, `X`; Hermitian `Y` minus its `A1 B1`
/// marginal; Hermitian `Z` minus `Tr Z · u`.
pub fn random_witness(rng: &mut ChaCha, slot: ChannelDims, out: ChannelDims) -> Result<Witness> {
    let spec = superchannel_spec(slot, out);
    let p = random_psd(rng, &spec);
    let x = random_psd(rng, &spec);
    let yspec = spec.subset(&Y_FACTORS)?;
    let y = random_hermitian(rng, &yspec);
    let d11 = (slot.a1 * slot.b1) as f64;
    let y = y.sub(&y.trace_out(&[A1, B1])?.expand_to(&yspec)?.scale(1.0 / d11))?;
    let zspec = spec.subset(&Z_FACTORS)?;
    let z = random_hermitian(rng, &zspec);
    let z = z.sub(&LabeledMatrix::identity(&zspec).scale(z.trace().re / zspec.total_dim() as f64))?;
    witness_assemble(&p, &x, &y, &z, slot, out)
}

/// Zero matrix over the `Y` factors.
pub fn zero_y(slot: ChannelDims, out: ChannelDims) -> LabeledMatrix {
    LabeledMatrix::zeros(&superchannel_spec(slot, out).subset(&Y_FACTORS).expect("labels"))
}

/// Zero matrix over the `Z` factors.
pub fn zero_z(slot: ChannelDims, out: ChannelDims) -> LabeledMatrix {
    LabeledMatrix::zeros(&superchannel_spec(slot, out).subset(&Z_FACTORS).expect("labels"))
}
