//! Named channels, states and superchannels.

use super::{
    channel_from_kraus, BipartiteChannel, BipartiteMap, ChannelDims, QuantumError, Result, Superchannel, A0, A0P, A1, A1P, B0,
    B0P, B1, B1P,
};
use crate::tensor::{CMatrix, DimSpec, LabeledMatrix, C64};

/// Normalized maximally entangled state `φ⁺_m` over `(A1, B1)`.
pub fn phi_plus_state(m: usize) -> LabeledMatrix {
    let spec = DimSpec::new([(A1, m), (B1, m)]).expect("labels");
    LabeledMatrix::new(spec, phi_plus_matrix(m).scale_real(1.0 / m as f64)).expect("size")
}

/// Unnormalized `Σ_ij |ii⟩⟨jj|` on `m ⊗ m`.
pub fn phi_plus_matrix(m: usize) -> CMatrix {
    let mut x = CMatrix::zeros(m * m, m * m);
    for i in 0..m {
        for j in 0..m {
            x[(i * m + i, j * m + j)] = C64::new(1.0, 0.0);
        }
    }
    x
}

/// Flip operator `F|a,b⟩ = |b,a⟩` on `m ⊗ m`.
pub fn flip_matrix(m: usize) -> CMatrix {
    let mut x = CMatrix::zeros(m * m, m * m);
    for a in 0..m {
        for b in 0..m {
            x[(b * m + a, a * m + b)] = C64::new(1.0, 0.0);
        }
    }
    x
}

/// Isotropic state `p φ⁺ + (1−p)(I−φ⁺)/(m²−1)`; PPT iff `p ≤ 1/m`.
pub fn isotropic_state(m: usize, p: f64) -> LabeledMatrix {
    let phi = phi_plus_state(m);
    let rest = LabeledMatrix::identity(phi.spec()).sub(&phi).expect("same spec");
    let k = (m * m - 1) as f64;
    phi.scale(p).add(&rest.scale((1.0 - p) / k)).expect("same spec")
}

/// Trivial-input channel preparing `rho`. The two factors of `rho` become `(A1, B1)`.
pub fn state_preparation(rho: &LabeledMatrix) -> Result<BipartiteChannel> {
    let f = rho.spec().factors();
    if f.len() != 2 {
        return Err(QuantumError::InvalidArgument(format!("a prepared state needs two factors, got {}", rho.spec())));
    }
    let tr = rho.trace();
    if (tr.re - 1.0).abs() > 1e-9 || tr.im.abs() > 1e-9 {
        return Err(QuantumError::InvalidChannel(format!("state trace {} is not 1", tr.re)));
    }
    let spec = ChannelDims::state(f[0].1, f[1].1).spec();
    BipartiteChannel::from_choi(LabeledMatrix::new(spec, rho.matrix().clone())?)
}

/// Preparation of the normalized `φ⁺_m`.
pub fn phi_plus_preparation(m: usize) -> BipartiteChannel {
    state_preparation(&phi_plus_state(m)).expect("valid state")
}

/// Unnormalized `Φ⁺_m` as a CP (not trace-preserving) map with trivial inputs.
pub fn phi_plus_probe(m: usize) -> BipartiteMap {
    let spec = ChannelDims::state(m, m).spec();
    BipartiteMap::new(LabeledMatrix::new(spec, phi_plus_matrix(m)).expect("size")).expect("labels")
}

/// Channel `ρ ↦ Tr[ρ] σ` onto the state `sigma` over `(A1, B1)`.
pub fn replacement_channel(in_a: usize, in_b: usize, sigma: &LabeledMatrix) -> Result<BipartiteChannel> {
    let prep = state_preparation(sigma)?;
    let d = prep.dims();
    let input = DimSpec::new([(A0, in_a), (B0, in_b)])?;
    let choi = LabeledMatrix::identity(&input).kron(&prep.choi().trace_out(&[A0, B0])?)?;
    let _ = d;
    BipartiteChannel::from_choi(choi)
}

/// Completely depolarizing channel, Choi `I_in ⊗ u_out`.
pub fn depolarizing_channel(dims: ChannelDims) -> BipartiteChannel {
    let spec = dims.spec();
    let choi = LabeledMatrix::identity(&spec).scale(1.0 / dims.output_dim() as f64);
    BipartiteChannel::from_choi_unchecked(choi).expect("labels")
}

/// Identity channel; requires `a0 = a1` and `b0 = b1`.
pub fn identity_channel(dims: ChannelDims) -> Result<BipartiteChannel> {
    if dims.a0 != dims.a1 || dims.b0 != dims.b1 {
        return Err(QuantumError::DimMismatch(format!("identity channel needs equal input/output dims, got {dims}")));
    }
    channel_from_kraus(&[CMatrix::identity(dims.input_dim())], dims)
}

/// Swap `|a⟩_A |b⟩_B ↦ |b⟩_A |a⟩_B` on `d ⊗ d`.
pub fn swap_channel(d: usize) -> BipartiteChannel {
    channel_from_kraus(&[flip_matrix(d)], ChannelDims::new(d, d, d, d)).expect("unitary")
}

/// Identity wire from Alice's input to Bob's output, dims `(d,1) → (1,d)`.
pub fn one_way_identity(d: usize) -> BipartiteChannel {
    channel_from_kraus(&[CMatrix::identity(d)], ChannelDims::new(d, 1, 1, d)).expect("unitary")
}

/// Local dephasing of both inputs in the computational basis.
pub fn dephasing_channel(a: usize, b: usize) -> BipartiteChannel {
    let n = a * b;
    let kraus: Vec<CMatrix> = (0..n)
        .map(|k| {
            let mut p = CMatrix::zeros(n, n);
            p[(k, k)] = C64::new(1.0, 0.0);
            p
        })
        .collect();
    channel_from_kraus(&kraus, ChannelDims::new(a, b, a, b)).expect("projective")
}

/// Twirling channel on `m ⊗ m`:
/// `ω ↦ φ⁺ Tr[φ⁺ω] + (I−φ⁺)/(m²−1) Tr[(I−φ⁺)ω]`.
pub fn twirl(m: usize) -> Result<BipartiteChannel> {
    if m < 2 {
        return Err(QuantumError::InvalidArgument("twirl needs m >= 2".into()));
    }
    let phi = phi_plus_matrix(m).scale_real(1.0 / m as f64);
    let rest = &CMatrix::identity(m * m) - &phi;
    let k = (m * m - 1) as f64;
    // X^T ⊗ X + (I−X)^T ⊗ (I−X)/k with X real symmetric
    let j = &phi.kron(&phi) + &rest.kron(&rest).scale_real(1.0 / k);
    let spec = ChannelDims::new(m, m, m, m).spec();
    BipartiteChannel::from_choi(LabeledMatrix::new(spec, j)?)
}

/// `Θ[M] = N Tr[φ⁺_m M] + R Tr[(I−φ⁺_m) M]` on `m ⊗ m` state slots.
pub fn exact_cost_superchannel(n: &BipartiteChannel, r: &BipartiteChannel, m: usize) -> Result<Superchannel> {
    if m < 2 {
        return Err(QuantumError::InvalidArgument("exact-cost superchannel needs m >= 2".into()));
    }
    if n.dims() != r.dims() {
        return Err(QuantumError::DimMismatch(format!("target {} and complement {} differ", n.dims(), r.dims())));
    }
    exact_cost_supermap(n.choi(), r.choi(), m)
}

/// As [`exact_cost_superchannel`] for arbitrary channel-ordered Choi matrices.
pub fn exact_cost_supermap(jn: &LabeledMatrix, jr: &LabeledMatrix, m: usize) -> Result<Superchannel> {
    let slot = DimSpec::new([(A0, 1), (A1, m), (B0, 1), (B1, m)])?;
    let phi = LabeledMatrix::new(slot.clone(), phi_plus_matrix(m).scale_real(1.0 / m as f64))?;
    let rest = LabeledMatrix::identity(&slot).sub(&phi)?;
    let primed = [(A0, A0P), (B0, B0P), (A1, A1P), (B1, B1P)];
    let jn = jn.relabel(&primed)?;
    let jr = jr.relabel(&primed)?;
    Superchannel::from_choi(phi.kron(&jn)?.add(&rest.kron(&jr)?)?)
}

/// POVM over `(A0, B0)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Povm {
    elements: Vec<LabeledMatrix>,
}

impl Povm {
    /// Validates that elements are PSD, share a two-factor spec and sum to the identity.
    pub fn new(elements: Vec<LabeledMatrix>) -> Result<Self> {
        let first = elements.first().ok_or_else(|| QuantumError::InvalidArgument("empty POVM".into()))?;
        let spec = first.spec().clone();
        if spec.len() != 2 {
            return Err(QuantumError::InvalidArgument(format!("POVM elements need two factors, got {spec}")));
        }
        let spec = DimSpec::new([(A0, spec.dims()[0]), (B0, spec.dims()[1])])?;
        let mut sum = LabeledMatrix::zeros(&spec);
        let mut out = Vec::with_capacity(elements.len());
        for (k, e) in elements.into_iter().enumerate() {
            if e.dim() != spec.total_dim() {
                return Err(QuantumError::DimMismatch(format!("POVM element {k} has dimension {}", e.dim())));
            }
            let e = LabeledMatrix::new(spec.clone(), e.into_matrix())?;
            if !e.is_hermitian() || !super::is_psd(&e) {
                return Err(QuantumError::InvalidArgument(format!("POVM element {k} is not PSD")));
            }
            sum = sum.add(&e)?;
            out.push(e);
        }
        let defect = sum.max_abs_diff(&LabeledMatrix::identity(&spec))?;
        if defect > 1e-9 {
            return Err(QuantumError::InvalidArgument(format!("POVM elements do not sum to the identity (defect {defect:.3e})")));
        }
        Ok(Self { elements: out })
    }

    pub fn elements(&self) -> &[LabeledMatrix] {
        &self.elements
    }
}

/// Quantum-to-classical channel `ρ ↦ Σ_x Tr[ρ E_x] |x⟩⟨x|` with the outcome
/// register on `A1` and trivial `B1`.
pub fn povm_channel(p: &Povm) -> BipartiteChannel {
    let k = p.elements.len();
    let in_spec = p.elements[0].spec().clone();
    let d = in_spec.dims();
    let dims = ChannelDims::new(d[0], d[1], k, 1);
    let mut j = LabeledMatrix::zeros(&dims.spec());
    let out_spec = DimSpec::new([(A1, k), (B1, 1)]).expect("labels");
    for (x, e) in p.elements.iter().enumerate() {
        let mut proj = CMatrix::zeros(k, k);
        proj[(x, x)] = C64::new(1.0, 0.0);
        let term = e.transpose().kron(&LabeledMatrix::new(out_spec.clone(), proj).expect("size")).expect("labels");
        j = j.add(&term).expect("spec");
    }
    BipartiteChannel::from_choi_unchecked(j).expect("labels")
}
