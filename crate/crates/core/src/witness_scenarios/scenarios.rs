//! Separable superchannels, the bound-entangled POVM and the PPT-comb no-go.

use crate::measures::{ln_max, negativity};
use crate::quantum::{
    channel_from_kraus, comb_apply, comb_from_channels, is_ppt_channel, is_ppt_comb, is_ppt_superchannel, povm_channel, random_ppt_channel_with,
    rng, superchannel_from_pre_post, BipartiteChannel, ChaCha, ChannelDims, Comb, CombLayout, Povm, Superchannel, A0, B0,
};
use crate::tensor::{CMatrix, DimSpec, LabeledMatrix, C64, PSD_TOL};

use super::{Result, ScenarioError};

/// Kraus operator `alice ⊗ bob`.
#[derive(Clone, Debug, PartialEq)]
pub struct ProductKraus {
    pub alice: CMatrix,
    pub bob: CMatrix,
}

impl ProductKraus {
    pub fn matrix(&self) -> CMatrix {
        self.alice.kron(&self.bob)
    }
}

/// Splits `k : (a_in ⊗ b_in) → (a_out ⊗ b_out)` into `alice ⊗ bob`.
/// `index` only labels the error.
pub fn split_product_kraus(k: &CMatrix, a: (usize, usize), b: (usize, usize), index: usize) -> Result<ProductKraus> {
    let ((ao, ai), (bo, bi)) = (a, b);
    if k.rows() != ao * bo || k.cols() != ai * bi {
        return Err(ScenarioError::Precondition(format!("Kraus operator {index} has shape {}x{}", k.rows(), k.cols())));
    }
    // realignment R[(x, x'), (y, y')] = K[(x, y), (x', y')] has rank one iff K is a product
    let r = |p: usize, q: usize| k[((p / ai) * bo + q / bi, (p % ai) * bi + q % bi)];
    let (mut best, mut bp, mut bq) = (0.0, 0, 0);
    for p in 0..ao * ai {
        for q in 0..bo * bi {
            if r(p, q).norm() > best {
                (best, bp, bq) = (r(p, q).norm(), p, q);
            }
        }
    }
    if best == 0.0 {
        return Ok(ProductKraus { alice: CMatrix::zeros(ao, ai), bob: CMatrix::zeros(bo, bi) });
    }
    let pivot = r(bp, bq);
    let alice = CMatrix::from_fn(ao, ai, |x, xp| r(x * ai + xp, bq));
    let bob = CMatrix::from_fn(bo, bi, |y, yp| r(bp, y * bi + yp) / pivot);
    let pk = ProductKraus { alice, bob };
    if pk.matrix().max_abs_diff(k) > 1e-10 * k.max_abs() {
        return Err(ScenarioError::NonProduct(index));
    }
    Ok(pk)
}

fn product_channel(kraus: &[ProductKraus], what: &str) -> Result<BipartiteChannel> {
    let first = kraus.first().ok_or_else(|| ScenarioError::Precondition(format!("{what} has no Kraus operators")))?;
    let (ao, ai) = (first.alice.rows(), first.alice.cols());
    let (bo, bi) = (first.bob.rows(), first.bob.cols());
    let mut ks = Vec::with_capacity(kraus.len());
    for (i, k) in kraus.iter().enumerate() {
        if (k.alice.rows(), k.alice.cols(), k.bob.rows(), k.bob.cols()) != (ao, ai, bo, bi) {
            return Err(ScenarioError::Precondition(format!("{what} Kraus operator {i} has inconsistent shape")));
        }
        ks.push(k.matrix());
    }
    Ok(channel_from_kraus(&ks, ChannelDims::new(ai, bi, ao, bo))?)
}

/// Separable superchannel `post ∘ (N ⊗ id_M) ∘ pre` from product-Kraus
/// pre- and post-processing with local memory `(M_A, M_B)`.
pub fn seps_from_pre_post(pre: &[ProductKraus], post: &[ProductKraus], memory: (usize, usize)) -> Result<Superchannel> {
    let pre = product_channel(pre, "pre-processing")?;
    let post = product_channel(post, "post-processing")?;
    Ok(superchannel_from_pre_post(&pre, &post, memory)?)
}

/// Necessary condition for separability: the superchannel is PPT.
pub fn seps_ppt_relaxation(t: &Superchannel) -> bool {
    is_ppt_superchannel(t)
}

/// `72 ρ` for the 3⊗3 state `ρ = (I − Σᵢ |ψᵢ⟩⟨ψᵢ|)/4` built from the tiles
/// unextendible product basis
/// `|0⟩|0−1⟩, |0−1⟩|2⟩, |2⟩|1−2⟩, |1−2⟩|0⟩, |0+1+2⟩|0+1+2⟩` (normalized).
/// Basis order `|a b⟩ ↦ 3a + b`.
pub const TILES_STATE_72: [[i32; 9]; 9] = [
    [7, 7, -2, -2, -2, -2, -2, -2, -2],
    [7, 7, -2, -2, -2, -2, -2, -2, -2],
    [-2, -2, 7, -2, -2, 7, -2, -2, -2],
    [-2, -2, -2, 7, -2, -2, 7, -2, -2],
    [-2, -2, -2, -2, 16, -2, -2, -2, -2],
    [-2, -2, 7, -2, -2, 7, -2, -2, -2],
    [-2, -2, -2, 7, -2, -2, 7, -2, -2],
    [-2, -2, -2, -2, -2, -2, -2, 7, 7],
    [-2, -2, -2, -2, -2, -2, -2, 7, 7],
];

/// The tiles PPT entangled state over `(A0, B0)`.
pub fn tiles_state() -> LabeledMatrix {
    let m = CMatrix::from_fn(9, 9, |i, j| C64::new(TILES_STATE_72[i][j] as f64 / 72.0, 0.0));
    LabeledMatrix::new(DimSpec::new([(A0, 3), (B0, 3)]).expect("labels"), m).expect("size")
}

#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct BoundPovmReport {
    pub is_ppt_channel: bool,
    pub ln_max: f64,
    pub negativity: f64,
    pub flagged: bool,
}

/// Binary measurement `{β, I − β}` on `(A0, B0)` as a channel, with its
/// PPT status and measure values.
pub fn bound_povm_channel(beta: &LabeledMatrix) -> Result<(BipartiteChannel, BoundPovmReport)> {
    if beta.spec().len() != 2 {
        return Err(ScenarioError::Precondition(format!("beta needs two factors, got {}", beta.spec())));
    }
    let f = LabeledMatrix::identity(beta.spec()).sub(beta)?;
    if !f.is_psd()? {
        return Err(ScenarioError::ComplementNotPsd);
    }
    let povm = Povm::new(vec![beta.clone(), f])?;
    let ch = povm_channel(&povm);
    let l = ln_max(&ch)?;
    let n = negativity(&ch)?;
    let report = BoundPovmReport { is_ppt_channel: is_ppt_channel(&ch), ln_max: l.value, negativity: n.value, flagged: l.is_flagged() };
    Ok((ch, report))
}

#[derive(Clone, Debug, PartialEq)]
pub struct NoGoReport {
    pub output: BipartiteChannel,
    /// Smallest eigenvalue of the output's partial transpose.
    pub pt_min_eigenvalue: f64,
    /// The output is NPT.
    pub violation: bool,
    /// Output is a state on two qubits, where PPT means separable.
    pub two_qubit_state: bool,
}

/// Applies a PPT comb to PPT channels and checks that the result is PPT.
pub fn distillation_no_go(c: &Comb, inputs: &[BipartiteChannel]) -> Result<NoGoReport> {
    if !is_ppt_comb(c) {
        return Err(ScenarioError::Precondition("comb is not PPT".into()));
    }
    for (k, n) in inputs.iter().enumerate() {
        if !is_ppt_channel(n) {
            return Err(ScenarioError::Precondition(format!("input {} is not PPT", k + 1)));
        }
    }
    let output = comb_apply(c, inputs)?;
    let ev = output.gamma().choi().eigenvalues()?;
    let min = ev.last().copied().unwrap_or(0.0);
    let norm = ev.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let d = output.dims();
    Ok(NoGoReport {
        pt_min_eigenvalue: min,
        violation: min < -PSD_TOL * norm.max(1.0),
        two_qubit_state: d == ChannelDims::state(2, 2),
        output,
    })
}

/// Layout of an `n`-slot comb on channels of dims `slot` whose first layer
/// prepares the slot input and whose last layer returns the slot output.
pub fn state_comb_layout(slots: usize, slot: ChannelDims, memory: (usize, usize)) -> CombLayout {
    let mut wires = vec![ChannelDims::new(1, 1, slot.a0, slot.b0)];
    for _ in 1..slots {
        wires.push(ChannelDims::new(slot.a1, slot.b1, slot.a0, slot.b0));
    }
    wires.push(ChannelDims::new(slot.a1, slot.b1, slot.a1, slot.b1));
    CombLayout { wires, memory: vec![memory; slots] }
}

/// Comb whose layers are independent random PPT channels.
pub fn random_ppt_comb_with(rng: &mut ChaCha, layout: &CombLayout) -> Result<Comb> {
    let layers: Vec<BipartiteChannel> = (1..=layout.wires.len())
        .map(|k| random_ppt_channel_with(rng, layout.layer_dims(k)))
        .collect::<std::result::Result<_, _>>()?;
    Ok(comb_from_channels(&layers, &layout.memory)?)
}

/// One seeded no-go trial on qubit channels `(2,2) → (2,2)`: a random PPT comb
/// with `slots` slots and one random PPT channel reused in every slot when
/// `repeat`, fresh channels otherwise.
pub fn no_go_trial(slots: usize, seed: u64, repeat: bool) -> Result<NoGoReport> {
    if !(1..=2).contains(&slots) {
        return Err(ScenarioError::Precondition(format!("qubit combs support 1 or 2 slots, got {slots}")));
    }
    let slot = ChannelDims::new(2, 2, 2, 2);
    let mut r = rng(seed);
    let comb = random_ppt_comb_with(&mut r, &state_comb_layout(slots, slot, (1, 1)))?;
    let first = random_ppt_channel_with(&mut r, slot)?;
    let mut inputs = vec![first];
    for _ in 1..slots {
        let next = if repeat { inputs[0].clone() } else { random_ppt_channel_with(&mut r, slot)? };
        inputs.push(next);
    }
    distillation_no_go(&comb, &inputs)
}
