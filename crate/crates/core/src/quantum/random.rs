//! Seeded random instances. Every generator takes an explicit seed or RNG.

use rand::SeedableRng;
use rand_distr::{Distribution, StandardNormal};

use super::{
    channel_from_kraus, depolarizing_channel, is_ppt_superchannel, superchannel_from_pre_post, BipartiteChannel, ChannelDims,
    QuantumError, Result, Superchannel,
};
use crate::tensor::{CMatrix, DimSpec, LabeledMatrix, C64};

pub type ChaCha = rand_chacha::ChaCha8Rng;

/// Margin kept between a sampled PPT channel's partial transpose and the PSD boundary.
pub const PPT_MARGIN: f64 = 1e-6;
const MAX_ATTEMPTS: usize = 32;

pub fn rng(seed: u64) -> ChaCha {
    ChaCha::seed_from_u64(seed)
}

/// Complex Ginibre matrix with unit-variance entries.
pub fn ginibre(rng: &mut ChaCha, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
    })
}

/// Random density matrix `G G† / Tr` of the given rank over `spec`.
pub fn random_density(rng: &mut ChaCha, spec: &DimSpec, rank: usize) -> LabeledMatrix {
    let d = spec.total_dim();
    let g = ginibre(rng, d, rank.max(1));
    let w = &g * &g.adjoint();
    let tr = w.trace().re;
    LabeledMatrix::new(spec.clone(), w.scale_real(1.0 / tr)).expect("size")
}

/// Random PSD matrix `G G†` (Wishart, `d` degrees of freedom) over `spec`.
pub fn random_psd(rng: &mut ChaCha, spec: &DimSpec) -> LabeledMatrix {
    let d = spec.total_dim();
    let g = ginibre(rng, d, d);
    LabeledMatrix::new(spec.clone(), &g * &g.adjoint()).expect("size")
}

/// Random Hermitian `(G + G†)/2` over `spec`.
pub fn random_hermitian(rng: &mut ChaCha, spec: &DimSpec) -> LabeledMatrix {
    let d = spec.total_dim();
    let g = ginibre(rng, d, d);
    LabeledMatrix::new(spec.clone(), g.hermitian_part()).expect("size")
}

/// `G (G†G)^{-1/2}`: an isometry from a Ginibre matrix.
fn isometry(rng: &mut ChaCha, rows: usize, cols: usize) -> CMatrix {
    loop {
        let g = ginibre(rng, rows, cols);
        let gg = &g.adjoint() * &g;
        let (w, u) = crate::tensor::hermitian_eig_matrix(&gg);
        if w.iter().any(|&x| x <= 1e-10) {
            continue;
        }
        let inv_sqrt = CMatrix::diag(&w.iter().map(|x| 1.0 / x.sqrt()).collect::<Vec<_>>());
        return &g * &(&(&u * &inv_sqrt) * &u.adjoint());
    }
}

/// Random channel from a Haar-like Kraus isometry of full Kraus rank `in·out`.
pub fn random_channel_with(rng: &mut ChaCha, dims: ChannelDims) -> Result<BipartiteChannel> {
    let (din, dout) = (dims.input_dim(), dims.output_dim());
    let rank = din * dout;
    let v = isometry(rng, dout * rank, din);
    let kraus: Vec<CMatrix> = (0..rank).map(|k| CMatrix::from_fn(dout, din, |o, i| v[(k * dout + o, i)])).collect();
    channel_from_kraus(&kraus, dims)
}

pub fn random_channel(dims: ChannelDims, seed: u64) -> Result<BipartiteChannel> {
    random_channel_with(&mut rng(seed), dims)
}

fn mix(n: &BipartiteChannel, d: &BipartiteChannel, lambda: f64) -> BipartiteChannel {
    let j = n.choi().scale(lambda).add(&d.choi().scale(1.0 - lambda)).expect("same spec");
    BipartiteChannel::from_choi_unchecked(j).expect("labels")
}

fn gamma_min_eig(n: &BipartiteChannel) -> f64 {
    n.gamma().choi().min_eigenvalue().unwrap_or(f64::NEG_INFINITY)
}

/// Random PPT channel: a random channel mixed with the completely
/// depolarizing channel at the largest weight (to bisection accuracy) that
/// keeps the partial transpose at least [`PPT_MARGIN`] above zero.
pub fn random_ppt_channel_with(rng: &mut ChaCha, dims: ChannelDims) -> Result<BipartiteChannel> {
    let n = random_channel_with(rng, dims)?;
    let d = depolarizing_channel(dims);
    if gamma_min_eig(&n) >= PPT_MARGIN {
        return Ok(n);
    }
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..40 {
        let mid = 0.5 * (lo + hi);
        if gamma_min_eig(&mix(&n, &d, mid)) >= PPT_MARGIN {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let out = mix(&n, &d, lo);
    if gamma_min_eig(&out) < PPT_MARGIN {
        return Err(QuantumError::SeedExhausted(1));
    }
    Ok(out)
}

pub fn random_ppt_channel(dims: ChannelDims, seed: u64) -> Result<BipartiteChannel> {
    random_ppt_channel_with(&mut rng(seed), dims)
}

/// Slot dims, output dims and memory dims of a pre/post superchannel.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SuperchannelShape {
    pub slot: ChannelDims,
    pub out: ChannelDims,
    pub memory: (usize, usize),
}

impl SuperchannelShape {
    pub fn new(slot: ChannelDims, out: ChannelDims, memory: (usize, usize)) -> Self {
        Self { slot, out, memory }
    }

    pub fn pre_dims(&self) -> ChannelDims {
        ChannelDims::new(self.out.a0, self.out.b0, self.slot.a0 * self.memory.0, self.slot.b0 * self.memory.1)
    }

    pub fn post_dims(&self) -> ChannelDims {
        ChannelDims::new(self.slot.a1 * self.memory.0, self.slot.b1 * self.memory.1, self.out.a1, self.out.b1)
    }
}

pub fn random_superchannel_with(rng: &mut ChaCha, shape: SuperchannelShape) -> Result<Superchannel> {
    let pre = random_channel_with(rng, shape.pre_dims())?;
    let post = random_channel_with(rng, shape.post_dims())?;
    superchannel_from_pre_post(&pre, &post, shape.memory)
}

pub fn random_superchannel(shape: SuperchannelShape, seed: u64) -> Result<Superchannel> {
    random_superchannel_with(&mut rng(seed), shape)
}

/// Random PPT superchannel from random PPT pre- and post-processing,
/// retried until the result passes [`is_ppt_superchannel`].
pub fn random_ppt_superchannel_with(rng: &mut ChaCha, shape: SuperchannelShape) -> Result<Superchannel> {
    for _ in 0..MAX_ATTEMPTS {
        let pre = random_ppt_channel_with(rng, shape.pre_dims())?;
        let post = random_ppt_channel_with(rng, shape.post_dims())?;
        let t = superchannel_from_pre_post(&pre, &post, shape.memory)?;
        if is_ppt_superchannel(&t) {
            return Ok(t);
        }
    }
    Err(QuantumError::SeedExhausted(MAX_ATTEMPTS))
}

pub fn random_ppt_superchannel(shape: SuperchannelShape, seed: u64) -> Result<Superchannel> {
    random_ppt_superchannel_with(&mut rng(seed), shape)
}
