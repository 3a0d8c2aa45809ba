//! Choi-matrix carriers for bipartite channels, superchannels and combs.
//!
//! Choi matrices are unnormalized: `J = Σ_ij |i⟩⟨j|_in ⊗ N(|i⟩⟨j|)`, so a
//! channel satisfies `Tr_out J = I_in`. Channel factors are ordered
//! `(A0, B0, A1, B1)`; superchannel factors `(A0, A1, B0, B1, A0', A1', B0', B1')`,
//! slot first.

mod comb;
mod named;
mod random;

use thiserror::Error;

use crate::tensor::{CMatrix, DimSpec, LabeledMatrix, TensorError, C64};

pub use comb::{
    comb_apply, comb_apply_choi, comb_defect, comb_from_channels, comb_gamma, is_comb_valid, is_ppt_comb, wire_label, Comb, CombLayout,
};
pub use named::*;
pub use random::*;

pub const A0: &str = "A0";
pub const B0: &str = "B0";
pub const A1: &str = "A1";
pub const B1: &str = "B1";
pub const A0P: &str = "A0'";
pub const B0P: &str = "B0'";
pub const A1P: &str = "A1'";
pub const B1P: &str = "B1'";

pub const CHANNEL_ORDER: [&str; 4] = [A0, B0, A1, B1];
pub const SLOT_ORDER: [&str; 4] = [A0, A1, B0, B1];
pub const OUTPUT_ORDER: [&str; 4] = [A0P, A1P, B0P, B1P];
pub const SUPERCHANNEL_ORDER: [&str; 8] = [A0, A1, B0, B1, A0P, A1P, B0P, B1P];
/// Bob-side factors of a superchannel Choi matrix.
pub const SUPERCHANNEL_B_SIDE: [&str; 4] = [B0, B1, B0P, B1P];
/// Channel entries are checked against this absolute tolerance (scaled by max(1, ‖J‖max)).
pub const MARGINAL_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QuantumError {
    #[error(transparent)]
    Tensor(#[from] TensorError),
    #[error("Kraus operators are not trace preserving (defect {0:.3e})")]
    Completeness(f64),
    #[error("not a valid channel: {0}")]
    InvalidChannel(String),
    #[error("not a valid superchannel: {0}")]
    InvalidSuperchannel(String),
    #[error("dimension mismatch: {0}")]
    DimMismatch(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("no acceptable sample after {0} attempts")]
    SeedExhausted(usize),
}

pub type Result<T> = std::result::Result<T, QuantumError>;

/// Dimensions of a bipartite channel `A0 B0 → A1 B1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ChannelDims {
    pub a0: usize,
    pub b0: usize,
    pub a1: usize,
    pub b1: usize,
}

impl ChannelDims {
    pub const fn new(a0: usize, b0: usize, a1: usize, b1: usize) -> Self {
        Self { a0, b0, a1, b1 }
    }

    /// Trivial-input channel preparing a state on `A1 B1`.
    pub const fn state(a1: usize, b1: usize) -> Self {
        Self { a0: 1, b0: 1, a1, b1 }
    }

    pub fn input_dim(&self) -> usize {
        self.a0 * self.b0
    }

    pub fn output_dim(&self) -> usize {
        self.a1 * self.b1
    }

    pub fn total(&self) -> usize {
        self.input_dim() * self.output_dim()
    }

    fn check(&self) -> Result<()> {
        if [self.a0, self.b0, self.a1, self.b1].contains(&0) {
            return Err(QuantumError::InvalidArgument("channel dimensions must be positive".into()));
        }
        Ok(())
    }

    /// Spec `(A0, B0, A1, B1)`.
    pub fn spec(&self) -> DimSpec {
        self.spec_labeled(CHANNEL_ORDER)
    }

    /// Spec with custom labels for `(A0, B0, A1, B1)`.
    pub fn spec_labeled(&self, labels: [&str; 4]) -> DimSpec {
        DimSpec::new([(labels[0], self.a0), (labels[1], self.b0), (labels[2], self.a1), (labels[3], self.b1)]).expect("distinct labels")
    }

    fn from_spec(spec: &DimSpec) -> Result<Self> {
        Ok(Self::new(spec.dim_of(A0)?, spec.dim_of(B0)?, spec.dim_of(A1)?, spec.dim_of(B1)?))
    }
}

impl std::fmt::Display for ChannelDims {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({},{})->({},{})", self.a0, self.b0, self.a1, self.b1)
    }
}

/// Link product: contracts the labels shared by `a` and `b`,
/// `Tr_S[(a^{T_S} ⊗ I)(I ⊗ b)]`. The result lists `a`'s remaining factors,
/// then `b`'s, each in their original order.
pub fn link(a: &LabeledMatrix, b: &LabeledMatrix) -> Result<LabeledMatrix> {
    let la = a.spec().labels();
    let lb = b.spec().labels();
    let shared: Vec<&str> = la.iter().copied().filter(|l| lb.contains(l)).collect();
    for l in &shared {
        if a.spec().dim_of(l)? != b.spec().dim_of(l)? {
            return Err(QuantumError::DimMismatch(format!("shared factor `{l}` differs in dimension")));
        }
    }
    let xa: Vec<&str> = la.iter().copied().filter(|l| !shared.contains(l)).collect();
    let yb: Vec<&str> = lb.iter().copied().filter(|l| !shared.contains(l)).collect();
    let a_order: Vec<&str> = xa.iter().chain(shared.iter()).copied().collect();
    let b_order: Vec<&str> = shared.iter().chain(yb.iter()).copied().collect();
    let ap = a.permute(&a_order)?;
    let bp = b.permute(&b_order)?;
    let dx = a.spec().dim_of_set(&xa)?;
    let dy = b.spec().dim_of_set(&yb)?;
    let ds = a.spec().dim_of_set(&shared)?;
    let out_spec = a.spec().subset(&xa)?.concat(&b.spec().subset(&yb)?)?;
    let am = ap.matrix();
    let n = dx * dy;
    let mut out = CMatrix::zeros(n, n);
    let dst = out.data_mut();
    // C[(x,y),(x',y')] = Σ_{s,s'} A[(x,s'),(x',s)] · B[(s',y),(s,y')]
    for s in 0..ds {
        for sp in 0..ds {
            for x in 0..dx {
                for xp in 0..dx {
                    let av = am[(x * ds + sp, xp * ds + s)];
                    if av.re == 0.0 && av.im == 0.0 {
                        continue;
                    }
                    for y in 0..dy {
                        let row = (x * dy + y) * n + xp * dy;
                        let brow = bp.matrix().row(sp * dy + y);
                        for yp in 0..dy {
                            let bv = brow[s * dy + yp];
                            dst[row + yp] += av * bv;
                        }
                    }
                }
            }
        }
    }
    Ok(LabeledMatrix::new(out_spec, out)?)
}

/// Rewrites one factor as a product of finer factors (most significant first).
pub fn split_factor(m: &LabeledMatrix, label: &str, parts: &[(&str, usize)]) -> Result<LabeledMatrix> {
    let d = m.spec().dim_of(label)?;
    let prod: usize = parts.iter().map(|p| p.1).product();
    if prod != d {
        return Err(QuantumError::DimMismatch(format!("cannot split `{label}` of dimension {d} into {parts:?}")));
    }
    let mut factors: Vec<(String, usize)> = Vec::new();
    for (l, dl) in m.spec().factors() {
        if l == label {
            factors.extend(parts.iter().map(|(p, q)| (p.to_string(), *q)));
        } else {
            factors.push((l.clone(), *dl));
        }
    }
    Ok(LabeledMatrix::new(DimSpec::new(factors)?, m.matrix().clone())?)
}

/// Merges adjacent factors into one (inverse of [`split_factor`]).
pub fn merge_factors(m: &LabeledMatrix, parts: &[&str], label: &str) -> Result<LabeledMatrix> {
    let spec = m.spec();
    let first = spec.position(parts[0])?;
    for (k, p) in parts.iter().enumerate() {
        if spec.position(p)? != first + k {
            return Err(QuantumError::DimMismatch(format!("factors {parts:?} are not adjacent")));
        }
    }
    let mut factors: Vec<(String, usize)> = Vec::new();
    let d = spec.dim_of_set(parts)?;
    for (i, (l, dl)) in spec.factors().iter().enumerate() {
        if i == first {
            factors.push((label.to_string(), d));
        } else if !parts.contains(&l.as_str()) {
            factors.push((l.clone(), *dl));
        }
    }
    Ok(LabeledMatrix::new(DimSpec::new(factors)?, m.matrix().clone())?)
}

fn entry_tol(m: &LabeledMatrix) -> f64 {
    MARGINAL_TOL * m.matrix().max_abs().max(1.0)
}

/// PSD within PSD_TOL relative to the operator norm.
pub fn is_psd(m: &LabeledMatrix) -> bool {
    m.is_psd().unwrap_or(false)
}

/// Partial transpose of a channel-ordered Choi matrix on Bob's factors.
pub fn gamma_channel_choi(choi: &LabeledMatrix) -> Result<LabeledMatrix> {
    Ok(choi.partial_transpose(&[B0, B1])?)
}

/// Hermitian-preserving bipartite map given by its (unvalidated) Choi matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct BipartiteMap {
    dims: ChannelDims,
    choi: LabeledMatrix,
}

impl BipartiteMap {
    pub fn new(choi: LabeledMatrix) -> Result<Self> {
        let dims = ChannelDims::from_spec(choi.spec())?;
        dims.check()?;
        let choi = choi.permute(&CHANNEL_ORDER)?;
        Ok(Self { dims, choi })
    }

    pub fn dims(&self) -> ChannelDims {
        self.dims
    }

    pub fn choi(&self) -> &LabeledMatrix {
        &self.choi
    }

    pub fn gamma(&self) -> BipartiteMap {
        BipartiteMap { dims: self.dims, choi: gamma_channel_choi(&self.choi).expect("channel labels") }
    }

    pub fn sub(&self, other: &BipartiteMap) -> Result<BipartiteMap> {
        Ok(BipartiteMap { dims: self.dims, choi: self.choi.sub(&other.choi)? })
    }

    /// Validates as a channel.
    pub fn into_channel(self) -> Result<BipartiteChannel> {
        BipartiteChannel::from_choi(self.choi)
    }
}

/// Completely positive trace-preserving bipartite channel.
#[derive(Clone, Debug, PartialEq)]
pub struct BipartiteChannel {
    dims: ChannelDims,
    choi: LabeledMatrix,
}

impl BipartiteChannel {
    /// Validates PSD and trace preservation. Factors may come in any order;
    /// they are stored as `(A0, B0, A1, B1)`.
    pub fn from_choi(choi: LabeledMatrix) -> Result<Self> {
        let map = BipartiteMap::new(choi)?;
        if let Some(why) = channel_defect(&map.choi) {
            return Err(QuantumError::InvalidChannel(why));
        }
        Ok(Self { dims: map.dims, choi: map.choi })
    }

    /// Wraps a Choi matrix already known to describe a channel up to
    /// rounding; only the factor layout is checked.
    pub fn from_choi_unchecked(choi: LabeledMatrix) -> Result<Self> {
        let map = BipartiteMap::new(choi)?;
        Ok(Self { dims: map.dims, choi: map.choi })
    }

    pub fn dims(&self) -> ChannelDims {
        self.dims
    }

    pub fn choi(&self) -> &LabeledMatrix {
        &self.choi
    }

    pub fn as_map(&self) -> BipartiteMap {
        BipartiteMap { dims: self.dims, choi: self.choi.clone() }
    }

    /// Choi matrix of the Γ-image `(1 ⊗ T_B) ∘ N ∘ (1 ⊗ T_B)`.
    pub fn gamma(&self) -> BipartiteMap {
        self.as_map().gamma()
    }

    /// Parallel composition `self ⊗ other` with `A = A_self A_other`, `B = B_self B_other`.
    pub fn tensor(&self, other: &BipartiteChannel) -> Result<BipartiteChannel> {
        let l = self.choi.relabel(&[(A0, "a0"), (B0, "b0"), (A1, "a1"), (B1, "b1")])?;
        let r = other.choi.relabel(&[(A0, "a0~"), (B0, "b0~"), (A1, "a1~"), (B1, "b1~")])?;
        let k = l.kron(&r)?.permute(&["a0", "a0~", "b0", "b0~", "a1", "a1~", "b1", "b1~"])?;
        let k = merge_factors(&k, &["a0", "a0~"], A0)?;
        let k = merge_factors(&k, &["b0", "b0~"], B0)?;
        let k = merge_factors(&k, &["a1", "a1~"], A1)?;
        let k = merge_factors(&k, &["b1", "b1~"], B1)?;
        BipartiteChannel::from_choi_unchecked(k)
    }
}

/// Describes why a channel-ordered Choi matrix fails CPTP, if it does.
pub fn channel_defect(choi: &LabeledMatrix) -> Option<String> {
    if !choi.is_hermitian() {
        return Some("Choi matrix is not Hermitian".into());
    }
    if !is_psd(choi) {
        return Some(format!("Choi matrix is not PSD (min eigenvalue {:.3e})", choi.min_eigenvalue().unwrap_or(f64::NAN)));
    }
    let marg = choi.partial_trace(&[A0, B0]).ok()?;
    let id = LabeledMatrix::identity(marg.spec());
    let defect = marg.max_abs_diff(&id).ok()?;
    if defect > entry_tol(choi) {
        return Some(format!("not trace preserving (defect {defect:.3e})"));
    }
    None
}

/// Builds a channel from Kraus operators `K: (A0 B0) → (A1 B1)`.
pub fn channel_from_kraus(kraus: &[CMatrix], dims: ChannelDims) -> Result<BipartiteChannel> {
    dims.check()?;
    let (din, dout) = (dims.input_dim(), dims.output_dim());
    if kraus.is_empty() {
        return Err(QuantumError::InvalidArgument("empty Kraus list".into()));
    }
    let mut completeness = CMatrix::zeros(din, din);
    for k in kraus {
        if k.rows() != dout || k.cols() != din {
            return Err(QuantumError::DimMismatch(format!("Kraus operator is {}x{}, expected {dout}x{din}", k.rows(), k.cols())));
        }
        completeness = &completeness + &(&k.adjoint() * k);
    }
    let defect = completeness.max_abs_diff(&CMatrix::identity(din));
    if defect > 1e-9 {
        return Err(QuantumError::Completeness(defect));
    }
    let n = din * dout;
    let mut j = CMatrix::zeros(n, n);
    for k in kraus {
        // |K⟩⟩ = Σ_i |i⟩ ⊗ K|i⟩
        let v: Vec<C64> = (0..din).flat_map(|i| (0..dout).map(move |o| (i, o))).map(|(i, o)| k[(o, i)]).collect();
        j = &j + &CMatrix::outer(&v, &v);
    }
    let choi = LabeledMatrix::new(dims.spec(), j)?;
    Ok(BipartiteChannel { dims, choi })
}

/// `N(ρ) = Tr_in[(ρ^T ⊗ I) J]`; `rho` is over `(A0, B0)`.
pub fn apply_channel(n: &BipartiteChannel, rho: &LabeledMatrix) -> Result<LabeledMatrix> {
    apply_map_choi(n.choi(), rho)
}

pub(crate) fn apply_map_choi(choi: &LabeledMatrix, rho: &LabeledMatrix) -> Result<LabeledMatrix> {
    let want = choi.spec().subset(&[A0, B0])?;
    let rho = if rho.spec().labels() == want.labels() {
        rho.clone()
    } else if rho.dim() == want.total_dim() {
        LabeledMatrix::new(want.clone(), rho.matrix().clone())?
    } else {
        return Err(QuantumError::DimMismatch(format!("input state over {} but channel input is {}", rho.spec(), want)));
    };
    if rho.spec() != &want {
        return Err(QuantumError::DimMismatch(format!("input state over {} but channel input is {}", rho.spec(), want)));
    }
    let out = link(&rho, choi)?;
    Ok(out)
}

/// True iff `(J^N)^{T_{B0 B1}}` is PSD within PSD_TOL.
pub fn is_ppt_channel(n: &BipartiteChannel) -> bool {
    is_psd(n.gamma().choi())
}

pub fn channel_gamma(n: &BipartiteChannel) -> BipartiteMap {
    n.gamma()
}

/// Composition `second ∘ first`, both channel-ordered; `first`'s output
/// dimensions must match `second`'s input dimensions.
pub fn compose_channels(first: &BipartiteChannel, second: &BipartiteChannel) -> Result<BipartiteChannel> {
    let (f, s) = (first.dims(), second.dims());
    if f.a1 != s.a0 || f.b1 != s.b0 {
        return Err(QuantumError::DimMismatch(format!("cannot compose {f} with {s}")));
    }
    let jf = first.choi().relabel(&[(A1, "m_a"), (B1, "m_b")])?;
    let js = second.choi().relabel(&[(A0, "m_a"), (B0, "m_b")])?;
    BipartiteChannel::from_choi_unchecked(link(&jf, &js)?)
}

/// Bipartite superchannel `AB → A'B'` with slot dims `slot` and output dims `out`.
#[derive(Clone, Debug, PartialEq)]
pub struct Superchannel {
    slot: ChannelDims,
    out: ChannelDims,
    choi: LabeledMatrix,
}

/// Superchannel factor spec for slot and output channel dims.
pub fn superchannel_spec(slot: ChannelDims, out: ChannelDims) -> DimSpec {
    DimSpec::new([
        (A0, slot.a0),
        (A1, slot.a1),
        (B0, slot.b0),
        (B1, slot.b1),
        (A0P, out.a0),
        (A1P, out.a1),
        (B0P, out.b0),
        (B1P, out.b1),
    ])
    .expect("distinct labels")
}

impl Superchannel {
    /// Wraps a Choi matrix without validating the superchannel conditions
    /// (the `is_*` predicates report them).
    pub fn from_choi(choi: LabeledMatrix) -> Result<Self> {
        let s = choi.spec();
        let slot = ChannelDims::new(s.dim_of(A0)?, s.dim_of(B0)?, s.dim_of(A1)?, s.dim_of(B1)?);
        let out = ChannelDims::new(s.dim_of(A0P)?, s.dim_of(B0P)?, s.dim_of(A1P)?, s.dim_of(B1P)?);
        if s.len() != 8 {
            return Err(QuantumError::DimMismatch(format!("superchannel Choi must have 8 factors, got {}", s)));
        }
        let choi = choi.permute(&SUPERCHANNEL_ORDER)?;
        Ok(Self { slot, out, choi })
    }

    pub fn slot_dims(&self) -> ChannelDims {
        self.slot
    }

    pub fn output_dims(&self) -> ChannelDims {
        self.out
    }

    pub fn choi(&self) -> &LabeledMatrix {
        &self.choi
    }

    /// Choi matrix of `Θ^Γ = Υ_{B'} ∘ Θ ∘ Υ_B`.
    pub fn gamma_choi(&self) -> LabeledMatrix {
        self.choi.partial_transpose(&SUPERCHANNEL_B_SIDE).expect("superchannel labels")
    }
}

/// First violated superchannel condition, if any.
pub fn superchannel_defect(choi: &LabeledMatrix) -> Option<String> {
    if !choi.is_hermitian() {
        return Some("Choi matrix is not Hermitian".into());
    }
    if !is_psd(choi) {
        return Some("Choi matrix is not PSD".into());
    }
    let tol = entry_tol(choi);
    let lhs = choi.trace_out(&[A1P, B1P]).ok()?;
    let pre = choi.trace_out(&[A1, B1, A1P, B1P]).ok()?;
    let d11 = (choi.spec().dim_of(A1).ok()? * choi.spec().dim_of(B1).ok()?) as f64;
    let rhs = pre.expand_to(lhs.spec()).ok()?.scale(1.0 / d11);
    let d1 = lhs.max_abs_diff(&rhs).ok()?;
    if d1 > tol {
        return Some(format!("marginal on A B A0' B0' is not of the form J_(A0 B0 A0' B0') ⊗ u_(A1 B1) (defect {d1:.3e})"));
    }
    let m2 = choi.trace_out(&[A0, B0, A1P, B1P]).ok()?;
    let d2 = m2.max_abs_diff(&LabeledMatrix::identity(m2.spec())).ok()?;
    if d2 > tol {
        return Some(format!("marginal on A1 B1 A0' B0' is not the identity (defect {d2:.3e})"));
    }
    None
}

pub fn is_superchannel_valid(t: &Superchannel) -> bool {
    superchannel_defect(&t.choi).is_none()
}

/// Valid and `(J^Θ)^{T_{B B'}}` PSD.
pub fn is_ppt_superchannel(t: &Superchannel) -> bool {
    is_superchannel_valid(t) && is_psd(&t.gamma_choi())
}

pub fn superchannel_gamma(t: &Superchannel) -> Superchannel {
    Superchannel { slot: t.slot, out: t.out, choi: t.gamma_choi() }
}

/// `J^{Θ[N]} = Tr_{AB}[J^Θ ((J^N)^T ⊗ I_{A'B'})]` for any Hermitian-preserving `N`.
pub fn apply_supermap_choi(theta: &LabeledMatrix, n: &LabeledMatrix) -> Result<BipartiteMap> {
    let out = link(n, theta)?;
    let out = out.relabel(&[(A0P, A0), (A1P, A1), (B0P, B0), (B1P, B1)])?;
    BipartiteMap::new(out)
}

pub fn apply_superchannel(t: &Superchannel, n: &BipartiteChannel) -> Result<BipartiteChannel> {
    if n.dims() != t.slot {
        return Err(QuantumError::DimMismatch(format!("channel {} does not fit slot {}", n.dims(), t.slot)));
    }
    let m = apply_supermap_choi(&t.choi, n.choi())?;
    BipartiteChannel::from_choi_unchecked(m.choi)
}

/// Superchannel realized as `Θ[N] = post ∘ (N ⊗ id_M) ∘ pre`.
///
/// `pre: A0' B0' → (A0 ⊗ M_A)(B0 ⊗ M_B)` and `post: (A1 ⊗ M_A)(B1 ⊗ M_B) → A1' B1'`,
/// slot factor most significant inside each merged factor.
pub fn superchannel_from_pre_post(
    pre: &BipartiteChannel,
    post: &BipartiteChannel,
    memory: (usize, usize),
) -> Result<Superchannel> {
    let (ma, mb) = memory;
    if ma == 0 || mb == 0 {
        return Err(QuantumError::InvalidArgument("memory dimensions must be positive".into()));
    }
    let (p, q) = (pre.dims(), post.dims());
    if p.a1 % ma != 0 || p.b1 % mb != 0 || q.a0 % ma != 0 || q.b0 % mb != 0 {
        return Err(QuantumError::DimMismatch(format!("memory ({ma},{mb}) does not divide pre {p} / post {q}")));
    }
    let jp = pre.choi().relabel(&[(A0, A0P), (B0, B0P)])?;
    let jp = split_factor(&jp, A1, &[(A0, p.a1 / ma), ("mem_a", ma)])?;
    let jp = split_factor(&jp, B1, &[(B0, p.b1 / mb), ("mem_b", mb)])?;
    let jq = post.choi().relabel(&[(A1, A1P), (B1, B1P)])?;
    let jq = split_factor(&jq, A0, &[(A1, q.a0 / ma), ("mem_a", ma)])?;
    let jq = split_factor(&jq, B0, &[(B1, q.b0 / mb), ("mem_b", mb)])?;
    let j = link(&jp, &jq)?;
    Superchannel::from_choi(j)
}

/// Identity superchannel on channels of dims `d`.
pub fn identity_superchannel(d: ChannelDims) -> Result<Superchannel> {
    let pre = identity_channel(ChannelDims::new(d.a0, d.b0, d.a0, d.b0))?;
    let post = identity_channel(ChannelDims::new(d.a1, d.b1, d.a1, d.b1))?;
    superchannel_from_pre_post(&pre, &post, (1, 1))
}

/// Replacer superchannel `Θ[N] = M` on slot dims `slot`.
pub fn replacer_superchannel(slot: ChannelDims, m: &BipartiteChannel) -> Result<Superchannel> {
    let s = superchannel_spec(slot, m.dims());
    let slot_spec = s.subset(&SLOT_ORDER)?;
    let in_dim = slot.input_dim() as f64;
    let base = LabeledMatrix::identity(&slot_spec).scale(1.0 / in_dim);
    let jm = m.choi().relabel(&[(A0, A0P), (B0, B0P), (A1, A1P), (B1, B1P)])?;
    Superchannel::from_choi(base.kron(&jm)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn link_matches_apply_formula() {
        let n = random_channel(ChannelDims::new(2, 1, 2, 2), 3).unwrap();
        let rho = LabeledMatrix::new(DimSpec::new([(A0, 2), (B0, 1)]).unwrap(), CMatrix::from_real(2, 2, &[0.6, 0.1, 0.1, 0.4])).unwrap();
        let out = apply_channel(&n, &rho).unwrap();
        // Tr_in[(ρ^T ⊗ I) J]
        let big = rho.transpose().expand_to(n.choi().spec()).unwrap().matmul(n.choi()).unwrap();
        let want = big.partial_trace(&[A1, B1]).unwrap();
        assert!(out.max_abs_diff(&want).unwrap() < 1e-14);
        assert!((out.trace().re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn kraus_examples() {
        let idq = channel_from_kraus(&[CMatrix::identity(2)], ChannelDims::new(2, 1, 2, 1)).unwrap();
        let mut phi = CMatrix::zeros(4, 4);
        for (i, j) in [(0, 0), (0, 3), (3, 0), (3, 3)] {
            phi[(i, j)] = C64::new(1.0, 0.0);
        }
        assert_eq!(idq.choi().matrix(), &phi);

        let h = 0.5f64;
        let paulis = [
            CMatrix::identity(2).scale_real(h),
            CMatrix::from_real(2, 2, &[0., 1., 1., 0.]).scale_real(h),
            CMatrix::from_vec(2, 2, vec![C64::new(0., 0.), C64::new(0., -1.), C64::new(0., 1.), C64::new(0., 0.)]).scale_real(h),
            CMatrix::diag(&[1., -1.]).scale_real(h),
        ];
        let dep = channel_from_kraus(&paulis, ChannelDims::new(2, 1, 2, 1)).unwrap();
        assert!(dep.choi().matrix().max_abs_diff(&CMatrix::identity(4).scale_real(0.5)) < 1e-15);

        let bad = channel_from_kraus(&[CMatrix::identity(2).scale_real(0.5)], ChannelDims::new(2, 1, 2, 1));
        assert!(matches!(bad, Err(QuantumError::Completeness(_))));
    }

    #[test]
    fn unitary_kraus_choi() {
        let u = CMatrix::from_vec(2, 2, vec![C64::new(0.6, 0.0), C64::new(0.0, 0.8), C64::new(0.0, 0.8), C64::new(0.6, 0.0)]);
        let ch = channel_from_kraus(&[u.clone()], ChannelDims::new(2, 1, 2, 1)).unwrap();
        let mut phi = CMatrix::zeros(4, 4);
        for (i, j) in [(0, 0), (0, 3), (3, 0), (3, 3)] {
            phi[(i, j)] = C64::new(1.0, 0.0);
        }
        let iu = CMatrix::identity(2).kron(&u);
        let want = &(&iu * &phi) * &iu.adjoint();
        assert!(ch.choi().matrix().max_abs_diff(&want) < 1e-15);
    }

    #[test]
    fn compose_matches_sequential_application() {
        let f = random_channel(ChannelDims::new(2, 1, 1, 2), 11).unwrap();
        let g = random_channel(ChannelDims::new(1, 2, 2, 2), 12).unwrap();
        let gf = compose_channels(&f, &g).unwrap();
        let rho = LabeledMatrix::new(DimSpec::new([(A0, 2), (B0, 1)]).unwrap(), CMatrix::from_real(2, 2, &[0.3, 0.2, 0.2, 0.7])).unwrap();
        let mid = apply_channel(&f, &rho).unwrap().relabel(&[(A1, A0), (B1, B0)]).unwrap();
        let seq = apply_channel(&g, &mid).unwrap();
        let direct = apply_channel(&gf, &rho).unwrap();
        assert!(seq.max_abs_diff(&direct).unwrap() < 1e-13);
    }
}
