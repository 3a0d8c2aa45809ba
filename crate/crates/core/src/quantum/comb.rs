//! Bipartite quantum combs: `n` slots between `n + 1` layers with memory.
//!
//! Wire `k` (1-based, `k = 1..=n+1`) carries factors `A0^k B0^k` into layer
//! `k` and `A1^k B1^k` out of it. Slot `k` receives `A1^k B1^k` and feeds
//! `A0^{k+1} B0^{k+1}`. Layer `k` passes memory `(M_A^{k-1}, M_B^{k-1})` in
//! and `(M_A^k, M_B^k)` out, with slot factors most significant.

use super::{
    is_psd, link, split_factor, BipartiteChannel, BipartiteMap, ChannelDims, QuantumError, Result, A0, A1, B0, B1,
    MARGINAL_TOL,
};
use crate::tensor::{DimSpec, LabeledMatrix};

pub fn wire_label(base: &str, k: usize) -> String {
    format!("{base}^{k}")
}

fn mem_label(party: &str, k: usize) -> String {
    format!("M{party}^{k}")
}

/// Wire dims per layer and memory dims between layers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CombLayout {
    /// `(A0^k, B0^k, A1^k, B1^k)` for `k = 1..=n+1`.
    pub wires: Vec<ChannelDims>,
    /// `(M_A^k, M_B^k)` for `k = 1..=n`.
    pub memory: Vec<(usize, usize)>,
}

impl CombLayout {
    pub fn slot_count(&self) -> usize {
        self.memory.len()
    }

    /// Dims of the channel accepted by slot `k` (1-based).
    pub fn slot_dims(&self, k: usize) -> ChannelDims {
        let (w, v) = (self.wires[k - 1], self.wires[k]);
        ChannelDims::new(w.a1, w.b1, v.a0, v.b0)
    }

    /// Dims of layer `k` (1-based) including memory.
    pub fn layer_dims(&self, k: usize) -> ChannelDims {
        let w = self.wires[k - 1];
        let (ia, ib) = if k == 1 { (1, 1) } else { self.memory[k - 2] };
        let (oa, ob) = if k == self.wires.len() { (1, 1) } else { self.memory[k - 1] };
        ChannelDims::new(w.a0 * ia, w.b0 * ib, w.a1 * oa, w.b1 * ob)
    }

    /// Interleaved comb spec `A0^1, B0^1, A1^1, B1^1, A0^2, …`.
    pub fn spec(&self) -> DimSpec {
        let mut f = Vec::new();
        for (i, w) in self.wires.iter().enumerate() {
            let k = i + 1;
            f.push((wire_label(A0, k), w.a0));
            f.push((wire_label(B0, k), w.b0));
            f.push((wire_label(A1, k), w.a1));
            f.push((wire_label(B1, k), w.b1));
        }
        DimSpec::new(f).expect("distinct labels")
    }

    /// Labels of Bob's factors.
    pub fn b_labels(&self) -> Vec<String> {
        (1..=self.wires.len()).flat_map(|k| [wire_label(B0, k), wire_label(B1, k)]).collect()
    }

    fn check(&self) -> Result<()> {
        if self.wires.len() != self.memory.len() + 1 {
            return Err(QuantumError::DimMismatch(format!(
                "{} wires need {} memory pairs, got {}",
                self.wires.len(),
                self.wires.len().saturating_sub(1),
                self.memory.len()
            )));
        }
        Ok(())
    }
}

/// Choi matrix of the layer composite `E_{n+1} ∘ … ∘ E_1` over the
/// interleaved wire factors.
#[derive(Clone, Debug, PartialEq)]
pub struct Comb {
    layout: CombLayout,
    choi: LabeledMatrix,
}

impl Comb {
    /// Wraps a Choi matrix over `layout.spec()` without validation.
    pub fn from_choi(layout: CombLayout, choi: LabeledMatrix) -> Result<Self> {
        layout.check()?;
        let choi = choi.permute(&layout.spec().labels())?;
        Ok(Self { layout, choi })
    }

    pub fn layout(&self) -> &CombLayout {
        &self.layout
    }

    pub fn choi(&self) -> &LabeledMatrix {
        &self.choi
    }

    pub fn slot_count(&self) -> usize {
        self.layout.slot_count()
    }
}

/// Builds a comb from its `n + 1` layer channels. `memory[k-1]` is the memory
/// passed from layer `k` to layer `k + 1`; wire dims are inferred.
pub fn comb_from_channels(layers: &[BipartiteChannel], memory: &[(usize, usize)]) -> Result<Comb> {
    if layers.len() != memory.len() + 1 {
        return Err(QuantumError::DimMismatch(format!("{} layers need {} memory pairs", layers.len(), layers.len().saturating_sub(1))));
    }
    let n1 = layers.len();
    let mut wires = Vec::with_capacity(n1);
    for (i, l) in layers.iter().enumerate() {
        let d = l.dims();
        let (ia, ib) = if i == 0 { (1, 1) } else { memory[i - 1] };
        let (oa, ob) = if i + 1 == n1 { (1, 1) } else { memory[i] };
        if ia == 0 || ib == 0 || oa == 0 || ob == 0 || d.a0 % ia != 0 || d.b0 % ib != 0 || d.a1 % oa != 0 || d.b1 % ob != 0 {
            return Err(QuantumError::DimMismatch(format!("layer {} dims {d} do not factor through memory", i + 1)));
        }
        wires.push(ChannelDims::new(d.a0 / ia, d.b0 / ib, d.a1 / oa, d.b1 / ob));
    }
    let layout = CombLayout { wires, memory: memory.to_vec() };
    let mut acc: Option<LabeledMatrix> = None;
    for (i, l) in layers.iter().enumerate() {
        let k = i + 1;
        let w = layout.wires[i];
        let (a0, b0, a1, b1) = (wire_label(A0, k), wire_label(B0, k), wire_label(A1, k), wire_label(B1, k));
        let mut j = l.choi().relabel(&[(A0, "ia"), (B0, "ib"), (A1, "oa"), (B1, "ob")])?;
        let (ma_in, mb_in) = (mem_label("A", k - 1), mem_label("B", k - 1));
        let (ma_out, mb_out) = (mem_label("A", k), mem_label("B", k));
        let (ia, ib) = if i == 0 { (1, 1) } else { memory[i - 1] };
        let (oa, ob) = if k == n1 { (1, 1) } else { memory[i] };
        j = split_factor(&j, "ia", &[(a0.as_str(), w.a0), (ma_in.as_str(), ia)])?;
        j = split_factor(&j, "ib", &[(b0.as_str(), w.b0), (mb_in.as_str(), ib)])?;
        j = split_factor(&j, "oa", &[(a1.as_str(), w.a1), (ma_out.as_str(), oa)])?;
        j = split_factor(&j, "ob", &[(b1.as_str(), w.b1), (mb_out.as_str(), ob)])?;
        if i == 0 {
            j = j.trace_out(&[ma_in.as_str(), mb_in.as_str()])?;
        }
        if k == n1 {
            j = j.trace_out(&[ma_out.as_str(), mb_out.as_str()])?;
        }
        acc = Some(match acc {
            None => j,
            Some(a) => link(&a, &j)?,
        });
    }
    Comb::from_choi(layout, acc.expect("at least one layer"))
}

fn slot_relabel(m: &LabeledMatrix, k: usize) -> Result<LabeledMatrix> {
    let a = [wire_label(A1, k), wire_label(B1, k), wire_label(A0, k + 1), wire_label(B0, k + 1)];
    Ok(m.relabel(&[(A0, a[0].as_str()), (B0, a[1].as_str()), (A1, a[2].as_str()), (B1, a[3].as_str())])?)
}

/// Contracts slot maps (channel-ordered Choi matrices) into a comb Choi.
pub fn comb_apply_choi(layout: &CombLayout, choi: &LabeledMatrix, inputs: &[LabeledMatrix]) -> Result<BipartiteMap> {
    layout.check()?;
    if inputs.len() != layout.slot_count() {
        return Err(QuantumError::DimMismatch(format!("comb has {} slots, got {} channels", layout.slot_count(), inputs.len())));
    }
    let mut acc = choi.clone();
    for (i, n) in inputs.iter().enumerate() {
        let k = i + 1;
        let want = layout.slot_dims(k);
        let got = ChannelDims::new(n.spec().dim_of(A0)?, n.spec().dim_of(B0)?, n.spec().dim_of(A1)?, n.spec().dim_of(B1)?);
        if got != want {
            return Err(QuantumError::DimMismatch(format!("slot {k} takes {want}, got {got}")));
        }
        acc = link(&slot_relabel(n, k)?, &acc)?;
    }
    let last = layout.wires.len();
    let out = acc.relabel(&[
        (wire_label(A0, 1).as_str(), A0),
        (wire_label(B0, 1).as_str(), B0),
        (wire_label(A1, last).as_str(), A1),
        (wire_label(B1, last).as_str(), B1),
    ])?;
    BipartiteMap::new(out)
}

/// `C_n[N_1, …, N_n]`.
pub fn comb_apply(c: &Comb, inputs: &[BipartiteChannel]) -> Result<BipartiteChannel> {
    let chois: Vec<LabeledMatrix> = inputs.iter().map(|n| n.choi().clone()).collect();
    let out = comb_apply_choi(&c.layout, &c.choi, &chois)?;
    BipartiteChannel::from_choi_unchecked(out.choi().clone())
}

/// Comb Choi with the partial transpose on every Bob factor.
pub fn comb_gamma(c: &Comb) -> Comb {
    let b = c.layout.b_labels();
    let refs: Vec<&str> = b.iter().map(String::as_str).collect();
    Comb { layout: c.layout.clone(), choi: c.choi.partial_transpose(&refs).expect("comb labels") }
}

/// First violated comb condition, if any. Checks PSD and, for
/// `k = n+1, …, 1`, `Tr_{A1^k B1^k} J^(k) = I_{A0^k B0^k} ⊗ J^(k-1)` with
/// `J^(k-1) = Tr_{wire k} J^(k) / |A0^k B0^k|` and `J^(0) = 1`.
pub fn comb_defect(layout: &CombLayout, choi: &LabeledMatrix) -> Option<String> {
    if !choi.is_hermitian() {
        return Some("Choi matrix is not Hermitian".into());
    }
    if !is_psd(choi) {
        return Some("Choi matrix is not PSD".into());
    }
    let tol = MARGINAL_TOL * choi.matrix().max_abs().max(1.0);
    let mut cur = choi.clone();
    for k in (1..=layout.wires.len()).rev() {
        let (a0, b0, a1, b1) = (wire_label(A0, k), wire_label(B0, k), wire_label(A1, k), wire_label(B1, k));
        let marg = cur.trace_out(&[a1.as_str(), b1.as_str()]).ok()?;
        let din = (layout.wires[k - 1].a0 * layout.wires[k - 1].b0) as f64;
        let prev = marg.trace_out(&[a0.as_str(), b0.as_str()]).ok()?.scale(1.0 / din);
        let rhs = prev.expand_to(marg.spec()).ok()?;
        let d = marg.max_abs_diff(&rhs).ok()?;
        if d > tol {
            return Some(format!("causality condition fails at wire {k} (defect {d:.3e})"));
        }
        cur = prev;
    }
    let t = cur.trace();
    if (t.re - 1.0).abs() > tol {
        return Some(format!("normalization fails (trace {:.3e})", t.re));
    }
    None
}

pub fn is_comb_valid(c: &Comb) -> bool {
    comb_defect(&c.layout, &c.choi).is_none()
}

/// Valid comb whose partial transpose on Bob's factors is PSD.
pub fn is_ppt_comb(c: &Comb) -> bool {
    is_comb_valid(c) && is_psd(comb_gamma(c).choi())
}

#[cfg(test)]
mod tests {
    use super::super::*;
    use super::*;

    fn qubit_layout_layers(seed: u64, ppt: bool) -> (Vec<BipartiteChannel>, Vec<(usize, usize)>) {
        let memory = vec![(2, 1), (1, 2)];
        let dims = [ChannelDims::new(1, 1, 4, 2), ChannelDims::new(4, 2, 2, 4), ChannelDims::new(2, 4, 1, 1)];
        let layers = dims
            .iter()
            .enumerate()
            .map(|(i, d)| {
                let s = seed * 10 + i as u64;
                if ppt {
                    random_ppt_channel(*d, s).unwrap()
                } else {
                    random_channel(*d, s).unwrap()
                }
            })
            .collect();
        (layers, memory)
    }

    #[test]
    fn comb_is_valid_and_ppt_from_ppt_layers() {
        let (layers, memory) = qubit_layout_layers(1, true);
        let c = comb_from_channels(&layers, &memory).unwrap();
        assert_eq!(c.slot_count(), 2);
        assert!(is_comb_valid(&c));
        assert!(is_ppt_comb(&c));
        let (layers, memory) = qubit_layout_layers(2, false);
        assert!(is_comb_valid(&comb_from_channels(&layers, &memory).unwrap()));
    }

    #[test]
    fn comb_apply_matches_sequential_composition() {
        let (layers, memory) = qubit_layout_layers(3, false);
        let c = comb_from_channels(&layers, &memory).unwrap();
        let n1 = random_channel(c.layout().slot_dims(1), 40).unwrap();
        let n2 = random_channel(c.layout().slot_dims(2), 41).unwrap();
        let out = comb_apply(&c, &[n1.clone(), n2.clone()]).unwrap();
        // Sequential: layer1 → (n1 ⊗ id_mem) → layer2 → (n2 ⊗ id_mem) → layer3
        let with_mem = |n: &BipartiteChannel, ma: usize, mb: usize| {
            let idm = identity_channel(ChannelDims::new(ma, mb, ma, mb)).unwrap();
            n.tensor(&idm).unwrap()
        };
        let s1 = compose_channels(&layers[0], &with_mem(&n1, 2, 1)).unwrap();
        let s2 = compose_channels(&s1, &layers[1]).unwrap();
        let s3 = compose_channels(&s2, &with_mem(&n2, 1, 2)).unwrap();
        let s4 = compose_channels(&s3, &layers[2]).unwrap();
        assert!(out.choi().max_abs_diff(s4.choi()).unwrap() < 1e-12);
        assert!(channel_defect(out.choi()).is_none());
    }

    #[test]
    fn one_slot_comb_matches_superchannel() {
        let pre = random_channel(ChannelDims::new(2, 1, 4, 2), 7).unwrap();
        let post = random_channel(ChannelDims::new(4, 2, 1, 2), 8).unwrap();
        let t = superchannel_from_pre_post(&pre, &post, (2, 1)).unwrap();
        let c = comb_from_channels(&[pre, post], &[(2, 1)]).unwrap();
        let n = random_channel(t.slot_dims(), 9).unwrap();
        let a = apply_superchannel(&t, &n).unwrap();
        let b = comb_apply(&c, &[n]).unwrap();
        assert!(a.choi().max_abs_diff(b.choi()).unwrap() < 1e-12);
    }

    #[test]
    fn gamma_commutes_with_comb_application() {
        let (layers, memory) = qubit_layout_layers(4, false);
        let c = comb_from_channels(&layers, &memory).unwrap();
        let n1 = random_channel(c.layout().slot_dims(1), 50).unwrap();
        let n2 = random_channel(c.layout().slot_dims(2), 51).unwrap();
        let lhs = comb_apply(&c, &[n1.clone(), n2.clone()]).unwrap().gamma();
        let g = comb_gamma(&c);
        let rhs = comb_apply_choi(g.layout(), g.choi(), &[n1.gamma().choi().clone(), n2.gamma().choi().clone()]).unwrap();
        assert!(lhs.choi().max_abs_diff(rhs.choi()).unwrap() < 1e-10);
    }
}
