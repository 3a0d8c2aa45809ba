//! Single-shot exact PPT cost and the bounds relating it to LN_max.

use std::collections::BTreeMap;
use std::time::Instant;

use crate::quantum::{BipartiteChannel, A1, B0, B1};
use crate::solver::{feasibility, Solution};
use crate::tensor::{CMatrix, LabeledMatrix};

use super::norms::ln_max;
use super::programs::{exact_cost_program, CostProgram};
use super::{MeasureError, Result};

pub const M_MAX: usize = 64;
/// Largest total dimension of `N ⊗ N` whose exact cost is computed.
pub const SQUARE_BUDGET: usize = 16;
/// Slack on both sides of the LN_max sandwich.
pub const BOUND_SLACK: f64 = 1e-5;

/// Feasibility test at one Schmidt rank.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct CostProbe {
    pub m: usize,
    /// Largest uniform slack of the cone constraints (capped at 1).
    pub margin: f64,
    pub feasible: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExactCost {
    /// Smallest feasible Schmidt rank; `None` when every `m ≤ m_max` fails.
    pub m: Option<usize>,
    /// Channel `R` certifying feasibility at `m`.
    pub certificate: Option<BipartiteChannel>,
    /// Smallest eigenvalue of the two sandwich constraints at the certificate.
    pub certificate_slack: Option<f64>,
    /// Probe at `m − 1`, absent when `m = 1`.
    pub below: Option<CostProbe>,
    /// Margin of the relaxed program (`R ⪰ 0`, marginals `⪯ I`) at `m`.
    pub relaxed_margin: Option<f64>,
    /// Every probe in the order evaluated.
    pub probes: Vec<CostProbe>,
    pub ln_max: f64,
    /// First rank tried by the search, `⌈2^{LN_max} − 1⌉`.
    pub lower_seed: usize,
    pub m_max: usize,
    pub seconds: f64,
}

impl ExactCost {
    pub fn log2_m(&self) -> Option<f64> {
        self.m.map(|m| (m as f64).log2())
    }

    pub fn exceeds_budget(&self) -> bool {
        self.m.is_none()
    }
}

struct Search<'a> {
    n: &'a BipartiteChannel,
    seen: BTreeMap<usize, (CostProbe, Solution, CostProgram)>,
    order: Vec<CostProbe>,
}

impl Search<'_> {
    fn probe(&mut self, m: usize) -> Result<bool> {
        if let Some((p, _, _)) = self.seen.get(&m) {
            return Ok(p.feasible);
        }
        let cp = exact_cost_program(self.n.choi(), m, false)?;
        let f = feasibility(&cp.program)?;
        let probe = CostProbe { m, margin: f.margin, feasible: f.feasible };
        self.order.push(probe);
        self.seen.insert(m, (probe, f.solution, cp));
        Ok(probe.feasible)
    }
}

/// Smallest `m ≤ m_max` with `−(m−1)R^Γ ⪯ N^Γ ⪯ (m+1)R^Γ` for a channel `R`,
/// found by bisection from the LN_max bracket. Feasible means the cone
/// margin is at least `−FEAS_TOL`.
pub fn exact_cost_single_shot(n: &BipartiteChannel, m_max: usize) -> Result<ExactCost> {
    if m_max == 0 {
        return Err(MeasureError::Invalid("m_max must be positive".into()));
    }
    let start = Instant::now();
    let lm = ln_max(n)?.value;
    let base = lm.exp2();
    let lower_seed = ((base - 1.0 - 1e-6).ceil().max(1.0) as usize).min(m_max);
    let guess = ((base + 2.0 + 1e-6).floor() as usize).clamp(lower_seed, m_max);
    let mut s = Search { n, seen: BTreeMap::new(), order: Vec::new() };

    let (mut lo, mut hi) = (lower_seed, guess);
    if !s.probe(hi)? {
        lo = hi + 1;
        hi = m_max;
        if lo > hi || !s.probe(hi)? {
            return Ok(ExactCost {
                m: None,
                certificate: None,
                certificate_slack: None,
                below: None,
                relaxed_margin: None,
                probes: s.order,
                ln_max: lm,
                lower_seed,
                m_max,
                seconds: start.elapsed().as_secs_f64(),
            });
        }
    }
    // invariant: hi feasible, every rank below lo untested or infeasible
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if s.probe(mid)? {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    let mut m = hi;
    while m > 1 && s.probe(m - 1)? {
        m -= 1;
    }
    let below = (m > 1).then(|| s.seen[&(m - 1)].0);
    let (_, sol, cp) = &s.seen[&m];
    let r = normalize_channel(sol.value(cp.r))?;
    let slack = sandwich_slack(n.choi(), r.choi(), m)?;
    let relaxed = feasibility(&exact_cost_program(n.choi(), m, true)?.program)?;
    Ok(ExactCost {
        m: Some(m),
        certificate: Some(r),
        certificate_slack: Some(slack),
        below,
        relaxed_margin: Some(relaxed.margin),
        probes: s.order,
        ln_max: lm,
        lower_seed,
        m_max,
        seconds: start.elapsed().as_secs_f64(),
    })
}

/// Smallest eigenvalue of `N^Γ + (m−1)R^Γ` and `(m+1)R^Γ − N^Γ`.
pub fn sandwich_slack(n: &LabeledMatrix, r: &LabeledMatrix, m: usize) -> Result<f64> {
    let ng = n.partial_transpose(&[B0, B1])?;
    let rg = r.permute(&ng.spec().labels())?.partial_transpose(&[B0, B1])?;
    let lower = ng.add(&rg.scale((m - 1) as f64))?.min_eigenvalue()?;
    let upper = rg.scale((m + 1) as f64).sub(&ng)?.min_eigenvalue()?;
    Ok(lower.min(upper))
}

/// `(K ⊗ I) R (K ⊗ I)` with `K = R_{A0B0}^{-1/2}`: exactly trace preserving, still PSD.
fn normalize_channel(r: &LabeledMatrix) -> Result<BipartiteChannel> {
    let r = LabeledMatrix::new(r.spec().clone(), r.matrix().hermitian_part())?;
    let marg = r.trace_out(&[A1, B1])?;
    let (ev, u) = marg.hermitian_eig()?;
    if ev.iter().any(|&x| x <= 0.0) {
        return Err(MeasureError::Invalid("certificate marginal is singular".into()));
    }
    let inv_sqrt: Vec<f64> = ev.iter().map(|x| 1.0 / x.sqrt()).collect();
    let k = u.matmul(&CMatrix::diag(&inv_sqrt)).matmul(&u.adjoint());
    let k = LabeledMatrix::new(marg.spec().clone(), k)?.expand_to(r.spec())?;
    let out = k.matmul(&r)?.matmul(&k)?;
    let out = LabeledMatrix::new(out.spec().clone(), out.matrix().hermitian_part())?;
    BipartiteChannel::from_choi(out.clone()).or_else(|_| Ok(BipartiteChannel::from_choi_unchecked(out)?))
}

#[derive(Clone, Debug, PartialEq)]
pub struct CostBounds {
    pub ln_max: f64,
    /// `log₂(2^{LN_max} − 1)`, clipped at 0.
    pub lower: f64,
    /// `log₂(2^{LN_max} + 2)`.
    pub upper: f64,
    pub cost: ExactCost,
    /// `(k, E⁽¹⁾(N^{⊗k}) / k)` for the powers within budget.
    pub sequence: Vec<(usize, f64)>,
    /// `LN_max(N ⊗ N)` when the square is within budget.
    pub ln_max_square: Option<f64>,
}

impl CostBounds {
    pub fn holds(&self) -> bool {
        match self.cost.log2_m() {
            Some(e) => self.lower - BOUND_SLACK <= e && e <= self.upper + BOUND_SLACK,
            None => false,
        }
    }
}

pub fn cost_bounds_check(n: &BipartiteChannel) -> Result<CostBounds> {
    cost_bounds_check_with(n, SQUARE_BUDGET)
}

/// Checks `log₂(2^{LN}−1) ≤ E⁽¹⁾ ≤ log₂(2^{LN}+2)`; computes the tensor
/// square when its total dimension is at most `square_budget`.
pub fn cost_bounds_check_with(n: &BipartiteChannel, square_budget: usize) -> Result<CostBounds> {
    let cost = exact_cost_single_shot(n, M_MAX)?;
    let lm = cost.ln_max;
    let base = lm.exp2();
    let lower = if base - 1.0 > 1.0 { (base - 1.0).log2() } else { 0.0 };
    let upper = (base + 2.0).log2();
    let mut sequence = Vec::new();
    if let Some(e) = cost.log2_m() {
        sequence.push((1, e));
    }
    let mut ln_max_square = None;
    let d = n.dims().total();
    if d * d <= square_budget {
        let nn = n.tensor(n)?;
        let c2 = exact_cost_single_shot(&nn, M_MAX)?;
        if let Some(e) = c2.log2_m() {
            sequence.push((2, e / 2.0));
        }
        ln_max_square = Some(c2.ln_max);
    }
    let b = CostBounds { ln_max: lm, lower, upper, cost, sequence, ln_max_square };
    if !b.holds() {
        let detail = match (&b.cost.m, b.cost.certificate_slack) {
            (Some(m), Some(slack)) => format!("m* = {m} (certificate slack {slack:.3e})"),
            _ => format!("no feasible rank up to {}", b.cost.m_max),
        };
        return Err(MeasureError::BoundViolation(format!(
            "E = {:?} outside [{:.12}, {:.12}] for LN_max = {lm:.12}; {detail}; probes {:?}",
            b.cost.log2_m(),
            b.lower,
            b.upper,
            b.cost.probes
        )));
    }
    Ok(b)
}
