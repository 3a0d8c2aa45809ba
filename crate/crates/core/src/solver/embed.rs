//! Compilation of a [`ConicProgram`] to real standard form.
//!
//! Rows are ordered as zero-cone rows, then nonnegative rows, then one
//! group per PSD block. A Hermitian `d × d` cone constraint becomes a real
//! symmetric `2d × 2d` block through `H ↦ [[Re H, −Im H], [Im H, Re H]]`,
//! stored in svec form: entry `(r, c)` with `r ≤ c` sits at `c(c+1)/2 + r`,
//! off-diagonal entries scaled by `√2`.

use std::f64::consts::{FRAC_1_SQRT_2, SQRT_2};

use faer::Mat;

use crate::tensor::{CMatrix, LabeledMatrix, C64};

use super::ipm::IpmResult;
use super::{BlockKind, ConicProgram, ConstraintKind, HermExpr, Result, Sense, Solution, SolverError, Status};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Cone {
    Zero(usize),
    Nonneg(usize),
    /// Real symmetric PSD block of the given order.
    Psd(usize),
}

impl Cone {
    pub fn rows(&self) -> usize {
        match *self {
            Cone::Zero(m) | Cone::Nonneg(m) => m,
            Cone::Psd(k) => k * (k + 1) / 2,
        }
    }
}

/// Sparse row `Σ a_j x_j` with right-hand side `b`.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct Row {
    pub entries: Vec<(usize, f64)>,
    pub b: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum DualSlot {
    Lp(usize),
    Psd(usize, usize),
}

/// `min c'x + c0  s.t.  Ax + s = b,  s ∈ K`, in row groups.
#[derive(Clone, Debug, PartialEq)]
pub struct RealProgram {
    pub n: usize,
    pub c: Vec<f64>,
    pub c0: f64,
    /// `+1` when the source program minimizes, `-1` when it maximizes.
    pub sign: f64,
    pub zero: Vec<Row>,
    pub nonneg: Vec<Row>,
    /// `(order, svec rows)` per PSD block.
    pub psd: Vec<(usize, Vec<Row>)>,
    duals: Vec<Option<DualSlot>>,
    margin: bool,
}

pub(crate) fn svec_index(r: usize, c: usize) -> usize {
    let (r, c) = if r <= c { (r, c) } else { (c, r) };
    c * (c + 1) / 2 + r
}

/// svec entries of the embedded image of Hermitian coordinate `k` (order `d`).
fn coord_svec(d: usize, k: usize) -> [(usize, f64); 2] {
    let (a, b) = (k / d, k % d);
    if a == b {
        [(svec_index(a, a), 1.0), (svec_index(a + d, a + d), 1.0)]
    } else if a < b {
        [(svec_index(a, b), SQRT_2), (svec_index(a + d, b + d), SQRT_2)]
    } else {
        // Im H_pq with p = b < q = a.
        let (p, q) = (b, a);
        [(svec_index(q, d + p), SQRT_2), (svec_index(p, d + q), -SQRT_2)]
    }
}

/// Rows indexed by output coordinate: `rows[k] = Σ_j L_kj x_j`.
fn coord_rows(e: &HermExpr) -> Vec<Vec<(usize, f64)>> {
    let d = e.dim();
    let mut rows = vec![Vec::new(); d * d];
    for (j, col) in e.columns() {
        for &(k, v) in col {
            rows[k as usize].push((*j, v));
        }
    }
    rows
}

/// PSD rows `s = svec(embed(e(x)))` for `e` of order `d > 1`.
fn psd_rows(e: &HermExpr) -> Vec<Row> {
    let d = e.dim();
    let k2 = 2 * d;
    let mut rows = vec![Row::default(); k2 * (k2 + 1) / 2];
    let cst = e.constant_part();
    for (k, coeffs) in coord_rows(e).into_iter().enumerate() {
        for (idx, w) in coord_svec(d, k) {
            rows[idx].b += w * cst[k];
            rows[idx].entries.extend(coeffs.iter().map(|&(j, v)| (j, -w * v)));
        }
    }
    for r in &mut rows {
        r.entries.sort_unstable_by_key(|e| e.0);
        merge_duplicates(&mut r.entries);
    }
    rows
}

fn merge_duplicates(v: &mut Vec<(usize, f64)>) {
    let mut out: Vec<(usize, f64)> = Vec::with_capacity(v.len());
    for &(j, a) in v.iter() {
        match out.last_mut() {
            Some(l) if l.0 == j => l.1 += a,
            _ => out.push((j, a)),
        }
    }
    out.retain(|e| e.1 != 0.0);
    *v = out;
}

/// Compiles `p` to real standard form.
pub fn embed_hermitian(p: &ConicProgram) -> Result<RealProgram> {
    let sign = match p.sense() {
        Sense::Minimize => 1.0,
        Sense::Maximize => -1.0,
    };
    let obj = p.objective();
    if !obj.is_scalar() {
        return Err(SolverError::Shape("objective must be scalar".into()));
    }
    let mut c = vec![0.0; p.num_vars()];
    for (j, col) in obj.columns() {
        for &(_, v) in col {
            c[*j] += sign * v;
        }
    }
    let mut rp = RealProgram {
        n: p.num_vars(),
        c,
        c0: sign * obj.constant_part()[0],
        sign,
        zero: Vec::new(),
        nonneg: Vec::new(),
        psd: Vec::new(),
        duals: Vec::new(),
        margin: false,
    };

    for b in p.blocks() {
        let d = b.spec.total_dim();
        match b.kind {
            BlockKind::FreeHermitian => {}
            BlockKind::NonnegScalar => rp.nonneg.push(Row { entries: vec![(b.offset, -1.0)], b: 0.0 }),
            BlockKind::HermitianPsd if d == 1 => rp.nonneg.push(Row { entries: vec![(b.offset, -1.0)], b: 0.0 }),
            BlockKind::HermitianPsd => {
                let e = HermExpr::variable(&b.spec, b.offset);
                rp.psd.push((2 * d, psd_rows(&e)));
            }
        }
    }

    for con in p.constraints() {
        let e = &con.expr;
        let d = e.dim();
        let slot = match con.kind {
            ConstraintKind::Equal => {
                let cst = e.constant_part();
                for (k, mut entries) in coord_rows(e).into_iter().enumerate() {
                    merge_duplicates(&mut entries);
                    if entries.is_empty() && cst[k] == 0.0 {
                        continue;
                    }
                    rp.zero.push(Row { entries, b: -cst[k] });
                }
                None
            }
            ConstraintKind::Nonneg | ConstraintKind::Psd if d == 1 => {
                let mut entries: Vec<(usize, f64)> = coord_rows(e).pop().unwrap_or_default().into_iter().map(|(j, v)| (j, -v)).collect();
                merge_duplicates(&mut entries);
                rp.nonneg.push(Row { entries, b: e.constant_part()[0] });
                (con.kind == ConstraintKind::Psd).then(|| DualSlot::Lp(rp.nonneg.len() - 1))
            }
            ConstraintKind::Nonneg => unreachable!("nonnegativity constraints are scalar"),
            ConstraintKind::Psd => {
                rp.psd.push((2 * d, psd_rows(e)));
                Some(DualSlot::Psd(rp.psd.len() - 1, d))
            }
        };
        rp.duals.push(slot);
    }
    Ok(rp)
}

impl RealProgram {
    pub fn num_rows(&self) -> usize {
        self.zero.len() + self.nonneg.len() + self.psd.iter().map(|b| b.1.len()).sum::<usize>()
    }

    /// Cones in row order (empty groups omitted).
    pub fn cones(&self) -> Vec<Cone> {
        let mut v = Vec::new();
        if !self.zero.is_empty() {
            v.push(Cone::Zero(self.zero.len()));
        }
        if !self.nonneg.is_empty() {
            v.push(Cone::Nonneg(self.nonneg.len()));
        }
        v.extend(self.psd.iter().map(|b| Cone::Psd(b.0)));
        v
    }

    /// All rows in row order.
    pub fn rows(&self) -> impl Iterator<Item = &Row> {
        self.zero.iter().chain(self.nonneg.iter()).chain(self.psd.iter().flat_map(|b| b.1.iter()))
    }

    pub fn is_margin(&self) -> bool {
        self.margin
    }

    /// Margin program: drops the objective, adds `t` as the last variable,
    /// shifts every cone row by `t·e` and maximizes `t ≤ 1`.
    pub fn with_margin(mut self) -> RealProgram {
        let t = self.n;
        self.n += 1;
        self.c = vec![0.0; self.n];
        self.c[t] = -1.0;
        self.c0 = 0.0;
        self.sign = -1.0;
        for r in &mut self.nonneg {
            r.entries.push((t, 1.0));
        }
        for (k, rows) in &mut self.psd {
            for i in 0..*k {
                rows[svec_index(i, i)].entries.push((t, 1.0));
            }
        }
        self.nonneg.push(Row { entries: vec![(t, 1.0)], b: 1.0 });
        self.margin = true;
        self
    }

    /// Maps a real solution back to the Hermitian program.
    pub fn lift(&self, p: &ConicProgram, r: &IpmResult) -> Solution {
        let mut x = r.x.clone();
        x.resize(self.n, 0.0);
        let (primal_value, dual_value) = match r.status {
            Status::Infeasible => (f64::NAN, self.sign * (r.dobj + self.c0)),
            Status::Unbounded => (self.sign * (r.pobj + self.c0), f64::NAN),
            _ => (self.sign * (r.pobj + self.c0), self.sign * (r.dobj + self.c0)),
        };
        let lp0 = self.zero.len();
        let mut psd0 = Vec::with_capacity(self.psd.len());
        let mut off = lp0 + self.nonneg.len();
        for (_, rows) in &self.psd {
            psd0.push(off);
            off += rows.len();
        }
        let constraint_duals = p
            .constraints()
            .iter()
            .zip(&self.duals)
            .map(|(con, slot)| {
                let spec = con.expr.spec().clone();
                let m = match (*slot)? {
                    DualSlot::Lp(i) => CMatrix::from_fn(1, 1, |_, _| C64::new(r.z.get(lp0 + i).copied().unwrap_or(0.0), 0.0)),
                    DualSlot::Psd(b, _) => {
                        let k = self.psd[b].0;
                        let z = r.z.get(psd0[b]..psd0[b] + k * (k + 1) / 2)?;
                        extract_hermitian_matrix(&smat(z, k)).scale_real(2.0)
                    }
                };
                LabeledMatrix::new(spec, m).ok()
            })
            .collect();
        Solution {
            status: r.status,
            primal_value,
            dual_value,
            gap: r.gap,
            residual: r.pres,
            dual_residual: r.dres,
            iterations: r.iterations,
            blocks: p.block_values(&x[..p.num_vars()]),
            constraint_duals,
            message: r.message.clone(),
        }
    }
}

/// Symmetric matrix from svec coordinates.
pub(crate) fn smat(v: &[f64], k: usize) -> Mat<f64> {
    Mat::from_fn(k, k, |i, j| {
        let x = v[svec_index(i, j)];
        if i == j {
            x
        } else {
            x * FRAC_1_SQRT_2
        }
    })
}

/// svec coordinates of the symmetric part of `m`.
pub(crate) fn svec_into(m: &Mat<f64>, out: &mut [f64]) {
    let k = m.nrows();
    for c in 0..k {
        for r in 0..=c {
            out[svec_index(r, c)] = if r == c { m[(r, r)] } else { (m[(r, c)] + m[(c, r)]) * FRAC_1_SQRT_2 };
        }
    }
}

/// `[[Re H, −Im H], [Im H, Re H]]`.
pub fn embed_hermitian_matrix(h: &CMatrix) -> Mat<f64> {
    let d = h.rows();
    Mat::from_fn(2 * d, 2 * d, |i, j| {
        let z = h[(i % d, j % d)];
        match (i < d, j < d) {
            (true, true) | (false, false) => z.re,
            (true, false) => -z.im,
            (false, true) => z.im,
        }
    })
}

/// Hermitian matrix whose embedding is closest to `m` (exact inverse on images).
pub fn extract_hermitian_matrix(m: &Mat<f64>) -> CMatrix {
    let d = m.nrows() / 2;
    CMatrix::from_fn(d, d, |i, j| {
        let re = m[(i, j)] + m[(i + d, j + d)];
        let im = m[(i + d, j)] - m[(i, j + d)];
        C64::new(0.5 * re, 0.5 * im)
    })
}
