//! Homogeneous self-dual interior-point method with Nesterov–Todd scaling
//! and Mehrotra predictor-corrector steps, for the standard form built by
//! [`super::embed`].
//!
//! The embedding is `Ax + s = bτ`, `A'z + cτ = 0`, `c'x + b'z + κ = 0`.
//! Each Newton system is reduced to a dense normal matrix over `x`, with
//! the zero-cone rows handled by an augmented Lagrangian term and a small
//! Schur complement.

use faer::linalg::solvers::{Llt, Solve};
use faer::{Mat, Side};

use super::embed::{smat, svec_index, svec_into, RealProgram};
use super::{SolveOptions, Status, FEAS_TOL, GAP_TOL};

/// Raw solver output, in the real standard form.
#[derive(Clone, Debug, PartialEq)]
pub struct IpmResult {
    pub status: Status,
    /// Primal point (`x/τ` unless a certificate is returned).
    pub x: Vec<f64>,
    pub s: Vec<f64>,
    pub z: Vec<f64>,
    /// `c'x` at the returned point (constant term excluded).
    pub pobj: f64,
    /// `−b'z` at the returned point.
    pub dobj: f64,
    pub gap: f64,
    pub pres: f64,
    pub dres: f64,
    pub iterations: usize,
    pub message: String,
}

type Entries = Vec<(usize, usize, f64)>;

struct Data {
    n: usize,
    m0: usize,
    mlp: usize,
    /// `(row offset, order)` per PSD block.
    blocks: Vec<(usize, usize)>,
    m: usize,
    rows: Vec<Vec<(usize, f64)>>,
    cols: Vec<Vec<(usize, f64)>>,
    b: Vec<f64>,
    c: Vec<f64>,
    /// Per PSD block, per variable: matrix-coefficient entries `(r, c, m)`
    /// of `A_j = Σ m (E_rc + E_cr)` (`E_rr` on the diagonal).
    groups: Vec<Vec<(usize, Entries)>>,
    a0ta0: Mat<f64>,
    kept: Vec<usize>,
    orig_m0: usize,
    orig_m: usize,
    nu: f64,
}

fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |a: f64, x| a.max(x.abs()))
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Indices of a maximal independent subset of the zero rows, or the index
/// of a row whose right-hand side contradicts the others.
fn independent_rows(rows: &[(Vec<(usize, f64)>, f64)], n: usize) -> std::result::Result<Vec<usize>, usize> {
    let mut basis: Vec<(Vec<f64>, f64)> = Vec::new();
    let mut kept = Vec::new();
    let mut v = vec![0.0; n];
    for (i, (row, bi)) in rows.iter().enumerate() {
        v.iter_mut().for_each(|x| *x = 0.0);
        for &(j, a) in row {
            v[j] += a;
        }
        let norm0 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        let mut beta = *bi;
        for _ in 0..2 {
            for (q, qb) in &basis {
                let p = dot(q, &v);
                if p != 0.0 {
                    v.iter_mut().zip(q).for_each(|(x, y)| *x -= p * y);
                    beta -= p * qb;
                }
            }
        }
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm <= 1e-10 * norm0.max(1e-300) || norm0 == 0.0 {
            if beta.abs() > 1e-8 * (1.0 + bi.abs()) {
                return Err(i);
            }
            continue;
        }
        basis.push((v.iter().map(|x| x / norm).collect(), beta / norm));
        kept.push(i);
    }
    Ok(kept)
}

impl Data {
    fn new(rp: &RealProgram) -> std::result::Result<Self, usize> {
        let n = rp.n;
        let zr: Vec<(Vec<(usize, f64)>, f64)> = rp.zero.iter().map(|r| (r.entries.clone(), r.b)).collect();
        let kept = independent_rows(&zr, n)?;
        let mut rows = Vec::new();
        let mut b = Vec::new();
        for &i in &kept {
            rows.push(rp.zero[i].entries.clone());
            b.push(rp.zero[i].b);
        }
        let m0 = rows.len();
        for r in &rp.nonneg {
            rows.push(r.entries.clone());
            b.push(r.b);
        }
        let mlp = rp.nonneg.len();
        let mut blocks = Vec::new();
        let mut groups = Vec::new();
        for (k, brows) in &rp.psd {
            let off = rows.len();
            blocks.push((off, *k));
            let mut per_col: Vec<Vec<(usize, usize, f64)>> = vec![Vec::new(); n];
            for c in 0..*k {
                for r in 0..=c {
                    let row = &brows[svec_index(r, c)];
                    let f = if r == c { 1.0 } else { std::f64::consts::FRAC_1_SQRT_2 };
                    for &(j, a) in &row.entries {
                        per_col[j].push((r, c, a * f));
                    }
                }
            }
            groups.push(per_col.into_iter().enumerate().filter(|g| !g.1.is_empty()).collect());
            for r in brows {
                rows.push(r.entries.clone());
                b.push(r.b);
            }
        }
        let m = rows.len();
        let mut cols = vec![Vec::new(); n];
        for (i, r) in rows.iter().enumerate() {
            for &(j, a) in r {
                cols[j].push((i, a));
            }
        }
        let mut a0ta0 = Mat::<f64>::zeros(n, n);
        for r in &rows[..m0] {
            for &(i, a) in r {
                for &(j, c) in r {
                    a0ta0[(i, j)] += a * c;
                }
            }
        }
        let nu = (mlp + blocks.iter().map(|b| b.1).sum::<usize>()) as f64;
        Ok(Self {
            n,
            m0,
            mlp,
            blocks,
            m,
            rows,
            cols,
            b,
            c: rp.c.clone(),
            groups,
            a0ta0,
            kept,
            orig_m0: rp.zero.len(),
            orig_m: rp.num_rows(),
            nu,
        })
    }

    fn ax(&self, x: &[f64]) -> Vec<f64> {
        self.rows.iter().map(|r| r.iter().map(|&(j, a)| a * x[j]).sum()).collect()
    }

    fn atz(&self, z: &[f64]) -> Vec<f64> {
        self.cols.iter().map(|c| c.iter().map(|&(i, a)| a * z[i]).sum()).collect()
    }

    fn lp(&self) -> std::ops::Range<usize> {
        self.m0..self.m0 + self.mlp
    }

    /// Maps a reduced row vector back to the original row order.
    fn expand(&self, v: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.orig_m];
        for (i, &k) in self.kept.iter().enumerate() {
            out[k] = v[i];
        }
        out[self.orig_m0..].copy_from_slice(&v[self.m0..]);
        out
    }
}

struct Block {
    r: Mat<f64>,
    rinv: Mat<f64>,
    lam: Vec<f64>,
    /// `R^{-T} R^{-1}`.
    g: Mat<f64>,
    /// `R R'`.
    h: Mat<f64>,
}

struct Scaling {
    w: Vec<f64>,
    lam: Vec<f64>,
    blocks: Vec<Block>,
}

/// Any square factor `L` with `X = L L'`.
fn factor(x: &Mat<f64>) -> Option<Mat<f64>> {
    if let Ok(l) = x.llt(Side::Lower) {
        return Some(l.L().to_owned());
    }
    let e = x.self_adjoint_eigen(Side::Lower).ok()?;
    let k = x.nrows();
    let s = e.S().column_vector();
    let u = e.U();
    let floor = 1e-300;
    Some(Mat::from_fn(k, k, |i, j| u[(i, j)] * s[j].max(floor).sqrt()))
}

fn diag_scale(m: &Mat<f64>, left: Option<&[f64]>, right: Option<&[f64]>) -> Mat<f64> {
    Mat::from_fn(m.nrows(), m.ncols(), |i, j| {
        let mut v = m[(i, j)];
        if let Some(l) = left {
            v *= l[i];
        }
        if let Some(r) = right {
            v *= r[j];
        }
        v
    })
}

impl Scaling {
    fn identity(d: &Data) -> Self {
        Self {
            w: vec![1.0; d.mlp],
            lam: vec![1.0; d.mlp],
            blocks: d
                .blocks
                .iter()
                .map(|&(_, k)| Block {
                    r: Mat::identity(k, k),
                    rinv: Mat::identity(k, k),
                    lam: vec![1.0; k],
                    g: Mat::identity(k, k),
                    h: Mat::identity(k, k),
                })
                .collect(),
        }
    }

    fn nt(d: &Data, s: &[f64], z: &[f64]) -> Option<Self> {
        let lp = d.lp();
        let mut w = Vec::with_capacity(d.mlp);
        let mut lam = Vec::with_capacity(d.mlp);
        for i in lp {
            if !(s[i] > 0.0 && z[i] > 0.0) {
                return None;
            }
            w.push((s[i] / z[i]).sqrt());
            lam.push((s[i] * z[i]).sqrt());
        }
        let mut blocks = Vec::with_capacity(d.blocks.len());
        for &(off, k) in &d.blocks {
            let len = k * (k + 1) / 2;
            let sm = smat(&s[off..off + len], k);
            let zm = smat(&z[off..off + len], k);
            let ls = factor(&sm)?;
            let lz = factor(&zm)?;
            let prod = lz.transpose() * &ls;
            let svd = prod.svd().ok()?;
            let sv = svd.S().column_vector();
            let lam: Vec<f64> = (0..k).map(|i| sv[i]).collect();
            if lam.iter().any(|&l| !(l > 0.0) || !l.is_finite()) {
                return None;
            }
            let isq: Vec<f64> = lam.iter().map(|l| 1.0 / l.sqrt()).collect();
            let r = diag_scale(&(&ls * svd.V()), None, Some(&isq));
            let rinv = diag_scale(&(svd.U().transpose() * lz.transpose()), Some(&isq), None);
            let g = rinv.transpose() * &rinv;
            let h = &r * r.transpose();
            blocks.push(Block { r, rinv, lam, g, h });
        }
        Some(Self { w, lam, blocks })
    }

    /// Applies a per-cone linear map to the cone part of `v`.
    fn map(&self, d: &Data, v: &[f64], lp: impl Fn(usize, f64) -> f64, psd: impl Fn(&Block, Mat<f64>) -> Mat<f64>) -> Vec<f64> {
        let mut out = vec![0.0; d.m];
        for (i, idx) in d.lp().enumerate() {
            out[idx] = lp(i, v[idx]);
        }
        for (blk, &(off, k)) in self.blocks.iter().zip(&d.blocks) {
            let len = k * (k + 1) / 2;
            let res = psd(blk, smat(&v[off..off + len], k));
            svec_into(&res, &mut out[off..off + len]);
        }
        out
    }

    /// `W v`.
    fn w_apply(&self, d: &Data, v: &[f64]) -> Vec<f64> {
        self.map(d, v, |i, x| self.w[i] * x, |b, m| b.r.transpose() * &m * &b.r)
    }

    /// `W^{-T} v`.
    fn wit_apply(&self, d: &Data, v: &[f64]) -> Vec<f64> {
        self.map(d, v, |i, x| x / self.w[i], |b, m| &b.rinv * &m * b.rinv.transpose())
    }

    /// `W' v`.
    fn wt_apply(&self, d: &Data, v: &[f64]) -> Vec<f64> {
        self.map(d, v, |i, x| self.w[i] * x, |b, m| &b.r * &m * b.r.transpose())
    }

    fn h_apply(&self, d: &Data, v: &[f64]) -> Vec<f64> {
        self.map(d, v, |i, x| self.w[i] * self.w[i] * x, |b, m| &b.h * &m * &b.h)
    }

    fn hinv_apply(&self, d: &Data, v: &[f64]) -> Vec<f64> {
        self.map(d, v, |i, x| x / (self.w[i] * self.w[i]), |b, m| &b.g * &m * &b.g)
    }

    fn lam_sq(&self, d: &Data) -> Vec<f64> {
        let mut out = vec![0.0; d.m];
        for (i, idx) in d.lp().enumerate() {
            out[idx] = self.lam[i] * self.lam[i];
        }
        for (blk, &(off, k)) in self.blocks.iter().zip(&d.blocks) {
            for i in 0..k {
                out[off + svec_index(i, i)] = blk.lam[i] * blk.lam[i];
            }
        }
        out
    }

    /// `λ \ v`: solves `λ ∘ u = v`.
    fn lam_div(&self, d: &Data, v: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; d.m];
        for (i, idx) in d.lp().enumerate() {
            out[idx] = v[idx] / self.lam[i];
        }
        for (blk, &(off, k)) in self.blocks.iter().zip(&d.blocks) {
            for c in 0..k {
                for r in 0..=c {
                    let j = off + svec_index(r, c);
                    out[j] = 2.0 * v[j] / (blk.lam[r] + blk.lam[c]);
                }
            }
        }
        out
    }

    /// Largest `α` keeping `λ + α v` in the cone (`f64::INFINITY` if unbounded).
    fn max_step(&self, d: &Data, v: &[f64]) -> f64 {
        let mut a = f64::INFINITY;
        for (i, idx) in d.lp().enumerate() {
            if v[idx] < 0.0 {
                a = a.min(-self.lam[i] / v[idx]);
            }
        }
        for (blk, &(off, k)) in self.blocks.iter().zip(&d.blocks) {
            let len = k * (k + 1) / 2;
            let isq: Vec<f64> = blk.lam.iter().map(|l| 1.0 / l.sqrt()).collect();
            let m = diag_scale(&smat(&v[off..off + len], k), Some(&isq), Some(&isq));
            let ev = m.self_adjoint_eigenvalues(Side::Lower).unwrap_or_else(|_| vec![f64::NEG_INFINITY]);
            let lo = ev.iter().copied().fold(f64::INFINITY, f64::min);
            if lo < 0.0 {
                a = a.min(-1.0 / lo);
            }
        }
        a
    }
}

/// Jordan product `a ∘ b` on the cone part.
fn circ(d: &Data, a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; d.m];
    for idx in d.lp() {
        out[idx] = a[idx] * b[idx];
    }
    for &(off, k) in &d.blocks {
        let len = k * (k + 1) / 2;
        let am = smat(&a[off..off + len], k);
        let bm = smat(&b[off..off + len], k);
        let p = &am * &bm;
        svec_into(&p, &mut out[off..off + len]);
    }
    out
}

/// Identity element of the cone part.
fn unit(d: &Data) -> Vec<f64> {
    let mut out = vec![0.0; d.m];
    for idx in d.lp() {
        out[idx] = 1.0;
    }
    for &(off, k) in &d.blocks {
        for i in 0..k {
            out[off + svec_index(i, i)] = 1.0;
        }
    }
    out
}

/// Smallest shift `t` with `v + t e` in the closed cone.
fn cone_violation(d: &Data, v: &[f64]) -> f64 {
    let mut t = f64::NEG_INFINITY;
    for idx in d.lp() {
        t = t.max(-v[idx]);
    }
    for &(off, k) in &d.blocks {
        let len = k * (k + 1) / 2;
        let ev = smat(&v[off..off + len], k).self_adjoint_eigenvalues(Side::Lower).unwrap_or_else(|_| vec![f64::NEG_INFINITY]);
        t = t.max(-ev.iter().copied().fold(f64::INFINITY, f64::min));
    }
    t
}

/// Factored reduced KKT system `[0 A'; A −H]` with `H = 0` on zero rows.
struct Kkt {
    llt: Llt<f64>,
    y: Mat<f64>,
    s0: Option<Llt<f64>>,
    gamma: f64,
}

fn cholesky_with_shift(m: &Mat<f64>) -> Option<Llt<f64>> {
    let n = m.nrows();
    let scale = (0..n).map(|i| m[(i, i)].abs()).fold(0.0, f64::max).max(1e-300);
    let mut delta = 1e-13 * scale;
    for _ in 0..8 {
        let shifted = Mat::from_fn(n, n, |i, j| m[(i, j)] + if i == j { delta } else { 0.0 });
        if let Ok(l) = shifted.llt(Side::Lower) {
            return Some(l);
        }
        delta *= 100.0;
    }
    None
}

fn normal_matrix(d: &Data, sc: &Scaling) -> Mat<f64> {
    let n = d.n;
    let mut m = Mat::<f64>::zeros(n, n);
    for (i, idx) in d.lp().enumerate() {
        let hinv = 1.0 / (sc.w[i] * sc.w[i]);
        let row = &d.rows[idx];
        for &(a, va) in row {
            for &(b, vb) in row {
                m[(a, b)] += hinv * va * vb;
            }
        }
    }
    for (blk, groups) in sc.blocks.iter().zip(&d.groups) {
        let k = blk.g.nrows();
        let g: Vec<f64> = (0..k * k).map(|t| blk.g[(t / k, t % k)]).collect();
        let gg = |i: usize, j: usize| g[i * k + j];
        for (ia, (ca, ea)) in groups.iter().enumerate() {
            for (cb, eb) in &groups[ia..] {
                let mut val = 0.0;
                for &(p, q, m1) in ea {
                    let f1 = if p == q { 0.5 } else { 1.0 };
                    for &(r, s, m2) in eb {
                        let f2 = if r == s { 0.5 } else { 1.0 };
                        val += m1 * m2 * f1 * f2 * 2.0 * (gg(q, r) * gg(s, p) + gg(q, s) * gg(r, p));
                    }
                }
                m[(*ca, *cb)] += val;
                if ca != cb {
                    m[(*cb, *ca)] += val;
                }
            }
        }
    }
    m
}

impl Kkt {
    fn factor(d: &Data, sc: &Scaling) -> Option<Self> {
        let n = d.n;
        let mut m = normal_matrix(d, sc);
        let gamma = if d.m0 > 0 {
            let tr: f64 = (0..n).map(|i| m[(i, i)]).sum();
            (tr / n as f64).max(1.0)
        } else {
            0.0
        };
        if d.m0 > 0 {
            for j in 0..n {
                for i in 0..n {
                    m[(i, j)] += gamma * d.a0ta0[(i, j)];
                }
            }
        }
        let llt = cholesky_with_shift(&m)?;
        if d.m0 == 0 {
            return Some(Self { llt, y: Mat::zeros(n, 0), s0: None, gamma });
        }
        let mut a0t = Mat::<f64>::zeros(n, d.m0);
        for (i, r) in d.rows[..d.m0].iter().enumerate() {
            for &(j, a) in r {
                a0t[(j, i)] += a;
            }
        }
        let y = llt.solve(&a0t);
        let mut s0 = Mat::<f64>::zeros(d.m0, d.m0);
        for (i, r) in d.rows[..d.m0].iter().enumerate() {
            for &(k, a) in r {
                for j in 0..d.m0 {
                    s0[(i, j)] += a * y[(k, j)];
                }
            }
        }
        let s0 = Mat::from_fn(d.m0, d.m0, |i, j| 0.5 * (s0[(i, j)] + s0[(j, i)]));
        let s0 = cholesky_with_shift(&s0)?;
        Some(Self { llt, y, s0: Some(s0), gamma })
    }

    fn solve_once(&self, d: &Data, sc: &Scaling, r1: &[f64], r23: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let n = d.n;
        let m0 = d.m0;
        let t3 = sc.hinv_apply(d, r23);
        let a1t = d.atz(&t3);
        let mut f: Vec<f64> = (0..n).map(|j| r1[j] + a1t[j]).collect();
        if m0 > 0 {
            let mut r2 = vec![0.0; d.m];
            r2[..m0].copy_from_slice(&r23[..m0]);
            let a0t = d.atz(&r2);
            for j in 0..n {
                f[j] += self.gamma * a0t[j];
            }
        }
        let fm = Mat::from_fn(n, 1, |i, _| f[i]);
        let ym = self.llt.solve(&fm);
        let mut dx: Vec<f64> = (0..n).map(|i| ym[(i, 0)]).collect();
        let mut dz = vec![0.0; d.m];
        if let Some(s0) = &self.s0 {
            let ay: Vec<f64> = d.rows[..m0].iter().map(|r| r.iter().map(|&(j, a)| a * dx[j]).sum()).collect();
            let rhs = Mat::from_fn(m0, 1, |i, _| ay[i] - r23[i]);
            let dz0 = s0.solve(&rhs);
            for i in 0..m0 {
                dz[i] = dz0[(i, 0)];
            }
            let corr = &self.y * &dz0;
            for i in 0..n {
                dx[i] -= corr[(i, 0)];
            }
        }
        let adx = d.ax(&dx);
        let mut diff = vec![0.0; d.m];
        for i in m0..d.m {
            diff[i] = adx[i] - r23[i];
        }
        let dz1 = sc.hinv_apply(d, &diff);
        dz[m0..].copy_from_slice(&dz1[m0..]);
        (dx, dz)
    }

    /// Solves `A'dz = r1`, `A0 dx = r2`, `A1 dx − H dz1 = r3` (`r23 = [r2; r3]`).
    fn solve(&self, d: &Data, sc: &Scaling, r1: &[f64], r23: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let (mut dx, mut dz) = self.solve_once(d, sc, r1, r23);
        for _ in 0..3 {
            let atz = d.atz(&dz);
            let e1: Vec<f64> = r1.iter().zip(&atz).map(|(a, b)| a - b).collect();
            let adx = d.ax(&dx);
            let hdz = sc.h_apply(d, &dz);
            let e23: Vec<f64> = (0..d.m).map(|i| r23[i] - (adx[i] - if i < d.m0 { 0.0 } else { hdz[i] })).collect();
            let scale = 1.0 + inf_norm(r1).max(inf_norm(r23));
            if inf_norm(&e1).max(inf_norm(&e23)) <= 1e-15 * scale {
                break;
            }
            let (cx, cz) = self.solve_once(d, sc, &e1, &e23);
            dx.iter_mut().zip(&cx).for_each(|(a, b)| *a += b);
            dz.iter_mut().zip(&cz).for_each(|(a, b)| *a += b);
        }
        (dx, dz)
    }
}

struct Metrics {
    pobj: f64,
    dobj: f64,
    pres: f64,
    dres: f64,
    gap: f64,
}

impl Metrics {
    fn meets(&self, gap_tol: f64, feas_tol: f64) -> bool {
        self.pres <= feas_tol && self.dres <= feas_tol && self.gap <= gap_tol
    }

    fn score(&self, opts: &SolveOptions) -> f64 {
        (self.pres / opts.feas_tol).max(self.dres / opts.feas_tol).max(self.gap / opts.gap_tol)
    }
}

fn failed(rp: &RealProgram, status: Status, message: String) -> IpmResult {
    IpmResult {
        status,
        x: vec![0.0; rp.n],
        s: vec![0.0; rp.num_rows()],
        z: vec![0.0; rp.num_rows()],
        pobj: f64::NAN,
        dobj: f64::NAN,
        gap: f64::NAN,
        pres: f64::NAN,
        dres: f64::NAN,
        iterations: 0,
        message,
    }
}

/// Solves the real standard-form program.
pub fn solve_real(rp: &RealProgram, opts: &SolveOptions) -> IpmResult {
    let d = match Data::new(rp) {
        Ok(d) => d,
        Err(i) => return failed(rp, Status::Infeasible, format!("equality row {i} is inconsistent with the others")),
    };
    let (n, m, m0) = (d.n, d.m, d.m0);
    let bnorm = 1.0 + inf_norm(&d.b);
    let cnorm = 1.0 + inf_norm(&d.c);
    let e = unit(&d);

    // Initial point: least-squares primal and dual starts, shifted into the cone.
    let ident = Scaling::identity(&d);
    let Some(kkt0) = Kkt::factor(&d, &ident) else {
        return failed(rp, Status::MaxIter, "initial factorization failed".into());
    };
    let (mut x, zs) = kkt0.solve(&d, &ident, &vec![0.0; n], &d.b);
    let mut s: Vec<f64> = (0..m).map(|i| if i < m0 { 0.0 } else { -zs[i] }).collect();
    let negc: Vec<f64> = d.c.iter().map(|v| -v).collect();
    let (_, mut z) = kkt0.solve(&d, &ident, &negc, &vec![0.0; m]);
    for v in [&mut s, &mut z] {
        let t = cone_violation(&d, v);
        let nrm = v[m0..].iter().map(|a| a * a).sum::<f64>().sqrt();
        if t >= -1e-8 * nrm.max(1.0) {
            for i in m0..m {
                v[i] += (1.0 + t) * e[i];
            }
        }
    }
    let (mut tau, mut kappa) = (1.0, 1.0);

    let mut best: Option<(f64, Metrics, Vec<f64>, Vec<f64>, Vec<f64>)> = None;
    let mut message = String::from("iteration limit reached");
    let mut iters = 0;

    for it in 0..=opts.max_iter {
        iters = it;
        let atz = d.atz(&z);
        let ax = d.ax(&x);
        let rx: Vec<f64> = (0..n).map(|j| atz[j] + d.c[j] * tau).collect();
        let rz: Vec<f64> = (0..m).map(|i| ax[i] + s[i] - d.b[i] * tau).collect();
        let cx = dot(&d.c, &x);
        let bz = dot(&d.b, &z);
        let rt = cx + bz + kappa;

        let met = Metrics {
            pobj: cx / tau,
            dobj: -bz / tau,
            pres: inf_norm(&rz) / tau / bnorm,
            dres: inf_norm(&rx) / tau / cnorm,
            gap: (cx - (-bz)).abs() / tau / (cx / tau).abs().max(1.0),
        };
        if !(met.pres.is_finite() && met.dres.is_finite() && met.gap.is_finite()) {
            message = format!("numerical breakdown at iteration {it}");
            break;
        }
        let score = met.score(opts);
        if best.as_ref().is_none_or(|b| score < b.0) {
            let xs = x.iter().map(|v| v / tau).collect();
            let ss = s.iter().map(|v| v / tau).collect();
            let zz = z.iter().map(|v| v / tau).collect();
            best = Some((score, met, xs, ss, zz));
        }
        if score <= 1.0 {
            message = "converged".into();
            break;
        }
        if bz < 0.0 {
            let az = &atz;
            if inf_norm(az) / -bz <= opts.feas_tol {
                let zc: Vec<f64> = z.iter().map(|v| v / -bz).collect();
                return IpmResult {
                    status: Status::Infeasible,
                    x: vec![0.0; rp.n],
                    s: vec![0.0; rp.num_rows()],
                    z: d.expand(&zc),
                    pobj: f64::NAN,
                    dobj: f64::INFINITY,
                    gap: f64::NAN,
                    pres: inf_norm(az) / -bz,
                    dres: f64::NAN,
                    iterations: it,
                    message: "primal infeasibility certificate".into(),
                };
            }
        }
        if cx < 0.0 {
            let axs: Vec<f64> = (0..m).map(|i| ax[i] + s[i]).collect();
            if inf_norm(&axs) / -cx <= opts.feas_tol {
                let xc: Vec<f64> = x.iter().map(|v| v / -cx).collect();
                return IpmResult {
                    status: Status::Unbounded,
                    x: xc,
                    s: d.expand(&s.iter().map(|v| v / -cx).collect::<Vec<_>>()),
                    z: vec![0.0; rp.num_rows()],
                    pobj: f64::NEG_INFINITY,
                    dobj: f64::NAN,
                    gap: f64::NAN,
                    pres: f64::NAN,
                    dres: inf_norm(&axs) / -cx,
                    iterations: it,
                    message: "dual infeasibility certificate".into(),
                };
            }
        }
        if it == opts.max_iter {
            break;
        }

        let mu = (dot(&s[m0..], &z[m0..]) + tau * kappa) / (d.nu + 1.0);
        let Some(sc) = Scaling::nt(&d, &s, &z) else {
            message = format!("scaling failed at iteration {it}");
            break;
        };
        let Some(kkt) = Kkt::factor(&d, &sc) else {
            message = format!("factorization failed at iteration {it}");
            break;
        };
        let bvec = d.b.clone();
        let (x1, z1) = kkt.solve(&d, &sc, &negc, &bvec);
        let denom = dot(&d.c, &x1) + dot(&d.b, &z1) - kappa / tau;

        let lam2 = sc.lam_sq(&d);
        let step = |ds: &[f64], dk: f64, eta: f64| {
            let wl = sc.wt_apply(&d, &sc.lam_div(&d, ds));
            let r1: Vec<f64> = rx.iter().map(|v| -eta * v).collect();
            let r23: Vec<f64> = (0..m).map(|i| -eta * rz[i] + if i < m0 { 0.0 } else { wl[i] }).collect();
            let (x2, z2) = kkt.solve(&d, &sc, &r1, &r23);
            let dtau = (-eta * rt - dot(&d.c, &x2) - dot(&d.b, &z2) + dk / tau) / denom;
            let dx: Vec<f64> = (0..n).map(|j| x2[j] + dtau * x1[j]).collect();
            let dz: Vec<f64> = (0..m).map(|i| z2[i] + dtau * z1[i]).collect();
            let hdz = sc.h_apply(&d, &dz);
            let ds_: Vec<f64> = (0..m).map(|i| if i < m0 { 0.0 } else { -wl[i] - hdz[i] }).collect();
            let dkappa = (-dk - kappa * dtau) / tau;
            (dx, ds_, dz, dtau, dkappa)
        };
        let alpha_max = |ds: &[f64], dz: &[f64], dtau: f64, dkappa: f64| {
            let ss = sc.wit_apply(&d, ds);
            let zz = sc.w_apply(&d, dz);
            let mut a = sc.max_step(&d, &ss).min(sc.max_step(&d, &zz));
            if dtau < 0.0 {
                a = a.min(-tau / dtau);
            }
            if dkappa < 0.0 {
                a = a.min(-kappa / dkappa);
            }
            (a, ss, zz)
        };

        // Predictor.
        let (_, dsa, dza, dta, dka) = step(&lam2, tau * kappa, 1.0);
        let (aa, ssa, zza) = alpha_max(&dsa, &dza, dta, dka);
        let aa = aa.min(1.0);
        let sigma = (1.0 - aa).powi(3);
        let eta = 1.0 - sigma;

        // Corrector.
        let cross = circ(&d, &ssa, &zza);
        let ds: Vec<f64> = (0..m).map(|i| lam2[i] + cross[i] - sigma * mu * e[i]).collect();
        let dk = tau * kappa + dta * dka - sigma * mu;
        let (dx, dsv, dz, dtau, dkappa) = step(&ds, dk, eta);
        let (amax, _, _) = alpha_max(&dsv, &dz, dtau, dkappa);
        let alpha = (0.99 * amax).min(1.0);
        if !(alpha > 1e-10) {
            message = format!("step length collapsed at iteration {it}");
            break;
        }
        for j in 0..n {
            x[j] += alpha * dx[j];
        }
        for i in 0..m {
            s[i] += alpha * dsv[i];
            z[i] += alpha * dz[i];
        }
        tau += alpha * dtau;
        kappa += alpha * dkappa;
    }

    let Some((_, met, xs, ss, zz)) = best else {
        return failed(rp, Status::MaxIter, message);
    };
    let status = if met.meets(opts.gap_tol, opts.feas_tol) || met.meets(opts.gap_tol.max(GAP_TOL), opts.feas_tol.max(FEAS_TOL)) {
        Status::Optimal
    } else {
        Status::MaxIter
    };
    IpmResult {
        status,
        x: xs,
        s: d.expand(&ss),
        z: d.expand(&zz),
        pobj: met.pobj,
        dobj: met.dobj,
        gap: met.gap,
        pres: met.pres,
        dres: met.dres,
        iterations: iters,
        message,
    }
}
