//! Hermitian eigendecomposition by cyclic Jacobi rotations on the real
//! symmetric embedding `[[Re H, -Im H], [Im H, Re H]]`.
//!
//! Every eigenvalue of `H` appears twice in the embedding; the complex
//! eigenvectors are recovered as `x + i y` from embedded vectors `[x; y]`
//! and deduplicated by a pivoted Gram-Schmidt pass inside each cluster.

use super::{CMatrix, C64};

const MAX_SWEEPS: usize = 80;

/// Eigenvalues (ascending) and column-major eigenvectors of a real symmetric
/// matrix stored row-major in `a` (destroyed).
pub fn jacobi_symmetric(a: &mut [f64], n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    let scale: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    if scale == 0.0 || n == 1 {
        let w = (0..n).map(|i| a[i * n + i]).collect();
        return (w, v);
    }
    for sweep in 0..MAX_SWEEPS {
        let mut off = 0.0;
        for p in 0..n {
            for q in p + 1..n {
                off += a[p * n + q] * a[p * n + q];
            }
        }
        if off.sqrt() <= 1e-17 * scale {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                if sweep > 3 && apq.abs() < 1e-18 * app.abs() && apq.abs() < 1e-18 * aqq.abs() {
                    a[p * n + q] = 0.0;
                    a[q * n + p] = 0.0;
                    continue;
                }
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    if k == p || k == q {
                        continue;
                    }
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    let np = c * akp - s * akq;
                    let nq = s * akp + c * akq;
                    a[k * n + p] = np;
                    a[p * n + k] = np;
                    a[k * n + q] = nq;
                    a[q * n + k] = nq;
                }
                a[p * n + p] = app - t * apq;
                a[q * n + q] = aqq + t * apq;
                a[p * n + q] = 0.0;
                a[q * n + p] = 0.0;
                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }
    let w = (0..n).map(|i| a[i * n + i]).collect();
    (w, v)
}

fn cdot(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Above this dimension the Hermitian eigensolver switches from Jacobi to
/// faer's tridiagonal QR.
pub const JACOBI_MAX_DIM: usize = 32;

/// Eigenvalues in descending order and the unitary whose columns are the
/// matching eigenvectors. The input is assumed Hermitian.
pub fn hermitian_eig_matrix(h: &CMatrix) -> (Vec<f64>, CMatrix) {
    if h.rows() <= JACOBI_MAX_DIM {
        hermitian_eig_jacobi(h)
    } else {
        hermitian_eig_dense(h)
    }
}

fn to_faer(h: &CMatrix) -> faer::Mat<faer::c64> {
    let n = h.rows();
    faer::Mat::from_fn(n, n, |i, j| {
        let z = (h[(i, j)] + h[(j, i)].conj()) * 0.5;
        faer::c64::new(z.re, z.im)
    })
}

/// True when `h + shift·I` has a Cholesky factorization, which proves
/// every eigenvalue of `h` exceeds `−shift`.
pub fn shifted_cholesky_succeeds(h: &CMatrix, shift: f64) -> bool {
    let mut m = to_faer(h);
    for i in 0..h.rows() {
        m[(i, i)].re += shift;
    }
    m.llt(faer::Side::Lower).is_ok()
}

/// Dense Householder-tridiagonal eigensolver (faer).
pub fn hermitian_eig_dense(h: &CMatrix) -> (Vec<f64>, CMatrix) {
    let n = h.rows();
    let evd = to_faer(h).self_adjoint_eigen(faer::Side::Lower).expect("eigendecomposition converges");
    let (s, u) = (evd.S(), evd.U());
    let vals: Vec<f64> = (0..n).rev().map(|i| s[i].re).collect();
    let vecs = CMatrix::from_fn(n, n, |i, j| {
        let z = u[(i, n - 1 - j)];
        C64::new(z.re, z.im)
    });
    (vals, vecs)
}

/// Jacobi path of [`hermitian_eig_matrix`], usable at any size.
pub fn hermitian_eig_jacobi(h: &CMatrix) -> (Vec<f64>, CMatrix) {
    let n = h.rows();
    let m = 2 * n;
    let mut a = vec![0.0; m * m];
    for i in 0..n {
        for j in 0..n {
            let z = (h[(i, j)] + h[(j, i)].conj()) * 0.5;
            a[i * m + j] = z.re;
            a[(i + n) * m + (j + n)] = z.re;
            a[(i + n) * m + j] = z.im;
            a[i * m + (j + n)] = -z.im;
        }
    }
    let (w, v) = jacobi_symmetric(&mut a, m);
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&x, &y| w[y].partial_cmp(&w[x]).unwrap_or(std::cmp::Ordering::Equal));
    let wmax = w.iter().fold(0.0f64, |s, x| s.max(x.abs()));
    let tol = 1e-9 * wmax.max(1e-300);

    let candidate = |col: usize| -> Vec<C64> { (0..n).map(|i| C64::new(v[i * m + col], v[(i + n) * m + col])).collect() };

    let mut chosen: Vec<Vec<C64>> = Vec::with_capacity(n);
    let mut start = 0;
    while start < m {
        let mut end = start + 1;
        while end < m && w[order[end - 1]] - w[order[end]] <= tol {
            end += 1;
        }
        let want = ((end - start) + 1) / 2;
        let mut cands: Vec<Vec<C64>> = order[start..end].iter().map(|&c| candidate(c)).collect();
        for _ in 0..want {
            if chosen.len() == n {
                break;
            }
            for c in cands.iter_mut() {
                for q in chosen.iter() {
                    let ov = cdot(q, c);
                    for (x, y) in c.iter_mut().zip(q) {
                        *x -= ov * y;
                    }
                }
            }
            let (best, norm) = cands
                .iter()
                .enumerate()
                .map(|(i, c)| (i, cdot(c, c).re.sqrt()))
                .fold((0, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
            if norm <= 1e-8 {
                break;
            }
            let mut q = cands.swap_remove(best);
            for x in q.iter_mut() {
                *x /= norm;
            }
            chosen.push(q);
        }
        start = end;
    }
    // Cluster bookkeeping can only come up short on pathological spectra;
    // complete the basis so the result stays unitary.
    let mut e = 0;
    while chosen.len() < n && e < n {
        let mut c = vec![C64::new(0.0, 0.0); n];
        c[e] = C64::new(1.0, 0.0);
        for _ in 0..2 {
            for q in chosen.iter() {
                let ov = cdot(q, &c);
                for (x, y) in c.iter_mut().zip(q) {
                    *x -= ov * y;
                }
            }
        }
        let norm = cdot(&c, &c).re.sqrt();
        if norm > 1e-6 {
            for x in c.iter_mut() {
                *x /= norm;
            }
            chosen.push(c);
        }
        e += 1;
    }
    let mut pairs: Vec<(f64, Vec<C64>)> = chosen
        .into_iter()
        .map(|q| {
            let hq = h.matvec(&q);
            (cdot(&q, &hq).re, q)
        })
        .collect();
    pairs.sort_by(|x, y| y.0.partial_cmp(&x.0).unwrap_or(std::cmp::Ordering::Equal));
    let vals: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    let vecs = CMatrix::from_fn(n, n, |i, j| pairs[j].1[i]);
    (vals, vecs)
}

/// Eigenvalues only, descending.
pub fn hermitian_eigenvalues(h: &CMatrix) -> Vec<f64> {
    if h.rows() <= JACOBI_MAX_DIM {
        return hermitian_eig_jacobi(h).0;
    }
    let mut v = to_faer(h).self_adjoint_eigenvalues(faer::Side::Lower).expect("eigenvalues converge");
    v.reverse();
    v
}
