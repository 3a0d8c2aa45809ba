//! Dense complex linear algebra over labeled tensor factors.
//!
//! A [`DimSpec`] fixes an ordered list of named factors; a
//! [`LabeledMatrix`] is a square operator on the product space whose index
//! strides follow that order (first factor most significant).

mod eig;
mod matrix;

use thiserror::Error;

pub use eig::{hermitian_eig_dense, hermitian_eig_jacobi, hermitian_eig_matrix, hermitian_eigenvalues, jacobi_symmetric, shifted_cholesky_succeeds, JACOBI_MAX_DIM};
pub use matrix::CMatrix;

pub type C64 = num_complex::Complex64;

/// Relative Hermiticity tolerance: max|M − M†| ≤ HERM_TOL · max|M|.
pub const HERM_TOL: f64 = 1e-12;
/// Eigendecomposition reconstruction tolerance relative to max|λ|.
pub const EIG_TOL: f64 = 1e-10;
/// PSD acceptance: min eigenvalue ≥ −PSD_TOL · ‖M‖∞.
pub const PSD_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TensorError {
    #[error("label `{0}` appears in both operands")]
    LabelCollision(String),
    #[error("unknown label `{0}`")]
    UnknownLabel(String),
    #[error("invalid dimension spec: {0}")]
    InvalidSpec(String),
    #[error("dimension mismatch: {0}")]
    DimMismatch(String),
    #[error("matrix is not Hermitian (defect {0:.3e})")]
    NotHermitian(f64),
}

pub type Result<T> = std::result::Result<T, TensorError>;

/// Ordered named tensor factors.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DimSpec {
    factors: Vec<(String, usize)>,
}

impl DimSpec {
    pub fn new<S: Into<String>>(factors: impl IntoIterator<Item = (S, usize)>) -> Result<Self> {
        let factors: Vec<(String, usize)> = factors.into_iter().map(|(l, d)| (l.into(), d)).collect();
        for (i, (l, d)) in factors.iter().enumerate() {
            if *d == 0 {
                return Err(TensorError::InvalidSpec(format!("factor `{l}` has dimension 0")));
            }
            if factors[..i].iter().any(|(m, _)| m == l) {
                return Err(TensorError::InvalidSpec(format!("duplicate label `{l}`")));
            }
        }
        Ok(Self { factors })
    }

    /// The empty product (total dimension 1).
    pub fn scalar() -> Self {
        Self { factors: Vec::new() }
    }

    pub fn single(label: &str, dim: usize) -> Self {
        Self::new([(label, dim)]).expect("single-factor spec")
    }

    pub fn factors(&self) -> &[(String, usize)] {
        &self.factors
    }

    pub fn labels(&self) -> Vec<&str> {
        self.factors.iter().map(|(l, _)| l.as_str()).collect()
    }

    pub fn dims(&self) -> Vec<usize> {
        self.factors.iter().map(|(_, d)| *d).collect()
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn total_dim(&self) -> usize {
        self.factors.iter().map(|(_, d)| d).product()
    }

    pub fn contains(&self, label: &str) -> bool {
        self.factors.iter().any(|(l, _)| l == label)
    }

    pub fn position(&self, label: &str) -> Result<usize> {
        self.factors.iter().position(|(l, _)| l == label).ok_or_else(|| TensorError::UnknownLabel(label.to_string()))
    }

    pub fn dim_of(&self, label: &str) -> Result<usize> {
        Ok(self.factors[self.position(label)?].1)
    }

    /// Product of the dimensions of the listed labels.
    pub fn dim_of_set(&self, labels: &[&str]) -> Result<usize> {
        labels.iter().try_fold(1, |acc, l| Ok(acc * self.dim_of(l)?))
    }

    pub fn concat(&self, other: &DimSpec) -> Result<DimSpec> {
        for (l, _) in &other.factors {
            if self.contains(l) {
                return Err(TensorError::LabelCollision(l.clone()));
            }
        }
        let mut factors = self.factors.clone();
        factors.extend(other.factors.iter().cloned());
        Ok(DimSpec { factors })
    }

    /// Factors in `keep`, listed in this spec's order.
    pub fn subset(&self, keep: &[&str]) -> Result<DimSpec> {
        for l in keep {
            self.position(l)?;
        }
        Ok(DimSpec { factors: self.factors.iter().filter(|(l, _)| keep.contains(&l.as_str())).cloned().collect() })
    }

    /// Factors not in `drop`, in this spec's order.
    pub fn without(&self, drop: &[&str]) -> Result<DimSpec> {
        for l in drop {
            self.position(l)?;
        }
        Ok(DimSpec { factors: self.factors.iter().filter(|(l, _)| !drop.contains(&l.as_str())).cloned().collect() })
    }

    pub fn permuted(&self, order: &[&str]) -> Result<DimSpec> {
        if order.len() != self.factors.len() {
            return Err(TensorError::DimMismatch(format!("permutation lists {} labels, spec has {}", order.len(), self.factors.len())));
        }
        let mut factors = Vec::with_capacity(order.len());
        for l in order {
            let p = self.position(l)?;
            if factors.iter().any(|(m, _): &(String, usize)| m == l) {
                return Err(TensorError::InvalidSpec(format!("duplicate label `{l}` in permutation")));
            }
            factors.push(self.factors[p].clone());
        }
        Ok(DimSpec { factors })
    }

    pub fn relabeled(&self, map: &[(&str, &str)]) -> Result<DimSpec> {
        for (from, _) in map {
            self.position(from)?;
        }
        let factors = self
            .factors
            .iter()
            .map(|(l, d)| {
                let nl = map.iter().find(|(f, _)| f == l).map(|(_, t)| t.to_string()).unwrap_or_else(|| l.clone());
                (nl, *d)
            })
            .collect::<Vec<_>>();
        DimSpec::new(factors)
    }

    /// Row-major strides of the factors.
    pub fn strides(&self) -> Vec<usize> {
        let mut s = vec![1; self.factors.len()];
        for i in (0..self.factors.len().saturating_sub(1)).rev() {
            s[i] = s[i + 1] * self.factors[i + 1].1;
        }
        s
    }

    /// For the product space of `labels` (in the given order, row-major),
    /// the offset of each of its basis indices inside this spec's index space.
    pub fn offsets_for(&self, labels: &[&str]) -> Result<Vec<usize>> {
        let strides = self.strides();
        let mut offs = vec![0usize];
        for l in labels {
            let p = self.position(l)?;
            let (d, st) = (self.factors[p].1, strides[p]);
            let mut next = Vec::with_capacity(offs.len() * d);
            for &o in &offs {
                for k in 0..d {
                    next.push(o + k * st);
                }
            }
            offs = next;
        }
        Ok(offs)
    }
}

impl std::fmt::Display for DimSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.factors.iter().map(|(l, d)| format!("{l}:{d}")).collect();
        write!(f, "[{}]", parts.join(", "))
    }
}

/// Which Schatten norm to evaluate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Norm {
    Trace,
    Operator,
    Frobenius,
}

/// Square complex matrix over a [`DimSpec`].
#[derive(Clone, Debug, PartialEq)]
pub struct LabeledMatrix {
    spec: DimSpec,
    m: CMatrix,
}

impl LabeledMatrix {
    pub fn new(spec: DimSpec, m: CMatrix) -> Result<Self> {
        let d = spec.total_dim();
        if m.rows() != d || m.cols() != d {
            return Err(TensorError::DimMismatch(format!("matrix is {}x{}, spec {} has total dimension {d}", m.rows(), m.cols(), spec)));
        }
        Ok(Self { spec, m })
    }

    pub fn identity(spec: &DimSpec) -> Self {
        Self { m: CMatrix::identity(spec.total_dim()), spec: spec.clone() }
    }

    pub fn zeros(spec: &DimSpec) -> Self {
        let d = spec.total_dim();
        Self { m: CMatrix::zeros(d, d), spec: spec.clone() }
    }

    /// 1×1 matrix with value `v` over the empty spec.
    pub fn scalar(v: C64) -> Self {
        Self { spec: DimSpec::scalar(), m: CMatrix::from_vec(1, 1, vec![v]) }
    }

    pub fn spec(&self) -> &DimSpec {
        &self.spec
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.m
    }

    pub fn into_matrix(self) -> CMatrix {
        self.m
    }

    pub fn dim(&self) -> usize {
        self.m.rows()
    }

    pub fn trace(&self) -> C64 {
        self.m.trace()
    }

    pub fn kron(&self, other: &LabeledMatrix) -> Result<LabeledMatrix> {
        let spec = self.spec.concat(&other.spec)?;
        Ok(LabeledMatrix { spec, m: self.m.kron(&other.m) })
    }

    pub fn partial_trace(&self, keep: &[&str]) -> Result<LabeledMatrix> {
        let kept = self.spec.subset(keep)?;
        let kept_labels = kept.labels();
        let traced: Vec<&str> = self.spec.labels().into_iter().filter(|l| !kept_labels.contains(l)).collect();
        let ko = self.spec.offsets_for(&kept_labels)?;
        let to = self.spec.offsets_for(&traced)?;
        let n = self.m.rows();
        let data = self.m.data();
        let k = ko.len();
        let mut out = CMatrix::zeros(k, k);
        for (i, &oi) in ko.iter().enumerate() {
            for (j, &oj) in ko.iter().enumerate() {
                let mut s = C64::new(0.0, 0.0);
                for &t in &to {
                    s += data[(oi + t) * n + oj + t];
                }
                out[(i, j)] = s;
            }
        }
        Ok(LabeledMatrix { spec: kept, m: out })
    }

    /// Trace over the listed factors.
    pub fn trace_out(&self, drop: &[&str]) -> Result<LabeledMatrix> {
        let kept = self.spec.without(drop)?;
        self.partial_trace(&kept.labels())
    }

    pub fn partial_transpose(&self, subset: &[&str]) -> Result<LabeledMatrix> {
        let sel = self.spec.subset(subset)?;
        let sel_labels = sel.labels();
        let rest: Vec<&str> = self.spec.labels().into_iter().filter(|l| !sel_labels.contains(l)).collect();
        let so = self.spec.offsets_for(&sel_labels)?;
        let ro = self.spec.offsets_for(&rest)?;
        let n = self.m.rows();
        let src = self.m.data();
        let mut out = CMatrix::zeros(n, n);
        let dst = out.data_mut();
        for &r1 in &ro {
            for &r2 in &ro {
                for &s1 in &so {
                    for &s2 in &so {
                        dst[(r1 + s1) * n + r2 + s2] = src[(r1 + s2) * n + r2 + s1];
                    }
                }
            }
        }
        Ok(LabeledMatrix { spec: self.spec.clone(), m: out })
    }

    pub fn permute(&self, order: &[&str]) -> Result<LabeledMatrix> {
        let spec = self.spec.permuted(order)?;
        let p = self.spec.offsets_for(order)?;
        let n = self.m.rows();
        let src = self.m.data();
        let m = CMatrix::from_fn(n, n, |i, j| src[p[i] * n + p[j]]);
        Ok(LabeledMatrix { spec, m })
    }

    pub fn relabel(&self, map: &[(&str, &str)]) -> Result<LabeledMatrix> {
        Ok(LabeledMatrix { spec: self.spec.relabeled(map)?, m: self.m.clone() })
    }

    /// `self ⊗ I` on the factors of `target` missing from `self`, reordered
    /// to `target`'s order.
    pub fn expand_to(&self, target: &DimSpec) -> Result<LabeledMatrix> {
        for (l, d) in self.spec.factors() {
            if target.dim_of(l)? != *d {
                return Err(TensorError::DimMismatch(format!("factor `{l}` has dimension {d} vs {}", target.dim_of(l)?)));
            }
        }
        let own = self.spec.labels();
        let missing = target.without(&own)?;
        let full = self.kron(&LabeledMatrix::identity(&missing))?;
        full.permute(&target.labels())
    }

    pub fn adjoint(&self) -> LabeledMatrix {
        LabeledMatrix { spec: self.spec.clone(), m: self.m.adjoint() }
    }

    pub fn transpose(&self) -> LabeledMatrix {
        LabeledMatrix { spec: self.spec.clone(), m: self.m.transpose() }
    }

    pub fn scale(&self, s: f64) -> LabeledMatrix {
        LabeledMatrix { spec: self.spec.clone(), m: self.m.scale_real(s) }
    }

    pub fn add(&self, other: &LabeledMatrix) -> Result<LabeledMatrix> {
        self.check_same(other)?;
        Ok(LabeledMatrix { spec: self.spec.clone(), m: &self.m + &other.m })
    }

    pub fn sub(&self, other: &LabeledMatrix) -> Result<LabeledMatrix> {
        self.check_same(other)?;
        Ok(LabeledMatrix { spec: self.spec.clone(), m: &self.m - &other.m })
    }

    pub fn matmul(&self, other: &LabeledMatrix) -> Result<LabeledMatrix> {
        self.check_same(other)?;
        Ok(LabeledMatrix { spec: self.spec.clone(), m: &self.m * &other.m })
    }

    fn check_same(&self, other: &LabeledMatrix) -> Result<()> {
        if self.spec != other.spec {
            return Err(TensorError::DimMismatch(format!("{} vs {}", self.spec, other.spec)));
        }
        Ok(())
    }

    pub fn is_hermitian(&self) -> bool {
        self.m.is_hermitian(HERM_TOL)
    }

    fn require_hermitian(&self) -> Result<()> {
        let defect = self.m.hermiticity_defect();
        if defect > HERM_TOL * self.m.max_abs().max(f64::MIN_POSITIVE) {
            return Err(TensorError::NotHermitian(defect));
        }
        Ok(())
    }

    /// Eigenvalues in descending order and a unitary of eigenvectors.
    pub fn hermitian_eig(&self) -> Result<(Vec<f64>, CMatrix)> {
        self.require_hermitian()?;
        Ok(hermitian_eig_matrix(&self.m))
    }

    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        self.require_hermitian()?;
        Ok(hermitian_eigenvalues(&self.m))
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        Ok(self.eigenvalues()?.last().copied().unwrap_or(0.0))
    }

    /// min eigenvalue ≥ −PSD_TOL · ‖M‖∞.
    pub fn is_psd(&self) -> Result<bool> {
        self.require_hermitian()?;
        // max |entry| ≤ ‖M‖∞, so a successful factorization settles it
        if self.dim() > JACOBI_MAX_DIM && shifted_cholesky_succeeds(&self.m, PSD_TOL * self.m.max_abs()) {
            return Ok(true);
        }
        let ev = self.eigenvalues()?;
        let norm = ev.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        Ok(ev.last().copied().unwrap_or(0.0) >= -PSD_TOL * norm)
    }

    pub fn schatten_norm(&self, p: Norm) -> Result<f64> {
        match p {
            Norm::Frobenius => Ok(self.m.frobenius()),
            Norm::Trace => Ok(self.eigenvalues()?.iter().map(|x| x.abs()).sum()),
            Norm::Operator => Ok(self.eigenvalues()?.iter().fold(0.0, |m, x| m.max(x.abs()))),
        }
    }

    pub fn max_abs_diff(&self, other: &LabeledMatrix) -> Result<f64> {
        self.check_same(other)?;
        Ok(self.m.max_abs_diff(&other.m))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn qubit(label: &str) -> DimSpec {
        DimSpec::single(label, 2)
    }

    fn pauli_z(label: &str) -> LabeledMatrix {
        LabeledMatrix::new(qubit(label), CMatrix::diag(&[1.0, -1.0])).unwrap()
    }

    fn phi_plus_normalized() -> LabeledMatrix {
        let spec = DimSpec::new([("A", 2), ("B", 2)]).unwrap();
        let v = [c(1.0), c(0.0), c(0.0), c(1.0)];
        LabeledMatrix::new(spec, CMatrix::outer(&v, &v).scale_real(0.5)).unwrap()
    }

    fn flip() -> CMatrix {
        // F|ab⟩ = |ba⟩ in the basis {00, 01, 10, 11}.
        CMatrix::from_real(4, 4, &[1., 0., 0., 0., 0., 0., 1., 0., 0., 1., 0., 0., 0., 0., 0., 1.])
    }

    #[test]
    fn kron_examples() {
        let i2a = LabeledMatrix::identity(&qubit("A"));
        let i2b = LabeledMatrix::identity(&qubit("B"));
        assert_eq!(i2a.kron(&i2b).unwrap().matrix(), &CMatrix::identity(4));

        let p0 = LabeledMatrix::new(qubit("A"), CMatrix::diag(&[1.0, 0.0])).unwrap();
        let p1 = LabeledMatrix::new(qubit("B"), CMatrix::diag(&[0.0, 1.0])).unwrap();
        assert_eq!(p0.kron(&p1).unwrap().matrix(), &CMatrix::diag(&[0.0, 1.0, 0.0, 0.0]));

        let zz = pauli_z("A").kron(&pauli_z("B")).unwrap();
        assert_eq!(zz.matrix(), &CMatrix::diag(&[1.0, -1.0, -1.0, 1.0]));

        assert!(matches!(i2a.kron(&i2a), Err(TensorError::LabelCollision(_))));
    }

    #[test]
    fn partial_trace_examples() {
        let rho = LabeledMatrix::new(qubit("A"), CMatrix::from_real(2, 2, &[0.7, 0.2, 0.2, 0.3])).unwrap();
        let sigma = LabeledMatrix::new(qubit("B"), CMatrix::from_real(2, 2, &[2.0, 0.0, 0.0, 1.0])).unwrap();
        let red = rho.kron(&sigma).unwrap().partial_trace(&["A"]).unwrap();
        assert!(red.max_abs_diff(&rho.scale(3.0)).unwrap() < 1e-15);

        let red = phi_plus_normalized().partial_trace(&["A"]).unwrap();
        assert!(red.max_abs_diff(&LabeledMatrix::identity(&qubit("A")).scale(0.5)).unwrap() < 1e-15);

        let spec = DimSpec::new([("X", 3), ("Y", 2)]).unwrap();
        let full = LabeledMatrix::identity(&spec).partial_trace(&[]).unwrap();
        assert_eq!(full.dim(), 1);
        assert_eq!(full.trace(), c(6.0));

        assert!(matches!(red.partial_trace(&["Q"]), Err(TensorError::UnknownLabel(_))));
    }

    #[test]
    fn partial_transpose_examples() {
        let pt = phi_plus_normalized().partial_transpose(&["B"]).unwrap();
        assert!(pt.matrix().max_abs_diff(&flip().scale_real(0.5)) < 1e-15);

        let rho = LabeledMatrix::new(qubit("A"), CMatrix::from_fn(2, 2, |i, j| C64::new((i + j) as f64, i as f64 - j as f64))).unwrap();
        let sigma = LabeledMatrix::new(qubit("B"), CMatrix::from_fn(2, 2, |i, j| C64::new(1.0 + i as f64, 2.0 * j as f64 - i as f64))).unwrap();
        let lhs = rho.kron(&sigma).unwrap().partial_transpose(&["B"]).unwrap();
        let rhs = rho.kron(&sigma.transpose()).unwrap();
        assert!(lhs.max_abs_diff(&rhs).unwrap() == 0.0);

        let m = rho.kron(&sigma).unwrap();
        let twice = m.partial_transpose(&["B"]).unwrap().partial_transpose(&["B"]).unwrap();
        assert_eq!(twice, m);
    }

    #[test]
    fn eig_examples() {
        let (v, _) = pauli_z("A").hermitian_eig().unwrap();
        assert!((v[0] - 1.0).abs() < 1e-14 && (v[1] + 1.0).abs() < 1e-14);

        let f = LabeledMatrix::new(DimSpec::new([("A", 2), ("B", 2)]).unwrap(), flip()).unwrap();
        let (v, _) = f.hermitian_eig().unwrap();
        for (got, want) in v.iter().zip([1.0, 1.0, 1.0, -1.0]) {
            assert!((got - want).abs() < 1e-12, "{v:?}");
        }

        let (v, u) = LabeledMatrix::identity(&DimSpec::single("A", 5)).hermitian_eig().unwrap();
        assert!(v.iter().all(|x| (x - 1.0).abs() < 1e-14));
        assert!((&u.adjoint() * &u).max_abs_diff(&CMatrix::identity(5)) < 1e-12);
    }

    #[test]
    fn eig_reconstructs_complex_matrix() {
        let h = CMatrix::from_fn(4, 4, |i, j| {
            let (a, b) = (i.min(j) as f64, i.max(j) as f64);
            let im = if i < j { 0.3 * (a + 1.0) } else if i > j { -0.3 * (b.min(a) + 1.0) } else { 0.0 };
            C64::new(1.0 / (1.0 + a + b), im)
        })
        .hermitian_part();
        let (v, u) = hermitian_eig_matrix(&h);
        let rec = &(&u * &CMatrix::diag(&v)) * &u.adjoint();
        let lmax = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        assert!(rec.max_abs_diff(&h) <= EIG_TOL * lmax);
        assert!(v.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn jacobi_and_dense_paths_agree() {
        let n = 40;
        let h = CMatrix::from_fn(n, n, |i, j| C64::new(((i * 7 + j * 3) % 11) as f64 / 11.0, ((i * j) % 5) as f64 / 9.0)).hermitian_part();
        let (vj, uj) = hermitian_eig_jacobi(&h);
        let (vd, ud) = hermitian_eig_dense(&h);
        for (a, b) in vj.iter().zip(&vd) {
            assert!((a - b).abs() < 1e-10);
        }
        for u in [uj, ud] {
            assert!((&u.adjoint() * &u).max_abs_diff(&CMatrix::identity(n)) < 1e-10);
        }
    }

    #[test]
    fn eig_rejects_non_hermitian() {
        let m = LabeledMatrix::new(qubit("A"), CMatrix::from_real(2, 2, &[0.0, 1.0, 0.0, 0.0])).unwrap();
        assert!(matches!(m.hermitian_eig(), Err(TensorError::NotHermitian(_))));
    }

    #[test]
    fn schatten_examples() {
        let f = LabeledMatrix::new(DimSpec::new([("A", 2), ("B", 2)]).unwrap(), flip().scale_real(0.5)).unwrap();
        assert!((f.schatten_norm(Norm::Trace).unwrap() - 2.0).abs() < 1e-12);
        let id = LabeledMatrix::identity(&DimSpec::single("A", 3));
        assert!((id.schatten_norm(Norm::Operator).unwrap() - 1.0).abs() < 1e-14);
        assert_eq!(LabeledMatrix::zeros(&qubit("A")).schatten_norm(Norm::Frobenius).unwrap(), 0.0);
    }

    #[test]
    fn permute_and_expand() {
        let zz = pauli_z("A").kron(&LabeledMatrix::identity(&DimSpec::single("B", 3))).unwrap();
        let p = zz.permute(&["B", "A"]).unwrap();
        let want = LabeledMatrix::identity(&DimSpec::single("B", 3)).kron(&pauli_z("A")).unwrap();
        assert_eq!(p, want);
        let target = DimSpec::new([("B", 3), ("A", 2)]).unwrap();
        assert_eq!(pauli_z("A").expand_to(&target).unwrap(), want);
    }

    #[test]
    fn psd_test_above_jacobi_size() {
        let n = JACOBI_MAX_DIM + 8;
        let spec = DimSpec::single("A", n);
        let g = CMatrix::from_fn(n, n, |i, j| C64::new(((i * 7 + j * 3) % 5) as f64 - 2.0, ((i + 2 * j) % 3) as f64 - 1.0));
        let w = &g * &g.adjoint();
        let lo = *hermitian_eigenvalues(&w).last().unwrap();
        let at = |shift: f64| LabeledMatrix::new(spec.clone(), &w - &CMatrix::identity(n).scale_real(shift)).unwrap();
        // rank deficient Wishart sits on the boundary
        assert!(at(lo).is_psd().unwrap());
        assert!(at(lo - 1.0).is_psd().unwrap());
        assert!(!at(lo + 1e-3).is_psd().unwrap());
        assert!(LabeledMatrix::zeros(&spec).is_psd().unwrap());
    }
}
