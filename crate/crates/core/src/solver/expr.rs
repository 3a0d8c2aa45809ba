//! Affine Hermitian-valued expressions over the program variables.
//!
//! A `d × d` Hermitian matrix is stored as `d²` real coordinates: slot
//! `p·d + q` holds `H_pp` when `p = q`, `Re H_pq` when `p < q` and
//! `Im H_qp` when `p > q`. The matching basis is `E_pp`,
//! `E_pq + E_qp` and `i(E_pq − E_qp)` (for `p < q`).

use crate::tensor::{CMatrix, DimSpec, LabeledMatrix, C64};

use super::{Result, SolverError};

/// Hermitian coordinates of `m` (the Hermitian part is used).
pub fn hermitian_coords(m: &CMatrix) -> Vec<f64> {
    let d = m.rows();
    let mut v = vec![0.0; d * d];
    for p in 0..d {
        v[p * d + p] = m[(p, p)].re;
        for q in p + 1..d {
            let z = (m[(p, q)] + m[(q, p)].conj()) * 0.5;
            v[p * d + q] = z.re;
            v[q * d + p] = z.im;
        }
    }
    v
}

/// Inverse of [`hermitian_coords`].
pub fn coords_to_matrix(d: usize, v: &[f64]) -> CMatrix {
    let mut m = CMatrix::zeros(d, d);
    for p in 0..d {
        m[(p, p)] = C64::new(v[p * d + p], 0.0);
        for q in p + 1..d {
            let z = C64::new(v[p * d + q], v[q * d + p]);
            m[(p, q)] = z;
            m[(q, p)] = z.conj();
        }
    }
    m
}

/// Linear map given by its action on matrix units `E_ij`.
pub trait UnitMap {
    fn out_spec(&self) -> &DimSpec;
    /// Appends the image of `E_ij` as `(row, col, coefficient)` triples.
    fn unit(&self, i: usize, j: usize, out: &mut Vec<(usize, usize, C64)>);
}

/// [`UnitMap`] from a closure.
pub struct FnMap<F> {
    spec: DimSpec,
    f: F,
}

impl<F: Fn(usize, usize, &mut Vec<(usize, usize, C64)>)> FnMap<F> {
    pub fn new(spec: DimSpec, f: F) -> Self {
        Self { spec, f }
    }
}

impl<F: Fn(usize, usize, &mut Vec<(usize, usize, C64)>)> UnitMap for FnMap<F> {
    fn out_spec(&self) -> &DimSpec {
        &self.spec
    }
    fn unit(&self, i: usize, j: usize, out: &mut Vec<(usize, usize, C64)>) {
        (self.f)(i, j, out)
    }
}

type Column = Vec<(u32, f64)>;

/// Affine map `x ↦ L x + c` into Hermitian matrices over `spec`.
#[derive(Clone, Debug, PartialEq)]
pub struct HermExpr {
    spec: DimSpec,
    /// `(variable index, image in output coordinates)`, sorted by variable.
    cols: Vec<(usize, Column)>,
    cst: Vec<f64>,
}

fn merge_cols(a: &Column, b: &Column, sb: f64) -> Column {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        if j == b.len() || (i < a.len() && a[i].0 < b[j].0) {
            out.push(a[i]);
            i += 1;
        } else if i == a.len() || b[j].0 < a[i].0 {
            out.push((b[j].0, sb * b[j].1));
            j += 1;
        } else {
            let v = a[i].1 + sb * b[j].1;
            if v != 0.0 {
                out.push((a[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

struct Accumulator {
    d: usize,
    dense: Vec<f64>,
    touched: Vec<u32>,
    mark: Vec<bool>,
}

impl Accumulator {
    fn new(d: usize) -> Self {
        Self { d, dense: vec![0.0; d * d], touched: Vec::new(), mark: vec![false; d * d] }
    }

    fn add(&mut self, k: usize, v: f64) {
        if !self.mark[k] {
            self.mark[k] = true;
            self.touched.push(k as u32);
        }
        self.dense[k] += v;
    }

    /// Adds `v · E_rs`, reading only the upper triangle (the full image is Hermitian).
    fn add_entry(&mut self, r: usize, s: usize, v: C64) {
        let d = self.d;
        if r == s {
            self.add(r * d + r, v.re);
        } else if r < s {
            self.add(r * d + s, v.re);
            self.add(s * d + r, v.im);
        }
    }

    fn drain(&mut self) -> Column {
        self.touched.sort_unstable();
        let mut out = Vec::with_capacity(self.touched.len());
        for &k in &self.touched {
            let v = self.dense[k as usize];
            if v.abs() > 1e-300 {
                out.push((k, v));
            }
            self.dense[k as usize] = 0.0;
            self.mark[k as usize] = false;
        }
        self.touched.clear();
        out
    }
}

/// Matrix units composing basis element `k` of a `d × d` Hermitian space.
fn basis_units(d: usize, k: usize) -> ([(usize, usize, C64); 2], usize) {
    let (p, q) = (k / d, k % d);
    let one = C64::new(1.0, 0.0);
    let z = C64::new(0.0, 0.0);
    if p == q {
        ([(p, p, one), (0, 0, z)], 1)
    } else if p < q {
        ([(p, q, one), (q, p, one)], 2)
    } else {
        // slot (p, q) with p > q holds Im H_qp: basis i(E_qp − E_pq)
        ([(q, p, C64::new(0.0, 1.0)), (p, q, C64::new(0.0, -1.0))], 2)
    }
}

impl HermExpr {
    pub fn zero(spec: &DimSpec) -> Self {
        let d = spec.total_dim();
        Self { spec: spec.clone(), cols: Vec::new(), cst: vec![0.0; d * d] }
    }

    pub fn constant(m: &LabeledMatrix) -> Self {
        Self { spec: m.spec().clone(), cols: Vec::new(), cst: hermitian_coords(m.matrix()) }
    }

    pub fn scalar(v: f64) -> Self {
        Self { spec: DimSpec::scalar(), cols: Vec::new(), cst: vec![v] }
    }

    /// Identity expression of a variable block starting at `offset`.
    pub(crate) fn variable(spec: &DimSpec, offset: usize) -> Self {
        let d = spec.total_dim();
        let cols = (0..d * d).map(|k| (offset + k, vec![(k as u32, 1.0)])).collect();
        Self { spec: spec.clone(), cols, cst: vec![0.0; d * d] }
    }

    pub fn spec(&self) -> &DimSpec {
        &self.spec
    }

    pub fn dim(&self) -> usize {
        self.spec.total_dim()
    }

    pub fn constant_part(&self) -> &[f64] {
        &self.cst
    }

    pub(crate) fn columns(&self) -> &[(usize, Column)] {
        &self.cols
    }

    pub fn is_scalar(&self) -> bool {
        self.dim() == 1
    }

    /// Largest variable index referenced, if any.
    pub fn max_var(&self) -> Option<usize> {
        self.cols.last().map(|c| c.0)
    }

    fn combine(&self, other: &HermExpr, sb: f64) -> Result<HermExpr> {
        if self.spec != other.spec {
            return Err(SolverError::Shape(format!("cannot add expressions over {} and {}", self.spec, other.spec)));
        }
        let mut cols = Vec::with_capacity(self.cols.len() + other.cols.len());
        let (a, b) = (&self.cols, &other.cols);
        let (mut i, mut j) = (0, 0);
        while i < a.len() || j < b.len() {
            if j == b.len() || (i < a.len() && a[i].0 < b[j].0) {
                cols.push(a[i].clone());
                i += 1;
            } else if i == a.len() || b[j].0 < a[i].0 {
                cols.push((b[j].0, b[j].1.iter().map(|&(k, v)| (k, sb * v)).collect()));
                j += 1;
            } else {
                let m = merge_cols(&a[i].1, &b[j].1, sb);
                if !m.is_empty() {
                    cols.push((a[i].0, m));
                }
                i += 1;
                j += 1;
            }
        }
        let cst = self.cst.iter().zip(&other.cst).map(|(x, y)| x + sb * y).collect();
        Ok(HermExpr { spec: self.spec.clone(), cols, cst })
    }

    pub fn add(&self, other: &HermExpr) -> Result<HermExpr> {
        self.combine(other, 1.0)
    }

    pub fn sub(&self, other: &HermExpr) -> Result<HermExpr> {
        self.combine(other, -1.0)
    }

    pub fn add_const(&self, m: &LabeledMatrix) -> Result<HermExpr> {
        self.add(&HermExpr::constant(m))
    }

    pub fn sub_const(&self, m: &LabeledMatrix) -> Result<HermExpr> {
        self.sub(&HermExpr::constant(m))
    }

    pub fn scale(&self, s: f64) -> HermExpr {
        HermExpr {
            spec: self.spec.clone(),
            cols: self.cols.iter().map(|(j, c)| (*j, c.iter().map(|&(k, v)| (k, s * v)).collect())).collect(),
            cst: self.cst.iter().map(|v| s * v).collect(),
        }
    }

    pub fn neg(&self) -> HermExpr {
        self.scale(-1.0)
    }

    /// Same coordinates over a relabeled spec of equal shape.
    pub fn relabel(&self, map: &[(&str, &str)]) -> Result<HermExpr> {
        Ok(HermExpr { spec: self.spec.relabeled(map)?, cols: self.cols.clone(), cst: self.cst.clone() })
    }

    /// Applies a Hermiticity-preserving linear map.
    pub fn map(&self, m: &impl UnitMap) -> HermExpr {
        let d = self.dim();
        let out_spec = m.out_spec().clone();
        let mut acc = Accumulator::new(out_spec.total_dim());
        let mut buf = Vec::new();
        let mut apply = |col: &[(u32, f64)], acc: &mut Accumulator| {
            for &(k, v) in col {
                let (units, n) = basis_units(d, k as usize);
                for &(i, j, c) in &units[..n] {
                    buf.clear();
                    m.unit(i, j, &mut buf);
                    for &(r, s, w) in &buf {
                        acc.add_entry(r, s, w * c * v);
                    }
                }
            }
        };
        let mut cols = Vec::with_capacity(self.cols.len());
        for (j, col) in &self.cols {
            apply(col, &mut acc);
            let c = acc.drain();
            if !c.is_empty() {
                cols.push((*j, c));
            }
        }
        let cst_sparse: Column = self.cst.iter().enumerate().filter(|(_, v)| **v != 0.0).map(|(k, v)| (k as u32, *v)).collect();
        apply(&cst_sparse, &mut acc);
        let mut cst = vec![0.0; out_spec.total_dim() * out_spec.total_dim()];
        for (k, v) in acc.drain() {
            cst[k as usize] = v;
        }
        HermExpr { spec: out_spec, cols, cst }
    }

    pub fn partial_trace(&self, keep: &[&str]) -> Result<HermExpr> {
        let spec = &self.spec;
        let kept = spec.subset(keep)?;
        let kept_labels = kept.labels();
        let traced: Vec<&str> = spec.labels().into_iter().filter(|l| !kept_labels.contains(l)).collect();
        let (ko, to) = (spec.offsets_for(&kept_labels)?, spec.offsets_for(&traced)?);
        // decode a flat index into (kept index, traced index)
        let n = spec.total_dim();
        let mut kidx = vec![0usize; n];
        let mut tidx = vec![0usize; n];
        for (a, &oa) in ko.iter().enumerate() {
            for (t, &ot) in to.iter().enumerate() {
                kidx[oa + ot] = a;
                tidx[oa + ot] = t;
            }
        }
        let map = FnMap::new(kept, move |i, j, out| {
            if tidx[i] == tidx[j] {
                out.push((kidx[i], kidx[j], C64::new(1.0, 0.0)));
            }
        });
        Ok(self.map(&map))
    }

    pub fn trace_out(&self, drop: &[&str]) -> Result<HermExpr> {
        let kept = self.spec.without(drop)?;
        self.partial_trace(&kept.labels())
    }

    /// Scalar `Tr X`.
    pub fn trace(&self) -> HermExpr {
        self.partial_trace(&[]).expect("empty keep set")
    }

    pub fn partial_transpose(&self, subset: &[&str]) -> Result<HermExpr> {
        let spec = &self.spec;
        let sel = spec.subset(subset)?;
        let sel_labels = sel.labels();
        let rest: Vec<&str> = spec.labels().into_iter().filter(|l| !sel_labels.contains(l)).collect();
        let (so, ro) = (spec.offsets_for(&sel_labels)?, spec.offsets_for(&rest)?);
        let n = spec.total_dim();
        let mut sidx = vec![0usize; n];
        let mut rpart = vec![0usize; n];
        for &r in &ro {
            for &s in &so {
                sidx[r + s] = s;
                rpart[r + s] = r;
            }
        }
        let map = FnMap::new(spec.clone(), move |i, j, out| {
            out.push((rpart[i] + sidx[j], rpart[j] + sidx[i], C64::new(1.0, 0.0)));
        });
        Ok(self.map(&map))
    }

    pub fn permute(&self, order: &[&str]) -> Result<HermExpr> {
        let spec = self.spec.permuted(order)?;
        let p = self.spec.offsets_for(order)?;
        let mut inv = vec![0usize; p.len()];
        for (new, &old) in p.iter().enumerate() {
            inv[old] = new;
        }
        let map = FnMap::new(spec, move |i, j, out| out.push((inv[i], inv[j], C64::new(1.0, 0.0))));
        Ok(self.map(&map))
    }

    /// `self ⊗ C`.
    pub fn kron_const(&self, c: &LabeledMatrix) -> Result<HermExpr> {
        let spec = self.spec.concat(c.spec())?;
        let dc = c.dim();
        let entries: Vec<(usize, usize, C64)> = (0..dc)
            .flat_map(|r| (0..dc).map(move |s| (r, s)))
            .map(|(r, s)| (r, s, c.matrix()[(r, s)]))
            .filter(|e| e.2 != C64::new(0.0, 0.0))
            .collect();
        let map = FnMap::new(spec, move |i, j, out| {
            for &(r, s, v) in &entries {
                out.push((i * dc + r, j * dc + s, v));
            }
        });
        Ok(self.map(&map))
    }

    /// `C ⊗ self`.
    pub fn const_kron(c: &LabeledMatrix, e: &HermExpr) -> Result<HermExpr> {
        let spec = c.spec().concat(&e.spec)?;
        e.kron_const(c)?.permute(&spec.labels())
    }

    /// `self ⊗ I` on the factors of `target` missing here, permuted to `target`'s order.
    pub fn expand_to(&self, target: &DimSpec) -> Result<HermExpr> {
        for (l, d) in self.spec.factors() {
            if target.dim_of(l)? != *d {
                return Err(SolverError::Shape(format!("factor `{l}` has dimension {d} vs {}", target.dim_of(l)?)));
            }
        }
        let missing = target.without(&self.spec.labels())?;
        self.kron_const(&LabeledMatrix::identity(&missing))?.permute(&target.labels())
    }

    /// Link product `C ⋆ self` with a constant, contracting shared labels.
    /// The output lists `C`'s remaining factors, then this expression's.
    pub fn link_const(c: &LabeledMatrix, e: &HermExpr) -> Result<HermExpr> {
        let la = c.spec().labels();
        let lb = e.spec.labels();
        let shared: Vec<&str> = la.iter().copied().filter(|l| lb.contains(l)).collect();
        for l in &shared {
            if c.spec().dim_of(l)? != e.spec.dim_of(l)? {
                return Err(SolverError::Shape(format!("shared factor `{l}` differs in dimension")));
            }
        }
        let xa: Vec<&str> = la.iter().copied().filter(|l| !shared.contains(l)).collect();
        let yb: Vec<&str> = lb.iter().copied().filter(|l| !shared.contains(l)).collect();
        let a_order: Vec<&str> = xa.iter().chain(shared.iter()).copied().collect();
        let b_order: Vec<&str> = shared.iter().chain(yb.iter()).copied().collect();
        let cp = c.permute(&a_order)?;
        let eb = e.permute(&b_order)?;
        let dx = c.spec().dim_of_set(&xa)?;
        let dy = e.spec.dim_of_set(&yb)?;
        let ds = c.spec().dim_of_set(&shared)?;
        let out_spec = c.spec().subset(&xa)?.concat(&e.spec.subset(&yb)?)?;
        let cm = cp.matrix().clone();
        // X = E_{(s',y),(s,y')} maps to Σ_{x,x'} C[(x,s'),(x',s)] E_{(x,y),(x',y')}
        let map = FnMap::new(out_spec, move |i, j, out| {
            let (sp, y) = (i / dy, i % dy);
            let (s, yp) = (j / dy, j % dy);
            for x in 0..dx {
                for xp in 0..dx {
                    let v = cm[(x * ds + sp, xp * ds + s)];
                    if v.re != 0.0 || v.im != 0.0 {
                        out.push((x * dy + y, xp * dy + yp, v));
                    }
                }
            }
        });
        Ok(eb.map(&map))
    }

    /// Scalar `Tr[C · self]` for Hermitian `C` over the same spec.
    pub fn inner_const(&self, c: &LabeledMatrix) -> Result<HermExpr> {
        if c.spec() != &self.spec {
            return Err(SolverError::Shape(format!("inner product of {} with {}", c.spec(), self.spec)));
        }
        let w = inner_weights(c.matrix());
        let dot = |col: &[(u32, f64)]| col.iter().map(|&(k, v)| w[k as usize] * v).sum::<f64>();
        let cols = self.cols.iter().filter_map(|(j, col)| {
            let v = dot(col);
            (v != 0.0).then(|| (*j, vec![(0u32, v)]))
        });
        let cst: f64 = self.cst.iter().zip(&w).map(|(a, b)| a * b).sum();
        Ok(HermExpr { spec: DimSpec::scalar(), cols: cols.collect(), cst: vec![cst] })
    }

    /// Value at the real variable vector `x`.
    pub fn eval(&self, x: &[f64]) -> LabeledMatrix {
        let mut v = self.cst.clone();
        for (j, col) in &self.cols {
            for &(k, c) in col {
                v[k as usize] += c * x[*j];
            }
        }
        LabeledMatrix::new(self.spec.clone(), coords_to_matrix(self.dim(), &v)).expect("size")
    }
}

/// Coordinate weights `w` with `Tr[C H] = Σ_k w_k h_k`.
pub fn inner_weights(c: &CMatrix) -> Vec<f64> {
    let d = c.rows();
    let mut w = vec![0.0; d * d];
    for p in 0..d {
        w[p * d + p] = c[(p, p)].re;
        for q in p + 1..d {
            let z = (c[(p, q)] + c[(q, p)].conj()) * 0.5;
            w[p * d + q] = 2.0 * z.re;
            w[q * d + p] = 2.0 * z.im;
        }
    }
    w
}
