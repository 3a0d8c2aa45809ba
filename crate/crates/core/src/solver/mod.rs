//! Dense semidefinite programming over Hermitian PSD cones.
//!
//! A [`ConicProgram`] holds Hermitian-valued variable blocks, affine
//! equality constraints, linear matrix inequalities and a real objective.
//! [`embed_hermitian`] compiles it to a real standard form
//! `min c'x  s.t.  Ax + s = b,  s ∈ {0} × R₊ × S₊ × …`, which is solved by a
//! homogeneous self-dual interior-point method with Nesterov–Todd scaling
//! and Mehrotra predictor-corrector steps.

mod dump;
mod embed;
mod expr;
mod ipm;

use std::cell::RefCell;

use thiserror::Error;

use crate::tensor::{DimSpec, LabeledMatrix, TensorError};

pub use dump::dump_triplets;
pub use embed::{embed_hermitian, embed_hermitian_matrix, extract_hermitian_matrix, Cone, RealProgram};
pub use expr::{coords_to_matrix, hermitian_coords, inner_weights, FnMap, HermExpr, UnitMap};

pub const GAP_TOL: f64 = 1e-6;
pub const FEAS_TOL: f64 = 1e-7;
/// Gap target used by the measures on desk-scale programs.
pub const TIGHT_GAP_TOL: f64 = 1e-8;
pub const MAX_ITER: usize = 200;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolverError {
    #[error(transparent)]
    Tensor(#[from] TensorError),
    #[error("shape error: {0}")]
    Shape(String),
    #[error("ill-posed program: {0}")]
    IllPosed(String),
}

pub type Result<T> = std::result::Result<T, SolverError>;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sense {
    Minimize,
    Maximize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BlockKind {
    HermitianPsd,
    FreeHermitian,
    NonnegScalar,
}

#[derive(Clone, Debug, PartialEq)]
pub struct VarBlock {
    pub name: String,
    pub kind: BlockKind,
    pub spec: DimSpec,
    pub offset: usize,
}

impl VarBlock {
    pub fn len(&self) -> usize {
        let d = self.spec.total_dim();
        d * d
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct VarId(pub usize);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ConstraintId(pub usize);

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConstraintKind {
    /// Expression equals zero.
    Equal,
    /// Expression is PSD.
    Psd,
    /// Scalar expression is nonnegative.
    Nonneg,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Constraint {
    pub name: String,
    pub kind: ConstraintKind,
    pub expr: HermExpr,
}

/// Semidefinite program over Hermitian variable blocks.
#[derive(Clone, Debug, PartialEq)]
pub struct ConicProgram {
    sense: Sense,
    blocks: Vec<VarBlock>,
    constraints: Vec<Constraint>,
    objective: HermExpr,
    num_vars: usize,
}

impl ConicProgram {
    pub fn new(sense: Sense) -> Self {
        Self { sense, blocks: Vec::new(), constraints: Vec::new(), objective: HermExpr::scalar(0.0), num_vars: 0 }
    }

    fn add_block(&mut self, name: &str, kind: BlockKind, spec: DimSpec) -> VarId {
        let b = VarBlock { name: name.to_string(), kind, spec, offset: self.num_vars };
        self.num_vars += b.len();
        self.blocks.push(b);
        VarId(self.blocks.len() - 1)
    }

    /// Hermitian PSD matrix variable.
    pub fn psd(&mut self, name: &str, spec: &DimSpec) -> VarId {
        self.add_block(name, BlockKind::HermitianPsd, spec.clone())
    }

    /// Unconstrained Hermitian matrix variable.
    pub fn free_hermitian(&mut self, name: &str, spec: &DimSpec) -> VarId {
        self.add_block(name, BlockKind::FreeHermitian, spec.clone())
    }

    /// Real scalar variable.
    pub fn free_scalar(&mut self, name: &str) -> VarId {
        self.add_block(name, BlockKind::FreeHermitian, DimSpec::scalar())
    }

    pub fn nonneg_scalar(&mut self, name: &str) -> VarId {
        self.add_block(name, BlockKind::NonnegScalar, DimSpec::scalar())
    }

    pub fn var(&self, id: VarId) -> HermExpr {
        let b = &self.blocks[id.0];
        HermExpr::variable(&b.spec, b.offset)
    }

    fn push(&mut self, name: &str, kind: ConstraintKind, expr: HermExpr) -> ConstraintId {
        self.constraints.push(Constraint { name: name.to_string(), kind, expr });
        ConstraintId(self.constraints.len() - 1)
    }

    /// `expr = 0`, one real equation per Hermitian coordinate.
    pub fn equal(&mut self, name: &str, expr: HermExpr) -> ConstraintId {
        self.push(name, ConstraintKind::Equal, expr)
    }

    /// `expr ⪰ 0` (linear matrix inequality).
    pub fn psd_constraint(&mut self, name: &str, expr: HermExpr) -> ConstraintId {
        self.push(name, ConstraintKind::Psd, expr)
    }

    /// Scalar `expr ≥ 0`.
    pub fn nonneg(&mut self, name: &str, expr: HermExpr) -> Result<ConstraintId> {
        if !expr.is_scalar() {
            return Err(SolverError::Shape(format!("`{name}`: nonnegativity needs a scalar expression")));
        }
        Ok(self.push(name, ConstraintKind::Nonneg, expr))
    }

    pub fn set_objective(&mut self, expr: HermExpr) -> Result<()> {
        if !expr.is_scalar() {
            return Err(SolverError::Shape("objective must be scalar".into()));
        }
        self.objective = expr;
        Ok(())
    }

    pub fn sense(&self) -> Sense {
        self.sense
    }

    pub fn blocks(&self) -> &[VarBlock] {
        &self.blocks
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn objective(&self) -> &HermExpr {
        &self.objective
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    /// Checks dimensions and variable references before solving.
    pub fn validate(&self) -> Result<()> {
        if self.blocks.is_empty() {
            return Err(SolverError::IllPosed("program has no variables".into()));
        }
        let check = |e: &HermExpr, what: &str| -> Result<()> {
            if let Some(j) = e.max_var() {
                if j >= self.num_vars {
                    return Err(SolverError::IllPosed(format!("{what} references variable {j} of {}", self.num_vars)));
                }
            }
            Ok(())
        };
        check(&self.objective, "objective")?;
        for c in &self.constraints {
            check(&c.expr, &c.name)?;
        }
        Ok(())
    }

    /// Variable values from a real coordinate vector.
    pub fn block_values(&self, x: &[f64]) -> Vec<LabeledMatrix> {
        self.blocks
            .iter()
            .map(|b| {
                let d = b.spec.total_dim();
                let m = coords_to_matrix(d, &x[b.offset..b.offset + b.len()]);
                LabeledMatrix::new(b.spec.clone(), m).expect("size")
            })
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Optimal,
    Infeasible,
    Unbounded,
    MaxIter,
}

impl std::fmt::Display for Status {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Status::Optimal => "optimal",
            Status::Infeasible => "infeasible",
            Status::Unbounded => "unbounded",
            Status::MaxIter => "max_iter",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolveOptions {
    pub gap_tol: f64,
    pub feas_tol: f64,
    pub max_iter: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self { gap_tol: GAP_TOL, feas_tol: FEAS_TOL, max_iter: MAX_ITER }
    }
}

impl SolveOptions {
    pub fn tight() -> Self {
        Self { gap_tol: TIGHT_GAP_TOL, ..Self::default() }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Solution {
    pub status: Status,
    /// Objective at the primal iterate, in the program's sense.
    pub primal_value: f64,
    /// Dual objective, in the program's sense.
    pub dual_value: f64,
    /// `|primal − dual| / max(1, |primal|)`.
    pub gap: f64,
    /// Relative primal residual `‖Ax + s − b‖∞ / (1 + ‖b‖∞)`.
    pub residual: f64,
    /// Relative dual residual `‖A'z + c‖∞ / (1 + ‖c‖∞)`.
    pub dual_residual: f64,
    pub iterations: usize,
    /// Variable blocks in declaration order.
    pub blocks: Vec<LabeledMatrix>,
    /// Multipliers of PSD constraints (and PSD variable blocks are not
    /// included), as Hermitian matrices; `None` for other kinds.
    pub constraint_duals: Vec<Option<LabeledMatrix>>,
    pub message: String,
}

impl Solution {
    pub fn value(&self, id: VarId) -> &LabeledMatrix {
        &self.blocks[id.0]
    }

    pub fn scalar(&self, id: VarId) -> f64 {
        self.blocks[id.0].matrix()[(0, 0)].re
    }

    pub fn is_optimal(&self) -> bool {
        self.status == Status::Optimal
    }
}

/// One record per solve, kept for certification reports.
#[derive(Clone, Debug, PartialEq)]
pub struct AuditEntry {
    pub status: Status,
    pub gap: f64,
    pub residual: f64,
    pub dual_residual: f64,
    pub iterations: usize,
}

thread_local! {
    static AUDIT: RefCell<Vec<AuditEntry>> = const { RefCell::new(Vec::new()) };
}

fn audit_push(s: &Solution) {
    AUDIT.with(|a| {
        a.borrow_mut().push(AuditEntry {
            status: s.status,
            gap: s.gap,
            residual: s.residual,
            dual_residual: s.dual_residual,
            iterations: s.iterations,
        })
    });
}

/// Returns and clears this thread's solve records.
pub fn audit_take() -> Vec<AuditEntry> {
    AUDIT.with(|a| std::mem::take(&mut *a.borrow_mut()))
}

pub fn solve(p: &ConicProgram) -> Result<Solution> {
    solve_with(p, &SolveOptions::default())
}

pub fn solve_with(p: &ConicProgram, opts: &SolveOptions) -> Result<Solution> {
    p.validate()?;
    let real = embed_hermitian(p)?;
    let r = ipm::solve_real(&real, opts);
    let sol = real.lift(p, &r);
    audit_push(&sol);
    Ok(sol)
}

/// Outcome of [`feasibility`].
#[derive(Clone, Debug, PartialEq)]
pub struct Feasibility {
    pub feasible: bool,
    /// Largest uniform margin `t` with every cone constraint satisfied after
    /// shifting by `t·I` (capped at 1); `-inf` when the equalities are inconsistent.
    pub margin: f64,
    /// The margin program's solution (a feasible point when `feasible`).
    pub solution: Solution,
}

/// Decides feasibility of `p` (its objective is ignored) by maximizing a
/// uniform cone margin `t ≤ 1`; feasible iff `t* ≥ −feas_tol`.
pub fn feasibility(p: &ConicProgram) -> Result<Feasibility> {
    feasibility_with(p, &SolveOptions { gap_tol: 1e-9, ..SolveOptions::default() })
}

pub fn feasibility_with(p: &ConicProgram, opts: &SolveOptions) -> Result<Feasibility> {
    p.validate()?;
    let real = embed_hermitian(p)?.with_margin();
    let r = ipm::solve_real(&real, opts);
    let solution = real.lift(p, &r);
    audit_push(&solution);
    let margin = match solution.status {
        Status::Infeasible => f64::NEG_INFINITY,
        _ => r.x.last().copied().unwrap_or(f64::NAN),
    };
    // A margin program is always strictly feasible unless the equalities are
    // inconsistent; a non-optimal end still yields a valid lower bound.
    let feasible = solution.status != Status::Infeasible && margin >= -opts.feas_tol && solution.residual <= opts.feas_tol;
    Ok(Feasibility { feasible, margin, solution })
}

#[cfg(test)]
mod tests;
