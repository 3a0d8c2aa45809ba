//! Semidefinite measures of NPT dynamical entanglement.
//!
//! Every quantity is built by a pure function in [`programs`] and solved
//! here. Results carry the optimal blocks, the gap and the program sizes.

mod cost;
mod family;
mod norms;
pub mod programs;

use std::time::Instant;

use thiserror::Error;

use crate::quantum::QuantumError;
use crate::solver::{dump_triplets, embed_hermitian, solve_with, ConicProgram, SolveOptions, Solution, SolverError, Status};
use crate::tensor::{LabeledMatrix, TensorError};

pub use cost::{cost_bounds_check, cost_bounds_check_with, exact_cost_single_shot, sandwich_slack, CostBounds, ExactCost, CostProbe, M_MAX, SQUARE_BUDGET};
pub use family::{conversion_distance_ppt, f_p, g_p};
pub use norms::{diamond_norm_hp, ln_max, ln_max0, ln_max1, ln_max_kind, ln_max_minimax, log_negativity, negativity, LnMax};
pub use programs::LnKind;

/// Agreement required between a primal program and its separate dual.
pub const AGREEMENT_TOL: f64 = 1e-5;
/// Programs whose largest Hermitian block is at most this size are solved
/// with the tight gap target.
pub const TIGHT_BLOCK_DIM: usize = 64;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MeasureError {
    #[error(transparent)]
    Quantum(#[from] QuantumError),
    #[error(transparent)]
    Tensor(#[from] TensorError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error("{what}: solver ended with status {status}: {message}")]
    NotOptimal { what: String, status: Status, message: String, dump: String },
    #[error("bound violated: {0}")]
    BoundViolation(String),
    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, MeasureError>;

/// Size of one program: real coordinates, constraints and largest Hermitian block.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub struct ProgramSize {
    pub variables: usize,
    pub constraints: usize,
    pub largest_block: usize,
}

impl ProgramSize {
    pub fn of(p: &ConicProgram) -> Self {
        let blocks = p.blocks().iter().map(|b| b.spec.total_dim());
        let cons = p.constraints().iter().map(|c| c.expr.spec().total_dim());
        ProgramSize { variables: p.num_vars(), constraints: p.constraints().len(), largest_block: blocks.chain(cons).max().unwrap_or(0) }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MeasureResult {
    pub value: f64,
    /// Objective of the primal program.
    pub primal_value: f64,
    /// Value of the separate dual program when one is solved, otherwise
    /// the solver's dual objective.
    pub dual_value: Option<f64>,
    /// Largest relative duality gap reported by the solver.
    pub gap: f64,
    /// Largest relative primal residual.
    pub residual: f64,
    /// Optimal blocks of the primal program.
    pub primal_certificate: Vec<LabeledMatrix>,
    /// Optimal blocks of the dual program, otherwise the constraint multipliers.
    pub dual_certificate: Option<Vec<LabeledMatrix>>,
    pub sizes: Vec<ProgramSize>,
    pub seconds: f64,
    /// Set when the primal and dual values disagree beyond [`AGREEMENT_TOL`].
    pub flag: Option<String>,
}

impl MeasureResult {
    pub(crate) fn from_primal(value: f64, s: Solved) -> Self {
        MeasureResult {
            value,
            primal_value: s.solution.primal_value,
            dual_value: Some(s.solution.dual_value),
            gap: s.solution.gap,
            residual: s.solution.residual,
            primal_certificate: s.solution.blocks,
            dual_certificate: Some(s.solution.constraint_duals.into_iter().flatten().collect()),
            sizes: vec![s.size],
            seconds: s.seconds,
            flag: None,
        }
    }

    /// Attaches a separately solved dual; `disagreement` is measured on the
    /// reported scale.
    pub(crate) fn with_dual(mut self, d: Solved, disagreement: f64) -> Self {
        self.dual_value = Some(d.solution.primal_value);
        self.gap = self.gap.max(d.solution.gap);
        self.residual = self.residual.max(d.solution.residual);
        self.dual_certificate = Some(d.solution.blocks);
        self.sizes.push(d.size);
        self.seconds += d.seconds;
        if !(disagreement <= AGREEMENT_TOL) {
            self.flag = Some(format!("primal and dual differ by {disagreement:.3e}"));
        }
        self
    }

    pub fn is_flagged(&self) -> bool {
        self.flag.is_some()
    }
}

pub(crate) struct Solved {
    pub solution: Solution,
    pub size: ProgramSize,
    pub seconds: f64,
}

pub(crate) fn options_for(size: &ProgramSize) -> SolveOptions {
    if size.largest_block <= TIGHT_BLOCK_DIM {
        SolveOptions::tight()
    } else {
        SolveOptions::default()
    }
}

/// Solves `p`, failing with a program dump unless the status is optimal.
pub(crate) fn run(what: &str, p: &ConicProgram) -> Result<Solved> {
    let size = ProgramSize::of(p);
    let start = Instant::now();
    let solution = solve_with(p, &options_for(&size))?;
    let seconds = start.elapsed().as_secs_f64();
    if !solution.is_optimal() {
        let dump = embed_hermitian(p).map(|rp| dump_triplets(&rp)).unwrap_or_default();
        return Err(MeasureError::NotOptimal { what: what.to_string(), status: solution.status, message: solution.message, dump });
    }
    Ok(Solved { solution, size, seconds })
}

#[cfg(test)]
mod tests;
