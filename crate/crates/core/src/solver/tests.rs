use super::*;
use crate::quantum::phi_plus_state;
use crate::tensor::{CMatrix, C64};

fn qubit() -> DimSpec {
    DimSpec::new([("A", 2)]).unwrap()
}

fn diag(spec: &DimSpec, v: &[f64]) -> LabeledMatrix {
    LabeledMatrix::new(spec.clone(), CMatrix::diag(v)).unwrap()
}

#[test]
fn diagonal_program_reaches_largest_weight() {
    let spec = qubit();
    let mut p = ConicProgram::new(Sense::Maximize);
    let x = p.psd("X", &spec);
    p.equal("tr", p.var(x).trace().sub(&HermExpr::scalar(1.0)).unwrap());
    p.set_objective(p.var(x).inner_const(&diag(&spec, &[1.0, 2.0])).unwrap()).unwrap();
    let s = solve(&p).unwrap();
    assert!(s.is_optimal(), "{s:?}");
    assert!((s.primal_value - 2.0).abs() < 1e-6);
    assert!((s.dual_value - 2.0).abs() < 1e-6);
    let xv = s.value(x).matrix();
    assert!((xv[(1, 1)].re - 1.0).abs() < 1e-5);
}

#[test]
fn ppt_overlap_with_maximally_entangled_state() {
    let phi = phi_plus_state(2);
    let spec = phi.spec().clone();
    let mut p = ConicProgram::new(Sense::Maximize);
    let r = p.psd("rho", &spec);
    p.equal("tr", p.var(r).trace().sub(&HermExpr::scalar(1.0)).unwrap());
    p.psd_constraint("ppt", p.var(r).partial_transpose(&["B1"]).unwrap());
    p.set_objective(p.var(r).inner_const(&phi).unwrap()).unwrap();
    let s = solve_with(&p, &SolveOptions::tight()).unwrap();
    assert!(s.is_optimal(), "{s:?}");
    assert!((s.primal_value - 0.5).abs() < 1e-7, "{}", s.primal_value);
    assert!(s.dual_value >= s.primal_value - 1e-7);
    let y = s.constraint_duals[1].as_ref().expect("psd dual");
    assert!(y.min_eigenvalue().unwrap() > -1e-7);
}

#[test]
fn largest_eigenvalue_epigraph() {
    let spec = DimSpec::new([("A", 3)]).unwrap();
    let m = CMatrix::from_fn(3, 3, |i, j| C64::new((i + j) as f64, i as f64 - j as f64)).hermitian_part();
    let lm = LabeledMatrix::new(spec.clone(), m).unwrap();
    let want = lm.eigenvalues().unwrap()[0];
    let mut p = ConicProgram::new(Sense::Minimize);
    let t = p.free_scalar("t");
    let ti = p.var(t).kron_const(&LabeledMatrix::identity(&spec)).unwrap();
    p.psd_constraint("epi", ti.sub_const(&lm).unwrap());
    p.set_objective(p.var(t)).unwrap();
    let s = solve(&p).unwrap();
    assert!(s.is_optimal());
    assert!((s.scalar(t) - want).abs() < 1e-6, "{} vs {want}", s.scalar(t));
}

fn trace_program(value: f64) -> ConicProgram {
    let mut p = ConicProgram::new(Sense::Minimize);
    let x = p.psd("X", &qubit());
    p.equal("tr", p.var(x).trace().sub(&HermExpr::scalar(value)).unwrap());
    p
}

#[test]
fn feasibility_of_trace_constraints() {
    let f = feasibility(&trace_program(1.0)).unwrap();
    assert!(f.feasible);
    assert!(f.margin > 0.4, "{}", f.margin);
    let f = feasibility(&trace_program(-1.0)).unwrap();
    assert!(!f.feasible);
    assert!(f.margin < -0.4, "{}", f.margin);
}

#[test]
fn infeasible_program_reports_status() {
    let s = solve(&trace_program(-1.0)).unwrap();
    assert_eq!(s.status, Status::Infeasible);
}

#[test]
fn inconsistent_equalities_are_infeasible() {
    let mut p = trace_program(1.0);
    let x = VarId(0);
    p.equal("tr2", p.var(x).trace().sub(&HermExpr::scalar(2.0)).unwrap());
    // Duplicate of the first row, which presolve must drop.
    p.equal("tr3", p.var(x).trace().sub(&HermExpr::scalar(1.0)).unwrap());
    assert_eq!(solve(&p).unwrap().status, Status::Infeasible);
    let f = feasibility(&p).unwrap();
    assert!(!f.feasible);
}

#[test]
fn redundant_equalities_are_dropped() {
    let mut p = trace_program(1.0);
    let x = VarId(0);
    p.equal("again", p.var(x).trace().scale(2.0).sub(&HermExpr::scalar(2.0)).unwrap());
    p.set_objective(p.var(x).inner_const(&diag(&qubit(), &[3.0, 1.0])).unwrap()).unwrap();
    let s = solve(&p).unwrap();
    assert!(s.is_optimal());
    assert!((s.primal_value - 1.0).abs() < 1e-6);
}

#[test]
fn unbounded_program_reports_status() {
    let mut p = ConicProgram::new(Sense::Maximize);
    let x = p.psd("X", &qubit());
    p.set_objective(p.var(x).trace()).unwrap();
    assert_eq!(solve(&p).unwrap().status, Status::Unbounded);
}

#[test]
fn nonneg_scalars_and_lp_rows() {
    // max a + 2b  s.t.  a + b ≤ 1,  a, b ≥ 0.
    let mut p = ConicProgram::new(Sense::Maximize);
    let a = p.nonneg_scalar("a");
    let b = p.nonneg_scalar("b");
    let sum = p.var(a).add(&p.var(b)).unwrap();
    p.nonneg("cap", HermExpr::scalar(1.0).sub(&sum).unwrap()).unwrap();
    p.set_objective(p.var(a).add(&p.var(b).scale(2.0)).unwrap()).unwrap();
    let s = solve(&p).unwrap();
    assert!(s.is_optimal());
    assert!((s.primal_value - 2.0).abs() < 1e-6);
    assert!(s.scalar(a).abs() < 1e-5);
}

#[test]
fn audit_records_each_solve() {
    let _ = audit_take();
    let _ = solve(&trace_program(1.0)).unwrap();
    let _ = feasibility(&trace_program(1.0)).unwrap();
    let a = audit_take();
    assert_eq!(a.len(), 2);
    assert!(audit_take().is_empty());
}

#[test]
fn dump_lists_cones_and_rows() {
    let rp = embed_hermitian(&trace_program(1.0)).unwrap();
    let text = dump_triplets(&rp);
    assert!(text.starts_with("4 11\ncones z1 s4\n"), "{text}");
}
