//! Plain-text dump of a real standard-form program, for debugging and
//! for feeding external solvers.

use std::fmt::Write;

use super::embed::{Cone, RealProgram};

/// Header line `n m`, a cone line, the objective, then one `i j a_ij`
/// triplet per nonzero and one `b i b_i` line per nonzero right-hand side.
pub fn dump_triplets(rp: &RealProgram) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{} {}", rp.n, rp.num_rows());
    let cones: Vec<String> = rp
        .cones()
        .iter()
        .map(|c| match c {
            Cone::Zero(m) => format!("z{m}"),
            Cone::Nonneg(m) => format!("l{m}"),
            Cone::Psd(k) => format!("s{k}"),
        })
        .collect();
    let _ = writeln!(out, "cones {}", cones.join(" "));
    let _ = writeln!(out, "c0 {:.17e}", rp.c0);
    for (j, c) in rp.c.iter().enumerate() {
        if *c != 0.0 {
            let _ = writeln!(out, "c {j} {c:.17e}");
        }
    }
    for (i, row) in rp.rows().enumerate() {
        for &(j, a) in &row.entries {
            let _ = writeln!(out, "{i} {j} {a:.17e}");
        }
        if row.b != 0.0 {
            let _ = writeln!(out, "b {i} {:.17e}", row.b);
        }
    }
    out
}
