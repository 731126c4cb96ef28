//! Composition expansion order checks.
//!
//! Truncating the composition expansion at order `k` and comparing
//! `op(a1 # a2) u` against `op(a1) op(a2) u` must produce errors that
//! shrink as `k` grows; when the expansion terminates, later errors sit at
//! the roundoff floor instead.

use num_complex::Complex64;
use pdo_core::calculus::{compose_expansion, quantize};
use pdo_core::grid::SampledField;
use pdo_core::symbol::Symbol;

use crate::corpus;
use crate::registry::{RunContext, RunError};
use crate::report::{Case, ReportRecord};
use crate::scenarios::rel_l2_diff;
use crate::tolerances;

pub fn run(ctx: &RunContext) -> Result<Vec<ReportRecord>, RunError> {
    let grid = ctx.grid_or(1, std::f64::consts::PI, 128)?;
    let floor = tolerances::require("composition_floor");
    let mut records = Vec::new();

    // Pair 1: first derivative against a trigonometric multiplier. The
    // expansion terminates after the first correction, so order three can
    // only match order two to roundoff.
    {
        let id = "derivative-times-multiplier";
        let mut case = Case::new("composition-order", id);
        let a1 = corpus::build_default("derivative");
        let a2 = corpus::build_with("trig-multiplier", &[("cos_amp", 0.0), ("sin2_amp", 1.0)])
            .map_err(|e| RunError::new(id, e.to_string()))?;
        let u = SampledField::from_fn(grid.clone(), |x| {
            Complex64::new((3.0 * x[0]).cos(), 0.0)
        });
        let e = order_errors(&grid, &a1, &a2, &u).map_err(|m| RunError::new(id, m))?;
        case.info("error_order_1", e[0]);
        case.info("error_order_2", e[1]);
        case.info("error_order_3", e[2]);
        case.check_true("order_1_to_2_decreases", e[1] < e[0]);
        case.check_true(
            "order_2_to_3_decreases_or_roundoff",
            e[2] < e[1] || (e[1] <= floor && e[2] <= floor),
        );
        case.check_le("order_2_error", e[1], "leibniz_truncation");
        records.push(case.finish());
    }

    // Pair 2: weight bracket against a trigonometric multiplier. All three
    // truncation errors are genuinely above roundoff and must decrease
    // strictly.
    {
        let id = "bracket-times-multiplier";
        let mut case = Case::new("composition-order", id);
        let a1 = corpus::build_default("bracket");
        let a2 = corpus::build_default("trig-multiplier");
        let u = SampledField::from_fn(grid.clone(), |x| {
            Complex64::new((7.0 * x[0]).cos(), (5.0 * x[0]).sin())
        });
        let e = order_errors(&grid, &a1, &a2, &u).map_err(|m| RunError::new(id, m))?;
        case.info("error_order_1", e[0]);
        case.info("error_order_2", e[1]);
        case.info("error_order_3", e[2]);
        case.check_true("order_1_to_2_decreases", e[1] < e[0]);
        case.check_true("order_2_to_3_decreases", e[2] < e[1]);
        records.push(case.finish());
    }

    Ok(records)
}

/// Relative errors of the order-k truncations, k = 1, 2, 3.
fn order_errors(
    grid: &pdo_core::grid::Grid,
    a1: &Symbol,
    a2: &Symbol,
    u: &SampledField,
) -> Result<[f64; 3], String> {
    let inner = quantize(grid, a2, u).map_err(|e| e.to_string())?;
    let exact = quantize(grid, a1, &inner).map_err(|e| e.to_string())?;
    let mut out = [0.0; 3];
    for (i, k) in (1..=3).enumerate() {
        let comp = compose_expansion(a1, a2, k).map_err(|e| e.to_string())?;
        let approx = quantize(grid, &comp, u).map_err(|e| e.to_string())?;
        out[i] = rel_l2_diff(&approx, &exact);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::report::Verdict;

    #[test]
    fn default_run_passes_both_pairs() {
        let ctx = RunContext::for_scenario("composition-order");
        let records = run(&ctx).unwrap();
        assert_eq!(records.len(), 2);
        for r in &records {
            assert_eq!(r.verdict, Verdict::Pass, "case {} failed", r.case);
        }
    }
}
