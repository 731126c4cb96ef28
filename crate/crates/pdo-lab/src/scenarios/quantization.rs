//! Quantization identities on exactly representable inputs.
//!
//! Checks the lattice quantization rule against closed-form answers: the
//! constant symbol `1` acts as the identity, the symbol `i xi` maps `sin`
//! to `cos` exactly, and the weight multipliers `<D>^s <D>^{-s}` compose to
//! the identity for several orders `s`.

use num_complex::Complex64;
use pdo_core::calculus::quantize;
use pdo_core::grid::{bessel_multiplier, SampledField};

use crate::corpus;
use crate::registry::{RunContext, RunError};
use crate::report::{Case, ReportRecord};
use crate::scenarios::{rel_l2_diff, trig_probe};

const BESSEL_ORDERS: [f64; 5] = [-2.0, -1.0, 0.5, 1.0, 3.0];

pub fn run(ctx: &RunContext) -> Result<Vec<ReportRecord>, RunError> {
    let grid = ctx.grid_or(1, std::f64::consts::PI, 256)?;
    let mut records = Vec::new();

    // Constant symbol: op(1) u = u to relative roundoff.
    {
        let mut case = Case::new("quantization-anchors", "identity-field");
        let sym = corpus::build_default("identity");
        let u = trig_probe(&grid);
        let v = quantize(&grid, &sym, &u)
            .map_err(|e| RunError::new("identity-field", e.to_string()))?;
        case.check_le("identity_relative_error", rel_l2_diff(&v, &u), "identity_relative");
        records.push(case.finish());
    }

    // First-derivative symbol: op(i xi) sin = cos on the lattice.
    {
        let mut case = Case::new("quantization-anchors", "spectral-derivative");
        let sym = corpus::build_default("derivative");
        let u = SampledField::from_fn(grid.clone(), |x| Complex64::new(x[0].sin(), 0.0));
        let want = SampledField::from_fn(grid.clone(), |x| Complex64::new(x[0].cos(), 0.0));
        let v = quantize(&grid, &sym, &u)
            .map_err(|e| RunError::new("spectral-derivative", e.to_string()))?;
        case.check_le(
            "derivative_l2_error",
            super::abs_l2_diff(&v, &want),
            "derivative_absolute",
        );
        records.push(case.finish());
    }

    // Weight multipliers: <D>^s then <D>^{-s} returns the input.
    for s in BESSEL_ORDERS {
        let id = format!("bessel-roundtrip-s{s}");
        let mut case = Case::new("quantization-anchors", &id);
        let u = trig_probe(&grid);
        let up = bessel_multiplier(&grid, u.plane(0), s)
            .map_err(|e| RunError::new(&id, e.to_string()))?;
        let back = bessel_multiplier(&grid, &up, -s)
            .map_err(|e| RunError::new(&id, e.to_string()))?;
        let got = SampledField::scalar(grid.clone(), back)
            .map_err(|e| RunError::new(&id, e.to_string()))?;
        case.info("order", s);
        case.check_le("roundtrip_relative_error", rel_l2_diff(&got, &u), "bessel_roundtrip");
        records.push(case.finish());
    }

    Ok(records)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::report::Verdict;

    #[test]
    fn default_run_passes_all_anchor_cases() {
        let ctx = RunContext::for_scenario("quantization-anchors");
        let records = run(&ctx).unwrap();
        assert_eq!(records.len(), 7);
        for r in &records {
            assert_eq!(r.verdict, Verdict::Pass, "case {} failed", r.case);
        }
    }
}
