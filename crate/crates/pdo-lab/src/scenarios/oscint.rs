//! Cross-validation of the two oscillatory-integral routes.
//!
//! The damped-cutoff route (Gaussian damping plus extrapolation in the
//! damping parameter) and the regularized route (integration by parts in
//! both variables) must agree on amplitudes with known closed forms, and
//! the regularized route must not depend on the order pair used.

use num_complex::Complex64;
use pdo_core::oscint::{default_eps_sequence, osc_cutoff, osc_parts, Amplitude, Cutoff, RegularizerOrder};

use crate::registry::{RunContext, RunError};
use crate::report::{Case, ReportRecord};

/// `a(y, eta) = exp(-y^2 - eta^2)`; the oscillatory pairing equals
/// `1/sqrt(5)` in closed form.
fn gaussian_pair() -> Amplitude {
    Amplitude::new(-2.0, -2.0, 8, 8, |y, eta| {
        Complex64::new((-y * y - eta * eta).exp(), 0.0)
    })
}

/// `a(y, eta) = g(eta)` with `g(eta) = 0.75 exp(-eta^2) cos(1 + 0.3 eta)`;
/// the pairing collapses to the point value `g(0)`.
fn delta_amplitude() -> Amplitude {
    Amplitude::new(-2.0, 0.0, 8, 8, |_, eta| {
        Complex64::new(0.75 * (-eta * eta).exp() * (1.0 + 0.3 * eta).cos(), 0.0)
    })
}

pub fn run(_ctx: &RunContext) -> Result<Vec<ReportRecord>, RunError> {
    let mut records = Vec::new();
    let eps = default_eps_sequence();

    // Route agreement on the Gaussian pair, plus the closed-form anchor.
    {
        let id = "gaussian-pair-routes";
        let mut case = Case::new("oscint-consistency", id);
        let amp = gaussian_pair();
        let cut = osc_cutoff(&amp, &Cutoff::TensorGaussian, &eps)
            .map_err(|e| RunError::new(id, e.to_string()))?;
        let parts = osc_parts(&amp, RegularizerOrder { l: 2, lp: 2 })
            .map_err(|e| RunError::new(id, e.to_string()))?;
        if !cut.converged {
            case.flag("cutoff_extrapolation");
        }
        if !parts.converged {
            case.flag("parts_quadrature");
        }
        let exact = 1.0 / 5.0f64.sqrt();
        let rel = (cut.value - parts.value).norm() / parts.value.norm().max(1e-300);
        case.info("cutoff_route_value", cut.value.re);
        case.info("parts_route_value", parts.value.re);
        case.info("closed_form_deviation", (cut.value.re - exact).abs());
        case.info("extrapolation_spread", cut.extrapolation_spread);
        case.check_le("route_relative_gap", rel, "osc_route_agreement");
        records.push(case.finish());
    }

    // Point-mass identity: both routes reproduce g(0).
    {
        let id = "delta-identity";
        let mut case = Case::new("oscint-consistency", id);
        let amp = delta_amplitude();
        let want = 0.75 * 1.0f64.cos();
        let cut = osc_cutoff(&amp, &Cutoff::TensorGaussian, &eps)
            .map_err(|e| RunError::new(id, e.to_string()))?;
        let parts = osc_parts(&amp, RegularizerOrder { l: 0, lp: 2 })
            .map_err(|e| RunError::new(id, e.to_string()))?;
        if !cut.converged {
            case.flag("cutoff_extrapolation");
        }
        case.info("point_value", want);
        case.check_le("cutoff_route_deviation", (cut.value.re - want).abs(), "osc_delta_deviation");
        case.check_le("cutoff_route_imag", cut.value.im.abs(), "osc_delta_deviation");
        case.check_le("parts_route_deviation", (parts.value.re - want).abs(), "osc_delta_deviation");
        records.push(case.finish());
    }

    // Order invariance of the regularized route on the Gaussian pair.
    {
        let id = "parts-order-invariance";
        let mut case = Case::new("oscint-consistency", id);
        let amp = gaussian_pair();
        let v22 = osc_parts(&amp, RegularizerOrder { l: 2, lp: 2 })
            .map_err(|e| RunError::new(id, e.to_string()))?;
        let v44 = osc_parts(&amp, RegularizerOrder { l: 4, lp: 4 })
            .map_err(|e| RunError::new(id, e.to_string()))?;
        let gap = (v22.value - v44.value).norm() / (1.0 + v22.value.norm());
        case.info("order_2_2_value", v22.value.re);
        case.info("order_4_4_value", v44.value.re);
        case.check_le("order_pair_gap", gap, "osc_parts_order_invariance");
        records.push(case.finish());
    }

    Ok(records)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::report::Verdict;

    #[test]
    fn default_run_passes_all_route_cases() {
        let ctx = RunContext::for_scenario("oscint-consistency");
        let records = run(&ctx).unwrap();
        assert_eq!(records.len(), 3);
        for r in &records {
            assert_eq!(r.verdict, Verdict::Pass, "case {} failed", r.case);
        }
    }
}
