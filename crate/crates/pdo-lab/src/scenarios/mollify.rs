//! Mollification convergence rates on rough symbols.
//!
//! Smoothing a rough symbol at scale `eps` and measuring the distance to
//! the original in a weaker norm must produce a strictly decreasing error
//! sequence whose log-log slope matches the regularity gap between the
//! symbol class and the measuring norm.

use pdo_core::calculus::{mollify_convergence, MollifiedSymbol, MollifierFamily};
use pdo_core::seminorm::nonsmooth_seminorm;
use pdo_core::symbol::DiffSymbol;

use crate::corpus;
use crate::registry::{RunContext, RunError};
use crate::report::{Case, ReportRecord};
use crate::scenarios::log_slope;

pub fn run(ctx: &RunContext) -> Result<Vec<ReportRecord>, RunError> {
    let grid = ctx.grid_or(1, std::f64::consts::PI, 2048)?;
    let mut records = Vec::new();

    // Distance in the order-2 class seminorm with Hoelder target C^{0,0.3}
    // for a symbol whose x-profile lies in C^{1,0.7}: the regularity gap
    // 1 + 0.7 - 0.3 drives the decay, so the sequence must fall fast.
    {
        let id = "rough-seminorm-decay";
        let mut case = Case::new("mollify-convergence", id);
        let base = corpus::build_default("one-rough-bracket");
        let exponents = 2..=8u32;
        let eps: Vec<f64> = exponents.clone().map(|k| 0.5f64.powi(k as i32)).collect();
        let mut values = Vec::with_capacity(eps.len());
        for (&e, k) in eps.iter().zip(exponents) {
            let moll = MollifiedSymbol::new(&base, MollifierFamily::Gaussian, e)
                .map_err(|err| RunError::new(id, err.to_string()))?;
            let diff = DiffSymbol { a: &base, b: &moll };
            let rep = nonsmooth_seminorm(&grid, &diff, 2, (0, 0.3))
                .map_err(|err| RunError::new(id, err.to_string()))?;
            case.info(&format!("seminorm_at_2^-{k}"), rep.value);
            values.push(rep.value);
        }
        let decreasing = values.windows(2).all(|w| w[1] < w[0]);
        case.check_true("seminorm_strictly_decreasing", decreasing);
        case.check_le(
            "final_over_initial",
            values[values.len() - 1] / values[0],
            "mollify_final_over_initial",
        );
        case.check_ge("log_log_slope", log_slope(&eps, &values), "mollify_slope_floor");
        records.push(case.finish());
    }

    // Weighted sup-distance route: the fitted rate must match the declared
    // Hoelder exponent of a lacunary rough bracket.
    {
        let id = "sup-rate-trig-lacunary";
        let mut case = Case::new("mollify-convergence", id);
        let tau = 0.8;
        let base = corpus::build_with("rough-bracket", &[("tau", tau), ("terms", 7.0)])
            .map_err(|e| RunError::new(id, e.to_string()))?;
        let eps: Vec<f64> = (2..=6).map(|k| 0.5f64.powi(k)).collect();
        let rep = mollify_convergence(&grid, &base, MollifierFamily::Gaussian, &eps)
            .map_err(|e| RunError::new(id, e.to_string()))?;
        for (e, err) in rep.eps.iter().zip(&rep.errors) {
            case.info(&format!("sup_distance_at_{e}"), *err);
        }
        case.info("declared_exponent", tau);
        case.check_true("sup_strictly_decreasing", rep.strictly_decreasing);
        case.check_le("slope_mismatch", (rep.slope - tau).abs(), "mollify_sup_slope_band");
        records.push(case.finish());
    }

    Ok(records)
}
