//! Openness of invertibility under a rough perturbation.
//!
//! Starting from an invertible first-order bracket, pushes along a fixed
//! rough negative direction and tracks the smallest singular value of the
//! weighted operator matrix over a radius ladder, in two Sobolev orders.
//! The radius where invertibility degrades (the half-sigma crossing) must
//! agree across orders within a fixed factor, and the unperturbed operator
//! must have trivial kernel and cokernel with a clean spectral gap in
//! every probed space.

use std::sync::Arc;

use num_complex::Complex64;
use pdo_core::fredholm::{assemble, numerical_index, perturbation_probe, DEFAULT_RANK_TOL};
use pdo_core::grid::bracket;
use pdo_core::symbol::{SepTerm, Symbol, SymbolMeta};

use crate::corpus::{self, lacunary_profile};
use crate::registry::{RunContext, RunError};
use crate::report::{Case, ReportRecord};

const RADII: [f64; 6] = [0.2, 0.4, 0.6, 0.8, 1.0, 1.2];

/// The fixed rough direction: a negative multiple of the weight bracket
/// with a lacunary Hoelder-0.7 spatial profile.
fn rough_direction() -> Symbol {
    let rough = lacunary_profile(0.7, 2, 4);
    let profile = move |x: f64| -(0.7 + 0.5 * x.cos() + 0.5 * rough(x));
    let meta = SymbolMeta::new(1.0, 1.0, 0.0, 0, 0.7)
        .expect("valid class data")
        .with_budget(6);
    let pf = profile.clone();
    Symbol::scalar(meta, move |x, xi| Complex64::new(pf(x[0]) * bracket(xi), 0.0))
        .with_separable(vec![SepTerm {
            xfn: Arc::new(move |x: &[f64]| Complex64::new(profile(x[0]), 0.0)),
            xifn: Arc::new(|xi: &[f64]| Complex64::new(bracket(xi), 0.0)),
        }])
}

pub fn run(ctx: &RunContext) -> Result<Vec<ReportRecord>, RunError> {
    let grid = ctx.grid_or(1, 2.0 * std::f64::consts::PI, 128)?;
    let a = corpus::build_default("trig-bracket");
    let h = rough_direction();
    let specs = ctx.specs_or(&[(0.0, 2.0), (1.0, 2.0)])?;

    let mut records = Vec::new();

    // Unperturbed operator: trivial kernel, positive bottom singular
    // value, clean gap in every probed space.
    for spec in &specs {
        let id = format!("baseline-s{}-p{}", spec.s, spec.p);
        let mut case = Case::new("perturbation-openness", &id);
        let matrix =
            assemble(&grid, &a, spec).map_err(|e| RunError::new(&id, e.to_string()))?;
        let rep = numerical_index(&matrix, DEFAULT_RANK_TOL)
            .map_err(|e| RunError::new(&id, e.to_string()))?;
        case.info("sigma_min", rep.sigma_min);
        case.check_int("kernel_dim", rep.kernel_dim as i64, 0);
        case.check_int("cokernel_dim", rep.cokernel_dim as i64, 0);
        case.check_true("sigma_min_positive", rep.sigma_min > 0.0);
        case.check_ge("spectral_gap", rep.gap, "index_gap_floor");
        case.check_true("unflagged", !rep.flagged);
        records.push(case.finish());
    }

    // Perturbation curves and the cross-space radius band.
    let probe = perturbation_probe(&grid, &a, &h, &RADII, &specs)
        .map_err(|e| RunError::new("radius-sweep", e.to_string()))?;
    for curve in &probe.curves {
        let id = format!("radius-s{}-p{}", curve.spec.s, curve.spec.p);
        let mut case = Case::new("perturbation-openness", &id);
        case.info("sigma_at_zero", curve.sigma[0].1);
        case.info("sigma_at_max_radius", curve.sigma[curve.sigma.len() - 1].1);
        match curve.critical_radius {
            Some(r) => {
                case.info("critical_radius", r);
                case.check_true("crossing_interior", r > RADII[0] && r < RADII[RADII.len() - 1]);
            }
            None => {
                case.check_true("crossing_found", false);
            }
        }
        records.push(case.finish());
    }
    {
        let mut case = Case::new("perturbation-openness", "radius-band");
        match probe.radius_band {
            Some((lo, hi)) => {
                case.info("smallest_critical_radius", lo);
                case.info("largest_critical_radius", hi);
                case.check_le("radius_spread_factor", hi / lo, "perturbation_radius_factor");
            }
            None => {
                case.check_true("band_defined", false);
            }
        }
        records.push(case.finish());
    }

    Ok(records)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::report::Verdict;

    #[test]
    fn default_run_finds_an_interior_crossing_in_each_space() {
        let ctx = RunContext::for_scenario("perturbation-openness");
        let records = run(&ctx).unwrap();
        assert_eq!(records.len(), 5);
        for r in &records {
            assert_eq!(r.verdict, Verdict::Pass, "case {} failed", r.case);
        }
    }
}
