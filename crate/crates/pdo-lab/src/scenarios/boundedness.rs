//! Operator-norm surrogates against class seminorms.
//!
//! Measures `||op(a) u||_{H^{s-m}} / ||u||_{H^s}` over a randomized probe
//! family for smooth and rough brackets, across orders `s` inside the
//! admissible window of the declared class, and checks the ratios against
//! frozen ceilings. The class seminorm of each symbol is recorded so the
//! ratio can be read as an effective operator-norm constant.

use pdo_core::calculus::{admissible_window, boundedness_probe, sobolev_probes};
use pdo_core::seminorm::nonsmooth_seminorm;
use pdo_core::symbol::SliceSymbol;
use rand::Rng;

use crate::registry::{RunContext, RunError};
use crate::report::{Case, ReportRecord};
use crate::rng::case_rng;

const PROBE_COUNT: usize = 6;

struct Family {
    name: &'static str,
    orders: &'static [f64],
    ceiling: &'static str,
}

const FAMILIES: [Family; 2] = [
    Family {
        name: "trig-bracket",
        orders: &[-1.0, 0.0, 1.0, 2.0],
        ceiling: "boundedness_ratio_ceiling_smooth",
    },
    Family {
        name: "rough-bracket",
        orders: &[-0.25, 0.0, 0.25],
        ceiling: "boundedness_ratio_ceiling_rough",
    },
];

pub fn run(ctx: &RunContext) -> Result<Vec<ReportRecord>, RunError> {
    let grid = ctx.grid_or(1, std::f64::consts::PI, 512)?;
    let band = grid.xi_max() * 0.5;
    let mut records = Vec::new();

    for family in &FAMILIES {
        let sym = crate::corpus::build_default(family.name);
        let meta = *sym.meta();
        let (lo, hi) = admissible_window(&meta, grid.dim(), 2.0);
        let seminorm = nonsmooth_seminorm(&grid, &sym, 2, (meta.m_tilde, meta.tau))
            .map_err(|e| RunError::new(family.name, e.to_string()))?
            .value;
        let seed: u64 = case_rng(ctx.seed, "boundedness-calibration", family.name).gen();
        let probes = sobolev_probes(&grid, PROBE_COUNT, band, seed)
            .map_err(|e| RunError::new(family.name, e.to_string()))?;

        let orders: Vec<f64> = if ctx.config.specs.is_empty() {
            family.orders.to_vec()
        } else {
            ctx.config.specs.iter().map(|sp| sp.s).collect()
        };
        for s in orders {
            let id = format!("{}-s{}", family.name, s);
            let mut case = Case::new("boundedness-calibration", &id);
            case.info("order", s);
            case.info("window_low", lo);
            case.info("window_high", hi);
            case.info("class_seminorm", seminorm);
            case.check_true("order_inside_window", s > lo && s < hi);
            let rep = boundedness_probe(&grid, &sym, s, &probes)
                .map_err(|e| RunError::new(&id, e.to_string()))?;
            let mean = rep.ratios.iter().sum::<f64>() / rep.ratios.len() as f64;
            case.info("mean_ratio", mean);
            case.check_le("max_ratio", rep.max_ratio, family.ceiling);
            records.push(case.finish());
        }
    }

    Ok(records)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::report::Verdict;

    #[test]
    fn default_run_passes_both_families() {
        let ctx = RunContext::for_scenario("boundedness-calibration");
        let records = run(&ctx).unwrap();
        assert_eq!(records.len(), 7);
        for r in &records {
            assert_eq!(r.verdict, Verdict::Pass, "case {} failed", r.case);
        }
    }
}
