//! Randomized audit of the estimate library.
//!
//! Draws one hundred random fields — alternating smooth trigonometric
//! polynomials and rough lacunary profiles — and measures, for each, the
//! translate-difference ratio, the product (Leibniz) ratio, and all six
//! interpolation-inequality ratios against frozen ceilings calibrated once
//! from the seed-zero ensemble. Every case carries its own derived random
//! stream, so the corpus is reproducible case by case and stable under
//! any worker count.

use num_complex::Complex64;
use pdo_core::grid::Grid;
use pdo_core::spaces::{
    interpolation_suite, product_ratio, translate_diff_ratio, InterpolationParams,
};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::registry::{RunContext, RunError};
use crate::report::{Case, ReportRecord};
use crate::rng::case_rng;

pub const CASE_COUNT: usize = 100;

pub fn run(ctx: &RunContext) -> Result<Vec<ReportRecord>, RunError> {
    let grid = ctx.grid_or(1, 8.0, 256)?;
    (0..CASE_COUNT)
        .into_par_iter()
        .map(|i| run_case(ctx, &grid, i))
        .collect()
}

fn run_case(ctx: &RunContext, grid: &Grid, i: usize) -> Result<ReportRecord, RunError> {
    let id = format!("case-{i:03}");
    let mut case = Case::new("interpolation-suite", &id);
    let mut rng = case_rng(ctx.seed, "interpolation-suite", &id);
    let rough = i % 2 == 1;
    case.info("rough_family", if rough { 1.0 } else { 0.0 });

    let u = random_field(grid, &mut rng, rough);
    let g = random_field(grid, &mut rng, rough);

    // Translate-difference estimate.
    let tau = rng.gen_range(0.55..0.9);
    let t = rng.gen_range(0.2..tau - 0.25);
    let steps = rng.gen_range(1..=48usize);
    let m_shift = i % 2;
    case.info("shift_tau", tau);
    case.info("shift_t", t);
    case.info("shift_steps", steps as f64);
    let shift = translate_diff_ratio(grid, &u, steps, 0, m_shift, tau, t)
        .map_err(|e| RunError::new(&id, e.to_string()))?;
    case.check_le("translate_ratio", shift, "translate_ratio_ceiling");

    // Product (Leibniz) estimate.
    let m_prod = rng.gen_range(1..=2usize);
    let tau_prod = rng.gen_range(0.3..0.8);
    case.info("product_m", m_prod as f64);
    case.info("product_tau", tau_prod);
    let prod = product_ratio(grid, &u, &g, m_prod, tau_prod)
        .map_err(|e| RunError::new(&id, e.to_string()))?;
    case.check_le("product_ratio", prod, "product_ratio_ceiling");

    // The five interpolation estimates (six measured ratios).
    let m_tilde = rng.gen_range(2..=3usize);
    let params = InterpolationParams {
        m_tilde,
        tau: rng.gen_range(0.3..0.8),
        k: rng.gen_range(1..=m_tilde),
        s: rng.gen_range(0.25..0.75),
        r_ext: rng.gen_range(1.0..2.0),
    };
    case.info("interp_m", params.m_tilde as f64);
    case.info("interp_k", params.k as f64);
    let rep = interpolation_suite(grid, &u, &params)
        .map_err(|e| RunError::new(&id, e.to_string()))?;
    case.check_le("interp_global_ck", rep.global_ck, "interp_global_ck_ceiling");
    case.check_le("interp_exterior_ck", rep.exterior_ck, "interp_exterior_ck_ceiling");
    case.check_le("interp_exterior_holder", rep.exterior_holder, "interp_exterior_holder_ceiling");
    case.check_le("interp_landau", rep.landau, "interp_landau_ceiling");
    case.check_le(
        "interp_exterior_radius_sup",
        rep.exterior_radius_sup,
        "interp_exterior_radius_sup_ceiling",
    );
    case.check_le(
        "interp_exterior_radius_holder",
        rep.exterior_radius_holder,
        "interp_exterior_radius_holder_ceiling",
    );

    Ok(case.finish())
}

/// A random periodic field: a decaying full-spectrum trigonometric
/// polynomial (smooth family) or a lacunary octave sum (rough family),
/// plus a constant offset that keeps degenerate-norm guards away.
fn random_field(grid: &Grid, rng: &mut ChaCha8Rng, rough: bool) -> Vec<Complex64> {
    let omega = std::f64::consts::PI / grid.box_radius();
    let offset = rng.gen_range(0.5..1.5);
    let mut terms: Vec<(f64, f64, f64)> = Vec::new();
    if rough {
        let alpha = rng.gen_range(0.4..0.9);
        for j in 0..7u32 {
            let freq = 2.0f64.powi(j as i32) * omega;
            let amp = 2.0f64.powf(-alpha * j as f64);
            terms.push((amp, freq, rng.gen_range(0.0..std::f64::consts::TAU)));
        }
    } else {
        let scale = rng.gen_range(0.5..2.0);
        let decay = rng.gen_range(1.2..2.2);
        for k in 1..=24u32 {
            let amp = scale * (k as f64).powf(-decay);
            terms.push((amp, k as f64 * omega, rng.gen_range(0.0..std::f64::consts::TAU)));
        }
    }
    (0..grid.total_points())
        .map(|idx| {
            let x = grid.x_coord(idx)[0];
            let re: f64 =
                offset + terms.iter().map(|&(a, f, p)| a * (f * x + p).cos()).sum::<f64>();
            Complex64::new(re, 0.0)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::report::Verdict;

    #[test]
    fn corpus_is_deterministic_for_a_fixed_seed() {
        let ctx = RunContext::for_scenario("interpolation-suite");
        let grid = ctx.grid_or(1, 8.0, 256).unwrap();
        let a = run_case(&ctx, &grid, 3).unwrap();
        let b = run_case(&ctx, &grid, 3).unwrap();
        assert_eq!(a.quantities, b.quantities);
    }

    #[test]
    fn default_run_passes_every_randomized_case() {
        let ctx = RunContext::for_scenario("interpolation-suite");
        let records = run(&ctx).unwrap();
        assert_eq!(records.len(), CASE_COUNT);
        for r in &records {
            assert_eq!(r.verdict, Verdict::Pass, "case {} failed", r.case);
        }
    }
}
