//! Parametrix residual decay across frequency bands.
//!
//! For an elliptic symbol, applying the approximate inverse after the
//! operator to band-localized probe modes must leave a small residual at
//! the first probed band and residuals that do not grow at higher bands;
//! once the residual reaches the roundoff floor ordering is no longer
//! meaningful, so decay is only enforced above the floor.

use pdo_core::calculus::{build_parametrix, residual_profile};

use crate::registry::{RunContext, RunError};
use crate::report::{Case, ReportRecord};
use crate::tolerances;

const BANDS: [f64; 3] = [8.0, 16.0, 32.0];
const EXCISION_RADIUS: f64 = 4.0;
const ELLIPTICITY_MARGIN: f64 = 0.1;

pub fn run(ctx: &RunContext) -> Result<Vec<ReportRecord>, RunError> {
    let grid = ctx.grid_or(1, 4.0 * std::f64::consts::PI, 512)?;
    let floor = tolerances::require("parametrix_noise_floor");
    let defaults: [(&str, &[(&str, f64)]); 2] =
        [("trig-bracket", &[]), ("coupled-bracket", &[])];
    let mut records = Vec::new();

    for (name, sym) in ctx.symbols_or(&defaults)? {
        let id = format!("residual-{name}");
        let mut case = Case::new("parametrix-residual", &id);
        let q = build_parametrix(&grid, &sym, EXCISION_RADIUS, ELLIPTICITY_MARGIN)
            .map_err(|e| RunError::new(&id, e.to_string()))?;
        let profile = residual_profile(&grid, &sym, &q, &BANDS)
            .map_err(|e| RunError::new(&id, e.to_string()))?;
        for (r, v) in &profile {
            case.info(&format!("residual_band_{r}"), *v);
        }
        case.check_le("first_band_residual", profile[0].1, "parametrix_residual_ceiling");
        // Strict decay, except below the roundoff floor where an exact
        // inverse leaves nothing to order.
        let graded = profile
            .windows(2)
            .all(|w| w[1].1 < w[0].1 || (w[0].1 <= floor && w[1].1 <= floor));
        case.check_true("residual_graded_above_floor", graded);
        records.push(case.finish());
    }

    Ok(records)
}
