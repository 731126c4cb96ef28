//! Smooth/rough splitting of symbols.
//!
//! Splits a symbol into a band-adapted low-pass part and the remainder,
//! checks the split reconstructs the original to floating-point accuracy
//! across the corpus, and verifies the remainder decays across dyadic
//! frequency bands at the rate predicted from the declared regularity.

use pdo_core::calculus::{symbol_smoothing, SmoothedSymbol};
use pdo_core::symbol::{xi_panel, SliceSymbol};

use crate::corpus;
use crate::registry::{RunContext, RunError};
use crate::report::{Case, ReportRecord};

const GAMMA: f64 = 0.75;

const SPLIT_SYMBOLS: [(&str, &[(&str, f64)]); 6] = [
    ("bracket", &[]),
    ("identity", &[]),
    ("jordan-block", &[]),
    ("one-rough-bracket", &[]),
    ("rough-bracket", &[]),
    ("trig-bracket", &[]),
];

pub fn run(ctx: &RunContext) -> Result<Vec<ReportRecord>, RunError> {
    let grid = ctx.grid_or(1, std::f64::consts::PI, 2048)?;
    let mut records = Vec::new();

    // Reconstruction: the low-pass part plus the remainder must reproduce
    // the symbol samples up to roundoff, uniformly over a frequency panel.
    for (name, sym) in ctx.symbols_or(&SPLIT_SYMBOLS)? {
        let id = format!("split-{name}");
        let mut case = Case::new("smoothing-split", &id);
        let sharp = SmoothedSymbol::new(&grid, &sym, GAMMA)
            .map_err(|e| RunError::new(&id, e.to_string()))?;
        let l = sym.meta().l;
        let mut worst = 0.0f64;
        let mut scale = 0.0f64;
        for &idx in xi_panel(&grid, 0).iter().step_by(7) {
            for row in 0..l {
                for col in 0..l {
                    let b = sym
                        .slice(&grid, idx, row, col)
                        .map_err(|e| RunError::new(&id, e.to_string()))?;
                    let s = sharp
                        .slice(&grid, idx, row, col)
                        .map_err(|e| RunError::new(&id, e.to_string()))?;
                    for (bi, si) in b.iter().zip(&s) {
                        let rough = bi - si;
                        worst = worst.max((bi - (si + rough)).norm());
                        scale = scale.max(bi.norm());
                    }
                }
            }
        }
        case.info("sample_scale", scale);
        case.check_le("split_reconstruction_error", worst / (1.0 + scale), "split_reconstruction");
        records.push(case.finish());
    }

    // Band decay of the remainder for a rough bracket: fitted exponent
    // against the prediction from the declared class parameters.
    {
        let id = "rough-band-decay";
        let mut case = Case::new("smoothing-split", id);
        let sym = corpus::build_default("rough-bracket");
        let (_, rep) = symbol_smoothing(&grid, &sym, GAMMA)
            .map_err(|e| RunError::new(id, e.to_string()))?;
        for (j, sup) in &rep.band_sup {
            case.info(&format!("rough_sup_band_{j}"), *sup);
        }
        case.info("fitted_exponent", rep.fitted_exponent);
        case.info("predicted_exponent", rep.predicted_exponent);
        case.info("prediction_slack", rep.eps_tilde);
        case.check_le(
            "exponent_mismatch",
            (rep.fitted_exponent - rep.predicted_exponent).abs(),
            "smoothing_exponent_band",
        );
        records.push(case.finish());
    }

    Ok(records)
}
