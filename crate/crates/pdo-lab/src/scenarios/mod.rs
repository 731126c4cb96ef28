//! Scenario runner implementations.
//!
//! Each submodule exposes `run(&RunContext) -> Result<Vec<ReportRecord>,
//! RunError>`; the registry binds them to names, descriptions, and anchors.
//! Every asserted bound is resolved from the tolerance table by name.

pub mod boundedness;
pub mod composition;
pub mod index;
pub mod interpolation;
pub mod mollify;
pub mod oscint;
pub mod parametrix;
pub mod partition;
pub mod perturbation;
pub mod quantization;
pub mod smoothing;

use num_complex::Complex64;
use pdo_core::grid::SampledField;

/// `||got - want||_2 / max(||want||_2, floor)` on matching grids.
pub(crate) fn rel_l2_diff(got: &SampledField, want: &SampledField) -> f64 {
    abs_l2_diff(got, want) / want.l2_norm().max(1e-300)
}

/// Discrete `L^2` distance between two fields on the same grid.
pub(crate) fn abs_l2_diff(got: &SampledField, want: &SampledField) -> f64 {
    let h = got.grid.spacing().powi(got.grid.dim() as i32);
    let sum: f64 = got
        .data()
        .iter()
        .zip(want.data())
        .map(|(a, b)| (a - b).norm_sqr())
        .sum();
    (h * sum).sqrt()
}

/// Least-squares slope of `ln y` against `ln x`; requires positive data.
pub(crate) fn log_slope(xs: &[f64], ys: &[f64]) -> f64 {
    assert!(xs.len() == ys.len() && xs.len() >= 2);
    assert!(ys.iter().all(|&y| y > 0.0), "log-log fit needs positive values");
    let lx: Vec<f64> = xs.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let cov: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let var: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    cov / var
}

/// A deterministic mixed trigonometric probe field (periodic on any box
/// whose half-width is a multiple of pi).
pub(crate) fn trig_probe(grid: &pdo_core::grid::Grid) -> SampledField {
    SampledField::from_fn(grid.clone(), |x| {
        Complex64::new(
            0.4 + (3.0 * x[0]).cos() + 0.5 * x[0].sin(),
            0.3 * (2.0 * x[0]).sin(),
        )
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use pdo_core::grid::Grid;

    #[test]
    fn slope_of_a_pure_power_is_exact() {
        let xs = [0.25f64, 0.125, 0.0625];
        let ys: Vec<f64> = xs.iter().map(|x| 3.0 * x.powf(1.7)).collect();
        assert!((log_slope(&xs, &ys) - 1.7).abs() < 1e-12);
    }

    #[test]
    fn l2_distances_vanish_on_identical_fields() {
        let grid = Grid::new(1, std::f64::consts::PI, 32).unwrap();
        let u = trig_probe(&grid);
        assert_eq!(abs_l2_diff(&u, &u), 0.0);
        assert_eq!(rel_l2_diff(&u, &u), 0.0);
    }
}
