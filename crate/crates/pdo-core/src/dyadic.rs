//! Dyadic (Littlewood-Paley) partition of unity and smooth radial cutoffs.
//!
//! The base bump `phi_0` is radial with `phi_0 = 1` on `|xi| <= 1` and
//! `phi_0 = 0` on `|xi| >= 2`, glued on the transition annulus with the
//! `e^{-1/t}` smoothed step. The annuli
//! `phi_j(xi) = phi_0(2^{-j} xi) - phi_0(2^{-(j-1)} xi)` telescope:
//! `sum_{j=0}^{J} phi_j(xi) = phi_0(2^{-J} xi)`, which equals 1 for
//! `|xi| <= 2^J`.

use crate::error::{Error, Result};
use crate::grid::Grid;

/// `e^{-1/t}` for `t > 0`, else `0`; the building block of smooth glue.
fn decay(t: f64) -> f64 {
    if t > 0.0 {
        (-1.0 / t).exp()
    } else {
        0.0
    }
}

/// Smooth step: exactly `0` for `t <= 0`, exactly `1` for `t >= 1`,
/// strictly increasing in between.
pub fn smooth_step(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else if t >= 1.0 {
        1.0
    } else {
        let a = decay(t);
        a / (a + decay(1.0 - t))
    }
}

/// Radial plateau cutoff: `1` for `r <= 1`, `0` for `r >= 2`.
pub fn plateau(r: f64) -> f64 {
    1.0 - smooth_step(r.abs() - 1.0)
}

/// Excision profile: `0` for `t <= 1`, `1` for `t >= 2` (applied to scalar
/// arguments such as `R^{-2}(|x|^2 + |xi|^2)`).
pub fn excision(t: f64) -> f64 {
    smooth_step(t - 1.0)
}

/// `phi_0(xi)`: radial plateau of the partition.
pub fn phi0(xi: &[f64]) -> f64 {
    plateau(xi.iter().map(|t| t * t).sum::<f64>().sqrt())
}

/// Dyadic partition of unity on a frequency range covering `|xi| <= 2^{j_max + 1}`.
#[derive(Debug, Clone)]
pub struct DyadicPartition {
    j_max: usize,
}

impl DyadicPartition {
    pub fn new(j_max: usize) -> Self {
        Self { j_max }
    }

    /// Partition adapted to a grid: the largest `j` with `2^{j+1}` inside the
    /// resolvable frequency range.
    pub fn for_grid(grid: &Grid) -> Result<Self> {
        let j = grid.xi_max().log2().floor() as isize - 1;
        if j < 1 {
            return Err(Error::InvalidGrid(format!(
                "frequency range {:.3} too small for a dyadic partition",
                grid.xi_max()
            )));
        }
        Ok(Self { j_max: j as usize })
    }

    pub fn j_max(&self) -> usize {
        self.j_max
    }

    /// Radial profile of `phi_j`.
    pub fn phi_radial(&self, j: usize, r: f64) -> f64 {
        let r = r.abs();
        if j == 0 {
            plateau(r)
        } else {
            let scale = (2.0f64).powi(j as i32);
            plateau(r / scale) - plateau(2.0 * r / scale)
        }
    }

    /// `phi_j(xi)`.
    pub fn phi(&self, j: usize, xi: &[f64]) -> f64 {
        self.phi_radial(j, xi.iter().map(|t| t * t).sum::<f64>().sqrt())
    }

    /// `sum_{j=0}^{j_max} phi_j(xi)`; equals 1 for `|xi| <= 2^{j_max}`.
    pub fn partition_sum(&self, xi: &[f64]) -> f64 {
        (0..=self.j_max).map(|j| self.phi(j, xi)).sum()
    }

    /// Evaluate `phi_j` on the grid's frequency lattice (FFT order).
    pub fn eval_on_grid(&self, j: usize, grid: &Grid) -> Vec<f64> {
        (0..grid.total_points()).map(|m| self.phi(j, &grid.xi_coord(m))).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn step_endpoints_are_exact() {
        assert_eq!(smooth_step(-1.0), 0.0);
        assert_eq!(smooth_step(0.0), 0.0);
        assert_eq!(smooth_step(1.0), 1.0);
        assert_eq!(smooth_step(2.0), 1.0);
        let mid = smooth_step(0.5);
        assert!((mid - 0.5).abs() < 1e-15, "symmetry at the midpoint");
        // Non-decreasing throughout; strictly increasing away from the
        // endpoints (the C-infinity glue flattens below double precision
        // near t = 0 and t = 1).
        let mut prev = 0.0;
        for i in 1..100 {
            let v = smooth_step(i as f64 / 100.0);
            assert!(v >= prev);
            if (20..=80).contains(&i) {
                assert!(v > prev);
            }
            prev = v;
        }
    }

    #[test]
    fn phi0_plateau_and_support() {
        assert_eq!(phi0(&[0.0]), 1.0);
        assert_eq!(phi0(&[1.0]), 1.0);
        assert_eq!(phi0(&[-0.5, 0.5]), 1.0);
        assert_eq!(phi0(&[2.0]), 0.0);
        assert_eq!(phi0(&[3.0]), 0.0);
        let v = phi0(&[1.5]);
        assert!(v > 0.0 && v < 1.0);
    }

    #[test]
    fn partition_telescopes_to_one() {
        let part = DyadicPartition::new(5);
        // Lattice sweep of |xi| <= 32 = 2^5 in both 1D and a 2D diagonal.
        for i in 0..=640 {
            let r = i as f64 * 0.05;
            let sum = part.partition_sum(&[r]);
            assert!((sum - 1.0).abs() <= 1e-10, "r = {r}: sum = {sum}");
            let d = r / 2.0f64.sqrt();
            let sum2 = part.partition_sum(&[d, d]);
            assert!((sum2 - 1.0).abs() <= 1e-10);
        }
    }

    #[test]
    fn annuli_are_nonnegative_with_dyadic_support() {
        let part = DyadicPartition::new(6);
        for j in 1..=6usize {
            let lo = 2.0f64.powi(j as i32 - 1);
            let hi = 2.0f64.powi(j as i32 + 1);
            for i in 0..2000 {
                let r = i as f64 * 0.08;
                let v = part.phi_radial(j, r);
                assert!((-1e-15..=1.0 + 1e-15).contains(&v));
                if r < lo * (1.0 - 1e-12) || r > hi * (1.0 + 1e-12) {
                    assert_eq!(v, 0.0, "j = {j}, r = {r}");
                }
            }
        }
    }

    #[test]
    fn dyadic_weight_comparable_to_bracket_on_support() {
        // On supp phi_j, 2^{-j a} and <xi>^{-a} agree within fixed constants
        // for a in {-2, -1, 1, 2}; extremes frozen from the support geometry
        // <xi>/2^j in [~1/2, ~sqrt(5)].
        let part = DyadicPartition::new(8);
        for a in [-2.0f64, -1.0, 1.0, 2.0] {
            let mut lo = f64::INFINITY;
            let mut hi = 0.0f64;
            for j in 1..=8usize {
                for i in 0..4000 {
                    let r = 2.0f64.powi(j as i32 - 1) * (1.0 + i as f64 * 0.001);
                    if part.phi_radial(j, r) > 1e-12 {
                        let bracket = (1.0 + r * r).sqrt();
                        let ratio = bracket.powf(a) * 2.0f64.powf(-(j as f64) * a);
                        lo = lo.min(ratio);
                        hi = hi.max(ratio);
                    }
                }
            }
            assert!(lo >= 0.19 && hi <= 5.3, "a = {a}: [{lo}, {hi}]");
        }
    }

    #[test]
    fn derivative_profile_scales_like_inverse_bracket() {
        // |d/dr phi_j(r)| * <r> stays below a fixed constant across j:
        // the scaled-difference profile of the partition. Recorded via a fine
        // radial finite-difference sweep and frozen with headroom.
        let part = DyadicPartition::new(7);
        let mut worst = 0.0f64;
        for j in 0..=7usize {
            let hi = 2.0f64.powi(j as i32 + 1);
            let steps = 4000;
            let dr = hi * 1.1 / steps as f64;
            for i in 1..steps {
                let r = i as f64 * dr;
                let d = (part.phi_radial(j, r + dr) - part.phi_radial(j, r - dr)) / (2.0 * dr);
                worst = worst.max(d.abs() * (1.0 + r * r).sqrt());
            }
        }
        assert!(worst.is_finite() && worst < 12.0, "scaled slope bound {worst}");
    }

    #[test]
    fn grid_adapted_j_max() {
        // L = 64, N = 2048: xi_max = 16 pi ~ 50.3, so j_max = 4.
        let grid = Grid::new(1, 64.0, 2048).unwrap();
        assert_eq!(DyadicPartition::for_grid(&grid).unwrap().j_max(), 4);
        let tiny = Grid::new(1, 100.0, 16).unwrap();
        assert!(DyadicPartition::for_grid(&tiny).is_err());
    }
}
