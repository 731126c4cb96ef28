//! Periodic lattice, discrete Fourier transforms and Bessel-potential
//! multipliers.
//!
//! The box is `[-L, L]^n` with `N` points per axis, `x_j = -L + j h`,
//! `h = 2L/N`. The dual lattice carries `xi_k = (pi/L) k` for
//! `k in {-N/2, ..., N/2 - 1}`, stored in FFT index order. The forward
//! transform approximates `u^(xi) = \int e^{-i x xi} u(x) dx` by the
//! trapezoidal rule (`h^n` weights); inversion carries the `(2pi)^{-n}`
//! normalisation, so the pair is exact on the lattice.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rustfft::Fft;

use crate::error::{Error, Result};

/// Japanese bracket `<v> = (1 + |v|^2)^{1/2}`.
pub fn bracket(v: &[f64]) -> f64 {
    (1.0 + v.iter().map(|t| t * t).sum::<f64>()).sqrt()
}

/// Joint bracket `<x; xi> = (1 + |x|^2 + |xi|^2)^{1/2}`.
pub fn bracket_joint(x: &[f64], xi: &[f64]) -> f64 {
    (1.0 + x.iter().chain(xi).map(|t| t * t).sum::<f64>()).sqrt()
}

/// Uniform periodic lattice on `[-L, L]^n`, `n` in `{1, 2}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    n: usize,
    box_radius: f64,
    points_per_axis: usize,
}

impl Grid {
    /// New grid; `points_per_axis` must be a power of two, at least 16.
    pub fn new(n: usize, box_radius: f64, points_per_axis: usize) -> Result<Self> {
        if !(n == 1 || n == 2) {
            return Err(Error::InvalidGrid(format!("dimension must be 1 or 2, got {n}")));
        }
        if !(box_radius.is_finite() && box_radius > 0.0) {
            return Err(Error::InvalidGrid(format!("box radius must be positive, got {box_radius}")));
        }
        if points_per_axis < 16 || !points_per_axis.is_power_of_two() {
            return Err(Error::InvalidGrid(format!(
                "points per axis must be a power of two >= 16, got {points_per_axis}"
            )));
        }
        Ok(Self { n, box_radius, points_per_axis })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Half-width `L` of the box `[-L, L]^n`.
    pub fn box_radius(&self) -> f64 {
        self.box_radius
    }

    pub fn points_per_axis(&self) -> usize {
        self.points_per_axis
    }

    /// Total number of lattice points `N^n`.
    pub fn total_points(&self) -> usize {
        self.points_per_axis.pow(self.n as u32)
    }

    /// Spatial spacing `h = 2L/N`.
    pub fn spacing(&self) -> f64 {
        2.0 * self.box_radius / self.points_per_axis as f64
    }

    /// Frequency spacing `pi/L`.
    pub fn xi_spacing(&self) -> f64 {
        std::f64::consts::PI / self.box_radius
    }

    /// Largest frequency magnitude on the axis, `(pi/L) N/2`.
    pub fn xi_max(&self) -> f64 {
        self.xi_spacing() * (self.points_per_axis / 2) as f64
    }

    /// Spatial nodes along one axis.
    pub fn x_axis(&self) -> Vec<f64> {
        let h = self.spacing();
        (0..self.points_per_axis).map(|j| -self.box_radius + j as f64 * h).collect()
    }

    /// Frequency nodes along one axis, in FFT index order
    /// (`0, d, 2d, ..., -N/2 d, ..., -d`).
    pub fn xi_axis(&self) -> Vec<f64> {
        let d = self.xi_spacing();
        let n = self.points_per_axis;
        (0..n)
            .map(|m| {
                let k = if m < n / 2 { m as isize } else { m as isize - n as isize };
                d * k as f64
            })
            .collect()
    }

    /// Decompose a flat index into per-axis indices (row-major).
    pub fn split_index(&self, idx: usize) -> [usize; 2] {
        match self.n {
            1 => [idx, 0],
            _ => [idx / self.points_per_axis, idx % self.points_per_axis],
        }
    }

    /// Spatial coordinates of the flat index.
    pub fn x_coord(&self, idx: usize) -> Vec<f64> {
        let ax = self.x_axis();
        let [a, b] = self.split_index(idx);
        match self.n {
            1 => vec![ax[a]],
            _ => vec![ax[a], ax[b]],
        }
    }

    /// Frequency coordinates of the flat index (FFT order per axis).
    pub fn xi_coord(&self, idx: usize) -> Vec<f64> {
        let ax = self.xi_axis();
        let [a, b] = self.split_index(idx);
        match self.n {
            1 => vec![ax[a]],
            _ => vec![ax[a], ax[b]],
        }
    }
}

/// Complex field sampled on a grid, `comps` components stored as
/// contiguous planes of `N^n` values each.
#[derive(Debug, Clone)]
pub struct SampledField {
    pub grid: Grid,
    comps: usize,
    data: Vec<Complex64>,
}

impl SampledField {
    pub fn new(grid: Grid, comps: usize, data: Vec<Complex64>) -> Result<Self> {
        let expected = grid.total_points() * comps;
        if data.len() != expected {
            return Err(Error::ShapeMismatch { expected, got: data.len() });
        }
        if let Some(i) = data.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        Ok(Self { grid, comps, data })
    }

    /// Scalar field from per-point samples.
    pub fn scalar(grid: Grid, data: Vec<Complex64>) -> Result<Self> {
        Self::new(grid, 1, data)
    }

    /// Sample a scalar function of the spatial coordinates.
    pub fn from_fn(grid: Grid, f: impl Fn(&[f64]) -> Complex64) -> Self {
        let data = (0..grid.total_points()).map(|i| f(&grid.x_coord(i))).collect();
        Self { comps: 1, data, grid }
    }

    pub fn comps(&self) -> usize {
        self.comps
    }

    pub fn plane(&self, c: usize) -> &[Complex64] {
        let n = self.grid.total_points();
        &self.data[c * n..(c + 1) * n]
    }

    pub fn plane_mut(&mut self, c: usize) -> &mut [Complex64] {
        let n = self.grid.total_points();
        &mut self.data[c * n..(c + 1) * n]
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    /// Discrete `L^2` norm `(h^n sum |u|^2)^{1/2}` over all components.
    pub fn l2_norm(&self) -> f64 {
        let h = self.grid.spacing().powi(self.grid.dim() as i32);
        (h * self.data.iter().map(|z| z.norm_sqr()).sum::<f64>()).sqrt()
    }
}

fn fft_cache() -> &'static Mutex<HashMap<(usize, bool), Arc<dyn Fft<f64>>>> {
    static CACHE: OnceLock<Mutex<HashMap<(usize, bool), Arc<dyn Fft<f64>>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

fn plan(n: usize, forward: bool) -> Arc<dyn Fft<f64>> {
    let mut cache = fft_cache().lock().expect("fft cache");
    cache
        .entry((n, forward))
        .or_insert_with(|| {
            let mut planner = rustfft::FftPlanner::new();
            if forward {
                planner.plan_fft_forward(n)
            } else {
                planner.plan_fft_inverse(n)
            }
        })
        .clone()
}

/// Unnormalised FFT along every axis of a row-major `N^n` block.
fn fft_axes(grid: &Grid, data: &mut [Complex64], forward: bool) {
    let n = grid.points_per_axis();
    let fft = plan(n, forward);
    match grid.dim() {
        1 => fft.process(data),
        _ => {
            // Rows are contiguous.
            for row in data.chunks_exact_mut(n) {
                fft.process(row);
            }
            // Columns via gather/scatter.
            let mut scratch = vec![Complex64::default(); n];
            for col in 0..n {
                for (r, s) in scratch.iter_mut().enumerate() {
                    *s = data[r * n + col];
                }
                fft.process(&mut scratch);
                for (r, s) in scratch.iter().enumerate() {
                    data[r * n + col] = *s;
                }
            }
        }
    }
}

/// Parity of the sum of per-axis indices for a flat row-major index.
fn index_parity(grid: &Grid, idx: usize) -> bool {
    let [a, b] = grid.split_index(idx);
    (a + b) % 2 == 1
}

/// Forward transform: `u^(xi_k) = h^n sum_j e^{-i x_j xi_k} u(x_j)`,
/// returned on the frequency lattice in FFT index order.
pub fn fourier(grid: &Grid, u: &[Complex64]) -> Result<Vec<Complex64>> {
    if u.len() != grid.total_points() {
        return Err(Error::ShapeMismatch { expected: grid.total_points(), got: u.len() });
    }
    let mut v = u.to_vec();
    fft_axes(grid, &mut v, true);
    let scale = grid.spacing().powi(grid.dim() as i32);
    for (m, z) in v.iter_mut().enumerate() {
        let sign = if index_parity(grid, m) { -scale } else { scale };
        *z *= sign;
    }
    Ok(v)
}

/// Inverse transform: `u(x_j) = (2pi)^{-n} (pi/L)^n sum_k e^{i x_j xi_k} u^(xi_k)`.
pub fn inverse_fourier(grid: &Grid, uhat: &[Complex64]) -> Result<Vec<Complex64>> {
    if uhat.len() != grid.total_points() {
        return Err(Error::ShapeMismatch { expected: grid.total_points(), got: uhat.len() });
    }
    let mut v: Vec<Complex64> = uhat
        .iter()
        .enumerate()
        .map(|(m, z)| if index_parity(grid, m) { -z } else { *z })
        .collect();
    fft_axes(grid, &mut v, false);
    let scale = (grid.xi_spacing() / (2.0 * std::f64::consts::PI)).powi(grid.dim() as i32);
    for z in v.iter_mut() {
        *z *= scale;
    }
    Ok(v)
}

/// Apply the Fourier multiplier `xi -> mult(xi)` to a scalar lattice field.
pub fn apply_multiplier(
    grid: &Grid,
    u: &[Complex64],
    mult: impl Fn(&[f64]) -> Complex64,
) -> Result<Vec<Complex64>> {
    let mut uhat = fourier(grid, u)?;
    match grid.dim() {
        1 => {
            let xi = grid.xi_axis();
            for (m, z) in uhat.iter_mut().enumerate() {
                *z *= mult(&[xi[m]]);
            }
        }
        _ => {
            let xi = grid.xi_axis();
            let n = grid.points_per_axis();
            for (m, z) in uhat.iter_mut().enumerate() {
                *z *= mult(&[xi[m / n], xi[m % n]]);
            }
        }
    }
    inverse_fourier(grid, &uhat)
}

/// Bessel-potential multiplier `<D>^s`: multiply the spectrum by `<xi>^s`.
pub fn bessel_multiplier(grid: &Grid, u: &[Complex64], s: f64) -> Result<Vec<Complex64>> {
    if s == 0.0 {
        if u.len() != grid.total_points() {
            return Err(Error::ShapeMismatch { expected: grid.total_points(), got: u.len() });
        }
        return Ok(u.to_vec());
    }
    apply_multiplier(grid, u, |xi| Complex64::new(bracket(xi).powf(s), 0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    /// Direct `O(N^2)` quadrature of the forward transform, the oracle the
    /// FFT path is frozen against.
    fn dft_sum_oracle(grid: &Grid, u: &[Complex64]) -> Vec<Complex64> {
        let total = grid.total_points();
        let h = grid.spacing().powi(grid.dim() as i32);
        (0..total)
            .map(|m| {
                let xi = grid.xi_coord(m);
                let mut acc = Complex64::default();
                for (j, uj) in u.iter().enumerate() {
                    let x = grid.x_coord(j);
                    let phase: f64 = x.iter().zip(&xi).map(|(a, b)| a * b).sum();
                    acc += uj * Complex64::from_polar(1.0, -phase);
                }
                acc * h
            })
            .collect()
    }

    fn rng_field(grid: &Grid, seed: u64) -> Vec<Complex64> {
        // Small deterministic generator for test data.
        let mut state = seed.wrapping_mul(0x9E3779B97F4A7C15).wrapping_add(1);
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        (0..grid.total_points()).map(|_| Complex64::new(next(), next())).collect()
    }

    #[test]
    fn grid_validation() {
        assert!(Grid::new(3, 8.0, 64).is_err());
        assert!(Grid::new(1, -1.0, 64).is_err());
        assert!(Grid::new(1, 8.0, 48).is_err());
        assert!(Grid::new(1, 8.0, 8).is_err());
        assert!(Grid::new(2, 8.0, 64).is_ok());
    }

    #[test]
    fn gaussian_transform_matches_closed_form_and_oracle() {
        // e^{-x^2/2} -> sqrt(2 pi) e^{-xi^2/2}; box large enough that the
        // periodisation tail sits below 1e-12.
        let grid = Grid::new(1, 16.0, 512).unwrap();
        let u: Vec<Complex64> = grid
            .x_axis()
            .iter()
            .map(|&x| Complex64::new((-x * x / 2.0).exp(), 0.0))
            .collect();
        let uhat = fourier(&grid, &u).unwrap();
        let xi = grid.xi_axis();
        for (m, z) in uhat.iter().enumerate() {
            let want = (2.0 * PI).sqrt() * (-xi[m] * xi[m] / 2.0).exp();
            if xi[m].abs() <= 6.0 {
                // Relative accuracy where the target is well above roundoff.
                assert!(
                    (z.re - want).abs() / want <= 1e-8 && z.im.abs() <= 1e-10,
                    "xi = {}: got {z}, want {want}",
                    xi[m]
                );
            } else {
                // Far tail: compare absolutely against the spectrum scale.
                assert!((z.re - want).abs() <= 1e-12 && z.im.abs() <= 1e-12);
            }
        }
        let oracle = dft_sum_oracle(&grid, &u);
        let scale = uhat.iter().map(|z| z.norm()).fold(0.0, f64::max);
        for (a, b) in uhat.iter().zip(&oracle) {
            assert!((a - b).norm() <= 1e-12 * scale);
        }
    }

    #[test]
    fn fft_path_matches_oracle_2d() {
        let grid = Grid::new(2, 4.0, 16).unwrap();
        let u = rng_field(&grid, 7);
        let uhat = fourier(&grid, &u).unwrap();
        let oracle = dft_sum_oracle(&grid, &u);
        let scale = uhat.iter().map(|z| z.norm()).fold(0.0, f64::max);
        for (a, b) in uhat.iter().zip(&oracle) {
            assert!((a - b).norm() <= 1e-12 * scale);
        }
    }

    #[test]
    fn round_trip_identity() {
        for (n, np) in [(1usize, 256usize), (2, 32)] {
            let grid = Grid::new(n, 8.0, np).unwrap();
            let u = rng_field(&grid, 3);
            let back = inverse_fourier(&grid, &fourier(&grid, &u).unwrap()).unwrap();
            let scale = u.iter().map(|z| z.norm()).fold(0.0, f64::max);
            for (a, b) in u.iter().zip(&back) {
                assert!((a - b).norm() <= 1e-12 * scale);
            }
        }
    }

    #[test]
    fn plancherel_identity() {
        for (n, np) in [(1usize, 128usize), (2, 32)] {
            let grid = Grid::new(n, 6.0, np).unwrap();
            let u = rng_field(&grid, 11);
            let uhat = fourier(&grid, &u).unwrap();
            let dim = grid.dim() as i32;
            let lhs = grid.spacing().powi(dim) * u.iter().map(|z| z.norm_sqr()).sum::<f64>();
            let rhs = (grid.xi_spacing() / (2.0 * PI)).powi(dim)
                * uhat.iter().map(|z| z.norm_sqr()).sum::<f64>();
            assert!((lhs - rhs).abs() <= 1e-10 * lhs.max(1.0));
        }
    }

    #[test]
    fn bessel_multiplier_basics() {
        let grid = Grid::new(1, 8.0, 256).unwrap();
        let u = rng_field(&grid, 5);
        // s = 0 is the identity.
        let same = bessel_multiplier(&grid, &u, 0.0).unwrap();
        assert_eq!(u, same);
        // <D>^s <D>^{-s} = id within 1e-10.
        for s in [-2.0, 1.0, 3.0] {
            let v = bessel_multiplier(&grid, &u, s).unwrap();
            let w = bessel_multiplier(&grid, &v, -s).unwrap();
            let scale = u.iter().map(|z| z.norm()).fold(0.0, f64::max);
            for (a, b) in u.iter().zip(&w) {
                assert!((a - b).norm() <= 1e-10 * scale, "s = {s}");
            }
        }
    }

    #[test]
    fn bessel_multiplier_scales_single_mode() {
        // On the pure mode e^{i x xi_0} the multiplier acts by <xi_0>^s.
        let grid = Grid::new(1, 8.0, 128).unwrap();
        let xi0 = grid.xi_spacing() * 12.0;
        let u: Vec<Complex64> =
            grid.x_axis().iter().map(|&x| Complex64::from_polar(1.0, x * xi0)).collect();
        let s = 1.75;
        let v = bessel_multiplier(&grid, &u, s).unwrap();
        let factor = bracket(&[xi0]).powf(s);
        for (a, b) in u.iter().zip(&v) {
            assert!((a * factor - b).norm() <= 1e-10 * factor);
        }
    }

    #[test]
    fn sampled_field_validation() {
        let grid = Grid::new(1, 8.0, 64).unwrap();
        assert!(SampledField::new(grid.clone(), 1, vec![Complex64::default(); 63]).is_err());
        let mut data = vec![Complex64::default(); 64];
        data[10] = Complex64::new(f64::NAN, 0.0);
        assert!(SampledField::new(grid.clone(), 1, data).is_err());
        assert!(SampledField::new(grid, 2, vec![Complex64::default(); 128]).is_ok());
    }

    #[test]
    fn bracket_values() {
        assert_eq!(bracket(&[0.0]), 1.0);
        assert!((bracket(&[3.0, 4.0]) - 26.0f64.sqrt()).abs() < 1e-15);
        assert!((bracket_joint(&[1.0], &[2.0]) - 6.0f64.sqrt()).abs() < 1e-15);
    }
}
