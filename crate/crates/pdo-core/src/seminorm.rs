//! Symbol-class seminorms, ellipticity, and the behaviour-at-infinity
//! diagnostics (slow variation, uniform continuity, limit decay).
//!
//! All frequency suprema are taken over a deterministic lattice panel
//! ([`crate::symbol::xi_panel`]); all derivatives are fourth-order centred
//! finite differences on the lattice, per the module-wide convention.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fd::{derivative_multi, multi_indices};
use crate::grid::{bracket, Grid};
use crate::spaces::{cb_norm, hoelder_norm, sup_norm, HoelderSpec};
use crate::symbol::{xi_derivative_slice, xi_panel, SliceSymbol, Symbol};

/// One recorded extremum of a seminorm scan.
#[derive(Debug, Clone)]
pub struct AlphaEntry {
    pub alpha: Vec<usize>,
    /// Present for smooth-class scans (the x-derivative index).
    pub beta: Option<Vec<usize>>,
    /// The weighted Hölder (or sup) contribution at the maximising frequency.
    pub weighted: f64,
    /// Extra sup-norm term (present exactly when `delta != 0`).
    pub se: Option<f64>,
    /// Combined value `weighted + se` maximised over the panel.
    pub value: f64,
    /// The frequency attaining the maximum.
    pub arg_xi: Vec<f64>,
}

/// Result of a seminorm computation: the value and its per-index breakdown.
#[derive(Debug, Clone)]
pub struct SeminormReport {
    pub k: usize,
    pub value: f64,
    pub entries: Vec<AlphaEntry>,
}

impl SeminormReport {
    fn from_entries(k: usize, entries: Vec<AlphaEntry>) -> Self {
        let value = entries.iter().map(|e| e.value).fold(0.0, f64::max);
        Self { k, value, entries }
    }
}

/// Entrywise-max Hölder norm of a matrix-valued slice set.
fn matrix_hoelder(
    grid: &Grid,
    slices: &[Vec<Complex64>],
    spec: &HoelderSpec,
) -> Result<f64> {
    let mut best = 0.0f64;
    for s in slices {
        best = best.max(hoelder_norm(grid, s, spec)?);
    }
    Ok(best)
}

fn matrix_sup(slices: &[Vec<Complex64>]) -> f64 {
    slices.iter().map(|s| sup_norm(s)).fold(0.0, f64::max)
}

/// All component slices of `∂_xi^alpha a(·, xi)` at one panel frequency.
fn derivative_slices(
    sym: &dyn SliceSymbol,
    grid: &Grid,
    xi_idx: usize,
    alpha: &[usize],
) -> Result<Vec<Vec<Complex64>>> {
    let l = sym.meta().l;
    let mut out = Vec::with_capacity(l * l);
    for row in 0..l {
        for col in 0..l {
            out.push(xi_derivative_slice(sym, grid, xi_idx, alpha, row, col)?);
        }
    }
    Ok(out)
}

/// Seminorm of the limited-smoothness class: max over `|alpha| <= k` of the
/// panel supremum of
/// `||∂_xi^alpha a(·,xi)||_{C^{m~,s}} <xi>^{-m+rho|alpha|-delta(m~+s)}`
/// plus (when `delta != 0`) the sup-norm term
/// `||∂_xi^alpha a(·,xi)||_{C^0} <xi>^{-m+rho|alpha|}`.
pub fn nonsmooth_seminorm(
    grid: &Grid,
    sym: &dyn SliceSymbol,
    k: usize,
    target: (usize, f64),
) -> Result<SeminormReport> {
    let meta = *sym.meta();
    meta.check_budget(k)?;
    let (m_tilde, s) = target;
    let spec = HoelderSpec::new(m_tilde, s)?;
    let panel = xi_panel(grid, 2 * k);
    let entries = multi_indices(grid.dim(), k)
        .into_par_iter()
        .map(|alpha| -> Result<AlphaEntry> {
            let order: usize = alpha.iter().sum();
            let scan: Vec<(f64, f64, f64, usize)> = panel
                .par_iter()
                .map(|&xi_idx| -> Result<(f64, f64, f64, usize)> {
                    let slices = derivative_slices(sym, grid, xi_idx, &alpha)?;
                    let b = bracket(&grid.xi_coord(xi_idx));
                    let w_h = b.powf(-meta.m + meta.rho * order as f64
                        - meta.delta * (m_tilde as f64 + s));
                    let weighted = w_h * matrix_hoelder(grid, &slices, &spec)?;
                    let se = if meta.delta != 0.0 {
                        matrix_sup(&slices) * b.powf(-meta.m + meta.rho * order as f64)
                    } else {
                        0.0
                    };
                    Ok((weighted + se, weighted, se, xi_idx))
                })
                .collect::<Result<_>>()?;
            let best = scan
                .into_iter()
                .max_by(|a, b| a.0.total_cmp(&b.0))
                .expect("panel is never empty");
            Ok(AlphaEntry {
                alpha: alpha.clone(),
                beta: None,
                weighted: best.1,
                se: (meta.delta != 0.0).then_some(best.2),
                value: best.0,
                arg_xi: grid.xi_coord(best.3),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SeminormReport::from_entries(k, entries))
}

/// Seminorm of the smooth class: max over `|alpha|, |beta| <= k` of the
/// lattice supremum of `|∂_xi^alpha ∂_x^beta a| <xi>^{-(m-rho|alpha|+delta|beta|)}`.
pub fn smooth_seminorm(grid: &Grid, sym: &dyn SliceSymbol, k: usize) -> Result<SeminormReport> {
    let meta = *sym.meta();
    meta.check_budget(k)?;
    let panel = xi_panel(grid, 2 * k);
    let alphas = multi_indices(grid.dim(), k);
    let betas = multi_indices(grid.dim(), k);
    let pairs: Vec<(Vec<usize>, Vec<usize>)> = alphas
        .iter()
        .flat_map(|a| betas.iter().map(move |b| (a.clone(), b.clone())))
        .collect();
    let entries = pairs
        .into_par_iter()
        .map(|(alpha, beta)| -> Result<AlphaEntry> {
            let a_ord: usize = alpha.iter().sum();
            let b_ord: usize = beta.iter().sum();
            let w_exp = -(meta.m - meta.rho * a_ord as f64 + meta.delta * b_ord as f64);
            let scan: Vec<(f64, usize)> = panel
                .par_iter()
                .map(|&xi_idx| -> Result<(f64, usize)> {
                    let slices = derivative_slices(sym, grid, xi_idx, &alpha)?;
                    let b = bracket(&grid.xi_coord(xi_idx));
                    let mut v = 0.0f64;
                    for s in &slices {
                        let ds = if b_ord == 0 { s.clone() } else { derivative_multi(grid, s, &beta) };
                        v = v.max(sup_norm(&ds));
                    }
                    Ok((v * b.powf(w_exp), xi_idx))
                })
                .collect::<Result<_>>()?;
            let best = scan
                .into_iter()
                .max_by(|a, b| a.0.total_cmp(&b.0))
                .expect("panel is never empty");
            Ok(AlphaEntry {
                alpha,
                beta: Some(beta),
                weighted: best.0,
                se: None,
                value: best.0,
                arg_xi: grid.xi_coord(best.1),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SeminormReport::from_entries(k, entries))
}

/// Both readings of the non-smooth estimate bound
/// `||∂_xi^alpha a(·,xi)||_{C^k_b} <= C <xi>^E`.
///
/// The printed statement uses `E = m~ - rho|alpha| + delta k` (the
/// x-regularity order in the exponent); `order_based` substitutes the symbol
/// order `m`. `printed_tail_growth` compares the printed-weight profile at
/// the largest panel frequency against half that frequency, so a value well
/// above 1 flags that the printed exponent fails to normalize the growth.
#[derive(Debug, Clone)]
pub struct EstimateLemmaReport {
    pub alpha: Vec<usize>,
    pub k: usize,
    pub as_printed: f64,
    pub order_based: f64,
    pub printed_tail_growth: f64,
}

pub fn estimate_lemma_ratios(
    grid: &Grid,
    sym: &dyn SliceSymbol,
    alpha: &[usize],
    k: usize,
) -> Result<EstimateLemmaReport> {
    let meta = *sym.meta();
    let order: usize = alpha.iter().sum();
    meta.check_budget(order)?;
    let panel = xi_panel(grid, 2 * order);
    let printed_exp = -(meta.m_tilde as f64 - meta.rho * order as f64 + meta.delta * k as f64);
    let order_exp = -(meta.m - meta.rho * order as f64 + meta.delta * k as f64);
    let profile: Vec<(f64, f64, f64)> = panel
        .par_iter()
        .map(|&xi_idx| -> Result<(f64, f64, f64)> {
            let slices = derivative_slices(sym, grid, xi_idx, alpha)?;
            let cb = slices.iter().map(|s| cb_norm(grid, s, k)).fold(0.0, f64::max);
            let b = bracket(&grid.xi_coord(xi_idx));
            Ok((b, cb * b.powf(printed_exp), cb * b.powf(order_exp)))
        })
        .collect::<Result<_>>()?;
    let as_printed = profile.iter().map(|p| p.1).fold(0.0, f64::max);
    let order_based = profile.iter().map(|p| p.2).fold(0.0, f64::max);
    let b_max = profile.iter().map(|p| p.0).fold(0.0, f64::max);
    let at = |target: f64| {
        profile
            .iter()
            .min_by(|u, v| (u.0 - target).abs().total_cmp(&(v.0 - target).abs()))
            .map(|p| p.1)
            .unwrap_or(0.0)
    };
    let far = at(b_max);
    let mid = at(b_max / 2.0);
    let printed_tail_growth = if mid > 0.0 { far / mid } else { f64::INFINITY };
    Ok(EstimateLemmaReport {
        alpha: alpha.to_vec(),
        k,
        as_printed,
        order_based,
        printed_tail_growth,
    })
}

/// Outcome of the ellipticity scan.
#[derive(Debug, Clone)]
pub struct EllipticityReport {
    pub ok: bool,
    /// Minimum of `|det a(x,xi)| <xi>^{-ml}` over the scanned region.
    pub margin: f64,
    /// Phase-space point attaining the minimum.
    pub arg_min: (Vec<f64>, Vec<f64>),
    /// A point violating the bound, when one exists.
    pub witness: Option<(Vec<f64>, Vec<f64>)>,
}

/// Check `|det a(x, xi)| <xi>^{-m l} >= c0` at every lattice point with
/// `|x| + |xi| >= radius`.
pub fn is_elliptic(
    grid: &Grid,
    sym: &dyn SliceSymbol,
    radius: f64,
    c0: f64,
) -> Result<EllipticityReport> {
    let meta = *sym.meta();
    let l = meta.l;
    let total = grid.total_points();
    let norm = |v: &[f64]| v.iter().map(|t| t * t).sum::<f64>().sqrt();
    let per_xi: Vec<(f64, usize, usize)> = (0..total)
        .into_par_iter()
        .map(|xi_idx| -> Result<(f64, usize, usize)> {
            let xi = grid.xi_coord(xi_idx);
            let w = bracket(&xi).powf(-meta.m * l as f64);
            let mut slices = Vec::with_capacity(l * l);
            for row in 0..l {
                for col in 0..l {
                    slices.push(sym.slice(grid, xi_idx, row, col)?);
                }
            }
            let mut best = f64::INFINITY;
            let mut best_x = 0usize;
            for x_idx in 0..total {
                let x = grid.x_coord(x_idx);
                if norm(&x) + norm(&xi) < radius {
                    continue;
                }
                let det = match l {
                    1 => slices[0][x_idx],
                    2 => {
                        slices[0][x_idx] * slices[3][x_idx]
                            - slices[1][x_idx] * slices[2][x_idx]
                    }
                    _ => {
                        let e = |r: usize, c: usize| slices[r * 3 + c][x_idx];
                        e(0, 0) * (e(1, 1) * e(2, 2) - e(1, 2) * e(2, 1))
                            - e(0, 1) * (e(1, 0) * e(2, 2) - e(1, 2) * e(2, 0))
                            + e(0, 2) * (e(1, 0) * e(2, 1) - e(1, 1) * e(2, 0))
                    }
                };
                let v = det.norm() * w;
                if v < best {
                    best = v;
                    best_x = x_idx;
                }
            }
            Ok((best, best_x, xi_idx))
        })
        .collect::<Result<_>>()?;
    let (margin, x_idx, xi_idx) = per_xi
        .into_iter()
        .min_by(|a, b| a.0.total_cmp(&b.0))
        .expect("lattice is never empty");
    if !margin.is_finite() {
        return Err(Error::InvalidParameter {
            name: "radius",
            why: format!("no lattice point satisfies |x| + |xi| >= {radius}"),
        });
    }
    let arg_min = (grid.x_coord(x_idx), grid.xi_coord(xi_idx));
    let ok = margin >= c0;
    Ok(EllipticityReport {
        ok,
        margin,
        witness: (!ok).then(|| arg_min.clone()),
        arg_min,
    })
}

/// A radial profile `r -> max over lattice points at radius r`.
#[derive(Debug, Clone)]
pub struct DecayProfile {
    pub radii: Vec<f64>,
    pub values: Vec<f64>,
    pub global_max: f64,
    pub tail_max: f64,
}

impl DecayProfile {
    fn from_pointwise(grid: &Grid, point_vals: &[f64]) -> Self {
        let mut pairs: Vec<(f64, f64)> = (0..grid.total_points())
            .map(|i| {
                let x = grid.x_coord(i);
                (x.iter().map(|t| t * t).sum::<f64>().sqrt(), point_vals[i])
            })
            .collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut radii = Vec::new();
        let mut values: Vec<f64> = Vec::new();
        for (r, v) in pairs {
            match radii.last() {
                Some(&last) if (r - last as f64).abs() < 1e-9 => {
                    let lv = values.last_mut().unwrap();
                    *lv = lv.max(v);
                }
                _ => {
                    radii.push(r);
                    values.push(v);
                }
            }
        }
        let global_max = values.iter().copied().fold(0.0, f64::max);
        let tail_start = values.len() - (values.len() / 10).max(1);
        let tail_max = values[tail_start..].iter().copied().fold(0.0, f64::max);
        Self { radii, values, global_max, tail_max }
    }

    /// The tail-smallness diagnostic: outermost decile below `frac` of the max.
    pub fn decayed(&self, frac: f64) -> bool {
        self.tail_max < frac * self.global_max
    }
}

/// Default smallness fraction for the decay diagnostics.
pub const DECAY_TAIL_FRACTION: f64 = 0.05;

/// Slow-variation profile `C_{alpha,beta}(x) = sup_xi |∂_xi^alpha D_x^beta a|
/// <xi>^{-(m-rho|alpha|+delta|beta|)}` as a radial curve in `|x|`.
pub fn slowly_varying_profile(
    grid: &Grid,
    sym: &dyn SliceSymbol,
    alpha: &[usize],
    beta: &[usize],
) -> Result<DecayProfile> {
    let meta = *sym.meta();
    let a_ord: usize = alpha.iter().sum();
    let b_ord: usize = beta.iter().sum();
    meta.check_budget(a_ord)?;
    if b_ord > meta.m_tilde {
        return Err(Error::DerivativeBudget { requested: b_ord, declared: meta.m_tilde });
    }
    let panel = xi_panel(grid, 2 * a_ord);
    let w_exp = -(meta.m - meta.rho * a_ord as f64 + meta.delta * b_ord as f64);
    let per_xi: Vec<Vec<f64>> = panel
        .par_iter()
        .map(|&xi_idx| -> Result<Vec<f64>> {
            let slices = derivative_slices(sym, grid, xi_idx, alpha)?;
            let w = bracket(&grid.xi_coord(xi_idx)).powf(w_exp);
            let mut point = vec![0.0f64; grid.total_points()];
            for s in &slices {
                let ds = if b_ord == 0 { s.clone() } else { derivative_multi(grid, s, beta) };
                for (p, v) in point.iter_mut().zip(&ds) {
                    *p = p.max(v.norm() * w);
                }
            }
            Ok(point)
        })
        .collect::<Result<_>>()?;
    let mut point_vals = vec![0.0f64; grid.total_points()];
    for pv in &per_xi {
        for (p, v) in point_vals.iter_mut().zip(pv) {
            *p = p.max(*v);
        }
    }
    Ok(DecayProfile::from_pointwise(grid, &point_vals))
}

/// Wrapper shifting the base point: slices of `a(x + shift, xi)`.
struct ShiftedSymbol<'a> {
    base: &'a Symbol,
    shift: Vec<f64>,
}

impl SliceSymbol for ShiftedSymbol<'_> {
    fn meta(&self) -> &crate::symbol::SymbolMeta {
        &self.base.meta
    }

    fn slice(&self, grid: &Grid, xi_idx: usize, row: usize, col: usize) -> Result<Vec<Complex64>> {
        let xi = grid.xi_coord(xi_idx);
        let mut out = Vec::with_capacity(grid.total_points());
        for i in 0..grid.total_points() {
            let mut x = grid.x_coord(i);
            for (xc, sc) in x.iter_mut().zip(&self.shift) {
                *xc += sc;
            }
            out.push(self.base.eval(&x, &xi).get(row, col));
        }
        Ok(out)
    }
}

/// Uniform-continuity modulus: panel supremum of
/// `||∂_xi^alpha (a(x + h, xi) - a(x, xi))|| <xi>^{-m+rho|alpha|}`.
pub fn unif_modulus(grid: &Grid, sym: &Symbol, alpha: &[usize], shift: &[f64]) -> Result<f64> {
    let meta = sym.meta;
    let order: usize = alpha.iter().sum();
    meta.check_budget(order)?;
    if shift.iter().all(|&h| h == 0.0) {
        return Ok(0.0);
    }
    let shifted = ShiftedSymbol { base: sym, shift: shift.to_vec() };
    let diff = crate::symbol::DiffSymbol { a: &shifted, b: sym };
    let panel = xi_panel(grid, 2 * order);
    let vals: Vec<f64> = panel
        .par_iter()
        .map(|&xi_idx| -> Result<f64> {
            let slices = derivative_slices(&diff, grid, xi_idx, alpha)?;
            let w = bracket(&grid.xi_coord(xi_idx)).powf(-meta.m + meta.rho * order as f64);
            Ok(matrix_sup(&slices) * w)
        })
        .collect::<Result<_>>()?;
    Ok(vals.into_iter().fold(0.0, f64::max))
}

/// Sample the modulus along a shrinking shift sequence; the predicate holds
/// when the sequence is (weakly) decreasing and ends below `tol`.
pub fn unif_predicate(
    grid: &Grid,
    sym: &Symbol,
    alpha: &[usize],
    shifts: &[f64],
    tol: f64,
) -> Result<(Vec<f64>, bool)> {
    let mut moduli = Vec::with_capacity(shifts.len());
    for &h in shifts {
        let shift = vec![h; grid.dim()];
        moduli.push(unif_modulus(grid, sym, alpha, &shift)?);
    }
    let decreasing = moduli.windows(2).all(|w| w[1] <= w[0] * 1.05);
    let ok = decreasing && moduli.last().is_some_and(|&v| v < tol);
    Ok((moduli, ok))
}

/// Wrapper for the deviation from the limit symbol: `a(x, xi) - a_inf(xi)`.
struct LimitDiff<'a> {
    base: &'a Symbol,
}

impl SliceSymbol for LimitDiff<'_> {
    fn meta(&self) -> &crate::symbol::SymbolMeta {
        &self.base.meta
    }

    fn slice(&self, grid: &Grid, xi_idx: usize, row: usize, col: usize) -> Result<Vec<Complex64>> {
        let xi = grid.xi_coord(xi_idx);
        let lim = self.base.limit(&xi)?.get(row, col);
        let mut s = self.base.slice(grid, xi_idx, row, col)?;
        for v in s.iter_mut() {
            *v -= lim;
        }
        Ok(s)
    }
}

/// Radial profile of `sup_xi ||∂_xi^alpha (a(x,xi) - a_inf(xi))||
/// <xi>^{-m+rho|alpha|}`; errors when no limit symbol was declared.
pub fn limit_decay_profile(grid: &Grid, sym: &Symbol, alpha: &[usize]) -> Result<DecayProfile> {
    if !sym.has_limit() {
        return Err(Error::MissingLimit);
    }
    let meta = sym.meta;
    let order: usize = alpha.iter().sum();
    meta.check_budget(order)?;
    let diff = LimitDiff { base: sym };
    let panel = xi_panel(grid, 2 * order);
    let per_xi: Vec<Vec<f64>> = panel
        .par_iter()
        .map(|&xi_idx| -> Result<Vec<f64>> {
            let slices = derivative_slices(&diff, grid, xi_idx, alpha)?;
            let w = bracket(&grid.xi_coord(xi_idx)).powf(-meta.m + meta.rho * order as f64);
            let mut point = vec![0.0f64; grid.total_points()];
            for s in &slices {
                for (p, v) in point.iter_mut().zip(s) {
                    *p = p.max(v.norm() * w);
                }
            }
            Ok(point)
        })
        .collect::<Result<_>>()?;
    let mut point_vals = vec![0.0f64; grid.total_points()];
    for pv in &per_xi {
        for (p, v) in point_vals.iter_mut().zip(pv) {
            *p = p.max(*v);
        }
    }
    Ok(DecayProfile::from_pointwise(grid, &point_vals))
}
