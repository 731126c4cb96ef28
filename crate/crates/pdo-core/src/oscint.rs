//! Oscillatory integrals `Os ∬ e^{-i y eta} a(y, eta) dy deta / (2 pi)` in
//! one dimension, by two independent routes:
//!
//! * **cutoff route** — damp with `chi(eps y, eps eta)`, integrate, and
//!   extrapolate `eps -> 0` (Richardson in `eps^2` for the even default
//!   cutoff, in `eps` otherwise);
//! * **parts route** — a single absolutely convergent quadrature of
//!   `e^{-i y eta} A^{l'}(D_eta, y) A^{l}(D_y, eta) a`, where the `A`
//!   operators reproduce `e^{-i y eta}` exactly and therefore leave the
//!   integral's value unchanged.
//!
//! Quadratures run on midpoint lattices over adaptively doubled boxes; the
//! eta sum is innermost, so the oscillation turns smooth eta-behaviour of
//! the amplitude into rapid decay of the partial result in `y`, keeping
//! both boxes small.

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Relative tail tolerance for box doubling.
pub const TAIL_TOL: f64 = 1e-8;

const MAX_DOUBLINGS: usize = 6;

/// Hard cap on quadrature lattice size; box doubling stops (unconverged)
/// rather than exhaust memory on slowly decaying integrands.
const MAX_PANEL_POINTS: usize = 30_000_000;

/// Lattice size the sampling rules would produce for the given boxes.
fn panel_points(ry: f64, reta: f64, pad_y: usize, pad_eta: usize) -> usize {
    let hy = (std::f64::consts::PI / (2.0 * (reta + 20.0))).min(0.1);
    let heta = (std::f64::consts::PI / (2.0 * (ry + 20.0))).min(0.1);
    let ny = (2.0 * ry / hy).ceil() as usize + 2 * pad_y;
    let neta = (2.0 * reta / heta).ceil() as usize + 2 * pad_eta;
    ny.saturating_mul(neta)
}

type AmpFn = dyn Fn(f64, f64) -> Complex64 + Send + Sync;

/// A scalar amplitude `a(y, eta)` with declared growth and derivative
/// budgets: `|∂_eta^alpha ∂_y^beta a| <= C (1+|eta|)^m (1+|y|)^tau` for
/// `|alpha| <= n_budget`, `|beta| <= m_budget`.
#[derive(Clone)]
pub struct Amplitude {
    pub m: f64,
    pub tau: f64,
    /// eta-derivative budget (the class parameter `N`).
    pub n_budget: usize,
    /// y-derivative budget (the class parameter `M`).
    pub m_budget: usize,
    eval: Arc<AmpFn>,
}

impl Amplitude {
    pub fn new(
        m: f64,
        tau: f64,
        n_budget: usize,
        m_budget: usize,
        f: impl Fn(f64, f64) -> Complex64 + Send + Sync + 'static,
    ) -> Self {
        Self { m, tau, n_budget, m_budget, eval: Arc::new(f) }
    }

    #[inline]
    pub fn eval(&self, y: f64, eta: f64) -> Complex64 {
        (self.eval)(y, eta)
    }

    /// Multiply by a fixed window `w(y)` (used by the dominated-convergence
    /// experiments).
    pub fn windowed(&self, w: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        let base = self.eval.clone();
        Self {
            m: self.m,
            tau: self.tau,
            n_budget: self.n_budget,
            m_budget: self.m_budget,
            eval: Arc::new(move |y, eta| base(y, eta) * w(y)),
        }
    }

    /// Sampled check of the declared growth: the largest ratio
    /// `|∂_eta^alpha ∂_y^beta a| (1+|eta|)^{-m} (1+|y|)^{-tau}` over a coarse
    /// box, derivatives up to `min(budget, 2)` per variable.
    pub fn growth_check(&self, radius: f64, samples: usize) -> f64 {
        let h = 0.05;
        let d1 = |f: &dyn Fn(f64) -> Complex64, t: f64| {
            (-f(t + 2.0 * h) + 8.0 * f(t + h) - 8.0 * f(t - h) + f(t - 2.0 * h)) / (12.0 * h)
        };
        let mut worst = 0.0f64;
        for i in 0..samples {
            let y = -radius + 2.0 * radius * (i as f64 + 0.5) / samples as f64;
            for j in 0..samples {
                let eta = -radius + 2.0 * radius * (j as f64 + 0.5) / samples as f64;
                let weight =
                    (1.0 + eta.abs()).powf(-self.m) * (1.0 + y.abs()).powf(-self.tau);
                for alpha in 0..=self.n_budget.min(2) {
                    for beta in 0..=self.m_budget.min(2) {
                        // Nested centred differences around (y, eta).
                        let v = match (alpha, beta) {
                            (0, 0) => self.eval(y, eta),
                            (1, 0) => d1(&|t| self.eval(y, t), eta),
                            (0, 1) => d1(&|t| self.eval(t, eta), y),
                            (1, 1) => d1(&|t| d1(&|s| self.eval(s, t), y), eta),
                            (2, 0) => d1(&|t| d1(&|s| self.eval(y, s), t), eta),
                            (0, 2) => d1(&|t| d1(&|s| self.eval(s, eta), t), y),
                            (2, 1) => d1(&|t| d1(&|s| d1(&|u| self.eval(u, s), y), t), eta),
                            (1, 2) => d1(&|t| d1(&|s| d1(&|u| self.eval(s, u), t), y), eta),
                            _ => d1(&|t| {
                                d1(&|s| d1(&|u| d1(&|w| self.eval(w, u), s), t), y)
                            }, eta),
                        };
                        worst = worst.max(v.norm() * weight);
                    }
                }
            }
        }
        worst
    }
}

/// Regularization orders `(l, l')` for the parts route: `l` differentiates
/// in `y` (needs `l > n + m`), `l'` in `eta` (needs `l' > n + tau`).
#[derive(Debug, Clone, Copy)]
pub struct RegularizerOrder {
    pub l: usize,
    pub lp: usize,
}

impl RegularizerOrder {
    pub fn validate(&self, amp: &Amplitude) -> Result<()> {
        let n = 1.0;
        if (self.l as f64) <= n + amp.m {
            return Err(Error::InvalidParameter {
                name: "l",
                why: format!("need l > n + m = {}, got {}", n + amp.m, self.l),
            });
        }
        if (self.lp as f64) <= n + amp.tau {
            return Err(Error::InvalidParameter {
                name: "lp",
                why: format!("need l' > n + tau = {}, got {}", n + amp.tau, self.lp),
            });
        }
        if self.l > amp.m_budget {
            return Err(Error::DerivativeBudget { requested: self.l, declared: amp.m_budget });
        }
        if self.lp > amp.n_budget {
            return Err(Error::DerivativeBudget { requested: self.lp, declared: amp.n_budget });
        }
        Ok(())
    }
}

/// Schwartz cutoff for the damped route; must equal 1 at the origin.
#[derive(Clone)]
pub enum Cutoff {
    /// `exp(-(y^2 + eta^2))` — smooth, even, and analytic in `eps^2`.
    TensorGaussian,
    Custom(Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>),
}

impl Cutoff {
    fn eval(&self, y: f64, eta: f64) -> f64 {
        match self {
            Cutoff::TensorGaussian => (-(y * y + eta * eta)).exp(),
            Cutoff::Custom(f) => f(y, eta),
        }
    }

    fn is_even_family(&self) -> bool {
        matches!(self, Cutoff::TensorGaussian)
    }
}

/// Default damping sequence `2^{-2} .. 2^{-7}`.
pub fn default_eps_sequence() -> Vec<f64> {
    (2..=7).map(|k| 2.0f64.powi(-k)).collect()
}

/// A samples-on-a-box workspace: midpoint lattice, row-major `[y][eta]`.
struct Panel {
    ry: f64,
    reta: f64,
    hy: f64,
    heta: f64,
    ny: usize,
    neta: usize,
    pad_y: usize,
    pad_eta: usize,
    data: Vec<Complex64>,
}

impl Panel {
    /// Sample `f` on the box `[-ry, ry] x [-reta, reta]` plus stencil pads.
    ///
    /// Step sizes obey the Nyquist rule for the transposed box radius, so
    /// each one-dimensional sum resolves the fastest phase it meets.
    fn sample(
        f: &dyn Fn(f64, f64) -> Complex64,
        ry: f64,
        reta: f64,
        pad_y: usize,
        pad_eta: usize,
    ) -> Self {
        let hy = (std::f64::consts::PI / (2.0 * (reta + 20.0))).min(0.1);
        let heta = (std::f64::consts::PI / (2.0 * (ry + 20.0))).min(0.1);
        let ny = (2.0 * ry / hy).ceil() as usize + 2 * pad_y;
        let neta = (2.0 * reta / heta).ceil() as usize + 2 * pad_eta;
        let mut data = Vec::with_capacity(ny * neta);
        for i in 0..ny {
            let y = Self::coord(-ry, hy, pad_y, i);
            for j in 0..neta {
                let eta = Self::coord(-reta, heta, pad_eta, j);
                data.push(f(y, eta));
            }
        }
        Self { ry, reta, hy, heta, ny, neta, pad_y, pad_eta, data }
    }

    #[inline]
    fn coord(origin: f64, h: f64, pad: usize, index: usize) -> f64 {
        origin + (index as f64 - pad as f64 + 0.5) * h
    }

    fn y(&self, i: usize) -> f64 {
        Self::coord(-self.ry, self.hy, self.pad_y, i)
    }

    fn eta(&self, j: usize) -> f64 {
        Self::coord(-self.reta, self.heta, self.pad_eta, j)
    }

    /// Fourth-order second difference along an axis (0 = y, 1 = eta),
    /// consuming two lattice points of validity on each side.
    fn second_derivative(&self, axis: usize) -> Vec<Complex64> {
        let (h, stride) = if axis == 0 { (self.hy, self.neta) } else { (self.heta, 1) };
        let inv = 1.0 / (12.0 * h * h);
        let mut out = vec![Complex64::default(); self.data.len()];
        let limit = if axis == 0 { self.ny } else { self.neta };
        for i in 0..self.ny {
            for j in 0..self.neta {
                let t = if axis == 0 { i } else { j };
                if t < 2 || t + 2 >= limit {
                    continue;
                }
                let c = i * self.neta + j;
                out[c] = (-self.data[c - 2 * stride] + 16.0 * self.data[c - stride]
                    - 30.0 * self.data[c]
                    + 16.0 * self.data[c + stride]
                    - self.data[c + 2 * stride])
                    * inv;
            }
        }
        out
    }

    /// Fourth-order first difference along an axis (same validity cost).
    fn first_derivative(&self, axis: usize) -> Vec<Complex64> {
        let (h, stride) = if axis == 0 { (self.hy, self.neta) } else { (self.heta, 1) };
        let inv = 1.0 / (12.0 * h);
        let mut out = vec![Complex64::default(); self.data.len()];
        let limit = if axis == 0 { self.ny } else { self.neta };
        for i in 0..self.ny {
            for j in 0..self.neta {
                let t = if axis == 0 { i } else { j };
                if t < 2 || t + 2 >= limit {
                    continue;
                }
                let c = i * self.neta + j;
                out[c] = (-self.data[c + 2 * stride] + 8.0 * self.data[c + stride]
                    - 8.0 * self.data[c - stride]
                    + self.data[c - 2 * stride])
                    * inv;
            }
        }
        out
    }

    /// Apply `A^ord(D_axis, w)` in place, where `w` is the coordinate of the
    /// *other* axis: even `ord` gives `<w>^{-ord} (1 - Lap)^{ord/2}`; odd
    /// `ord` the two-term form that still reproduces `e^{-i y eta}`.
    fn apply_a_operator(&mut self, axis: usize, ord: usize) {
        if ord == 0 {
            return;
        }
        let even_part = if ord % 2 == 0 { ord / 2 } else { (ord - 1) / 2 };
        for _ in 0..even_part {
            let lap = self.second_derivative(axis);
            for (d, l) in self.data.iter_mut().zip(&lap) {
                *d -= l;
            }
        }
        // Multiplier variable lives on the opposite axis.
        let ys: Vec<f64> = (0..self.ny).map(|i| self.y(i)).collect();
        let etas: Vec<f64> = (0..self.neta).map(|j| self.eta(j)).collect();
        let weight_of =
            |i: usize, j: usize| -> f64 { if axis == 0 { etas[j] } else { ys[i] } };
        if ord % 2 == 0 {
            for i in 0..self.ny {
                for j in 0..self.neta {
                    let w = weight_of(i, j);
                    let br = (1.0 + w * w).sqrt();
                    self.data[i * self.neta + j] *= br.powi(-(ord as i32));
                }
            }
        } else {
            // <w>^{-ord-1} [ g - w * D g ] with g the even-part result.
            let dg = self.first_derivative(axis);
            for i in 0..self.ny {
                for j in 0..self.neta {
                    let w = weight_of(i, j);
                    let br = (1.0 + w * w).sqrt();
                    let c = i * self.neta + j;
                    let d_op = Complex64::new(0.0, -1.0) * dg[c];
                    self.data[c] = (self.data[c] - w * d_op) * br.powi(-(ord as i32 + 1));
                }
            }
        }
    }

    /// `sum e^{-i y eta} data * hy * heta / (2 pi)` over the unpadded box,
    /// skipping the stencil-invalidated margin.
    fn oscillatory_sum(&self, margin_y: usize, margin_eta: usize) -> Complex64 {
        let mut acc = Complex64::default();
        for i in self.pad_y.max(margin_y)..self.ny - self.pad_y.max(margin_y) {
            let y = self.y(i);
            let mut row = Complex64::default();
            for j in self.pad_eta.max(margin_eta)..self.neta - self.pad_eta.max(margin_eta) {
                let eta = self.eta(j);
                let phase = Complex64::from_polar(1.0, -y * eta);
                row += phase * self.data[i * self.neta + j];
            }
            acc += row;
        }
        acc * self.hy * self.heta / (2.0 * std::f64::consts::PI)
    }
}

/// Diagnostics attached to the cutoff route.
#[derive(Debug, Clone)]
pub struct CutoffReport {
    pub value: Complex64,
    /// `(eps, quadrature value)` pairs in the order supplied.
    pub per_eps: Vec<(f64, Complex64)>,
    /// Final two extrapolants agreed within tolerance.
    pub converged: bool,
    /// Distance between the final two extrapolants.
    pub extrapolation_spread: f64,
}

fn quadrature(f: &dyn Fn(f64, f64) -> Complex64, ry: f64, reta: f64) -> Complex64 {
    Panel::sample(f, ry, reta, 0, 0).oscillatory_sum(0, 0)
}

/// Double a box until the value stabilizes; `Err` only when the value is
/// non-finite, otherwise the caller receives the converged flag.
fn adapt_boxes(
    f: &dyn Fn(f64, f64) -> Complex64,
    mut ry: f64,
    mut reta: f64,
) -> Result<(Complex64, f64, f64, bool)> {
    let mut value = quadrature(f, ry, reta);
    let mut converged = false;
    for _ in 0..MAX_DOUBLINGS {
        if panel_points(ry, reta * 2.0, 0, 0) > MAX_PANEL_POINTS {
            break;
        }
        let next = quadrature(f, ry, reta * 2.0);
        if (next - value).norm() <= TAIL_TOL * (1.0 + value.norm()) {
            break;
        }
        reta *= 2.0;
        value = next;
    }
    for _ in 0..MAX_DOUBLINGS {
        if panel_points(ry * 2.0, reta, 0, 0) > MAX_PANEL_POINTS {
            break;
        }
        let next = quadrature(f, ry * 2.0, reta);
        if (next - value).norm() <= TAIL_TOL * (1.0 + value.norm()) {
            converged = true;
            break;
        }
        ry *= 2.0;
        value = next;
    }
    if !value.is_finite() {
        return Err(Error::QuadratureDiverged(format!(
            "non-finite quadrature value on box ({ry}, {reta})"
        )));
    }
    Ok((value, ry, reta, converged))
}

/// Neville polynomial extrapolation to `t = 0`.
fn neville_at_zero(pts: &[(f64, Complex64)]) -> Complex64 {
    let mut vals: Vec<Complex64> = pts.iter().map(|p| p.1).collect();
    let ts: Vec<f64> = pts.iter().map(|p| p.0).collect();
    let n = vals.len();
    for level in 1..n {
        for i in 0..n - level {
            let (t0, t1) = (ts[i], ts[i + level]);
            vals[i] = (vals[i + 1] * t0 - vals[i] * t1) / (t0 - t1);
        }
    }
    vals[0]
}

/// Cutoff-route oscillatory integral with Richardson extrapolation of
/// polynomial order 3 over the damping sequence.
pub fn osc_cutoff(a: &Amplitude, chi: &Cutoff, eps_seq: &[f64]) -> Result<CutoffReport> {
    if (chi.eval(0.0, 0.0) - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidParameter {
            name: "chi",
            why: "cutoff must equal 1 at the origin".into(),
        });
    }
    if eps_seq.len() < 2 || eps_seq.windows(2).any(|w| w[1] >= w[0]) || eps_seq[0] <= 0.0 {
        return Err(Error::InvalidParameter {
            name: "eps_seq",
            why: "need a positive strictly decreasing damping sequence".into(),
        });
    }
    let mut per_eps = Vec::with_capacity(eps_seq.len());
    let mut ry = 8.0f64;
    let mut reta = 8.0f64;
    for &eps in eps_seq {
        let damped = |y: f64, eta: f64| a.eval(y, eta) * chi.eval(eps * y, eps * eta);
        let (v, ry_new, reta_new, _) = adapt_boxes(&damped, ry, reta)?;
        // Boxes only ever grow along the sequence: reuse for smaller eps.
        ry = ry_new;
        reta = reta_new;
        per_eps.push((eps, v));
    }
    // Richardson in t = eps^2 for even cutoff families, t = eps otherwise.
    let ts: Vec<(f64, Complex64)> = per_eps
        .iter()
        .map(|&(e, v)| (if chi.is_even_family() { e * e } else { e }, v))
        .collect();
    let order = 3.min(ts.len() - 1);
    let last = neville_at_zero(&ts[ts.len() - (order + 1)..]);
    let prev = neville_at_zero(&ts[ts.len() - 1 - order.min(ts.len() - 1)..ts.len() - 1]);
    let spread = (last - prev).norm();
    let converged = spread <= 1e-6 * (1.0 + last.norm());
    Ok(CutoffReport { value: last, per_eps, converged, extrapolation_spread: spread })
}

/// Parts-route report: the absolutely convergent quadrature value and the
/// boxes it stabilized on.
#[derive(Debug, Clone)]
pub struct PartsReport {
    pub value: Complex64,
    pub ry: f64,
    pub reta: f64,
    pub converged: bool,
}

/// Parts-route oscillatory integral (single quadrature, no damping limit).
pub fn osc_parts(a: &Amplitude, ord: RegularizerOrder) -> Result<PartsReport> {
    ord.validate(a)?;
    let pad_y = ord.l + 2;
    let pad_eta = ord.lp + 2;
    let eval_once = |ry: f64, reta: f64| -> Complex64 {
        let mut panel = Panel::sample(&|y, eta| a.eval(y, eta), ry, reta, pad_y, pad_eta);
        // First the y-direction operator with eta-multipliers, then the
        // eta-direction operator with y-multipliers.
        panel.apply_a_operator(0, ord.l);
        panel.apply_a_operator(1, ord.lp);
        panel.oscillatory_sum(0, 0)
    };
    let mut ry = 8.0f64;
    let mut reta = 8.0f64;
    let mut value = eval_once(ry, reta);
    let mut converged = false;
    for _ in 0..MAX_DOUBLINGS {
        if panel_points(ry, reta * 2.0, pad_y, pad_eta) > MAX_PANEL_POINTS {
            break;
        }
        let next = eval_once(ry, reta * 2.0);
        if (next - value).norm() <= TAIL_TOL * (1.0 + value.norm()) {
            break;
        }
        reta *= 2.0;
        value = next;
    }
    for _ in 0..MAX_DOUBLINGS {
        if panel_points(ry * 2.0, reta, pad_y, pad_eta) > MAX_PANEL_POINTS {
            break;
        }
        let next = eval_once(ry * 2.0, reta);
        if (next - value).norm() <= TAIL_TOL * (1.0 + value.norm()) {
            converged = true;
            break;
        }
        ry *= 2.0;
        value = next;
    }
    if !value.is_finite() {
        return Err(Error::QuadratureDiverged(format!(
            "parts quadrature non-finite on box ({ry}, {reta})"
        )));
    }
    Ok(PartsReport { value, ry, reta, converged })
}
