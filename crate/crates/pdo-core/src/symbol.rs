//! Symbol representation: class metadata, closed-form evaluators, lazy
//! lattice views, and frequency-side finite differences.
//!
//! Operators are built from symbols `a(x, xi)` valued in small complex
//! matrices. Downstream machinery (seminorms, quantization, mollification,
//! smoothing, composition) only ever needs *x-slices at lattice frequencies*,
//! so the working abstraction is [`SliceSymbol`]: anything that can produce
//! the samples `a(x_lattice, xi_k)` for one frequency index and one matrix
//! component. Closed-form symbols also support arbitrary-point evaluation
//! (needed by the phase-winding probe and the oscillatory-integral oracles).

use std::sync::Arc;

use num_complex::Complex64;

use crate::cmat::CMat;
use crate::error::{Error, Result};
use crate::grid::Grid;

/// Class metadata for a symbol of order `m` and type `(rho, delta)` with
/// `C^{m~,tau}` regularity in `x`, frequency-derivative budget `xi_budget`
/// (`None` = unbounded) and matrix size `l`.
#[derive(Debug, Clone, Copy)]
pub struct SymbolMeta {
    pub m: f64,
    pub rho: f64,
    pub delta: f64,
    pub m_tilde: usize,
    pub tau: f64,
    pub xi_budget: Option<usize>,
    pub l: usize,
}

impl SymbolMeta {
    pub fn new(m: f64, rho: f64, delta: f64, m_tilde: usize, tau: f64) -> Result<Self> {
        for (name, v) in [("rho", rho), ("delta", delta)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::InvalidParameter {
                    name,
                    why: format!("need a value in [0,1], got {v}"),
                });
            }
        }
        if !(tau > 0.0 && tau < 1.0) {
            return Err(Error::InvalidParameter {
                name: "tau",
                why: format!("need 0 < tau < 1, got {tau}"),
            });
        }
        Ok(Self { m, rho, delta, m_tilde, tau, xi_budget: None, l: 1 })
    }

    /// Smooth symbol of order `m`, type `(1, 0)`, high nominal x-regularity.
    pub fn smooth(m: f64) -> Self {
        Self { m, rho: 1.0, delta: 0.0, m_tilde: 4, tau: 0.5, xi_budget: None, l: 1 }
    }

    pub fn with_budget(mut self, k: usize) -> Self {
        self.xi_budget = Some(k);
        self
    }

    pub fn with_matrix_size(mut self, l: usize) -> Self {
        assert!((1..=crate::cmat::MAX_L).contains(&l));
        self.l = l;
        self
    }

    pub fn with_type(mut self, rho: f64, delta: f64) -> Self {
        self.rho = rho;
        self.delta = delta;
        self
    }

    pub fn with_regularity(mut self, m_tilde: usize, tau: f64) -> Self {
        self.m_tilde = m_tilde;
        self.tau = tau;
        self
    }

    /// Check a requested frequency-derivative order against the budget.
    pub fn check_budget(&self, order: usize) -> Result<()> {
        match self.xi_budget {
            Some(b) if order > b => {
                Err(Error::DerivativeBudget { requested: order, declared: b })
            }
            _ => Ok(()),
        }
    }
}

/// One separable term `f(x) * g(xi)` of a symbol that declares a finite
/// separable expansion (enables the FFT fast path in quantization).
#[derive(Clone)]
pub struct SepTerm {
    pub xfn: Arc<dyn Fn(&[f64]) -> Complex64 + Send + Sync>,
    pub xifn: Arc<dyn Fn(&[f64]) -> Complex64 + Send + Sync>,
}

/// Anything that can produce lattice x-slices at lattice frequencies.
pub trait SliceSymbol: Send + Sync {
    fn meta(&self) -> &SymbolMeta;

    /// Samples of component `(row, col)` over the whole x-lattice at the
    /// frequency with FFT-order linear index `xi_idx`.
    fn slice(&self, grid: &Grid, xi_idx: usize, row: usize, col: usize) -> Result<Vec<Complex64>>;

    /// Separable expansion, when one is declared (scalar symbols only).
    fn separable(&self) -> Option<&[SepTerm]> {
        None
    }
}

type EvalFn = dyn Fn(&[f64], &[f64]) -> CMat + Send + Sync;
type ScalarFn = dyn Fn(&[f64], &[f64]) -> Complex64 + Send + Sync;
type LimitFn = dyn Fn(&[f64]) -> CMat + Send + Sync;

/// A closed-form symbol: evaluable at arbitrary `(x, xi)`.
#[derive(Clone)]
pub struct Symbol {
    pub meta: SymbolMeta,
    eval: Arc<EvalFn>,
    scalar: Option<Arc<ScalarFn>>,
    limit: Option<Arc<LimitFn>>,
    sep: Option<Vec<SepTerm>>,
}

impl Symbol {
    /// Scalar symbol from a closed-form callable.
    pub fn scalar(
        meta: SymbolMeta,
        f: impl Fn(&[f64], &[f64]) -> Complex64 + Send + Sync + 'static,
    ) -> Self {
        assert_eq!(meta.l, 1, "scalar constructor needs l = 1");
        let f = Arc::new(f);
        let g = f.clone();
        Self {
            meta,
            eval: Arc::new(move |x, xi| CMat::scalar(g(x, xi))),
            scalar: Some(f),
            limit: None,
            sep: None,
        }
    }

    /// Matrix symbol from a closed-form callable.
    pub fn matrix(
        meta: SymbolMeta,
        f: impl Fn(&[f64], &[f64]) -> CMat + Send + Sync + 'static,
    ) -> Self {
        Self { meta, eval: Arc::new(f), scalar: None, limit: None, sep: None }
    }

    /// Attach the limit symbol `a_inf(xi) = lim_{|x| -> inf} a(x, xi)`.
    pub fn with_limit(
        mut self,
        g: impl Fn(&[f64]) -> CMat + Send + Sync + 'static,
    ) -> Self {
        self.limit = Some(Arc::new(g));
        self
    }

    pub fn with_scalar_limit(
        self,
        g: impl Fn(&[f64]) -> Complex64 + Send + Sync + 'static,
    ) -> Self {
        self.with_limit(move |xi| CMat::scalar(g(xi)))
    }

    /// Declare a separable expansion `a = sum_i f_i(x) g_i(xi)`.
    pub fn with_separable(mut self, terms: Vec<SepTerm>) -> Self {
        assert_eq!(self.meta.l, 1, "separable fast path is scalar-only");
        self.sep = Some(terms);
        self
    }

    pub fn eval(&self, x: &[f64], xi: &[f64]) -> CMat {
        (self.eval)(x, xi)
    }

    pub fn eval_scalar(&self, x: &[f64], xi: &[f64]) -> Complex64 {
        match &self.scalar {
            Some(f) => f(x, xi),
            None => {
                debug_assert_eq!(self.meta.l, 1);
                self.eval(x, xi).as_scalar()
            }
        }
    }

    pub fn has_limit(&self) -> bool {
        self.limit.is_some()
    }

    /// The limit symbol at one frequency; errors when none was declared.
    pub fn limit(&self, xi: &[f64]) -> Result<CMat> {
        match &self.limit {
            Some(g) => Ok(g(xi)),
            None => Err(Error::MissingLimit),
        }
    }

    /// Pointwise sum; order is the max, regularity the min of the inputs.
    pub fn add(&self, other: &Symbol) -> Symbol {
        assert_eq!(self.meta.l, other.meta.l);
        let mut meta = self.meta;
        meta.m = self.meta.m.max(other.meta.m);
        meta.rho = self.meta.rho.min(other.meta.rho);
        meta.delta = self.meta.delta.max(other.meta.delta);
        meta.m_tilde = self.meta.m_tilde.min(other.meta.m_tilde);
        meta.tau = self.meta.tau.min(other.meta.tau);
        meta.xi_budget = match (self.meta.xi_budget, other.meta.xi_budget) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
        let (f, g) = (self.eval.clone(), other.eval.clone());
        let sep = match (&self.sep, &other.sep) {
            (Some(a), Some(b)) => {
                let mut t = a.clone();
                t.extend(b.iter().cloned());
                Some(t)
            }
            _ => None,
        };
        Symbol { meta, eval: Arc::new(move |x, xi| f(x, xi).add(&g(x, xi))), scalar: None, limit: None, sep }
    }

    /// Pointwise (matrix) product; orders add.
    pub fn mul(&self, other: &Symbol) -> Symbol {
        assert_eq!(self.meta.l, other.meta.l);
        let mut meta = self.meta;
        meta.m = self.meta.m + other.meta.m;
        meta.rho = self.meta.rho.min(other.meta.rho);
        meta.delta = self.meta.delta.max(other.meta.delta);
        meta.m_tilde = self.meta.m_tilde.min(other.meta.m_tilde);
        meta.tau = self.meta.tau.min(other.meta.tau);
        let (f, g) = (self.eval.clone(), other.eval.clone());
        Symbol { meta, eval: Arc::new(move |x, xi| f(x, xi).matmul(&g(x, xi))), scalar: None, limit: None, sep: None }
    }

    pub fn scale(&self, c: Complex64) -> Symbol {
        let f = self.eval.clone();
        let sep = self.sep.as_ref().map(|terms| {
            terms
                .iter()
                .map(|t| {
                    let xf = t.xfn.clone();
                    SepTerm { xfn: Arc::new(move |x| c * xf(x)), xifn: t.xifn.clone() }
                })
                .collect()
        });
        let limit = self.limit.as_ref().map(|g| {
            let g = g.clone();
            Arc::new(move |xi: &[f64]| g(xi).scale(c)) as Arc<LimitFn>
        });
        Symbol { meta: self.meta, eval: Arc::new(move |x, xi| f(x, xi).scale(c)), scalar: None, limit, sep }
    }
}

impl SliceSymbol for Symbol {
    fn meta(&self) -> &SymbolMeta {
        &self.meta
    }

    fn slice(&self, grid: &Grid, xi_idx: usize, row: usize, col: usize) -> Result<Vec<Complex64>> {
        let xi = grid.xi_coord(xi_idx);
        let total = grid.total_points();
        let mut out = Vec::with_capacity(total);
        if self.meta.l == 1 {
            if let Some(f) = &self.scalar {
                for i in 0..total {
                    out.push(f(&grid.x_coord(i), &xi));
                }
                return Ok(out);
            }
        }
        for i in 0..total {
            out.push(self.eval(&grid.x_coord(i), &xi).get(row, col));
        }
        Ok(out)
    }

    fn separable(&self) -> Option<&[SepTerm]> {
        self.sep.as_deref()
    }
}

/// A symbol stored as lattice samples (output of lattice-level calculus).
///
/// Data layout: `data[comp][xi_idx * total + x_idx]` with
/// `comp = row * l + col`.
pub struct LatticeSymbol {
    pub meta: SymbolMeta,
    total: usize,
    data: Vec<Vec<Complex64>>,
}

impl LatticeSymbol {
    pub fn new(meta: SymbolMeta, grid: &Grid, data: Vec<Vec<Complex64>>) -> Result<Self> {
        let total = grid.total_points();
        if data.len() != meta.l * meta.l {
            return Err(Error::ShapeMismatch { expected: meta.l * meta.l, got: data.len() });
        }
        for comp in &data {
            if comp.len() != total * total {
                return Err(Error::ShapeMismatch { expected: total * total, got: comp.len() });
            }
        }
        Ok(Self { meta, total, data })
    }

    /// Sample a slice provider over the whole lattice (use only at sizes
    /// where `total^2` storage is acceptable).
    pub fn materialize(sym: &dyn SliceSymbol, grid: &Grid) -> Result<Self> {
        let meta = *sym.meta();
        let total = grid.total_points();
        let mut data = Vec::with_capacity(meta.l * meta.l);
        for row in 0..meta.l {
            for col in 0..meta.l {
                let mut comp = Vec::with_capacity(total * total);
                for xi_idx in 0..total {
                    comp.extend(sym.slice(grid, xi_idx, row, col)?);
                }
                data.push(comp);
            }
        }
        Ok(Self { meta, total, data })
    }

    pub fn value(&self, xi_idx: usize, x_idx: usize, row: usize, col: usize) -> Complex64 {
        self.data[row * self.meta.l + col][xi_idx * self.total + x_idx]
    }
}

impl SliceSymbol for LatticeSymbol {
    fn meta(&self) -> &SymbolMeta {
        &self.meta
    }

    fn slice(&self, grid: &Grid, xi_idx: usize, row: usize, col: usize) -> Result<Vec<Complex64>> {
        let total = grid.total_points();
        if total != self.total {
            return Err(Error::ShapeMismatch { expected: self.total, got: total });
        }
        let comp = &self.data[row * self.meta.l + col];
        Ok(comp[xi_idx * total..(xi_idx + 1) * total].to_vec())
    }
}

/// Pointwise difference of two slice providers (shares the left meta).
pub struct DiffSymbol<'a> {
    pub a: &'a dyn SliceSymbol,
    pub b: &'a dyn SliceSymbol,
}

impl SliceSymbol for DiffSymbol<'_> {
    fn meta(&self) -> &SymbolMeta {
        self.a.meta()
    }

    fn slice(&self, grid: &Grid, xi_idx: usize, row: usize, col: usize) -> Result<Vec<Complex64>> {
        let mut s = self.a.slice(grid, xi_idx, row, col)?;
        let t = self.b.slice(grid, xi_idx, row, col)?;
        for (u, v) in s.iter_mut().zip(&t) {
            *u -= v;
        }
        Ok(s)
    }
}

/// Signed per-axis frequency indices of the lattice point `xi_idx`.
fn signed_k(grid: &Grid, xi_idx: usize) -> [i64; 2] {
    let n = grid.points_per_axis() as i64;
    let [a, b] = grid.split_index(xi_idx);
    let unfold = |k: i64| if k >= n / 2 { k - n } else { k };
    match grid.dim() {
        1 => [unfold(a as i64), 0],
        _ => [unfold(a as i64), unfold(b as i64)],
    }
}

/// Linear FFT-order index for signed per-axis frequency indices.
fn fold_k(grid: &Grid, k: [i64; 2]) -> usize {
    let n = grid.points_per_axis() as i64;
    let fold = |v: i64| ((v + n) % n) as usize;
    match grid.dim() {
        1 => fold(k[0]),
        _ => fold(k[0]) * grid.points_per_axis() + fold(k[1]),
    }
}

/// How far (in lattice steps per axis) a frequency index sits from the
/// non-periodic edge of the sampled frequency box.
pub fn edge_margin(grid: &Grid, xi_idx: usize) -> usize {
    let n = grid.points_per_axis() as i64;
    let k = signed_k(grid, xi_idx);
    let axes = grid.dim();
    (0..axes)
        .map(|ax| {
            let v = k[ax];
            // Valid signed range is -n/2 ..= n/2 - 1.
            ((n / 2 - 1 - v).min(v + n / 2)) as usize
        })
        .min()
        .unwrap_or(0)
}

/// Slice of the frequency-side derivative `∂_xi^alpha a(·, xi)` at a lattice
/// frequency, by fourth-order centred differences *on the frequency
/// lattice*. Works uniformly for closed-form and lattice-sampled symbols.
///
/// Higher orders compose the first-derivative stencil with itself (difference
/// operators commute), so each distinct shifted slice is fetched once.
/// Errors when the stencil would leave the sampled frequency box.
pub fn xi_derivative_slice(
    sym: &dyn SliceSymbol,
    grid: &Grid,
    xi_idx: usize,
    alpha: &[usize],
    row: usize,
    col: usize,
) -> Result<Vec<Complex64>> {
    let order: usize = alpha.iter().sum();
    sym.meta().check_budget(order)?;
    if edge_margin(grid, xi_idx) < 2 * order {
        return Err(Error::InvalidParameter {
            name: "xi_idx",
            why: format!(
                "frequency index {xi_idx} is {} steps from the box edge, stencil needs {}",
                edge_margin(grid, xi_idx),
                2 * order
            ),
        });
    }
    let inv = 1.0 / (12.0 * grid.xi_spacing());
    let stencil = [(-2i64, inv), (-1, -8.0 * inv), (1, 8.0 * inv), (2, -inv)];
    // Accumulated stencil: offset pair -> coefficient.
    let mut coeffs: Vec<([i64; 2], f64)> = vec![([0, 0], 1.0)];
    for (axis, &ord) in alpha.iter().enumerate() {
        for _ in 0..ord {
            let mut next: Vec<([i64; 2], f64)> = Vec::with_capacity(coeffs.len() * 4);
            for &(off, c) in &coeffs {
                for &(d, w) in &stencil {
                    let mut o = off;
                    o[axis] += d;
                    match next.iter_mut().find(|(p, _)| *p == o) {
                        Some((_, acc)) => *acc += c * w,
                        None => next.push((o, c * w)),
                    }
                }
            }
            coeffs = next;
        }
    }
    let base = signed_k(grid, xi_idx);
    let mut out = vec![Complex64::default(); grid.total_points()];
    for &(off, c) in &coeffs {
        let k = [base[0] + off[0], base[1] + off[1]];
        let s = sym.slice(grid, fold_k(grid, k), row, col)?;
        for (o, v) in out.iter_mut().zip(&s) {
            *o += c * v;
        }
    }
    Ok(out)
}

/// A deterministic panel of frequency indices used for lattice suprema.
///
/// For small grids this is every index with enough edge margin; for large
/// grids it follows a geometric ladder along each axis (and the diagonals in
/// dimension two) so that every dyadic frequency range stays represented.
pub fn xi_panel(grid: &Grid, margin: usize) -> Vec<usize> {
    let n = grid.points_per_axis() as i64;
    let half = n / 2;
    let hi = half - 1 - margin as i64;
    let axis_vals: Vec<i64> = if hi <= 24 {
        (-(hi)..=hi).collect()
    } else {
        let mut vals = vec![0i64];
        let mut v = 1.0f64;
        while (v as i64) <= hi {
            let k = v as i64;
            vals.push(k);
            vals.push(-k);
            v = (v * 1.25).max(v + 1.0);
        }
        vals.push(hi);
        vals.push(-hi);
        vals.sort_unstable();
        vals.dedup();
        vals
    };
    let mut out: Vec<usize> = match grid.dim() {
        1 => axis_vals.iter().map(|&k| fold_k(grid, [k, 0])).collect(),
        _ => {
            let mut idx = Vec::new();
            for &k in &axis_vals {
                idx.push(fold_k(grid, [k, 0]));
                idx.push(fold_k(grid, [0, k]));
                idx.push(fold_k(grid, [k, k]));
                idx.push(fold_k(grid, [k, -k]));
            }
            idx
        }
    };
    out.sort_unstable();
    out.dedup();
    out.retain(|&i| edge_margin(grid, i) >= margin);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::bracket;

    fn bracket_symbol(m: f64) -> Symbol {
        Symbol::scalar(SymbolMeta::smooth(m), move |_x, xi| {
            Complex64::new(bracket(xi).powf(m), 0.0)
        })
    }

    #[test]
    fn meta_validation_and_budget() {
        assert!(SymbolMeta::new(1.0, 1.5, 0.0, 1, 0.5).is_err());
        assert!(SymbolMeta::new(1.0, 1.0, 0.0, 1, 1.0).is_err());
        let meta = SymbolMeta::new(1.0, 1.0, 0.0, 1, 0.5).unwrap().with_budget(2);
        assert!(meta.check_budget(2).is_ok());
        assert!(matches!(
            meta.check_budget(3),
            Err(Error::DerivativeBudget { requested: 3, declared: 2 })
        ));
    }

    #[test]
    fn slices_match_pointwise_evaluation() {
        let grid = Grid::new(1, 8.0, 64).unwrap();
        let a = Symbol::scalar(SymbolMeta::smooth(1.0), |x, xi| {
            Complex64::new(x[0].cos() * bracket(xi), x[0].sin())
        });
        let xi_idx = 7;
        let s = a.slice(&grid, xi_idx, 0, 0).unwrap();
        let xi = grid.xi_coord(xi_idx);
        for (i, &v) in s.iter().enumerate() {
            let want = a.eval_scalar(&grid.x_coord(i), &xi);
            assert_eq!(v, want);
        }
    }

    #[test]
    fn xi_derivative_matches_closed_form() {
        let grid = Grid::new(1, 8.0, 256).unwrap();
        let a = bracket_symbol(2.0);
        // d/dxi <xi>^2 = 2 xi; d2/dxi2 <xi>^2 = 2.
        for &k in &[0i64, 5, -9, 40, -70] {
            let idx = fold_k(&grid, [k, 0]);
            let xi = grid.xi_coord(idx)[0];
            let d1 = xi_derivative_slice(&a, &grid, idx, &[1], 0, 0).unwrap();
            assert!(
                (d1[0].re - 2.0 * xi).abs() < 1e-6 * (1.0 + xi.abs()),
                "k = {k}: {} vs {}",
                d1[0].re,
                2.0 * xi
            );
            let d2 = xi_derivative_slice(&a, &grid, idx, &[2], 0, 0).unwrap();
            assert!((d2[0].re - 2.0).abs() < 1e-5, "k = {k}: {}", d2[0].re);
        }
    }

    #[test]
    fn xi_derivative_respects_edges_and_budget() {
        let grid = Grid::new(1, 8.0, 64).unwrap();
        let a = bracket_symbol(1.0).clone();
        // The most negative frequency has no room for a centred stencil.
        let edge_idx = fold_k(&grid, [-32, 0]);
        assert!(xi_derivative_slice(&a, &grid, edge_idx, &[1], 0, 0).is_err());
        let mut b = bracket_symbol(1.0);
        b.meta = b.meta.with_budget(1);
        assert!(xi_derivative_slice(&b, &grid, fold_k(&grid, [0, 0]), &[2], 0, 0).is_err());
    }

    #[test]
    fn panel_covers_dyadic_ranges() {
        let grid = Grid::new(1, 64.0, 2048).unwrap();
        let panel = xi_panel(&grid, 4);
        assert!(panel.len() < 200, "panel too large: {}", panel.len());
        // Every dyadic magnitude range below the edge holds a panel point.
        for j in 0..=4 {
            let lo = 2.0f64.powi(j);
            let hi = 2.0 * lo;
            let found = panel.iter().any(|&i| {
                let xi = grid.xi_coord(i)[0].abs();
                xi >= lo && xi < hi
            });
            assert!(found, "no panel point with |xi| in [{lo},{hi})");
        }
        for &i in &panel {
            assert!(edge_margin(&grid, i) >= 4);
        }
    }

    #[test]
    fn lattice_symbol_round_trip() {
        let grid = Grid::new(1, 4.0, 32).unwrap();
        let a = Symbol::scalar(SymbolMeta::smooth(0.0), |x, xi| {
            Complex64::new((x[0] + xi[0]).sin(), x[0] * 0.1)
        });
        let mat = LatticeSymbol::materialize(&a, &grid).unwrap();
        for xi_idx in [0usize, 3, 17, 31] {
            let want = a.slice(&grid, xi_idx, 0, 0).unwrap();
            let got = mat.slice(&grid, xi_idx, 0, 0).unwrap();
            assert_eq!(want, got);
        }
        let d = DiffSymbol { a: &a, b: &mat };
        let z = d.slice(&grid, 5, 0, 0).unwrap();
        assert!(z.iter().all(|v| v.norm() == 0.0));
    }

    #[test]
    fn combinators_compose_values_and_meta() {
        let a = bracket_symbol(1.0);
        let b = Symbol::scalar(SymbolMeta::smooth(0.0), |x, _| Complex64::new(2.0 + x[0].cos(), 0.0));
        let sum = a.add(&b);
        let prod = a.mul(&b);
        let x = [0.7];
        let xi = [1.3];
        let va = a.eval_scalar(&x, &xi);
        let vb = b.eval_scalar(&x, &xi);
        assert!((sum.eval(&x, &xi).as_scalar() - (va + vb)).norm() < 1e-15);
        assert!((prod.eval(&x, &xi).as_scalar() - va * vb).norm() < 1e-15);
        assert_eq!(sum.meta.m, 1.0);
        assert_eq!(prod.meta.m, 1.0);
        let half = a.scale(Complex64::new(0.5, 0.0));
        assert!((half.eval(&x, &xi).as_scalar() - 0.5 * va).norm() < 1e-15);
    }

    #[test]
    fn limit_present_and_missing() {
        let a = bracket_symbol(1.0);
        assert!(matches!(a.limit(&[0.0]), Err(Error::MissingLimit)));
        let with = a.clone().with_scalar_limit(|xi| Complex64::new(bracket(xi), 0.0));
        assert!(with.has_limit());
        let v = with.limit(&[2.0]).unwrap().as_scalar();
        assert!((v.re - bracket(&[2.0])).abs() < 1e-15);
    }
}
