//! The named symbol corpus.
//!
//! Every scenario references its symbols by name through this registry, and a
//! configuration file can override the numeric parameters of any entry.  All
//! trigonometric profiles use integer spatial frequencies, so they are exact
//! lattice fields on any box whose half-width is an integer multiple of pi.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_complex::Complex64;
use pdo_core::cmat::CMat;
use pdo_core::grid::bracket;
use pdo_core::symbol::{SepTerm, Symbol, SymbolMeta};

/// A parameter map as it appears in configuration files.
pub type Params = BTreeMap<String, f64>;

/// One corpus entry: a named builder plus the parameters it understands.
pub struct SymbolEntry {
    pub name: &'static str,
    pub what: &'static str,
    /// `(parameter, default)` pairs accepted by the builder.
    pub params: &'static [(&'static str, f64)],
    build: fn(&ResolvedParams) -> Symbol,
}

/// Parameters after defaults and overrides are merged.
pub struct ResolvedParams(BTreeMap<&'static str, f64>);

impl ResolvedParams {
    fn get(&self, name: &str) -> f64 {
        *self
            .0
            .get(name)
            .unwrap_or_else(|| panic!("builder asked for undeclared parameter `{name}`"))
    }
}

/// Errors surfaced to configuration validation.
#[derive(Debug, thiserror::Error)]
pub enum CorpusError {
    #[error("unknown symbol `{0}`; run `pdo-lab list` for the registry")]
    UnknownSymbol(String),
    #[error("symbol `{symbol}` does not accept parameter `{param}`")]
    UnknownParam { symbol: String, param: String },
    #[error("symbol `{symbol}`: parameter `{param}` = {value} is out of range ({why})")]
    BadParam { symbol: String, param: String, value: f64, why: String },
}

/// A real even trigonometric sum `base + sum_k amp_k cos(2^k x)` with
/// `amp_k = 2^{-exponent k}`: the standard lacunary profile whose classical
/// regularity is exactly `exponent` Hoelder derivatives.
pub fn lacunary_profile(exponent: f64, first: usize, last: usize) -> impl Fn(f64) -> f64 + Clone {
    move |x: f64| {
        (first..=last)
            .map(|k| 2.0f64.powf(-exponent * k as f64) * (2.0f64.powi(k as i32) * x).cos())
            .sum::<f64>()
    }
}

fn separable_scalar(
    meta: SymbolMeta,
    xfn: impl Fn(f64) -> Complex64 + Clone + Send + Sync + 'static,
    xifn: impl Fn(&[f64]) -> Complex64 + Clone + Send + Sync + 'static,
) -> Symbol {
    let xf = xfn.clone();
    let gf = xifn.clone();
    Symbol::scalar(meta, move |x, xi| xf(x[0]) * gf(xi)).with_separable(vec![SepTerm {
        xfn: Arc::new(move |x: &[f64]| xfn(x[0])),
        xifn: Arc::new(xifn),
    }])
}

fn build_identity(_p: &ResolvedParams) -> Symbol {
    separable_scalar(
        SymbolMeta::smooth(0.0).with_budget(8),
        |_| Complex64::new(1.0, 0.0),
        |_| Complex64::new(1.0, 0.0),
    )
}

fn build_bracket(p: &ResolvedParams) -> Symbol {
    let m = p.get("m");
    separable_scalar(
        SymbolMeta::smooth(m).with_budget(6),
        |_| Complex64::new(1.0, 0.0),
        move |xi| Complex64::new(bracket(xi).powf(m), 0.0),
    )
}

fn build_derivative(_p: &ResolvedParams) -> Symbol {
    separable_scalar(
        SymbolMeta::smooth(1.0).with_budget(6),
        |_| Complex64::new(1.0, 0.0),
        |xi| Complex64::new(0.0, xi[0]),
    )
}

fn build_trig_multiplier(p: &ResolvedParams) -> Symbol {
    let (base, cos_amp, sin2_amp) = (p.get("base"), p.get("cos_amp"), p.get("sin2_amp"));
    separable_scalar(
        SymbolMeta::smooth(0.0).with_budget(8),
        move |x| Complex64::new(base + cos_amp * x.cos() + sin2_amp * (2.0 * x).sin(), 0.0),
        |_| Complex64::new(1.0, 0.0),
    )
}

fn build_trig_bracket(p: &ResolvedParams) -> Symbol {
    let m = p.get("m");
    separable_scalar(
        SymbolMeta::smooth(m).with_budget(6),
        |x| Complex64::new(2.0 + x.cos(), 0.0),
        move |xi| Complex64::new(bracket(xi).powf(m), 0.0),
    )
}

fn build_rough_bracket(p: &ResolvedParams) -> Symbol {
    let (m, tau) = (p.get("m"), p.get("tau"));
    let terms = p.get("terms") as usize;
    let rough = lacunary_profile(tau, 2, 1 + terms);
    let meta = SymbolMeta::new(m, 1.0, 0.0, 0, tau)
        .expect("validated parameters")
        .with_budget(6);
    separable_scalar(
        meta,
        move |x| Complex64::new(2.0 + x.cos() + rough(x), 0.0),
        move |xi| Complex64::new(bracket(xi).powf(m), 0.0),
    )
}

fn build_c1_rough_bracket(p: &ResolvedParams) -> Symbol {
    let (m, tau) = (p.get("m"), p.get("tau"));
    let terms = p.get("terms") as usize;
    // Amplitudes 2^{-(1+tau)k}: one classical derivative on top of the
    // Hoelder-tau lacunary profile.
    let rough = lacunary_profile(1.0 + tau, 0, terms.saturating_sub(1));
    let meta = SymbolMeta::new(m, 1.0, 0.0, 1, tau)
        .expect("validated parameters")
        .with_budget(6);
    separable_scalar(
        meta,
        move |x| Complex64::new(2.0 + rough(x), 0.0),
        move |xi| Complex64::new(bracket(xi).powf(m), 0.0),
    )
}

fn build_ladder_up(_p: &ResolvedParams) -> Symbol {
    Symbol::scalar(SymbolMeta::smooth(1.0).with_budget(6), |x, xi| Complex64::new(x[0], xi[0]))
        .with_separable(vec![
            SepTerm {
                xfn: Arc::new(|_| Complex64::new(1.0, 0.0)),
                xifn: Arc::new(|xi: &[f64]| Complex64::new(0.0, xi[0])),
            },
            SepTerm {
                xfn: Arc::new(|x: &[f64]| Complex64::new(x[0], 0.0)),
                xifn: Arc::new(|_| Complex64::new(1.0, 0.0)),
            },
        ])
}

fn build_ladder_down(_p: &ResolvedParams) -> Symbol {
    Symbol::scalar(SymbolMeta::smooth(1.0).with_budget(6), |x, xi| Complex64::new(x[0], -xi[0]))
        .with_separable(vec![
            SepTerm {
                xfn: Arc::new(|_| Complex64::new(1.0, 0.0)),
                xifn: Arc::new(|xi: &[f64]| Complex64::new(0.0, -xi[0])),
            },
            SepTerm {
                xfn: Arc::new(|x: &[f64]| Complex64::new(x[0], 0.0)),
                xifn: Arc::new(|_| Complex64::new(1.0, 0.0)),
            },
        ])
}

fn build_winding_zero(_p: &ResolvedParams) -> Symbol {
    Symbol::scalar(SymbolMeta::smooth(0.0).with_budget(6), |x, _| {
        Complex64::new(2.0 + x[0].cos(), 0.5 * x[0].sin())
    })
}

fn build_coupled_bracket(p: &ResolvedParams) -> Symbol {
    let c = p.get("coupling");
    Symbol::scalar(SymbolMeta::smooth(1.0).with_budget(6), move |x, xi| {
        Complex64::new(bracket(xi), c * x[0].cos() * xi[0])
    })
}

fn build_jordan_block(_p: &ResolvedParams) -> Symbol {
    Symbol::matrix(
        SymbolMeta::smooth(1.0).with_budget(6).with_matrix_size(2),
        |x: &[f64], xi: &[f64]| {
            let mut a = CMat::zeros(2);
            let b = Complex64::new(bracket(xi), 0.0);
            a.set(0, 0, b);
            a.set(1, 1, b);
            a.set(0, 1, Complex64::new(x[0].cos(), 0.0));
            a
        },
    )
}

/// The registry, sorted by name.
pub const SYMBOLS: &[SymbolEntry] = &[
    SymbolEntry {
        name: "bracket",
        what: "<xi>^m, the x-independent weight of order m",
        params: &[("m", 1.0)],
        build: build_bracket,
    },
    SymbolEntry {
        name: "coupled-bracket",
        what: "<xi> + i c cos(x) xi: first order with genuine x-xi coupling",
        params: &[("coupling", 0.5)],
        build: build_coupled_bracket,
    },
    SymbolEntry {
        name: "derivative",
        what: "i xi, the first spatial derivative",
        params: &[],
        build: build_derivative,
    },
    SymbolEntry {
        name: "identity",
        what: "the constant symbol 1",
        params: &[],
        build: build_identity,
    },
    SymbolEntry {
        name: "jordan-block",
        what: "2x2 upper-triangular [<xi>, cos x; 0, <xi>]",
        params: &[],
        build: build_jordan_block,
    },
    SymbolEntry {
        name: "ladder-down",
        what: "-i xi + x, the lowering ladder operator (index -1)",
        params: &[],
        build: build_ladder_down,
    },
    SymbolEntry {
        name: "ladder-up",
        what: "i xi + x, the raising ladder operator (index +1)",
        params: &[],
        build: build_ladder_up,
    },
    SymbolEntry {
        name: "one-rough-bracket",
        what: "(2 + lacunary C^{1,tau} profile) <xi>^m: one classical derivative plus Hoelder tail",
        params: &[("m", 1.0), ("tau", 0.7), ("terms", 10.0)],
        build: build_c1_rough_bracket,
    },
    SymbolEntry {
        name: "rough-bracket",
        what: "(2 + cos x + lacunary C^{0,tau} profile) <xi>^m: the rough Hoelder family",
        params: &[("m", 1.0), ("tau", 0.7), ("terms", 8.0)],
        build: build_rough_bracket,
    },
    SymbolEntry {
        name: "trig-bracket",
        what: "(2 + cos x) <xi>^m: smooth, elliptic, first order by default",
        params: &[("m", 1.0)],
        build: build_trig_bracket,
    },
    SymbolEntry {
        name: "trig-multiplier",
        what: "base + cos_amp cos(x) + sin2_amp sin(2x): a smooth multiplication operator",
        params: &[("base", 2.0), ("cos_amp", 1.0), ("sin2_amp", 0.0)],
        build: build_trig_multiplier,
    },
    SymbolEntry {
        name: "winding-zero",
        what: "(2 + cos x) + 0.5 i sin x: invertible order zero, winding 0",
        params: &[],
        build: build_winding_zero,
    },
];

pub fn find(name: &str) -> Option<&'static SymbolEntry> {
    SYMBOLS.binary_search_by(|e| e.name.cmp(name)).ok().map(|i| &SYMBOLS[i])
}

/// Validate overrides against an entry and produce the merged parameter set.
fn resolve(entry: &SymbolEntry, overrides: &Params) -> Result<ResolvedParams, CorpusError> {
    let mut merged: BTreeMap<&'static str, f64> =
        entry.params.iter().map(|&(k, v)| (k, v)).collect();
    for (key, &value) in overrides {
        let slot = entry
            .params
            .iter()
            .find(|&&(k, _)| k == key)
            .map(|&(k, _)| k)
            .ok_or_else(|| CorpusError::UnknownParam {
                symbol: entry.name.into(),
                param: key.clone(),
            })?;
        if !value.is_finite() {
            return Err(CorpusError::BadParam {
                symbol: entry.name.into(),
                param: key.clone(),
                value,
                why: "must be finite".into(),
            });
        }
        merged.insert(slot, value);
    }
    for (check, why) in [
        ("tau", "need 0 < tau < 1"),
        ("terms", "need at least 2 profile terms"),
    ] {
        if let Some(&v) = merged.get(check) {
            let bad = match check {
                "tau" => !(v > 0.0 && v < 1.0),
                _ => v < 2.0,
            };
            if bad {
                return Err(CorpusError::BadParam {
                    symbol: entry.name.into(),
                    param: check.into(),
                    value: v,
                    why: why.into(),
                });
            }
        }
    }
    Ok(ResolvedParams(merged))
}

/// Build a corpus symbol with parameter overrides.
pub fn build(name: &str, overrides: &Params) -> Result<Symbol, CorpusError> {
    let entry = find(name).ok_or_else(|| CorpusError::UnknownSymbol(name.into()))?;
    let params = resolve(entry, overrides)?;
    Ok((entry.build)(&params))
}

/// Build with defaults only.
pub fn build_default(name: &str) -> Symbol {
    build(name, &Params::new()).expect("registry name with default parameters")
}

/// Build with slice-style overrides.
pub fn build_with(name: &str, overrides: &[(&str, f64)]) -> Result<Symbol, CorpusError> {
    let params: Params = overrides.iter().map(|&(k, v)| (k.to_string(), v)).collect();
    build(name, &params)
}
