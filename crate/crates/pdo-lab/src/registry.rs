//! The scenario registry: named experiments, their descriptions, the
//! mathematical anchors they exercise, and their runner functions.

use pdo_core::grid::Grid;
use pdo_core::spaces::SpaceSpec;
use pdo_core::symbol::Symbol;

use crate::config::ExperimentConfig;
use crate::corpus;
use crate::report::ReportRecord;
use crate::scenarios;

/// A runtime failure attributed to one case (CLI exit code 3).
#[derive(Debug)]
pub struct RunError {
    pub case: String,
    pub message: String,
}

impl RunError {
    pub fn new(case: impl Into<String>, message: impl std::fmt::Display) -> Self {
        Self { case: case.into(), message: message.to_string() }
    }
}

impl std::fmt::Display for RunError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "case `{}`: {}", self.case, self.message)
    }
}

impl std::error::Error for RunError {}

/// Everything a runner needs: the validated configuration, the effective
/// seed, and the worker count (runners parallelize via the ambient rayon
/// pool, which `main` sizes to `workers`).
pub struct RunContext {
    pub config: ExperimentConfig,
    pub seed: u64,
    pub workers: usize,
}

impl RunContext {
    pub fn for_scenario(name: &str) -> Self {
        Self { config: ExperimentConfig::for_scenario(name), seed: 0, workers: 1 }
    }

    /// The configured grid, or the scenario default.
    pub fn grid_or(&self, dim: usize, box_radius: f64, points: usize) -> Result<Grid, RunError> {
        let (d, l, n) = match &self.config.grid {
            Some(g) => (g.dim, g.box_radius, g.points),
            None => (dim, box_radius, points),
        };
        Grid::new(d, l, n).map_err(|e| RunError::new("setup", e))
    }

    /// Configured symbol selections, or the given defaults. Each default is
    /// `(name, overrides)` with overrides in `(key, value)` form.
    pub fn symbols_or(
        &self,
        defaults: &[(&str, &[(&str, f64)])],
    ) -> Result<Vec<(String, Symbol)>, RunError> {
        if self.config.symbols.is_empty() {
            defaults
                .iter()
                .map(|(name, over)| {
                    let params: corpus::Params =
                        over.iter().map(|&(k, v)| (k.to_string(), v)).collect();
                    corpus::build(name, &params)
                        .map(|s| (name.to_string(), s))
                        .map_err(|e| RunError::new("setup", e))
                })
                .collect()
        } else {
            self.config
                .symbols
                .iter()
                .map(|sel| {
                    corpus::build(&sel.name, &sel.params)
                        .map(|s| (sel.name.clone(), s))
                        .map_err(|e| RunError::new("setup", e))
                })
                .collect()
        }
    }

    /// Configured space specifications, or the given `(s, p)` defaults.
    pub fn specs_or(&self, defaults: &[(f64, f64)]) -> Result<Vec<SpaceSpec>, RunError> {
        let list: Vec<(f64, f64)> = if self.config.specs.is_empty() {
            defaults.to_vec()
        } else {
            self.config.specs.iter().map(|sp| (sp.s, sp.p)).collect()
        };
        list.into_iter()
            .map(|(s, p)| SpaceSpec::new(s, p).map_err(|e| RunError::new("setup", e)))
            .collect()
    }
}

pub struct Scenario {
    pub name: &'static str,
    pub what: &'static str,
    /// Mathematical statements the scenario exercises.
    pub anchors: &'static [&'static str],
    pub run: fn(&RunContext) -> Result<Vec<ReportRecord>, RunError>,
}

/// The registry, sorted by name.
pub static SCENARIOS: &[Scenario] = &[
    Scenario {
        name: "boundedness-calibration",
        what: "operator-norm surrogates over probe ensembles against frozen ceilings",
        anchors: &[
            "||op(a) u||_{H^{s-m}_p} <= C |a|_{k} ||u||_{H^s_p}",
            "admissible window (1-rho) n/p - (1-delta)(m~+tau) < s < m~+tau",
        ],
        run: scenarios::boundedness::run,
    },
    Scenario {
        name: "composition-order",
        what: "truncated symbol composition against operator composition, order by order",
        anchors: &[
            "a1 #_k a2 = sum_{|gamma| < k} (1/gamma!) d_xi^gamma a1 . D_x^gamma a2",
            "op(a1) op(a2) - op(a1 #_k a2) shrinks as k grows",
            "first-order symbols terminate at the Leibniz rule",
        ],
        run: scenarios::composition::run,
    },
    Scenario {
        name: "index-invariance",
        what: "kernel/cokernel counts, spectral gaps, and winding across weighted spaces",
        anchors: &[
            "ind A = dim ker A - dim coker A, constant across H^s_p",
            "winding of a(x, xi) along a large phase-space loop equals the index",
            "i xi + x has index +1; -i xi + x has index -1",
        ],
        run: scenarios::index::run,
    },
    Scenario {
        name: "interpolation-suite",
        what: "randomized translate-difference, interpolation, and product inequality ratios",
        anchors: &[
            "||f(. - y) - f||_{C^{m~,t}} <= C |y|^{tau-t} ||f||_{C^{m~,tau}}",
            "||f||_{C^k_b} <= C ||f||_{C^0}^{1-theta} ||f||_{C^{m~,tau}}^theta",
            "||fg|| bounded by mixed Hoelder norm products",
        ],
        run: scenarios::interpolation::run,
    },
    Scenario {
        name: "mollify-convergence",
        what: "mollified symbols converge in weaker Hoelder seminorms at the declared rate",
        anchors: &[
            "a_eps -> a in the C^{m',t} class for t below the declared regularity",
            "seminorm distance decays like a power of eps",
        ],
        run: scenarios::mollify::run,
    },
    Scenario {
        name: "oscint-consistency",
        what: "cutoff and integration-by-parts routes to the oscillatory integral agree",
        anchors: &[
            "Os-iint e^{-i y eta} a(y, eta) dy deta / (2 pi)",
            "Os-iint e^{-i y eta} g(eta) = g(0)",
            "A^l operator regularization is order-independent",
        ],
        run: scenarios::oscint::run,
    },
    Scenario {
        name: "parametrix-residual",
        what: "elliptic approximate inverses kill high-frequency bands",
        anchors: &[
            "Q = <D>^{-m} op(psi a^{-1} <xi>^m) inverts op(a) up to lower order",
            "||(op(a) Q - I) u|| decays as the probe band floor doubles",
        ],
        run: scenarios::parametrix::run,
    },
    Scenario {
        name: "partition-check",
        what: "the dyadic frequency partition sums to one on its covered ball",
        anchors: &[
            "sum_{j=0}^{J} phi_j(xi) = 1 for |xi| <= 2^J",
            "supp phi_j inside the annulus 2^{j-1} <= |xi| <= 2^{j+1}",
        ],
        run: scenarios::partition::run,
    },
    Scenario {
        name: "perturbation-openness",
        what: "invertibility radii under a rough perturbation agree across spaces",
        anchors: &[
            "sigma_min(A + r op(h)) stays positive for r below a radius uniform in (s, p)",
            "kernel triviality persists at every admissible space",
        ],
        run: scenarios::perturbation::run,
    },
    Scenario {
        name: "quantization-anchors",
        what: "exact operators come out of the quantization rule",
        anchors: &[
            "op(1) = id",
            "op(i xi) = d/dx",
            "<D>^s <D>^{-s} = id",
        ],
        run: scenarios::quantization::run,
    },
    Scenario {
        name: "smoothing-split",
        what: "frequency-adapted smoothing splits symbols exactly; the rough part decays",
        anchors: &[
            "a = a# + ab with x-lowpass scale 2^{-j gamma} on the j-th dyadic block",
            "sup_x |ab(x, xi)| ~ <xi>^{m - (gamma-delta)(m~+tau) + eps~}",
        ],
        run: scenarios::smoothing::run,
    },
];

pub fn names() -> Vec<&'static str> {
    SCENARIOS.iter().map(|s| s.name).collect()
}

pub fn find(name: &str) -> Option<&'static Scenario> {
    SCENARIOS.binary_search_by(|s| s.name.cmp(name)).ok().map(|i| &SCENARIOS[i])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_is_sorted_with_descriptions_and_anchors() {
        for w in SCENARIOS.windows(2) {
            assert!(w[0].name < w[1].name, "{} out of order", w[1].name);
        }
        for s in SCENARIOS {
            assert!(!s.what.is_empty());
            assert!(!s.anchors.is_empty(), "{} needs at least one anchor", s.name);
        }
        for required in [
            "partition-check",
            "oscint-consistency",
            "mollify-convergence",
            "smoothing-split",
            "composition-order",
            "parametrix-residual",
            "boundedness-calibration",
            "index-invariance",
            "perturbation-openness",
            "interpolation-suite",
        ] {
            assert!(find(required).is_some(), "registry must contain {required}");
        }
    }
}
