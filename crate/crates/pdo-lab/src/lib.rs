//! Experiment driver for the pseudodifferential operator laboratory.
//!
//! The crate wraps the numerical kernels of `pdo-core` into named, configured
//! experiment scenarios with deterministic randomized corpora, machine-readable
//! reports (CSV + JSON), and a command-line entry point.
//!
//! Layout:
//! - [`tolerances`]: the single table of every asserted bound, shared by the
//!   scenario runners and the acceptance suite.
//! - [`rng`]: splittable per-case random streams keyed by `(seed, scenario,
//!   case)`, so corpora are order-independent and reproducible.
//! - [`corpus`]: the named symbol registry (ladder operators, trigonometric
//!   and rough Hölder families) with parameter overrides.
//! - [`config`]: the JSON experiment configuration and its validation.
//! - [`report`]: per-case records, verdicts, and the CSV/JSON writers.
//! - [`registry`]: the scenario table binding everything together.

pub mod config;
pub mod corpus;
pub mod registry;
pub mod report;
pub mod rng;
pub mod scenarios;
pub mod tolerances;
