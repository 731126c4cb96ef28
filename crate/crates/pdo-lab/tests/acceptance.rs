//! Acceptance gate: ten numbered criteria, one verdict line each.
//!
//! Every criterion drives the corresponding scenario runner(s) with the
//! default configuration and seed, requires a clean verdict sheet, re-checks
//! the headline quantities against the shared tolerance table, and enforces
//! a wall-clock budget. The criteria run sequentially (this target opts out
//! of the default test harness) so the budgets measure real elapsed time.

use std::time::Instant;

use pdo_lab::registry::{self, RunContext};
use pdo_lab::report::{ReportRecord, Verdict};
use pdo_lab::tolerances::require;

struct Criterion {
    number: u32,
    label: &'static str,
    scenario: &'static str,
    budget_s: f64,
    extra: fn(&[ReportRecord]) -> Result<(), String>,
}

const CRITERIA: [Criterion; 10] = [
    Criterion {
        number: 1,
        label: "partition-of-unity",
        scenario: "partition-check",
        budget_s: 1.0,
        extra: extra_partition,
    },
    Criterion {
        number: 2,
        label: "quantization-anchors",
        scenario: "quantization-anchors",
        budget_s: 5.0,
        extra: extra_quantization,
    },
    Criterion {
        number: 3,
        label: "oscillatory-routes",
        scenario: "oscint-consistency",
        budget_s: 30.0,
        extra: extra_oscint,
    },
    Criterion {
        number: 4,
        label: "mollification-rates",
        scenario: "mollify-convergence",
        budget_s: 60.0,
        extra: extra_mollify,
    },
    Criterion {
        number: 5,
        label: "smooth-rough-split",
        scenario: "smoothing-split",
        budget_s: 60.0,
        extra: extra_smoothing,
    },
    Criterion {
        number: 6,
        label: "composition-orders",
        scenario: "composition-order",
        budget_s: 60.0,
        extra: extra_composition,
    },
    Criterion {
        number: 7,
        label: "parametrix-residuals",
        scenario: "parametrix-residual",
        budget_s: 30.0,
        extra: extra_parametrix,
    },
    Criterion {
        number: 8,
        label: "index-invariance",
        scenario: "index-invariance",
        budget_s: 120.0,
        extra: extra_index,
    },
    Criterion {
        number: 9,
        label: "perturbation-openness",
        scenario: "perturbation-openness",
        budget_s: 60.0,
        extra: extra_perturbation,
    },
    Criterion {
        number: 10,
        label: "estimate-library",
        scenario: "interpolation-suite",
        budget_s: 120.0,
        extra: extra_interpolation,
    },
];

fn main() {
    let mut failures = Vec::new();
    let total = Instant::now();
    for c in &CRITERIA {
        let start = Instant::now();
        let outcome = run_criterion(c);
        let elapsed = start.elapsed().as_secs_f64();
        let mut problems: Vec<String> = Vec::new();
        if let Err(e) = outcome {
            problems.push(e);
        }
        if elapsed > c.budget_s {
            problems.push(format!("budget exceeded: {elapsed:.1}s > {}s", c.budget_s));
        }
        let verdict = if problems.is_empty() { "PASS" } else { "FAIL" };
        println!("criterion-{:02} {}: {} ({:.1}s)", c.number, c.label, verdict, elapsed);
        for p in &problems {
            println!("    {p}");
        }
        if !problems.is_empty() {
            failures.push(c.number);
        }
    }
    println!("acceptance total: {:.1}s", total.elapsed().as_secs_f64());
    if !failures.is_empty() {
        eprintln!("failing criteria: {failures:?}");
        std::process::exit(1);
    }
}

/// Run the scenario with defaults and require a clean sheet plus the
/// criterion's own extracts.
fn run_criterion(c: &Criterion) -> Result<(), String> {
    let ctx = RunContext::for_scenario(c.scenario);
    let sc = registry::find(c.scenario).ok_or_else(|| format!("unknown scenario {}", c.scenario))?;
    let records = (sc.run)(&ctx).map_err(|e| format!("runner error: {e}"))?;
    let failed: Vec<&str> = records
        .iter()
        .filter(|r| r.verdict == Verdict::Fail)
        .map(|r| r.case.as_str())
        .collect();
    if !failed.is_empty() {
        return Err(format!("failing cases: {}", failed.join(", ")));
    }
    (c.extra)(&records)
}

/// Extract a named quantity from a named case.
fn value_of(records: &[ReportRecord], case: &str, name: &str) -> Result<f64, String> {
    let r = records
        .iter()
        .find(|r| r.case == case)
        .ok_or_else(|| format!("case {case} missing"))?;
    r.quantities
        .iter()
        .find(|q| q.name == name)
        .map(|q| q.value)
        .ok_or_else(|| format!("quantity {name} missing from case {case}"))
}

fn expect_le(records: &[ReportRecord], case: &str, name: &str, bound: f64) -> Result<(), String> {
    let v = value_of(records, case, name)?;
    if v <= bound {
        Ok(())
    } else {
        Err(format!("{case}/{name} = {v:e} exceeds {bound:e}"))
    }
}

fn expect_ge(records: &[ReportRecord], case: &str, name: &str, bound: f64) -> Result<(), String> {
    let v = value_of(records, case, name)?;
    if v >= bound {
        Ok(())
    } else {
        Err(format!("{case}/{name} = {v:e} is below {bound:e}"))
    }
}

fn expect_eq(records: &[ReportRecord], case: &str, name: &str, want: f64) -> Result<(), String> {
    let v = value_of(records, case, name)?;
    if v == want {
        Ok(())
    } else {
        Err(format!("{case}/{name} = {v}, wanted {want}"))
    }
}

// Criterion 1: the dyadic windows sum to one at every covered lattice
// point of the wide 1D grid.
fn extra_partition(records: &[ReportRecord]) -> Result<(), String> {
    expect_le(records, "line-2048", "partition_sum_deviation", require("partition_unity_deviation"))
}

// Criterion 2: identity, exact derivative, and the five weight-multiplier
// round trips.
fn extra_quantization(records: &[ReportRecord]) -> Result<(), String> {
    expect_le(records, "identity-field", "identity_relative_error", require("identity_relative"))?;
    expect_le(
        records,
        "spectral-derivative",
        "derivative_l2_error",
        require("derivative_absolute"),
    )?;
    let bessel = records.iter().filter(|r| r.case.starts_with("bessel-roundtrip")).count();
    if bessel != 5 {
        return Err(format!("expected 5 round-trip orders, found {bessel}"));
    }
    for r in records.iter().filter(|r| r.case.starts_with("bessel-roundtrip")) {
        expect_le(records, &r.case, "roundtrip_relative_error", require("bessel_roundtrip"))?;
    }
    Ok(())
}

// Criterion 3: the two oscillatory routes agree, reproduce the point-mass
// value, and the regularized route is order-invariant.
fn extra_oscint(records: &[ReportRecord]) -> Result<(), String> {
    expect_le(records, "gaussian-pair-routes", "route_relative_gap", require("osc_route_agreement"))?;
    expect_le(records, "delta-identity", "cutoff_route_deviation", require("osc_delta_deviation"))?;
    expect_le(records, "delta-identity", "parts_route_deviation", require("osc_delta_deviation"))?;
    expect_le(
        records,
        "parts-order-invariance",
        "order_pair_gap",
        require("osc_parts_order_invariance"),
    )
}

// Criterion 4: the mollification error sequence decreases strictly, ends
// far below its start, and has a clearly positive fitted rate.
fn extra_mollify(records: &[ReportRecord]) -> Result<(), String> {
    expect_eq(records, "rough-seminorm-decay", "seminorm_strictly_decreasing", 1.0)?;
    expect_le(
        records,
        "rough-seminorm-decay",
        "final_over_initial",
        require("mollify_final_over_initial"),
    )?;
    expect_ge(records, "rough-seminorm-decay", "log_log_slope", require("mollify_slope_floor"))
}

// Criterion 5: exact reconstruction for every corpus split, and the rough
// part's band decay matches the declared-class prediction.
fn extra_smoothing(records: &[ReportRecord]) -> Result<(), String> {
    let splits: Vec<&ReportRecord> =
        records.iter().filter(|r| r.case.starts_with("split-")).collect();
    if splits.len() < 6 {
        return Err(format!("expected 6 split cases, found {}", splits.len()));
    }
    for r in &splits {
        expect_le(records, &r.case, "split_reconstruction_error", require("split_reconstruction"))?;
    }
    expect_le(records, "rough-band-decay", "exponent_mismatch", require("smoothing_exponent_band"))
}

// Criterion 6: truncation errors shrink with the expansion order for both
// pairs, and the first-order pair meets the Leibniz budget at order two.
fn extra_composition(records: &[ReportRecord]) -> Result<(), String> {
    for case in ["derivative-times-multiplier", "bracket-times-multiplier"] {
        let e1 = value_of(records, case, "error_order_1")?;
        let e2 = value_of(records, case, "error_order_2")?;
        if e2 >= e1 {
            return Err(format!("{case}: order-2 error {e2:e} did not improve on {e1:e}"));
        }
    }
    expect_le(
        records,
        "derivative-times-multiplier",
        "order_2_error",
        require("leibniz_truncation"),
    )
}

// Criterion 7: first-band residual under the ceiling and graded decay for
// both elliptic symbols.
fn extra_parametrix(records: &[ReportRecord]) -> Result<(), String> {
    for case in ["residual-trig-bracket", "residual-coupled-bracket"] {
        expect_le(records, case, "first_band_residual", require("parametrix_residual_ceiling"))?;
        expect_eq(records, case, "residual_graded_above_floor", 1.0)?;
    }
    Ok(())
}

// Criterion 8: ladder indices at both resolutions with clean gaps, winding
// agreement, and constancy across all probed spaces.
fn extra_index(records: &[ReportRecord]) -> Result<(), String> {
    for (case, want) in [
        ("ladder-up-n256", 1.0),
        ("ladder-up-n512", 1.0),
        ("ladder-down-n256", -1.0),
        ("ladder-down-n512", -1.0),
    ] {
        expect_eq(records, case, "index", want)?;
        expect_ge(records, case, "spectral_gap", require("index_gap_floor"))?;
    }
    expect_eq(records, "winding-ladder-up", "winding", 1.0)?;
    expect_eq(records, "winding-ladder-down", "winding", -1.0)?;
    expect_eq(records, "sweep-ladder-up", "rows_consistent", 1.0)?;
    expect_eq(records, "sweep-ladder-down", "rows_consistent", 1.0)?;
    Ok(())
}

// Criterion 9: the half-sigma crossing radius agrees across spaces within
// the fixed factor, and every baseline operator is cleanly invertible.
fn extra_perturbation(records: &[ReportRecord]) -> Result<(), String> {
    expect_le(records, "radius-band", "radius_spread_factor", require("perturbation_radius_factor"))?;
    for r in records.iter().filter(|r| r.case.starts_with("baseline-")) {
        expect_eq(records, &r.case, "kernel_dim", 0.0)?;
        expect_eq(records, &r.case, "cokernel_dim", 0.0)?;
        expect_ge(records, &r.case, "spectral_gap", require("index_gap_floor"))?;
    }
    Ok(())
}

// Criterion 10: the full randomized estimate audit, zero failures.
fn extra_interpolation(records: &[ReportRecord]) -> Result<(), String> {
    let want = pdo_lab::scenarios::interpolation::CASE_COUNT;
    if records.len() != want {
        return Err(format!("expected {want} randomized cases, found {}", records.len()));
    }
    Ok(())
}
