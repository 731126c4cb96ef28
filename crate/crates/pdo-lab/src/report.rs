//! Case records, verdicts, and report emission.
//!
//! Each scenario produces one `ReportRecord` per case.  A record carries
//! named measured quantities; every *asserted* quantity stores the bound it
//! was checked against and the direction of the check, so the CSV is
//! self-describing.  Verdicts are three-valued: `pass`, `fail`, and
//! `flagged` (a soft warning — e.g. an extrapolation that did not certify
//! convergence — which does not fail a run).
//!
//! Determinism contract: the CSV bytes depend only on the configuration and
//! seed.  Runtimes are therefore reported in the JSON file only.

use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::tolerances;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Flagged,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Flagged => "flagged",
        })
    }
}

/// Direction of an asserted comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Relation {
    /// Asserted `value <= bound`.
    Le,
    /// Asserted `value >= bound`.
    Ge,
    /// Asserted `value == bound` (integer-valued quantities).
    Eq,
    /// Recorded for context, nothing asserted.
    Info,
}

impl Relation {
    fn as_str(self) -> &'static str {
        match self {
            Relation::Le => "le",
            Relation::Ge => "ge",
            Relation::Eq => "eq",
            Relation::Info => "info",
        }
    }
}

/// One named measurement. `bound` is present exactly when something was
/// asserted about the value.
#[derive(Debug, Clone, PartialEq)]
pub struct Quantity {
    pub name: String,
    pub value: f64,
    pub relation: Relation,
    pub bound: Option<f64>,
}

/// Format a float deterministically (shortest round-trip form).
fn fmt_f64(v: f64) -> String {
    if v.is_nan() {
        "nan".to_string()
    } else if v.is_infinite() {
        if v > 0.0 { "inf".to_string() } else { "-inf".to_string() }
    } else {
        format!("{v}")
    }
}

impl Serialize for Quantity {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("Quantity", 4)?;
        st.serialize_field("name", &self.name)?;
        // JSON has no inf/nan literals; keep the mirror loss-free by writing
        // non-finite values as strings.
        if self.value.is_finite() {
            st.serialize_field("value", &self.value)?;
        } else {
            st.serialize_field("value", &fmt_f64(self.value))?;
        }
        st.serialize_field("relation", self.relation.as_str())?;
        st.serialize_field("bound", &self.bound)?;
        st.end()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ReportRecord {
    pub scenario: String,
    pub case: String,
    pub verdict: Verdict,
    #[serde(serialize_with = "millis")]
    pub runtime: Duration,
    pub quantities: Vec<Quantity>,
}

fn millis<S: Serializer>(d: &Duration, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_f64(d.as_secs_f64() * 1e3)
}

/// Builder for one case: accumulate measurements and checks, then `finish`.
pub struct Case {
    scenario: &'static str,
    id: String,
    quantities: Vec<Quantity>,
    failed: bool,
    flagged: bool,
    start: Instant,
}

impl Case {
    pub fn new(scenario: &'static str, id: impl Into<String>) -> Self {
        Self {
            scenario,
            id: id.into(),
            quantities: Vec::new(),
            failed: false,
            flagged: false,
            start: Instant::now(),
        }
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    /// Record a quantity without asserting anything.
    pub fn info(&mut self, name: &str, value: f64) {
        self.quantities.push(Quantity {
            name: name.into(),
            value,
            relation: Relation::Info,
            bound: None,
        });
    }

    fn check(&mut self, name: &str, value: f64, relation: Relation, bound: f64) -> bool {
        let ok = match relation {
            Relation::Le => value <= bound,
            Relation::Ge => value >= bound,
            Relation::Eq => value == bound,
            Relation::Info => true,
        } && !value.is_nan();
        self.quantities.push(Quantity { name: name.into(), value, relation, bound: Some(bound) });
        if !ok {
            self.failed = true;
        }
        ok
    }

    /// Assert `value <= bound` where the bound comes from the tolerance table.
    pub fn check_le(&mut self, name: &str, value: f64, bound_name: &str) -> bool {
        self.check(name, value, Relation::Le, tolerances::require(bound_name))
    }

    /// Assert `value >= bound` where the bound comes from the tolerance table.
    pub fn check_ge(&mut self, name: &str, value: f64, bound_name: &str) -> bool {
        self.check(name, value, Relation::Ge, tolerances::require(bound_name))
    }

    /// Assert `value <= bound` against an explicitly derived bound (used when
    /// the bound is a function of tabulated tolerances, e.g. a fraction of an
    /// initial measurement).
    pub fn check_le_derived(&mut self, name: &str, value: f64, bound: f64) -> bool {
        self.check(name, value, Relation::Le, bound)
    }

    /// Assert an exact integer-valued outcome.
    pub fn check_int(&mut self, name: &str, got: i64, want: i64) -> bool {
        self.check(name, got as f64, Relation::Eq, want as f64)
    }

    /// Assert a boolean outcome (recorded as 1 = true, 0 = false).
    pub fn check_true(&mut self, name: &str, got: bool) -> bool {
        self.check(name, got as i64 as f64, Relation::Eq, 1.0)
    }

    /// Downgrade the verdict to `flagged` (kept if the case later fails).
    pub fn flag(&mut self, name: &str) {
        self.flagged = true;
        self.quantities.push(Quantity {
            name: format!("flagged_{name}"),
            value: 1.0,
            relation: Relation::Info,
            bound: None,
        });
    }

    pub fn finish(self) -> ReportRecord {
        let verdict = if self.failed {
            Verdict::Fail
        } else if self.flagged {
            Verdict::Flagged
        } else {
            Verdict::Pass
        };
        ReportRecord {
            scenario: self.scenario.into(),
            case: self.id,
            verdict,
            runtime: self.start.elapsed(),
            quantities: self.quantities,
        }
    }
}

/// Verdict counts for a finished run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Summary {
    pub pass: usize,
    pub fail: usize,
    pub flagged: usize,
}

pub fn summarize(records: &[ReportRecord]) -> Summary {
    let mut s = Summary { pass: 0, fail: 0, flagged: 0 };
    for r in records {
        match r.verdict {
            Verdict::Pass => s.pass += 1,
            Verdict::Fail => s.fail += 1,
            Verdict::Flagged => s.flagged += 1,
        }
    }
    s
}

/// The CSV rows: one per quantity, RFC-4180 quoting via the `csv` crate.
/// No timestamps or runtimes — byte-identical for identical config + seed.
pub fn to_csv(records: &[ReportRecord]) -> Result<Vec<u8>, csv::Error> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::CRLF)
        .from_writer(Vec::new());
    w.write_record(["scenario", "case", "quantity", "value", "relation", "bound", "verdict"])?;
    for r in records {
        for q in &r.quantities {
            w.write_record([
                r.scenario.as_str(),
                r.case.as_str(),
                q.name.as_str(),
                &fmt_f64(q.value),
                q.relation.as_str(),
                &q.bound.map(fmt_f64).unwrap_or_default(),
                &r.verdict.to_string(),
            ])?;
        }
    }
    w.into_inner().map_err(|e| e.into_error().into())
}

/// Environment metadata recorded next to the mirrored rows.
#[derive(Debug, Serialize)]
struct JsonReport<'a> {
    scenario: &'a str,
    seed: u64,
    workers: usize,
    package: &'static str,
    version: &'static str,
    os: &'static str,
    arch: &'static str,
    config: &'a crate::config::ExperimentConfig,
    summary_pass: usize,
    summary_fail: usize,
    summary_flagged: usize,
    records: &'a [ReportRecord],
}

/// Write `<scenario>.csv` and `<scenario>.json` under `dir`.
pub fn write_reports(
    dir: &Path,
    config: &crate::config::ExperimentConfig,
    seed: u64,
    workers: usize,
    records: &[ReportRecord],
) -> std::io::Result<(PathBuf, PathBuf)> {
    std::fs::create_dir_all(dir)?;
    let csv_path = dir.join(format!("{}.csv", config.scenario));
    let json_path = dir.join(format!("{}.json", config.scenario));
    let csv_bytes = to_csv(records).map_err(std::io::Error::other)?;
    std::fs::write(&csv_path, &csv_bytes)?;
    let s = summarize(records);
    let report = JsonReport {
        scenario: &config.scenario,
        seed,
        workers,
        package: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        os: std::env::consts::OS,
        arch: std::env::consts::ARCH,
        config,
        summary_pass: s.pass,
        summary_fail: s.fail,
        summary_flagged: s.flagged,
        records,
    };
    let mut f = std::fs::File::create(&json_path)?;
    serde_json::to_writer_pretty(&mut f, &report).map_err(std::io::Error::other)?;
    f.write_all(b"\n")?;
    Ok((csv_path, json_path))
}
