//! Dyadic partition-of-unity audit.
//!
//! Builds the radial dyadic partition adapted to a frequency lattice and
//! verifies, at every lattice point inside the covered ball `|xi| <= 2^J`,
//! that the windows sum to one to within `partition_unity_deviation` and
//! that each window stays inside `[0, 1]`.

use pdo_core::dyadic::DyadicPartition;
use pdo_core::grid::Grid;

use crate::registry::{RunContext, RunError};
use crate::report::{Case, ReportRecord};

pub fn run(ctx: &RunContext) -> Result<Vec<ReportRecord>, RunError> {
    let mut records = Vec::new();
    let grid = ctx.grid_or(1, 64.0, 2048)?;
    records.push(audit_grid("line-2048", &grid)?);
    if ctx.config.grid.is_none() {
        let plane = Grid::new(2, 16.0, 64)
            .map_err(|e| RunError::new("plane-64", e.to_string()))?;
        records.push(audit_grid("plane-64", &plane)?);
    }
    Ok(records)
}

fn audit_grid(id: &str, grid: &Grid) -> Result<ReportRecord, RunError> {
    let mut case = Case::new("partition-check", id);
    let part =
        DyadicPartition::for_grid(grid).map_err(|e| RunError::new(id, e.to_string()))?;
    let ball = (1u64 << part.j_max()) as f64;

    let mut covered = 0usize;
    let mut worst_sum = 0.0f64;
    let mut worst_range = 0.0f64;
    for idx in 0..grid.total_points() {
        let xi = grid.xi_coord(idx);
        let r = xi.iter().map(|v| v * v).sum::<f64>().sqrt();
        if r > ball {
            continue;
        }
        covered += 1;
        worst_sum = worst_sum.max((part.partition_sum(&xi) - 1.0).abs());
        for j in 0..=part.j_max() {
            let phi = part.phi(j, &xi);
            worst_range = worst_range.max((-phi).max(phi - 1.0));
        }
    }

    case.info("window_count", (part.j_max() + 1) as f64);
    case.info("covered_lattice_points", covered as f64);
    case.check_true("covered_points_nonempty", covered > 0);
    case.check_le("partition_sum_deviation", worst_sum, "partition_unity_deviation");
    case.check_le("window_range_violation", worst_range, "partition_unity_deviation");
    Ok(case.finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::report::Verdict;

    #[test]
    fn default_run_passes_on_both_grids() {
        let ctx = RunContext::for_scenario("partition-check");
        let records = run(&ctx).unwrap();
        assert_eq!(records.len(), 2);
        for r in &records {
            assert_eq!(r.verdict, Verdict::Pass, "case {} failed", r.case);
        }
    }
}
