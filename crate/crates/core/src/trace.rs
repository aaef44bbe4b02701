//! Per-iteration records of a fixed-point solve.

use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;

use crate::accelerator::{Status, StepRecord};
use crate::error::{Error, Result};

pub const CSV_HEADER: &str = "k,res_inf,res_l2,theta,restart,ms";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IterationTrace {
    /// One row per evaluation of the fixed-point map.
    pub rows: Vec<StepRecord>,
    pub status: Status,
    pub restarts: usize,
    /// Linear solves issued before the iteration started (initial guess).
    pub setup_solves: usize,
}

impl IterationTrace {
    /// Number of fixed-point map evaluations.
    pub fn iterations(&self) -> usize {
        self.rows.len()
    }

    pub fn final_residual(&self) -> Option<f64> {
        self.rows.last().map(|r| r.res_inf)
    }

    pub fn converged(&self) -> bool {
        self.status == Status::Converged
    }

    pub fn any_rank_deficient(&self) -> bool {
        self.rows.iter().any(|r| r.rank_deficient)
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::with_capacity(64 * (self.rows.len() + 1));
        s.push_str(CSV_HEADER);
        s.push('\n');
        for r in &self.rows {
            let theta = r.theta.map(|t| format!("{t:.17e}")).unwrap_or_default();
            let _ = writeln!(
                s,
                "{},{:.17e},{:.17e},{},{},{:.3}",
                r.k,
                r.res_inf,
                r.res_l2,
                theta,
                u8::from(r.restart),
                r.ms
            );
        }
        s
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv()).map_err(|e| Error::io(path, e))
    }
}
