//! Batch front-end for `ricci-pinch`: algebra files, curvature reports,
//! soliton certificates, orbit searches and lemma sweeps.
//!
//! Exit codes: 0 success, 1 negative certification, 2 input error or flat
//! metric, 3 alert (a search beat the soliton value of `F`, or a lemma sweep
//! found a counterexample).

// `!(x > y)` is used on purpose so that NaN fails the check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod file;
pub mod lemma;

use thiserror::Error;

/// Version tag carried by every JSON report.
pub const SCHEMA: &str = "rp-report/1";

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_ALERT: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("parse error at line {line}, column {column}: {msg}")]
    Parse {
        line: usize,
        column: usize,
        msg: String,
    },
    #[error("invalid field `{field}`: {msg}")]
    Field { field: String, msg: String },
    #[error("ingestion failed ({check}): {source}")]
    Ingest {
        check: &'static str,
        #[source]
        source: ricci_pinch::Error,
    },
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] ricci_pinch::Error),
}

/// Text written to stdout and the process exit code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub stdout: String,
    pub code: i32,
}

/// Closed interval `[lo, hi]` given on the command line as `lo:hi`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct Range {
    pub lo: f64,
    pub hi: f64,
}

impl Range {
    pub fn new(lo: f64, hi: f64) -> Result<Self, String> {
        if !(lo.is_finite() && hi.is_finite()) {
            return Err("range bounds must be finite".into());
        }
        if lo > hi {
            return Err(format!("inverted range {lo}:{hi} (min > max)"));
        }
        Ok(Self { lo, hi })
    }

    /// `k` evenly spaced points including both ends (`lo` alone if `k = 1`).
    pub fn grid(&self, k: usize) -> Vec<f64> {
        if k <= 1 || self.lo == self.hi {
            return vec![self.lo];
        }
        (0..k)
            .map(|i| self.lo + (self.hi - self.lo) * i as f64 / (k - 1) as f64)
            .collect()
    }
}

impl std::str::FromStr for Range {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (lo, hi) = s
            .split_once(':')
            .ok_or_else(|| format!("expected min:max, got `{s}`"))?;
        let lo: f64 = lo
            .trim()
            .parse()
            .map_err(|_| format!("bad lower bound `{lo}`"))?;
        let hi: f64 = hi
            .trim()
            .parse()
            .map_err(|_| format!("bad upper bound `{hi}`"))?;
        Range::new(lo, hi)
    }
}

impl std::fmt::Display for Range {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}:{}", self.lo, self.hi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges() {
        let r: Range = "0.1:10".parse().unwrap();
        assert_eq!(r.grid(2), vec![0.1, 10.0]);
        assert_eq!(r.grid(1), vec![0.1]);
        assert!("5:1".parse::<Range>().unwrap_err().contains("inverted"));
        assert!("5".parse::<Range>().is_err());
    }
}
