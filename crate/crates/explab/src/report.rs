//! Ratio reports: JSON-first, with CSV and markdown renderings.
//!
//! CSV columns are fixed and versioned: a run with the same config and
//! seed reproduces the report byte-for-byte apart from the timestamp.

use serde::{Deserialize, Serialize};

pub const CSV_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct Environment {
    pub version: String,
    pub study: String,
    pub grid_dims: Vec<usize>,
    pub grid_points: Vec<usize>,
    pub partition: Option<String>,
    pub family: String,
    pub symbol_kind: String,
    pub symbol_seed: u64,
    pub samples: usize,
    pub bmo_budget: usize,
    pub bmo_threshold: f64,
    pub norm_method: String,
    pub norm_tol: f64,
    pub csv_version: u32,
    /// Unix seconds; the only field allowed to differ between identical runs.
    pub timestamp: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct RatioRow {
    pub index: usize,
    pub seed: u64,
    /// BMO-type norm of the sampled symbol (study-dependent flavor).
    pub bmo_norm: f64,
    /// Commutator norm (two-sided) or `|| [b,S] f ||` (shift-bound).
    pub comm_norm: f64,
    /// `comm / bmo` with the study's normalization; 0 for flagged rows.
    pub ratio: f64,
    pub flagged: bool,
    /// Shift complexity for shift-bound rows.
    pub complexity: Option<(usize, usize, usize, usize)>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct RatioSummary {
    pub rows: usize,
    pub flagged: usize,
    pub min_ratio: f64,
    pub max_ratio: f64,
    pub median_ratio: f64,
    /// `max_ratio / min_ratio` over unflagged rows.
    pub band: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct RatioReport {
    pub environment: Environment,
    pub rows: Vec<RatioRow>,
    pub summary: RatioSummary,
}

impl RatioReport {
    pub fn summarize(environment: Environment, rows: Vec<RatioRow>) -> RatioReport {
        let mut ratios: Vec<f64> = rows
            .iter()
            .filter(|r| !r.flagged)
            .map(|r| r.ratio)
            .collect();
        ratios.sort_by(f64::total_cmp);
        let summary = if ratios.is_empty() {
            RatioSummary {
                rows: rows.len(),
                flagged: rows.len(),
                min_ratio: f64::NAN,
                max_ratio: f64::NAN,
                median_ratio: f64::NAN,
                band: f64::NAN,
            }
        } else {
            let min = ratios[0];
            let max = ratios[ratios.len() - 1];
            let median = if ratios.len() % 2 == 1 {
                ratios[ratios.len() / 2]
            } else {
                0.5 * (ratios[ratios.len() / 2 - 1] + ratios[ratios.len() / 2])
            };
            RatioSummary {
                rows: rows.len(),
                flagged: rows.iter().filter(|r| r.flagged).count(),
                min_ratio: min,
                max_ratio: max,
                median_ratio: median,
                band: max / min,
            }
        };
        RatioReport {
            environment,
            rows,
            summary,
        }
    }

    pub fn to_json(&self) -> serde_json::Result<String> {
        serde_json::to_string_pretty(self)
    }

    pub fn from_json(s: &str) -> serde_json::Result<RatioReport> {
        serde_json::from_str(s)
    }

    pub fn to_csv(&self) -> anyhow::Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record([
            "index",
            "seed",
            "bmo_norm",
            "comm_norm",
            "ratio",
            "flagged",
            "complexity",
        ])?;
        for r in &self.rows {
            let complexity = r
                .complexity
                .map(|(a, b, c, d)| format!("{a}.{b}.{c}.{d}"))
                .unwrap_or_default();
            w.write_record([
                r.index.to_string(),
                r.seed.to_string(),
                format!("{:.17e}", r.bmo_norm),
                format!("{:.17e}", r.comm_norm),
                format!("{:.17e}", r.ratio),
                r.flagged.to_string(),
                complexity,
            ])?;
        }
        Ok(String::from_utf8(w.into_inner()?)?)
    }

    pub fn to_markdown(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "# {} run\n\ngrid: dims {:?}, points {:?}; partition {}; family {}\n\n",
            self.environment.study,
            self.environment.grid_dims,
            self.environment.grid_points,
            self.environment.partition.as_deref().unwrap_or("-"),
            self.environment.family,
        ));
        out.push_str(&format!(
            "summary: {} rows ({} flagged), ratio in [{:.4e}, {:.4e}], median {:.4e}, band {:.3}\n\n",
            self.summary.rows,
            self.summary.flagged,
            self.summary.min_ratio,
            self.summary.max_ratio,
            self.summary.median_ratio,
            self.summary.band,
        ));
        out.push_str("| index | seed | bmo | comm | ratio | flagged |\n");
        out.push_str("|---|---|---|---|---|---|\n");
        for r in &self.rows {
            out.push_str(&format!(
                "| {} | {} | {:.6e} | {:.6e} | {:.6e} | {} |\n",
                r.index, r.seed, r.bmo_norm, r.comm_norm, r.ratio, r.flagged
            ));
        }
        out
    }

    /// Strip the timestamp for byte-identity comparisons.
    pub fn without_timestamp(&self) -> RatioReport {
        let mut r = self.clone();
        r.environment.timestamp = 0;
        r
    }
}

pub fn now_unix_seconds() -> u64 {
    std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}
