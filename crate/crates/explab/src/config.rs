//! Experiment configuration: a flat key-value file with a typed schema.
//!
//! ```toml
//! # grid: one entry per parameter
//! grid_dims = [1, 1, 1]
//! grid_points = [16, 16, 16]
//! partition = "(13)(2)"
//!
//! # operator family: "hilbert" | "riesz" | "journe" | explicit strings
//! family = "hilbert"
//! # family_ops = ["hilbert:k=2 | tensor(hilbert:k=1;hilbert:k=3)"]
//! # journe_degree = 41; journe_a = 0.75; journe_b = 0.25; journe_order = 4
//!
//! # symbol generator
//! symbol_kind = "random-haar"   # random-haar | separable | frozen-variable | file
//! symbol_seed = 7               # required
//! symbol_decay = 0.5            # random-haar coefficient decay per level
//! symbol_param = 2              # separable / frozen-variable variable (1-based)
//! symbol_constant = false       # separable: constant slice function
//! # symbol_file = "b.field"
//!
//! samples = 50
//! bmo_budget = 8
//! bmo_threshold = 1e-9          # rows at or below are flagged
//! norm_method = "power"         # power | dense
//! norm_tol = 1e-6
//! norm_max_iter = 500
//! norm_seed = 1
//! output = "run.json"
//!
//! # shift-bound runs
//! shift_max_complexity = [2, 2, 2, 2]
//! ```

use commlab_core::commutator::{NormMethod, NormOptions};
use commlab_core::dyadic::PartitionSpec;
use commlab_core::lattice::GridSpec;
use serde::{Deserialize, Serialize};

use crate::symbol::SymbolKind;

fn default_samples() -> usize {
    50
}
fn default_budget() -> usize {
    8
}
fn default_threshold() -> f64 {
    1e-9
}
fn default_norm_method() -> String {
    "power".into()
}
fn default_norm_tol() -> f64 {
    1e-6
}
fn default_norm_max_iter() -> usize {
    500
}
fn default_norm_seed() -> u64 {
    1
}
fn default_family() -> String {
    "hilbert".into()
}
fn default_symbol_kind() -> String {
    "random-haar".into()
}
fn default_decay() -> f64 {
    0.5
}
fn default_journe_degree() -> usize {
    21
}
fn default_journe_a() -> f64 {
    0.75
}
fn default_journe_b() -> f64 {
    0.25
}
fn default_journe_order() -> usize {
    4
}
fn default_shift_max() -> Vec<usize> {
    vec![2, 2, 2, 2]
}

/// Parsed experiment configuration; see the module docs for the schema.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub grid_dims: Vec<usize>,
    pub grid_points: Vec<usize>,
    #[serde(default)]
    pub partition: Option<String>,
    #[serde(default = "default_family")]
    pub family: String,
    #[serde(default)]
    pub family_ops: Vec<String>,
    #[serde(default = "default_journe_degree")]
    pub journe_degree: usize,
    #[serde(default = "default_journe_a")]
    pub journe_a: f64,
    #[serde(default = "default_journe_b")]
    pub journe_b: f64,
    #[serde(default = "default_journe_order")]
    pub journe_order: usize,
    #[serde(default = "default_symbol_kind")]
    pub symbol_kind: String,
    pub symbol_seed: u64,
    #[serde(default = "default_decay")]
    pub symbol_decay: f64,
    #[serde(default)]
    pub symbol_param: Option<usize>,
    #[serde(default)]
    pub symbol_constant: bool,
    #[serde(default)]
    pub symbol_file: Option<String>,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default = "default_budget")]
    pub bmo_budget: usize,
    #[serde(default = "default_threshold")]
    pub bmo_threshold: f64,
    #[serde(default = "default_norm_method")]
    pub norm_method: String,
    #[serde(default = "default_norm_tol")]
    pub norm_tol: f64,
    #[serde(default = "default_norm_max_iter")]
    pub norm_max_iter: usize,
    #[serde(default = "default_norm_seed")]
    pub norm_seed: u64,
    #[serde(default)]
    pub output: Option<String>,
    #[serde(default = "default_shift_max")]
    pub shift_max_complexity: Vec<usize>,
}

impl ExperimentConfig {
    pub fn from_toml_str(s: &str) -> anyhow::Result<ExperimentConfig> {
        let cfg: ExperimentConfig = toml::from_str(s)?;
        cfg.grid()?;
        Ok(cfg)
    }

    pub fn load(path: &std::path::Path) -> anyhow::Result<ExperimentConfig> {
        let s = std::fs::read_to_string(path)?;
        Self::from_toml_str(&s)
    }

    pub fn grid(&self) -> anyhow::Result<GridSpec> {
        Ok(GridSpec::from_dims_points(&self.grid_dims, &self.grid_points)?)
    }

    pub fn partition_spec(&self, grid: &GridSpec) -> anyhow::Result<PartitionSpec> {
        match &self.partition {
            Some(s) => Ok(PartitionSpec::parse(s, grid.num_params())?),
            None => Ok(PartitionSpec::singletons(grid.num_params())),
        }
    }

    pub fn symbol_kind(&self) -> anyhow::Result<SymbolKind> {
        let param = |what: &str| -> anyhow::Result<usize> {
            let p = self
                .symbol_param
                .ok_or_else(|| anyhow::anyhow!("symbol_kind = {what} needs symbol_param"))?;
            if p == 0 || p > self.grid_dims.len() {
                anyhow::bail!("symbol_param {p} out of range 1..={}", self.grid_dims.len());
            }
            Ok(p - 1)
        };
        match self.symbol_kind.as_str() {
            "random-haar" => Ok(SymbolKind::RandomHaar {
                decay: self.symbol_decay,
            }),
            "separable" => Ok(SymbolKind::Separable {
                param: param("separable")?,
                constant: self.symbol_constant,
            }),
            "frozen-variable" => Ok(SymbolKind::FrozenVariable {
                param: param("frozen-variable")?,
            }),
            "file" => Ok(SymbolKind::File {
                path: self
                    .symbol_file
                    .clone()
                    .ok_or_else(|| anyhow::anyhow!("symbol_kind = file needs symbol_file"))?,
            }),
            other => anyhow::bail!("unknown symbol_kind `{other}`"),
        }
    }

    pub fn norm_method(&self) -> anyhow::Result<NormMethod> {
        match self.norm_method.as_str() {
            "power" => Ok(NormMethod::Power),
            "dense" => Ok(NormMethod::Dense),
            other => anyhow::bail!("unknown norm_method `{other}`"),
        }
    }

    pub fn norm_options(&self) -> NormOptions {
        NormOptions {
            tol: self.norm_tol,
            max_iter: self.norm_max_iter,
            seed: self.norm_seed,
        }
    }
}
