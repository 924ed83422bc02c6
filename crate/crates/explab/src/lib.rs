//! Experiment harness for commutator norm studies: seeded symbol
//! generators, two-sided estimate runs, shift-bound runs, and reproducible
//! reports.

pub mod config;
pub mod family;
pub mod report;
pub mod runs;
pub mod symbol;

pub use config::ExperimentConfig;
pub use family::build_family;
pub use report::{Environment, RatioReport, RatioRow, RatioSummary};
pub use runs::{run_shift_bound, run_two_sided};
pub use symbol::{gen_symbol, SymbolKind};

/// Deterministic derived seeds: samples are embarrassingly parallel and the
/// per-sample streams must not depend on scheduling.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed ^ index.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
