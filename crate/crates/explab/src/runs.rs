//! The two study drivers: two-sided commutator/BMO ratio runs and
//! shift-bound runs.

use commlab_core::commutator::{iterated_commutator, operator_norm, NormOptions};
use commlab_core::dyadic::{little_bmo_norm, little_product_bmo_norm, make_shift, shift_commutator, ShiftSpec};
use commlab_core::lattice::Field;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::ExperimentConfig;
use crate::derive_seed;
use crate::family::build_family;
use crate::report::{now_unix_seconds, Environment, RatioReport, RatioRow, CSV_VERSION};
use crate::symbol::gen_symbol;

fn environment(config: &ExperimentConfig, study: &str) -> Environment {
    Environment {
        version: env!("CARGO_PKG_VERSION").to_string(),
        study: study.to_string(),
        grid_dims: config.grid_dims.clone(),
        grid_points: config.grid_points.clone(),
        partition: config.partition.clone(),
        family: if config.family_ops.is_empty() {
            config.family.clone()
        } else {
            format!("explicit[{}]", config.family_ops.join(" ; "))
        },
        symbol_kind: config.symbol_kind.clone(),
        symbol_seed: config.symbol_seed,
        samples: config.samples,
        bmo_budget: config.bmo_budget,
        bmo_threshold: config.bmo_threshold,
        norm_method: config.norm_method.clone(),
        norm_tol: config.norm_tol,
        csv_version: CSV_VERSION,
        timestamp: now_unix_seconds(),
    }
}

/// For each sampled symbol, the mixed BMO norm and the supremum of the
/// iterated commutator norm over the operator family.
pub fn run_two_sided(config: &ExperimentConfig) -> anyhow::Result<RatioReport> {
    let grid = config.grid()?;
    let partition = config.partition_spec(&grid)?;
    let family = build_family(&grid, &partition, config)?;
    let kind = config.symbol_kind()?;
    let method = config.norm_method()?;
    let mut rows = Vec::with_capacity(config.samples);
    for i in 0..config.samples {
        let seed = derive_seed(config.symbol_seed, i as u64);
        let b = gen_symbol(&grid, &kind, seed)?;
        let bmo = little_product_bmo_norm(&b, &partition, config.bmo_budget)?.value;
        let mut comm = 0.0f64;
        for (m, member) in family.iter().enumerate() {
            let op = iterated_commutator(member, &b)?;
            let opts = NormOptions {
                seed: derive_seed(config.norm_seed, (i * family.len() + m) as u64),
                ..config.norm_options()
            };
            let est = operator_norm(&op, method, opts)?;
            comm = comm.max(est.value);
        }
        let flagged = bmo <= config.bmo_threshold;
        rows.push(RatioRow {
            index: i,
            seed,
            bmo_norm: bmo,
            comm_norm: comm,
            ratio: if flagged { 0.0 } else { comm / bmo },
            flagged,
            complexity: None,
        });
    }
    Ok(RatioReport::summarize(environment(config, "two-sided"), rows))
}

/// Samples `(b, f, S)` and reports
/// `||[b, S] f|| / ((1 + max(i1, j1)) (1 + max(i2, j2)) ||b||_bmo ||f||)`.
pub fn run_shift_bound(config: &ExperimentConfig) -> anyhow::Result<RatioReport> {
    let grid = config.grid()?;
    if grid.num_params() != 2 {
        anyhow::bail!("shift-bound runs need a bi-parameter grid");
    }
    if config.shift_max_complexity.len() != 4 {
        anyhow::bail!("shift_max_complexity needs four entries");
    }
    let kind = config.symbol_kind()?;
    let mut rows = Vec::with_capacity(config.samples);
    for i in 0..config.samples {
        let seed = derive_seed(config.symbol_seed, i as u64);
        let b = gen_symbol(&grid, &kind, seed)?;
        let f = Field::random_unit(&grid, derive_seed(seed, 0xF0));
        // complexity drawn uniformly within the configured box
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, 0xC0));
        let mx = &config.shift_max_complexity;
        let complexity = (
            rng.gen_range(0..=mx[0]),
            rng.gen_range(0..=mx[1]),
            rng.gen_range(0..=mx[2]),
            rng.gen_range(0..=mx[3]),
        );
        let shift = make_shift(
            &ShiftSpec::extremal_seeded(complexity, derive_seed(seed, 0x5F)),
            &grid,
        )?;
        let bmo = little_bmo_norm(&b)?;
        let num = shift_commutator(&shift, &b, &f)?.l2_norm();
        let weight = (1 + complexity.0.max(complexity.1)) as f64
            * (1 + complexity.2.max(complexity.3)) as f64;
        let flagged = bmo <= config.bmo_threshold;
        rows.push(RatioRow {
            index: i,
            seed,
            bmo_norm: bmo,
            comm_norm: num,
            ratio: if flagged {
                0.0
            } else {
                num / (weight * bmo * f.l2_norm())
            },
            flagged,
            complexity: Some(complexity),
        });
    }
    Ok(RatioReport::summarize(
        environment(config, "shift-bound"),
        rows,
    ))
}
