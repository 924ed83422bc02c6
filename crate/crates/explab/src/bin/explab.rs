//! Experiment CLI: multiplier grammar, BMO norms, commutator norm
//! estimation, zonal verification, and the two study drivers.

use std::path::PathBuf;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use serde_json::json;

use commlab_core::commutator::{iterated_commutator, operator_norm, LinearOperator, NormMethod, NormOptions};
use commlab_core::dyadic::{little_bmo_norm, little_product_bmo_norm, product_bmo_norm, PartitionSpec};
use commlab_core::lattice::{read_field_from_path, write_field_to_path, GridSpec};
use commlab_core::multiplier::grammar::parse_operator_chain;
use commlab_core::zonal::{journe_multiplier, mc_conditional_expectation, zonal_eval, JourneConeSpec, PhiProfile};
use commlab_explab::{gen_symbol, run_shift_bound, run_two_sided, ExperimentConfig};

#[derive(Parser)]
#[command(name = "explab", version, about = "Numerical studies of multi-parameter commutator norms")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Zonal harmonic verification and cone synthesis
    Zonal {
        #[command(subcommand)]
        command: ZonalCommand,
    },
    /// BMO norms of a symbol field
    Bmo(BmoArgs),
    /// Commutator norm estimation
    Comm {
        #[command(subcommand)]
        command: CommCommand,
    },
    /// Two-sided commutator/BMO ratio study from a config file
    TwoSided {
        #[arg(long)]
        config: PathBuf,
    },
    /// Shift commutator bound study from a config file
    ShiftBound {
        #[arg(long)]
        config: PathBuf,
    },
    /// Reformat a run report
    Report {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value = "csv")]
        format: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate a symbol field file from a config
    GenSymbol {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Sample index within the seeded stream
        #[arg(long, default_value_t = 0)]
        index: u64,
    },
}

#[derive(Subcommand)]
enum ZonalCommand {
    /// Monte-Carlo check of the zonal product formula
    VerifyProduct {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: usize,
        /// Sample count; scientific notation accepted (1e6)
        #[arg(long, default_value = "1e6")]
        samples: String,
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
    /// Build a degree-capped cone multiplier and report its certificate
    BuildJourne {
        /// JSON file with one unit direction per parameter: [[1,0],[0,1]]
        #[arg(long)]
        dirs: Option<PathBuf>,
        #[arg(long = "N", visible_alias = "degree")]
        degree: usize,
        /// Profile as a=0.75,b=0.25[,m=4]
        #[arg(long, default_value = "a=0.75,b=0.25")]
        profile: String,
        /// Grid dimensions per parameter, e.g. 2,2
        #[arg(long = "grid-dims", value_delimiter = ',')]
        grid_dims: Vec<usize>,
        /// Points per axis per parameter, e.g. 16,16
        #[arg(long = "grid-points", value_delimiter = ',')]
        grid_points: Vec<usize>,
        /// 1-based parameter indices the cone acts on (default: all)
        #[arg(long, value_delimiter = ',')]
        params: Option<Vec<usize>>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct BmoArgs {
    /// Binary field file
    #[arg(long)]
    input: PathBuf,
    /// product | little | little-product
    #[arg(long)]
    norm: String,
    /// 1-based parameter indices for --norm product
    #[arg(long, value_delimiter = ',')]
    group: Option<Vec<usize>>,
    /// Partition like "(13)(2)" for --norm little-product
    #[arg(long)]
    partition: Option<String>,
    #[arg(long, default_value_t = 8)]
    budget: usize,
}

#[derive(Subcommand)]
enum CommCommand {
    /// Estimate the L2 norm of an iterated commutator
    Norm {
        /// `|`-separated operator chain, outermost bracket first
        #[arg(long)]
        ops: String,
        /// Symbol field file
        #[arg(long)]
        symbol: PathBuf,
        #[arg(long, default_value = "power")]
        method: String,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        #[arg(long, default_value_t = 500)]
        max_iter: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

fn parse_samples(s: &str) -> anyhow::Result<u64> {
    let v: f64 = s.parse().with_context(|| format!("bad sample count `{s}`"))?;
    if !(v.is_finite() && v >= 1.0) {
        anyhow::bail!("bad sample count `{s}`");
    }
    Ok(v as u64)
}

fn parse_profile(s: &str) -> anyhow::Result<PhiProfile> {
    let (mut a, mut b, mut m) = (0.75, 0.25, 4usize);
    for part in s.split(',') {
        let (k, v) = part
            .split_once('=')
            .with_context(|| format!("bad profile entry `{part}`"))?;
        match k.trim() {
            "a" => a = v.trim().parse()?,
            "b" => b = v.trim().parse()?,
            "m" => m = v.trim().parse()?,
            other => anyhow::bail!("unknown profile key `{other}`"),
        }
    }
    Ok(PhiProfile::new(a, b, m)?)
}

fn random_unit(d: usize, rng: &mut impl rand::Rng) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..d)
            .map(|_| rng.sample::<f64, _>(rand_distr::StandardNormal))
            .collect();
        let n: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 1e-12 {
            return v.iter().map(|x| x / n).collect();
        }
    }
}

fn emit(out: Option<&PathBuf>, text: &str) -> anyhow::Result<()> {
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => print_stdout(text)?,
    }
    Ok(())
}

/// Print to stdout, exiting quietly when the reader closed the pipe.
fn print_stdout(text: &str) -> anyhow::Result<()> {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    let done = writeln!(out, "{text}").and_then(|_| out.flush());
    if let Err(e) = done {
        if e.kind() == std::io::ErrorKind::BrokenPipe {
            std::process::exit(0);
        }
        return Err(e.into());
    }
    Ok(())
}

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run() {
        Ok(code) => std::process::exit(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            std::process::exit(1);
        }
    }
}

fn run() -> anyhow::Result<i32> {
    let cli = Cli::parse();
    match cli.command {
        Command::Zonal { command } => match command {
            ZonalCommand::VerifyProduct { n, d, samples, seed } => {
                let samples = parse_samples(&samples)?;
                use rand::SeedableRng;
                let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
                let xi1 = random_unit(d, &mut rng);
                let xi2 = random_unit(d, &mut rng);
                let eta1 = random_unit(d, &mut rng);
                let eta2 = random_unit(d, &mut rng);
                let est = mc_conditional_expectation(n, d, &xi1, &xi2, &eta1, &eta2, samples, seed)?;
                let t1: f64 = xi1.iter().zip(&eta1).map(|(a, b)| a * b).sum();
                let t2: f64 = xi2.iter().zip(&eta2).map(|(a, b)| a * b).sum();
                let expected = zonal_eval(n, d, t1)? * zonal_eval(n, d, t2)?;
                let z = if est.std_error > 0.0 {
                    (est.value - expected).abs() / est.std_error
                } else {
                    0.0
                };
                let doc = json!({
                    "n": n, "d": d, "samples": est.samples, "seed": seed,
                    "estimate": est.value, "std_error": est.std_error,
                    "expected": expected, "z_score": z,
                    "within_three_sigma": (est.value - expected).abs() <= 3.0 * est.std_error + 1e-10,
                });
                print_stdout(&serde_json::to_string_pretty(&doc)?)?;
                Ok(0)
            }
            ZonalCommand::BuildJourne {
                dirs,
                degree,
                profile,
                grid_dims,
                grid_points,
                params,
                out,
            } => {
                if grid_dims.is_empty() || grid_dims.len() != grid_points.len() {
                    anyhow::bail!("need matching --grid-dims and --grid-points");
                }
                let grid = GridSpec::from_dims_points(&grid_dims, &grid_points)?;
                let params: Vec<usize> = match params {
                    Some(ps) => ps
                        .iter()
                        .map(|&p| {
                            if p == 0 || p > grid.num_params() {
                                anyhow::bail!("parameter {p} out of range");
                            }
                            Ok(p - 1)
                        })
                        .collect::<anyhow::Result<_>>()?,
                    None => (0..grid.num_params()).collect(),
                };
                let directions: Vec<Vec<f64>> = match dirs {
                    Some(path) => serde_json::from_str(&std::fs::read_to_string(path)?)?,
                    None => params
                        .iter()
                        .map(|&k| {
                            let mut e = vec![0.0; grid.params()[k].dim];
                            e[0] = 1.0;
                            e
                        })
                        .collect(),
                };
                let profile = parse_profile(&profile)?;
                let jspec = JourneConeSpec::new(params, directions, profile, degree)?;
                let (m, cert) = journe_multiplier(&grid, &jspec)?;
                let doc = json!({
                    "descriptor": m.meta(),
                    "certificate": cert,
                    "certificate_holds": cert.holds(),
                    "max_abs_symbol": m.max_abs_symbol(),
                });
                emit(out.as_ref(), &serde_json::to_string_pretty(&doc)?)?;
                Ok(0)
            }
        },
        Command::Bmo(args) => {
            let field = read_field_from_path(&args.input)?;
            let doc = match args.norm.as_str() {
                "product" => {
                    let grouping: Vec<usize> = match &args.group {
                        Some(g) => g
                            .iter()
                            .map(|&k| {
                                if k == 0 || k > field.spec().num_params() {
                                    anyhow::bail!("parameter {k} out of range");
                                }
                                Ok(k - 1)
                            })
                            .collect::<anyhow::Result<_>>()?,
                        None => (0..field.spec().num_params()).collect(),
                    };
                    let report = product_bmo_norm(&field, &grouping, args.budget)?;
                    json!({ "norm": "product", "value": report.value,
                            "achieving_set": report.achieving, "frozen": report.frozen,
                            "budget": report.budget })
                }
                "little" => {
                    let v = little_bmo_norm(&field)?;
                    json!({ "norm": "little", "value": v })
                }
                "little-product" => {
                    let partition_str = args
                        .partition
                        .as_deref()
                        .context("--norm little-product needs --partition")?;
                    let partition =
                        PartitionSpec::parse(partition_str, field.spec().num_params())?;
                    let report = little_product_bmo_norm(&field, &partition, args.budget)?;
                    json!({ "norm": "little-product", "value": report.value,
                            "achieving_choice": report.choice.iter().map(|k| k + 1).collect::<Vec<_>>(),
                            "achieving_set": report.inner.achieving,
                            "frozen": report.inner.frozen,
                            "budget": report.budget })
                }
                other => anyhow::bail!("unknown norm `{other}`"),
            };
            print_stdout(&serde_json::to_string_pretty(&doc)?)?;
            Ok(0)
        }
        Command::Comm { command } => match command {
            CommCommand::Norm {
                ops,
                symbol,
                method,
                tol,
                max_iter,
                seed,
            } => {
                let b = read_field_from_path(&symbol)?;
                let chain = parse_operator_chain(b.spec(), &ops)?;
                let operators: Vec<LinearOperator> =
                    chain.iter().map(LinearOperator::from_multiplier).collect();
                let comm = iterated_commutator(&operators, &b)?;
                let method = match method.as_str() {
                    "power" => NormMethod::Power,
                    "dense" => NormMethod::Dense,
                    other => anyhow::bail!("unknown method `{other}`"),
                };
                let est = operator_norm(&comm, method, NormOptions { tol, max_iter, seed })?;
                let doc = json!({
                    "descriptor": comm.descriptor(),
                    "estimate": est.value,
                    "method": est.method,
                    "iterations": est.iterations,
                    "residual": est.residual,
                    "seed": est.seed,
                    "converged": est.converged,
                });
                print_stdout(&serde_json::to_string_pretty(&doc)?)?;
                Ok(0)
            }
        },
        Command::TwoSided { config } => {
            let cfg = ExperimentConfig::load(&config)?;
            let report = run_two_sided(&cfg)?;
            let text = report.to_json()?;
            match &cfg.output {
                Some(path) => std::fs::write(path, &text)?,
                None => print_stdout(&text)?,
            }
            Ok(exit_code(&report))
        }
        Command::ShiftBound { config } => {
            let cfg = ExperimentConfig::load(&config)?;
            let report = run_shift_bound(&cfg)?;
            let text = report.to_json()?;
            match &cfg.output {
                Some(path) => std::fs::write(path, &text)?,
                None => print_stdout(&text)?,
            }
            Ok(exit_code(&report))
        }
        Command::Report { input, format, out } => {
            let report =
                commlab_explab::RatioReport::from_json(&std::fs::read_to_string(&input)?)?;
            let text = match format.as_str() {
                "csv" => report.to_csv()?,
                "md" => report.to_markdown(),
                "json" => report.to_json()?,
                other => anyhow::bail!("unknown format `{other}`"),
            };
            emit(out.as_ref(), &text)?;
            Ok(0)
        }
        Command::GenSymbol { config, out, index } => {
            let cfg = ExperimentConfig::load(&config)?;
            let grid = cfg.grid()?;
            let kind = cfg.symbol_kind()?;
            let seed = commlab_explab::derive_seed(cfg.symbol_seed, index);
            let field = gen_symbol(&grid, &kind, seed)?;
            write_field_to_path(&field, &out)?;
            eprintln!("wrote {} ({} points, seed {seed})", out.display(), grid.total_points());
            Ok(0)
        }
    }
}

fn exit_code(report: &commlab_explab::RatioReport) -> i32 {
    if !report.rows.is_empty() && report.summary.flagged == report.rows.len() {
        2
    } else {
        0
    }
}
