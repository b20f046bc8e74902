use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use mmcovert::output::Table;
use mmcovert::sweep::{SweepMetric, SweepSpec, SweepVar};
use mmcovert::verify::{Tier, VerifyOptions, DEFAULT_RATES};
use mmcovert::{config_hash, exit, load_config, run_sweep, run_verify};
use mmcovert_core::channel::linear_to_db;
use mmcovert_core::{
    effective_rate, ergodic_capacity, expected_detection_error, max_covert_rate, outage_probability, solve_pj_opt,
    SystemConfig,
};

/// Covert mmWave link metrics: warden detection error, outage, covert rate
/// design and ergodic capacity.
#[derive(Parser, Debug)]
#[command(name = "mmcovert", version)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Common {
    /// JSON config file; missing keys take the reference values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output file (default stdout).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Seed recorded in the output and used by Monte Carlo.
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
}

#[derive(Args, Debug)]
struct Covert {
    /// Evaluate at the jamming budget that makes the expected detection error exactly 1 - epsilon.
    #[arg(long)]
    epsilon: Option<f64>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Expected minimum detection error at Willie.
    Detect(Covert),
    /// Outage probability and effective rate at a target rate.
    Outage {
        /// Target rate, bits per channel use.
        #[arg(long)]
        rb: f64,
        #[command(flatten)]
        covert: Covert,
    },
    /// Ergodic capacity of the Alice-Bob link.
    Capacity(Covert),
    /// Jamming budget and target rate maximising the covert rate.
    Design {
        /// Covertness slack.
        #[arg(long, default_value_t = 0.05)]
        epsilon: f64,
    },
    /// Metrics over a one-dimensional parameter grid.
    Sweep {
        /// Swept variable: pj_max_dbm, rb, pa_dbm, epsilon, d_aw or d_ab.
        #[arg(long)]
        var: SweepVar,
        /// First grid value.
        #[arg(long, allow_negative_numbers = true)]
        start: f64,
        /// Last grid value.
        #[arg(long, allow_negative_numbers = true)]
        stop: f64,
        /// Grid points, including both ends.
        #[arg(long)]
        steps: usize,
        /// Comma-separated metrics: detect, outage, effective_rate, capacity, design.
        #[arg(long, value_delimiter = ',', required = true)]
        metrics: Vec<SweepMetric>,
        /// Target rate when rb is not swept.
        #[arg(long, default_value_t = 1.0)]
        rb: f64,
        /// Covertness slack for design and --covert.
        #[arg(long, default_value_t = 0.05)]
        epsilon: f64,
        /// Replace the configured jamming budget by the covert optimum at every point.
        #[arg(long)]
        covert: bool,
    },
    /// Compare closed forms with quadrature (tight) or Monte Carlo (loose).
    Verify {
        /// tight or loose.
        #[arg(long, default_value = "tight")]
        tier: Tier,
        /// Monte Carlo samples per metric.
        #[arg(long, default_value_t = 1_000_000)]
        samples: u64,
        /// Target rates for the outage checks (repeatable).
        #[arg(long)]
        rb: Vec<f64>,
    },
}

enum Failure {
    Config(String),
    Numerical(Table, String),
}

impl From<mmcovert_core::Error> for Failure {
    fn from(e: mmcovert_core::Error) -> Self {
        Failure::Numerical(Table::default(), e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match &cli.common.config {
        Some(p) => match load_config(p) {
            Ok(c) => c,
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::from(exit::CONFIG as u8);
            }
        },
        None => SystemConfig::benchmark(),
    };

    let (table, code) = match execute(&cli.command, &cfg, cli.common.seed) {
        Ok((t, code)) => (t, code),
        Err(Failure::Config(msg)) => {
            eprintln!("error: {msg}");
            return ExitCode::from(exit::CONFIG as u8);
        }
        Err(Failure::Numerical(mut t, msg)) => {
            eprintln!("error: {msg}");
            t.error.get_or_insert(msg);
            (t, exit::NUMERICAL)
        }
    };
    let code = if table.error.is_some() && code == exit::OK { exit::NUMERICAL } else { code };

    let mut table = table;
    let mut meta = Table::default();
    meta.meta("command", command_line())
        .meta("config_sha256", config_hash(&cfg))
        .meta("seed", cli.common.seed);
    meta.meta.append(&mut table.meta);
    table.meta = meta.meta;

    if let Err(e) = write(&table, cli.common.out.as_ref()) {
        eprintln!("error: writing output: {e}");
        return ExitCode::from(exit::NUMERICAL as u8);
    }
    ExitCode::from(code as u8)
}

fn command_line() -> String {
    std::env::args().skip(1).collect::<Vec<_>>().join(" ")
}

fn write(table: &Table, out: Option<&PathBuf>) -> io::Result<()> {
    match out {
        Some(p) => table.write_to(&mut BufWriter::new(File::create(p)?)),
        None => table.write_to(&mut io::stdout().lock()),
    }
}

fn covert_budget(cfg: &SystemConfig, covert: &Covert) -> Result<SystemConfig, Failure> {
    match covert.epsilon {
        None => Ok(*cfg),
        Some(e) if !(e > 0.0 && e < 1.0) => Err(Failure::Config(format!("--epsilon must be inside (0, 1), got {e}"))),
        Some(e) => Ok(cfg.with_pj_max(solve_pj_opt(cfg, e)?)),
    }
}

fn execute(command: &Command, cfg: &SystemConfig, seed: u64) -> Result<(Table, i32), Failure> {
    let mut table;
    match command {
        Command::Detect(c) => {
            let at = covert_budget(cfg, c)?;
            table = Table::new(["pj_max_dbm", "detection_error"]);
            table.push_numbers(&[linear_to_db(at.pj_max), expected_detection_error(&at)?]);
        }
        Command::Outage { rb, covert } => {
            if !(*rb > 0.0 && rb.is_finite()) {
                return Err(Failure::Config(format!("--rb must be positive, got {rb}")));
            }
            let at = covert_budget(cfg, covert)?;
            table = Table::new(["pj_max_dbm", "rb_bits_per_use", "outage", "effective_rate_bits_per_use"]);
            table.push_numbers(&[linear_to_db(at.pj_max), *rb, outage_probability(&at, *rb)?, effective_rate(&at, *rb)?]);
        }
        Command::Capacity(c) => {
            let at = covert_budget(cfg, c)?;
            table = Table::new(["pj_max_dbm", "capacity_bits_per_use"]);
            table.push_numbers(&[linear_to_db(at.pj_max), ergodic_capacity(&at)?]);
        }
        Command::Design { epsilon } => {
            if !(*epsilon > 0.0 && *epsilon < 1.0) {
                return Err(Failure::Config(format!("--epsilon must be inside (0, 1), got {epsilon}")));
            }
            let d = max_covert_rate(cfg, *epsilon)?;
            table = Table::new(["epsilon", "pj_opt_dbm", "pj_opt_mw", "rb_opt_bits_per_use", "outage", "rate_bits_per_use"]);
            table.push_numbers(&[d.epsilon, linear_to_db(d.pj_opt), d.pj_opt, d.r_b_opt, d.outage_opt, d.rate_opt]);
        }
        Command::Sweep { var, start, stop, steps, metrics, rb, epsilon, covert } => {
            let spec = SweepSpec {
                variable: *var,
                start: *start,
                stop: *stop,
                steps: *steps,
                metrics: metrics.clone(),
                rb: *rb,
                epsilon: *epsilon,
                covert: *covert,
            };
            spec.validate().map_err(Failure::Config)?;
            table = run_sweep(cfg, &spec);
            if let Some(e) = &table.error {
                eprintln!("error: {e}");
                return Ok((table, exit::NUMERICAL));
            }
        }
        Command::Verify { tier, samples, rb } => {
            if *samples == 0 {
                return Err(Failure::Config("--samples must be positive".into()));
            }
            if let Some(bad) = rb.iter().find(|r| !(**r > 0.0 && r.is_finite())) {
                return Err(Failure::Config(format!("--rb must be positive, got {bad}")));
            }
            let opts = VerifyOptions {
                tier: *tier,
                rates: if rb.is_empty() { DEFAULT_RATES.to_vec() } else { rb.clone() },
                samples: *samples,
                seed,
            };
            return verify(cfg, opts);
        }
    }
    Ok((table, exit::OK))
}

fn verify(cfg: &SystemConfig, opts: VerifyOptions) -> Result<(Table, i32), Failure> {
    let report = run_verify(cfg, &opts)?;
    let mut table = report.table();
    table.meta("tier", report.tier);
    if opts.tier == Tier::Loose {
        table.meta("samples", opts.samples);
    }
    let failed: Vec<_> = report.checks.iter().filter(|c| !c.passed()).collect();
    for c in &failed {
        let _ = writeln!(
            io::stderr(),
            "FAIL {} {}: closed {} vs reference {} (gap {:e}, allowed {:e}, stderr {:e})",
            c.config,
            c.metric,
            c.closed,
            c.reference,
            c.gap(),
            c.allowed(),
            c.stderr
        );
    }
    let code = if failed.is_empty() { exit::OK } else { exit::VERIFY };
    Ok((table, code))
}
