//! Command-line front end: one-shot filter design, Monte-Carlo simulation
//! batches, parameter sweeps, and the noiseless recovery verifier.
//!
//! Data goes to `--out` (or standard output); diagnostics go to standard
//! error. Exit code 0 on success, 1 on configuration or I/O errors.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Parser, Subcommand};

use antijam::channel::measured_sjr;
use antijam::harness::{
    draw_burst, emit_results, load_config, run_sweep, run_trials, trial_seed, write_csv,
    ExperimentConfig, OutputFormat, SweepAxis,
};
use antijam::stfilter::cfo_grid_search;
use antijam::theory::{recovery_set_deviation, verify_exact_recovery};
use antijam::{Error, Result};

#[derive(Parser)]
#[command(
    name = "antijam",
    about = "Multi-antenna anti-jamming link simulator",
    version
)]
struct Cli {
    /// Configuration file (flat key = value lines); defaults apply when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Master seed override.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Trial count override.
    #[arg(long, global = true)]
    trials: Option<usize>,

    /// Output path; standard output when omitted (CSV only).
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Output format: csv | plotdata.
    #[arg(long, global = true, default_value = "csv")]
    format: String,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Design the filter on a single burst and print the result.
    Design,
    /// Run a batch of Monte-Carlo trials and emit one row per (trial, method).
    Simulate,
    /// Sweep one configuration axis and emit aggregated BER rows.
    Sweep {
        /// Axis to sweep: preamble_bits | sjr_db | snr_db.
        #[arg(long)]
        axis: String,
        /// Comma-separated axis values (negative values welcome).
        #[arg(long, allow_hyphen_values = true)]
        values: String,
    },
    /// Run the noiseless exact-recovery verifier over a seed battery.
    Theory {
        /// Number of seeds.
        #[arg(long, default_value_t = 100)]
        battery: usize,
        /// Reference length; defaults to 4 * ((K+1) * L + 1).
        #[arg(long)]
        t_ref: Option<usize>,
    },
}

fn load(cli: &Cli) -> Result<ExperimentConfig> {
    let mut cfg = match &cli.config {
        Some(path) => load_config(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(trials) = cli.trials {
        cfg.trials = trials;
    }
    cfg.validate()?;
    Ok(cfg)
}

/// Writes `body` to `--out`, or standard output when no path was given.
fn emit_text(out: &Option<PathBuf>, body: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, body).map_err(|e| Error::io(path, e)),
        None => {
            print!("{body}");
            std::io::stdout()
                .flush()
                .map_err(|e| Error::io("<stdout>", e))
        }
    }
}

fn cmd_design(cli: &Cli, cfg: &ExperimentConfig) -> Result<()> {
    let draw = draw_burst(cfg, trial_seed(cfg.seed, 0))?;
    let design = cfo_grid_search(
        &draw.burst,
        &draw.frame.preamble_ref,
        draw.frame.preamble_span.start,
        &cfg.grid,
        cfg.l_order,
        cfg.epsilon_mode,
    )?;

    let mut body = String::new();
    body.push_str(&format!("omega_star_hz = {}\n", design.omega_star_hz));
    body.push_str(&format!("epsilon = {:.6e}\n", design.epsilon));
    body.push_str(&format!("min_residual = {:.6e}\n", design.min_residual()));
    body.push_str(&format!("true_cfo_hz = {}\n", cfg.cfo_hz));
    body.push_str(&format!("delay_samples = {}\n", draw.delay));
    body.push_str(&format!(
        "measured_sjr_db = {}\n",
        measured_sjr(&draw.burst)?
    ));
    if let Some(truth) = &draw.burst.truth {
        let recovery = recovery_set_deviation(&design.w_star, &truth.channels, draw.delay)?;
        body.push_str(&format!("recovery_peak_dev = {:.6e}\n", recovery.peak_dev));
        body.push_str(&format!("recovery_side_dev = {:.6e}\n", recovery.side_dev));
        body.push_str(&format!("recovery_jam_dev = {:.6e}\n", recovery.jam_dev));
    }
    body.push_str("omega_hz,residual\n");
    for &(omega, r) in &design.residuals {
        body.push_str(&format!("{omega},{r:.9e}\n"));
    }
    emit_text(&cli.out, &body)
}

fn cmd_simulate(cli: &Cli, cfg: &ExperimentConfig) -> Result<()> {
    let results = run_trials(cfg)?;
    let mut body = String::from(
        "trial,seed,method,ber,bit_errors,bits_total,sync_failed,omega_err_hz,\
recovery_peak_dev,recovery_side_dev,recovery_jam_dev\n",
    );
    for (i, trial) in results.iter().enumerate() {
        for r in trial {
            let omega = r
                .omega_err_hz
                .map(|v| format!("{v:.9e}"))
                .unwrap_or_default();
            let (p, s, j) = match &r.recovery {
                Some(c) => (
                    format!("{:.9e}", c.peak_dev),
                    format!("{:.9e}", c.side_dev),
                    format!("{:.9e}", c.jam_dev),
                ),
                None => (String::new(), String::new(), String::new()),
            };
            body.push_str(&format!(
                "{i},{},{},{:.9e},{},{},{},{omega},{p},{s},{j}\n",
                r.seed, r.method, r.ber, r.bit_errors, r.bits_total, r.sync_failed
            ));
        }
    }
    let mean_ber: Vec<String> = cfg
        .methods
        .iter()
        .map(|m| {
            let v: Vec<f64> = results
                .iter()
                .flatten()
                .filter(|r| r.method == *m)
                .map(|r| r.ber)
                .collect();
            format!("{m}: {:.3e}", v.iter().sum::<f64>() / v.len().max(1) as f64)
        })
        .collect();
    eprintln!(
        "mean BER over {} trials: {}",
        cfg.trials,
        mean_ber.join(", ")
    );
    emit_text(&cli.out, &body)
}

fn cmd_sweep(cli: &Cli, cfg: &ExperimentConfig, axis: &str, values: &str) -> Result<()> {
    let axis = SweepAxis::from_str(axis)?;
    let values: Vec<f64> = values
        .split(',')
        .filter(|v| !v.trim().is_empty())
        .map(|v| {
            v.trim()
                .parse::<f64>()
                .map_err(|_| Error::invalid_argument(format!("bad sweep value `{v}`")))
        })
        .collect::<Result<Vec<_>>>()?;
    let rows = run_sweep(cfg, axis, &values)?;

    let format = OutputFormat::from_str(&cli.format)?;
    match (&cli.out, format) {
        (Some(path), fmt) => emit_results(&rows, path, fmt),
        (None, OutputFormat::Csv) => {
            let mut buf = Vec::new();
            write_csv(&rows, &mut buf).map_err(|e| Error::io("<stdout>", e))?;
            emit_text(&None, &String::from_utf8_lossy(&buf))
        }
        (None, OutputFormat::PlotData) => Err(Error::invalid_argument(
            "plotdata output needs --out <path>",
        )),
    }
}

fn cmd_theory(
    cli: &Cli,
    cfg: &ExperimentConfig,
    battery: usize,
    t_ref: Option<usize>,
) -> Result<()> {
    let t_ref = t_ref.unwrap_or(4 * ((cfg.k_jammers + 1) * cfg.l_order + 1));
    let mut body = String::from(
        "seed,pass,identifiable,omega_star_hz,true_cfo_hz,tau,residual_at_true_rel,\
min_residual_elsewhere_rel,peak_dev,side_dev,jam_dev,output_max_err\n",
    );
    let mut passed = 0usize;
    for i in 0..battery {
        let rep = verify_exact_recovery(
            cfg.n_antennas,
            cfg.k_jammers,
            cfg.l_order,
            t_ref,
            trial_seed(cfg.seed, i),
        )?;
        if rep.pass {
            passed += 1;
        }
        body.push_str(&format!(
            "{},{},{},{},{},{},{:.3e},{:.3e},{:.3e},{:.3e},{:.3e},{:.3e}\n",
            rep.seed,
            rep.pass,
            rep.identifiable,
            rep.omega_star_hz,
            rep.true_cfo_hz,
            rep.tau,
            rep.residual_at_true / rep.ref_energy,
            rep.min_residual_elsewhere / rep.ref_energy,
            rep.recovery.peak_dev,
            rep.recovery.side_dev,
            rep.recovery.jam_dev,
            rep.output_max_err,
        ));
    }
    eprintln!(
        "exact recovery: {passed}/{battery} seeds passed (N={}, K={}, L={}, T={t_ref})",
        cfg.n_antennas, cfg.k_jammers, cfg.l_order
    );
    emit_text(&cli.out, &body)
}

fn run(cli: &Cli) -> Result<()> {
    let cfg = load(cli)?;
    match &cli.command {
        Command::Design => cmd_design(cli, &cfg),
        Command::Simulate => cmd_simulate(cli, &cfg),
        Command::Sweep { axis, values } => cmd_sweep(cli, &cfg, axis, values),
        Command::Theory { battery, t_ref } => cmd_theory(cli, &cfg, *battery, *t_ref),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
