use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use zakmub_core::channel::{sample_paths, write_matrix_csv, ChannelMatrices};
use zakmub_core::rate::{rate_surface, unit_grid, write_surface_csv};
use zakmub_core::sim::{run_sweep_with, trial_rng, verify_suite, write_json, write_rows, Stream};
use zakmub_core::{Coding, DfreeMode, Domain, Scheme, SimConfig, TcmConfig};

#[derive(Parser)]
#[command(name = "zakmub", version, about = "Zak-OTFS link simulator with mutually unbiased superposed frames")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a Monte-Carlo BER sweep.
    Simulate(SimulateArgs),
    /// Evaluate the closed-form effective-rate surface over (alpha, delta).
    RateSurface(RateArgs),
    /// Run the built-in self checks; exits nonzero on failure.
    Verify(VerifyArgs),
    /// Write one channel realization as a matrix CSV.
    ChannelDump(DumpArgs),
}

#[derive(Args)]
struct SimulateArgs {
    /// TOML configuration file; flags below override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Scheme(s) to simulate, comma separated.
    #[arg(long, value_delimiter = ',')]
    scheme: Vec<Scheme>,
    /// SNR points in dB, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    snr_list: Vec<f64>,
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Turbo iteration count(s) reported for zak-mub, comma separated.
    #[arg(long, value_delimiter = ',')]
    turbo: Vec<usize>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long, value_enum)]
    coding: Option<CodingArg>,
    /// Result CSV; existing rows for the same seed are reused.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write all rows as JSON.
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum CodingArg {
    Uncoded,
    Tcm,
}

#[derive(Args)]
struct RateArgs {
    #[arg(long, default_value_t = 40.0, allow_hyphen_values = true)]
    snr_db: f64,
    /// Grid resolution; alpha and delta run over k / steps.
    #[arg(long, default_value_t = 100)]
    grid_steps: usize,
    /// Use the squared free distance in the frame-1 error probability.
    #[arg(long)]
    dfree_squared: bool,
    #[arg(long, default_value_t = 31)]
    m: usize,
    #[arg(long, default_value_t = 37)]
    n: usize,
    /// Output CSV; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 31)]
    m: usize,
    #[arg(long, default_value_t = 37)]
    n: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum DumpDomain {
    Dd,
    Time,
}

#[derive(Args)]
struct DumpArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Trial whose channel stream is used.
    #[arg(long, default_value_t = 0)]
    trial: u64,
    #[arg(long, value_enum, default_value_t = DumpDomain::Dd)]
    domain: DumpDomain,
    #[arg(long, default_value_t = 1.0)]
    beta: f64,
    /// Configuration supplying the grid and channel profile.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output CSV; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn output(path: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).with_context(|| format!("creating {}", p.display()))?)),
        None => Box::new(io::stdout().lock()),
    })
}

fn load_config(path: &Option<PathBuf>) -> Result<SimConfig> {
    Ok(match path {
        Some(p) => SimConfig::load(p).with_context(|| format!("loading {}", p.display()))?,
        None => SimConfig::default(),
    })
}

fn simulate(a: SimulateArgs) -> Result<()> {
    let mut cfg = load_config(&a.config)?;
    if !a.scheme.is_empty() {
        cfg.schemes = a.scheme;
    }
    if !a.snr_list.is_empty() {
        cfg.snr_db = a.snr_list;
    }
    if !a.turbo.is_empty() {
        cfg.turbo_iters = a.turbo;
    }
    cfg.trials = a.trials.unwrap_or(cfg.trials);
    cfg.seed = a.seed.unwrap_or(cfg.seed);
    cfg.alpha = a.alpha.or(cfg.alpha);
    cfg.delta = a.delta.or(cfg.delta);
    cfg.beta = a.beta.or(cfg.beta);
    if let Some(c) = a.coding {
        cfg.coding = match c {
            CodingArg::Uncoded => Coding::Uncoded,
            CodingArg::Tcm => Coding::Tcm,
        };
    }
    cfg.validate()?;

    eprintln!(
        "{} trials, MN = {}, schemes {:?}, SNR {:?} dB",
        cfg.trials,
        cfg.grid.mn(),
        cfg.schemes.iter().map(|s| s.name()).collect::<Vec<_>>(),
        cfg.snr_db
    );
    let rows = run_sweep_with(&cfg, a.out.as_deref(), |r| {
        eprintln!(
            "{:<16} snr {:>6.2} dB  turbo {}  ber {:.3e} (frame1 {:.3e}, frame2 {:.3e})  {:.1} s",
            r.scheme.name(),
            r.snr_db,
            r.turbo_iters,
            r.ber_overall,
            r.ber_frame1,
            r.ber_frame2,
            r.wall_seconds
        );
    })?;
    if let Some(p) = &a.json {
        write_json(&rows, p)?;
    }
    if a.out.is_none() {
        write_rows(&rows, io::stdout().lock())?;
    }
    Ok(())
}

fn surface(a: RateArgs) -> Result<()> {
    if a.grid_steps < 2 {
        bail!("--grid-steps must be at least 2");
    }
    let mn = a.m * a.n;
    let mode = if a.dfree_squared { DfreeMode::Squared } else { DfreeMode::AsPrinted };
    let dfree = TcmConfig::default().dfree();
    let snr = 10f64.powf(a.snr_db / 10.0);
    let points = rate_surface(&unit_grid(1, a.grid_steps), &unit_grid(0, a.grid_steps), snr, mn, dfree, mode)?;
    write_surface_csv(&points, output(&a.out)?)?;
    Ok(())
}

fn verify(a: VerifyArgs) -> Result<bool> {
    let grid = zakmub_core::GridParams::new(a.m, a.n, zakmub_core::GridParams::default().nu_p)?;
    let report = verify_suite(&grid, a.seed)?;
    for c in &report.checks {
        println!(
            "{} {:<32} value {:.3e}  tol {:.1e}",
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            c.value,
            c.tol
        );
    }
    Ok(report.passed())
}

fn channel_dump(a: DumpArgs) -> Result<()> {
    let cfg = load_config(&a.config)?;
    let profile = cfg.channel.path_profile()?;
    let ch = sample_paths(&profile, cfg.channel.nu_max, &mut trial_rng(a.seed, a.trial, Stream::Channel))?;
    let m = ChannelMatrices::build(&ch, &cfg.grid, a.beta, Domain::Dd)?;
    let mat = match a.domain {
        DumpDomain::Dd => m.h_domain,
        DumpDomain::Time => m.h_t,
    };
    write_matrix_csv(mat.as_ref(), output(&a.out)?)?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Simulate(a) => simulate(a).map(|_| true),
        Command::RateSurface(a) => surface(a).map(|_| true),
        Command::Verify(a) => verify(a),
        Command::ChannelDump(a) => channel_dump(a).map(|_| true),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
