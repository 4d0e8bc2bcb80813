//! `semdeadline` command-line front end.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use semdeadline::allocator::allocate;
use semdeadline::channel::{db_to_linear, LinkPair, LinkSpec};
use semdeadline::deadline::deadline_curve;
use semdeadline::sim::{records_csv, run_sweep, summarize, summary_csv, SimConfig, SurfaceSource};
use semdeadline::{Error, Policy, QualitySurface, Result};

#[derive(Parser)]
#[command(
    name = "semdeadline",
    version,
    about = "Semantic-deadline-aware bandwidth allocation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// JSON simulation config; built-in defaults when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output path (a directory for `sweep`); stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Toy receiver seed, or the Monte Carlo base seed for `sweep`.
    #[arg(long)]
    seed: Option<u64>,
    /// Bandwidth budget(s) in Hz, comma separated.
    #[arg(long, value_delimiter = ',')]
    bandwidth: Vec<f64>,
    /// Number of thresholds K, comma separated for `sweep`.
    #[arg(long, value_delimiter = ',')]
    k: Vec<usize>,
    #[arg(long)]
    eps_th: Option<f64>,
    #[arg(long)]
    trials: Option<usize>,
    /// JSON PSNR grid to use instead of the configured surface.
    #[arg(long)]
    surface: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Toy,
    Parametric,
}

#[derive(Subcommand)]
enum Command {
    /// Emit a toy or parametric PSNR grid as JSON.
    GenSurface {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value = "toy")]
        kind: Kind,
    },
    /// Emit the deadline curve as CSV.
    Deadlines {
        #[command(flatten)]
        common: Common,
    },
    /// Allocate one budget and print the allocation as JSON.
    Allocate {
        #[command(flatten)]
        common: Common,
        /// Mask link SNR in dB.
        #[arg(long, default_value_t = 2.3, allow_hyphen_values = true)]
        gamma_s_db: f64,
        /// Text link SNR in dB.
        #[arg(long, default_value_t = 3.5, allow_hyphen_values = true)]
        gamma_l_db: f64,
        /// benchmark1, benchmark2 or proposed_k<K>; defaults to proposed with --k.
        #[arg(long)]
        policy: Option<String>,
    },
    /// Run the Monte Carlo sweep; writes records.csv and summary.csv.
    Sweep {
        #[command(flatten)]
        common: Common,
    },
}

fn config(common: &Common, seed_is_base: bool) -> Result<SimConfig> {
    let mut cfg = match &common.config {
        Some(path) => SimConfig::load(path)?,
        None => SimConfig::default(),
    };
    if let Some(seed) = common.seed {
        if seed_is_base {
            cfg.base_seed = seed;
        } else {
            cfg.toy.seed = seed;
        }
    }
    if !common.bandwidth.is_empty() {
        cfg.bandwidth_sweep = common.bandwidth.clone();
    }
    if !common.k.is_empty() {
        cfg.k_values = common.k.clone();
    }
    if let Some(eps_th) = common.eps_th {
        cfg.eps_th = eps_th;
    }
    if let Some(trials) = common.trials {
        cfg.trials = trials;
    }
    if let Some(path) = &common.surface {
        cfg.surface_source = SurfaceSource::File(path.clone());
    }
    cfg.validate()?;
    Ok(cfg)
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| Error::Io {
            path: path.to_path_buf(),
            source: e,
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn single_k(cfg: &SimConfig) -> usize {
    cfg.k_values.last().copied().unwrap_or(20)
}

fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::GenSurface { common, kind } => {
            let cfg = config(&common, false)?;
            let surface = match kind {
                Kind::Toy => QualitySurface::from_toy(&cfg.toy)?,
                Kind::Parametric => QualitySurface::from_parametric(&cfg.parametric)?,
            };
            emit(
                common.out.as_deref(),
                &(surface.to_document().to_json()? + "\n"),
            )
        }
        Command::Deadlines { common } => {
            let cfg = config(&common, false)?;
            let surface = cfg.build_surface()?;
            let curve = deadline_curve(&surface, cfg.eps_th, single_k(&cfg))?;
            emit(common.out.as_deref(), &curve.to_csv())
        }
        Command::Allocate {
            common,
            gamma_s_db,
            gamma_l_db,
            policy,
        } => {
            let cfg = config(&common, false)?;
            let surface = cfg.build_surface()?;
            let links = LinkPair::new(
                LinkSpec::new(cfg.links.mask_bits, db_to_linear(gamma_s_db))?,
                LinkSpec::new(cfg.links.text_bits, db_to_linear(gamma_l_db))?,
            );
            let policy = match policy {
                Some(p) => p.parse()?,
                None => Policy::Proposed { k: single_k(&cfg) },
            };
            let b_total = cfg.bandwidth_sweep[0];
            let alloc = allocate(policy, &surface, &links, b_total, cfg.eps_th)?;
            let json = serde_json::to_string_pretty(&alloc).map_err(Error::from)?;
            emit(common.out.as_deref(), &(json + "\n"))
        }
        Command::Sweep { common } => {
            let cfg = config(&common, true)?;
            let records = run_sweep(&cfg)?;
            let summary = summarize(&records)?;
            let dir = common.out.unwrap_or_else(|| PathBuf::from("."));
            std::fs::create_dir_all(&dir).map_err(|e| Error::Io {
                path: dir.clone(),
                source: e,
            })?;
            emit(Some(&dir.join("records.csv")), &records_csv(&records)?)?;
            emit(Some(&dir.join("summary.csv")), &summary_csv(&summary)?)
        }
    }
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            if err.is_io() {
                ExitCode::from(3)
            } else {
                ExitCode::from(2)
            }
        }
    }
}
