use std::path::PathBuf;

use anyhow::Result;
use clap::Parser;

use sfft_cli::{init_thread_pool, run_experiment, rows_to_csv, ExperimentConfig, Mode, SignalSpec};

/// Sparse FFT benchmark harness.
#[derive(Parser, Debug)]
#[command(name = "sfft", version, about)]
struct Args {
    /// estimate | sparse-fft | bench-samples | bench-error | selftest
    mode: Mode,

    /// JSON config file; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,

    #[arg(long)]
    n: Option<usize>,

    #[arg(long)]
    k: Option<usize>,

    #[arg(long)]
    eps: Option<f64>,

    #[arg(long)]
    seed: Option<u64>,

    #[arg(long)]
    trials: Option<usize>,

    /// Output CSV path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,

    /// Noise-level override (otherwise computed from ground truth).
    #[arg(long)]
    mu: Option<f64>,

    /// Signal kind: exact-sparse | gaussian-tail | periodic-support
    #[arg(long)]
    signal: Option<String>,

    #[arg(long)]
    sigma_tail: Option<f64>,

    #[arg(long)]
    stride: Option<usize>,

    /// Head magnitude spread (largest planted magnitude over mu).
    #[arg(long)]
    snr: Option<f64>,

    /// Algorithm for the bench modes: estimate | sparse-fft
    #[arg(long)]
    algo: Option<String>,

    #[arg(long)]
    sample_budget: Option<u64>,

    #[arg(long)]
    c1: Option<usize>,

    #[arg(long)]
    c2: Option<usize>,

    #[arg(long)]
    c_cleanup: Option<usize>,

    #[arg(long)]
    alpha_est: Option<f64>,

    #[arg(long)]
    c_est: Option<usize>,

    #[arg(long)]
    c1_loc: Option<usize>,

    #[arg(long)]
    c2_loc: Option<usize>,

    #[arg(long)]
    c_f: Option<usize>,

    #[arg(long)]
    delta_semi: Option<f64>,
}

fn apply_overrides(cfg: &mut ExperimentConfig, args: &Args) -> Result<()> {
    macro_rules! set {
        ($field:ident) => {
            if let Some(v) = args.$field {
                cfg.$field = v;
            }
        };
    }
    set!(n);
    set!(k);
    set!(eps);
    set!(seed);
    set!(trials);
    set!(snr);
    if let Some(path) = &args.out {
        cfg.out = Some(path.clone());
    }
    if args.mu.is_some() {
        cfg.mu = args.mu;
    }
    if args.sample_budget.is_some() {
        cfg.sample_budget = args.sample_budget;
    }
    if let Some(kind) = &args.signal {
        cfg.signal = match kind.as_str() {
            "exact-sparse" => SignalSpec::ExactSparse,
            "gaussian-tail" => SignalSpec::GaussianTail {
                sigma_tail: args.sigma_tail.unwrap_or(1.0),
            },
            "periodic-support" => SignalSpec::PeriodicSupport {
                stride: args.stride,
                sigma_tail: args.sigma_tail.unwrap_or(0.0),
            },
            other => anyhow::bail!("unknown signal kind {other:?}"),
        };
    } else if let Some(sigma) = args.sigma_tail {
        if let SignalSpec::GaussianTail { sigma_tail } = &mut cfg.signal {
            *sigma_tail = sigma;
        }
    }
    if let Some(algo) = &args.algo {
        cfg.algo = match algo.as_str() {
            "estimate" => sfft_cli::Algo::Estimate,
            "sparse-fft" => sfft_cli::Algo::SparseFft,
            other => anyhow::bail!("unknown algo {other:?}"),
        };
    }
    if let Some(v) = args.c1 {
        cfg.constants.c1 = v;
    }
    if let Some(v) = args.c2 {
        cfg.constants.c2 = v;
    }
    if let Some(v) = args.c_cleanup {
        cfg.constants.c_cleanup = v;
    }
    if let Some(v) = args.alpha_est {
        cfg.constants.alpha_est = v;
    }
    if let Some(v) = args.c_est {
        cfg.constants.c_est = v;
    }
    if let Some(v) = args.c1_loc {
        cfg.constants.c1_loc = v;
    }
    if let Some(v) = args.c2_loc {
        cfg.constants.c2_loc = v;
    }
    if let Some(v) = args.c_f {
        cfg.constants.c_f = v;
    }
    if let Some(v) = args.delta_semi {
        cfg.constants.delta_semi = v;
    }
    Ok(())
}

fn main() -> Result<()> {
    let args = Args::parse();
    init_thread_pool();

    let mut cfg = match &args.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    apply_overrides(&mut cfg, &args)?;
    // The positional mode always wins over the config file's mode field.
    let mode = args.mode;

    let rows = run_experiment(&cfg, mode)?;
    if mode != Mode::Selftest {
        if cfg.out.is_none() {
            print!("{}", rows_to_csv(&rows));
        }
        let succ = rows.iter().filter(|r| r.success).count();
        eprintln!("{} trials, {} successful", rows.len(), succ);
    }
    Ok(())
}
