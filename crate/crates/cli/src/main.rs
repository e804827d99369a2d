use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use log::warn;
use serde_json::json;
use thiserror::Error;

use fourier_inpaint::cr::{cr_inpaint, refine_with_am};
use fourier_inpaint::harness::config::{ConfigError, ExperimentConfig, Method};
use fourier_inpaint::harness::grid::{run_grid, GridError, SolverOptions};
use fourier_inpaint::harness::summary::{emit_summary, format_table, SummaryError, SummaryKind};
use fourier_inpaint::harness::synth::{ar2_signal, extract_segment, make_gap};
use fourier_inpaint::harness::wav::{load_wav, write_wav, WavError};
use fourier_inpaint::seed::derive_seed;
use fourier_inpaint::uniqueness::{search_counterexample, uniqueness_thresholds, verify_alternate};
use fourier_inpaint::{
    am_inpaint, corrupt_magnitudes, dft, ser, AmOptions, CrOptions, GapMask, InpaintError,
    NoiseSpec, RealSignal,
};

const CR_WARN_LEN: usize = 4096;
const DEFAULT_RATE: u32 = 16_000;

#[derive(Parser)]
#[command(
    name = "fourier-inpaint",
    version,
    about = "Restore missing samples from DFT magnitudes"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Restore one gap in a WAV file or a synthetic signal.
    Inpaint(InpaintArgs),
    /// Run an experiment grid described by a config file.
    Experiment {
        #[arg(long)]
        config: PathBuf,
        /// Output directory; the CSV keeps the file name from the config.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Search for alternate gap fillings with identical DFT magnitudes.
    Uniqueness {
        #[arg(long, default_value_t = 16)]
        length: usize,
        #[arg(long)]
        gap_len: usize,
        #[arg(long, default_value_t = 200)]
        starts: usize,
        #[arg(long, default_value_t = 10)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Aggregate a results CSV into a summary table and an SVG figure.
    Summarize {
        #[arg(long)]
        csv: PathBuf,
        /// fraction-curve, heatmap or noise-curve
        #[arg(long)]
        kind: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
#[command(group = clap::ArgGroup::new("input").required(true).args(["wav", "synthetic"]))]
#[command(group = clap::ArgGroup::new("gap").required(true).args(["gap_len", "missing_frac"]))]
struct InpaintArgs {
    #[arg(long)]
    wav: Option<PathBuf>,
    /// Use a seeded AR(2) signal instead of a file.
    #[arg(long)]
    synthetic: bool,
    /// Segment length; a WAV file is used whole when omitted.
    #[arg(long)]
    length: Option<usize>,
    #[arg(long)]
    gap_start: Option<usize>,
    #[arg(long)]
    gap_len: Option<usize>,
    #[arg(long)]
    missing_frac: Option<f64>,
    #[arg(long, default_value = "cr+am")]
    method: String,
    #[arg(long)]
    snr_db: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output prefix; writes `<prefix>.wav` and `<prefix>.json`.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Data(String),
    #[error("solver contract violation: {0}")]
    Solver(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Data(_) => 3,
            CliError::Solver(_) => 4,
        }
    }
}

impl From<InpaintError> for CliError {
    fn from(e: InpaintError) -> Self {
        match e {
            _ if e.is_contract_violation() => CliError::Solver(e.to_string()),
            InpaintError::GapTooLarge { .. }
            | InpaintError::InvalidMask(_)
            | InpaintError::NonContiguousGap
            | InpaintError::InvalidOptions(_) => CliError::Config(e.to_string()),
            _ => CliError::Data(e.to_string()),
        }
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<WavError> for CliError {
    fn from(e: WavError) -> Self {
        CliError::Data(e.to_string())
    }
}

impl From<GridError> for CliError {
    fn from(e: GridError) -> Self {
        match e {
            GridError::Config(c) => c.into(),
            other => CliError::Data(other.to_string()),
        }
    }
}

impl From<SummaryError> for CliError {
    fn from(e: SummaryError) -> Self {
        match e {
            SummaryError::UnknownKind(_) => CliError::Config(e.to_string()),
            other => CliError::Data(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Data(e.to_string())
    }
}

fn inpaint(args: InpaintArgs) -> Result<(), CliError> {
    let method: Method = args.method.parse()?;
    let (x, rate) = match &args.wav {
        Some(path) => {
            let audio = load_wav(path)?;
            let signal = match args.length {
                Some(len) => extract_segment(&audio.signal, len, args.seed)?.signal,
                None => audio.signal,
            };
            (signal, audio.sample_rate)
        }
        None => (
            ar2_signal(args.length.unwrap_or(256), args.seed)?,
            DEFAULT_RATE,
        ),
    };
    let len = x.len();
    let d = match (args.gap_len, args.missing_frac) {
        (Some(d), _) => d,
        (None, Some(f)) if f > 0.0 && f <= 1.0 => ExperimentConfig::gap_len(len, f),
        (None, Some(f)) => {
            return Err(CliError::Config(format!(
                "missing fraction {f} not in (0, 1]"
            )))
        }
        (None, None) => unreachable!("clap enforces the gap group"),
    };
    let mask = match args.gap_start {
        Some(start) => GapMask::contiguous(len, start, d)?,
        None => make_gap(len, d, true, derive_seed(args.seed, &[11]))?,
    };
    if method != Method::Am && len > CR_WARN_LEN {
        warn!("CR stores (L+1)^2 complex entries; L = {len} will be slow and memory hungry");
    }

    let exact = dft(&x).magnitudes();
    let snr_db = args.snr_db.unwrap_or(f64::INFINITY);
    let b = corrupt_magnitudes(
        &exact,
        &NoiseSpec {
            snr_db,
            seed: derive_seed(args.seed, &[12]),
        },
    );
    let observed = mask.restrict_observed(x.samples());
    let truth = mask.restrict_missing(x.samples());

    let started = Instant::now();
    let am_opts = AmOptions::default();
    let cr_opts = CrOptions::default();
    let (restored, iterations, final_loss): (RealSignal, usize, f64) = match method {
        Method::Am => {
            let r = am_inpaint(&b, &observed, &mask, None, &am_opts)?;
            let l = r.final_loss();
            (r.signal, r.iterations, l)
        }
        Method::Cr => {
            let r = cr_inpaint(&b, &observed, &mask, &cr_opts)?;
            (r.signal, r.iterations, r.final_loss)
        }
        Method::CrAm => {
            let cr = cr_inpaint(&b, &observed, &mask, &cr_opts);
            let r = refine_with_am(&cr, &b, &observed, &mask, &am_opts)?;
            let l = r.final_loss();
            (r.signal, r.iterations, l)
        }
    };
    let wall_ms = started.elapsed().as_secs_f64() * 1e3;
    let score = if d == 0 {
        None
    } else {
        Some(ser(&mask.restrict_missing(restored.samples()), &truth)?)
    };

    let ser_text = score.map(|s| s.to_string()).unwrap_or_else(|| "n/a".into());
    println!(
        "method={method} L={len} d={d} ser_db={ser_text} iterations={iterations} final_loss={final_loss:e} wall_ms={wall_ms:.1}"
    );

    if let Some(prefix) = args.out {
        let wav_path = with_suffix(&prefix, "wav");
        let json_path = with_suffix(&prefix, "json");
        write_wav(&wav_path, restored.samples(), rate)?;
        let report = json!({
            "method": method.name(),
            "L": len,
            "d": d,
            "missing": mask.missing(),
            "seed": args.seed,
            "snr_db": if snr_db.is_finite() { json!(snr_db) } else { json!("inf") },
            "ser_db": match score {
                Some(s) if s.db().is_finite() => json!(s.db()),
                Some(_) => json!("inf"),
                None => json!(null),
            },
            "iterations": iterations,
            "final_loss": final_loss,
            "wall_ms": wall_ms,
            "sample_rate": rate,
            "wav": wav_path.display().to_string(),
        });
        let text = serde_json::to_string_pretty(&report).expect("json values serialize");
        std::fs::write(&json_path, text + "\n")?;
        println!("wrote {} and {}", wav_path.display(), json_path.display());
    }
    Ok(())
}

fn with_suffix(prefix: &Path, ext: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(".");
    s.push(ext);
    PathBuf::from(s)
}

fn experiment(config: &Path, out: Option<PathBuf>) -> Result<(), CliError> {
    let cfg = ExperimentConfig::load(config)?;
    let path = match out {
        Some(dir) => dir.join(cfg.output.file_name().unwrap_or("results.csv".as_ref())),
        None => cfg.output.clone(),
    };
    let report = run_grid(&cfg, &SolverOptions::default(), &path)?;
    print!("{}", format_table(&report.cells));
    println!(
        "wrote {} records to {}",
        report.records.len(),
        path.display()
    );
    if report.failed_jobs > 0 {
        warn!("{} jobs failed and were skipped", report.failed_jobs);
        if report.records.is_empty() {
            return Err(CliError::Data("every job failed".into()));
        }
    }
    Ok(())
}

fn uniqueness(
    length: usize,
    gap_len: usize,
    starts: usize,
    trials: usize,
    seed: u64,
) -> Result<(), CliError> {
    if gap_len > length {
        return Err(InpaintError::GapTooLarge {
            d: gap_len,
            len: length,
        }
        .into());
    }
    let (loose, strict) = uniqueness_thresholds(length);
    println!("L={length} d={gap_len} starts={starts} trials={trials} seed={seed}");
    println!(
        "threshold (L-1)/3 = {loose:.4} (d below: {}); strict form L/3-1 = {strict:.4} (d below: {})",
        (gap_len as f64) < loose,
        (gap_len as f64) < strict
    );
    let mut with_alternates = 0;
    let mut total = 0;
    for trial in 0..trials {
        let trial_seed = derive_seed(seed, &[trial as u64]);
        let x = fourier_inpaint::uniqueness::gaussian_signal(length, trial_seed)?;
        let mask = make_gap(length, gap_len, true, derive_seed(trial_seed, &[1]))?;
        let search = search_counterexample(&x, &mask, starts, derive_seed(trial_seed, &[2]))?;
        let mut verified = 0;
        let mut worst: f64 = 0.0;
        for alt in &search.alternates {
            let r = verify_alternate(&search, alt)?;
            worst = worst.max(r);
            if r < 1e-7 {
                verified += 1;
            }
        }
        if verified > 0 {
            with_alternates += 1;
        }
        total += verified;
        println!(
            "trial {trial}: exact starts {}/{starts}, verified alternates {verified}, max residual {worst:.3e}",
            search.exact_starts
        );
    }
    println!("signals with verified counter-examples: {with_alternates}/{trials}; total alternates: {total}");
    Ok(())
}

fn summarize(csv: &Path, kind: &str, out: Option<PathBuf>) -> Result<(), CliError> {
    let kind: SummaryKind = kind.parse()?;
    let output = emit_summary(csv, kind, out.as_deref())?;
    print!("{}", format_table(&output.cells));
    println!(
        "wrote {} and {}",
        output.svg.display(),
        output.csv.display()
    );
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Inpaint(args) => inpaint(args),
        Command::Experiment { config, out } => experiment(&config, out),
        Command::Uniqueness {
            length,
            gap_len,
            starts,
            trials,
            seed,
        } => uniqueness(length, gap_len, starts, trials, seed),
        Command::Summarize { csv, kind, out } => summarize(&csv, &kind, out),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
