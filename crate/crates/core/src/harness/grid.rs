//! Seeded experiment grids.
//!
//! Jobs are the Cartesian product of length, fraction, SNR and trial index.
//! Each job draws one signal and one gap and runs every requested method on
//! them, so methods are compared on identical instances. Jobs run on the
//! rayon pool; a single writer thread emits their records in job order, so
//! the CSV bytes depend only on the config (apart from `wall_ms`).

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::mpsc;
use std::time::Instant;

use log::{error, info};
use rayon::prelude::*;
use thiserror::Error;

use super::config::{ConfigError, ExperimentConfig, Method, Source};
use super::records::{CsvError, RecordWriter, TrialRecord};
use super::summary::{aggregate, CellSummary};
use super::synth::{ar2_signal, extract_segment, make_gap};
use super::wav::{load_wav, WavError};
use crate::am::{am_inpaint, AmOptions};
use crate::cr::{cr_inpaint, refine_with_am, CrOptions};
use crate::dft::dft;
use crate::error::InpaintError;
use crate::metrics::{corrupt_magnitudes, ser, NoiseSpec};
use crate::seed::derive_seed;
use crate::signal::RealSignal;

#[derive(Debug, Error)]
pub enum GridError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{path}: {source}")]
    Wav { path: PathBuf, source: WavError },
    #[error("no .wav files in {0}")]
    EmptyWavDir(PathBuf),
    #[error(transparent)]
    Csv(#[from] CsvError),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

/// Solver options shared by every trial of a grid.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct SolverOptions {
    pub am: AmOptions,
    pub cr: CrOptions,
}

/// A loaded signal source.
#[derive(Debug, Clone)]
pub enum LoadedSource {
    Synthetic,
    Wav(Vec<(PathBuf, RealSignal)>),
}

impl LoadedSource {
    pub fn load(source: &Source) -> Result<Self, GridError> {
        match source {
            Source::Synthetic => Ok(LoadedSource::Synthetic),
            Source::WavDir(dir) => {
                let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)?
                    .filter_map(|e| e.ok().map(|e| e.path()))
                    .filter(|p| p.extension().is_some_and(|e| e.eq_ignore_ascii_case("wav")))
                    .collect();
                paths.sort();
                if paths.is_empty() {
                    return Err(GridError::EmptyWavDir(dir.clone()));
                }
                let files = paths
                    .into_iter()
                    .map(|path| match load_wav(&path) {
                        Ok(a) => Ok((path, a.signal)),
                        Err(source) => Err(GridError::Wav { path, source }),
                    })
                    .collect::<Result<_, _>>()?;
                Ok(LoadedSource::Wav(files))
            }
        }
    }

    /// Draws a length-`len` signal for the given seed.
    pub fn draw(&self, len: usize, seed: u64) -> Result<RealSignal, InpaintError> {
        match self {
            LoadedSource::Synthetic => ar2_signal(len, seed),
            LoadedSource::Wav(files) => {
                let (_, signal) = &files[(derive_seed(seed, &[1]) % files.len() as u64) as usize];
                Ok(extract_segment(signal, len, derive_seed(seed, &[2]))?.signal)
            }
        }
    }
}

/// One (length, fraction, SNR, trial) cell of the grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Job {
    pub len: usize,
    pub d: usize,
    pub snr_db: f64,
    pub trial: usize,
    /// Seed of the signal and gap draw; shared across SNR levels.
    pub seed: u64,
    pub source: usize,
}

pub fn plan_jobs(cfg: &ExperimentConfig) -> Vec<Job> {
    let mut jobs = Vec::new();
    for &len in &cfg.lengths {
        for (fi, &fraction) in cfg.fractions.iter().enumerate() {
            let d = ExperimentConfig::gap_len(len, fraction);
            for &snr_db in &cfg.snr_db {
                for trial in 0..cfg.n_trials {
                    jobs.push(Job {
                        len,
                        d,
                        snr_db,
                        trial,
                        seed: derive_seed(cfg.seed, &[len as u64, fi as u64, trial as u64]),
                        source: trial % cfg.sources.len(),
                    });
                }
            }
        }
    }
    jobs
}

/// Runs every method of `methods` on the instance described by `job`.
pub fn run_job(
    job: &Job,
    source: &LoadedSource,
    methods: &[Method],
    contiguous: bool,
    opts: &SolverOptions,
) -> Result<Vec<TrialRecord>, InpaintError> {
    let x = source.draw(job.len, derive_seed(job.seed, &[10]))?;
    let mask = make_gap(job.len, job.d, contiguous, derive_seed(job.seed, &[11]))?;
    let exact = dft(&x).magnitudes();
    let b = corrupt_magnitudes(
        &exact,
        &NoiseSpec {
            snr_db: job.snr_db,
            seed: derive_seed(job.seed, &[12, job.snr_db.to_bits()]),
        },
    );
    let observed = mask.restrict_observed(x.samples());
    let truth = mask.restrict_missing(x.samples());

    let record = |method, signal: &RealSignal, iterations, final_loss, wall_ms| {
        Ok::<_, InpaintError>(TrialRecord {
            method,
            len: job.len,
            d: job.d,
            contiguous,
            seed: job.seed,
            snr_db: job.snr_db,
            ser: ser(&mask.restrict_missing(signal.samples()), &truth)?,
            iterations,
            final_loss,
            wall_ms,
        })
    };

    let mut out = Vec::with_capacity(methods.len());
    let mut cr_run = None;
    for &method in Method::ALL.iter().filter(|m| methods.contains(m)) {
        match method {
            Method::Am => {
                let t = Instant::now();
                let r = am_inpaint(&b, &observed, &mask, None, &opts.am)?;
                let ms = t.elapsed().as_secs_f64() * 1e3;
                out.push(record(method, &r.signal, r.iterations, r.final_loss(), ms)?);
            }
            Method::Cr | Method::CrAm => {
                if cr_run.is_none() {
                    let t = Instant::now();
                    let r = cr_inpaint(&b, &observed, &mask, &opts.cr);
                    cr_run = Some((r, t.elapsed().as_secs_f64() * 1e3));
                }
                let (cr, cr_ms) = cr_run.as_ref().expect("set above");
                if method == Method::Cr {
                    let r = cr.as_ref().map_err(Clone::clone)?;
                    out.push(record(
                        method,
                        &r.signal,
                        r.iterations,
                        r.final_loss,
                        *cr_ms,
                    )?);
                } else {
                    let t = Instant::now();
                    let r = refine_with_am(cr, &b, &observed, &mask, &opts.am)?;
                    let ms = cr_ms + t.elapsed().as_secs_f64() * 1e3;
                    out.push(record(method, &r.signal, r.iterations, r.final_loss(), ms)?);
                }
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct GridReport {
    pub records: Vec<TrialRecord>,
    pub failed_jobs: usize,
    pub cells: Vec<CellSummary>,
}

/// Runs the whole grid, streaming records into `sink` as CSV.
pub fn run_grid_to<W: Write + Send>(
    cfg: &ExperimentConfig,
    opts: &SolverOptions,
    sink: W,
) -> Result<GridReport, GridError> {
    cfg.validate()?;
    let sources = cfg
        .sources
        .iter()
        .map(LoadedSource::load)
        .collect::<Result<Vec<_>, _>>()?;
    let jobs = plan_jobs(cfg);
    info!("running {} jobs", jobs.len());
    let mut writer = RecordWriter::new(sink)?;

    let (records, failed_jobs) = std::thread::scope(|scope| {
        let (tx, rx) = mpsc::channel::<(usize, Result<Vec<TrialRecord>, InpaintError>)>();
        let collector = scope.spawn(move || -> Result<(Vec<TrialRecord>, usize), CsvError> {
            let mut pending = BTreeMap::new();
            let mut next = 0;
            let mut all = Vec::new();
            let mut failed = 0;
            for (index, result) in rx {
                pending.insert(index, result);
                while let Some(result) = pending.remove(&next) {
                    match result {
                        Ok(records) => {
                            for r in records {
                                writer.write(&r)?;
                                all.push(r);
                            }
                        }
                        Err(e) => {
                            error!("job {next} failed: {e}");
                            failed += 1;
                        }
                    }
                    next += 1;
                }
            }
            Ok((all, failed))
        });
        jobs.par_iter()
            .enumerate()
            .for_each_with(tx, |tx, (index, job)| {
                let result = run_job(
                    job,
                    &sources[job.source],
                    &cfg.methods,
                    cfg.contiguous,
                    opts,
                );
                // The receiver only hangs up after an I/O failure, which is
                // reported through the collector's result.
                let _ = tx.send((index, result));
            });
        collector.join().expect("writer thread panicked")
    })?;

    let cells = aggregate(&records);
    Ok(GridReport {
        records,
        failed_jobs,
        cells,
    })
}

/// Runs the grid into `out_path`, creating parent directories.
pub fn run_grid(
    cfg: &ExperimentConfig,
    opts: &SolverOptions,
    out_path: &Path,
) -> Result<GridReport, GridError> {
    if let Some(parent) = out_path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    let file = BufWriter::new(File::create(out_path)?);
    run_grid_to(cfg, opts, file)
}
