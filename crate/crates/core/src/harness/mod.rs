//! Data ingestion, experiment grids, result files and figures.

pub mod config;
pub mod grid;
pub mod records;
pub mod summary;
pub mod synth;
pub mod wav;

pub use config::{ConfigError, ExperimentConfig, Method, Source};
pub use grid::{run_grid, run_grid_to, GridError, GridReport, SolverOptions};
pub use records::{read_records, CsvError, RecordWriter, TrialRecord};
pub use summary::{aggregate, emit_summary, CellSummary, SummaryKind};
pub use synth::{ar2_signal, extract_segment, make_gap};
pub use wav::{load_wav, parse_wav, WavAudio, WavError};
