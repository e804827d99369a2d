//! Experiment configuration, read from a TOML document.
//!
//! ```toml
//! lengths = [256]                 # segment lengths L
//! fractions = [0.05, 0.10, 0.15]  # missing fractions d/L, in (0, 1]
//! methods = ["am", "cr", "cr+am"]
//! n_trials = 20
//! snr_db = [20, 40]               # optional; omit (or use inf) for exact magnitudes
//! source = ["synthetic", "wav:fixtures"]
//! contiguous = true               # optional, default true
//! seed = 1
//! output = "results.csv"          # optional, default "results.csv"
//! ```
//!
//! `source` takes one entry or a list; trial `t` draws from entry
//! `t % sources.len()`. Relative `wav:` directories resolve against the
//! directory holding the config file. Unknown keys are rejected.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Deserialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config: {0}")]
    Io(#[from] std::io::Error),
    #[error("config syntax: {0}")]
    Parse(String),
    #[error("invalid config: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Method {
    Am,
    Cr,
    CrAm,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::Am, Method::Cr, Method::CrAm];

    pub fn name(self) -> &'static str {
        match self {
            Method::Am => "am",
            Method::Cr => "cr",
            Method::CrAm => "cr+am",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "am" => Ok(Method::Am),
            "cr" => Ok(Method::Cr),
            "cr+am" | "cram" | "cr_am" => Ok(Method::CrAm),
            other => Err(ConfigError::Invalid(format!("unknown method `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Source {
    Synthetic,
    WavDir(PathBuf),
}

impl FromStr for Source {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "synthetic" {
            Ok(Source::Synthetic)
        } else if let Some(dir) = s.strip_prefix("wav:") {
            if dir.is_empty() {
                return Err(ConfigError::Invalid("empty wav directory".into()));
            }
            Ok(Source::WavDir(PathBuf::from(dir)))
        } else {
            Err(ConfigError::Invalid(format!(
                "unknown source `{s}`, expected `synthetic` or `wav:<dir>`"
            )))
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum OneOrMany<T> {
    One(T),
    Many(Vec<T>),
}

impl<T> OneOrMany<T> {
    fn into_vec(self) -> Vec<T> {
        match self {
            OneOrMany::One(v) => vec![v],
            OneOrMany::Many(v) => v,
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    lengths: Vec<usize>,
    fractions: Vec<f64>,
    methods: Vec<String>,
    n_trials: usize,
    snr_db: Option<OneOrMany<f64>>,
    source: OneOrMany<String>,
    contiguous: Option<bool>,
    seed: u64,
    output: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub lengths: Vec<usize>,
    pub fractions: Vec<f64>,
    pub methods: Vec<Method>,
    pub n_trials: usize,
    /// Magnitude SNR levels; `f64::INFINITY` stands for exact magnitudes.
    pub snr_db: Vec<f64>,
    pub sources: Vec<Source>,
    pub contiguous: bool,
    pub seed: u64,
    pub output: PathBuf,
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
        let mut methods = Vec::new();
        for m in &raw.methods {
            let m: Method = m.parse()?;
            if !methods.contains(&m) {
                methods.push(m);
            }
        }
        let sources = raw
            .source
            .into_vec()
            .iter()
            .map(|s| s.parse())
            .collect::<Result<Vec<Source>, _>>()?;
        let cfg = ExperimentConfig {
            lengths: raw.lengths,
            fractions: raw.fractions,
            methods,
            n_trials: raw.n_trials,
            snr_db: raw
                .snr_db
                .map(OneOrMany::into_vec)
                .unwrap_or_else(|| vec![f64::INFINITY]),
            sources,
            contiguous: raw.contiguous.unwrap_or(true),
            seed: raw.seed,
            output: raw.output.unwrap_or_else(|| PathBuf::from("results.csv")),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Reads and validates a config file, resolving relative wav
    /// directories against its parent directory.
    pub fn load(path: impl AsRef<Path>) -> Result<Self, ConfigError> {
        let path = path.as_ref();
        let mut cfg = Self::parse(&std::fs::read_to_string(path)?)?;
        let base = path.parent().unwrap_or(Path::new("."));
        for s in &mut cfg.sources {
            if let Source::WavDir(dir) = s {
                if dir.is_relative() {
                    *dir = base.join(&*dir);
                }
            }
        }
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let invalid = |m: &str| Err(ConfigError::Invalid(m.to_string()));
        if self.lengths.is_empty() || self.lengths.iter().any(|&l| l < 2) {
            return invalid("lengths must be a non-empty list of values >= 2");
        }
        if self.fractions.is_empty() || self.fractions.iter().any(|f| !(*f > 0.0 && *f <= 1.0)) {
            return invalid("fractions must be a non-empty list of values in (0, 1]");
        }
        if self.methods.is_empty() {
            return invalid("at least one method is required");
        }
        if self.snr_db.is_empty()
            || self
                .snr_db
                .iter()
                .any(|s| s.is_nan() || *s == f64::NEG_INFINITY)
        {
            return invalid("snr_db values must be real numbers or inf");
        }
        if self.sources.is_empty() {
            return invalid("at least one source is required");
        }
        Ok(())
    }

    /// Number of missing samples for a length and fraction (at least one).
    pub fn gap_len(len: usize, fraction: f64) -> usize {
        ((fraction * len as f64).round() as usize).clamp(1, len)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASIC: &str = r#"
lengths = [128, 256]
fractions = [0.05, 0.25]
methods = ["am", "cr+am"]
n_trials = 4
source = "synthetic"
seed = 7
"#;

    #[test]
    fn parses_defaults() {
        let c = ExperimentConfig::parse(BASIC).unwrap();
        assert_eq!(c.methods, vec![Method::Am, Method::CrAm]);
        assert_eq!(c.snr_db, vec![f64::INFINITY]);
        assert!(c.contiguous);
        assert_eq!(c.sources, vec![Source::Synthetic]);
    }

    #[test]
    fn parses_lists_and_inf() {
        let text = format!("{BASIC}snr_db = [0, 12.5, inf]\n").replace(
            "source = \"synthetic\"",
            "source = [\"synthetic\", \"wav:data\"]",
        );
        let c = ExperimentConfig::parse(&text).unwrap();
        assert_eq!(c.snr_db, vec![0.0, 12.5, f64::INFINITY]);
        assert_eq!(c.sources[1], Source::WavDir("data".into()));
    }

    #[test]
    fn rejects_unknown_keys_and_bad_values() {
        assert!(matches!(
            ExperimentConfig::parse(&format!("{BASIC}colour = 3\n")),
            Err(ConfigError::Parse(_))
        ));
        assert!(matches!(
            ExperimentConfig::parse(&BASIC.replace("0.25", "1.5")),
            Err(ConfigError::Invalid(_))
        ));
        assert!(ExperimentConfig::parse(&BASIC.replace("\"am\"", "\"spain\"")).is_err());
        assert!(ExperimentConfig::parse(&BASIC.replace("synthetic", "mp3:x")).is_err());
    }

    #[test]
    fn gap_len_rounds_and_clamps() {
        assert_eq!(ExperimentConfig::gap_len(256, 0.05), 13);
        assert_eq!(ExperimentConfig::gap_len(10, 0.01), 1);
        assert_eq!(ExperimentConfig::gap_len(10, 1.0), 10);
    }
}
