//! Signal-to-error ratio and the magnitude noise model.

use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{check_len, InpaintError, Result};
use crate::signal::MagnitudeSpectrum;

/// SER above this value (strictly) counts as a perfect reconstruction.
pub const PERFECT_SER_DB: f64 = 20.0;

/// Signal-to-error ratio in dB. An exact estimate has no finite value and is
/// reported as [`Ser::Exact`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Ser {
    Db(f64),
    Exact,
}

impl Ser {
    pub fn db(self) -> f64 {
        match self {
            Ser::Db(v) => v,
            Ser::Exact => f64::INFINITY,
        }
    }

    pub fn is_perfect(self) -> bool {
        is_perfect(self.db())
    }
}

impl fmt::Display for Ser {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ser::Db(v) => write!(f, "{v}"),
            Ser::Exact => f.write_str("inf"),
        }
    }
}

/// `10 log10(|true|^2 / |est - true|^2)` over the missing samples only.
pub fn ser(est_gap: &[f64], true_gap: &[f64]) -> Result<Ser> {
    check_len("estimated gap", true_gap.len(), est_gap.len())?;
    let energy: f64 = true_gap.iter().map(|v| v * v).sum();
    if energy == 0.0 {
        return Err(InpaintError::UndefinedReference);
    }
    let err: f64 = est_gap
        .iter()
        .zip(true_gap)
        .map(|(e, t)| (e - t) * (e - t))
        .sum();
    if err == 0.0 {
        return Ok(Ser::Exact);
    }
    Ok(Ser::Db(10.0 * (energy / err).log10()))
}

pub fn is_perfect(ser_db: f64) -> bool {
    ser_db > PERFECT_SER_DB
}

/// Target magnitude SNR and the seed of the noise draw.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSpec {
    /// `f64::INFINITY` means noiseless.
    pub snr_db: f64,
    pub seed: u64,
}

/// White Gaussian noise with variance `mean(b^2) / 10^(snr/10)`.
pub fn magnitude_noise(b: &MagnitudeSpectrum, spec: &NoiseSpec) -> Vec<f64> {
    let n = b.len();
    if n == 0 || spec.snr_db == f64::INFINITY {
        return vec![0.0; n];
    }
    let power = b.values().iter().map(|v| v * v).sum::<f64>() / n as f64;
    let sigma = (power / 10f64.powf(spec.snr_db / 10.0)).sqrt();
    if !sigma.is_finite() || sigma <= 0.0 {
        return vec![0.0; n];
    }
    let normal = Normal::new(0.0, sigma).expect("sigma is positive and finite");
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    (0..n).map(|_| normal.sample(&mut rng)).collect()
}

/// `max(0, b + n)` with `n` from [`magnitude_noise`].
pub fn corrupt_magnitudes(b: &MagnitudeSpectrum, spec: &NoiseSpec) -> MagnitudeSpectrum {
    let noise = magnitude_noise(b, spec);
    let values = b
        .values()
        .iter()
        .zip(noise)
        .map(|(&m, n)| (m + n).max(0.0))
        .collect();
    MagnitudeSpectrum::new(values).expect("clipped sum of finite values is valid")
}
