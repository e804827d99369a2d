//! Test signals, segment extraction and gap placement.

use std::f64::consts::PI;

use log::warn;
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{InpaintError, Result};
use crate::signal::{GapMask, RealSignal};

/// Pole radius of the synthetic AR(2) source.
pub const AR2_POLE_RADIUS: f64 = 0.95;
/// RMS level the synthetic source is scaled to.
pub const AR2_RMS: f64 = 0.1;
const AR2_BURN_IN: usize = 256;

/// Windows quieter than this fraction of the source RMS count as silent.
pub const SILENCE_RATIO: f64 = 0.1;
pub const SEGMENT_ATTEMPTS: usize = 100;

/// Resonant AR(2) noise: poles at `0.95 e^{+-i theta}` with `theta` drawn
/// uniformly from `[0.05 pi, 0.5 pi]`, scaled to RMS 0.1.
pub fn ar2_signal(len: usize, seed: u64) -> Result<RealSignal> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let theta = rng.random_range(0.05 * PI..0.5 * PI);
    let a1 = 2.0 * AR2_POLE_RADIUS * theta.cos();
    let a2 = -AR2_POLE_RADIUS * AR2_POLE_RADIUS;
    let (mut p1, mut p2) = (0.0, 0.0);
    let mut out = Vec::with_capacity(len);
    for n in 0..AR2_BURN_IN + len {
        let e: f64 = StandardNormal.sample(&mut rng);
        let x = a1 * p1 + a2 * p2 + e;
        p2 = p1;
        p1 = x;
        if n >= AR2_BURN_IN {
            out.push(x);
        }
    }
    let signal = RealSignal::new(out)?;
    let rms = signal.rms();
    let scale = if rms > 0.0 { AR2_RMS / rms } else { 1.0 };
    RealSignal::new(signal.into_vec().into_iter().map(|v| v * scale).collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct Segment {
    pub signal: RealSignal,
    pub start: usize,
    /// No window met the loudness criterion; `signal` is the loudest tried.
    pub silent: bool,
}

/// Picks a seeded random window of length `len` whose RMS reaches 10 % of
/// the source RMS, trying at most 100 offsets.
pub fn extract_segment(source: &RealSignal, len: usize, seed: u64) -> Result<Segment> {
    if len == 0 || source.len() < len {
        return Err(InpaintError::GapTooLarge {
            d: len,
            len: source.len(),
        });
    }
    let samples = source.samples();
    let threshold = SILENCE_RATIO * source.rms();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let window_rms = |start: usize| {
        let w = &samples[start..start + len];
        (w.iter().map(|v| v * v).sum::<f64>() / len as f64).sqrt()
    };
    let mut best = (f64::NEG_INFINITY, 0usize);
    for _ in 0..SEGMENT_ATTEMPTS {
        let start = rng.random_range(0..=source.len() - len);
        let rms = window_rms(start);
        if rms > 0.0 && rms >= threshold {
            return Ok(Segment {
                signal: RealSignal::new(samples[start..start + len].to_vec())?,
                start,
                silent: false,
            });
        }
        if rms > best.0 {
            best = (rms, start);
        }
    }
    warn!("silent source: no window of {len} samples reached the loudness threshold");
    let start = best.1;
    Ok(Segment {
        signal: RealSignal::new(samples[start..start + len].to_vec())?,
        start,
        silent: true,
    })
}

/// Seeded gap of `d` samples: one run starting uniformly in `0..=len-d`, or
/// `d` distinct indices drawn without replacement.
pub fn make_gap(len: usize, d: usize, contiguous: bool, seed: u64) -> Result<GapMask> {
    if d > len {
        return Err(InpaintError::GapTooLarge { d, len });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    if contiguous {
        let start = rng.random_range(0..=len - d);
        GapMask::contiguous(len, start, d)
    } else {
        GapMask::new(len, sample(&mut rng, len, d))
    }
}
