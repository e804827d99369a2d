//! Numerical probes of when a gap is uniquely determined by full DFT
//! magnitudes.
//!
//! Two gap fillings `u != v` of the same observed tail `y` are
//! indistinguishable iff `|F[u;y]|^2 = |F[v;y]|^2`. With `a = u - v` and
//! `w = [u + v; 2y]` that condition becomes the bilinear equation
//! `Re(conj(F[a;0]) * F w) = 0`. The helpers here evaluate both sides, map
//! between the two parameterizations, count the spectral zeros that limit
//! the number of phase constraints, and search for alternates with AM.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::am::{am_inpaint, AmOptions};
use crate::dft::{dft, dft_real};
use crate::error::{check_len, InpaintError, Result};
use crate::seed::derive_seed;
use crate::signal::{GapMask, RealSignal};

/// Final loss below which an AM run is treated as an exact solution.
pub const EXACT_LOSS: f64 = 1e-16;
/// Minimum sup-norm distance between distinct gap fillings.
pub const DISTINCT_TOL: f64 = 1e-6;

/// Observed tail `y` and two candidate fillings `u`, `v` of a head gap.
#[derive(Debug, Clone, PartialEq)]
pub struct CounterTriple {
    pub y: Vec<f64>,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
}

impl CounterTriple {
    pub fn gap_len(&self) -> usize {
        self.u.len()
    }

    pub fn len(&self) -> usize {
        self.u.len() + self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_distinct(&self, tol: f64) -> bool {
        sup_distance(&self.u, &self.v) > tol
    }
}

/// Difference `a` of the fillings and the symmetric signal `w`.
#[derive(Debug, Clone, PartialEq)]
pub struct BilinearPair {
    pub a: Vec<f64>,
    pub w: Vec<f64>,
}

fn sup_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

fn head_signal(head: &[f64], tail: &[f64]) -> Vec<f64> {
    head.iter().chain(tail).copied().collect()
}

/// `|F[u;y]|^2 - |F[v;y]|^2`, bin by bin.
pub fn magnitude_gap_residual(t: &CounterTriple) -> Result<Vec<f64>> {
    check_len("alternate gap", t.u.len(), t.v.len())?;
    let fu = dft_real(&head_signal(&t.u, &t.y));
    let fv = dft_real(&head_signal(&t.v, &t.y));
    Ok(fu
        .iter()
        .zip(&fv)
        .map(|(p, q)| p.norm_sqr() - q.norm_sqr())
        .collect())
}

/// `Re(conj(F[a;0]) * F w)`, bin by bin.
pub fn bilinear_residual(p: &BilinearPair) -> Result<Vec<f64>> {
    if p.a.len() > p.w.len() {
        return Err(InpaintError::GapTooLarge {
            d: p.a.len(),
            len: p.w.len(),
        });
    }
    let mut padded = p.a.clone();
    padded.resize(p.w.len(), 0.0);
    let fa = dft_real(&padded);
    let fw = dft_real(&p.w);
    Ok(fa.iter().zip(&fw).map(|(x, y)| (x.conj() * y).re).collect())
}

pub fn to_bilinear(t: &CounterTriple) -> Result<BilinearPair> {
    check_len("alternate gap", t.u.len(), t.v.len())?;
    let a = t.u.iter().zip(&t.v).map(|(u, v)| u - v).collect();
    let w =
        t.u.iter()
            .zip(&t.v)
            .map(|(u, v)| u + v)
            .chain(t.y.iter().map(|y| 2.0 * y))
            .collect();
    Ok(BilinearPair { a, w })
}

pub fn from_bilinear(p: &BilinearPair, d: usize) -> Result<CounterTriple> {
    if d > p.w.len() {
        return Err(InpaintError::GapTooLarge { d, len: p.w.len() });
    }
    check_len("difference vector", d, p.a.len())?;
    let (head, tail) = p.w.split_at(d);
    Ok(CounterTriple {
        u: head.iter().zip(&p.a).map(|(w, a)| (w + a) / 2.0).collect(),
        v: head.iter().zip(&p.a).map(|(w, a)| (w - a) / 2.0).collect(),
        y: tail.iter().map(|w| w / 2.0).collect(),
    })
}

/// Number of positive non-Nyquist frequencies where the DFT of `[a; 0]`
/// vanishes (relative threshold `1e-10 * |a|`).
///
/// For even `len` the frequencies are `1..len/2`; odd lengths use
/// `1..=(len-1)/2`.
pub fn count_spectral_zeros(a: &[f64], len: usize) -> Result<usize> {
    if a.len() > len {
        return Err(InpaintError::GapTooLarge { d: a.len(), len });
    }
    let norm = a.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm == 0.0 {
        return Err(InpaintError::ZeroVector);
    }
    let mut padded = a.to_vec();
    padded.resize(len, 0.0);
    let spec = dft_real(&padded);
    let upper = if len.is_multiple_of(2) {
        len / 2
    } else {
        len.div_ceil(2)
    };
    let threshold = 1e-10 * norm;
    Ok((1..upper).filter(|&f| spec[f].norm() < threshold).count())
}

/// Upper bound `floor((d - 1) / 2)` on [`count_spectral_zeros`].
pub fn spectral_zero_bound(d: usize) -> usize {
    d.saturating_sub(1) / 2
}

/// First index of a gap that is one contiguous run modulo the length.
pub fn gap_start(mask: &GapMask) -> Result<usize> {
    let d = mask.gap_len();
    let len = mask.len();
    if d == 0 || d == len {
        return Ok(0);
    }
    let mut starts = mask
        .missing()
        .iter()
        .copied()
        .filter(|&i| !mask.is_missing((i + len - 1) % len));
    match (starts.next(), starts.next()) {
        (Some(s), None) => Ok(s),
        _ => Err(InpaintError::NonContiguousGap),
    }
}

/// Circularly shifts `x` so that its (possibly wrapping) gap starts at index 0.
pub fn normalize_shift(x: &RealSignal, mask: &GapMask) -> Result<(RealSignal, GapMask)> {
    check_len("signal", mask.len(), x.len())?;
    let start = gap_start(mask)?;
    let mut samples = x.samples().to_vec();
    samples.rotate_left(start);
    Ok((
        RealSignal::new(samples)?,
        GapMask::contiguous(mask.len(), 0, mask.gap_len())?,
    ))
}

/// AM options used by the counter-example search; tighter than the defaults
/// so that exact alternates reach the `EXACT_LOSS` filter.
pub fn search_options() -> AmOptions {
    AmOptions {
        max_iters: 4000,
        window: 5,
        tol: 1e-22,
        ..AmOptions::default()
    }
}

/// Outcome of a multi-start search, expressed in the head-gap frame.
#[derive(Debug, Clone, PartialEq)]
pub struct CounterexampleSearch {
    /// The shifted signal, gap at indices `0..d`.
    pub signal: RealSignal,
    pub mask: GapMask,
    /// Distinct exact fillings different from the true gap.
    pub alternates: Vec<Vec<f64>>,
    /// How many starts reached an exact solution (true gap included).
    pub exact_starts: usize,
}

impl CounterexampleSearch {
    pub fn true_gap(&self) -> Vec<f64> {
        self.mask.restrict_missing(self.signal.samples())
    }

    pub fn observed(&self) -> Vec<f64> {
        self.mask.restrict_observed(self.signal.samples())
    }

    pub fn triple(&self, alternate: &[f64]) -> CounterTriple {
        CounterTriple {
            y: self.observed(),
            u: self.true_gap(),
            v: alternate.to_vec(),
        }
    }
}

/// Runs AM from `n_starts` Gaussian initializations and keeps exact solutions
/// whose gap differs from the truth.
pub fn search_counterexample(
    x: &RealSignal,
    mask: &GapMask,
    n_starts: usize,
    seed: u64,
) -> Result<CounterexampleSearch> {
    let (signal, mask) = normalize_shift(x, mask)?;
    let b = dft(&signal).magnitudes();
    let observed = mask.restrict_observed(signal.samples());
    let truth = mask.restrict_missing(signal.samples());
    let d = mask.gap_len();
    let opts = search_options();

    let finals: Vec<Option<Vec<f64>>> =
        (0..n_starts)
            .into_par_iter()
            .map(|start| -> Result<Option<Vec<f64>>> {
                let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, &[start as u64]));
                let init: Vec<f64> = (0..d).map(|_| StandardNormal.sample(&mut rng)).collect();
                let res = am_inpaint(&b, &observed, &mask, Some(&init), &opts)?;
                Ok((res.final_loss() < EXACT_LOSS)
                    .then(|| mask.restrict_missing(res.signal.samples())))
            })
            .collect::<Result<_>>()?;

    let exact_starts = finals.iter().filter(|f| f.is_some()).count();
    let mut alternates: Vec<Vec<f64>> = Vec::new();
    for gap in finals.into_iter().flatten() {
        if sup_distance(&gap, &truth) <= DISTINCT_TOL {
            continue;
        }
        if alternates
            .iter()
            .any(|seen| sup_distance(seen, &gap) <= DISTINCT_TOL)
        {
            continue;
        }
        alternates.push(gap);
    }

    Ok(CounterexampleSearch {
        signal,
        mask,
        alternates,
        exact_starts,
    })
}

/// Sup-norm of the magnitude residual for a candidate alternate.
pub fn verify_alternate(search: &CounterexampleSearch, alternate: &[f64]) -> Result<f64> {
    let r = magnitude_gap_residual(&search.triple(alternate))?;
    Ok(r.iter().fold(0.0, |m, v| m.max(v.abs())))
}

/// The two forms of the uniqueness threshold on `d`: `(L - 1) / 3` and the
/// stricter `L / 3 - 1`.
pub fn uniqueness_thresholds(len: usize) -> (f64, f64) {
    let l = len as f64;
    ((l - 1.0) / 3.0, l / 3.0 - 1.0)
}

/// Signal of i.i.d. standard normal samples.
pub fn gaussian_signal(len: usize, seed: u64) -> Result<RealSignal> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    RealSignal::new((0..len).map(|_| StandardNormal.sample(&mut rng)).collect())
}

/// Complex DFT bin of `[a; 0]` at frequency `f`, exposed for diagnostics.
pub fn padded_bin(a: &[f64], len: usize, f: usize) -> Complex64 {
    let mut padded = a.to_vec();
    padded.resize(len, 0.0);
    dft_real(&padded)[f % len]
}
