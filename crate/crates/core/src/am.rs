//! Alternating minimization over the gap samples and the Fourier phases.
//!
//! Each iteration takes the DFT of the current estimate, swaps its magnitudes
//! for the target `b`, inverts, and keeps the real part of the samples that
//! fall in the gap. Observed samples are never touched.

use num_complex::Complex64;

use crate::dft::{apply_phi_sub_adjoint, dft, dft_real, idft_complex, magnitude_loss};
use crate::error::{check_len, InpaintError, Result};
use crate::signal::{assemble, ComplexSpectrum, GapMask, MagnitudeSpectrum, RealSignal};

/// Unit-modulus phase factors, one per DFT bin.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseVector(Vec<Complex64>);

impl PhaseVector {
    /// Wraps `phases`, rejecting any entry whose modulus is off by more than 1e-12.
    pub fn new(phases: Vec<Complex64>) -> Result<Self> {
        if let Some(index) = phases.iter().position(|p| (p.norm() - 1.0).abs() > 1e-12) {
            return Err(InpaintError::InvalidOptions(format!(
                "phase at index {index} is not unit-modulus"
            )));
        }
        Ok(PhaseVector(phases))
    }

    pub fn phases(&self) -> &[Complex64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmOptions {
    pub max_iters: usize,
    /// Number of trailing loss values inspected by the stopping rule.
    pub window: usize,
    /// Stop once `max - min` over the last `window` losses is at most `tol`.
    pub tol: f64,
    /// Phase assigned to bins whose magnitude is exactly zero.
    pub zero_phase_fallback: Complex64,
}

impl Default for AmOptions {
    fn default() -> Self {
        AmOptions {
            max_iters: 1000,
            window: 5,
            tol: 1e-10,
            zero_phase_fallback: Complex64::new(1.0, 0.0),
        }
    }
}

impl AmOptions {
    pub fn validate(&self) -> Result<()> {
        if self.max_iters == 0 || self.window == 0 {
            return Err(InpaintError::InvalidOptions(
                "max_iters and window must be positive".into(),
            ));
        }
        if self.window > self.max_iters {
            return Err(InpaintError::InvalidOptions(
                "window must not exceed max_iters".into(),
            ));
        }
        if self.tol.is_nan() || self.tol < 0.0 {
            return Err(InpaintError::InvalidOptions(
                "tol must be nonnegative".into(),
            ));
        }
        if (self.zero_phase_fallback.norm() - 1.0).abs() > 1e-12 {
            return Err(InpaintError::InvalidOptions(
                "zero_phase_fallback must be unit-modulus".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AmResult {
    pub signal: RealSignal,
    pub iterations: usize,
    /// `loss(x_i, b)` for every iterate, starting with the initial signal.
    pub loss_trace: Vec<f64>,
    pub converged: bool,
}

impl AmResult {
    pub fn final_loss(&self) -> f64 {
        *self
            .loss_trace
            .last()
            .expect("trace holds the initial loss")
    }
}

fn phases_of(bins: &[Complex64], fallback: Complex64) -> Vec<Complex64> {
    bins.iter()
        .map(|&c| {
            let m = c.norm();
            if m == 0.0 {
                fallback
            } else {
                c / m
            }
        })
        .collect()
}

/// Phases of `dft(x)`; bins with zero magnitude get `1 + 0i`.
pub fn phase_update(x: &RealSignal) -> PhaseVector {
    phase_update_with(x, Complex64::new(1.0, 0.0))
}

pub fn phase_update_with(x: &RealSignal, fallback: Complex64) -> PhaseVector {
    PhaseVector(phases_of(dft(x).bins(), fallback))
}

/// Exact real minimizer of the gap block: `Re(Phi_gap^H diag(b) u)`.
pub fn gap_update(u: &PhaseVector, b: &MagnitudeSpectrum, mask: &GapMask) -> Result<Vec<f64>> {
    check_len("phases", mask.len(), u.len())?;
    check_len("magnitudes", mask.len(), b.len())?;
    let target: Vec<Complex64> = u.0.iter().zip(b.values()).map(|(p, &m)| p * m).collect();
    let back = apply_phi_sub_adjoint(&ComplexSpectrum::new(target), mask)?;
    Ok(back.into_iter().map(|c| c.re).collect())
}

/// Runs alternating minimization from `init_gap` (zeros when `None`).
pub fn am_inpaint(
    b: &MagnitudeSpectrum,
    observed: &[f64],
    mask: &GapMask,
    init_gap: Option<&[f64]>,
    opts: &AmOptions,
) -> Result<AmResult> {
    opts.validate()?;
    check_len("magnitudes", mask.len(), b.len())?;
    check_len("observed values", mask.observed().len(), observed.len())?;
    let zeros;
    let init = match init_gap {
        Some(g) => {
            check_len("initial gap", mask.gap_len(), g.len())?;
            g
        }
        None => {
            zeros = vec![0.0; mask.gap_len()];
            &zeros
        }
    };

    let mut x = assemble(mask, init, observed)?.into_vec();
    let mut spec = dft_real(&x);
    let mut loss_trace = vec![magnitude_loss(&spec, b)];
    let mut iterations = 0;
    let mut converged = false;

    while iterations < opts.max_iters {
        let mut target = phases_of(&spec, opts.zero_phase_fallback);
        for (t, &m) in target.iter_mut().zip(b.values()) {
            *t *= m;
        }
        let time = idft_complex(&target);
        for &i in mask.missing() {
            x[i] = time[i].re;
        }
        spec = dft_real(&x);
        loss_trace.push(magnitude_loss(&spec, b));
        iterations += 1;

        if loss_trace.len() >= opts.window {
            let tail = &loss_trace[loss_trace.len() - opts.window..];
            let hi = tail.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let lo = tail.iter().cloned().fold(f64::INFINITY, f64::min);
            if hi - lo <= opts.tol {
                converged = true;
                break;
            }
        }
    }

    Ok(AmResult {
        signal: RealSignal::new(x)?,
        iterations,
        loss_trace,
        converged,
    })
}
