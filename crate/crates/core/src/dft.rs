//! Unitary DFT and the masked column-split operators built on it.
//!
//! The transform uses the `1/sqrt(L)` scale in both directions, so the
//! adjoint is the inverse and the column blocks for missing and observed
//! samples are mutually orthogonal.

use std::cell::RefCell;
use std::collections::HashMap;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{check_len, Result};
use crate::signal::{ComplexSpectrum, GapMask, MagnitudeSpectrum, RealSignal};

type PlanPair = (Arc<dyn Fft<f64>>, Arc<dyn Fft<f64>>);

thread_local! {
    static PLANS: RefCell<(FftPlanner<f64>, HashMap<usize, PlanPair>)> =
        RefCell::new((FftPlanner::new(), HashMap::new()));
}

fn plans(len: usize) -> PlanPair {
    PLANS.with(|cell| {
        let mut guard = cell.borrow_mut();
        let (planner, cache) = &mut *guard;
        cache
            .entry(len)
            .or_insert_with(|| (planner.plan_fft_forward(len), planner.plan_fft_inverse(len)))
            .clone()
    })
}

fn transform_in_place(buf: &mut [Complex64], inverse: bool) {
    let len = buf.len();
    if len == 0 {
        return;
    }
    let (fwd, inv) = plans(len);
    if inverse {
        inv.process(buf);
    } else {
        fwd.process(buf);
    }
    let scale = 1.0 / (len as f64).sqrt();
    for c in buf.iter_mut() {
        *c *= scale;
    }
}

/// Unitary forward DFT of a complex vector.
pub fn dft_complex(values: &[Complex64]) -> Vec<Complex64> {
    let mut buf = values.to_vec();
    transform_in_place(&mut buf, false);
    buf
}

/// Unitary inverse DFT of a complex vector.
pub fn idft_complex(values: &[Complex64]) -> Vec<Complex64> {
    let mut buf = values.to_vec();
    transform_in_place(&mut buf, true);
    buf
}

/// Unitary DFT of a real vector.
pub fn dft_real(values: &[f64]) -> Vec<Complex64> {
    let mut buf: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    transform_in_place(&mut buf, false);
    buf
}

pub fn dft(signal: &RealSignal) -> ComplexSpectrum {
    ComplexSpectrum::new(dft_real(signal.samples()))
}

/// Adjoint (= inverse) of [`dft`]. The result is complex; callers project to
/// the real line when they know the spectrum is conjugate-symmetric.
pub fn idft(spectrum: &ComplexSpectrum) -> Vec<Complex64> {
    idft_complex(spectrum.bins())
}

/// Columns of the DFT restricted to the missing indices, applied to `vals`.
pub fn apply_phi_sub(vals: &[f64], mask: &GapMask) -> Result<ComplexSpectrum> {
    check_len("gap values", mask.gap_len(), vals.len())?;
    let mut buf = vec![Complex64::new(0.0, 0.0); mask.len()];
    for (&i, &v) in mask.missing().iter().zip(vals) {
        buf[i] = Complex64::new(v, 0.0);
    }
    transform_in_place(&mut buf, false);
    Ok(ComplexSpectrum::new(buf))
}

/// Hermitian transpose of [`apply_phi_sub`]: inverse DFT followed by
/// restriction to the missing indices.
pub fn apply_phi_sub_adjoint(spec: &ComplexSpectrum, mask: &GapMask) -> Result<Vec<Complex64>> {
    check_len("spectrum", mask.len(), spec.len())?;
    let time = idft_complex(spec.bins());
    Ok(mask.missing().iter().map(|&i| time[i]).collect())
}

/// Columns of the DFT restricted to the observed indices, applied to `vals`.
pub fn apply_phi_observed(vals: &[f64], mask: &GapMask) -> Result<ComplexSpectrum> {
    check_len("observed values", mask.observed().len(), vals.len())?;
    let mut buf = vec![Complex64::new(0.0, 0.0); mask.len()];
    for (&i, &v) in mask.observed().iter().zip(vals) {
        buf[i] = Complex64::new(v, 0.0);
    }
    transform_in_place(&mut buf, false);
    Ok(ComplexSpectrum::new(buf))
}

/// Squared Euclidean distance between `|dft(x)|` and `b`.
pub fn loss(x: &RealSignal, b: &MagnitudeSpectrum) -> Result<f64> {
    check_len("magnitudes", x.len(), b.len())?;
    Ok(magnitude_loss(dft(x).bins(), b))
}

pub(crate) fn magnitude_loss(bins: &[Complex64], b: &MagnitudeSpectrum) -> f64 {
    bins.iter()
        .zip(b.values())
        .map(|(c, &m)| {
            let r = c.norm() - m;
            r * r
        })
        .sum()
}
