//! Value types shared by every solver: real signals, gap masks and spectra.

use num_complex::Complex64;

use crate::error::{check_len, InpaintError, Result};

/// A fixed-length vector of finite real samples.
#[derive(Debug, Clone, PartialEq)]
pub struct RealSignal(Vec<f64>);

impl RealSignal {
    pub fn new(samples: Vec<f64>) -> Result<Self> {
        if samples.is_empty() {
            return Err(InpaintError::EmptySignal);
        }
        if let Some(index) = samples.iter().position(|s| !s.is_finite()) {
            return Err(InpaintError::NonFinite { index });
        }
        Ok(RealSignal(samples))
    }

    pub fn zeros(len: usize) -> Result<Self> {
        Self::new(vec![0.0; len])
    }

    pub fn samples(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn rms(&self) -> f64 {
        (self.0.iter().map(|s| s * s).sum::<f64>() / self.0.len() as f64).sqrt()
    }
}

/// Partition of `0..len` into missing indices (the gap) and observed indices.
///
/// Both index lists are kept sorted. The gap does not need to be contiguous.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GapMask {
    len: usize,
    missing: Vec<usize>,
    observed: Vec<usize>,
}

impl GapMask {
    pub fn new(len: usize, missing: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut missing: Vec<usize> = missing.into_iter().collect();
        missing.sort_unstable();
        if let Some(&last) = missing.last() {
            if last >= len {
                return Err(InpaintError::InvalidMask(format!(
                    "index {last} out of range for length {len}"
                )));
            }
        }
        if missing.windows(2).any(|w| w[0] == w[1]) {
            return Err(InpaintError::InvalidMask("duplicate index".into()));
        }
        let mut flags = vec![false; len];
        for &i in &missing {
            flags[i] = true;
        }
        let observed = (0..len).filter(|&i| !flags[i]).collect();
        Ok(GapMask {
            len,
            missing,
            observed,
        })
    }

    /// A contiguous gap `start..start + d` without wrap-around.
    pub fn contiguous(len: usize, start: usize, d: usize) -> Result<Self> {
        if start + d > len {
            return Err(InpaintError::GapTooLarge { d: start + d, len });
        }
        Self::new(len, start..start + d)
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Number of missing samples `d`.
    pub fn gap_len(&self) -> usize {
        self.missing.len()
    }

    pub fn missing(&self) -> &[usize] {
        &self.missing
    }

    pub fn observed(&self) -> &[usize] {
        &self.observed
    }

    pub fn is_missing(&self, index: usize) -> bool {
        self.missing.binary_search(&index).is_ok()
    }

    pub fn restrict_missing(&self, values: &[f64]) -> Vec<f64> {
        self.missing.iter().map(|&i| values[i]).collect()
    }

    pub fn restrict_observed(&self, values: &[f64]) -> Vec<f64> {
        self.observed.iter().map(|&i| values[i]).collect()
    }
}

/// Scatter gap and observed values back into original index order.
pub fn assemble(mask: &GapMask, gap_vals: &[f64], observed_vals: &[f64]) -> Result<RealSignal> {
    check_len("gap values", mask.gap_len(), gap_vals.len())?;
    check_len("observed values", mask.observed.len(), observed_vals.len())?;
    let mut out = vec![0.0; mask.len];
    for (&i, &v) in mask.missing.iter().zip(gap_vals) {
        out[i] = v;
    }
    for (&i, &v) in mask.observed.iter().zip(observed_vals) {
        out[i] = v;
    }
    RealSignal::new(out)
}

/// Bins of a length-`L` discrete Fourier transform.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexSpectrum(Vec<Complex64>);

impl ComplexSpectrum {
    pub fn new(bins: Vec<Complex64>) -> Self {
        ComplexSpectrum(bins)
    }

    pub fn bins(&self) -> &[Complex64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_vec(self) -> Vec<Complex64> {
        self.0
    }

    pub fn magnitudes(&self) -> MagnitudeSpectrum {
        MagnitudeSpectrum(self.0.iter().map(|c| c.norm()).collect())
    }
}

/// Nonnegative DFT magnitudes, the side information of the inpainting problem.
#[derive(Debug, Clone, PartialEq)]
pub struct MagnitudeSpectrum(Vec<f64>);

impl MagnitudeSpectrum {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        for (index, &value) in values.iter().enumerate() {
            if !value.is_finite() {
                return Err(InpaintError::NonFinite { index });
            }
            if value < 0.0 {
                return Err(InpaintError::NegativeMagnitude { index, value });
            }
        }
        Ok(MagnitudeSpectrum(values))
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mask_partitions_indices() {
        let m = GapMask::new(6, [4, 1]).unwrap();
        assert_eq!(m.missing(), &[1, 4]);
        assert_eq!(m.observed(), &[0, 2, 3, 5]);
        assert_eq!(m.gap_len(), 2);
    }

    #[test]
    fn mask_rejects_bad_indices() {
        assert!(GapMask::new(4, [4]).is_err());
        assert!(GapMask::new(4, [1, 1]).is_err());
        assert!(GapMask::contiguous(4, 2, 3).is_err());
        assert_eq!(GapMask::contiguous(4, 0, 4).unwrap().observed().len(), 0);
    }

    #[test]
    fn assemble_scatters_in_index_order() {
        let m = GapMask::new(5, [1, 3]).unwrap();
        let x = assemble(&m, &[9.0, 8.0], &[1.0, 2.0, 3.0]).unwrap();
        assert_eq!(x.samples(), &[1.0, 9.0, 2.0, 8.0, 3.0]);
        assert_eq!(m.restrict_missing(x.samples()), vec![9.0, 8.0]);
    }

    #[test]
    fn assemble_without_gap_is_observed() {
        let m = GapMask::new(3, []).unwrap();
        let x = assemble(&m, &[], &[1.0, 2.0, 3.0]).unwrap();
        assert_eq!(x.samples(), &[1.0, 2.0, 3.0]);
    }

    #[test]
    fn assemble_checks_lengths() {
        let m = GapMask::new(5, [1, 3]).unwrap();
        assert!(matches!(
            assemble(&m, &[9.0], &[1.0, 2.0, 3.0]),
            Err(InpaintError::LengthMismatch { .. })
        ));
    }

    #[test]
    fn signal_rejects_non_finite() {
        assert_eq!(
            RealSignal::new(vec![0.0, f64::NAN]),
            Err(InpaintError::NonFinite { index: 1 })
        );
        assert_eq!(RealSignal::new(vec![]), Err(InpaintError::EmptySignal));
        assert!(MagnitudeSpectrum::new(vec![1.0, -0.5]).is_err());
    }
}
