//! Dense-matrix reference implementations and random instance helpers.
#![allow(dead_code)]

use std::f64::consts::PI;

use fourier_inpaint::{CMatrix, GapMask, MagnitudeSpectrum, RealSignal};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Unitary DFT matrix, `F[k, n] = exp(-2 pi i k n / L) / sqrt(L)`.
pub fn dft_matrix(len: usize) -> DMatrix<Complex64> {
    let scale = 1.0 / (len as f64).sqrt();
    DMatrix::from_fn(len, len, |k, n| {
        let angle = -2.0 * PI * ((k * n) % len) as f64 / len as f64;
        Complex64::from_polar(scale, angle)
    })
}

pub fn columns(m: &DMatrix<Complex64>, idx: &[usize]) -> DMatrix<Complex64> {
    DMatrix::from_fn(m.nrows(), idx.len(), |r, c| m[(r, idx[c])])
}

pub fn to_complex(v: &[f64]) -> DVector<Complex64> {
    DVector::from_iterator(v.len(), v.iter().map(|&x| Complex64::new(x, 0.0)))
}

pub fn dense_dft(x: &[f64]) -> Vec<Complex64> {
    (dft_matrix(x.len()) * to_complex(x))
        .iter()
        .copied()
        .collect()
}

pub fn dense_phi_sub(vals: &[f64], mask: &GapMask) -> Vec<Complex64> {
    let f = columns(&dft_matrix(mask.len()), mask.missing());
    (f * to_complex(vals)).iter().copied().collect()
}

pub fn dense_phi_sub_adjoint(spec: &[Complex64], mask: &GapMask) -> Vec<Complex64> {
    let f = columns(&dft_matrix(mask.len()), mask.missing());
    let s = DVector::from_column_slice(spec);
    (f.adjoint() * s).iter().copied().collect()
}

/// `[(F_gap F_gap^H - I) diag(b), F_obs x_obs]` built entry by entry.
pub fn dense_mtilde(b: &[f64], observed: &[f64], mask: &GapMask) -> DMatrix<Complex64> {
    let l = mask.len();
    let f = dft_matrix(l);
    let fg = columns(&f, mask.missing());
    let fo = columns(&f, mask.observed());
    let p = &fg * fg.adjoint();
    let last = fo * to_complex(observed);
    let mut out = DMatrix::zeros(l, l + 1);
    for k in 0..l {
        for j in 0..l {
            let mut v = p[(k, j)];
            if k == j {
                v -= 1.0;
            }
            out[(k, j)] = v * b[j];
        }
        out[(k, l)] = last[k];
    }
    out
}

pub fn to_dense(m: &CMatrix) -> DMatrix<Complex64> {
    DMatrix::from_fn(m.rows(), m.cols(), |i, j| m[(i, j)])
}

/// `A^H A` by triple loop.
pub fn naive_gram(a: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let n = a.ncols();
    DMatrix::from_fn(n, n, |i, j| {
        (0..a.nrows()).map(|r| a[(r, i)].conj() * a[(r, j)]).sum()
    })
}

/// Real least-squares fit of the gap block:
/// `argmin_z |F_gap z + F_obs x_obs - target|` over real `z`, solved on the
/// stacked real/imaginary system.
pub fn dense_gap_lstsq(target: &[Complex64], observed: &[f64], mask: &GapMask) -> Vec<f64> {
    let l = mask.len();
    let f = dft_matrix(l);
    let fg = columns(&f, mask.missing());
    let fo = columns(&f, mask.observed());
    let r = DVector::from_column_slice(target) - fo * to_complex(observed);
    let d = mask.gap_len();
    let a = DMatrix::from_fn(2 * l, d, |i, j| {
        if i < l {
            fg[(i, j)].re
        } else {
            fg[(i - l, j)].im
        }
    });
    let rhs = DVector::from_fn(2 * l, |i, _| if i < l { r[i].re } else { r[i - l].im });
    let svd = a.svd(true, true);
    svd.solve(&rhs, 1e-14)
        .expect("svd solve")
        .iter()
        .copied()
        .collect()
}

pub fn max_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

pub fn max_diff_dense(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
    assert_eq!(a.shape(), b.shape());
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Smallest eigenvalue of a Hermitian matrix.
pub fn min_eigenvalue(m: &CMatrix) -> f64 {
    let dense = to_dense(m);
    let herm = (&dense + dense.adjoint()) * Complex64::new(0.5, 0.0);
    herm.symmetric_eigenvalues()
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

pub fn random_signal(rng: &mut ChaCha8Rng, len: usize) -> RealSignal {
    RealSignal::new((0..len).map(|_| rng.random_range(-1.0..1.0)).collect()).unwrap()
}

pub fn random_mask(rng: &mut ChaCha8Rng, len: usize, d: usize) -> GapMask {
    GapMask::new(len, sample(rng, len, d).into_vec()).unwrap()
}

pub fn random_contiguous(rng: &mut ChaCha8Rng, len: usize, d: usize) -> GapMask {
    let start = rng.random_range(0..=len - d);
    GapMask::contiguous(len, start, d).unwrap()
}

pub fn random_magnitudes(rng: &mut ChaCha8Rng, len: usize) -> MagnitudeSpectrum {
    MagnitudeSpectrum::new((0..len).map(|_| rng.random_range(0.0..2.0)).collect()).unwrap()
}

pub fn random_complex(rng: &mut ChaCha8Rng, len: usize) -> Vec<Complex64> {
    (0..len)
        .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect()
}
