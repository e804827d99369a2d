//! Convex relaxation: lift the phase vector to a Hermitian PSD matrix with
//! unit diagonal, minimize `Tr(M U)` by block coordinate descent over its
//! columns, and read a signal off the leading eigenvector.
//!
//! The lifted variable has size `(L + 1) x (L + 1)`; the last coordinate is
//! the homogeneous entry of `[u; 1]`. Memory and time grow as `L^2` and
//! `n_iter * L^3`.

use log::warn;
use num_complex::Complex64;

use crate::am::{am_inpaint, AmOptions, AmResult};
use crate::dft::{apply_phi_observed, apply_phi_sub_adjoint, dft_complex, loss};
use crate::error::{check_len, InpaintError, Result};
use crate::matrix::CMatrix;
use crate::signal::{assemble, ComplexSpectrum, GapMask, MagnitudeSpectrum, RealSignal};

const GAMMA_FLOOR: f64 = 1e-14;
const HERMITIAN_TOL: f64 = 1e-9;
const HOMOGENEOUS_FLOOR: f64 = 1e-12;

pub const POWER_STEPS: usize = 200;
pub const POWER_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrOptions {
    /// Outer sweeps over the columns.
    pub n_iter: usize,
    /// Barrier parameter in `[0, 1)`.
    pub nu: f64,
}

impl Default for CrOptions {
    fn default() -> Self {
        CrOptions {
            n_iter: 10,
            nu: 0.0,
        }
    }
}

impl CrOptions {
    pub fn validate(&self) -> Result<()> {
        if self.n_iter == 0 {
            return Err(InpaintError::InvalidOptions(
                "n_iter must be positive".into(),
            ));
        }
        if !(0.0..1.0).contains(&self.nu) {
            return Err(InpaintError::InvalidOptions("nu must lie in [0, 1)".into()));
        }
        Ok(())
    }
}

/// Hermitian matrix with unit diagonal produced by [`bcd_solve`].
#[derive(Debug, Clone, PartialEq)]
pub struct LiftedMatrix(CMatrix);

impl LiftedMatrix {
    /// Wraps `m` after checking it is square, Hermitian within 1e-12 and has
    /// an exactly unit diagonal.
    pub fn new(m: CMatrix) -> Result<Self> {
        if !m.is_square() {
            return Err(InpaintError::InvalidMask(
                "lifted matrix must be square".into(),
            ));
        }
        let (dev, row, col) = m.hermitian_defect();
        if dev > 1e-12 {
            return Err(InpaintError::NotHermitian {
                row,
                col,
                deviation: dev,
            });
        }
        if let Some(i) = (0..m.rows()).find(|&i| m[(i, i)] != Complex64::new(1.0, 0.0)) {
            return Err(InpaintError::InvalidOptions(format!(
                "diagonal entry {i} of lifted matrix is not 1"
            )));
        }
        Ok(LiftedMatrix(m))
    }

    pub fn identity(n: usize) -> Self {
        LiftedMatrix(CMatrix::identity(n))
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.rows()
    }
}

/// `[(P - I) diag(b), Phi_obs * observed]` with `P = Phi_gap Phi_gap^H`.
///
/// `P` is circulant, so its first column is obtained through the operators
/// and the rest by circular shifts.
pub fn build_mtilde(b: &MagnitudeSpectrum, observed: &[f64], mask: &GapMask) -> Result<CMatrix> {
    let l = mask.len();
    check_len("magnitudes", l, b.len())?;
    check_len("observed values", mask.observed().len(), observed.len())?;

    let mut e0 = vec![Complex64::new(0.0, 0.0); l];
    e0[0] = Complex64::new(1.0, 0.0);
    let coeffs = apply_phi_sub_adjoint(&ComplexSpectrum::new(e0), mask)?;
    let mut scattered = vec![Complex64::new(0.0, 0.0); l];
    for (&i, &c) in mask.missing().iter().zip(&coeffs) {
        scattered[i] = c;
    }
    let p_col0 = dft_complex(&scattered);
    let last = apply_phi_observed(observed, mask)?;

    Ok(CMatrix::from_fn(l, l + 1, |k, j| {
        if j == l {
            last.bins()[k]
        } else {
            let mut p = p_col0[(k + l - j) % l];
            if k == j {
                p -= 1.0;
            }
            p * b.values()[j]
        }
    }))
}

/// Gram matrix `mtilde^H mtilde`.
#[allow(non_snake_case)]
pub fn build_Mtilde(mtilde: &CMatrix) -> CMatrix {
    mtilde.gram()
}

/// Result of a block coordinate descent run.
#[derive(Debug, Clone, PartialEq)]
pub struct BcdOutcome {
    pub lifted: LiftedMatrix,
    /// `Re Tr(M U)` at the identity start and after every sweep.
    pub objective_trace: Vec<f64>,
}

/// Block coordinate descent on `min Tr(M U)` s.t. `diag(U) = 1`, `U >= 0`.
///
/// Pivots run over `0..L`; the homogeneous column `L` is only updated
/// through the symmetric writes of the other pivots.
pub fn bcd_solve(mtilde_gram: &CMatrix, opts: &CrOptions) -> Result<LiftedMatrix> {
    bcd_solve_traced(mtilde_gram, opts).map(|o| o.lifted)
}

pub fn bcd_solve_traced(m: &CMatrix, opts: &CrOptions) -> Result<BcdOutcome> {
    opts.validate()?;
    if !m.is_square() || m.rows() == 0 {
        return Err(InpaintError::InvalidOptions(
            "BCD needs a non-empty square matrix".into(),
        ));
    }
    let scale = m.max_abs().max(1.0);
    let (dev, row, col) = m.hermitian_defect();
    if dev > HERMITIAN_TOL * scale || m.max_abs().is_nan() {
        return Err(InpaintError::NotHermitian {
            row,
            col,
            deviation: dev,
        });
    }

    let n = m.rows();
    let pivots = n - 1;
    let mut u = CMatrix::identity(n);
    let mut trace = Vec::with_capacity(opts.n_iter + 1);
    trace.push(m.trace_product(&u));
    let mut w = vec![Complex64::new(0.0, 0.0); n];
    let zero = Complex64::new(0.0, 0.0);

    for _ in 0..opts.n_iter {
        for k in 0..pivots {
            // Column k of M is the conjugate of row k.
            let mk: Vec<Complex64> = m.row(k).iter().map(|c| c.conj()).collect();
            let mut gamma = 0.0;
            for i in 0..n {
                if i == k {
                    w[i] = zero;
                    continue;
                }
                let row = u.row(i);
                let full: Complex64 = row.iter().zip(&mk).map(|(a, b)| a * b).sum();
                w[i] = full - row[k] * mk[k];
                gamma += (w[i].conj() * mk[i]).re;
            }
            let factor = if gamma > GAMMA_FLOOR {
                -((1.0 - opts.nu) / gamma).sqrt()
            } else {
                0.0
            };
            for i in 0..n {
                if i == k {
                    continue;
                }
                let v = w[i] * factor;
                u[(i, k)] = v;
                u[(k, i)] = v.conj();
            }
        }
        trace.push(m.trace_product(&u));
    }

    Ok(BcdOutcome {
        lifted: LiftedMatrix(u),
        objective_trace: trace,
    })
}

/// Leading eigenvector of a Hermitian PSD matrix by power iteration from the
/// normalized all-ones vector. Returns the unit eigenvector and its Rayleigh
/// quotient.
pub fn leading_eigenvector(m: &CMatrix, max_steps: usize, tol: f64) -> (Vec<Complex64>, f64) {
    let n = m.rows();
    let start = 1.0 / (n as f64).sqrt();
    let mut v = vec![Complex64::new(start, 0.0); n];
    for _ in 0..max_steps {
        let mut next = m.mul_vec(&v);
        let norm = next.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            break;
        }
        for c in next.iter_mut() {
            *c /= norm;
        }
        let change = next
            .iter()
            .zip(&v)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt();
        v = next;
        if change < tol {
            break;
        }
    }
    let mv = m.mul_vec(&v);
    let lambda = v.iter().zip(&mv).map(|(a, b)| (a.conj() * b).re).sum();
    (v, lambda)
}

/// Normalized phase estimate `u[0..L] / u[L]` from the leading eigenvector.
pub fn homogenized_phases(lifted: &LiftedMatrix) -> Result<Vec<Complex64>> {
    let (v, _) = leading_eigenvector(lifted.matrix(), POWER_STEPS, POWER_TOL);
    let l = v.len() - 1;
    let h = v[l];
    if h.norm() < HOMOGENEOUS_FLOOR {
        return Err(InpaintError::DegenerateHomogenization {
            magnitude: h.norm(),
        });
    }
    Ok(v[..l].iter().map(|c| c / h).collect())
}

/// Rank-1 extraction followed by the closed-form gap update.
pub fn extract_solution(
    lifted: &LiftedMatrix,
    b: &MagnitudeSpectrum,
    observed: &[f64],
    mask: &GapMask,
) -> Result<RealSignal> {
    check_len("lifted dimension", mask.len() + 1, lifted.dim())?;
    check_len("magnitudes", mask.len(), b.len())?;
    let phases = homogenized_phases(lifted)?;
    let target: Vec<Complex64> = phases.iter().zip(b.values()).map(|(p, &m)| p * m).collect();
    let gap: Vec<f64> = apply_phi_sub_adjoint(&ComplexSpectrum::new(target), mask)?
        .into_iter()
        .map(|c| c.re)
        .collect();
    assemble(mask, &gap, observed)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CrResult {
    pub signal: RealSignal,
    /// Number of BCD sweeps performed.
    pub iterations: usize,
    pub objective_trace: Vec<f64>,
    pub final_loss: f64,
}

/// End-to-end convex relaxation solve.
pub fn cr_inpaint(
    b: &MagnitudeSpectrum,
    observed: &[f64],
    mask: &GapMask,
    opts: &CrOptions,
) -> Result<CrResult> {
    opts.validate()?;
    let mtilde = build_mtilde(b, observed, mask)?;
    let gram = build_Mtilde(&mtilde);
    let outcome = bcd_solve_traced(&gram, opts)?;
    let signal = extract_solution(&outcome.lifted, b, observed, mask)?;
    let final_loss = loss(&signal, b)?;
    Ok(CrResult {
        signal,
        iterations: opts.n_iter,
        objective_trace: outcome.objective_trace,
        final_loss,
    })
}

/// AM started from a CR estimate; a degenerate CR run falls back to the zero
/// initialization.
pub fn refine_with_am(
    cr: &Result<CrResult>,
    b: &MagnitudeSpectrum,
    observed: &[f64],
    mask: &GapMask,
    am_opts: &AmOptions,
) -> Result<AmResult> {
    match cr {
        Ok(res) => {
            let init = mask.restrict_missing(res.signal.samples());
            am_inpaint(b, observed, mask, Some(&init), am_opts)
        }
        Err(InpaintError::DegenerateHomogenization { magnitude }) => {
            warn!("CR produced a degenerate homogeneous entry ({magnitude:e}); using zero init");
            am_inpaint(b, observed, mask, None, am_opts)
        }
        Err(e) => Err(e.clone()),
    }
}

pub fn cr_plus_am(
    b: &MagnitudeSpectrum,
    observed: &[f64],
    mask: &GapMask,
    cr_opts: &CrOptions,
    am_opts: &AmOptions,
) -> Result<AmResult> {
    let cr = cr_inpaint(b, observed, mask, cr_opts);
    refine_with_am(&cr, b, observed, mask, am_opts)
}
