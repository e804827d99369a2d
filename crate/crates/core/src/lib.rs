//! Restoration of missing samples of a real signal from its observed samples
//! and the magnitudes of its full (unpadded) discrete Fourier transform.
//!
//! Two solvers are provided: alternating minimization ([`am`]) and a convex
//! relaxation solved by block coordinate descent ([`cr`]). The
//! [`uniqueness`] module probes when the gap is determined by the data, and
//! [`harness`] runs seeded experiment grids.

pub mod am;
pub mod cr;
pub mod dft;
pub mod error;
pub mod harness;
pub mod matrix;
pub mod metrics;
pub mod seed;
pub mod signal;
pub mod uniqueness;

pub use am::{am_inpaint, gap_update, phase_update, AmOptions, AmResult, PhaseVector};
pub use cr::{
    bcd_solve, build_Mtilde, build_mtilde, cr_inpaint, cr_plus_am, extract_solution, CrOptions,
    CrResult, LiftedMatrix,
};
pub use dft::{apply_phi_sub, apply_phi_sub_adjoint, dft, idft, loss};
pub use error::{InpaintError, Result};
pub use matrix::CMatrix;
pub use metrics::{corrupt_magnitudes, is_perfect, ser, NoiseSpec, Ser};
pub use signal::{assemble, ComplexSpectrum, GapMask, MagnitudeSpectrum, RealSignal};
