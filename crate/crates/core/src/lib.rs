//! Frames of `L^2(Z_L)` adapted to covers of the finite time-frequency plane.
//!
//! A cover `{eta_gamma}` of `Z_L x Z_L` yields localization operators
//! `H_gamma`; their leading eigenvectors, optionally weighted by the
//! eigenvalues, form a frame whose bounds are certified numerically. The
//! [`lattice`] module does the same for Gabor multipliers on a separable lattice.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod covers;
pub mod error;
pub mod frames;
pub mod grid;
pub mod io;
pub mod lattice;
pub mod linalg;
pub mod locop;
pub mod signal;
pub mod stft;

#[cfg(test)]
mod testutil;

pub use covers::{validate_cover, AdmissibilityReport, Cover, Symbol};
pub use error::{Error, Result};
pub use frames::{
    assemble_frame, frame_certificate, reconstruct, EigenFrame, FrameCertificate, NormVariant,
    SelectionPolicy,
};
pub use grid::{GridPoint, PhaseSpaceGrid};
pub use lattice::{Lattice, LatticeGaborSystem};
pub use locop::{assemble_locop, threshold, LocOperator, Spectrum};
pub use signal::{gauss_window, tf_shift, Signal, Window};
pub use stft::{istft, stft, PhasePlaneArray};

pub use num_complex::Complex64;
