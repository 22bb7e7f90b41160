//! Numerics for four-wave-mixing photon-pair sources built from two coupled
//! waveguides.
//!
//! The crate is `no_std` (it needs `alloc`). Everything here is a pure
//! function of its inputs; file formats, configuration parsing and the
//! command-line front end live in the `coupled-fwm` crate.
//!
//! Module map:
//!
//! * [`dispersion`]: propagation constants of isolated guides (Sellmeier
//!   materials, step-index fibre LP01, effective-index rectangular guides,
//!   tabulated data) and group index.
//! * [`coupledmode`]: supermode propagation constants and field coefficients,
//!   coupling-constant models, beat lengths.
//! * [`phasematch`]: phase mismatch on the uncoupled and supermode branches,
//!   zero-mismatch contours, contour collapse and group-velocity ordering.
//! * [`propagation`]: split-step Fourier integration of the four coupled
//!   envelopes in both guides.
//! * [`jsa`]: pump and phase-matching functions, the joint spectral amplitude
//!   and its Schmidt decomposition.
//! * [`designsearch`]: objective, grid sweep and simplex refinement of the
//!   silicon geometry.
#![no_std]
// `!(x > 0.0)` also rejects NaN; field loops index several parallel arrays.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod coupledmode;
pub mod designsearch;
pub mod dispersion;
mod error;
pub mod fft;
pub mod jsa;
pub mod phasematch;
pub mod propagation;
pub mod roots;
pub mod special;
pub mod spline;
pub mod units;

pub use error::{Error, ErrorKind, Result};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
