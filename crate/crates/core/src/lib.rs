//! Cut-and-project model sets whose internal spaces are p-adic, profinite,
//! or mixed Euclidean/profinite.
//!
//! The crate is organised bottom-up:
//!
//! - [`exactnum`]: rationals, `ℤ[√2]`, 2×2 integer matrices and affine maps.
//! - [`padic`]: valuations, truncated p-adic / profinite elements and
//!   coset-union windows with exact Haar measure.
//! - [`substitution`]: substitution systems, Perron–Frobenius data,
//!   fixed-point patches and their geometric realisation.
//! - [`cutproject`]: schemes, star maps, model sets, densities, regularity.
//! - [`limitperiodic`], [`chair`], [`limitquasi`]: the three worked
//!   constructions (3-adic windows, chair tiling, `ℤ[√2]` sequence).
//! - [`diffraction`]: autocorrelation, Fourier module, analytic amplitudes
//!   and Fourier–Bohr estimates.

#![allow(clippy::needless_range_loop)]

pub mod catalog;
pub mod chair;
pub mod cutproject;
pub mod diffraction;
pub mod error;
pub mod exactnum;
pub mod limitperiodic;
pub mod limitquasi;
pub mod output;
pub mod padic;
pub mod substitution;

pub use error::{Error, Result};
