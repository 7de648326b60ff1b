//! Transfer operators of hyperbolic torus diffeomorphisms acting on
//! anisotropic Sobolev spaces.
//!
//! The crate is organised bottom-up:
//!
//! * [`torus`] : linear hyperbolic automorphisms of the 2-torus and their
//!   smooth conjugates, with differentials, foliation directions and local
//!   hyperbolicity exponents.
//! * [`bounds`] : the essential-spectral-radius bounds built from those
//!   exponents (sup-based and Lebesgue-averaged radii, Jacobian-weighted
//!   variants).
//! * [`fourier`] : trigonometric polynomials, the anisotropic symbol and its
//!   multiplier, and the anisotropic `L^t` norms.
//! * [`transfer`] : composition operators and their weighted Fourier-Galerkin
//!   finite sections, dense spectra and the essential-radius check.
//! * [`determinant`] : exact periodic-point enumeration, trace sums and the
//!   Taylor coefficients and zeros of the dynamical Fredholm determinant.
//! * [`growth`] : Lasota-Yorke style norm-growth experiments.

extern crate openblas_src;

pub mod bounds;
pub mod determinant;
mod error;
mod fft;
pub mod fourier;
pub mod growth;
pub mod linalg;
pub mod report;
pub mod torus;
pub mod transfer;

pub use error::{Error, Result};

/// Version of this crate, recorded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
pub use nalgebra::{Matrix2, Vector2};
pub use num_complex::Complex64;

/// A point of the torus `R²/Z²`, stored with coordinates in `[0, 1)`.
pub type Point = Vector2<f64>;
