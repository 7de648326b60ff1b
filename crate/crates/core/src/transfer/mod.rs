//! Transfer operators, their weighted Fourier-Galerkin sections and spectra.

mod check;
mod galerkin;
mod operator;
mod spectrum;

pub use check::{essential_radius_check, Outlier, RadiusCheck};
pub use galerkin::{
    assemble_galerkin, assemble_galerkin_with, choose_grid, smooth_size, GalerkinMatrix, GalerkinOptions, GridChoice, CHOP,
    DEFAULT_MAX_N,
};
pub use operator::{apply_operator, Applied, OperatorKind, ALIASING_WARN};
pub use spectrum::{realify, spectrum, Eigenvalue, Spectrum, RESIDUALS_PER_BLOCK};
