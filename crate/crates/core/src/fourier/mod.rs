//! Trigonometric polynomials, the anisotropic symbol `a_{p,q}` and the norms
//! `‖·‖_{p,q,t}`.

mod chart;
mod symbol;
mod trigpoly;

pub use chart::{compose_with, pullback, pushforward, Resampled, ALIASING_TOL};
pub use symbol::{apply_multiplier, aniso_norm, norm_grid, parseval_norm, symbol_value, AnisoParams, MultiplierDirection};
pub use trigpoly::TrigPoly;
pub(crate) use trigpoly::{box_index, box_wavevector};
