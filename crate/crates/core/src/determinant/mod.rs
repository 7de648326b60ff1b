//! Periodic points, trace sums and the dynamical Fredholm determinant
//! `d(z) = exp(−Σ_n (zⁿ/n) Σ_{Tⁿx=x} 1/|det(DTⁿ(x) − Id)|)`.

mod matching;
mod periodic;
mod series;
mod zeros;

pub use matching::{resonance_match, MatchReport, ResonancePair};
pub use periodic::{
    enumerate_periodic, enumerate_periodic_with, linear_fixed_points, periodic_count, shifted_power, trace_sum, trace_sums,
    PeriodicOrbitData, PeriodicPoint, DEFAULT_MAX_PERIOD, RESIDUAL_TOL,
};
pub use series::{determinant_coeffs, DeterminantSeries};
pub use zeros::{zeros_in_disc, DeterminantZero, DEFAULT_SAFETY};
