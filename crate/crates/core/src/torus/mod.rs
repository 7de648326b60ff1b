//! Hyperbolic maps of the 2-torus.

mod automorphism;
mod conjugacy;
mod map;
mod spec;

pub use automorphism::{reduce, torus_delta, torus_distance, EigenDirection, ToralAutomorphism};
pub(crate) use automorphism::int_power;
pub use conjugacy::{ConjugacyDiffeo, DisplacementMode, DEFAULT_KAPPA_MAX, INVERSE_TOL};
pub use map::{Complement, DifferentialBlocks, LocalExponents, SmoothToralMap};
pub use spec::{MapSpec, ModeSpec};
