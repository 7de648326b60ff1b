use rayon::prelude::*;

use super::TrigPoly;
use crate::torus::ConjugacyDiffeo;
use crate::{Point, Result};

/// Relative spectral tail above which a resampled polynomial is reported as aliased.
pub const ALIASING_TOL: f64 = 1e-8;

/// A polynomial obtained by sampling and truncating, with the `L²` mass that
/// was cut off.
#[derive(Debug, Clone, PartialEq)]
pub struct Resampled {
    pub poly: TrigPoly,
    /// `L²` norm of the sampled modes outside the output box.
    pub tail: f64,
}

impl Resampled {
    pub fn relative_tail(&self) -> f64 {
        let norm = self.poly.l2_norm();
        if norm == 0.0 {
            if self.tail == 0.0 { 0.0 } else { f64::INFINITY }
        } else {
            self.tail / norm
        }
    }

    pub fn aliasing_warning(&self) -> Option<String> {
        let r = self.relative_tail();
        (r > ALIASING_TOL).then(|| format!("spectral tail {r:.3e} of the norm exceeds {ALIASING_TOL:e}"))
    }
}

/// Coefficients of `x ↦ f(g(x))` on the box of half-width `n_out`, sampled on
/// a `2(2 n_out + 1)` grid so that the tail just outside the box is measured.
pub fn compose_with<G>(f: &TrigPoly, n_out: usize, g: G) -> Result<Resampled>
where
    G: Fn(&Point) -> Result<Point> + Sync,
{
    let side = 2 * (2 * n_out + 1);
    let values = (0..side * side)
        .into_par_iter()
        .map(|idx| {
            let x = Point::new((idx / side) as f64 / side as f64, (idx % side) as f64 / side as f64);
            Ok(f.evaluate(&g(&x)?))
        })
        .collect::<Result<Vec<_>>>()?;
    let (poly, tail) = TrigPoly::from_grid_with_tail(values, side, n_out)?;
    Ok(Resampled { poly, tail })
}

/// `f ∘ Φ⁻¹`: a function of chart coordinates viewed on the torus.
pub fn pullback(f: &TrigPoly, phi: &ConjugacyDiffeo, n_out: usize) -> Result<Resampled> {
    compose_with(f, n_out, |x| phi.invert(x))
}

/// `f ∘ Φ`.
pub fn pushforward(f: &TrigPoly, phi: &ConjugacyDiffeo, n_out: usize) -> Result<Resampled> {
    compose_with(f, n_out, |x| Ok(phi.apply(x)))
}
