use std::collections::BTreeMap;
use std::f64::consts::TAU;

use nalgebra::{Matrix2, Vector2};
use num_complex::Complex64;

use super::automorphism::reduce;
use crate::{Error, Point, Result};

/// Default bound on `sup |Du|` guaranteeing that `w -> w + u(w)` is a diffeomorphism.
pub const DEFAULT_KAPPA_MAX: f64 = 0.5;

/// Resolution of the grid on which the contraction bound is validated.
const VALIDATION_GRID: usize = 64;

/// Default stopping tolerance of the inverse-chart fixed-point iteration.
pub const INVERSE_TOL: f64 = 1e-12;
const INVERSE_MAX_ITER: usize = 200;

/// One Fourier coefficient of a component of the displacement field `u`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DisplacementMode {
    /// 0 for the first coordinate, 1 for the second.
    pub component: usize,
    pub k: [i64; 2],
    pub coeff: Complex64,
}

/// The chart `Φ(w) = w + u(w) mod 1` with `u` a real trigonometric vector field.
#[derive(Debug, Clone, PartialEq)]
pub struct ConjugacyDiffeo {
    modes: Vec<DisplacementMode>,
    kappa: f64,
}

impl ConjugacyDiffeo {
    pub fn new(modes: Vec<DisplacementMode>) -> Result<Self> {
        Self::with_kappa_max(modes, DEFAULT_KAPPA_MAX)
    }

    pub fn with_kappa_max(modes: Vec<DisplacementMode>, kappa_max: f64) -> Result<Self> {
        if !(kappa_max > 0.0 && kappa_max < 1.0) {
            return Err(Error::param("kappa_max", "must lie in (0, 1)"));
        }
        let modes = merge_modes(modes)?;
        check_hermitian(&modes)?;
        let mut phi = Self { modes, kappa: 0.0 };
        phi.kappa = phi.sup_gradient_norm(VALIDATION_GRID);
        if phi.kappa > kappa_max {
            return Err(Error::DisplacementTooLarge {
                sup: phi.kappa,
                kappa_max,
            });
        }
        Ok(phi)
    }

    /// The identity chart.
    pub fn identity() -> Self {
        Self {
            modes: Vec::new(),
            kappa: 0.0,
        }
    }

    /// Area-preserving shear `u(w) = a sin(2π c·w) c⊥/|c|` along the integer
    /// direction `c`.
    pub fn shear(amplitude: f64, c: [i64; 2]) -> Result<Self> {
        if c == [0, 0] {
            return Err(Error::param("c", "shear wavevector must be nonzero"));
        }
        let perp = Vector2::new(-(c[1] as f64), c[0] as f64).normalize();
        let mut modes = Vec::new();
        for comp in 0..2 {
            let e = perp[comp];
            if e == 0.0 {
                continue;
            }
            // sin θ = (e^{iθ} - e^{-iθ}) / 2i
            let coeff = Complex64::new(0.0, -0.5 * amplitude * e);
            modes.push(DisplacementMode { component: comp, k: c, coeff });
            modes.push(DisplacementMode {
                component: comp,
                k: [-c[0], -c[1]],
                coeff: coeff.conj(),
            });
        }
        Self::new(modes)
    }

    /// `u(w) = a (sin 2πx, sin 2πy)`: odd, not area preserving.
    pub fn diagonal_sine(amplitude: f64) -> Result<Self> {
        let half = Complex64::new(0.0, -0.5 * amplitude);
        Self::new(vec![
            DisplacementMode { component: 0, k: [1, 0], coeff: half },
            DisplacementMode { component: 0, k: [-1, 0], coeff: half.conj() },
            DisplacementMode { component: 1, k: [0, 1], coeff: half },
            DisplacementMode { component: 1, k: [0, -1], coeff: half.conj() },
        ])
    }

    /// Multiply every coefficient by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        if factor == 0.0 {
            return Ok(Self::identity());
        }
        Self::new(
            self.modes
                .iter()
                .map(|m| DisplacementMode { coeff: m.coeff * factor, ..*m })
                .collect(),
        )
    }

    pub fn modes(&self) -> &[DisplacementMode] {
        &self.modes
    }

    pub fn is_identity(&self) -> bool {
        self.modes.is_empty()
    }

    /// Measured `sup |Du|` on the validation grid.
    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    /// Upper bound `Σ |coeff|` on `sup |u|`.
    pub fn amplitude_bound(&self) -> f64 {
        self.modes.iter().map(|m| m.coeff.norm()).sum()
    }

    /// Largest max-norm of a wavevector appearing in `u`.
    pub fn max_wavenumber(&self) -> i64 {
        self.modes.iter().map(|m| m.k[0].abs().max(m.k[1].abs())).max().unwrap_or(0)
    }

    /// The displacement `u(w)` (periodic, so `w` may be a lift).
    pub fn displacement(&self, w: &Vector2<f64>) -> Vector2<f64> {
        let mut u = Vector2::zeros();
        for m in &self.modes {
            let phase = TAU * (m.k[0] as f64 * w.x + m.k[1] as f64 * w.y);
            u[m.component] += (m.coeff * Complex64::cis(phase)).re;
        }
        u
    }

    /// `Du(w)`; row = component, column = coordinate.
    pub fn displacement_gradient(&self, w: &Vector2<f64>) -> Matrix2<f64> {
        let mut du = Matrix2::zeros();
        for m in &self.modes {
            let phase = TAU * (m.k[0] as f64 * w.x + m.k[1] as f64 * w.y);
            // d/dw_j of c e^{iθ} = c · 2πi k_j e^{iθ}
            let z = m.coeff * Complex64::cis(phase) * Complex64::new(0.0, TAU);
            for j in 0..2 {
                du[(m.component, j)] += (z * m.k[j] as f64).re;
            }
        }
        du
    }

    /// `DΦ(w) = I + Du(w)`.
    pub fn jacobian(&self, w: &Vector2<f64>) -> Matrix2<f64> {
        Matrix2::identity() + self.displacement_gradient(w)
    }

    pub fn apply(&self, w: &Point) -> Point {
        reduce(w + self.displacement(w))
    }

    /// `Φ⁻¹(z)` by the fixed-point iteration `w ← z − u(w)`.
    pub fn invert(&self, z: &Point) -> Result<Point> {
        self.invert_with_tol(z, INVERSE_TOL)
    }

    /// A tolerance of zero iterates until the steps stop shrinking at rounding level.
    pub fn invert_with_tol(&self, z: &Point, tol: f64) -> Result<Point> {
        if self.modes.is_empty() {
            return Ok(*z);
        }
        let mut w = z - self.displacement(z);
        let mut step = f64::INFINITY;
        for _ in 0..INVERSE_MAX_ITER {
            let next = z - self.displacement(&w);
            let prev = step;
            step = (next - w).amax();
            w = next;
            if step <= tol || (tol <= 0.0 && step <= INVERSE_TOL && step >= prev) {
                return Ok(reduce(w));
            }
        }
        Err(Error::InverseNotConverged {
            iterations: INVERSE_MAX_ITER,
            step,
        })
    }

    /// `sup |Du|` (spectral norm) over a midpoint grid.
    pub fn sup_gradient_norm(&self, res: usize) -> f64 {
        let mut sup = 0.0f64;
        for i in 0..res {
            for j in 0..res {
                let w = Vector2::new((i as f64 + 0.5) / res as f64, (j as f64 + 0.5) / res as f64);
                sup = sup.max(spectral_norm(&self.displacement_gradient(&w)));
            }
        }
        sup
    }
}

pub(crate) fn spectral_norm(m: &Matrix2<f64>) -> f64 {
    // Largest singular value of a 2x2 matrix.
    let a = m.norm_squared();
    let d = m.determinant();
    (0.5 * (a + (a * a - 4.0 * d * d).max(0.0).sqrt())).sqrt()
}

fn merge_modes(modes: Vec<DisplacementMode>) -> Result<Vec<DisplacementMode>> {
    let mut merged: BTreeMap<(usize, [i64; 2]), Complex64> = BTreeMap::new();
    for m in modes {
        if m.component > 1 {
            return Err(Error::param("component", format!("must be 0 or 1, got {}", m.component)));
        }
        *merged.entry((m.component, m.k)).or_default() += m.coeff;
    }
    Ok(merged
        .into_iter()
        .filter(|(_, c)| *c != Complex64::new(0.0, 0.0))
        .map(|((component, k), coeff)| DisplacementMode { component, k, coeff })
        .collect())
}

fn check_hermitian(modes: &[DisplacementMode]) -> Result<()> {
    let lookup: BTreeMap<(usize, [i64; 2]), Complex64> =
        modes.iter().map(|m| ((m.component, m.k), m.coeff)).collect();
    for m in modes {
        let partner = lookup
            .get(&(m.component, [-m.k[0], -m.k[1]]))
            .copied()
            .unwrap_or_default();
        let scale = m.coeff.norm().max(1e-300);
        if (partner - m.coeff.conj()).norm() > 1e-12 * scale {
            return Err(Error::NotRealValued {
                component: m.component,
                k: m.k,
            });
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shear_is_area_preserving() {
        let phi = ConjugacyDiffeo::shear(0.03, [0, 1]).unwrap();
        for i in 0..10 {
            let w = Vector2::new(0.1 * i as f64, 0.37 * i as f64);
            assert!((phi.jacobian(&w).determinant() - 1.0).abs() < 1e-15);
        }
        assert!((phi.kappa() - TAU * 0.03).abs() < 1e-3);
    }

    #[test]
    fn rejects_complex_field() {
        let bad = vec![DisplacementMode {
            component: 0,
            k: [1, 0],
            coeff: Complex64::new(0.0, 0.01),
        }];
        assert!(matches!(ConjugacyDiffeo::new(bad), Err(Error::NotRealValued { .. })));
    }

    #[test]
    fn rejects_large_displacement() {
        assert!(matches!(
            ConjugacyDiffeo::shear(0.2, [1, 0]),
            Err(Error::DisplacementTooLarge { .. })
        ));
    }

    #[test]
    fn inverse_round_trip() {
        let phi = ConjugacyDiffeo::diagonal_sine(0.05).unwrap();
        for i in 0..20 {
            let w = Vector2::new((0.13 * i as f64).fract(), (0.71 * i as f64 + 0.05).fract());
            let back = phi.invert(&phi.apply(&w)).unwrap();
            assert!(super::super::torus_distance(&back, &w) < 1e-11);
        }
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let phi = ConjugacyDiffeo::diagonal_sine(0.04).unwrap();
        let w = Vector2::new(0.3, 0.8);
        let h = 1e-6;
        let du = phi.displacement_gradient(&w);
        for j in 0..2 {
            let mut e = Vector2::zeros();
            e[j] = h;
            let fd = (phi.displacement(&(w + e)) - phi.displacement(&(w - e))) / (2.0 * h);
            for i in 0..2 {
                assert!((fd[i] - du[(i, j)]).abs() < 1e-8);
            }
        }
    }
}
