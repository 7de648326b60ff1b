use std::f64::consts::TAU;

use nalgebra::Vector2;
use num_complex::Complex64;

use super::TrigPoly;
use crate::{Error, Result};

/// Exponents `(p, q, t)` of the space `W^{p,q,t}` and the stable direction
/// `e_s` whose dual frequency is `ξ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnisoParams {
    pub p: f64,
    pub q: f64,
    pub t: f64,
    pub stable_dir: Vector2<f64>,
}

impl AnisoParams {
    pub fn new(p: f64, q: f64, t: f64, stable_dir: Vector2<f64>) -> Result<Self> {
        if !p.is_finite() || !q.is_finite() {
            return Err(Error::param("p, q", "must be finite"));
        }
        if !(t > 1.0 && t.is_finite()) {
            return Err(Error::param("t", format!("must lie in (1, inf), got {t}")));
        }
        if (stable_dir.norm() - 1.0).abs() > 1e-12 {
            return Err(Error::param("stable_dir", "must be a unit vector"));
        }
        Ok(Self { p, q, t, stable_dir })
    }

    /// `s = p + q`.
    pub fn s(&self) -> f64 {
        self.p + self.q
    }

    pub fn with_pq(&self, p: f64, q: f64) -> Self {
        Self { p, q, ..*self }
    }

    pub fn with_t(&self, t: f64) -> Result<Self> {
        Self::new(self.p, self.q, t, self.stable_dir)
    }

    /// `(ξ, η) = 2π (e_s·k, e_s^⊥·k)`.
    pub fn frequencies(&self, k: [i64; 2]) -> (f64, f64) {
        let e = self.stable_dir;
        let (k1, k2) = (k[0] as f64, k[1] as f64);
        (TAU * (e.x * k1 + e.y * k2), TAU * (-e.y * k1 + e.x * k2))
    }

    /// `ln a_{p,q}(k)`.
    pub fn log_symbol(&self, k: [i64; 2]) -> f64 {
        let (xi, eta) = self.frequencies(k);
        let full = (xi * xi + eta * eta).ln_1p();
        let stable = (xi * xi).ln_1p();
        0.5 * (self.p * full + self.q * stable)
    }
}

/// `a_{p,q}(ξ, η) = (1 + ξ² + η²)^{p/2} (1 + ξ²)^{q/2}` at the frequencies of `k`.
pub fn symbol_value(params: &AnisoParams, k: [i64; 2]) -> f64 {
    params.log_symbol(k).exp()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MultiplierDirection {
    Forward,
    Inverse,
}

/// `a^{Op}_{p,q} f` or its inverse, coefficient-wise.
pub fn apply_multiplier(f: &TrigPoly, params: &AnisoParams, direction: MultiplierDirection) -> TrigPoly {
    let sign = match direction {
        MultiplierDirection::Forward => 1.0,
        MultiplierDirection::Inverse => -1.0,
    };
    let mut out = f.clone();
    for (idx, c) in out.coeffs_mut().iter_mut().enumerate() {
        *c *= (sign * params.log_symbol(f.wavevector(idx))).exp();
    }
    out
}

/// Side of the quadrature grid used for `L^t` norms of a half-width `n` polynomial.
pub fn norm_grid(n: usize) -> usize {
    (4 * n).max(8)
}

/// `‖f‖_{p,q,t}`: the `L^t` norm of `a^{Op}_{p,q} f`, by quadrature on a
/// `(4N)²` grid.
pub fn aniso_norm(f: &TrigPoly, params: &AnisoParams) -> Result<f64> {
    let g = norm_grid(f.half_width());
    let values = apply_multiplier(f, params, MultiplierDirection::Forward).to_grid(g)?;
    Ok(lt_norm(&values, params.t))
}

/// `(Σ |a(k) c_k|²)^{1/2}`, equal to the `t = 2` norm.
pub fn parseval_norm(f: &TrigPoly, params: &AnisoParams) -> f64 {
    apply_multiplier(f, params, MultiplierDirection::Forward).l2_norm()
}

/// `L^t` norm of grid samples on the unit torus (each cell has area `1/len`).
pub(crate) fn lt_norm(values: &[Complex64], t: f64) -> f64 {
    let cell = 1.0 / values.len() as f64;
    if t == 2.0 {
        return (values.iter().map(|v| v.norm_sqr()).sum::<f64>() * cell).sqrt();
    }
    // Rescale by the maximum so that |v|^t neither underflows nor overflows.
    let m = values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    if m == 0.0 {
        return 0.0;
    }
    let s: f64 = values.iter().map(|v| (v.norm() / m).powf(t)).sum();
    m * (s * cell).powf(1.0 / t)
}
