use num_complex::Complex64;
use serde::Serialize;

use super::series::DeterminantSeries;
use crate::linalg::real_eigenvalues;
use crate::Result;

/// Fraction of the radius excluded near the boundary of the disc.
pub const DEFAULT_SAFETY: f64 = 0.1;

const NEWTON_STEPS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DeterminantZero {
    pub re: f64,
    pub im: f64,
    /// `tail(|z|) / |P'(z)|`.
    pub error_bar: f64,
    /// Another zero lies within the combined error bars.
    pub clustered: bool,
}

impl DeterminantZero {
    pub fn z(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }
}

/// Roots of the Taylor polynomial with `|z| < radius (1 − safety)`, sorted by modulus.
pub fn zeros_in_disc(series: &DeterminantSeries, radius: f64, safety: f64) -> Result<Vec<DeterminantZero>> {
    let mut c = series.coeffs.clone();
    while c.len() > 1 && *c.last().expect("nonempty") == 0.0 {
        c.pop();
    }
    let deg = c.len() - 1;
    if deg == 0 {
        return Ok(Vec::new());
    }
    // Companion matrix of the monic polynomial z^deg + Σ (c_k / c_deg) z^k.
    let lead = c[deg];
    let mut comp = vec![0.0; deg * deg];
    for i in 1..deg {
        comp[(i - 1) * deg + i] = 1.0;
    }
    for k in 0..deg {
        comp[(deg - 1) * deg + k] = -c[k] / lead;
    }
    let roots = real_eigenvalues(&comp, deg)?;
    let poly = DeterminantSeries {
        traces: Vec::new(),
        coeffs: c,
        theta: series.theta,
        trace_theta: series.trace_theta,
    };
    let limit = radius * (1.0 - safety);
    let mut zeros: Vec<DeterminantZero> = roots
        .into_iter()
        .map(|mut z| {
            for _ in 0..NEWTON_STEPS {
                let d = poly.derivative(z);
                if d.norm() == 0.0 {
                    break;
                }
                let step = poly.evaluate(z) / d;
                if !step.is_finite() {
                    break;
                }
                z -= step;
                if step.norm() <= f64::EPSILON * z.norm() {
                    break;
                }
            }
            z
        })
        .filter(|z| z.norm() < limit)
        .map(|z| DeterminantZero {
            re: z.re,
            im: z.im,
            error_bar: series.tail(z.norm()) / series.derivative(z).norm(),
            clustered: false,
        })
        .collect();
    zeros.sort_by(|a, b| {
        a.z().norm()
            .total_cmp(&b.z().norm())
            .then(a.re.total_cmp(&b.re))
            .then(a.im.total_cmp(&b.im))
    });
    for i in 0..zeros.len() {
        for j in 0..zeros.len() {
            if i != j && (zeros[i].z() - zeros[j].z()).norm() < zeros[i].error_bar + zeros[j].error_bar {
                zeros[i].clustered = true;
            }
        }
    }
    Ok(zeros)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::determinant::determinant_coeffs;

    #[test]
    fn quadratic_roots() {
        // (1 − z/2)(1 − z/3) = 1 − 5z/6 + z²/6
        let s = DeterminantSeries {
            traces: vec![],
            coeffs: vec![1.0, -5.0 / 6.0, 1.0 / 6.0],
            theta: 0.0,
            trace_theta: 0.0,
        };
        let z = zeros_in_disc(&s, 10.0, 0.1).unwrap();
        assert_eq!(z.len(), 2);
        assert!((z[0].z() - 2.0).norm() < 1e-14 && (z[1].z() - 3.0).norm() < 1e-14);
    }

    #[test]
    fn constant_has_no_zeros() {
        let s = determinant_coeffs(&[0.0; 4]);
        assert!(zeros_in_disc(&s, 5.0, 0.1).unwrap().is_empty());
    }
}
