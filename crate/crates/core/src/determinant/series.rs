use num_complex::Complex64;
use serde::Serialize;

/// Relative size of rounding errors assumed in the Taylor coefficients.
const ROUNDING: f64 = 1e-15;

/// Taylor coefficients of `d(z) = exp(−Σ t_n zⁿ / n)` truncated at degree `N_tr`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeterminantSeries {
    /// `t_1, ..., t_{N_tr}`.
    pub traces: Vec<f64>,
    /// `c_0, ..., c_{N_tr}`.
    pub coeffs: Vec<f64>,
    /// Root-test estimate of the decay rate `limsup |c_n|^{1/n}`.
    pub theta: f64,
    /// Root-test estimate of the growth rate `limsup |t_n|^{1/n}`.
    pub trace_theta: f64,
}

/// Largest `|x_n|^{1/n}` over the last three entries of `x_1, x_2, ...`.
fn root_trend(x: &[f64]) -> f64 {
    let len = x.len();
    (len.saturating_sub(2).max(1)..=len)
        .map(|n| x[n - 1].abs().powf(1.0 / n as f64))
        .fold(0.0, f64::max)
}

/// `c_0 = 1`, `c_m = −(1/m) Σ_{n=1}^{m} t_n c_{m−n}`.
pub fn determinant_coeffs(traces: &[f64]) -> DeterminantSeries {
    let n_tr = traces.len();
    let mut c = vec![0.0; n_tr + 1];
    c[0] = 1.0;
    for m in 1..=n_tr {
        let s: f64 = (1..=m).map(|n| traces[n - 1] * c[m - n]).sum();
        c[m] = -s / m as f64;
    }
    let theta = if n_tr == 0 { 0.0 } else { root_trend(&c[1..]) };
    DeterminantSeries {
        traces: traces.to_vec(),
        trace_theta: if n_tr == 0 { 0.0 } else { root_trend(traces) },
        coeffs: c,
        theta,
    }
}

impl DeterminantSeries {
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// The truncated Taylor polynomial at `z`.
    pub fn evaluate(&self, z: Complex64) -> Complex64 {
        self.coeffs.iter().rev().fold(Complex64::default(), |acc, c| acc * z + c)
    }

    /// `P'(z)`.
    pub fn derivative(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .enumerate()
            .skip(1)
            .rev()
            .fold(Complex64::default(), |acc, (k, c)| acc * z + c * k as f64)
    }

    /// `exp(−Σ_{n ≤ N_tr} t_n zⁿ / n)`, the untruncated exponential of the partial sum.
    pub fn evaluate_exp(&self, z: Complex64) -> Complex64 {
        let s: Complex64 = self
            .traces
            .iter()
            .enumerate()
            .map(|(i, t)| z.powu(i as u32 + 1) * (t / (i + 1) as f64))
            .sum();
        (-s).exp()
    }

    /// Estimate of `|d(z) − P(z)|` for `|z| = r`: the geometric tail
    /// `(θr)^{N+1} / (1 − θr)` plus a rounding floor; infinite when `θr ≥ 1`.
    pub fn tail(&self, r: f64) -> f64 {
        let x = self.theta * r;
        let geometric = if x >= 1.0 {
            f64::INFINITY
        } else {
            x.powi(self.degree() as i32 + 1) / (1.0 - x)
        };
        let magnitude: f64 = self.coeffs.iter().enumerate().map(|(k, c)| c.abs() * r.powi(k as i32)).sum();
        geometric + ROUNDING * magnitude
    }

    /// Estimate of `|Σ_{n > N_tr} t_n zⁿ / n|` for `|z| = r`, from the trace trend.
    pub fn exponent_tail(&self, r: f64) -> f64 {
        let x = self.trace_theta * r;
        if x >= 1.0 {
            return f64::INFINITY;
        }
        let m = self.degree() as i32 + 1;
        x.powi(m) / (m as f64 * (1.0 - x))
    }

    /// Estimate of `|d(z) − evaluate_exp(z)|`.
    pub fn exp_error(&self, z: Complex64) -> f64 {
        self.evaluate_exp(z).norm() * self.exponent_tail(z.norm()).exp_m1()
    }
}
