use num_complex::Complex64;
use serde::Serialize;

use super::spectrum::Spectrum;

/// An eigenvalue outside `bound + margin` and its counterpart at a finer truncation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Outlier {
    pub re: f64,
    pub im: f64,
    pub modulus: f64,
    pub residual: Option<f64>,
    /// Nearest eigenvalue of the refined section.
    pub matched_re: f64,
    pub matched_im: f64,
    /// `| |λ| − |μ| |` for the matched pair.
    pub modulus_change: f64,
    pub stable: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RadiusCheck {
    pub bound: f64,
    pub margin: f64,
    pub n: usize,
    pub refined_n: usize,
    pub outliers: Vec<Outlier>,
    pub pass: bool,
}

impl RadiusCheck {
    pub fn stable_outliers(&self) -> Vec<Complex64> {
        self.outliers
            .iter()
            .filter(|o| o.stable)
            .map(|o| Complex64::new(o.re, o.im))
            .collect()
    }
}

/// Eigenvalues of modulus above `bound + margin` must reappear, with modulus
/// moved by less than `margin / 4`, in the refined spectrum.
pub fn essential_radius_check(eigs: &Spectrum, refined: &Spectrum, bound: f64, margin: f64) -> RadiusCheck {
    let threshold = bound + margin;
    let outliers: Vec<Outlier> = eigs
        .eigenvalues
        .iter()
        .filter(|e| e.modulus() > threshold)
        .map(|e| {
            let matched = refined
                .eigenvalues
                .iter()
                .map(|f| f.value)
                .min_by(|a, b| (a - e.value).norm().total_cmp(&(b - e.value).norm()))
                .unwrap_or(Complex64::new(f64::INFINITY, 0.0));
            let change = (matched.norm() - e.modulus()).abs();
            Outlier {
                re: e.value.re,
                im: e.value.im,
                modulus: e.modulus(),
                residual: e.residual,
                matched_re: matched.re,
                matched_im: matched.im,
                modulus_change: change,
                stable: change < margin / 4.0,
            }
        })
        .collect();
    RadiusCheck {
        bound,
        margin,
        n: eigs.n,
        refined_n: refined.n,
        pass: outliers.iter().all(|o| o.stable),
        outliers,
    }
}
