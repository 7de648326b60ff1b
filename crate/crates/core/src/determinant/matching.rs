use num_complex::Complex64;
use serde::Serialize;

use super::zeros::DeterminantZero;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ResonancePair {
    pub zero_re: f64,
    pub zero_im: f64,
    pub eigen_re: f64,
    pub eigen_im: f64,
    /// `|γ − 1/z|`.
    pub mismatch: f64,
    pub within_tolerance: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MatchReport {
    pub pairs: Vec<ResonancePair>,
    /// Eigenvalues with `|γ| > 1/radius` that no zero was paired with.
    pub unmatched: Vec<[f64; 2]>,
}

impl MatchReport {
    pub fn consistent(&self) -> bool {
        self.unmatched.is_empty() && self.pairs.iter().all(|p| p.within_tolerance)
    }
}

/// Pair each zero `z` with the eigenvalue nearest to `1/z`.
///
/// A pair is within tolerance when the mismatch is below `tol` plus the
/// zero's error bar propagated through `z ↦ 1/z`.
pub fn resonance_match(zeros: &[DeterminantZero], eigs: &[Complex64], radius: f64, tol: f64) -> MatchReport {
    let mut used = vec![false; eigs.len()];
    let mut pairs = Vec::new();
    for z in zeros {
        let target = z.z().inv();
        let best = eigs
            .iter()
            .enumerate()
            .min_by(|(_, a), (_, b)| (*a - target).norm().total_cmp(&(*b - target).norm()));
        if let Some((i, g)) = best {
            used[i] = true;
            let mismatch = (g - target).norm();
            let propagated = z.error_bar / z.z().norm_sqr();
            pairs.push(ResonancePair {
                zero_re: z.re,
                zero_im: z.im,
                eigen_re: g.re,
                eigen_im: g.im,
                mismatch,
                within_tolerance: mismatch <= tol + propagated,
            });
        }
    }
    let unmatched = eigs
        .iter()
        .zip(&used)
        .filter(|(g, u)| !**u && g.norm() > 1.0 / radius)
        .map(|(g, _)| [g.re, g.im])
        .collect();
    MatchReport { pairs, unmatched }
}
