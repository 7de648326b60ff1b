use std::f64::consts::SQRT_2;

use num_complex::Complex64;

use super::galerkin::GalerkinMatrix;
use super::operator::OperatorKind;
use crate::fourier::AnisoParams;
use crate::linalg::{by_descending_modulus, real_eigen, strongly_connected_components};
use crate::{Error, Result};

/// Leading eigenvalues of each irreducible block that get an eigenvector residual.
pub const RESIDUALS_PER_BLOCK: usize = 16;

/// Relative defect of `A(-j,-k) = conj A(j,k)` tolerated before refusing.
const SYMMETRY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Eigenvalue {
    pub value: Complex64,
    /// `‖Bv − λv‖/‖v‖` for the irreducible block `B` containing the eigenvalue.
    pub residual: Option<f64>,
    /// Index into [`Spectrum::block_sizes`].
    pub block: usize,
}

impl Eigenvalue {
    pub fn modulus(&self) -> f64 {
        self.value.norm()
    }
}

#[derive(Debug, Clone)]
pub struct Spectrum {
    pub n: usize,
    pub kind: OperatorKind,
    pub params: AnisoParams,
    /// Sorted by descending modulus.
    pub eigenvalues: Vec<Eigenvalue>,
    pub block_sizes: Vec<usize>,
}

impl Spectrum {
    pub fn values(&self) -> Vec<Complex64> {
        self.eigenvalues.iter().map(|e| e.value).collect()
    }
}

/// The matrix in the real basis `{1} ∪ {√2 cos 2πk·x, √2 sin 2πk·x}`,
/// column-major, with `k` running over the half box `k₁ > 0` or
/// `k₁ = 0, k₂ > 0`.
///
/// Requires `A(-j,-k) = conj A(j,k)`, which holds whenever the operator maps
/// real functions to real functions.
pub fn realify(m: &GalerkinMatrix) -> Result<Vec<f64>> {
    let dim = m.dim();
    let a = m.data();
    let centre = dim / 2;
    let at = |r: usize, c: usize| a[c * dim + r];
    let scale = a.iter().map(|z| z.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let mut defect = 0.0f64;
    for c in 0..dim {
        for r in 0..dim {
            defect = defect.max((at(dim - 1 - r, dim - 1 - c) - at(r, c).conj()).norm());
        }
    }
    if defect > SYMMETRY_TOL * scale {
        return Err(Error::NotConjugateSymmetric(defect / scale));
    }

    // Real basis index of the half-box wavevector at complex index centre + 1 + i.
    let cos_idx = |i: usize| 1 + 2 * i;
    let sin_idx = |i: usize| 2 + 2 * i;
    let mut out = vec![0.0; dim * dim];
    let mut w = vec![Complex64::default(); dim];
    let write_column = |col: usize, w: &[Complex64], out: &mut [f64]| {
        let dst = &mut out[col * dim..(col + 1) * dim];
        dst[0] = w[centre].re;
        for i in 0..centre {
            let z = w[centre + 1 + i];
            dst[cos_idx(i)] = SQRT_2 * z.re;
            dst[sin_idx(i)] = -SQRT_2 * z.im;
        }
    };
    w.copy_from_slice(&a[centre * dim..(centre + 1) * dim]);
    write_column(0, &w, &mut out);
    for i in 0..centre {
        let k = centre + 1 + i;
        // A c_k = (A e_k + A e_{-k})/√2 and A s_k = (A e_k − A e_{-k})/(i√2),
        // with (A e_{-k})(j) = conj A(-j, k).
        for j in 0..dim {
            w[j] = (at(j, k) + at(dim - 1 - j, k).conj()) / SQRT_2;
        }
        write_column(cos_idx(i), &w, &mut out);
        for j in 0..dim {
            let d = at(j, k) - at(dim - 1 - j, k).conj();
            w[j] = Complex64::new(d.im, -d.re) / SQRT_2;
        }
        write_column(sin_idx(i), &w, &mut out);
    }
    Ok(out)
}

/// All eigenvalues of the section, by realification and splitting into
/// irreducible diagonal blocks.
pub fn spectrum(m: &GalerkinMatrix) -> Result<Spectrum> {
    if m.params.t != 2.0 {
        return Err(Error::param("t", "spectra are only computed in the Hilbert case t = 2"));
    }
    let dim = m.dim();
    let r = realify(m)?;
    let blocks = strongly_connected_components(dim, |i, j| r[j * dim + i] != 0.0);
    let mut eigenvalues = Vec::with_capacity(dim);
    let mut block_sizes = Vec::with_capacity(blocks.len());
    for (b, idx) in blocks.iter().enumerate() {
        block_sizes.push(idx.len());
        if idx.len() == 1 {
            let i = idx[0];
            eigenvalues.push(Eigenvalue {
                value: Complex64::new(r[i * dim + i], 0.0),
                residual: Some(0.0),
                block: b,
            });
            continue;
        }
        let s = idx.len();
        let mut sub = vec![0.0; s * s];
        for (c, &jc) in idx.iter().enumerate() {
            for (rr, &ir) in idx.iter().enumerate() {
                sub[c * s + rr] = r[jc * dim + ir];
            }
        }
        let e = real_eigen(&sub, s, RESIDUALS_PER_BLOCK)?;
        for (value, residual) in e.values.into_iter().zip(e.residuals) {
            eigenvalues.push(Eigenvalue { value, residual, block: b });
        }
    }
    eigenvalues.sort_by(|a, b| by_descending_modulus(&a.value, &b.value).then(a.block.cmp(&b.block)));
    Ok(Spectrum {
        n: m.n,
        kind: m.kind,
        params: m.params,
        eigenvalues,
        block_sizes,
    })
}
