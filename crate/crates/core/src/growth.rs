//! Norm growth of iterated transfer operators: Lasota-Yorke style
//! experiments comparing `‖Opⁿ f‖_{p,q,t}` with the essential-radius bounds.

use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

use crate::bounds::BoundReport;
use crate::fourier::{aniso_norm, AnisoParams, TrigPoly};
use crate::linalg::complex_eigen;
use crate::torus::SmoothToralMap;
use crate::transfer::{assemble_galerkin_with, GalerkinMatrix, GalerkinOptions, OperatorKind};
use crate::{Error, Result};

/// Which invariant part is removed before and after every step.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum Projection {
    #[default]
    None,
    /// Drop the zero Fourier mode.
    ConstantMode,
    /// Remove the spectral projection onto eigenvalues of modulus above
    /// `threshold` of the unweighted section.
    PointSpectrum { threshold: f64 },
}

impl Projection {
    pub fn name(&self) -> &'static str {
        match self {
            Projection::None => "none",
            Projection::ConstantMode => "constant",
            Projection::PointSpectrum { .. } => "point_spectrum",
        }
    }
}

/// Outer-ring energy above which the grid is doubled once.
pub const ALIASING_LIMIT: f64 = 1e-6;

/// Random real polynomial with coefficients `e^{iθ_k} / (1 + |k|³)`, phases
/// uniform and independent up to the reality constraint (`c_0 = ±1`).
pub fn random_test_function<R: Rng + ?Sized>(rng: &mut R, n: usize) -> TrigPoly {
    let mut f = TrigPoly::zeros(n);
    let len = f.len();
    for idx in 0..len / 2 {
        let [k1, k2] = f.wavevector(idx);
        let r = ((k1 * k1 + k2 * k2) as f64).sqrt();
        let theta = rng.random::<f64>() * std::f64::consts::TAU;
        let c = Complex64::from_polar(1.0 / (1.0 + r.powi(3)), theta);
        f.coeffs_mut()[idx] = c;
        f.coeffs_mut()[len - 1 - idx] = c.conj();
    }
    f.coeffs_mut()[len / 2] = Complex64::new(if rng.random::<bool>() { 1.0 } else { -1.0 }, 0.0);
    f
}

/// The operator on the box `|k|∞ ≤ N` (unweighted coefficients) with an
/// optional spectral projector.
#[derive(Debug, Clone)]
pub struct GrowthEngine {
    pub kind: OperatorKind,
    pub n: usize,
    matrix: GalerkinMatrix,
    projector: Vec<(Vec<Complex64>, Vec<Complex64>, Complex64)>,
    projection: Projection,
}

impl GrowthEngine {
    pub fn new(kind: OperatorKind, map: &SmoothToralMap, n: usize, projection: Projection) -> Result<Self> {
        Self::with_options(kind, map, n, projection, &GalerkinOptions::default())
    }

    pub fn with_options(
        kind: OperatorKind,
        map: &SmoothToralMap,
        n: usize,
        projection: Projection,
        opts: &GalerkinOptions,
    ) -> Result<Self> {
        let plain = AnisoParams::new(0.0, 0.0, kind.t().unwrap_or(2.0), map.base().stable().direction)?;
        let mut matrix = assemble_galerkin_with(kind, map, &plain, n, opts)?;
        if matrix.aliasing > ALIASING_LIMIT {
            let retry = GalerkinOptions {
                grid: Some(2 * matrix.grid),
                ..*opts
            };
            matrix = assemble_galerkin_with(kind, map, &plain, n, &retry)?;
            if matrix.aliasing > ALIASING_LIMIT {
                return Err(Error::Aliasing(format!(
                    "relative outer-ring energy {:.3e} on grid {}",
                    matrix.aliasing, matrix.grid
                )));
            }
        }
        let mut projector = Vec::new();
        if let Projection::PointSpectrum { threshold } = projection {
            let dim = matrix.dim();
            let e = complex_eigen(matrix.data(), dim)?;
            for (i, lambda) in e.values.iter().enumerate() {
                if lambda.norm() <= threshold {
                    continue;
                }
                let v = e.right[i * dim..(i + 1) * dim].to_vec();
                let u = e.left[i * dim..(i + 1) * dim].to_vec();
                let uv: Complex64 = u.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                if uv.norm() < 1e-12 {
                    return Err(Error::param("projection", "defective eigenvalue above the threshold"));
                }
                projector.push((v, u, uv));
            }
        }
        Ok(Self {
            kind,
            n,
            matrix,
            projector,
            projection,
        })
    }

    /// Number of eigenvalues removed by the projector.
    pub fn projected_rank(&self) -> usize {
        match self.projection {
            Projection::None => 0,
            Projection::ConstantMode => 1,
            Projection::PointSpectrum { .. } => self.projector.len(),
        }
    }

    /// Relative mass in the outer ring of the grid used to build the operator.
    pub fn aliasing(&self) -> f64 {
        self.matrix.aliasing
    }

    pub fn project(&self, f: &mut TrigPoly) {
        match self.projection {
            Projection::None => {}
            Projection::ConstantMode => f.set([0, 0], Complex64::default()),
            Projection::PointSpectrum { .. } => {
                for (v, u, uv) in &self.projector {
                    let c: Complex64 = u.iter().zip(f.coeffs()).map(|(a, b)| a.conj() * b).sum::<Complex64>() / uv;
                    for (x, vi) in f.coeffs_mut().iter_mut().zip(v) {
                        *x -= c * vi;
                    }
                }
            }
        }
    }

    pub fn step(&self, f: &TrigPoly) -> Result<TrigPoly> {
        let mut g = self.step_raw(f)?;
        self.project(&mut g);
        Ok(g)
    }

    /// One application without projection.
    pub fn step_raw(&self, f: &TrigPoly) -> Result<TrigPoly> {
        self.matrix.apply(&f.resized(self.n))
    }

    /// Strong and weak norms along `f, Op f, …, Op^{n_max} f`.
    fn orbit_norms(&self, params: &AnisoParams, f: &TrigPoly, n_max: u32, project: bool) -> Result<(Vec<f64>, Vec<f64>)> {
        let weak_params = params.with_pq(params.p - 1.0, params.q);
        let mut g = f.resized(self.n);
        if project {
            self.project(&mut g);
        }
        let mut strong = Vec::with_capacity(n_max as usize + 1);
        let mut weak = Vec::with_capacity(n_max as usize + 1);
        for n in 0..=n_max {
            if n > 0 {
                g = if project { self.step(&g)? } else { self.step_raw(&g)? };
            }
            strong.push(aniso_norm(&g, params)?);
            weak.push(aniso_norm(&g, &weak_params)?);
        }
        Ok((strong, weak))
    }
}

/// Norms of `Opⁿ f` for `n = 0..=n_max` and the fitted growth rate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GrowthRecord {
    pub kind: String,
    pub p: f64,
    pub q: f64,
    pub t: f64,
    pub projection: &'static str,
    /// `‖Opⁿ f‖_{p,q,t}`.
    pub strong: Vec<f64>,
    /// `‖Opⁿ f‖_{p-1,q,t}`.
    pub weak: Vec<f64>,
    /// Least-squares slope of `ln strong` over the fitting window.
    pub slope: f64,
    /// Slope of the unprojected iteration (equal to `slope` without projection).
    pub raw_slope: f64,
    pub descriptor: String,
}

/// Iterate the engine on `f`, measuring strong and weak norms.
pub fn norm_growth(engine: &GrowthEngine, params: &AnisoParams, f: &TrigPoly, n_max: u32, descriptor: &str) -> Result<GrowthRecord> {
    if n_max < 2 {
        return Err(Error::param("n_max", "must be at least 2"));
    }
    let (strong, weak) = engine.orbit_norms(params, f, n_max, true)?;
    let slope = fitted_slope(&strong);
    let raw_slope = if engine.projection == Projection::None {
        slope
    } else {
        fitted_slope(&engine.orbit_norms(params, f, n_max, false)?.0)
    };
    Ok(GrowthRecord {
        kind: engine.kind.name().to_string(),
        p: params.p,
        q: params.q,
        t: params.t,
        projection: engine.projection.name(),
        slope,
        raw_slope,
        strong,
        weak,
        descriptor: descriptor.to_string(),
    })
}

/// Least-squares slope of `ln y_n` over `n ∈ [n_max/2, n_max]`.
///
/// If some `y_n` is exactly zero the window ends there, with the zero floored
/// at the smallest positive double, so exact annihilation shows up as a very
/// steep but finite slope.
pub fn fitted_slope(values: &[f64]) -> f64 {
    let n_max = values.len() - 1;
    let end = values.iter().position(|&v| v == 0.0).unwrap_or(n_max).min(n_max);
    let start = (n_max / 2).min(end.saturating_sub(1));
    if end <= start {
        return 0.0;
    }
    let pts: Vec<(f64, f64)> = (start..=end)
        .map(|n| (n as f64, values[n].max(f64::MIN_POSITIVE).ln()))
        .collect();
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Verdict {
    pub slope: f64,
    pub raw_slope: f64,
    pub rate: f64,
    pub bound: f64,
    pub margin: f64,
    pub pass: bool,
}

/// PASS iff `exp(slope) ≤ bound.limit + margin` (the projected slope when a
/// projection was used; generic `f` under `L` is dominated by the eigenvalue 1).
pub fn bound_comparison(record: &GrowthRecord, bound: &BoundReport, margin: f64) -> Verdict {
    compare_with_value(record, bound.limit, margin)
}

pub fn compare_with_value(record: &GrowthRecord, bound: f64, margin: f64) -> Verdict {
    let rate = record.slope.exp();
    Verdict {
        slope: record.slope,
        raw_slope: record.raw_slope,
        rate,
        bound,
        margin,
        pass: rate <= bound + margin,
    }
}

/// Per-`n` fit of `‖Opⁿf‖_s ≈ C_s ρⁿ ‖f‖_s + C_w ‖f‖_w` with `C_s, C_w ≥ 0`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TwoNormFit {
    pub rho: f64,
    pub c_strong: Vec<f64>,
    pub c_weak: Vec<f64>,
    /// `‖y − ŷ‖ / ‖y‖` for each `n`.
    pub residual: Vec<f64>,
}

impl TwoNormFit {
    pub fn max_residual(&self) -> f64 {
        self.residual.iter().copied().fold(0.0, f64::max)
    }
}

/// Fit the two-norm inequality over an ensemble of records sharing `n_max`.
pub fn two_norm_fit(records: &[GrowthRecord], rho: f64) -> Result<TwoNormFit> {
    let first = records.first().ok_or_else(|| Error::param("records", "empty ensemble"))?;
    let n_max = first.strong.len() - 1;
    let mut fit = TwoNormFit {
        rho,
        c_strong: Vec::new(),
        c_weak: Vec::new(),
        residual: Vec::new(),
    };
    for n in 1..=n_max {
        let rows: Vec<[f64; 3]> = records
            .iter()
            .map(|r| [rho.powi(n as i32) * r.strong[0], r.weak[0], r.strong[n]])
            .collect();
        let (c, res) = nnls2(&rows);
        fit.c_strong.push(c[0]);
        fit.c_weak.push(c[1]);
        fit.residual.push(res);
    }
    Ok(fit)
}

/// Nonnegative least squares for `y ≈ a x₁ + b x₂` with rows `[x₁, x₂, y]`;
/// returns the coefficients and the relative residual.
fn nnls2(rows: &[[f64; 3]]) -> ([f64; 2], f64) {
    let dot = |i: usize, j: usize| rows.iter().map(|r| r[i] * r[j]).sum::<f64>();
    let (s11, s12, s22, s1y, s2y, syy) = (dot(0, 0), dot(0, 1), dot(1, 1), dot(0, 2), dot(1, 2), dot(2, 2));
    let residual = |a: f64, b: f64| {
        let r: f64 = rows.iter().map(|r| (r[2] - a * r[0] - b * r[1]).powi(2)).sum();
        if syy > 0.0 { (r / syy).sqrt() } else { 0.0 }
    };
    let mut candidates = vec![[0.0, 0.0]];
    if s11 > 0.0 {
        candidates.push([(s1y / s11).max(0.0), 0.0]);
    }
    if s22 > 0.0 {
        candidates.push([0.0, (s2y / s22).max(0.0)]);
    }
    let det = s11 * s22 - s12 * s12;
    if det > 1e-300 * s11 * s22 && det > 0.0 {
        let a = (s22 * s1y - s12 * s2y) / det;
        let b = (s11 * s2y - s12 * s1y) / det;
        if a >= 0.0 && b >= 0.0 {
            candidates.push([a, b]);
        }
    }
    candidates
        .into_iter()
        .map(|c| (c, residual(c[0], c[1])))
        .min_by(|x, y| x.1.total_cmp(&y.1))
        .expect("nonempty candidates")
}
