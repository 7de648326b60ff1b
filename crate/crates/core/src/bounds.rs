//! Essential-spectral-radius bounds assembled from local hyperbolicity
//! exponents sampled on a midpoint grid.
//!
//! Everything is evaluated in logarithms: for each `n` a functional `S_n` of
//! the exponents is formed and the reported value is `S_n^{1/n}`.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::torus::SmoothToralMap;
use crate::{Error, Point, Result};

/// Exponents `(p, s)` with `p < 0 < s`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExponentPair {
    pub p: f64,
    pub s: f64,
}

impl ExponentPair {
    pub fn new(p: f64, s: f64) -> Result<Self> {
        if !(p < 0.0) || !p.is_finite() {
            return Err(Error::param("p", format!("must be negative, got {p}")));
        }
        if !(s > 0.0) || !s.is_finite() {
            return Err(Error::param("s", format!("must be positive, got {s}")));
        }
        Ok(Self { p, s })
    }

    /// `q = s - p`.
    pub fn q(&self) -> f64 {
        self.s - self.p
    }

    /// The pair `(-s, -p)` governing the inverse map; not itself admissible.
    fn dual(&self) -> (f64, f64) {
        (-self.s, -self.p)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundFormula {
    RhoInfty,
    RhoOne,
    Thm1,
    Thm2,
    #[serde(rename = "propL1_u")]
    PropL1U,
    #[serde(rename = "propL1_s")]
    PropL1S,
    #[serde(rename = "propL12")]
    PropL12,
    #[serde(rename = "appendix_Lt")]
    AppendixLt,
    #[serde(rename = "appendix_Mt")]
    AppendixMt,
}

impl BoundFormula {
    pub const ALL: [BoundFormula; 9] = [
        BoundFormula::RhoInfty,
        BoundFormula::RhoOne,
        BoundFormula::Thm1,
        BoundFormula::Thm2,
        BoundFormula::PropL1U,
        BoundFormula::PropL1S,
        BoundFormula::PropL12,
        BoundFormula::AppendixLt,
        BoundFormula::AppendixMt,
    ];

    pub fn id(&self) -> &'static str {
        match self {
            BoundFormula::RhoInfty => "rho_infty",
            BoundFormula::RhoOne => "rho_one",
            BoundFormula::Thm1 => "thm1",
            BoundFormula::Thm2 => "thm2",
            BoundFormula::PropL1U => "propL1_u",
            BoundFormula::PropL1S => "propL1_s",
            BoundFormula::PropL12 => "propL12",
            BoundFormula::AppendixLt => "appendix_Lt",
            BoundFormula::AppendixMt => "appendix_Mt",
        }
    }

    /// Whether the formula depends on the Lebesgue exponent `t`.
    pub fn uses_t(&self) -> bool {
        matches!(
            self,
            BoundFormula::Thm1 | BoundFormula::Thm2 | BoundFormula::PropL1U | BoundFormula::PropL1S | BoundFormula::PropL12
        )
    }
}

impl fmt::Display for BoundFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for BoundFormula {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        BoundFormula::ALL
            .into_iter()
            .find(|f| f.id() == s)
            .ok_or_else(|| Error::Parse(format!("unknown bound formula `{s}`")))
    }
}

/// `ln λ_w(Tⁿ)`, `ln ν_w(Tⁿ)` and `ln |det D_wTⁿ|` on a `grid × grid`
/// midpoint grid for `n = 1..=n_max`.
#[derive(Debug, Clone)]
pub struct ExponentTable {
    grid: usize,
    n_max: u32,
    // point-major: entry (point, n) at point * n_max + (n - 1)
    data: Vec<[f64; 3]>,
}

impl ExponentTable {
    pub fn new(map: &SmoothToralMap, n_max: u32, grid: usize) -> Result<Self> {
        if n_max < 1 {
            return Err(Error::param("n_max", "must be at least 1"));
        }
        if grid < 1 {
            return Err(Error::param("grid", "must be at least 1"));
        }
        let rows: Vec<Vec<[f64; 3]>> = (0..grid * grid)
            .into_par_iter()
            .map(|idx| {
                let w = midpoint(idx, grid);
                (1..=n_max)
                    .map(|n| {
                        let e = map.local_exponents(&w, n)?;
                        let j = map.det_jacobian(&w, n as i32)?;
                        Ok([e.lambda.ln(), e.nu.ln(), j.ln()])
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<_>>()?;
        Ok(Self {
            grid,
            n_max,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn grid(&self) -> usize {
        self.grid
    }

    pub fn n_max(&self) -> u32 {
        self.n_max
    }

    /// `(ln λ, ln ν, ln J)` at grid point `idx` and iterate `n`.
    pub fn entry(&self, idx: usize, n: u32) -> [f64; 3] {
        self.data[idx * self.n_max as usize + (n as usize - 1)]
    }

    fn column(&self, n: u32) -> impl Iterator<Item = [f64; 3]> + '_ {
        (0..self.grid * self.grid).map(move |idx| self.entry(idx, n))
    }

    /// `ln S_n` for the given formula.
    pub fn log_functional(&self, formula: BoundFormula, exps: ExponentPair, t: f64, n: u32) -> f64 {
        let (p, s) = (exps.p, exps.s);
        let (dp, ds) = exps.dual();
        let direct = |[l, v, _]: [f64; 3]| (p * l).max(s * v);
        let inverse = |[l, v, _]: [f64; 3]| (dp * l).max(ds * v);
        let col = || self.column(n);
        match formula {
            BoundFormula::RhoInfty | BoundFormula::AppendixLt => log_sup(col().map(direct)),
            BoundFormula::AppendixMt => log_sup(col().map(inverse)),
            BoundFormula::RhoOne => log_mean(col().map(direct)),
            BoundFormula::Thm1 => log_sup(col().map(|e| -e[2] / t)) + log_sup(col().map(direct)),
            BoundFormula::Thm2 => log_sup(col().map(|e| -e[2] * (t - 1.0) / t)) + log_sup(col().map(inverse)),
            BoundFormula::PropL1U => log_mean(col().map(|e| direct(e) + e[0] - e[2] / t)),
            BoundFormula::PropL1S => log_mean(col().map(|e| direct(e) - e[1] + e[2] * (1.0 - 1.0 / t))),
            BoundFormula::PropL12 => log_mean(col().map(|e| inverse(e) + e[0] - e[2] * (t - 1.0) / t)),
        }
    }

    /// The `n`-th root prefactor `(sup_w J^{-1/t})^{1/n}` of the `thm1` bound.
    pub fn jacobian_prefactor(&self, t: f64, n: u32) -> f64 {
        (log_sup(self.column(n).map(|e| -e[2] / t)) / n as f64).exp()
    }

    pub fn report(&self, formula: BoundFormula, exps: ExponentPair, t: f64) -> Result<BoundReport> {
        if formula.uses_t() && !(t > 1.0 && t.is_finite()) {
            return Err(Error::param("t", format!("must lie in (1, inf), got {t}")));
        }
        let logs: Vec<f64> = (1..=self.n_max)
            .map(|n| self.log_functional(formula, exps, t, n))
            .collect();
        let raw = logs
            .iter()
            .enumerate()
            .map(|(i, l)| (l / (i + 1) as f64).exp())
            .collect();
        let accelerated = accelerate(&logs);
        Ok(BoundReport {
            formula,
            exps,
            t: formula.uses_t().then_some(t),
            grid: self.grid,
            limit: *accelerated.last().expect("n_max >= 1"),
            raw,
            accelerated,
        })
    }
}

/// Midpoint `((i + 1/2)/g, (j + 1/2)/g)` of grid cell `idx = i * g + j`.
pub fn midpoint(idx: usize, grid: usize) -> Point {
    let (i, j) = (idx / grid, idx % grid);
    Point::new((i as f64 + 0.5) / grid as f64, (j as f64 + 0.5) / grid as f64)
}

fn log_sup(values: impl Iterator<Item = f64>) -> f64 {
    values.fold(f64::NEG_INFINITY, f64::max)
}

/// `ln` of the arithmetic mean of `exp(values)`, computed stably.
fn log_mean(values: impl Iterator<Item = f64>) -> f64 {
    let values: Vec<f64> = values.collect();
    let m = log_sup(values.iter().copied());
    let sum: f64 = values.iter().map(|v| (v - m).exp()).sum();
    m + (sum / values.len() as f64).ln()
}

/// Accelerated estimates of `lim S_n^{1/n}` from `ln S_n`.
///
/// The ratio `S_n / S_{n-1}` converges geometrically where the `n`-th root
/// only converges like `1/n`, so Aitken's Δ² is applied to the log-ratios
/// whenever three consecutive ones are strictly monotone.
fn accelerate(logs: &[f64]) -> Vec<f64> {
    let ratios: Vec<f64> = logs.windows(2).map(|w| w[1] - w[0]).collect();
    let mut out = Vec::with_capacity(logs.len());
    out.push(logs[0].exp());
    for (i, &r) in ratios.iter().enumerate() {
        let mut est = r;
        if i >= 2 {
            let (a, b, c) = (ratios[i - 2], ratios[i - 1], r);
            let denom = c - 2.0 * b + a;
            let monotone = (a < b && b < c) || (a > b && b > c);
            if monotone && denom != 0.0 {
                let aitken = c - (c - b) * (c - b) / denom;
                if aitken.is_finite() {
                    est = aitken;
                }
            }
        }
        out.push(est.exp());
    }
    out
}

/// Per-`n` values of one bound formula together with an extrapolated limit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub formula: BoundFormula,
    pub exps: ExponentPair,
    pub t: Option<f64>,
    pub grid: usize,
    /// `S_n^{1/n}` for `n = 1..=n_max`.
    pub raw: Vec<f64>,
    /// Ratio/Aitken estimate available after `n` iterates.
    pub accelerated: Vec<f64>,
    pub limit: f64,
}

/// Reports at `grid` and at `2 * grid`.
pub fn refined_reports(
    map: &SmoothToralMap,
    formulas: &[BoundFormula],
    exps: ExponentPair,
    t: f64,
    n_max: u32,
    grid: usize,
) -> Result<Vec<BoundReport>> {
    let mut out = Vec::new();
    for g in [grid, 2 * grid] {
        let table = ExponentTable::new(map, n_max, g)?;
        for &f in formulas {
            out.push(table.report(f, exps, t)?);
        }
    }
    Ok(out)
}

fn single(map: &SmoothToralMap, formula: BoundFormula, exps: ExponentPair, t: f64, n_max: u32, grid: usize) -> Result<BoundReport> {
    if n_max < 2 {
        return Err(Error::param("n_max", "must be at least 2"));
    }
    ExponentTable::new(map, n_max, grid)?.report(formula, exps, t)
}

/// `ρ∞^{(p,s)}`: grid sup of `max(λ^p, ν^s)`.
pub fn rho_infty(map: &SmoothToralMap, exps: ExponentPair, n_max: u32, grid: usize) -> Result<BoundReport> {
    single(map, BoundFormula::RhoInfty, exps, 2.0, n_max, grid)
}

/// `ρ₁^{(p,s)}`: Lebesgue average of `max(λ^p, ν^s)`.
pub fn rho_one(map: &SmoothToralMap, exps: ExponentPair, n_max: u32, grid: usize) -> Result<BoundReport> {
    single(map, BoundFormula::RhoOne, exps, 2.0, n_max, grid)
}

pub fn thm_bound_l(map: &SmoothToralMap, exps: ExponentPair, t: f64, n_max: u32, grid: usize) -> Result<BoundReport> {
    single(map, BoundFormula::Thm1, exps, t, n_max, grid)
}

pub fn thm_bound_m(map: &SmoothToralMap, exps: ExponentPair, t: f64, n_max: u32, grid: usize) -> Result<BoundReport> {
    single(map, BoundFormula::Thm2, exps, t, n_max, grid)
}

/// Which Jacobian weighting of the averaged bound to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum L1Form {
    UnstableDet,
    StableDet,
}

pub fn prop_bound_l1(
    map: &SmoothToralMap,
    exps: ExponentPair,
    t: f64,
    n_max: u32,
    grid: usize,
    form: L1Form,
) -> Result<BoundReport> {
    let formula = match form {
        L1Form::UnstableDet => BoundFormula::PropL1U,
        L1Form::StableDet => BoundFormula::PropL1S,
    };
    single(map, formula, exps, t, n_max, grid)
}

pub fn prop_bound_l12(map: &SmoothToralMap, exps: ExponentPair, t: f64, n_max: u32, grid: usize) -> Result<BoundReport> {
    single(map, BoundFormula::PropL12, exps, t, n_max, grid)
}

/// Radius `1 / ρ₁` of the disc on which the determinant is holomorphic.
pub fn kitaev_disc_radius(map: &SmoothToralMap, exps: ExponentPair, n_max: u32, grid: usize) -> Result<f64> {
    Ok(1.0 / rho_one(map, exps, n_max, grid)?.limit)
}
