use nalgebra::Matrix2;
use rayon::prelude::*;

use crate::linalg::{smith_normal_form, IMat2};
use crate::torus::{int_power, torus_distance, SmoothToralMap, ToralAutomorphism};
use crate::{Error, Point, Result};

/// Periods above this are refused unless a larger limit is requested.
pub const DEFAULT_MAX_PERIOD: u32 = 12;

/// Largest number of points enumerated for one period.
const MAX_POINTS: u128 = 1 << 26;

/// Tolerance of the inverse chart when mapping periodic points; zero iterates
/// to rounding level, since the orbit amplifies the error by `λⁿ`.
const PERIODIC_TOL: f64 = 0.0;

/// Fixed points of `Tⁿ` must satisfy `|Tⁿx − x| < RESIDUAL_TOL` on the torus.
pub const RESIDUAL_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct PeriodicPoint {
    pub point: Point,
    /// Exact coordinates `num / den` of the corresponding point of the linear map.
    pub numerators: [i128; 2],
    pub denominator: i128,
    pub differential: Matrix2<f64>,
    /// `1 / |det(D_xTⁿ − Id)|`.
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PeriodicOrbitData {
    pub period: u32,
    pub points: Vec<PeriodicPoint>,
}

impl PeriodicOrbitData {
    pub fn count(&self) -> usize {
        self.points.len()
    }

    /// `Σ 1/|det(D_xTⁿ − Id)|`, summed in enumeration order.
    pub fn trace_sum(&self) -> f64 {
        self.points.iter().map(|p| p.weight).sum()
    }
}

/// `Mⁿ − I` in exact arithmetic.
pub fn shifted_power(base: &ToralAutomorphism, n: u32) -> Result<IMat2> {
    let p = int_power(base.entries(), n)?;
    Ok([
        [p[0][0] as i128 - 1, p[0][1] as i128],
        [p[1][0] as i128, p[1][1] as i128 - 1],
    ])
}

/// `|det(Mⁿ − I)|`, the number of fixed points of `Mⁿ`.
pub fn periodic_count(base: &ToralAutomorphism, n: u32) -> Result<u128> {
    let b = shifted_power(base, n)?;
    let det = b[0][0]
        .checked_mul(b[1][1])
        .zip(b[0][1].checked_mul(b[1][0]))
        .and_then(|(x, y)| x.checked_sub(y))
        .ok_or(Error::Overflow("det(M^n - I)"))?;
    Ok(det.unsigned_abs())
}

/// Fixed points of `Mⁿ` as exact fractions with a common denominator.
///
/// With `U (Mⁿ − I) V = diag(d₁, d₂)` the solutions of `(Mⁿ − I)x ∈ ℤ²` are
/// `x = V (a/d₁, b/d₂) mod 1` for `0 ≤ a < d₁`, `0 ≤ b < d₂`.
pub fn linear_fixed_points(base: &ToralAutomorphism, n: u32) -> Result<(Vec<[i128; 2]>, i128)> {
    if n == 0 {
        return Err(Error::param("n", "period must be at least 1"));
    }
    let count = periodic_count(base, n)?;
    if count > MAX_POINTS {
        return Err(Error::TooManyPeriodicPoints {
            period: n,
            count,
            limit: MAX_POINTS,
        });
    }
    let snf = smith_normal_form(shifted_power(base, n)?)?;
    let [d1, d2] = snf.d;
    if d1 == 0 || d2 == 0 {
        return Err(Error::PeriodicPoint(format!("M^{n} - I is singular")));
    }
    let v = snf.v;
    let ratio = d2 / d1;
    let mut out = Vec::with_capacity(count as usize);
    for a in 0..d1 {
        for b in 0..d2 {
            let num = |i: usize| (v[i][0] * a * ratio + v[i][1] * b).rem_euclid(d2);
            out.push([num(0), num(1)]);
        }
    }
    out.sort_unstable();
    Ok((out, d2))
}

/// All fixed points of `Tⁿ` with their differentials and weights.
pub fn enumerate_periodic(map: &SmoothToralMap, n: u32) -> Result<PeriodicOrbitData> {
    enumerate_periodic_with(map, n, DEFAULT_MAX_PERIOD)
}

pub fn enumerate_periodic_with(map: &SmoothToralMap, n: u32, max_period: u32) -> Result<PeriodicOrbitData> {
    if n > max_period {
        return Err(Error::param("n", format!("period {n} exceeds the limit {max_period}")));
    }
    let (fractions, den) = linear_fixed_points(map.base(), n)?;
    let points = fractions
        .par_iter()
        .map(|num| {
            let lin = Point::new(num[0] as f64 / den as f64, num[1] as f64 / den as f64);
            let point = match map.chart() {
                None => lin,
                Some(phi) => phi.invert_with_tol(&lin, PERIODIC_TOL)?,
            };
            let residual = torus_distance(&map.evaluate_with_tol(&point, n as i32, PERIODIC_TOL)?, &point);
            if residual >= RESIDUAL_TOL {
                return Err(Error::PeriodicPoint(format!(
                    "point {point:?} of period {n} has residual {residual:e}"
                )));
            }
            let differential = map.differential(&point, n)?;
            let det = (differential - Matrix2::identity()).determinant();
            if det.abs() < 1e-12 {
                return Err(Error::PeriodicPoint(format!("det(DT^{n} - Id) = {det:e} is near zero")));
            }
            Ok(PeriodicPoint {
                point,
                numerators: *num,
                denominator: den,
                differential,
                weight: 1.0 / det.abs(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PeriodicOrbitData { period: n, points })
}

/// `t_n = Σ_{Tⁿx = x} 1/|det(D_xTⁿ − Id)|`.
pub fn trace_sum(map: &SmoothToralMap, n: u32) -> Result<f64> {
    Ok(enumerate_periodic(map, n)?.trace_sum())
}

/// `t_1, ..., t_{n_max}`.
pub fn trace_sums(map: &SmoothToralMap, n_max: u32) -> Result<Vec<f64>> {
    (1..=n_max).map(|n| trace_sum(map, n)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cat_counts() {
        let cat = ToralAutomorphism::cat();
        let counts: Vec<u128> = (1..=5).map(|n| periodic_count(&cat, n).unwrap()).collect();
        assert_eq!(counts, vec![1, 5, 16, 45, 121]);
    }

    #[test]
    fn linear_points_are_fixed() {
        let map = SmoothToralMap::linear(ToralAutomorphism::new([[3, 2], [1, 1]]).unwrap());
        for n in 1..=4 {
            let data = enumerate_periodic(&map, n).unwrap();
            assert_eq!(data.count() as u128, periodic_count(map.base(), n).unwrap());
        }
    }
}
