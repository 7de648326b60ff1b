use nalgebra::{Matrix2, Vector2};

use super::automorphism::{reduce, ToralAutomorphism};
use super::conjugacy::ConjugacyDiffeo;
use crate::{Error, Point, Result};

/// Number of iterates applied at once when evaluating a linear map, small
/// enough that the integer power never overflows for the matrices we accept.
const LINEAR_CHUNK: i32 = 16;

/// A hyperbolic diffeomorphism of the 2-torus: either a linear automorphism
/// `A` or a smooth conjugate `T = Φ⁻¹ ∘ A ∘ Φ`.
#[derive(Debug, Clone, PartialEq)]
pub enum SmoothToralMap {
    Linear(ToralAutomorphism),
    Conjugated(ToralAutomorphism, ConjugacyDiffeo),
}

/// Local hyperbolicity exponents `λ_w(Tⁿ)` and `ν_w(Tⁿ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalExponents {
    pub lambda: f64,
    pub nu: f64,
}

impl LocalExponents {
    /// Whether `λ > 1 > ν`, i.e. the iterate already contracts and expands.
    pub fn is_hyperbolic(&self) -> bool {
        self.lambda > 1.0 && self.nu < 1.0
    }
}

/// Which transverse vector completes the stable direction to a chart basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Complement {
    /// The unit vector orthogonal to the stable direction.
    #[default]
    Orthogonal,
    /// The unstable direction at the same point.
    Unstable,
}

/// `D_wTⁿ` written in foliation-adapted bases at `w` and `Tⁿw`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DifferentialBlocks {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    /// Determinant of the basis at `w` divided by that at `Tⁿw`.
    pub basis_det_ratio: f64,
    /// `|A| ≤ ν_w(Tⁿ) < 1` within rounding.
    pub stable_bound_holds: bool,
    /// `|D⁻¹| ≤ λ_w(Tⁿ)⁻¹ < 1` within rounding.
    pub unstable_bound_holds: bool,
    /// `|B| / |D|`.
    pub shear_ratio: f64,
}

impl SmoothToralMap {
    pub fn linear(base: ToralAutomorphism) -> Self {
        SmoothToralMap::Linear(base)
    }

    /// Build a conjugated map, collapsing to the linear one when `chart` is the
    /// identity, and checking the inverse on a coarse grid.
    pub fn conjugated(base: ToralAutomorphism, chart: ConjugacyDiffeo) -> Result<Self> {
        if chart.is_identity() {
            return Ok(SmoothToralMap::Linear(base));
        }
        let map = SmoothToralMap::Conjugated(base, chart);
        let res = 8;
        for i in 0..res {
            for j in 0..res {
                let w = Vector2::new(i as f64 / res as f64, j as f64 / res as f64);
                let back = map.evaluate(&map.evaluate(&w, 1)?, -1)?;
                let err = super::torus_distance(&back, &w);
                if err > 1e-9 {
                    return Err(Error::InverseNotConverged {
                        iterations: 0,
                        step: err,
                    });
                }
            }
        }
        Ok(map)
    }

    pub fn cat() -> Self {
        SmoothToralMap::Linear(ToralAutomorphism::cat())
    }

    pub fn base(&self) -> &ToralAutomorphism {
        match self {
            SmoothToralMap::Linear(a) | SmoothToralMap::Conjugated(a, _) => a,
        }
    }

    pub fn chart(&self) -> Option<&ConjugacyDiffeo> {
        match self {
            SmoothToralMap::Linear(_) => None,
            SmoothToralMap::Conjugated(_, phi) => Some(phi),
        }
    }

    pub fn is_linear(&self) -> bool {
        matches!(self, SmoothToralMap::Linear(_))
    }

    /// `T⁻¹`, itself a map of the same kind.
    pub fn inverse(&self) -> Self {
        match self {
            SmoothToralMap::Linear(a) => SmoothToralMap::Linear(a.inverse()),
            SmoothToralMap::Conjugated(a, phi) => SmoothToralMap::Conjugated(a.inverse(), phi.clone()),
        }
    }

    /// `Tⁿ(w)` reduced to `[0, 1)²`. The inverse chart is iterated to
    /// rounding level: orbits recomputed from an intermediate point get
    /// stretched by `Aᵐ`, so a looser inverse breaks the composition law.
    pub fn evaluate(&self, w: &Point, n: i32) -> Result<Point> {
        self.evaluate_with_tol(w, n, 0.0)
    }

    /// `Tⁿ(w)` with a custom tolerance for the inverse chart.
    pub fn evaluate_with_tol(&self, w: &Point, n: i32, tol: f64) -> Result<Point> {
        match self {
            SmoothToralMap::Linear(a) => linear_apply(a, &reduce(*w), n),
            SmoothToralMap::Conjugated(a, phi) => {
                // Φ(w) is carried in double-double: its rounding error would
                // otherwise be stretched by |μ_u|ⁿ along the orbit.
                let u = phi.displacement(w);
                let mut z = [dd_reduce(two_sum(w.x, u.x)), dd_reduce(two_sum(w.y, u.y))];
                let mut rest = n;
                while rest != 0 {
                    let step = rest.clamp(-LINEAR_CHUNK, LINEAR_CHUNK);
                    let [[p, q], [r, s]] = a.power(step)?;
                    z = [
                        dd_reduce(dd_add(dd_scale(p as f64, z[0]), dd_scale(q as f64, z[1]))),
                        dd_reduce(dd_add(dd_scale(r as f64, z[0]), dd_scale(s as f64, z[1]))),
                    ];
                    rest -= step;
                }
                phi.invert_with_tol(&reduce(Vector2::new(z[0].0 + z[0].1, z[1].0 + z[1].1)), tol)
            }
        }
    }

    /// The chart Jacobian `DΦ(w)` (identity for linear maps).
    pub fn chart_jacobian(&self, w: &Point) -> Matrix2<f64> {
        match self {
            SmoothToralMap::Linear(_) => Matrix2::identity(),
            SmoothToralMap::Conjugated(_, phi) => phi.jacobian(w),
        }
    }

    /// `DT(w)` for one step.
    fn step_differential(&self, w: &Point) -> Result<Matrix2<f64>> {
        match self {
            SmoothToralMap::Linear(a) => Ok(a.matrix()),
            SmoothToralMap::Conjugated(a, phi) => {
                let tw = self.evaluate(w, 1)?;
                let g_inv = invert2(&phi.jacobian(&tw))?;
                Ok(g_inv * a.matrix() * phi.jacobian(w))
            }
        }
    }

    /// `D_wTⁿ` for `n ≥ 1`, the product of one-step differentials along the orbit.
    pub fn differential(&self, w: &Point, n: u32) -> Result<Matrix2<f64>> {
        if n == 0 {
            return Err(Error::param("n", "differential needs n >= 1"));
        }
        match self {
            SmoothToralMap::Linear(a) => {
                let [[p, q], [r, s]] = a.power(n as i32)?;
                Ok(Matrix2::new(p as f64, q as f64, r as f64, s as f64))
            }
            SmoothToralMap::Conjugated(..) => {
                let mut acc = Matrix2::identity();
                for j in 0..n {
                    let x = if j == 0 { reduce(*w) } else { self.evaluate(w, j as i32)? };
                    acc = self.step_differential(&x)? * acc;
                }
                Ok(acc)
            }
        }
    }

    /// Unit stable and unstable directions at `w`.
    pub fn foliation_directions(&self, w: &Point) -> Result<(Vector2<f64>, Vector2<f64>)> {
        let base = self.base();
        match self {
            SmoothToralMap::Linear(_) => Ok((base.stable().direction, base.unstable().direction)),
            SmoothToralMap::Conjugated(_, phi) => {
                let g_inv = invert2(&phi.jacobian(w))?;
                Ok((
                    (g_inv * base.stable().direction).normalize(),
                    (g_inv * base.unstable().direction).normalize(),
                ))
            }
        }
    }

    /// `λ_w(Tⁿ)` and `ν_w(Tⁿ)`; the unstable exponent is measured with the
    /// inverse differential based at `Tⁿ(w)`.
    pub fn local_exponents(&self, w: &Point, n: u32) -> Result<LocalExponents> {
        if n == 0 {
            return Err(Error::param("n", "exponents need n >= 1"));
        }
        let base = self.base();
        let (mu_s, mu_u) = (base.stable().value.abs(), base.unstable().value.abs());
        let ni = n as i32;
        match self {
            SmoothToralMap::Linear(_) => Ok(LocalExponents {
                lambda: mu_u.powi(ni),
                nu: mu_s.powi(ni),
            }),
            SmoothToralMap::Conjugated(_, phi) => {
                let y = self.evaluate(w, ni)?;
                let gw = invert2(&phi.jacobian(w))?;
                let gy = invert2(&phi.jacobian(&y))?;
                let (es, eu) = (base.stable().direction, base.unstable().direction);
                Ok(LocalExponents {
                    lambda: mu_u.powi(ni) * (gy * eu).norm() / (gw * eu).norm(),
                    nu: mu_s.powi(ni) * (gy * es).norm() / (gw * es).norm(),
                })
            }
        }
    }

    /// `|det D_wTⁿ|` for any signed `n`.
    pub fn det_jacobian(&self, w: &Point, n: i32) -> Result<f64> {
        match self {
            SmoothToralMap::Linear(_) => Ok(1.0),
            SmoothToralMap::Conjugated(_, phi) => {
                if n == 0 {
                    return Ok(1.0);
                }
                let y = self.evaluate(w, n)?;
                Ok((phi.jacobian(w).determinant() / phi.jacobian(&y).determinant()).abs())
            }
        }
    }

    /// `D_wTⁿ` in the bases (stable, complement) at `w` and at `Tⁿw`.
    pub fn block_decomposition(&self, w: &Point, n: u32, complement: Complement) -> Result<DifferentialBlocks> {
        let y = self.evaluate(w, n as i32)?;
        let pw = self.chart_basis(w, complement)?;
        let py = self.chart_basis(&y, complement)?;
        let py_inv = invert2(&py)?;
        let blocks = py_inv * self.differential(w, n)? * pw;
        let exps = self.local_exponents(w, n)?;
        let (a, b, c, d) = (blocks[(0, 0)], blocks[(0, 1)], blocks[(1, 0)], blocks[(1, 1)]);
        let slack = 1e-10;
        Ok(DifferentialBlocks {
            a,
            b,
            c,
            d,
            basis_det_ratio: pw.determinant() / py.determinant(),
            stable_bound_holds: a.abs() <= exps.nu * (1.0 + slack) && exps.nu < 1.0,
            unstable_bound_holds: 1.0 / d.abs() <= (1.0 + slack) / exps.lambda && exps.lambda > 1.0,
            shear_ratio: b.abs() / d.abs(),
        })
    }

    fn chart_basis(&self, w: &Point, complement: Complement) -> Result<Matrix2<f64>> {
        let (vs, vu) = self.foliation_directions(w)?;
        let c = match complement {
            Complement::Orthogonal => Vector2::new(-vs.y, vs.x),
            Complement::Unstable => vu,
        };
        let basis = Matrix2::from_columns(&[vs, c]);
        if basis.determinant().abs() < 1e-12 {
            return Err(Error::param("basis", "stable and complement directions are parallel"));
        }
        Ok(basis)
    }

    /// Smallest `n ≤ n_max` such that `sup ν_w(Tⁿ) < 1` and `inf λ_w(Tⁿ) > 1`
    /// on a `res × res` midpoint grid.
    pub fn hyperbolicity_onset(&self, res: usize, n_max: u32) -> Result<Option<u32>> {
        if self.is_linear() {
            return Ok(Some(1));
        }
        for n in 1..=n_max {
            let mut ok = true;
            'grid: for i in 0..res {
                for j in 0..res {
                    let w = Vector2::new((i as f64 + 0.5) / res as f64, (j as f64 + 0.5) / res as f64);
                    if !self.local_exponents(&w, n)?.is_hyperbolic() {
                        ok = false;
                        break 'grid;
                    }
                }
            }
            if ok {
                return Ok(Some(n));
            }
        }
        Ok(None)
    }
}

fn linear_apply(a: &ToralAutomorphism, w: &Point, n: i32) -> Result<Point> {
    let mut x = *w;
    let mut rest = n;
    while rest != 0 {
        let step = rest.clamp(-LINEAR_CHUNK, LINEAR_CHUNK);
        x = a.apply(&x, step)?;
        rest -= step;
    }
    Ok(x)
}

/// Unevaluated sum `hi + lo` with `|lo| ≤ ulp(hi) / 2`.
type Dd = (f64, f64);

fn two_sum(a: f64, b: f64) -> Dd {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

fn quick_two_sum(a: f64, b: f64) -> Dd {
    let s = a + b;
    (s, b - (s - a))
}

fn dd_add(x: Dd, y: Dd) -> Dd {
    let (s, e) = two_sum(x.0, y.0);
    quick_two_sum(s, e + x.1 + y.1)
}

/// `c · x` for an integer-valued `c`.
fn dd_scale(c: f64, x: Dd) -> Dd {
    let p = c * x.0;
    let e = c.mul_add(x.0, -p);
    quick_two_sum(p, e + c * x.1)
}

/// Reduce to `[0, 1)`.
fn dd_reduce(x: Dd) -> Dd {
    let mut r = quick_two_sum(x.0 - x.0.floor(), x.1);
    if r.0 + r.1 < 0.0 {
        r = quick_two_sum(r.0 + 1.0, r.1);
    } else if r.0 + r.1 >= 1.0 {
        r = quick_two_sum(r.0 - 1.0, r.1);
    }
    r
}

pub(crate) fn invert2(m: &Matrix2<f64>) -> Result<Matrix2<f64>> {
    m.try_inverse()
        .ok_or_else(|| Error::param("jacobian", "singular 2x2 matrix"))
}
