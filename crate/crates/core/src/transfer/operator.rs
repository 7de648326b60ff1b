use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::fft::fft2;
use crate::fourier::TrigPoly;
use crate::torus::SmoothToralMap;
use crate::{Error, Point, Result};

/// Which transfer operator acts on functions.
///
/// * `L φ = φ ∘ T`
/// * `M φ = (φ ∘ T⁻¹) / (|det DT| ∘ T⁻¹)`
/// * `L_t φ = |det DT|^{1/t} (φ ∘ T)`
/// * `M_t φ = (φ ∘ T⁻¹) / (|det DT|^{1-1/t} ∘ T⁻¹)`
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OperatorKind {
    L,
    M,
    Lt(f64),
    Mt(f64),
}

impl OperatorKind {
    pub fn validate(&self) -> Result<()> {
        match self {
            OperatorKind::Lt(t) | OperatorKind::Mt(t) if !(*t > 1.0 && t.is_finite()) => {
                Err(Error::param("t", format!("weighted kinds need t in (1, inf), got {t}")))
            }
            _ => Ok(()),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            OperatorKind::L => "L",
            OperatorKind::M => "M",
            OperatorKind::Lt(_) => "Lt",
            OperatorKind::Mt(_) => "Mt",
        }
    }

    /// Identifier stored in binary matrix dumps.
    pub fn code(&self) -> u16 {
        match self {
            OperatorKind::L => 0,
            OperatorKind::M => 1,
            OperatorKind::Lt(_) => 2,
            OperatorKind::Mt(_) => 3,
        }
    }

    pub fn t(&self) -> Option<f64> {
        match self {
            OperatorKind::Lt(t) | OperatorKind::Mt(t) => Some(*t),
            _ => None,
        }
    }

    /// Build from a name and, for weighted kinds, the exponent `t`.
    pub fn from_name(name: &str, t: f64) -> Result<Self> {
        let kind = match name {
            "L" => OperatorKind::L,
            "M" => OperatorKind::M,
            "Lt" | "L_t" => OperatorKind::Lt(t),
            "Mt" | "M_t" => OperatorKind::Mt(t),
            other => return Err(Error::Parse(format!("unknown operator kind `{other}`"))),
        };
        kind.validate()?;
        Ok(kind)
    }

    /// Whether the operator composes with `T⁻¹` rather than `T`.
    pub fn uses_inverse(&self) -> bool {
        matches!(self, OperatorKind::M | OperatorKind::Mt(_))
    }

    /// Exponent applied to `r(x) = |det DΦ(x)| / |det DΦ(y)|`, where `y` is the
    /// mapped point; `r` is `|det D_xT|` for `L` kinds and `|det D_xT⁻¹|` for `M` kinds.
    fn weight_exponent(&self) -> f64 {
        match self {
            OperatorKind::L => 0.0,
            OperatorKind::M => 1.0,
            OperatorKind::Lt(t) => 1.0 / t,
            OperatorKind::Mt(t) => 1.0 - 1.0 / t,
        }
    }
}

impl fmt::Display for OperatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.t() {
            Some(t) => write!(f, "{}({t})", self.name()),
            None => f.write_str(self.name()),
        }
    }
}

impl FromStr for OperatorKind {
    type Err = Error;

    /// Parses `L`, `M`, `Lt(1.5)`, `Mt(8)`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some((name, rest)) = s.split_once('(') {
            let t = rest
                .strip_suffix(')')
                .and_then(|x| x.trim().parse::<f64>().ok())
                .ok_or_else(|| Error::Parse(format!("bad operator kind `{s}`")))?;
            Self::from_name(name.trim(), t)
        } else if s == "L" || s == "M" {
            Self::from_name(s, 2.0)
        } else {
            Err(Error::Parse(format!("operator kind `{s}` needs a t, e.g. `{s}(2)`")))
        }
    }
}

/// Grid points `x = (a/g, b/g)` together with their images `T^{±1}(x)` and
/// the operator weight at `x`.
#[derive(Debug, Clone)]
pub(crate) struct MappedGrid {
    pub g: usize,
    pub images: Vec<Point>,
    pub weights: Vec<f64>,
}

impl MappedGrid {
    pub fn new(kind: OperatorKind, map: &SmoothToralMap, g: usize) -> Result<Self> {
        kind.validate()?;
        let step = if kind.uses_inverse() { -1 } else { 1 };
        let exponent = kind.weight_exponent();
        let pairs = (0..g * g)
            .into_par_iter()
            .map(|idx| {
                let x = Point::new((idx / g) as f64 / g as f64, (idx % g) as f64 / g as f64);
                let y = map.evaluate_with_tol(&x, step, 0.0)?;
                let w = if exponent == 0.0 || map.is_linear() {
                    1.0
                } else {
                    let r = (map.chart_jacobian(&x).determinant() / map.chart_jacobian(&y).determinant()).abs();
                    r.powf(exponent)
                };
                Ok((y, w))
            })
            .collect::<Result<Vec<_>>>()?;
        let (images, weights) = pairs.into_iter().unzip();
        Ok(Self { g, images, weights })
    }

    /// `W(x) e^{2πi k·y(x)}` on the grid, written into `out`.
    pub fn mode_values(&self, k: [i64; 2], out: &mut [Complex64]) {
        for ((o, y), w) in out.iter_mut().zip(&self.images).zip(&self.weights) {
            let phase = TAU * (k[0] as f64 * y.x + k[1] as f64 * y.y);
            *o = Complex64::cis(phase) * *w;
        }
    }
}

/// Result of applying an operator and re-truncating.
#[derive(Debug, Clone, PartialEq)]
pub struct Applied {
    pub poly: TrigPoly,
    /// `L²` mass of resolved modes outside the output box.
    pub tail: f64,
    /// Relative `L²` mass in the outer quarter of the sampling grid's spectrum.
    pub aliasing: f64,
}

/// Threshold on [`Applied::aliasing`] above which results are flagged.
pub const ALIASING_WARN: f64 = 1e-8;

/// `Op f` truncated back to the box of `f`, sampled on a `grid × grid` grid.
pub fn apply_operator(kind: OperatorKind, map: &SmoothToralMap, f: &TrigPoly, grid: usize) -> Result<Applied> {
    let mapped = MappedGrid::new(kind, map, grid)?;
    apply_on_grid(&mapped, f)
}

pub(crate) fn apply_on_grid(mapped: &MappedGrid, f: &TrigPoly) -> Result<Applied> {
    let n = f.half_width();
    let g = mapped.g;
    if g < 2 * (2 * n + 1) {
        return Err(Error::param("grid", format!("{g} is below 2(2N+1) = {}", 2 * (2 * n + 1))));
    }
    let mut values: Vec<Complex64> = mapped
        .images
        .par_iter()
        .zip(&mapped.weights)
        .map(|(y, w)| f.evaluate(y) * *w)
        .collect();
    fft2(&mut values, g, false);
    let scale = 1.0 / (g * g) as f64;
    let mut poly = TrigPoly::zeros(n);
    let (mut total, mut ring, mut tail) = (0.0, 0.0, 0.0);
    let ring_start = outer_ring_start(g);
    for (idx, v) in values.iter().enumerate() {
        let m = [signed_freq(idx / g, g), signed_freq(idx % g, g)];
        let c = v * scale;
        let e = c.norm_sqr();
        total += e;
        if m[0].unsigned_abs().max(m[1].unsigned_abs()) as usize >= ring_start {
            ring += e;
        }
        match poly.index_of(m) {
            Some(j) => poly.coeffs_mut()[j] = c,
            None => tail += e,
        }
    }
    Ok(Applied {
        poly,
        tail: tail.sqrt(),
        aliasing: if total > 0.0 { (ring / total).sqrt() } else { 0.0 },
    })
}

/// Frequency of grid index `i` in `(-g/2, g/2]`.
pub(crate) fn signed_freq(i: usize, g: usize) -> i64 {
    let i = i as i64;
    let g = g as i64;
    if i > g / 2 {
        i - g
    } else {
        i
    }
}

/// First max-norm frequency counted in the aliasing ring.
pub(crate) fn outer_ring_start(g: usize) -> usize {
    g / 2 - (g / 8).max(1)
}
