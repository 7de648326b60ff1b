use nalgebra::{Matrix2, Vector2};

use crate::{Error, Point, Result};

/// Reduce a lifted coordinate pair to the fundamental domain `[0, 1)²`.
///
/// Values within `1e-15` below 1 are snapped to 0 so that every point has a
/// single representative.
pub fn reduce(w: Vector2<f64>) -> Point {
    w.map(reduce_coord)
}

fn reduce_coord(x: f64) -> f64 {
    let r = x - x.floor();
    if r >= 1.0 - 1e-15 {
        0.0
    } else {
        r
    }
}

/// Signed difference `a - b` on the torus, each component in `[-1/2, 1/2)`.
pub fn torus_delta(a: &Point, b: &Point) -> Vector2<f64> {
    (a - b).map(|d| d - (d + 0.5).floor())
}

/// Max-norm distance between two torus points.
pub fn torus_distance(a: &Point, b: &Point) -> f64 {
    torus_delta(a, b).amax()
}

/// An eigenvalue of the base matrix with its unit eigenvector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenDirection {
    pub value: f64,
    pub direction: Vector2<f64>,
}

/// A hyperbolic automorphism of the 2-torus given by an integer matrix with
/// `|det| = 1` and `|trace| > 2`.
#[derive(Debug, Clone, PartialEq)]
pub struct ToralAutomorphism {
    entries: [[i64; 2]; 2],
    stable: EigenDirection,
    unstable: EigenDirection,
}

impl ToralAutomorphism {
    pub fn new(entries: [[i64; 2]; 2]) -> Result<Self> {
        let [[a, b], [c, d]] = entries;
        let det = a
            .checked_mul(d)
            .zip(b.checked_mul(c))
            .and_then(|(ad, bc)| ad.checked_sub(bc))
            .ok_or(Error::Overflow("determinant"))?;
        if det.abs() != 1 {
            return Err(Error::NotHyperbolic {
                matrix: entries,
                reason: "|det| must equal 1",
            });
        }
        let trace = a + d;
        if trace.abs() <= 2 {
            return Err(Error::NotHyperbolic {
                matrix: entries,
                reason: "|trace| must exceed 2",
            });
        }
        let (tr, det) = (trace as f64, det as f64);
        let disc = (tr * tr - 4.0 * det).sqrt();
        // Larger-modulus root first; the other from the product to avoid cancellation.
        let mu_u = 0.5 * (tr + tr.signum() * disc);
        let mu_s = det / mu_u;
        Ok(Self {
            entries,
            unstable: EigenDirection {
                value: mu_u,
                direction: eigenvector(entries, mu_u),
            },
            stable: EigenDirection {
                value: mu_s,
                direction: eigenvector(entries, mu_s),
            },
        })
    }

    /// The classical cat map `[[2, 1], [1, 1]]`.
    pub fn cat() -> Self {
        Self::new([[2, 1], [1, 1]]).expect("cat map is hyperbolic")
    }

    pub fn entries(&self) -> [[i64; 2]; 2] {
        self.entries
    }

    pub fn det(&self) -> i64 {
        let [[a, b], [c, d]] = self.entries;
        a * d - b * c
    }

    pub fn trace(&self) -> i64 {
        self.entries[0][0] + self.entries[1][1]
    }

    pub fn stable(&self) -> EigenDirection {
        self.stable
    }

    pub fn unstable(&self) -> EigenDirection {
        self.unstable
    }

    pub fn matrix(&self) -> Matrix2<f64> {
        let [[a, b], [c, d]] = self.entries;
        Matrix2::new(a as f64, b as f64, c as f64, d as f64)
    }

    /// The inverse automorphism (integer since `|det| = 1`).
    pub fn inverse(&self) -> Self {
        let [[a, b], [c, d]] = self.entries;
        let det = self.det();
        Self::new([[det * d, -det * b], [-det * c, det * a]]).expect("inverse of a hyperbolic automorphism")
    }

    /// `M^n` for signed `n`, in exact integer arithmetic.
    pub fn power(&self, n: i32) -> Result<[[i64; 2]; 2]> {
        let base = if n < 0 { self.inverse().entries } else { self.entries };
        int_power(base, n.unsigned_abs())
    }

    /// Row-sum norm of `M^T`, the largest factor by which a wavevector's
    /// max-norm can grow in one step.
    pub fn dual_growth(&self) -> i64 {
        let [[a, b], [c, d]] = self.entries;
        (a.abs() + c.abs()).max(b.abs() + d.abs())
    }

    /// Apply `M^n` to a torus point.
    pub fn apply(&self, w: &Point, n: i32) -> Result<Point> {
        let [[a, b], [c, d]] = self.power(n)?;
        let x = a as f64 * w.x + b as f64 * w.y;
        let y = c as f64 * w.x + d as f64 * w.y;
        Ok(reduce(Vector2::new(x, y)))
    }

    /// `M^T k` for an integer wavevector.
    pub fn dual_apply(&self, k: [i64; 2]) -> [i64; 2] {
        let [[a, b], [c, d]] = self.entries;
        [a * k[0] + c * k[1], b * k[0] + d * k[1]]
    }
}

pub(crate) fn int_mul(x: [[i64; 2]; 2], y: [[i64; 2]; 2]) -> Result<[[i64; 2]; 2]> {
    let mut out = [[0i64; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            let s = x[i][0]
                .checked_mul(y[0][j])
                .zip(x[i][1].checked_mul(y[1][j]))
                .and_then(|(p, q)| p.checked_add(q))
                .ok_or(Error::Overflow("matrix power"))?;
            out[i][j] = s;
        }
    }
    Ok(out)
}

pub(crate) fn int_power(base: [[i64; 2]; 2], n: u32) -> Result<[[i64; 2]; 2]> {
    let mut acc = [[1, 0], [0, 1]];
    for _ in 0..n {
        acc = int_mul(base, acc)?;
    }
    Ok(acc)
}

fn eigenvector(m: [[i64; 2]; 2], mu: f64) -> Vector2<f64> {
    let [[a, b], [c, d]] = m;
    // Pick the better-conditioned row of (M - mu I) v = 0.
    let v = if (b as f64).abs() >= (c as f64).abs() {
        Vector2::new(b as f64, mu - a as f64)
    } else {
        Vector2::new(mu - d as f64, c as f64)
    };
    let v = v.normalize();
    // First nonzero component positive.
    if v.x < 0.0 || (v.x == 0.0 && v.y < 0.0) {
        -v
    } else {
        v
    }
}
