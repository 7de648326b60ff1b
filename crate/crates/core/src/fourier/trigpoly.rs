use std::f64::consts::TAU;
use std::io::{Read, Write};

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::fft::{fft2, wrap};
use crate::{Error, Point, Result};

/// A trigonometric polynomial `f(x) = Σ c_k e^{2πi k·x}` with coefficients on
/// the box `|k₁|, |k₂| ≤ N`.
///
/// Coefficients are stored row-major in `(k₁, k₂)`, so index order is the
/// lexicographic order of wavevectors.
#[derive(Debug, Clone, PartialEq)]
pub struct TrigPoly {
    n: usize,
    coeffs: Vec<Complex64>,
}

impl TrigPoly {
    pub fn zeros(n: usize) -> Self {
        let side = 2 * n + 1;
        Self {
            n,
            coeffs: vec![Complex64::default(); side * side],
        }
    }

    pub fn constant(n: usize, c: Complex64) -> Self {
        let mut f = Self::zeros(n);
        f.set([0, 0], c);
        f
    }

    /// The single mode `e^{2πi k·x}`.
    pub fn mode(n: usize, k: [i64; 2]) -> Self {
        let mut f = Self::zeros(n);
        f.set(k, Complex64::new(1.0, 0.0));
        f
    }

    pub fn from_coeffs(n: usize, coeffs: Vec<Complex64>) -> Result<Self> {
        let side = 2 * n + 1;
        if coeffs.len() != side * side {
            return Err(Error::param("coeffs", format!("expected {} entries, got {}", side * side, coeffs.len())));
        }
        Ok(Self { n, coeffs })
    }

    /// Independent standard complex Gaussian coefficients; with `real` the
    /// Hermitian partner of each coefficient is overwritten so `f` is real.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, n: usize, real: bool) -> Self {
        let mut f = Self::zeros(n);
        for c in f.coeffs.iter_mut() {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            *c = Complex64::new(re, im);
        }
        if real {
            f.make_real();
        }
        f
    }

    /// Replace `f` by its real part, `(f + conj f) / 2`.
    pub fn make_real(&mut self) {
        let len = self.coeffs.len();
        for idx in 0..len / 2 + 1 {
            let partner = len - 1 - idx;
            let avg = 0.5 * (self.coeffs[idx] + self.coeffs[partner].conj());
            self.coeffs[idx] = avg;
            self.coeffs[partner] = avg.conj();
        }
    }

    pub fn half_width(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    /// Position of `k` in the coefficient vector, if inside the box.
    pub fn index_of(&self, k: [i64; 2]) -> Option<usize> {
        box_index(self.n, k)
    }

    pub fn wavevector(&self, idx: usize) -> [i64; 2] {
        box_wavevector(self.n, idx)
    }

    pub fn coeff(&self, k: [i64; 2]) -> Complex64 {
        self.index_of(k).map(|i| self.coeffs[i]).unwrap_or_default()
    }

    pub fn set(&mut self, k: [i64; 2], c: Complex64) {
        let idx = self.index_of(k).expect("wavevector outside truncation box");
        self.coeffs[idx] = c;
    }

    /// Whether `c(-k) = conj c(k)` to `tol` relative to the largest coefficient.
    pub fn is_real(&self, tol: f64) -> bool {
        let scale = self.max_abs().max(f64::MIN_POSITIVE);
        let len = self.coeffs.len();
        (0..len).all(|i| (self.coeffs[i] - self.coeffs[len - 1 - i].conj()).norm() <= tol * scale)
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// `(Σ |c_k|²)^{1/2}`, the `L²` norm by Parseval.
    pub fn l2_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self {
            n: self.n,
            coeffs: self.coeffs.iter().map(|x| x * c).collect(),
        }
    }

    /// Sum, on the larger of the two boxes.
    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.resized(self.n.max(other.n));
        for (idx, c) in other.coeffs.iter().enumerate() {
            let k = other.wavevector(idx);
            let j = out.index_of(k).expect("inside larger box");
            out.coeffs[j] += c;
        }
        out
    }

    /// Copy onto the box of half-width `n`, dropping or zero-padding modes.
    pub fn resized(&self, n: usize) -> Self {
        let mut out = Self::zeros(n);
        for (idx, c) in self.coeffs.iter().enumerate() {
            if let Some(j) = out.index_of(self.wavevector(idx)) {
                out.coeffs[j] = *c;
            }
        }
        out
    }

    /// Direct summation at one point.
    pub fn evaluate(&self, x: &Point) -> Complex64 {
        let side = 2 * self.n + 1;
        let ex = powers(Complex64::cis(TAU * x.x), self.n);
        let ey = powers(Complex64::cis(TAU * x.y), self.n);
        let mut acc = Complex64::default();
        for a in 0..side {
            let row = &self.coeffs[a * side..(a + 1) * side];
            let s: Complex64 = row.iter().zip(&ey).map(|(c, e)| c * e).sum();
            acc += ex[a] * s;
        }
        acc
    }

    /// Values on the uniform grid `(a/g, b/g)`, row-major in `a`.
    pub fn to_grid(&self, g: usize) -> Result<Vec<Complex64>> {
        if g < 2 * self.n + 1 {
            return Err(Error::param("grid", format!("{g} cannot resolve half-width {}", self.n)));
        }
        let mut data = vec![Complex64::default(); g * g];
        for (idx, c) in self.coeffs.iter().enumerate() {
            let [k1, k2] = self.wavevector(idx);
            data[wrap(k1, g) * g + wrap(k2, g)] = *c;
        }
        fft2(&mut data, g, true);
        Ok(data)
    }

    /// Coefficients of grid samples, truncated to the box of half-width `n`.
    pub fn from_grid(values: Vec<Complex64>, g: usize, n: usize) -> Result<Self> {
        Ok(Self::from_grid_with_tail(values, g, n)?.0)
    }

    /// As [`TrigPoly::from_grid`], also returning the `L²` energy of the
    /// resolved modes that fall outside the box.
    pub fn from_grid_with_tail(mut values: Vec<Complex64>, g: usize, n: usize) -> Result<(Self, f64)> {
        if values.len() != g * g {
            return Err(Error::param("values", "length must be g²"));
        }
        if g < 2 * n + 1 {
            return Err(Error::param("grid", format!("{g} cannot resolve half-width {n}")));
        }
        fft2(&mut values, g, false);
        let norm = 1.0 / (g * g) as f64;
        let mut out = Self::zeros(n);
        for idx in 0..out.coeffs.len() {
            let [k1, k2] = out.wavevector(idx);
            let slot = &mut values[wrap(k1, g) * g + wrap(k2, g)];
            out.coeffs[idx] = *slot * norm;
            *slot = Complex64::default();
        }
        let tail = values.iter().map(|v| (v * norm).norm_sqr()).sum::<f64>().sqrt();
        Ok((out, tail))
    }

    /// Write `(k1, k2, re, im)` records ordered by `(k1, k2)`.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(w);
        wtr.write_record(["k1", "k2", "re", "im"])?;
        for (idx, c) in self.coeffs.iter().enumerate() {
            let [k1, k2] = self.wavevector(idx);
            wtr.write_record([
                k1.to_string(),
                k2.to_string(),
                crate::report::fmt_f64(c.re),
                crate::report::fmt_f64(c.im),
            ])?;
        }
        wtr.flush()?;
        Ok(())
    }

    /// Read records written by [`TrigPoly::write_csv`]; the box is the
    /// smallest one containing every listed wavevector.
    pub fn read_csv<R: Read>(r: R) -> Result<Self> {
        let mut rdr = csv::Reader::from_reader(r);
        let mut entries = Vec::new();
        for rec in rdr.records() {
            let rec = rec?;
            let field = |i: usize| rec.get(i).ok_or_else(|| Error::Parse("short record".into()));
            let parse_i = |s: &str| s.trim().parse::<i64>().map_err(|e| Error::Parse(e.to_string()));
            let parse_f = |s: &str| s.trim().parse::<f64>().map_err(|e| Error::Parse(e.to_string()));
            let k = [parse_i(field(0)?)?, parse_i(field(1)?)?];
            entries.push((k, Complex64::new(parse_f(field(2)?)?, parse_f(field(3)?)?)));
        }
        let n = entries
            .iter()
            .map(|(k, _)| k[0].unsigned_abs().max(k[1].unsigned_abs()))
            .max()
            .unwrap_or(0) as usize;
        let mut f = Self::zeros(n);
        for (k, c) in entries {
            f.set(k, c);
        }
        Ok(f)
    }
}

/// `[z^{-n}, ..., z^{n}]` for a unit-modulus `z`.
pub(crate) fn powers(z: Complex64, n: usize) -> Vec<Complex64> {
    let side = 2 * n + 1;
    let mut out = vec![Complex64::new(1.0, 0.0); side];
    let inv = z.conj();
    for i in 1..=n {
        out[n + i] = out[n + i - 1] * z;
        out[n - i] = out[n - i + 1] * inv;
    }
    out
}

pub(crate) fn box_index(n: usize, k: [i64; 2]) -> Option<usize> {
    let n = n as i64;
    if k[0].abs() > n || k[1].abs() > n {
        return None;
    }
    let side = 2 * n + 1;
    Some(((k[0] + n) * side + (k[1] + n)) as usize)
}

pub(crate) fn box_wavevector(n: usize, idx: usize) -> [i64; 2] {
    let side = 2 * n + 1;
    [(idx / side) as i64 - n as i64, (idx % side) as i64 - n as i64]
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn grid_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let f = TrigPoly::random(&mut rng, 5, false);
        let g = TrigPoly::from_grid(f.to_grid(16).unwrap(), 16, 5).unwrap();
        for (a, b) in f.coeffs().iter().zip(g.coeffs()) {
            assert!((a - b).norm() < 1e-12 * f.max_abs());
        }
    }

    #[test]
    fn grid_matches_direct_evaluation() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let f = TrigPoly::random(&mut rng, 3, false);
        let g = 9;
        let vals = f.to_grid(g).unwrap();
        for (idx, v) in vals.iter().enumerate() {
            let x = Point::new((idx / g) as f64 / g as f64, (idx % g) as f64 / g as f64);
            assert!((f.evaluate(&x) - v).norm() < 1e-12);
        }
    }

    #[test]
    fn real_polys_have_real_values() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let f = TrigPoly::random(&mut rng, 4, true);
        assert!(f.is_real(1e-15));
        assert!(f.evaluate(&Point::new(0.3, 0.77)).im.abs() < 1e-12);
    }

    #[test]
    fn csv_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let f = TrigPoly::random(&mut rng, 2, false);
        let mut buf = Vec::new();
        f.write_csv(&mut buf).unwrap();
        assert_eq!(TrigPoly::read_csv(&buf[..]).unwrap(), f);
    }
}
