use std::io::{Read, Write};

use num_complex::Complex64;
use rayon::prelude::*;

use super::operator::{outer_ring_start, signed_freq, MappedGrid, OperatorKind};
use crate::fft::{fft2, wrap};
use crate::fourier::{box_wavevector, AnisoParams, TrigPoly};
use crate::torus::SmoothToralMap;
use crate::{Error, Result};

/// Largest truncation accepted unless a different budget is configured.
pub const DEFAULT_MAX_N: usize = 48;

/// FFT coefficients below this fraction of the largest coefficient of their
/// column (over the whole sampling grid) are rounding noise and are set to zero.
pub const CHOP: f64 = 1e-13;

/// Coefficients below this fraction of the peak count as outside a column's reach;
/// FFT rounding noise sits near 1e-16.
const REACH_TOL: f64 = 1e-14;

const DUMP_MAGIC: &[u8; 4] = b"GMX1";

/// The finite section of `a^{Op} ∘ Op ∘ (a^{Op})⁻¹` on the box `|k|∞ ≤ N`.
#[derive(Debug, Clone)]
pub struct GalerkinMatrix {
    pub n: usize,
    pub kind: OperatorKind,
    pub params: AnisoParams,
    /// Side of the sampling grid used to compute the entries.
    pub grid: usize,
    /// Relative mass in the outer ring of the probe spectra.
    pub aliasing: f64,
    /// Column-major, rows and columns in the coefficient order of [`TrigPoly`].
    data: Vec<Complex64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GalerkinOptions {
    pub max_n: usize,
    /// Force a sampling grid instead of the adaptive choice.
    pub grid: Option<usize>,
}

impl Default for GalerkinOptions {
    fn default() -> Self {
        Self {
            max_n: DEFAULT_MAX_N,
            grid: None,
        }
    }
}

/// A sampling grid large enough that no mode of any column wraps into the box.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridChoice {
    pub g: usize,
    /// Largest max-norm frequency carrying mass above `1e-14` of a column's peak.
    pub reach: usize,
    pub aliasing: f64,
}

/// Smallest `m ≥ x` whose only prime factors are 2, 3 and 5.
pub fn smooth_size(x: usize) -> usize {
    let mut m = x.max(1);
    loop {
        let mut r = m;
        for p in [2, 3, 5] {
            while r % p == 0 {
                r /= p;
            }
        }
        if r == 1 {
            return m;
        }
        m += 1;
    }
}

/// Pick the sampling grid for a half-width `n` section.
pub fn choose_grid(kind: OperatorKind, map: &SmoothToralMap, n: usize) -> Result<GridChoice> {
    let base = if kind.uses_inverse() { map.base().inverse() } else { map.base().clone() };
    let linear_reach = base.dual_growth() as usize * n;
    let min_g = 2 * (2 * n + 1);
    if map.is_linear() {
        return Ok(GridChoice {
            g: smooth_size((linear_reach + n + 1).max(min_g)),
            reach: linear_reach,
            aliasing: 0.0,
        });
    }
    let mut p = smooth_size(2 * (linear_reach + n) + 32);
    loop {
        let (reach, aliasing) = probe_spectra(kind, map, n, p)?;
        if reach < outer_ring_start(p) || p >= 4096 {
            return Ok(GridChoice {
                g: smooth_size((reach + n + 1).max(min_g)),
                reach,
                aliasing,
            });
        }
        p = smooth_size(2 * p);
    }
}

/// Reach and outer-ring mass of the corner and edge columns sampled on a
/// `p × p` grid.
fn probe_spectra(kind: OperatorKind, map: &SmoothToralMap, n: usize, p: usize) -> Result<(usize, f64)> {
    let ni = n as i64;
    let probes = [[ni, ni], [ni, -ni], [ni, 0], [0, ni]];
    let mapped = MappedGrid::new(kind, map, p)?;
    let ring_start = outer_ring_start(p);
    let mut reach = 0usize;
    let mut aliasing = 0.0f64;
    let mut buf = vec![Complex64::default(); p * p];
    for k in probes {
        mapped.mode_values(k, &mut buf);
        fft2(&mut buf, p, false);
        let peak = buf.iter().map(|c| c.norm()).fold(0.0, f64::max);
        let (mut total, mut ring) = (0.0, 0.0);
        for (idx, c) in buf.iter().enumerate() {
            let m = signed_freq(idx / p, p).unsigned_abs().max(signed_freq(idx % p, p).unsigned_abs()) as usize;
            let e = c.norm_sqr();
            total += e;
            if m >= ring_start {
                ring += e;
            }
            if c.norm() > REACH_TOL * peak {
                reach = reach.max(m);
            }
        }
        aliasing = aliasing.max((ring / total).sqrt());
    }
    Ok((reach, aliasing))
}

/// Outer-ring mass for a caller-chosen grid. Linear maps alias exactly when
/// a wrapped image of the box can land back in it.
fn forced_grid(kind: OperatorKind, map: &SmoothToralMap, n: usize, g: usize) -> Result<GridChoice> {
    if map.is_linear() {
        let base = if kind.uses_inverse() { map.base().inverse() } else { map.base().clone() };
        let reach = base.dual_growth() as usize * n;
        let aliasing = if g < reach + n + 1 { 1.0 } else { 0.0 };
        return Ok(GridChoice { g, reach, aliasing });
    }
    let (reach, aliasing) = probe_spectra(kind, map, n, g)?;
    Ok(GridChoice { g, reach, aliasing })
}

/// Assemble with the default budget and adaptive grid.
pub fn assemble_galerkin(kind: OperatorKind, map: &SmoothToralMap, params: &AnisoParams, n: usize) -> Result<GalerkinMatrix> {
    assemble_galerkin_with(kind, map, params, n, &GalerkinOptions::default())
}

/// Column `k` holds `a(j)/a(k) · [W · (e_k ∘ T^{±1})]^(j)` for `j` in the box.
pub fn assemble_galerkin_with(
    kind: OperatorKind,
    map: &SmoothToralMap,
    params: &AnisoParams,
    n: usize,
    opts: &GalerkinOptions,
) -> Result<GalerkinMatrix> {
    if n > opts.max_n {
        return Err(Error::BudgetExceeded {
            requested: n,
            budget: opts.max_n,
        });
    }
    kind.validate()?;
    let choice = match opts.grid {
        Some(g) if g >= 2 * n + 1 => forced_grid(kind, map, n, g)?,
        Some(g) => return Err(Error::param("grid", format!("{g} cannot resolve half-width {n}"))),
        None => choose_grid(kind, map, n)?,
    };
    let g = choice.g;
    if g < 2 * n + 1 {
        return Err(Error::param("grid", format!("{g} cannot resolve half-width {n}")));
    }
    let mapped = MappedGrid::new(kind, map, g)?;
    let side = 2 * n + 1;
    let dim = side * side;
    let log_symbol: Vec<f64> = (0..dim).map(|i| params.log_symbol(box_wavevector(n, i))).collect();
    let slots: Vec<usize> = (0..dim)
        .map(|i| {
            let [j1, j2] = box_wavevector(n, i);
            wrap(j1, g) * g + wrap(j2, g)
        })
        .collect();

    let mut data = vec![Complex64::default(); dim * dim];
    // Columns with k₁ ≥ 0 are computed; one chunk per value of k₁.
    data.par_chunks_mut(side * dim)
        .enumerate()
        .skip(n)
        .for_each(|(row, chunk)| {
            let k1 = row as i64 - n as i64;
            let mut buf = vec![Complex64::default(); g * g];
            for (c, col) in chunk.chunks_mut(dim).enumerate() {
                let k2 = c as i64 - n as i64;
                if k1 == 0 && k2 < 0 {
                    continue;
                }
                let k_idx = row * side + c;
                mapped.mode_values([k1, k2], &mut buf);
                fft2(&mut buf, g, false);
                let scale = 1.0 / (g * g) as f64;
                let peak = buf.iter().map(|v| v.norm()).fold(0.0, f64::max) * scale;
                let floor = CHOP * peak;
                for (j, entry) in col.iter_mut().enumerate() {
                    let mut v = buf[slots[j]] * scale;
                    if v.re.abs() < floor {
                        v.re = 0.0;
                    }
                    if v.im.abs() < floor {
                        v.im = 0.0;
                    }
                    *entry = v * (log_symbol[j] - log_symbol[k_idx]).exp();
                }
            }
        });
    // A(j, -k) = conj A(-j, k) because the operator maps real functions to real functions.
    let centre = dim / 2;
    {
        let col0 = &mut data[centre * dim..(centre + 1) * dim];
        for j in 0..centre {
            let avg = 0.5 * (col0[j] + col0[dim - 1 - j].conj());
            col0[j] = avg;
            col0[dim - 1 - j] = avg.conj();
        }
        col0[centre].im = 0.0;
    }
    for k in 0..centre {
        let partner = dim - 1 - k;
        for j in 0..dim {
            data[k * dim + j] = data[partner * dim + (dim - 1 - j)].conj();
        }
    }
    Ok(GalerkinMatrix {
        n,
        kind,
        params: *params,
        grid: g,
        aliasing: choice.aliasing,
        data,
    })
}

impl GalerkinMatrix {
    pub fn from_dense(n: usize, kind: OperatorKind, params: AnisoParams, data: Vec<Complex64>) -> Result<Self> {
        let side = 2 * n + 1;
        if data.len() != side.pow(4) {
            return Err(Error::param("data", "length must be (2N+1)^4"));
        }
        Ok(Self {
            n,
            kind,
            params,
            grid: 0,
            aliasing: 0.0,
            data,
        })
    }

    pub fn dim(&self) -> usize {
        (2 * self.n + 1).pow(2)
    }

    /// Column-major entries.
    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn entry(&self, row: [i64; 2], col: [i64; 2]) -> Complex64 {
        let idx = |k| crate::fourier::box_index(self.n, k);
        match (idx(row), idx(col)) {
            (Some(r), Some(c)) => self.data[c * self.dim() + r],
            _ => Complex64::default(),
        }
    }

    pub fn column(&self, col: usize) -> &[Complex64] {
        let d = self.dim();
        &self.data[col * d..(col + 1) * d]
    }

    /// Matrix-vector product on coefficient vectors (weighted basis).
    pub fn apply(&self, f: &TrigPoly) -> Result<TrigPoly> {
        if f.half_width() != self.n {
            return Err(Error::param("f", "half-width differs from the matrix"));
        }
        let d = self.dim();
        let mut out = vec![Complex64::default(); d];
        for (c, x) in f.coeffs().iter().enumerate() {
            if *x == Complex64::default() {
                continue;
            }
            for (o, a) in out.iter_mut().zip(self.column(c)) {
                *o += a * x;
            }
        }
        TrigPoly::from_coeffs(self.n, out)
    }

    /// Binary dump: 32-byte header (`GMX1`, N as u16, kind code as u16, then
    /// p, q, t as f64), followed by the entries column-major as (re, im) pairs.
    /// Everything is little-endian. For `Lt`/`Mt` the stored t is the
    /// operator's; the entries do not depend on the norm's t, which reads back as 2.
    pub fn write_dump<W: Write>(&self, mut w: W) -> Result<()> {
        let n = u16::try_from(self.n).map_err(|_| Error::param("n", "too large for dump header"))?;
        let mut header = Vec::with_capacity(32);
        header.extend_from_slice(DUMP_MAGIC);
        header.extend_from_slice(&n.to_le_bytes());
        header.extend_from_slice(&self.kind.code().to_le_bytes());
        for x in [self.params.p, self.params.q, self.kind.t().unwrap_or(self.params.t)] {
            header.extend_from_slice(&x.to_le_bytes());
        }
        w.write_all(&header)?;
        let mut buf = Vec::with_capacity(16 * self.dim());
        for col in self.data.chunks(self.dim()) {
            buf.clear();
            for z in col {
                buf.extend_from_slice(&z.re.to_le_bytes());
                buf.extend_from_slice(&z.im.to_le_bytes());
            }
            w.write_all(&buf)?;
        }
        Ok(())
    }

    /// Read a dump written by [`GalerkinMatrix::write_dump`]. The stable
    /// direction is not stored and must be supplied.
    pub fn read_dump<R: Read>(mut r: R, stable_dir: nalgebra::Vector2<f64>) -> Result<Self> {
        let mut header = [0u8; 32];
        r.read_exact(&mut header)?;
        if &header[..4] != DUMP_MAGIC {
            return Err(Error::Parse("not a Galerkin matrix dump".into()));
        }
        let n = u16::from_le_bytes([header[4], header[5]]) as usize;
        let code = u16::from_le_bytes([header[6], header[7]]);
        let f = |i: usize| f64::from_le_bytes(header[8 + 8 * i..16 + 8 * i].try_into().expect("8 bytes"));
        let (p, q, t) = (f(0), f(1), f(2));
        let kind = match code {
            0 => OperatorKind::L,
            1 => OperatorKind::M,
            2 => OperatorKind::Lt(t),
            3 => OperatorKind::Mt(t),
            other => return Err(Error::Parse(format!("unknown kind code {other}"))),
        };
        let norm_t = if kind.t().is_some() { 2.0 } else { t };
        let params = AnisoParams::new(p, q, norm_t, stable_dir)?;
        let dim = (2 * n + 1).pow(2);
        let mut bytes = vec![0u8; 16 * dim * dim];
        r.read_exact(&mut bytes)?;
        let data = bytes
            .chunks_exact(16)
            .map(|c| {
                Complex64::new(
                    f64::from_le_bytes(c[..8].try_into().expect("8 bytes")),
                    f64::from_le_bytes(c[8..].try_into().expect("8 bytes")),
                )
            })
            .collect();
        Self::from_dense(n, kind, params, data)
    }
}
