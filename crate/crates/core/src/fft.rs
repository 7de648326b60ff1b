//! Square 2-D FFTs on `g × g` row-major grids.

use std::cell::RefCell;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn plan(g: usize, inverse: bool) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| {
        let mut p = p.borrow_mut();
        if inverse {
            p.plan_fft_inverse(g)
        } else {
            p.plan_fft_forward(g)
        }
    })
}

/// Unnormalized in-place 2-D transform: forward uses `e^{-2πi jk/g}`.
pub(crate) fn fft2(data: &mut [Complex64], g: usize, inverse: bool) {
    assert_eq!(data.len(), g * g);
    let fft = plan(g, inverse);
    let mut scratch = vec![Complex64::default(); fft.get_inplace_scratch_len()];
    fft.process_with_scratch(data, &mut scratch);
    let mut col = vec![Complex64::default(); g];
    for j in 0..g {
        for i in 0..g {
            col[i] = data[i * g + j];
        }
        fft.process_with_scratch(&mut col, &mut scratch);
        for i in 0..g {
            data[i * g + j] = col[i];
        }
    }
}

/// Grid index of the (possibly negative) frequency `k` on a grid of size `g`.
pub(crate) fn wrap(k: i64, g: usize) -> usize {
    k.rem_euclid(g as i64) as usize
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let g = 12;
        let orig: Vec<Complex64> = (0..g * g).map(|i| Complex64::new(i as f64, (i * i % 7) as f64)).collect();
        let mut d = orig.clone();
        fft2(&mut d, g, false);
        fft2(&mut d, g, true);
        for (a, b) in d.iter().zip(&orig) {
            assert!((a / (g * g) as f64 - b).norm() < 1e-12);
        }
    }

    #[test]
    fn single_mode() {
        let g = 8;
        let (k1, k2) = (2i64, -3i64);
        let mut d: Vec<Complex64> = (0..g * g)
            .map(|idx| {
                let (a, b) = ((idx / g) as f64, (idx % g) as f64);
                Complex64::cis(std::f64::consts::TAU * (k1 as f64 * a + k2 as f64 * b) / g as f64)
            })
            .collect();
        fft2(&mut d, g, false);
        let peak = wrap(k1, g) * g + wrap(k2, g);
        assert!((d[peak] - Complex64::new((g * g) as f64, 0.0)).norm() < 1e-10);
    }
}
