//! Dense nonsymmetric eigenproblems through LAPACK.

use std::cmp::Ordering;
use std::os::raw::c_int;

use lapack_sys::{dgebak_, dgebal_, dgehrd_, dhsein_, dhseqr_, dormhr_, zgeev_};
use num_complex::Complex64;

use crate::{Error, Result};

fn check(routine: &'static str, info: c_int) -> Result<()> {
    if info == 0 {
        Ok(())
    } else {
        Err(Error::Lapack { routine, info })
    }
}

fn dim(n: usize) -> Result<c_int> {
    c_int::try_from(n.max(1)).map_err(|_| Error::param("n", "matrix too large for LAPACK"))
}

/// Eigenvalues of a real matrix, with residuals for the leading ones.
#[derive(Debug, Clone, PartialEq)]
pub struct RealEigen {
    /// Sorted by descending modulus; ties broken by real then imaginary part.
    pub values: Vec<Complex64>,
    /// `‖Av − λv‖ / ‖v‖`, present for the leading eigenvalues that were refined.
    pub residuals: Vec<Option<f64>>,
}

/// Order by descending modulus, then descending real part, then descending
/// imaginary part, so the output is deterministic.
pub fn by_descending_modulus(a: &Complex64, b: &Complex64) -> Ordering {
    b.norm()
        .total_cmp(&a.norm())
        .then(b.re.total_cmp(&a.re))
        .then(b.im.total_cmp(&a.im))
}

/// All eigenvalues of the column-major `n × n` matrix `a`; the `with_residuals`
/// largest in modulus also get an eigenvector (inverse iteration on the
/// Hessenberg form) and a residual against `a`.
pub fn real_eigen(a: &[f64], n: usize, with_residuals: usize) -> Result<RealEigen> {
    assert_eq!(a.len(), n * n);
    if n == 0 {
        return Ok(RealEigen { values: Vec::new(), residuals: Vec::new() });
    }
    if n == 1 {
        let v = Complex64::new(a[0], 0.0);
        return Ok(RealEigen {
            values: vec![v],
            residuals: vec![(with_residuals > 0).then_some(0.0)],
        });
    }
    let ni = dim(n)?;
    let mut reflectors = a.to_vec();
    let (mut ilo, mut ihi, mut info) = (0, 0, 0);
    let mut scale = vec![0.0; n];
    unsafe {
        dgebal_(&(b'B' as _), &ni, reflectors.as_mut_ptr(), &ni, &mut ilo, &mut ihi, scale.as_mut_ptr(), &mut info);
    }
    check("dgebal", info)?;

    let mut tau = vec![0.0; n - 1];
    let mut query = [0.0];
    unsafe {
        dgehrd_(&ni, &ilo, &ihi, reflectors.as_mut_ptr(), &ni, tau.as_mut_ptr(), query.as_mut_ptr(), &-1, &mut info);
    }
    check("dgehrd", info)?;
    let mut work = vec![0.0; query[0] as usize];
    unsafe {
        dgehrd_(&ni, &ilo, &ihi, reflectors.as_mut_ptr(), &ni, tau.as_mut_ptr(), work.as_mut_ptr(), &(work.len() as c_int), &mut info);
    }
    check("dgehrd", info)?;

    let mut hess = reflectors.clone();
    for j in 0..n {
        for i in j + 2..n {
            hess[j * n + i] = 0.0;
        }
    }
    let mut schur = hess.clone();
    let (mut wr, mut wi) = (vec![0.0; n], vec![0.0; n]);
    let mut z = [0.0];
    unsafe {
        dhseqr_(&(b'E' as _), &(b'N' as _), &ni, &ilo, &ihi, schur.as_mut_ptr(), &ni, wr.as_mut_ptr(), wi.as_mut_ptr(), z.as_mut_ptr(), &1, query.as_mut_ptr(), &-1, &mut info);
    }
    check("dhseqr", info)?;
    let mut work = vec![0.0; (query[0] as usize).max(n)];
    unsafe {
        dhseqr_(&(b'E' as _), &(b'N' as _), &ni, &ilo, &ihi, schur.as_mut_ptr(), &ni, wr.as_mut_ptr(), wi.as_mut_ptr(), z.as_mut_ptr(), &1, work.as_mut_ptr(), &(work.len() as c_int), &mut info);
    }
    check("dhseqr", info)?;
    drop(schur);

    let mut order: Vec<usize> = (0..n).collect();
    let eig = |i: usize| Complex64::new(wr[i], wi[i]);
    order.sort_by(|&i, &j| by_descending_modulus(&eig(i), &eig(j)).then(i.cmp(&j)));
    let values: Vec<Complex64> = order.iter().map(|&i| eig(i)).collect();
    let mut residuals = vec![None; n];

    let k = with_residuals.min(n);
    if k > 0 {
        // Select the leading eigenvalues; a complex pair is selected through
        // its first member and yields two real columns (re, im).
        let mut select = vec![0 as c_int; n];
        for &i in &order[..k] {
            let first = if wi[i] < 0.0 { i - 1 } else { i };
            select[first] = 1;
        }
        for i in 0..n {
            if select[i] != 0 && wi[i] > 0.0 {
                select[i + 1] = 0;
            }
        }
        let mm: usize = (0..n).filter(|&i| select[i] != 0).map(|i| if wi[i] != 0.0 { 2 } else { 1 }).sum();
        let mut vr = vec![0.0; n * mm];
        let mut vl = [0.0];
        let mut wr_ref = wr.clone();
        let mut m = 0;
        let mut ifaill = vec![0 as c_int; mm];
        let mut ifailr = vec![0 as c_int; mm];
        let mut hwork = vec![0.0; n * (n + 2)];
        unsafe {
            dhsein_(
                &(b'R' as _), &(b'N' as _), &(b'N' as _), select.as_mut_ptr(), &ni, hess.as_ptr(), &ni,
                wr_ref.as_mut_ptr(), wi.as_ptr(), vl.as_mut_ptr(), &1, vr.as_mut_ptr(), &ni,
                &(mm as c_int), &mut m, hwork.as_mut_ptr(), ifaill.as_mut_ptr(), ifailr.as_mut_ptr(), &mut info,
            );
        }
        // info > 0 only flags vectors that failed to converge; those keep no residual.
        if info < 0 {
            check("dhsein", info)?;
        }
        drop(hwork);
        let mc = m as c_int;
        unsafe {
            dormhr_(&(b'L' as _), &(b'N' as _), &ni, &mc, &ilo, &ihi, reflectors.as_ptr(), &ni, tau.as_ptr(), vr.as_mut_ptr(), &ni, query.as_mut_ptr(), &-1, &mut info);
        }
        check("dormhr", info)?;
        let mut work = vec![0.0; (query[0] as usize).max(1)];
        unsafe {
            dormhr_(&(b'L' as _), &(b'N' as _), &ni, &mc, &ilo, &ihi, reflectors.as_ptr(), &ni, tau.as_ptr(), vr.as_mut_ptr(), &ni, work.as_mut_ptr(), &(work.len() as c_int), &mut info);
            dgebak_(&(b'B' as _), &(b'R' as _), &ni, &ilo, &ihi, scale.as_ptr(), &mc, vr.as_mut_ptr(), &ni, &mut info);
        }
        check("dgebak", info)?;

        let mut col = 0;
        let mut by_index = vec![None; n];
        for i in 0..n {
            if select[i] == 0 {
                continue;
            }
            let failed = |c: usize| ifailr[c] != 0;
            if wi[i] == 0.0 {
                if !failed(col) {
                    by_index[i] = Some(real_residual(a, n, &vr[col * n..(col + 1) * n], wr[i]));
                }
                col += 1;
            } else {
                if !failed(col) && !failed(col + 1) {
                    let r = complex_residual(a, n, &vr[col * n..(col + 1) * n], &vr[(col + 1) * n..(col + 2) * n], eig(i));
                    by_index[i] = Some(r);
                    by_index[i + 1] = Some(r);
                }
                col += 2;
            }
        }
        for (pos, &i) in order.iter().enumerate().take(k) {
            residuals[pos] = by_index[i];
        }
    }
    Ok(RealEigen { values, residuals })
}

/// Eigenvalues only.
pub fn real_eigenvalues(a: &[f64], n: usize) -> Result<Vec<Complex64>> {
    Ok(real_eigen(a, n, 0)?.values)
}

fn matvec(a: &[f64], n: usize, x: &[f64]) -> Vec<f64> {
    let mut y = vec![0.0; n];
    for (j, &xj) in x.iter().enumerate() {
        if xj != 0.0 {
            for (yi, aij) in y.iter_mut().zip(&a[j * n..(j + 1) * n]) {
                *yi += aij * xj;
            }
        }
    }
    y
}

fn real_residual(a: &[f64], n: usize, v: &[f64], lambda: f64) -> f64 {
    let av = matvec(a, n, v);
    let r: f64 = av.iter().zip(v).map(|(x, y)| (x - lambda * y).powi(2)).sum();
    let nv: f64 = v.iter().map(|x| x * x).sum();
    (r / nv).sqrt()
}

fn complex_residual(a: &[f64], n: usize, x: &[f64], y: &[f64], lambda: Complex64) -> f64 {
    let (al, be) = (lambda.re, lambda.im);
    let ax = matvec(a, n, x);
    let ay = matvec(a, n, y);
    let mut r = 0.0;
    let mut nv = 0.0;
    for i in 0..n {
        r += (ax[i] - al * x[i] + be * y[i]).powi(2) + (ay[i] - be * x[i] - al * y[i]).powi(2);
        nv += x[i] * x[i] + y[i] * y[i];
    }
    (r / nv).sqrt()
}

/// Full complex eigendecomposition `A V = V Λ`, `U^H A = Λ U^H`.
#[derive(Debug, Clone)]
pub struct ComplexEigen {
    pub values: Vec<Complex64>,
    /// Column-major right eigenvectors.
    pub right: Vec<Complex64>,
    /// Column-major left eigenvectors.
    pub left: Vec<Complex64>,
}

pub fn complex_eigen(a: &[Complex64], n: usize) -> Result<ComplexEigen> {
    assert_eq!(a.len(), n * n);
    let ni = dim(n)?;
    let mut work_a = a.to_vec();
    let mut values = vec![Complex64::default(); n];
    let mut left = vec![Complex64::default(); n * n];
    let mut right = vec![Complex64::default(); n * n];
    let mut rwork = vec![0.0; 2 * n];
    let mut info = 0;
    let mut query = [Complex64::default()];
    let v = b'V' as _;
    unsafe {
        zgeev_(
            &v, &v, &ni, work_a.as_mut_ptr() as *mut _, &ni, values.as_mut_ptr() as *mut _,
            left.as_mut_ptr() as *mut _, &ni, right.as_mut_ptr() as *mut _, &ni,
            query.as_mut_ptr() as *mut _, &-1, rwork.as_mut_ptr(), &mut info,
        );
    }
    check("zgeev", info)?;
    let mut work = vec![Complex64::default(); query[0].re as usize];
    unsafe {
        zgeev_(
            &v, &v, &ni, work_a.as_mut_ptr() as *mut _, &ni, values.as_mut_ptr() as *mut _,
            left.as_mut_ptr() as *mut _, &ni, right.as_mut_ptr() as *mut _, &ni,
            work.as_mut_ptr() as *mut _, &(work.len() as c_int), rwork.as_mut_ptr(), &mut info,
        );
    }
    check("zgeev", info)?;
    Ok(ComplexEigen { values, right, left })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rotation_and_scaling() {
        // [[0, -2], [2, 0]] ⊕ [3]: eigenvalues ±2i and 3.
        let a = vec![0.0, 2.0, 0.0, -2.0, 0.0, 0.0, 0.0, 0.0, 3.0];
        let e = real_eigen(&a, 3, 3).unwrap();
        assert!((e.values[0] - Complex64::new(3.0, 0.0)).norm() < 1e-14);
        assert!((e.values[1].norm() - 2.0).abs() < 1e-14 && e.values[1].re.abs() < 1e-14);
        for r in &e.residuals {
            assert!(r.unwrap() < 1e-13);
        }
    }

    #[test]
    fn complex_left_and_right() {
        let a = vec![
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 1.0),
            Complex64::new(2.0, 0.0),
            Complex64::new(-1.0, 0.5),
        ];
        let e = complex_eigen(&a, 2).unwrap();
        for j in 0..2 {
            let (v, u, l) = (&e.right[2 * j..2 * j + 2], &e.left[2 * j..2 * j + 2], e.values[j]);
            for i in 0..2 {
                let av = a[i] * v[0] + a[2 + i] * v[1];
                assert!((av - l * v[i]).norm() < 1e-13);
                let ua = u[0].conj() * a[2 * i] + u[1].conj() * a[2 * i + 1];
                assert!((ua - l * u[i].conj()).norm() < 1e-13);
            }
        }
    }
}
