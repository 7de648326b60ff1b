//! Smith normal form of 2×2 integer matrices.

use crate::Result;

pub type IMat2 = [[i128; 2]; 2];

/// `U · A · V = diag(d1, d2)` with `U`, `V` unimodular, `d1 | d2`, `d1, d2 ≥ 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SmithForm {
    pub u: IMat2,
    pub v: IMat2,
    pub d: [i128; 2],
}

#[cfg(test)]
fn mul(a: &IMat2, b: &IMat2) -> Result<IMat2> {
    let mut out = [[0i128; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0]
                .checked_mul(b[0][j])
                .zip(a[i][1].checked_mul(b[1][j]))
                .and_then(|(x, y)| x.checked_add(y))
                .ok_or(crate::Error::Overflow("smith normal form"))?;
        }
    }
    Ok(out)
}

pub fn smith_normal_form(a: IMat2) -> Result<SmithForm> {
    let mut m = a;
    let mut u: IMat2 = [[1, 0], [0, 1]];
    let mut v: IMat2 = [[1, 0], [0, 1]];
    loop {
        // Move the smallest nonzero entry to (0, 0).
        let mut best = None;
        for i in 0..2 {
            for j in 0..2 {
                if m[i][j] != 0 && best.is_none_or(|(bi, bj): (usize, usize)| m[i][j].abs() < m[bi][bj].abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((bi, bj)) = best else {
            return Ok(SmithForm { u, v, d: [0, 0] });
        };
        if bi == 1 {
            m.swap(0, 1);
            u.swap(0, 1);
        }
        if bj == 1 {
            for r in 0..2 {
                m[r].swap(0, 1);
                v[r].swap(0, 1);
            }
        }
        let p = m[0][0];
        // Clear the first column and row by division with remainder.
        let qr = m[1][0].div_euclid(p);
        for c in 0..2 {
            m[1][c] -= qr * m[0][c];
            u[1][c] -= qr * u[0][c];
        }
        let qc = m[0][1].div_euclid(p);
        for r in 0..2 {
            m[r][1] -= qc * m[r][0];
            v[r][1] -= qc * v[r][0];
        }
        if m[1][0] != 0 || m[0][1] != 0 {
            continue;
        }
        if m[1][1] % p != 0 {
            // Add row 1 to row 0 and repeat to enforce divisibility.
            for c in 0..2 {
                m[0][c] += m[1][c];
                u[0][c] += u[1][c];
            }
            continue;
        }
        for i in 0..2 {
            if m[i][i] < 0 {
                for c in 0..2 {
                    m[i][c] = -m[i][c];
                    u[i][c] = -u[i][c];
                }
            }
        }
        return Ok(SmithForm { u, v, d: [m[0][0], m[1][1]] });
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn det(m: &IMat2) -> i128 {
        m[0][0] * m[1][1] - m[0][1] * m[1][0]
    }

    #[test]
    fn decomposes() {
        for a in [[[4, 6], [2, 8]], [[1, 1], [1, 0]], [[4, 3], [3, 1]], [[0, 0], [0, 5]], [[6, 0], [0, 4]]] {
            let s = smith_normal_form(a).unwrap();
            assert_eq!(det(&s.u).abs(), 1);
            assert_eq!(det(&s.v).abs(), 1);
            let prod = mul(&mul(&s.u, &a).unwrap(), &s.v).unwrap();
            assert_eq!(prod, [[s.d[0], 0], [0, s.d[1]]], "{a:?}");
            assert!(s.d[0] == 0 || s.d[1] % s.d[0] == 0);
            assert_eq!(s.d[0] * s.d[1], det(&a).abs());
        }
    }
}
