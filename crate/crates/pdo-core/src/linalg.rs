//! Thin wrapper around the system LAPACKE singular value decomposition.

use ndarray::Array2;
use num_complex::Complex64;

use crate::error::{Error, Result};

const LAPACK_ROW_MAJOR: i32 = 101;

extern "C" {
    fn LAPACKE_zgesdd(
        matrix_layout: i32,
        jobz: u8,
        m: i32,
        n: i32,
        a: *mut Complex64,
        lda: i32,
        s: *mut f64,
        u: *mut Complex64,
        ldu: i32,
        vt: *mut Complex64,
        ldvt: i32,
    ) -> i32;
}

/// Full singular value decomposition `a = u diag(s) v^H` of a square complex
/// matrix. Returns `(u, s, v^H)` with `s` in descending order.
pub fn svd(a: &Array2<Complex64>) -> Result<(Array2<Complex64>, Vec<f64>, Array2<Complex64>)> {
    let (m, n) = a.dim();
    if m != n {
        return Err(Error::LinAlg(format!("svd expects a square matrix, got {m}x{n}")));
    }
    let mut work = a
        .as_standard_layout()
        .as_slice()
        .expect("standard layout")
        .to_vec();
    let mut s = vec![0.0f64; n];
    let mut u = vec![Complex64::default(); n * n];
    let mut vt = vec![Complex64::default(); n * n];
    let info = unsafe {
        LAPACKE_zgesdd(
            LAPACK_ROW_MAJOR,
            b'A',
            m as i32,
            n as i32,
            work.as_mut_ptr(),
            n as i32,
            s.as_mut_ptr(),
            u.as_mut_ptr(),
            n as i32,
            vt.as_mut_ptr(),
            n as i32,
        )
    };
    if info != 0 {
        return Err(Error::LinAlg(format!("zgesdd failed with info = {info}")));
    }
    let u = Array2::from_shape_vec((n, n), u).expect("u shape");
    let vt = Array2::from_shape_vec((n, n), vt).expect("vt shape");
    Ok((u, s, vt))
}

/// Solve `a x = b` through the SVD with a relative truncation threshold:
/// singular directions below `rcond * s_max` are dropped.
pub fn svd_solve(
    u: &Array2<Complex64>,
    s: &[f64],
    vt: &Array2<Complex64>,
    b: &[Complex64],
    rcond: f64,
) -> Vec<Complex64> {
    let n = s.len();
    let smax = s.first().copied().unwrap_or(0.0);
    // c = U^H b, then scale by 1/s, then x = V c.
    let mut c = vec![Complex64::default(); n];
    for (j, cj) in c.iter_mut().enumerate() {
        let mut acc = Complex64::default();
        for i in 0..n {
            acc += u[(i, j)].conj() * b[i];
        }
        *cj = if s[j] > rcond * smax { acc / s[j] } else { Complex64::default() };
    }
    let mut x = vec![Complex64::default(); n];
    for (i, xi) in x.iter_mut().enumerate() {
        let mut acc = Complex64::default();
        for j in 0..n {
            acc += vt[(j, i)].conj() * c[j];
        }
        *xi = acc;
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn svd_of_diagonal_matrix() {
        let a = array![
            [Complex64::new(3.0, 0.0), Complex64::new(0.0, 0.0)],
            [Complex64::new(0.0, 0.0), Complex64::new(0.0, -2.0)],
        ];
        let (u, s, vt) = svd(&a).unwrap();
        assert!((s[0] - 3.0).abs() < 1e-12 && (s[1] - 2.0).abs() < 1e-12);
        // Reconstruct and compare entrywise.
        for i in 0..2 {
            for j in 0..2 {
                let mut acc = Complex64::default();
                for k in 0..2 {
                    acc += u[(i, k)] * s[k] * vt[(k, j)];
                }
                assert!((acc - a[(i, j)]).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn svd_solve_recovers_rhs() {
        let a = array![
            [Complex64::new(2.0, 1.0), Complex64::new(0.5, 0.0)],
            [Complex64::new(0.0, -1.0), Complex64::new(1.0, 3.0)],
        ];
        let x_true = [Complex64::new(1.0, -2.0), Complex64::new(0.5, 0.25)];
        let b: Vec<Complex64> = (0..2)
            .map(|i| (0..2).map(|j| a[(i, j)] * x_true[j]).sum())
            .collect();
        let (u, s, vt) = svd(&a).unwrap();
        let x = svd_solve(&u, &s, &vt, &b, 1e-12);
        for (got, want) in x.iter().zip(x_true.iter()) {
            assert!((got - want).norm() < 1e-10);
        }
    }
}
