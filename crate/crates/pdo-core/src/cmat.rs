//! Small dense complex matrices (sizes 1 to 3) for matrix-valued symbols.
//!
//! Symbols take values in `l x l` complex matrices with `l <= 3`; a fixed
//! inline buffer keeps evaluation allocation-free.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Maximum matrix size supported for matrix-valued symbols.
pub const MAX_L: usize = 3;

/// An `l x l` complex matrix, `1 <= l <= 3`, stored row-major inline.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CMat {
    l: usize,
    data: [Complex64; MAX_L * MAX_L],
}

impl CMat {
    pub fn zeros(l: usize) -> Self {
        assert!((1..=MAX_L).contains(&l), "matrix size {l} outside 1..=3");
        Self { l, data: [Complex64::default(); MAX_L * MAX_L] }
    }

    pub fn identity(l: usize) -> Self {
        let mut m = Self::zeros(l);
        for i in 0..l {
            m.set(i, i, Complex64::new(1.0, 0.0));
        }
        m
    }

    /// A 1x1 matrix holding one scalar.
    pub fn scalar(z: Complex64) -> Self {
        let mut m = Self::zeros(1);
        m.set(0, 0, z);
        m
    }

    pub fn from_rows(l: usize, rows: &[Complex64]) -> Self {
        assert_eq!(rows.len(), l * l);
        let mut m = Self::zeros(l);
        m.data[..l * l].copy_from_slice(rows);
        m
    }

    pub fn size(&self) -> usize {
        self.l
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.l + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, z: Complex64) {
        self.data[i * self.l + j] = z;
    }

    /// The sole entry of a 1x1 matrix.
    pub fn as_scalar(&self) -> Complex64 {
        debug_assert_eq!(self.l, 1);
        self.data[0]
    }

    pub fn add(&self, other: &Self) -> Self {
        debug_assert_eq!(self.l, other.l);
        let mut out = *self;
        for k in 0..self.l * self.l {
            out.data[k] += other.data[k];
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        debug_assert_eq!(self.l, other.l);
        let mut out = *self;
        for k in 0..self.l * self.l {
            out.data[k] -= other.data[k];
        }
        out
    }

    pub fn scale(&self, c: Complex64) -> Self {
        let mut out = *self;
        for k in 0..self.l * self.l {
            out.data[k] *= c;
        }
        out
    }

    pub fn matmul(&self, other: &Self) -> Self {
        debug_assert_eq!(self.l, other.l);
        let l = self.l;
        let mut out = Self::zeros(l);
        for i in 0..l {
            for j in 0..l {
                let mut acc = Complex64::default();
                for k in 0..l {
                    acc += self.get(i, k) * other.get(k, j);
                }
                out.set(i, j, acc);
            }
        }
        out
    }

    /// Apply the matrix to an `l`-vector.
    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        debug_assert_eq!(v.len(), self.l);
        (0..self.l)
            .map(|i| (0..self.l).map(|k| self.get(i, k) * v[k]).sum())
            .collect()
    }

    pub fn det(&self) -> Complex64 {
        match self.l {
            1 => self.get(0, 0),
            2 => self.get(0, 0) * self.get(1, 1) - self.get(0, 1) * self.get(1, 0),
            _ => {
                let m = |i: usize, j: usize| self.get(i, j);
                m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1))
                    - m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0))
                    + m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0))
            }
        }
    }

    /// Adjugate-based inverse; fails when `|det|` is below `floor`.
    pub fn inverse(&self, floor: f64) -> Result<Self> {
        let d = self.det();
        if d.norm() <= floor {
            // Callers attach the phase-space location when they have one.
            return Err(Error::SingularValue { x: Vec::new(), xi: Vec::new() });
        }
        let inv_d = Complex64::new(1.0, 0.0) / d;
        let mut out = Self::zeros(self.l);
        match self.l {
            1 => out.set(0, 0, inv_d),
            2 => {
                out.set(0, 0, self.get(1, 1) * inv_d);
                out.set(0, 1, -self.get(0, 1) * inv_d);
                out.set(1, 0, -self.get(1, 0) * inv_d);
                out.set(1, 1, self.get(0, 0) * inv_d);
            }
            _ => {
                let m = |i: usize, j: usize| self.get(i, j);
                // Cofactor expansion: out[j][i] = cofactor(i, j) / det.
                for i in 0..3 {
                    for j in 0..3 {
                        let r = [(i + 1) % 3, (i + 2) % 3];
                        let c = [(j + 1) % 3, (j + 2) % 3];
                        let minor = m(r[0], c[0]) * m(r[1], c[1]) - m(r[0], c[1]) * m(r[1], c[0]);
                        out.set(j, i, minor * inv_d);
                    }
                }
            }
        }
        Ok(out)
    }

    /// Entrywise maximum modulus (the norm used by matrix seminorms).
    pub fn max_abs(&self) -> f64 {
        self.data[..self.l * self.l].iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius(&self) -> f64 {
        self.data[..self.l * self.l].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn det_and_inverse_small_sizes() {
        let a = CMat::scalar(c(2.0, 1.0));
        assert_eq!(a.det(), c(2.0, 1.0));
        let ai = a.inverse(1e-12).unwrap();
        assert!((ai.as_scalar() * c(2.0, 1.0) - c(1.0, 0.0)).norm() < 1e-14);

        let b = CMat::from_rows(2, &[c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0), c(4.0, 0.0)]);
        assert!((b.det() - c(-2.0, 0.0)).norm() < 1e-14);
        let prod = b.matmul(&b.inverse(1e-12).unwrap());
        for i in 0..2 {
            for j in 0..2 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((prod.get(i, j) - c(want, 0.0)).norm() < 1e-13);
            }
        }

        let rows: Vec<Complex64> = [2.0, 1.0, 0.0, 1.0, 3.0, 1.0, 0.0, 1.0, 2.0]
            .iter()
            .map(|&r| c(r, 0.0))
            .collect();
        let t = CMat::from_rows(3, &rows);
        // det = 2(6-1) - 1(2-0) + 0 = 8.
        assert!((t.det() - c(8.0, 0.0)).norm() < 1e-13);
        let prod = t.matmul(&t.inverse(1e-12).unwrap());
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((prod.get(i, j) - c(want, 0.0)).norm() < 1e-13, "({i},{j})");
            }
        }
    }

    #[test]
    fn singular_matrix_rejected() {
        let b = CMat::from_rows(2, &[c(1.0, 0.0), c(2.0, 0.0), c(2.0, 0.0), c(4.0, 0.0)]);
        assert!(b.inverse(1e-12).is_err());
    }

    #[test]
    fn norms_are_comparable() {
        let b = CMat::from_rows(2, &[c(1.0, 0.0), c(0.0, 2.0), c(-3.0, 0.0), c(0.0, 0.0)]);
        let e = b.max_abs();
        let f = b.frobenius();
        assert_eq!(e, 3.0);
        assert!(f >= e && f <= 2.0 * e);
        // Entrywise max and Frobenius are equivalent up to the dimension.
        assert!((f - (1.0f64 + 4.0 + 9.0).sqrt()).abs() < 1e-14);
    }

    #[test]
    fn apply_matches_matmul() {
        let b = CMat::from_rows(2, &[c(1.0, 0.0), c(2.0, 0.0), c(0.0, 1.0), c(1.0, 0.0)]);
        let v = vec![c(1.0, 1.0), c(2.0, 0.0)];
        let got = b.apply(&v);
        assert!((got[0] - (c(1.0, 1.0) + c(4.0, 0.0))).norm() < 1e-14);
        assert!((got[1] - (c(0.0, 1.0) * c(1.0, 1.0) + c(2.0, 0.0))).norm() < 1e-14);
    }
}
