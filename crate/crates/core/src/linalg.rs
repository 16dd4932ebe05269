//! Small dense complex matrices for period-matrix bookkeeping.

use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMatrix { rows, cols, data: vec![Complex64::new(0.0, 0.0); rows * cols] }
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> Complex64) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn from_real(m: &crate::intmat::IntMatrix) -> Self {
        Self::from_fn(m.rows(), m.cols(), |i, j| Complex64::new(m[(i, j)] as f64, 0.0))
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn conj(&self) -> Self {
        self.map(|z| z.conj())
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        CMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&z| f(z)).collect() }
    }

    pub fn re(&self) -> Self {
        self.map(|z| Complex64::new(z.re, 0.0))
    }

    pub fn im(&self) -> Self {
        self.map(|z| Complex64::new(z.im, 0.0))
    }

    pub fn scale(&self, k: f64) -> Self {
        self.map(|z| z * k)
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_re(&self) -> f64 {
        self.data.iter().map(|z| z.re.abs()).fold(0.0, f64::max)
    }

    pub fn max_abs_im(&self) -> f64 {
        self.data.iter().map(|z| z.im.abs()).fold(0.0, f64::max)
    }

    /// `max |a_ij - a_ji|`
    pub fn asymmetry(&self) -> f64 {
        (self - &self.transpose()).max_abs()
    }

    /// `[[a, b], [c, d]]`
    pub fn from_blocks(a: &Self, b: &Self, c: &Self, d: &Self) -> Self {
        let (r1, c1) = (a.rows, a.cols);
        Self::from_fn(a.rows + c.rows, a.cols + b.cols, |i, j| match (i < r1, j < c1) {
            (true, true) => a[(i, j)],
            (true, false) => b[(i, j - c1)],
            (false, true) => c[(i - r1, j)],
            (false, false) => d[(i - r1, j - c1)],
        })
    }

    pub fn to_rows(&self) -> Vec<Vec<Complex64>> {
        (0..self.rows).map(|i| (0..self.cols).map(|j| self[(i, j)]).collect()).collect()
    }

    /// Cholesky factor of the real part, symmetrized. `None` when the real
    /// part is not positive definite.
    pub fn real_cholesky(&self) -> Option<Vec<Vec<f64>>> {
        let n = self.rows;
        let a = |i: usize, j: usize| 0.5 * (self[(i, j)].re + self[(j, i)].re);
        let mut l = vec![vec![0.0; n]; n];
        for j in 0..n {
            let mut d = a(j, j);
            for k in 0..j {
                d -= l[j][k] * l[j][k];
            }
            if !(d > 0.0) {
                return None;
            }
            l[j][j] = d.sqrt();
            for i in j + 1..n {
                let mut s = a(i, j);
                for k in 0..j {
                    s -= l[i][k] * l[j][k];
                }
                l[i][j] = s / l[j][j];
            }
        }
        Some(l)
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.cols + j]
    }
}

impl Add for &CMatrix {
    type Output = CMatrix;
    fn add(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &CMatrix {
    type Output = CMatrix;
    fn sub(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Mul for &CMatrix {
    type Output = CMatrix;
    fn mul(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.cols, rhs.rows);
        CMatrix::from_fn(self.rows, rhs.cols, |i, j| (0..self.cols).map(|k| self[(i, k)] * rhs[(k, j)]).sum())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cholesky_detects_indefinite() {
        let c = |x: f64| Complex64::new(x, 0.0);
        let pd = CMatrix::from_fn(2, 2, |i, j| if i == j { c(2.0) } else { c(1.0) });
        assert!(pd.real_cholesky().is_some());
        let nd = CMatrix::from_fn(2, 2, |i, j| if i == j { c(1.0) } else { c(2.0) });
        assert!(nd.real_cholesky().is_none());
    }

    #[test]
    fn blocks_round_trip() {
        let a = CMatrix::from_fn(1, 1, |_, _| Complex64::new(1.0, 0.0));
        let b = a.scale(2.0);
        let c = a.scale(3.0);
        let d = a.scale(4.0);
        let m = CMatrix::from_blocks(&a, &b, &c, &d);
        assert_eq!(m[(1, 0)], Complex64::new(3.0, 0.0));
        assert_eq!(m[(0, 1)], Complex64::new(2.0, 0.0));
    }
}
