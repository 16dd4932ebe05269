//! Small dense integer matrices and unimodular reductions over `Z`.

use std::fmt;
use std::ops::{Index, IndexMut, Mul};

use serde::{Deserialize, Serialize};

#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(from = "Vec<Vec<i64>>", into = "Vec<Vec<i64>>")]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<i64>,
}

impl From<Vec<Vec<i64>>> for IntMatrix {
    fn from(rows: Vec<Vec<i64>>) -> Self {
        IntMatrix::from_rows(&rows)
    }
}

impl From<IntMatrix> for Vec<Vec<i64>> {
    fn from(m: IntMatrix) -> Self {
        m.to_rows()
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.to_rows())
    }
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1;
        }
        m
    }

    /// `J = [[0, I], [-I, 0]]` of size `2g`.
    pub fn standard_symplectic(g: usize) -> Self {
        let mut m = Self::zeros(2 * g, 2 * g);
        for i in 0..g {
            m[(i, g + i)] = 1;
            m[(g + i, i)] = -1;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        assert!(rows.iter().all(|row| row.len() == c), "ragged integer matrix");
        IntMatrix { rows: r, cols: c, data: rows.iter().flatten().copied().collect() }
    }

    pub fn from_columns(cols: &[Vec<i64>]) -> Self {
        Self::from_rows(cols).transpose()
    }

    pub fn to_rows(&self) -> Vec<Vec<i64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[i64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<i64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn neg(&self) -> Self {
        IntMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|x| -x).collect() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect();
        IntMatrix { rows: self.rows, cols: self.cols, data }
    }

    pub fn mul_vec(&self, v: &[i64]) -> Vec<i64> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows).map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum()).collect()
    }

    /// Submatrix of rows `r0..r1`, columns `c0..c1`.
    pub fn block(&self, r0: usize, r1: usize, c0: usize, c1: usize) -> Self {
        let mut b = Self::zeros(r1 - r0, c1 - c0);
        for i in r0..r1 {
            for j in c0..c1 {
                b[(i - r0, j - c0)] = self[(i, j)];
            }
        }
        b
    }

    pub fn is_symmetric(&self) -> bool {
        self.rows == self.cols && (0..self.rows).all(|i| (0..i).all(|j| self[(i, j)] == self[(j, i)]))
    }

    /// Determinant by fraction-free (Bareiss) elimination.
    pub fn determinant(&self) -> i64 {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        if n == 0 {
            return 1;
        }
        let mut a: Vec<Vec<i128>> =
            (0..n).map(|i| self.row(i).iter().map(|&x| x as i128).collect()).collect();
        let mut sign = 1i128;
        let mut prev = 1i128;
        for k in 0..n - 1 {
            if a[k][k] == 0 {
                match (k + 1..n).find(|&i| a[i][k] != 0) {
                    Some(i) => {
                        a.swap(i, k);
                        sign = -sign;
                    }
                    None => return 0,
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
                }
            }
            prev = a[k][k];
        }
        (sign * a[n - 1][n - 1]) as i64
    }

    fn swap_rows(&mut self, i: usize, j: usize) {
        for c in 0..self.cols {
            self.data.swap(i * self.cols + c, j * self.cols + c);
        }
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        for r in 0..self.rows {
            self.data.swap(r * self.cols + i, r * self.cols + j);
        }
    }

    /// `row[i] += k * row[j]`
    fn add_row(&mut self, i: usize, j: usize, k: i64) {
        for c in 0..self.cols {
            let v = self[(j, c)];
            self[(i, c)] += k * v;
        }
    }

    /// `col[i] += k * col[j]`
    fn add_col(&mut self, i: usize, j: usize, k: i64) {
        for r in 0..self.rows {
            let v = self[(r, j)];
            self[(r, i)] += k * v;
        }
    }
}

impl Index<(usize, usize)> for IntMatrix {
    type Output = i64;
    fn index(&self, (i, j): (usize, usize)) -> &i64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut i64 {
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &IntMatrix {
    type Output = IntMatrix;
    fn mul(self, rhs: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, rhs.rows, "dimension mismatch in integer product");
        let mut out = IntMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0 {
                    continue;
                }
                for j in 0..rhs.cols {
                    out[(i, j)] += a * rhs[(k, j)];
                }
            }
        }
        out
    }
}

/// `u * a * v = d` with `d` diagonal and `u`, `v` unimodular.
#[derive(Debug, Clone)]
pub struct Diagonalization {
    pub d: IntMatrix,
    pub u: IntMatrix,
    pub u_inv: IntMatrix,
    pub v: IntMatrix,
    pub v_inv: IntMatrix,
}

impl Diagonalization {
    pub fn rank(&self) -> usize {
        (0..self.d.rows.min(self.d.cols)).filter(|&i| self.d[(i, i)] != 0).count()
    }
}

/// Diagonalizes an integer matrix by unimodular row and column operations.
/// Nonzero diagonal entries come first; they are not forced into a
/// divisibility chain.
pub fn diagonalize(a: &IntMatrix) -> Diagonalization {
    let (m, n) = (a.rows, a.cols);
    let mut d = a.clone();
    let mut u = IntMatrix::identity(m);
    let mut u_inv = IntMatrix::identity(m);
    let mut v = IntMatrix::identity(n);
    let mut v_inv = IntMatrix::identity(n);

    // Row op E = I + k e_i e_j^T: u <- E u, u_inv <- u_inv E^{-1}.
    let row_add = |d: &mut IntMatrix, u: &mut IntMatrix, u_inv: &mut IntMatrix, i, j, k| {
        d.add_row(i, j, k);
        u.add_row(i, j, k);
        u_inv.add_col(j, i, -k);
    };
    // Column op F = I + k e_j e_i^T (col i += k col j): v <- v F, v_inv <- F^{-1} v_inv.
    let col_add = |d: &mut IntMatrix, v: &mut IntMatrix, v_inv: &mut IntMatrix, i, j, k| {
        d.add_col(i, j, k);
        v.add_col(i, j, k);
        v_inv.add_row(j, i, -k);
    };

    for t in 0..m.min(n) {
        loop {
            // Smallest nonzero entry of the trailing block becomes the pivot.
            let mut best: Option<(usize, usize)> = None;
            for i in t..m {
                for j in t..n {
                    let x = d[(i, j)];
                    if x != 0 && best.is_none_or(|(bi, bj)| x.abs() < d[(bi, bj)].abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else {
                return Diagonalization { d, u, u_inv, v, v_inv };
            };
            if pi != t {
                d.swap_rows(pi, t);
                u.swap_rows(pi, t);
                u_inv.swap_cols(pi, t);
            }
            if pj != t {
                d.swap_cols(pj, t);
                v.swap_cols(pj, t);
                v_inv.swap_rows(pj, t);
            }
            let p = d[(t, t)];
            let mut clean = true;
            for i in t + 1..m {
                let q = d[(i, t)].div_euclid(p);
                if q != 0 {
                    row_add(&mut d, &mut u, &mut u_inv, i, t, -q);
                }
                clean &= d[(i, t)] == 0;
            }
            for j in t + 1..n {
                let q = d[(t, j)].div_euclid(p);
                if q != 0 {
                    col_add(&mut d, &mut v, &mut v_inv, j, t, -q);
                }
                clean &= d[(t, j)] == 0;
            }
            if clean {
                break;
            }
        }
    }
    Diagonalization { d, u, u_inv, v, v_inv }
}

/// Inverse of a unimodular matrix, or `None` if the determinant is not `±1`.
pub fn unimodular_inverse(a: &IntMatrix) -> Option<IntMatrix> {
    if a.rows != a.cols {
        return None;
    }
    let dz = diagonalize(a);
    let n = a.rows;
    let mut dinv = IntMatrix::zeros(n, n);
    for i in 0..n {
        match dz.d[(i, i)] {
            1 => dinv[(i, i)] = 1,
            -1 => dinv[(i, i)] = -1,
            _ => return None,
        }
    }
    // a = u^{-1} d v^{-1}  =>  a^{-1} = v d^{-1} u
    Some(&(&dz.v * &dinv) * &dz.u)
}

/// Normal form of an integral involution: `p^{-1} m p = [[I_d, h], [0, -I]]`
/// with every entry of `h` in `{0, 1}`. The first `d` columns of `p` span the
/// fixed lattice `ker(I - m)`, which is a direct summand.
#[derive(Debug, Clone)]
pub struct InvolutionNormalForm {
    pub p: IntMatrix,
    pub p_inv: IntMatrix,
    pub d: usize,
    pub h: IntMatrix,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FreeModuleError {
    #[error("matrix is not square")]
    NotSquare,
    #[error("matrix does not square to the identity")]
    NotInvolution,
    #[error("fixed lattice has rank {found}, expected {expected}")]
    FixedRankNotG { found: usize, expected: usize },
}

pub fn freemodule_reduce(
    m: &IntMatrix,
    expected_fixed_rank: Option<usize>,
) -> Result<InvolutionNormalForm, FreeModuleError> {
    if m.rows != m.cols {
        return Err(FreeModuleError::NotSquare);
    }
    let n = m.rows;
    if (m * m) != IntMatrix::identity(n) {
        return Err(FreeModuleError::NotInvolution);
    }
    let dz = diagonalize(&IntMatrix::identity(n).sub(m));
    let r = dz.rank();
    let d = n - r;
    if let Some(expected) = expected_fixed_rank {
        if d != expected {
            return Err(FreeModuleError::FixedRankNotG { found: d, expected });
        }
    }
    // Reorder v so kernel columns come first.
    let order: Vec<usize> = (r..n).chain(0..r).collect();
    let mut p = IntMatrix::zeros(n, n);
    let mut p_inv = IntMatrix::zeros(n, n);
    for (new, &old) in order.iter().enumerate() {
        for i in 0..n {
            p[(i, new)] = dz.v[(i, old)];
            p_inv[(new, i)] = dz.v_inv[(old, i)];
        }
    }
    let conj = &(&p_inv * m) * &p;
    let h = conj.block(0, d, d, n);
    // Shift complement vectors by -floor(h/2) * kernel vectors.
    let mut shift = IntMatrix::identity(n);
    let mut shift_inv = IntMatrix::identity(n);
    for i in 0..d {
        for j in 0..r {
            let b = h[(i, j)].div_euclid(2);
            shift[(i, d + j)] = -b;
            shift_inv[(i, d + j)] = b;
        }
    }
    let p = &p * &shift;
    let p_inv = &shift_inv * &p_inv;
    let reduced = &(&p_inv * m) * &p;
    let h = reduced.block(0, d, d, n);
    debug_assert!(h.data.iter().all(|&x| x == 0 || x == 1));
    Ok(InvolutionNormalForm { p, p_inv, d, h })
}
