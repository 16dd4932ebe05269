//! Symmetric bilinear forms over `Z/2`.
//!
//! Every symmetric matrix over `Z/2` is congruent to exactly one of `I_r + 0`
//! (some diagonal entry nonzero) or `G_m + 0` (zero diagonal), where `G_m` is
//! the block sum of `m` copies of `[[0, 1], [1, 0]]`. The reduction first
//! splits off `1 x 1` blocks at nonzero diagonal entries and `G` blocks at
//! nonzero off-diagonal pairs, then trades `(1) + G` for `I_3`.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::intmat::IntMatrix;

/// Largest supported dimension (rows are packed into `u64`).
pub const MAX_DIM: usize = 64;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum Z2Error {
    #[error("matrix is not symmetric")]
    NotSymmetric,
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("transformation matrix is singular over Z/2")]
    SingularP,
    #[error("dimension {0} exceeds the supported maximum of 64")]
    TooLarge(usize),
    #[error("matrix is not square")]
    NotSquare,
    #[error("cannot parse matrix: {0}")]
    Parse(String),
}

/// Square matrix over `Z/2`; bit `j` of `rows[i]` is entry `(i, j)`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Z2Matrix {
    n: usize,
    rows: Vec<u64>,
}

impl fmt::Debug for Z2Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> =
            (0..self.n).map(|i| (0..self.n).map(|j| if self.get(i, j) { '1' } else { '0' }).collect()).collect();
        write!(f, "Z2[{}]", rows.join(";"))
    }
}

impl Z2Matrix {
    pub fn zeros(n: usize) -> Result<Self, Z2Error> {
        if n > MAX_DIM {
            return Err(Z2Error::TooLarge(n));
        }
        Ok(Z2Matrix { n, rows: vec![0; n] })
    }

    pub fn identity(n: usize) -> Result<Self, Z2Error> {
        let mut m = Self::zeros(n)?;
        for i in 0..n {
            m.set(i, i, true);
        }
        Ok(m)
    }

    /// Entries are reduced modulo 2.
    pub fn from_rows(rows: &[Vec<i64>]) -> Result<Self, Z2Error> {
        let n = rows.len();
        let mut m = Self::zeros(n)?;
        for (i, r) in rows.iter().enumerate() {
            if r.len() != n {
                return Err(Z2Error::NotSquare);
            }
            for (j, &x) in r.iter().enumerate() {
                m.set(i, j, x.rem_euclid(2) == 1);
            }
        }
        Ok(m)
    }

    pub fn from_int(m: &IntMatrix) -> Result<Self, Z2Error> {
        if m.rows() != m.cols() {
            return Err(Z2Error::NotSquare);
        }
        Self::from_rows(&m.to_rows())
    }

    pub fn from_bits(n: usize, rows: Vec<u64>) -> Result<Self, Z2Error> {
        if n > MAX_DIM {
            return Err(Z2Error::TooLarge(n));
        }
        if rows.len() != n {
            return Err(Z2Error::NotSquare);
        }
        let mask = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
        if rows.iter().any(|&r| r & !mask != 0) {
            return Err(Z2Error::NotSquare);
        }
        Ok(Z2Matrix { n, rows })
    }

    /// Parses `"1,0;0,1"` or a JSON array of rows.
    pub fn parse(s: &str) -> Result<Self, Z2Error> {
        let s = s.trim();
        let rows: Vec<Vec<i64>> = if s.starts_with('[') {
            serde_json::from_str(s).map_err(|e| Z2Error::Parse(e.to_string()))?
        } else if s.is_empty() {
            Vec::new()
        } else {
            s.split(';')
                .map(|row| {
                    row.split(',')
                        .map(|x| x.trim().parse::<i64>().map_err(|e| Z2Error::Parse(format!("{x:?}: {e}"))))
                        .collect()
                })
                .collect::<Result<_, _>>()?
        };
        if rows.iter().flatten().any(|&x| x != 0 && x != 1) {
            return Err(Z2Error::Parse("entries must be 0 or 1".into()));
        }
        Self::from_rows(&rows)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.rows[i] >> j & 1 == 1
    }

    pub fn set(&mut self, i: usize, j: usize, v: bool) {
        if v {
            self.rows[i] |= 1 << j;
        } else {
            self.rows[i] &= !(1 << j);
        }
    }

    pub fn bits(&self) -> &[u64] {
        &self.rows
    }

    pub fn to_rows(&self) -> Vec<Vec<u8>> {
        (0..self.n).map(|i| (0..self.n).map(|j| self.get(i, j) as u8).collect()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Z2Matrix { n: self.n, rows: vec![0; self.n] };
        for i in 0..self.n {
            for j in 0..self.n {
                if self.get(i, j) {
                    t.set(j, i, true);
                }
            }
        }
        t
    }

    pub fn is_symmetric(&self) -> bool {
        *self == self.transpose()
    }

    pub fn mul(&self, other: &Self) -> Result<Self, Z2Error> {
        if self.n != other.n {
            return Err(Z2Error::DimensionMismatch(self.n, other.n));
        }
        let rows = self
            .rows
            .iter()
            .map(|&r| (0..self.n).filter(|&k| r >> k & 1 == 1).fold(0u64, |acc, k| acc ^ other.rows[k]))
            .collect();
        Ok(Z2Matrix { n: self.n, rows })
    }

    /// Rank by Gaussian elimination.
    pub fn rank(&self) -> usize {
        let mut rows = self.rows.clone();
        let mut rank = 0;
        for col in 0..self.n {
            let Some(p) = (rank..self.n).find(|&i| rows[i] >> col & 1 == 1) else {
                continue;
            };
            rows.swap(rank, p);
            let pivot = rows[rank];
            for (i, r) in rows.iter_mut().enumerate() {
                if i != rank && *r >> col & 1 == 1 {
                    *r ^= pivot;
                }
            }
            rank += 1;
        }
        rank
    }

    pub fn is_invertible(&self) -> bool {
        self.rank() == self.n
    }

    pub fn diagonal_is_zero(&self) -> bool {
        (0..self.n).all(|i| !self.get(i, i))
    }

    fn swap(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        self.rows.swap(i, j);
        for r in self.rows.iter_mut() {
            let (bi, bj) = (*r >> i & 1, *r >> j & 1);
            if bi != bj {
                *r ^= (1 << i) | (1 << j);
            }
        }
    }

    /// Row and column `dst += src`.
    fn add(&mut self, src: usize, dst: usize) {
        self.rows[dst] ^= self.rows[src];
        for r in self.rows.iter_mut() {
            if *r >> src & 1 == 1 {
                *r ^= 1 << dst;
            }
        }
    }
}

/// `P A P^T`.
pub fn congruence_apply(p: &Z2Matrix, a: &Z2Matrix) -> Result<Z2Matrix, Z2Error> {
    if p.n != a.n {
        return Err(Z2Error::DimensionMismatch(p.n, a.n));
    }
    if !p.is_invertible() {
        return Err(Z2Error::SingularP);
    }
    p.mul(a)?.mul(&p.transpose())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalForm {
    /// Invertible, with `p * a * p^T = canonical`.
    pub p: Z2Matrix,
    pub canonical: Z2Matrix,
}

/// Congruence invariants: rank and whether the diagonal can be nonzero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Z2Class {
    pub rank: usize,
    /// 1 when the canonical form is `I_r + 0` with `r > 0`, else 0.
    pub diag: u8,
}

/// Tracks `b = p a p^T` under simultaneous row and column operations.
struct Reduction {
    b: Z2Matrix,
    p: Z2Matrix,
}

impl Reduction {
    fn swap(&mut self, i: usize, j: usize) {
        self.b.swap(i, j);
        self.p.rows.swap(i, j);
    }

    fn add(&mut self, src: usize, dst: usize) {
        self.b.add(src, dst);
        self.p.rows[dst] ^= self.p.rows[src];
    }

    /// Replaces `(1) + G` on indices `i, i+1, i+2` by `I_3`.
    fn merge_one_and_g(&mut self, i: usize) {
        let mut e = Z2Matrix::identity(self.b.n).expect("dimension already checked");
        let block = [[1, 1, 0], [1, 0, 1], [1, 1, 1]];
        for r in 0..3 {
            for c in 0..3 {
                e.set(i + r, i + c, block[r][c] == 1);
            }
        }
        self.b = e.mul(&self.b).unwrap().mul(&e.transpose()).unwrap();
        self.p = e.mul(&self.p).unwrap();
    }
}

pub fn normal_form(a: &Z2Matrix) -> Result<NormalForm, Z2Error> {
    if !a.is_symmetric() {
        return Err(Z2Error::NotSymmetric);
    }
    let n = a.n;
    let mut red = Reduction { b: a.clone(), p: Z2Matrix::identity(n)? };
    let mut t = 0;
    let mut ones = 0;
    let mut pairs = 0;
    while t < n {
        if let Some(i) = (t..n).find(|&i| red.b.get(i, i)) {
            red.swap(i, t);
            for j in t + 1..n {
                if red.b.get(t, j) {
                    red.add(t, j);
                }
            }
            ones += 1;
            t += 1;
            continue;
        }
        let Some((i, j)) = (t..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).find(|&(i, j)| red.b.get(i, j)) else {
            break;
        };
        // j > i >= t, so the first swap leaves position j alone.
        red.swap(i, t);
        red.swap(j, t + 1);
        for k in t + 2..n {
            if red.b.get(k, t) {
                red.add(t + 1, k);
            }
            if red.b.get(k, t + 1) {
                red.add(t, k);
            }
        }
        pairs += 1;
        t += 2;
    }
    // I_ones + G_pairs + 0: absorb every G into the identity block if any.
    if ones > 0 {
        for q in 0..pairs {
            red.merge_one_and_g(ones - 1 + 2 * q);
        }
    }
    debug_assert_eq!(red.p.mul(a).unwrap().mul(&red.p.transpose()).unwrap(), red.b);
    Ok(NormalForm { p: red.p, canonical: red.b })
}

pub fn classify(a: &Z2Matrix) -> Result<Z2Class, Z2Error> {
    let nf = normal_form(a)?;
    Ok(Z2Class { rank: a.rank(), diag: u8::from(!nf.canonical.diagonal_is_zero()) })
}

/// The canonical matrix with the given invariants.
pub fn canonical_matrix(n: usize, class: Z2Class) -> Result<Z2Matrix, Z2Error> {
    let mut m = Z2Matrix::zeros(n)?;
    if class.diag == 1 {
        for i in 0..class.rank {
            m.set(i, i, true);
        }
    } else {
        for q in 0..class.rank / 2 {
            m.set(2 * q, 2 * q + 1, true);
            m.set(2 * q + 1, 2 * q, true);
        }
    }
    Ok(m)
}
