//! Direct sparse LU factorization for square complex systems.
//!
//! Rows are eliminated in Markowitz order: the pivot column is the active
//! column with the fewest entries, and within it the shortest row whose entry
//! passes a threshold test against the column maximum.

use std::collections::BTreeMap;

use num_complex::Complex64;

/// Relative threshold for accepting a pivot against the column maximum.
const PIVOT_THRESHOLD: f64 = 0.1;

#[derive(Debug, Clone, Default)]
pub struct SparseMatrix {
    n: usize,
    rows: Vec<BTreeMap<usize, Complex64>>,
}

impl SparseMatrix {
    pub fn new(n: usize) -> Self {
        SparseMatrix { n, rows: vec![BTreeMap::new(); n] }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Accumulates `value` into entry `(i, j)`.
    pub fn add(&mut self, i: usize, j: usize, value: Complex64) {
        *self.rows[i].entry(j).or_insert(Complex64::new(0.0, 0.0)) += value;
    }

    pub fn row(&self, i: usize) -> &BTreeMap<usize, Complex64> {
        &self.rows[i]
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(|r| r.len()).sum()
    }

    pub fn mul_vec(&self, x: &[Complex64]) -> Vec<Complex64> {
        self.rows.iter().map(|r| r.iter().map(|(&j, &a)| a * x[j]).sum()).collect()
    }

    /// Largest absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        self.rows.iter().map(|r| r.values().map(|a| a.norm()).sum::<f64>()).fold(0.0, f64::max)
    }

    /// The same matrix with rows listed in the order `perm`.
    pub fn permute_rows(&self, perm: &[usize]) -> SparseMatrix {
        SparseMatrix { n: self.n, rows: perm.iter().map(|&i| self.rows[i].clone()).collect() }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SingularMatrix {
    pub step: usize,
}

/// One elimination step: pivot row `row` with pivot in column `col`.
#[derive(Debug, Clone)]
struct Pivot {
    row: usize,
    col: usize,
    entries: Vec<(usize, Complex64)>,
    diag: Complex64,
    /// Rows updated by `row_i -= factor * row_pivot`.
    eliminated: Vec<(usize, Complex64)>,
}

#[derive(Debug, Clone)]
pub struct SparseLu {
    n: usize,
    pivots: Vec<Pivot>,
}

impl SparseLu {
    pub fn factor(a: &SparseMatrix) -> Result<SparseLu, SingularMatrix> {
        let n = a.n;
        let mut rows: Vec<BTreeMap<usize, Complex64>> = a.rows.clone();
        for r in rows.iter_mut() {
            r.retain(|_, v| *v != Complex64::new(0.0, 0.0));
        }
        let mut col_rows: Vec<BTreeMap<usize, ()>> = vec![BTreeMap::new(); n];
        for (i, r) in rows.iter().enumerate() {
            for &j in r.keys() {
                col_rows[j].insert(i, ());
            }
        }
        let scale = a.norm_inf().max(f64::MIN_POSITIVE);
        let mut row_done = vec![false; n];
        let mut col_done = vec![false; n];
        let mut pivots = Vec::with_capacity(n);

        for step in 0..n {
            let col = (0..n)
                .filter(|&j| !col_done[j])
                .min_by_key(|&j| (col_rows[j].len(), j))
                .expect("an active column remains");
            let cmax = col_rows[col].keys().map(|&i| rows[i][&col].norm()).fold(0.0, f64::max);
            if cmax <= 1e-14 * scale {
                return Err(SingularMatrix { step });
            }
            let row = col_rows[col]
                .keys()
                .copied()
                .filter(|&i| rows[i][&col].norm() >= PIVOT_THRESHOLD * cmax)
                .min_by_key(|&i| (rows[i].len(), i))
                .expect("column maximum passes the threshold");
            let prow = std::mem::take(&mut rows[row]);
            let diag = prow[&col];
            row_done[row] = true;
            col_done[col] = true;
            for &j in prow.keys() {
                col_rows[j].remove(&row);
            }
            let targets: Vec<usize> = col_rows[col].keys().copied().collect();
            let mut eliminated = Vec::with_capacity(targets.len());
            for i in targets {
                let factor = rows[i][&col] / diag;
                for (&j, &v) in &prow {
                    if j == col {
                        continue;
                    }
                    let entry = rows[i].entry(j).or_insert(Complex64::new(0.0, 0.0));
                    *entry -= factor * v;
                    col_rows[j].insert(i, ());
                }
                rows[i].remove(&col);
                col_rows[col].remove(&i);
                eliminated.push((i, factor));
            }
            let entries = prow.into_iter().filter(|&(j, _)| j != col).collect();
            pivots.push(Pivot { row, col, entries, diag, eliminated });
        }
        debug_assert!(row_done.iter().all(|&d| d));
        Ok(SparseLu { n, pivots })
    }

    pub fn solve(&self, b: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(b.len(), self.n);
        let mut y = b.to_vec();
        for p in &self.pivots {
            let yr = y[p.row];
            for &(i, factor) in &p.eliminated {
                y[i] -= factor * yr;
            }
        }
        let mut x = vec![Complex64::new(0.0, 0.0); self.n];
        for p in self.pivots.iter().rev() {
            let mut acc = y[p.row];
            for &(j, v) in &p.entries {
                acc -= v * x[j];
            }
            x[p.col] = acc / p.diag;
        }
        x
    }

    /// Number of stored factor entries, a rough fill-in measure.
    pub fn factor_nnz(&self) -> usize {
        self.pivots.iter().map(|p| p.entries.len() + p.eliminated.len() + 1).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Dense Gaussian elimination with partial pivoting.
    fn dense_solve(a: &[Vec<Complex64>], b: &[Complex64]) -> Vec<Complex64> {
        let n = b.len();
        let mut m: Vec<Vec<Complex64>> =
            a.iter().zip(b).map(|(r, &bi)| r.iter().copied().chain([bi]).collect()).collect();
        for k in 0..n {
            let p = (k..n).max_by(|&i, &j| m[i][k].norm().total_cmp(&m[j][k].norm())).unwrap();
            m.swap(k, p);
            for i in k + 1..n {
                let f = m[i][k] / m[k][k];
                for j in k..=n {
                    let v = m[k][j];
                    m[i][j] -= f * v;
                }
            }
        }
        let mut x = vec![Complex64::new(0.0, 0.0); n];
        for k in (0..n).rev() {
            let s: Complex64 = (k + 1..n).map(|j| m[k][j] * x[j]).sum();
            x[k] = (m[k][n] - s) / m[k][k];
        }
        x
    }

    #[test]
    fn matches_dense_solver_on_random_sparse_systems() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for trial in 0..20 {
            let n = 5 + trial * 3;
            let mut dense = vec![vec![Complex64::new(0.0, 0.0); n]; n];
            let mut sp = SparseMatrix::new(n);
            for i in 0..n {
                let d = Complex64::new(rng.gen_range(1.0..3.0), rng.gen_range(-1.0..1.0));
                dense[i][i] += d;
                sp.add(i, i, d);
                for _ in 0..3 {
                    let j = rng.gen_range(0..n);
                    let v = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                    dense[i][j] += v;
                    sp.add(i, j, v);
                }
            }
            // Shuffle rows so the diagonal is not the natural pivot.
            let mut perm: Vec<usize> = (0..n).collect();
            perm.rotate_left(trial % n);
            let sp = sp.permute_rows(&perm);
            let dense: Vec<_> = perm.iter().map(|&i| dense[i].clone()).collect();
            let b: Vec<Complex64> =
                (0..n).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
            let x = SparseLu::factor(&sp).unwrap().solve(&b);
            let y = dense_solve(&dense, &b);
            for (xi, yi) in x.iter().zip(&y) {
                assert!((xi - yi).norm() < 1e-9 * (1.0 + yi.norm()), "trial {trial}");
            }
        }
    }

    #[test]
    fn detects_singular_matrix() {
        let mut sp = SparseMatrix::new(3);
        let one = Complex64::new(1.0, 0.0);
        sp.add(0, 0, one);
        sp.add(0, 1, one);
        sp.add(1, 0, 2.0 * one);
        sp.add(1, 1, 2.0 * one);
        sp.add(2, 2, one);
        assert!(SparseLu::factor(&sp).is_err());
    }
}
