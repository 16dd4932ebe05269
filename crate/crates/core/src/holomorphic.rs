//! Discrete holomorphic forms and period matrices.
//!
//! A type-diamond form is holomorphic when it is closed and `t_f = i rho_f s_f`
//! on every face. Eliminating `t`, the unknowns are the `s_f`. Closedness at
//! all white vertices but the lowest-numbered one, at all black vertices but
//! the lowest-numbered one, and the black and white `a`-periods give a square
//! system of size `F`, which is factored once and reused for every right-hand
//! side.
//!
//! With `w^B_k` the form whose black `a`-periods are `delta_jk` and whose white
//! `a`-periods vanish, and `w^W_k` the mirror image,
//!
//! ```text
//! P^BB_jk = black period of w^B_k along b_j    P^WB_jk = white period of w^B_k along b_j
//! P^BW_jk = black period of w^W_k along b_j    P^WW_jk = white period of w^W_k along b_j
//! ```
//!
//! The complete period matrix is `[[P^BW, P^BB], [P^WW, P^WB]]` and the
//! averaged one is half the sum of the four blocks.

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::homology::SymplecticBasis;
use crate::intmat::IntMatrix;
use crate::linalg::CMatrix;
use crate::medial::{is_black_type, medial_face_corner, DiamondForm, MedialCycle};
use crate::sparse::{SparseLu, SparseMatrix};
use crate::surface::{Color, QuadSurface};

/// Default relative residual tolerance for the linear solve.
pub const SOLVER_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum SolverError {
    #[error("linear system is singular (elimination step {0})")]
    SolveFailed(usize),
    #[error("relative residual {residual:e} exceeds tolerance {tol:e}")]
    ResidualTooLarge { residual: f64, tol: f64 },
    #[error("expected {expected} period values, got {found}")]
    WrongPeriodCount { expected: usize, found: usize },
    #[error("cycles belong to a different surface")]
    CyclesFromDifferentSurfaces,
}

/// Equation ordering used when assembling the system.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EquationOrder {
    Natural,
    Reversed,
}

/// Coefficients of one equation in the unknowns `s_f`.
type Row = Vec<(usize, Complex64)>;

pub struct HolomorphicSystem<'a> {
    surface: &'a QuadSurface,
    vertex_rows: Vec<Row>,
    period_rows: Vec<Row>,
    /// Row `r` of the assembled matrix is equation `order[r]` of
    /// `vertex_rows ++ period_rows`.
    order: Vec<usize>,
    lu: SparseLu,
    genus: usize,
}

fn vertex_row(s: &QuadSurface, v: usize) -> Row {
    s.corners_of(v)
        .iter()
        .map(|&(f, c)| {
            let sign = if matches!(c, 1 | 2) { -1.0 } else { 1.0 };
            let coeff = if is_black_type(c) { Complex64::new(1.0, 0.0) } else { Complex64::i() * s.rho(f) };
            (f, sign * coeff)
        })
        .collect()
}

fn period_row(s: &QuadSurface, cycle: &MedialCycle, black: bool) -> Row {
    let mut acc = std::collections::BTreeMap::new();
    for st in cycle.steps() {
        let (f, c) = medial_face_corner(st.edge);
        if is_black_type(c) != black {
            continue;
        }
        let sign = if st.forward { 2.0 } else { -2.0 };
        let coeff = if black { Complex64::new(1.0, 0.0) } else { Complex64::i() * s.rho(f) };
        *acc.entry(f).or_insert(Complex64::new(0.0, 0.0)) += sign * coeff;
    }
    acc.into_iter().collect()
}

impl<'a> HolomorphicSystem<'a> {
    pub fn new(s: &'a QuadSurface, a_cycles: &[MedialCycle], order: EquationOrder) -> Result<Self, SolverError> {
        if a_cycles.iter().any(|c| !c.belongs_to(s)) {
            return Err(SolverError::CyclesFromDifferentSurfaces);
        }
        let genus = s.genus();
        if a_cycles.len() != genus {
            return Err(SolverError::WrongPeriodCount { expected: genus, found: a_cycles.len() });
        }
        let skip_white = s.lowest_vertex_of_color(Color::White);
        let skip_black = s.lowest_vertex_of_color(Color::Black);
        let whites = (0..s.num_vertices()).filter(|&v| s.color(v) == Color::White);
        let blacks = (0..s.num_vertices()).filter(|&v| s.color(v) == Color::Black);
        let vertex_rows: Vec<Row> = whites.chain(blacks).map(|v| vertex_row(s, v)).collect();
        let vertex_ids: Vec<usize> = (0..s.num_vertices())
            .filter(|&v| s.color(v) == Color::White)
            .chain((0..s.num_vertices()).filter(|&v| s.color(v) == Color::Black))
            .collect();
        let mut period_rows = Vec::with_capacity(2 * genus);
        for c in a_cycles {
            period_rows.push(period_row(s, c, true));
            period_rows.push(period_row(s, c, false));
        }
        let nv = vertex_rows.len();
        let mut used: Vec<usize> = (0..nv)
            .filter(|&r| Some(vertex_ids[r]) != skip_white && Some(vertex_ids[r]) != skip_black)
            .chain(nv..nv + period_rows.len())
            .collect();
        if order == EquationOrder::Reversed {
            used.reverse();
        }
        let n = s.num_faces();
        assert_eq!(used.len(), n, "equation count equals face count on a closed surface");

        let mut m = SparseMatrix::new(n);
        for (r, &eq) in used.iter().enumerate() {
            let row = if eq < nv { &vertex_rows[eq] } else { &period_rows[eq - nv] };
            for &(f, v) in row {
                m.add(r, f, v);
            }
        }
        let lu = SparseLu::factor(&m).map_err(|e| SolverError::SolveFailed(e.step))?;
        Ok(HolomorphicSystem { surface: s, vertex_rows, period_rows, order: used, lu, genus })
    }

    /// Holomorphic form with prescribed black and white `a`-periods.
    pub fn solve(&self, black: &[Complex64], white: &[Complex64], tol: f64) -> Result<DiamondForm, SolverError> {
        if black.len() != self.genus || white.len() != self.genus {
            return Err(SolverError::WrongPeriodCount {
                expected: self.genus,
                found: black.len().min(white.len()),
            });
        }
        let nv = self.vertex_rows.len();
        let mut targets = vec![Complex64::new(0.0, 0.0); nv + 2 * self.genus];
        for k in 0..self.genus {
            targets[nv + 2 * k] = black[k];
            targets[nv + 2 * k + 1] = white[k];
        }
        let rhs: Vec<Complex64> = self.order.iter().map(|&eq| targets[eq]).collect();
        let x = self.lu.solve(&rhs);

        // Residual over every equation, including the two dropped ones.
        let xnorm = x.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let bnorm = targets.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let mut worst = 0.0f64;
        let mut anorm = 0.0f64;
        for (eq, row) in self.vertex_rows.iter().chain(&self.period_rows).enumerate() {
            let val: Complex64 = row.iter().map(|&(f, a)| a * x[f]).sum();
            worst = worst.max((val - targets[eq]).norm());
            anorm = anorm.max(row.iter().map(|(_, a)| a.norm()).sum());
        }
        let residual = worst / (anorm * xnorm + bnorm).max(f64::MIN_POSITIVE);
        if !(residual <= tol) {
            return Err(SolverError::ResidualTooLarge { residual, tol });
        }
        Ok(DiamondForm::from_black(self.surface, x))
    }
}

/// One-shot solve for a holomorphic form with given `a`-periods.
pub fn solve_holomorphic(
    s: &QuadSurface,
    a_cycles: &[MedialCycle],
    black: &[Complex64],
    white: &[Complex64],
    tol: f64,
) -> Result<DiamondForm, SolverError> {
    HolomorphicSystem::new(s, a_cycles, EquationOrder::Natural)?.solve(black, white, tol)
}

#[derive(Debug, Clone)]
pub struct DualBasis {
    pub black: Vec<DiamondForm>,
    pub white: Vec<DiamondForm>,
}

pub fn dual_basis(s: &QuadSurface, a_cycles: &[MedialCycle], order: EquationOrder, tol: f64) -> Result<DualBasis, SolverError> {
    let system = HolomorphicSystem::new(s, a_cycles, order)?;
    let g = a_cycles.len();
    let unit = |k: usize| -> Vec<Complex64> {
        (0..g).map(|j| Complex64::new(if j == k { 1.0 } else { 0.0 }, 0.0)).collect()
    };
    let zero = vec![Complex64::new(0.0, 0.0); g];
    let mut black = Vec::with_capacity(g);
    let mut white = Vec::with_capacity(g);
    for k in 0..g {
        black.push(system.solve(&unit(k), &zero, tol)?);
        white.push(system.solve(&zero, &unit(k), tol)?);
    }
    Ok(DualBasis { black, white })
}

#[derive(Debug, Clone, Serialize)]
pub struct PeriodMatrices {
    pub bb: CMatrix,
    pub wb: CMatrix,
    pub bw: CMatrix,
    pub ww: CMatrix,
}

impl PeriodMatrices {
    pub fn genus(&self) -> usize {
        self.bb.rows()
    }

    pub fn complete(&self) -> CMatrix {
        CMatrix::from_blocks(&self.bw, &self.bb, &self.ww, &self.wb)
    }

    pub fn averaged(&self) -> CMatrix {
        (&(&self.bb + &self.wb) + &(&self.bw + &self.ww)).scale(0.5)
    }
}

pub fn period_matrices_from_dual(s: &QuadSurface, basis: &SymplecticBasis, dual: &DualBasis) -> PeriodMatrices {
    let _ = s;
    let g = basis.genus();
    let mut bb = CMatrix::zeros(g, g);
    let mut wb = CMatrix::zeros(g, g);
    let mut bw = CMatrix::zeros(g, g);
    let mut ww = CMatrix::zeros(g, g);
    for j in 0..g {
        for k in 0..g {
            let pb = dual.black[k].integrate(&basis.b[j]);
            let pw = dual.white[k].integrate(&basis.b[j]);
            bb[(j, k)] = pb.black;
            wb[(j, k)] = pb.white;
            bw[(j, k)] = pw.black;
            ww[(j, k)] = pw.white;
        }
    }
    PeriodMatrices { bb, wb, bw, ww }
}

pub fn period_matrices(s: &QuadSurface, basis: &SymplecticBasis, tol: f64) -> Result<PeriodMatrices, SolverError> {
    let dual = dual_basis(s, &basis.a, EquationOrder::Natural, tol)?;
    Ok(period_matrices_from_dual(s, basis, &dual))
}

/// Deviations of the period blocks from the structure forced by an
/// involution with mixing matrix `h`. All entries should vanish.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct RealStructureDefects {
    /// Type 1: `|2 Re P^BB - h|`, type 2: `|P^BB + conj(P^WW) - h|`.
    pub diagonal_blocks: f64,
    /// Type 1: `max(|2 Re P^WW - h|, ...)`, type 2: zero (covered above).
    pub diagonal_blocks_white: f64,
    /// Type 1: `max(|Re P^WB|, |Re P^BW|)`, type 2: `|P^WB + conj(P^BW)|`.
    pub off_diagonal_blocks: f64,
    /// `|Re P - h / 2|` for the averaged matrix.
    pub averaged: f64,
}

pub fn real_structure_defects(pm: &PeriodMatrices, h: &IntMatrix, color_swapping: bool) -> RealStructureDefects {
    let hc = CMatrix::from_real(h);
    let averaged = (&pm.averaged().re() - &hc.scale(0.5)).max_abs();
    if color_swapping {
        RealStructureDefects {
            diagonal_blocks: (&(&pm.bb + &pm.ww.conj()) - &hc).max_abs(),
            diagonal_blocks_white: 0.0,
            off_diagonal_blocks: (&pm.wb + &pm.bw.conj()).max_abs(),
            averaged,
        }
    } else {
        RealStructureDefects {
            diagonal_blocks: (&pm.bb.re().scale(2.0) - &hc).max_abs(),
            diagonal_blocks_white: (&pm.ww.re().scale(2.0) - &hc).max_abs(),
            off_diagonal_blocks: pm.wb.max_abs_re().max(pm.bw.max_abs_re()),
            averaged,
        }
    }
}

/// True when the imaginary part of `m` (symmetrized) is positive definite.
pub fn imaginary_part_positive_definite(m: &CMatrix) -> bool {
    m.rows() == 0 || m.im().real_cholesky().is_some()
}
