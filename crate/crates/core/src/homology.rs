//! First homology of the surface through closed medial walks.
//!
//! A medial walk projects to a closed walk on the black graph (vertices: black
//! vertices, edges: black diagonals) by sliding every medial vertex to its
//! black endpoint, and likewise to the white graph. Both projections are
//! homotopic to the walk. The black and white graphs are cellularly dual, so
//! the intersection number of two walks is the signed count of black
//! diagonals of the first crossing white diagonals of the second. In a
//! counterclockwise quad the pair (black `b- -> b+`, white `w- -> w+`)
//! crosses positively.
//!
//! Symplectic bases satisfy `int(a_i, b_j) = delta_ij` and
//! `int(a_i, a_j) = int(b_i, b_j) = 0`, so their Gram matrix is
//! `J = [[0, I], [-I, 0]]`.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::intmat::{freemodule_reduce, unimodular_inverse, FreeModuleError, IntMatrix};
use crate::involution::Involution;
use crate::medial::{medial_adjacency, medial_endpoints, medial_face_corner, medial_path, MedialCycle, Step};
use crate::surface::QuadSurface;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum HomologyError {
    #[error("cycle basis has rank below 2g")]
    InternalRankDeficient,
    #[error("cycles belong to different surfaces")]
    CyclesFromDifferentSurfaces,
    #[error("cycles do not generate the first homology group")]
    InputNotGenerating,
    #[error("induced map on homology is not an involution")]
    NotInvolution,
    #[error("fixed lattice has rank {found}, expected {expected}")]
    FixedRankNotG { found: usize, expected: usize },
    #[error("adapted basis failed verification: {0}")]
    AdaptationFailed(String),
}

impl From<FreeModuleError> for HomologyError {
    fn from(e: FreeModuleError) -> Self {
        match e {
            FreeModuleError::FixedRankNotG { found, expected } => HomologyError::FixedRankNotG { found, expected },
            FreeModuleError::NotInvolution | FreeModuleError::NotSquare => HomologyError::NotInvolution,
        }
    }
}

/// Black and white projections of a cycle, cached for repeated pairings.
#[derive(Debug, Clone)]
pub struct Chains {
    pub black: Vec<i64>,
    pub white: Vec<i64>,
}

impl Chains {
    pub fn of(s: &QuadSurface, c: &MedialCycle) -> Chains {
        let nf = s.num_faces();
        Chains { black: c.diagonal_chain(nf, true), white: c.diagonal_chain(nf, false) }
    }

    pub fn pair(&self, other: &Chains) -> i64 {
        self.black.iter().zip(&other.white).map(|(a, b)| a * b).sum()
    }
}

pub fn intersection(s: &QuadSurface, c1: &MedialCycle, c2: &MedialCycle) -> Result<i64, HomologyError> {
    if !c1.belongs_to(s) || !c2.belongs_to(s) {
        return Err(HomologyError::CyclesFromDifferentSurfaces);
    }
    Ok(Chains::of(s, c1).pair(&Chains::of(s, c2)))
}

/// Intersection matrix `G_ij = int(c_i, c_j)`.
pub fn gram(s: &QuadSurface, cycles: &[MedialCycle]) -> Result<IntMatrix, HomologyError> {
    if cycles.iter().any(|c| !c.belongs_to(s)) {
        return Err(HomologyError::CyclesFromDifferentSurfaces);
    }
    let chains: Vec<Chains> = cycles.iter().map(|c| Chains::of(s, c)).collect();
    let n = cycles.len();
    let mut g = IntMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            g[(i, j)] = chains[i].pair(&chains[j]);
        }
    }
    Ok(g)
}

/// `2g` closed medial walks based at medial vertex 0 forming a basis of the
/// first homology, from a breadth-first tree and cotree.
pub fn cycle_basis(s: &QuadSurface) -> Result<Vec<MedialCycle>, HomologyError> {
    let n_med_v = s.num_edges();
    let n_med_e = 4 * s.num_faces();
    let adj = medial_adjacency(s);

    let mut parent: Vec<Option<Step>> = vec![None; n_med_v];
    let mut in_tree = vec![false; n_med_e];
    let mut seen = vec![false; n_med_v];
    seen[0] = true;
    let mut queue = VecDeque::from([0usize]);
    while let Some(u) = queue.pop_front() {
        for &st in &adj[u] {
            let v = st.head(s);
            if !seen[v] {
                seen[v] = true;
                parent[v] = Some(st);
                in_tree[st.edge] = true;
                queue.push_back(v);
            }
        }
    }

    // Dual graph: medial faces are quad-graph vertices then quads; medial
    // edge (f, c) separates the face of vertex cycle(f)[c] from the face of f.
    let nv = s.num_vertices();
    let dual_ends = |e: usize| {
        let (f, c) = medial_face_corner(e);
        (s.face(f).cycle[c], nv + f)
    };
    let mut dual_adj = vec![Vec::new(); nv + s.num_faces()];
    for e in 0..n_med_e {
        if !in_tree[e] {
            let (a, b) = dual_ends(e);
            dual_adj[a].push((e, b));
            dual_adj[b].push((e, a));
        }
    }
    let mut in_cotree = vec![false; n_med_e];
    let mut dseen = vec![false; dual_adj.len()];
    dseen[0] = true;
    let mut queue = VecDeque::from([0usize]);
    while let Some(u) = queue.pop_front() {
        for &(e, v) in &dual_adj[u] {
            if !dseen[v] {
                dseen[v] = true;
                in_cotree[e] = true;
                queue.push_back(v);
            }
        }
    }

    let path_to_root = |mut v: usize| {
        let mut path = Vec::new();
        while let Some(st) = parent[v] {
            path.push(st.reversed());
            v = st.tail(s);
        }
        path
    };
    let mut cycles = Vec::new();
    for e in 0..n_med_e {
        if in_tree[e] || in_cotree[e] {
            continue;
        }
        let (tail, head) = medial_endpoints(s, e);
        let mut steps: Vec<Step> = path_to_root(tail).into_iter().rev().map(|st| st.reversed()).collect();
        steps.push(Step { edge: e, forward: true });
        steps.extend(path_to_root(head));
        cycles.push(MedialCycle::from_steps_unchecked(s.fingerprint(), steps).freely_reduced());
    }
    if cycles.len() != 2 * s.genus() {
        return Err(HomologyError::InternalRankDeficient);
    }
    if gram(s, &cycles)?.determinant() != 1 {
        return Err(HomologyError::InternalRankDeficient);
    }
    Ok(cycles)
}

/// The walk `sum_i coeffs[i] * cycles[i]`, based at medial vertex 0.
pub fn combine(s: &QuadSurface, cycles: &[MedialCycle], coeffs: &[i64]) -> MedialCycle {
    assert_eq!(cycles.len(), coeffs.len());
    let mut steps = Vec::new();
    for (c, &k) in cycles.iter().zip(coeffs) {
        if k == 0 || c.is_empty() {
            continue;
        }
        let base = c.base(s).expect("non-empty cycle");
        let to = medial_path(s, 0, base);
        let piece = if k > 0 { c.clone() } else { c.reversed() };
        for _ in 0..k.unsigned_abs() {
            steps.extend_from_slice(&to);
            steps.extend_from_slice(piece.steps());
            steps.extend(to.iter().rev().map(|st| st.reversed()));
        }
    }
    MedialCycle::from_steps_unchecked(s.fingerprint(), steps).freely_reduced()
}

/// Rows of the returned matrix are coefficient vectors (over the input
/// vectors) of a basis whose Gram matrix is `J`.
pub fn symplectic_reduce(gram: &IntMatrix) -> Result<IntMatrix, HomologyError> {
    let n = gram.rows();
    if !n.is_multiple_of(2) || gram.determinant() != 1 {
        return Err(HomologyError::InputNotGenerating);
    }
    let mut g = gram.clone();
    let mut p = IntMatrix::identity(n);

    // Congruence helpers: basis vector i += k * basis vector j, swap, negate.
    fn add(g: &mut IntMatrix, p: &mut IntMatrix, i: usize, j: usize, k: i64) {
        let n = g.rows();
        for c in 0..n {
            let v = g[(j, c)];
            g[(i, c)] += k * v;
        }
        for r in 0..n {
            let v = g[(r, j)];
            g[(r, i)] += k * v;
        }
        for c in 0..n {
            let v = p[(j, c)];
            p[(i, c)] += k * v;
        }
    }
    fn swap(g: &mut IntMatrix, p: &mut IntMatrix, i: usize, j: usize) {
        if i == j {
            return;
        }
        let n = g.rows();
        for c in 0..n {
            let t = g[(i, c)];
            g[(i, c)] = g[(j, c)];
            g[(j, c)] = t;
            let t = p[(i, c)];
            p[(i, c)] = p[(j, c)];
            p[(j, c)] = t;
        }
        for r in 0..n {
            let t = g[(r, i)];
            g[(r, i)] = g[(r, j)];
            g[(r, j)] = t;
        }
    }
    fn negate(g: &mut IntMatrix, p: &mut IntMatrix, i: usize) {
        let n = g.rows();
        for c in 0..n {
            g[(i, c)] = -g[(i, c)];
            p[(i, c)] = -p[(i, c)];
        }
        for r in 0..n {
            g[(r, i)] = -g[(r, i)];
        }
    }

    for t in (0..n).step_by(2) {
        // Euclid along row t until a single entry remains right of t.
        loop {
            let best = (t + 1..n).filter(|&q| g[(t, q)] != 0).min_by_key(|&q| (g[(t, q)].abs(), q));
            let Some(q) = best else {
                return Err(HomologyError::InputNotGenerating);
            };
            swap(&mut g, &mut p, t + 1, q);
            let pivot = g[(t, t + 1)];
            let mut done = true;
            for q in t + 2..n {
                let k = g[(t, q)].div_euclid(pivot);
                if k != 0 {
                    add(&mut g, &mut p, q, t + 1, -k);
                }
                done &= g[(t, q)] == 0;
            }
            if done {
                break;
            }
        }
        match g[(t, t + 1)] {
            1 => {}
            -1 => negate(&mut g, &mut p, t + 1),
            _ => return Err(HomologyError::InputNotGenerating),
        }
        for q in t + 2..n {
            let with_f = g[(q, t + 1)];
            let with_e = g[(q, t)];
            if with_f != 0 {
                add(&mut g, &mut p, q, t, -with_f);
            }
            if with_e != 0 {
                add(&mut g, &mut p, q, t + 1, with_e);
            }
        }
    }
    // Interleaved (e1, f1, e2, f2, ...) -> (e1, e2, ..., f1, f2, ...).
    let half = n / 2;
    let mut out = IntMatrix::zeros(n, n);
    for i in 0..half {
        for c in 0..n {
            out[(i, c)] = p[(2 * i, c)];
            out[(half + i, c)] = p[(2 * i + 1, c)];
        }
    }
    Ok(out)
}

/// A basis `a_1..a_g, b_1..b_g` of the first homology with Gram matrix `J`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymplecticBasis {
    pub a: Vec<MedialCycle>,
    pub b: Vec<MedialCycle>,
}

impl SymplecticBasis {
    pub fn genus(&self) -> usize {
        self.a.len()
    }

    /// `a_1..a_g, b_1..b_g` as one list.
    pub fn cycles(&self) -> Vec<MedialCycle> {
        self.a.iter().chain(&self.b).cloned().collect()
    }

    /// Checks that the cycles are on `s` and have Gram matrix `J`.
    pub fn verify(&self, s: &QuadSurface) -> Result<(), HomologyError> {
        if self.a.len() != self.b.len() || self.a.len() != s.genus() {
            return Err(HomologyError::InputNotGenerating);
        }
        let g = gram(s, &self.cycles())?;
        if g != IntMatrix::standard_symplectic(self.genus()) {
            return Err(HomologyError::InputNotGenerating);
        }
        Ok(())
    }
}

/// Symplectic basis built from arbitrary generating cycles.
pub fn symplectic_basis_from(s: &QuadSurface, cycles: &[MedialCycle]) -> Result<SymplecticBasis, HomologyError> {
    let g = gram(s, cycles)?;
    if cycles.len() != 2 * s.genus() {
        return Err(HomologyError::InputNotGenerating);
    }
    let p = symplectic_reduce(&g)?;
    let genus = s.genus();
    let realized: Vec<MedialCycle> = (0..2 * genus).map(|i| combine(s, cycles, p.row(i))).collect();
    let basis = SymplecticBasis { a: realized[..genus].to_vec(), b: realized[genus..].to_vec() };
    basis.verify(s).map_err(|_| HomologyError::InternalRankDeficient)?;
    Ok(basis)
}

pub fn symplectic_basis(s: &QuadSurface) -> Result<SymplecticBasis, HomologyError> {
    let cycles = cycle_basis(s)?;
    symplectic_basis_from(s, &cycles)
}

/// Coordinates of `[c]` in a symplectic basis:
/// `c ~ sum int(c, b_i) a_i - sum int(c, a_i) b_i`.
pub fn class_coordinates(s: &QuadSurface, c: &MedialCycle, basis: &SymplecticBasis) -> Result<Vec<i64>, HomologyError> {
    if !c.belongs_to(s) || basis.cycles().iter().any(|x| !x.belongs_to(s)) {
        return Err(HomologyError::CyclesFromDifferentSurfaces);
    }
    let cc = Chains::of(s, c);
    let a: Vec<i64> = basis.b.iter().map(|b| cc.pair(&Chains::of(s, b))).collect();
    let b: Vec<i64> = basis.a.iter().map(|a| -cc.pair(&Chains::of(s, a))).collect();
    Ok(a.into_iter().chain(b).collect())
}

/// Matrix of the involution on homology: column `j` holds the coordinates of
/// the image of basis cycle `j`.
pub fn involution_action(s: &QuadSurface, tau: &Involution, basis: &SymplecticBasis) -> Result<IntMatrix, HomologyError> {
    if !tau.belongs_to(s) {
        return Err(HomologyError::CyclesFromDifferentSurfaces);
    }
    let cols: Vec<Vec<i64>> = basis
        .cycles()
        .iter()
        .map(|c| class_coordinates(s, &tau.apply_cycle(c), basis))
        .collect::<Result<_, _>>()?;
    Ok(IntMatrix::from_columns(&cols))
}

/// Symplectic basis with `tau(a_i) = a_i` and
/// `tau(b_i) = sum_j h_ji a_j - b_i`, where `h` is symmetric with entries in
/// `{0, 1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdaptedBasis {
    pub basis: SymplecticBasis,
    pub h: IntMatrix,
}

impl AdaptedBasis {
    pub fn genus(&self) -> usize {
        self.basis.genus()
    }
}

/// Checks the adapted-basis relations and returns `h`.
pub fn verify_adapted(s: &QuadSurface, tau: &Involution, basis: &SymplecticBasis) -> Result<IntMatrix, HomologyError> {
    basis.verify(s).map_err(|e| match e {
        HomologyError::CyclesFromDifferentSurfaces => e,
        _ => HomologyError::AdaptationFailed("intersection matrix is not J".into()),
    })?;
    let g = basis.genus();
    let m = involution_action(s, tau, basis)?;
    let mut h = IntMatrix::zeros(g, g);
    for j in 0..g {
        for i in 0..2 * g {
            let want_a = if i == j { 1 } else { 0 };
            if m[(i, j)] != want_a {
                return Err(HomologyError::AdaptationFailed(format!("tau(a_{}) != a_{}", j + 1, j + 1)));
            }
        }
        for i in 0..g {
            h[(i, j)] = m[(i, g + j)];
            let want_b = if i == j { -1 } else { 0 };
            if m[(g + i, g + j)] != want_b {
                return Err(HomologyError::AdaptationFailed(format!("b-part of tau(b_{}) is wrong", j + 1)));
            }
        }
    }
    if !h.is_symmetric() || h.to_rows().iter().flatten().any(|&x| x != 0 && x != 1) {
        return Err(HomologyError::AdaptationFailed(format!("h = {h:?} is not a symmetric 0/1 matrix")));
    }
    Ok(h)
}

/// Builds an adapted basis from any symplectic basis.
///
/// The fixed lattice `ker(1 - tau)` is a rank-`g` direct summand and
/// isotropic. A basis `a` of it extends to a symplectic basis: unimodularity
/// gives dual vectors `b'`, and adding suitable multiples of the `a_i` makes
/// the `b` isotropic. Then `tau(b_j) = sum_k h_kj a_k - b_j` with
/// `h_kj = int(tau b_j, b_k)` symmetric, and shifting `b` by `-floor(h/2) a`
/// brings `h` into `{0, 1}`.
pub fn adapted_basis_from(
    s: &QuadSurface,
    tau: &Involution,
    base: &SymplecticBasis,
) -> Result<AdaptedBasis, HomologyError> {
    base.verify(s)?;
    let g = base.genus();
    let n = 2 * g;
    let m = involution_action(s, tau, base)?;
    let form = freemodule_reduce(&m, Some(g))?;
    let j = IntMatrix::standard_symplectic(g);
    let omega = |x: &[i64], y: &[i64]| -> i64 { x.iter().zip(j.mul_vec(y)).map(|(a, b)| a * b).sum() };

    let a: Vec<Vec<i64>> = (0..g).map(|i| form.p.column(i)).collect();
    // b'_j: columns of -J p^{-T}, so that omega(a_i, b'_j) = delta_ij.
    let p_inv_t = unimodular_inverse(&form.p).ok_or(HomologyError::InternalRankDeficient)?.transpose();
    let w = (&j * &p_inv_t).neg();
    let bp: Vec<Vec<i64>> = (0..g).map(|i| w.column(i)).collect();
    let mut b = bp.clone();
    for i in 0..g {
        for jj in i + 1..g {
            let c = -omega(&bp[i], &bp[jj]);
            for r in 0..n {
                b[i][r] += c * a[jj][r];
            }
        }
    }
    let mut h = IntMatrix::zeros(g, g);
    for jj in 0..g {
        let tb = m.mul_vec(&b[jj]);
        for k in 0..g {
            h[(k, jj)] = omega(&tb, &b[k]);
        }
    }
    if !h.is_symmetric() {
        return Err(HomologyError::AdaptationFailed("mixing matrix is not symmetric".into()));
    }
    for jj in 0..g {
        for k in 0..g {
            let shift = -h[(k, jj)].div_euclid(2);
            for r in 0..n {
                b[jj][r] += shift * a[k][r];
            }
        }
    }

    let cycles = base.cycles();
    let basis = SymplecticBasis {
        a: a.iter().map(|v| combine(s, &cycles, v)).collect(),
        b: b.iter().map(|v| combine(s, &cycles, v)).collect(),
    };
    let h = verify_adapted(s, tau, &basis)?;
    Ok(AdaptedBasis { basis, h })
}

pub fn adapted_basis(s: &QuadSurface, tau: &Involution) -> Result<AdaptedBasis, HomologyError> {
    let base = symplectic_basis(s)?;
    adapted_basis_from(s, tau, &base)
}

/// Serializable descriptor of a directed medial edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepDescriptor {
    pub face: usize,
    pub corner: usize,
    pub direction: i8,
}

pub fn describe(s: &QuadSurface, c: &MedialCycle) -> Vec<StepDescriptor> {
    c.steps()
        .iter()
        .map(|st| {
            let (f, corner) = medial_face_corner(st.edge);
            StepDescriptor { face: f, corner: s.face(f).cycle[corner], direction: if st.forward { 1 } else { -1 } }
        })
        .collect()
}
