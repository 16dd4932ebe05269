//! Medial graph, type-diamond forms and closed medial walks.
//!
//! The medial graph has one vertex per quad-graph edge (its midpoint) and one
//! edge per face corner: medial edge `4 f + c` joins the midpoints of the two
//! edges of face `f` at corner `c`. Corners at white vertices give edges
//! parallel to the black diagonal (black type), corners at black vertices give
//! edges parallel to the white diagonal (white type).
//!
//! Canonical orientation of a medial edge points from the black diagonal's
//! `b-` side to its `b+` side (black type) or from `w-` to `w+` (white type).
//! A type-diamond form is stored as `(s_f, t_f)`: its value on the two
//! canonically oriented black-type (resp. white-type) edges of face `f`.

use std::collections::VecDeque;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::surface::{Color, EdgeId, FaceId, QuadSurface, VertexId};

pub type MedialEdgeId = usize;

pub fn medial_edge(face: FaceId, corner: usize) -> MedialEdgeId {
    4 * face + corner
}

pub fn medial_face_corner(e: MedialEdgeId) -> (FaceId, usize) {
    (e / 4, e % 4)
}

/// Black-type medial edges sit at the white corners `w-` and `w+`.
pub fn is_black_type(corner: usize) -> bool {
    corner % 2 == 1
}

/// Canonical `(tail, head)` of a medial edge as quad-graph edge ids.
pub fn medial_endpoints(s: &QuadSurface, e: MedialEdgeId) -> (EdgeId, EdgeId) {
    let (f, c) = medial_face_corner(e);
    let prev = s.face_edge(f, (c + 3) % 4);
    let next = s.face_edge(f, c);
    match c {
        1 | 2 => (prev, next),
        _ => (next, prev),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Step {
    pub edge: MedialEdgeId,
    pub forward: bool,
}

impl Step {
    pub fn reversed(self) -> Step {
        Step { edge: self.edge, forward: !self.forward }
    }

    pub fn tail(self, s: &QuadSurface) -> EdgeId {
        let (a, b) = medial_endpoints(s, self.edge);
        if self.forward {
            a
        } else {
            b
        }
    }

    pub fn head(self, s: &QuadSurface) -> EdgeId {
        self.reversed().tail(s)
    }

    fn sign(self) -> f64 {
        if self.forward {
            1.0
        } else {
            -1.0
        }
    }
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum CycleError {
    #[error("step {0} does not start where step {prev} ends", prev = .0.saturating_sub(1))]
    Disconnected(usize),
    #[error("walk does not return to its starting point")]
    NotClosed,
    #[error("medial edge {0} does not exist")]
    NoSuchEdge(MedialEdgeId),
    #[error("cycle belongs to a different surface")]
    WrongSurface,
}

/// A closed walk in the medial graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MedialCycle {
    surface: u64,
    steps: Vec<Step>,
}

impl MedialCycle {
    pub fn new(s: &QuadSurface, steps: Vec<Step>) -> Result<Self, CycleError> {
        let n_medial = 4 * s.num_faces();
        for st in &steps {
            if st.edge >= n_medial {
                return Err(CycleError::NoSuchEdge(st.edge));
            }
        }
        for i in 1..steps.len() {
            if steps[i - 1].head(s) != steps[i].tail(s) {
                return Err(CycleError::Disconnected(i));
            }
        }
        if let (Some(first), Some(last)) = (steps.first(), steps.last()) {
            if last.head(s) != first.tail(s) {
                return Err(CycleError::NotClosed);
            }
        }
        Ok(MedialCycle { surface: s.fingerprint(), steps })
    }

    pub(crate) fn from_steps_unchecked(surface: u64, steps: Vec<Step>) -> Self {
        MedialCycle { surface, steps }
    }

    pub fn empty(s: &QuadSurface) -> Self {
        MedialCycle { surface: s.fingerprint(), steps: Vec::new() }
    }

    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn surface_fingerprint(&self) -> u64 {
        self.surface
    }

    pub fn belongs_to(&self, s: &QuadSurface) -> bool {
        self.surface == s.fingerprint()
    }

    /// Medial vertex the walk starts and ends at.
    pub fn base(&self, s: &QuadSurface) -> Option<EdgeId> {
        self.steps.first().map(|st| st.tail(s))
    }

    pub fn reversed(&self) -> MedialCycle {
        let steps = self.steps.iter().rev().map(|st| st.reversed()).collect();
        MedialCycle { surface: self.surface, steps }
    }

    /// Cancels immediate backtracking while keeping the base point.
    pub fn freely_reduced(&self) -> MedialCycle {
        let mut out: Vec<Step> = Vec::with_capacity(self.steps.len());
        for &st in &self.steps {
            if out.last() == Some(&st.reversed()) {
                out.pop();
            } else {
                out.push(st);
            }
        }
        MedialCycle { surface: self.surface, steps: out }
    }

    /// Signed use counts of black diagonals (`black = true`) or white
    /// diagonals per face, i.e. the projection of the walk to the black or
    /// white graph as a 1-chain.
    pub fn diagonal_chain(&self, num_faces: usize, black: bool) -> Vec<i64> {
        let mut chain = vec![0i64; num_faces];
        for st in &self.steps {
            let (f, c) = medial_face_corner(st.edge);
            if is_black_type(c) == black {
                chain[f] += if st.forward { 1 } else { -1 };
            }
        }
        chain
    }
}

/// Shortest medial path between two medial vertices (as steps).
pub fn medial_path(s: &QuadSurface, from: EdgeId, to: EdgeId) -> Vec<Step> {
    if from == to {
        return Vec::new();
    }
    let adj = medial_adjacency(s);
    let mut prev: Vec<Option<Step>> = vec![None; s.num_edges()];
    let mut seen = vec![false; s.num_edges()];
    seen[from] = true;
    let mut queue = VecDeque::from([from]);
    while let Some(u) = queue.pop_front() {
        if u == to {
            break;
        }
        for &st in &adj[u] {
            let v = st.head(s);
            if !seen[v] {
                seen[v] = true;
                prev[v] = Some(st);
                queue.push_back(v);
            }
        }
    }
    let mut path = Vec::new();
    let mut cur = to;
    while cur != from {
        let st = prev[cur].expect("medial graph is connected");
        path.push(st);
        cur = st.tail(s);
    }
    path.reverse();
    path
}

/// Outgoing steps at every medial vertex, in medial edge id order.
pub fn medial_adjacency(s: &QuadSurface) -> Vec<Vec<Step>> {
    let mut adj = vec![Vec::new(); s.num_edges()];
    for e in 0..4 * s.num_faces() {
        let (a, b) = medial_endpoints(s, e);
        adj[a].push(Step { edge: e, forward: true });
        adj[b].push(Step { edge: e, forward: false });
    }
    adj
}

/// Boundary of the medial face around quad-graph vertex `v`.
pub fn vertex_face_boundary(s: &QuadSurface, v: VertexId) -> MedialCycle {
    let corners = s.corners_of(v);
    let (f0, c0) = corners[0];
    let mut steps = Vec::with_capacity(corners.len());
    let (mut f, mut c) = (f0, c0);
    loop {
        // Traverse against the face's counterclockwise direction (next -> prev).
        let forward = !matches!(c, 1 | 2);
        steps.push(Step { edge: medial_edge(f, c), forward });
        let e = s.face_edge(f, (c + 3) % 4);
        let (g, k) = s.other_side(e, f);
        f = g;
        c = k;
        if (f, c) == (f0, c0) {
            break;
        }
    }
    MedialCycle::from_steps_unchecked(s.fingerprint(), steps)
}

/// Counterclockwise boundary of the medial face inside quad `f`.
pub fn quad_face_boundary(s: &QuadSurface, f: FaceId) -> MedialCycle {
    let steps = vec![
        Step { edge: medial_edge(f, 1), forward: true },
        Step { edge: medial_edge(f, 2), forward: true },
        Step { edge: medial_edge(f, 3), forward: false },
        Step { edge: medial_edge(f, 0), forward: false },
    ];
    MedialCycle::from_steps_unchecked(s.fingerprint(), steps)
}

/// A type-diamond 1-form on the medial graph.
#[derive(Debug, Clone, PartialEq)]
pub struct DiamondForm {
    pub s: Vec<Complex64>,
    pub t: Vec<Complex64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Periods {
    pub full: Complex64,
    pub black: Complex64,
    pub white: Complex64,
}

impl DiamondForm {
    pub fn zero(num_faces: usize) -> Self {
        let z = Complex64::new(0.0, 0.0);
        DiamondForm { s: vec![z; num_faces], t: vec![z; num_faces] }
    }

    /// Form determined by `s` and the discrete Cauchy-Riemann relation.
    pub fn from_black(s_surface: &QuadSurface, s: Vec<Complex64>) -> Self {
        let t = s
            .iter()
            .enumerate()
            .map(|(f, &sv)| Complex64::i() * s_surface.rho(f) * sv)
            .collect();
        DiamondForm { s, t }
    }

    /// Value on the canonically oriented medial edge.
    pub fn value(&self, e: MedialEdgeId) -> Complex64 {
        let (f, c) = medial_face_corner(e);
        if is_black_type(c) {
            self.s[f]
        } else {
            self.t[f]
        }
    }

    pub fn step_value(&self, st: Step) -> Complex64 {
        self.value(st.edge) * st.sign()
    }

    pub fn integrate(&self, cycle: &MedialCycle) -> Periods {
        let mut black = Complex64::new(0.0, 0.0);
        let mut white = Complex64::new(0.0, 0.0);
        for &st in cycle.steps() {
            let (_, c) = medial_face_corner(st.edge);
            if is_black_type(c) {
                black += self.step_value(st);
            } else {
                white += self.step_value(st);
            }
        }
        Periods { full: black + white, black: 2.0 * black, white: 2.0 * white }
    }

    /// Signed sum around the medial face of quad-graph vertex `v`.
    pub fn vertex_residual(&self, s: &QuadSurface, v: VertexId) -> Complex64 {
        s.corners_of(v)
            .iter()
            .map(|&(f, c)| {
                let sign = if matches!(c, 1 | 2) { -1.0 } else { 1.0 };
                sign * self.value(medial_edge(f, c))
            })
            .sum()
    }

    /// Largest vertex residual divided by the largest face value.
    pub fn closedness_defect(&self, s: &QuadSurface) -> f64 {
        let scale = self.max_abs().max(1e-300);
        (0..s.num_vertices())
            .map(|v| self.vertex_residual(s, v).norm())
            .fold(0.0, f64::max)
            / scale
    }

    /// Largest `|t_f - i rho_f s_f|` relative to the largest face value.
    pub fn cauchy_riemann_defect(&self, s: &QuadSurface) -> f64 {
        let scale = self.max_abs().max(1e-300);
        (0..s.num_faces())
            .map(|f| (self.t[f] - Complex64::i() * s.rho(f) * self.s[f]).norm())
            .fold(0.0, f64::max)
            / scale
    }

    pub fn max_abs(&self) -> f64 {
        self.s.iter().chain(self.t.iter()).map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn conj(&self) -> DiamondForm {
        DiamondForm {
            s: self.s.iter().map(|z| z.conj()).collect(),
            t: self.t.iter().map(|z| z.conj()).collect(),
        }
    }
}

/// Discrete exterior derivative of a function on quad-graph vertices.
pub fn exterior_derivative(s: &QuadSurface, f: &[Complex64]) -> DiamondForm {
    let mut out = DiamondForm::zero(s.num_faces());
    for (q, face) in s.faces().iter().enumerate() {
        let [bm, wm, bp, wp] = face.cycle;
        out.s[q] = (f[bp] - f[bm]) / 2.0;
        out.t[q] = (f[wp] - f[wm]) / 2.0;
    }
    out
}

/// True when every face satisfies the discrete Cauchy-Riemann equation.
pub fn is_discrete_holomorphic(s: &QuadSurface, f: &[Complex64], tol: f64) -> bool {
    s.faces().iter().all(|face| {
        let [bm, wm, bp, wp] = face.cycle;
        let lhs = f[wp] - f[wm];
        let rhs = Complex64::i() * face.rho * (f[bp] - f[bm]);
        (lhs - rhs).norm() <= tol * (1.0 + lhs.norm().max(rhs.norm()))
    })
}

/// Colour of the quad-graph vertex at a corner position.
pub fn corner_color(corner: usize) -> Color {
    if corner.is_multiple_of(2) {
        Color::Black
    } else {
        Color::White
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::torus::{gen_flat_torus, TorusInvolution};

    fn torus() -> QuadSurface {
        gen_flat_torus(4, 4, Complex64::new(1.0, 0.0), TorusInvolution::None).unwrap().surface
    }

    #[test]
    fn medial_counts_on_torus() {
        let s = torus();
        assert_eq!(s.num_edges(), 32);
        assert_eq!(4 * s.num_faces(), 64);
        assert_eq!(s.num_vertices() + s.num_faces(), 32);
    }

    #[test]
    fn face_boundaries_are_closed_walks() {
        let s = torus();
        for v in 0..s.num_vertices() {
            let c = vertex_face_boundary(&s, v);
            assert!(MedialCycle::new(&s, c.steps().to_vec()).is_ok());
        }
        for f in 0..s.num_faces() {
            let c = quad_face_boundary(&s, f);
            assert!(MedialCycle::new(&s, c.steps().to_vec()).is_ok());
        }
    }

    #[test]
    fn exact_forms_are_closed() {
        let s = torus();
        let f: Vec<Complex64> = (0..s.num_vertices())
            .map(|v| Complex64::new((v * v % 7) as f64, (v % 3) as f64 - 1.0))
            .collect();
        let df = exterior_derivative(&s, &f);
        assert!(df.closedness_defect(&s) < 1e-15);
        for v in 0..s.num_vertices() {
            assert!(df.integrate(&vertex_face_boundary(&s, v)).full.norm() < 1e-14);
        }
    }

    #[test]
    fn constant_form_is_closed_and_holomorphic() {
        let s = torus();
        let form = DiamondForm::from_black(&s, vec![Complex64::new(1.0, 0.0); s.num_faces()]);
        assert!(form.closedness_defect(&s) < 1e-15);
        assert!(form.cauchy_riemann_defect(&s) < 1e-15);
    }

    #[test]
    fn free_reduction_cancels_backtracking() {
        let s = torus();
        let c = quad_face_boundary(&s, 0);
        let mut steps = c.steps().to_vec();
        let extra = steps[2];
        steps.insert(2, extra.reversed());
        steps.insert(2, extra);
        let walk = MedialCycle::new(&s, steps).unwrap();
        assert_eq!(walk.freely_reduced(), c);
    }

    #[test]
    fn rejects_broken_walk() {
        let s = torus();
        let c = quad_face_boundary(&s, 0);
        let steps = vec![c.steps()[0], c.steps()[2]];
        assert_eq!(MedialCycle::new(&s, steps), Err(CycleError::Disconnected(1)));
    }
}
