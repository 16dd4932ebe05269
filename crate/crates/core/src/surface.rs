//! Quad-graphs with a discrete complex structure.
//!
//! A [`QuadSurface`] is a strongly regular, bipartite quadrangulation of a
//! closed oriented surface. Every face stores its vertex cycle in the order
//! `(b-, w-, b+, w+)` (counterclockwise, starting at a black vertex) together
//! with the complex number `rho = -i (w+ - w-) / (b+ - b-)` of its chart.
//!
//! Edges of the quad-graph are numbered in order of first appearance when
//! faces are scanned by id and local edges `0..4` are scanned in cycle order,
//! so numbering is a pure function of the input.

use std::collections::{HashMap, HashSet, VecDeque};
use std::hash::{Hash, Hasher};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type VertexId = usize;
pub type FaceId = usize;
pub type EdgeId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Color {
    Black,
    White,
}

impl Color {
    pub fn other(self) -> Color {
        match self {
            Color::Black => Color::White,
            Color::White => Color::Black,
        }
    }
}

/// Corner positions inside a face cycle.
pub const B_MINUS: usize = 0;
pub const W_MINUS: usize = 1;
pub const B_PLUS: usize = 2;
pub const W_PLUS: usize = 3;

#[derive(Debug, Clone, PartialEq)]
pub struct Face {
    pub cycle: [VertexId; 4],
    pub rho: Complex64,
}

/// An undirected edge of the quad-graph. `sides[k] = (face, local)` where the
/// edge is local edge `local` of `face`; local edge `j` joins corners `j` and
/// `j + 1 mod 4`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub black: VertexId,
    pub white: VertexId,
    pub sides: [(FaceId, usize); 2],
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum SurfaceError {
    #[error("vertex id {0} is out of range")]
    VertexOutOfRange(VertexId),
    #[error("face {face} repeats a vertex or does not start at a black vertex")]
    FaceCycleNotAlternating { face: FaceId },
    #[error("face {face} has an edge joining two vertices of the same color")]
    NotBipartite { face: FaceId },
    #[error("face {face} has rho with non-positive real part ({re})")]
    NonPositiveRhoRealPart { face: FaceId, re: f64 },
    #[error("edge {u}-{v} is not shared by exactly two oppositely oriented faces")]
    NonManifoldEdge { u: VertexId, v: VertexId },
    #[error("the faces around vertex {0} do not form a single disc")]
    NonManifoldVertex(VertexId),
    #[error("faces {0} and {1} violate strong regularity")]
    NotStronglyRegular(FaceId, FaceId),
    #[error("the quad-graph is not connected")]
    Disconnected,
    #[error("the surface has no faces")]
    Empty,
}

#[derive(Debug, Clone)]
pub struct QuadSurface {
    colors: Vec<Color>,
    faces: Vec<Face>,
    edges: Vec<Edge>,
    face_edges: Vec<[EdgeId; 4]>,
    edge_lookup: HashMap<(VertexId, VertexId), EdgeId>,
    corners: Vec<Vec<(FaceId, usize)>>,
    fingerprint: u64,
}

impl QuadSurface {
    /// Validates the input and builds the incidence structure.
    pub fn new(colors: Vec<Color>, faces: Vec<Face>) -> Result<Self, SurfaceError> {
        if faces.is_empty() {
            return Err(SurfaceError::Empty);
        }
        let nv = colors.len();
        for (f, face) in faces.iter().enumerate() {
            for &v in &face.cycle {
                if v >= nv {
                    return Err(SurfaceError::VertexOutOfRange(v));
                }
            }
            let c = face.cycle;
            for j in 0..4 {
                if colors[c[j]] == colors[c[(j + 1) % 4]] {
                    return Err(SurfaceError::NotBipartite { face: f });
                }
            }
            let distinct: HashSet<_> = c.iter().collect();
            if distinct.len() != 4 || colors[c[B_MINUS]] != Color::Black {
                return Err(SurfaceError::FaceCycleNotAlternating { face: f });
            }
            if !(face.rho.re > 0.0) || !face.rho.im.is_finite() {
                return Err(SurfaceError::NonPositiveRhoRealPart { face: f, re: face.rho.re });
            }
        }

        // Directed edges: each must occur once, and its reverse once.
        let mut directed: HashMap<(VertexId, VertexId), (FaceId, usize)> = HashMap::new();
        for (f, face) in faces.iter().enumerate() {
            for j in 0..4 {
                let key = (face.cycle[j], face.cycle[(j + 1) % 4]);
                if directed.insert(key, (f, j)).is_some() {
                    return Err(SurfaceError::NonManifoldEdge { u: key.0, v: key.1 });
                }
            }
        }
        let mut edges = Vec::new();
        let mut edge_lookup = HashMap::new();
        let mut face_edges = vec![[usize::MAX; 4]; faces.len()];
        for (f, face) in faces.iter().enumerate() {
            for j in 0..4 {
                if face_edges[f][j] != usize::MAX {
                    continue;
                }
                let (u, v) = (face.cycle[j], face.cycle[(j + 1) % 4]);
                let Some(&(g, k)) = directed.get(&(v, u)) else {
                    return Err(SurfaceError::NonManifoldEdge { u, v });
                };
                let id = edges.len();
                let (black, white) = if colors[u] == Color::Black { (u, v) } else { (v, u) };
                edges.push(Edge { black, white, sides: [(f, j), (g, k)] });
                edge_lookup.insert((black, white), id);
                face_edges[f][j] = id;
                face_edges[g][k] = id;
            }
        }

        let mut corners = vec![Vec::new(); nv];
        for (f, face) in faces.iter().enumerate() {
            for (c, &v) in face.cycle.iter().enumerate() {
                corners[v].push((f, c));
            }
        }

        let surface = QuadSurface {
            fingerprint: fingerprint_of(&colors, &faces),
            colors,
            faces,
            edges,
            face_edges,
            edge_lookup,
            corners,
        };
        surface.check_vertex_links()?;
        surface.check_connected()?;
        surface.check_strong_regularity()?;
        Ok(surface)
    }

    fn check_vertex_links(&self) -> Result<(), SurfaceError> {
        for v in 0..self.colors.len() {
            let corners = &self.corners[v];
            if corners.is_empty() {
                return Err(SurfaceError::NonManifoldVertex(v));
            }
            // Walk around v: leave face f through the edge preceding v and
            // enter the neighboring face on the other side.
            let start = corners[0];
            let mut cur = start;
            let mut seen = 1;
            loop {
                let (f, c) = cur;
                let e = self.face_edges[f][(c + 3) % 4];
                let (g, k) = self.other_side(e, f);
                // In g, v sits at the start of local edge k.
                debug_assert_eq!(self.faces[g].cycle[k], v);
                cur = (g, k);
                if cur == start {
                    break;
                }
                seen += 1;
                if seen > corners.len() {
                    return Err(SurfaceError::NonManifoldVertex(v));
                }
            }
            if seen != corners.len() {
                return Err(SurfaceError::NonManifoldVertex(v));
            }
        }
        Ok(())
    }

    fn check_connected(&self) -> Result<(), SurfaceError> {
        let mut seen = vec![false; self.faces.len()];
        let mut queue = VecDeque::from([0]);
        seen[0] = true;
        let mut count = 1;
        while let Some(f) = queue.pop_front() {
            for &e in &self.face_edges[f] {
                let (g, _) = self.other_side(e, f);
                if !seen[g] {
                    seen[g] = true;
                    count += 1;
                    queue.push_back(g);
                }
            }
        }
        let isolated = self.corners.iter().any(|c| c.is_empty());
        if count != self.faces.len() || isolated {
            return Err(SurfaceError::Disconnected);
        }
        Ok(())
    }

    fn check_strong_regularity(&self) -> Result<(), SurfaceError> {
        for f in 0..self.faces.len() {
            let mut shared_vertices: HashMap<FaceId, usize> = HashMap::new();
            for &v in &self.faces[f].cycle {
                for &(g, _) in &self.corners[v] {
                    if g > f {
                        *shared_vertices.entry(g).or_default() += 1;
                    }
                }
            }
            let mut shared_edges: HashMap<FaceId, usize> = HashMap::new();
            for &e in &self.face_edges[f] {
                let (g, _) = self.other_side(e, f);
                if g == f {
                    return Err(SurfaceError::NotStronglyRegular(f, f));
                }
                if g > f {
                    *shared_edges.entry(g).or_default() += 1;
                }
            }
            for (&g, &nv) in &shared_vertices {
                let ne = shared_edges.get(&g).copied().unwrap_or(0);
                if ne > 1 || (ne == 0 && nv > 1) {
                    return Err(SurfaceError::NotStronglyRegular(f, g));
                }
            }
        }
        Ok(())
    }

    pub fn num_vertices(&self) -> usize {
        self.colors.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn num_faces(&self) -> usize {
        self.faces.len()
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.num_vertices() as i64 - self.num_edges() as i64 + self.num_faces() as i64
    }

    pub fn genus(&self) -> usize {
        ((2 - self.euler_characteristic()) / 2) as usize
    }

    pub fn color(&self, v: VertexId) -> Color {
        self.colors[v]
    }

    pub fn colors(&self) -> &[Color] {
        &self.colors
    }

    pub fn face(&self, f: FaceId) -> &Face {
        &self.faces[f]
    }

    pub fn faces(&self) -> &[Face] {
        &self.faces
    }

    pub fn rho(&self, f: FaceId) -> Complex64 {
        self.faces[f].rho
    }

    pub fn edge(&self, e: EdgeId) -> &Edge {
        &self.edges[e]
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Edge id of local edge `j` (corners `j`, `j+1`) of face `f`.
    pub fn face_edge(&self, f: FaceId, j: usize) -> EdgeId {
        self.face_edges[f][j]
    }

    pub fn edge_between(&self, u: VertexId, v: VertexId) -> Option<EdgeId> {
        let key = if self.colors[u] == Color::Black { (u, v) } else { (v, u) };
        self.edge_lookup.get(&key).copied()
    }

    /// Faces incident to `v` with the corner position of `v` in each.
    pub fn corners_of(&self, v: VertexId) -> &[(FaceId, usize)] {
        &self.corners[v]
    }

    /// The face across edge `e` from `f`, with the local index of `e` there.
    pub fn other_side(&self, e: EdgeId, f: FaceId) -> (FaceId, usize) {
        let [a, b] = self.edges[e].sides;
        if a.0 == f {
            b
        } else {
            a
        }
    }

    /// Looks up a face by its vertex set.
    pub fn face_with_vertices(&self, vs: [VertexId; 4]) -> Option<FaceId> {
        let mut sorted = vs;
        sorted.sort_unstable();
        self.corners[vs[0]].iter().map(|&(f, _)| f).find(|&f| {
            let mut c = self.faces[f].cycle;
            c.sort_unstable();
            c == sorted
        })
    }

    /// Hash of the combinatorics and complex structure, used to tag derived
    /// objects so that mixing data from different surfaces is detected.
    pub fn fingerprint(&self) -> u64 {
        self.fingerprint
    }

    pub fn lowest_vertex_of_color(&self, color: Color) -> Option<VertexId> {
        self.colors.iter().position(|&c| c == color)
    }
}

fn fingerprint_of(colors: &[Color], faces: &[Face]) -> u64 {
    let mut h = std::collections::hash_map::DefaultHasher::new();
    colors.hash(&mut h);
    for f in faces {
        f.cycle.hash(&mut h);
        f.rho.re.to_bits().hash(&mut h);
        f.rho.im.to_bits().hash(&mut h);
    }
    h.finish()
}

/// `rho` of a quad from four points of an immersed chart.
pub fn chart_rho(b_minus: Complex64, w_minus: Complex64, b_plus: Complex64, w_plus: Complex64) -> Complex64 {
    -Complex64::i() * (w_plus - w_minus) / (b_plus - b_minus)
}
