//! Orientation-reversing involutions of quad-graphs.
//!
//! An involution is given by a vertex permutation. It either preserves both
//! color classes (type 1, `rho` maps to its conjugate) or swaps them (type 2,
//! `rho` maps to the reciprocal of its conjugate). Its fixed set is a disjoint
//! union of closed curves (ovals) made of:
//!
//! * type 1: fixed edges and fixed face diagonals through fixed vertices;
//! * type 2: fixed face bimedians through midpoints of fixed edges.

use std::collections::{BTreeMap, HashMap};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::medial::{
    is_black_type, medial_edge, medial_endpoints, medial_face_corner, DiamondForm, MedialCycle, Step,
};
use crate::surface::{EdgeId, FaceId, QuadSurface, VertexId};

/// Default relative tolerance for the `rho` compatibility condition.
pub const RHO_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum InvolutionKind {
    #[serde(rename = "1")]
    ColorPreserving,
    #[serde(rename = "2")]
    ColorSwapping,
}

impl InvolutionKind {
    pub fn number(self) -> u8 {
        match self {
            InvolutionKind::ColorPreserving => 1,
            InvolutionKind::ColorSwapping => 2,
        }
    }
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum InvolutionError {
    #[error("vertex map has length {found}, surface has {expected} vertices")]
    WrongLength { found: usize, expected: usize },
    #[error("vertex map sends {0} out of range")]
    VertexOutOfRange(VertexId),
    #[error("map does not square to the identity at vertex {0}")]
    NotInvolutive(VertexId),
    #[error("map preserves the color of some vertices and swaps it for others")]
    MixedColorAction,
    #[error("image of face {0} is not a face")]
    NotFacePreserving(FaceId),
    #[error("map preserves the orientation of face {0}")]
    OrientationNotReversed(FaceId),
    #[error("rho of face {face} is incompatible with the involution (expected {expected}, found {found})")]
    RhoConditionViolated { face: FaceId, expected: Complex64, found: Complex64 },
    #[error("fixed set is not a disjoint union of closed curves")]
    FixedSetNotManifold,
    #[error("cut surface has {0} components")]
    InternalComponentCount(usize),
    #[error("k = {k}, genus {genus}, dividing = {dividing} violates Harnack's constraints")]
    HarnackViolated { k: usize, genus: usize, dividing: bool },
}

#[derive(Debug, Clone)]
pub struct Involution {
    kind: InvolutionKind,
    vertex_map: Vec<VertexId>,
    face_map: Vec<FaceId>,
    corner_map: Vec<[usize; 4]>,
    medial_map: Vec<Step>,
    edge_map: Vec<EdgeId>,
    surface: u64,
}

pub fn check_involution(
    s: &QuadSurface,
    vertex_map: &[VertexId],
    tol: f64,
) -> Result<Involution, InvolutionError> {
    let nv = s.num_vertices();
    if vertex_map.len() != nv {
        return Err(InvolutionError::WrongLength { found: vertex_map.len(), expected: nv });
    }
    if let Some(&v) = vertex_map.iter().find(|&&v| v >= nv) {
        return Err(InvolutionError::VertexOutOfRange(v));
    }
    if let Some(v) = (0..nv).find(|&v| vertex_map[vertex_map[v]] != v) {
        return Err(InvolutionError::NotInvolutive(v));
    }
    let swaps = s.color(vertex_map[0]) != s.color(0);
    if (0..nv).any(|v| (s.color(vertex_map[v]) != s.color(v)) != swaps) {
        return Err(InvolutionError::MixedColorAction);
    }
    let kind = if swaps { InvolutionKind::ColorSwapping } else { InvolutionKind::ColorPreserving };

    let nf = s.num_faces();
    let mut face_map = vec![0; nf];
    let mut corner_map = vec![[0usize; 4]; nf];
    for f in 0..nf {
        let cycle = s.face(f).cycle;
        let image = cycle.map(|v| vertex_map[v]);
        let g = s.face_with_vertices(image).ok_or(InvolutionError::NotFacePreserving(f))?;
        let target = s.face(g).cycle;
        for c in 0..4 {
            corner_map[f][c] = target.iter().position(|&v| v == image[c]).expect("same vertex set");
        }
        // Orientation reversal: consecutive corners map to decreasing positions.
        let reversed = (0..4).all(|c| corner_map[f][(c + 1) % 4] == (corner_map[f][c] + 3) % 4);
        if !reversed {
            return Err(InvolutionError::OrientationNotReversed(f));
        }
        face_map[f] = g;
    }
    for f in 0..nf {
        let rho = s.rho(f);
        let expected = match kind {
            InvolutionKind::ColorPreserving => rho.conj(),
            InvolutionKind::ColorSwapping => Complex64::new(1.0, 0.0) / rho.conj(),
        };
        let found = s.rho(face_map[f]);
        if (found - expected).norm() > tol * expected.norm().max(1.0) {
            return Err(InvolutionError::RhoConditionViolated { face: f, expected, found });
        }
    }

    let edge_map = s
        .edges()
        .iter()
        .map(|e| {
            s.edge_between(vertex_map[e.black], vertex_map[e.white])
                .expect("faces map to faces, so edges map to edges")
        })
        .collect::<Vec<_>>();
    let medial_map = (0..4 * nf)
        .map(|e| {
            let (f, c) = medial_face_corner(e);
            let image = medial_edge(face_map[f], corner_map[f][c]);
            let tail = medial_endpoints(s, e).0;
            Step { edge: image, forward: edge_map[tail] == medial_endpoints(s, image).0 }
        })
        .collect();

    Ok(Involution {
        kind,
        vertex_map: vertex_map.to_vec(),
        face_map,
        corner_map,
        medial_map,
        edge_map,
        surface: s.fingerprint(),
    })
}

/// One piece of the fixed set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Segment {
    /// A quad-graph edge fixed pointwise.
    Edge { edge: EdgeId },
    /// The black (`black = true`) or white diagonal of a fixed face.
    Diagonal { face: FaceId, black: bool },
    /// The bimedian of a fixed face joining the midpoints of local edges
    /// `local` and `local + 2`.
    Bimedian { face: FaceId, local: usize },
}

/// A connected component of the fixed set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Oval {
    pub segments: Vec<Segment>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FixedSet {
    pub kind: InvolutionKind,
    pub fixed_vertices: Vec<VertexId>,
    pub fixed_edges: Vec<EdgeId>,
    pub fixed_faces: Vec<FaceId>,
    pub ovals: Vec<Oval>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PredictedH {
    pub rank: usize,
    /// True when every diagonal entry of `H` vanishes.
    pub diag_zero: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Classification {
    #[serde(rename = "type")]
    pub kind: InvolutionKind,
    pub k: usize,
    pub dividing: bool,
    pub genus: usize,
    pub predicted_h: PredictedH,
}

/// Rank and diagonal of the mixing matrix expected from the topology.
pub fn predicted_h(genus: usize, k: usize, dividing: bool) -> PredictedH {
    if dividing {
        PredictedH { rank: genus + 1 - k, diag_zero: true }
    } else if k > 0 {
        PredictedH { rank: genus + 1 - k, diag_zero: false }
    } else {
        PredictedH { rank: if genus.is_multiple_of(2) { genus } else { genus - 1 }, diag_zero: true }
    }
}

/// Harnack's inequality plus the parity and extreme-case constraints.
pub fn harnack_holds(genus: usize, k: usize, dividing: bool) -> bool {
    k <= genus + 1
        && (k != genus + 1 || dividing)
        && (k != 0 || !dividing)
        && (!dividing || (genus + 1 - k).is_multiple_of(2))
}

impl Involution {
    pub fn kind(&self) -> InvolutionKind {
        self.kind
    }

    pub fn vertex_map(&self) -> &[VertexId] {
        &self.vertex_map
    }

    pub fn face_map(&self) -> &[FaceId] {
        &self.face_map
    }

    pub fn edge_map(&self) -> &[EdgeId] {
        &self.edge_map
    }

    pub fn belongs_to(&self, s: &QuadSurface) -> bool {
        self.surface == s.fingerprint()
    }

    /// Image of a directed medial edge.
    pub fn apply_step(&self, st: Step) -> Step {
        let img = self.medial_map[st.edge];
        Step { edge: img.edge, forward: img.forward == st.forward }
    }

    pub fn apply_cycle(&self, c: &MedialCycle) -> MedialCycle {
        let steps = c.steps().iter().map(|&st| self.apply_step(st)).collect();
        MedialCycle::from_steps_unchecked(c.surface_fingerprint(), steps)
    }

    /// Pullback `(tau^* w)(e) = w(tau(e))`.
    pub fn pullback(&self, form: &DiamondForm) -> DiamondForm {
        let nf = form.s.len();
        let mut out = DiamondForm::zero(nf);
        for f in 0..nf {
            out.s[f] = form.step_value(self.apply_step(Step { edge: medial_edge(f, 1), forward: true }));
            out.t[f] = form.step_value(self.apply_step(Step { edge: medial_edge(f, 0), forward: true }));
        }
        out
    }

    pub fn fixed_set(&self, s: &QuadSurface) -> Result<FixedSet, InvolutionError> {
        let fixed_vertices: Vec<_> = (0..s.num_vertices()).filter(|&v| self.vertex_map[v] == v).collect();
        let fixed_edges: Vec<_> = (0..s.num_edges()).filter(|&e| self.edge_map[e] == e).collect();
        let fixed_faces: Vec<_> = (0..s.num_faces()).filter(|&f| self.face_map[f] == f).collect();

        // Nodes are fixed vertices (type 1) or fixed edge midpoints (type 2).
        let mut links: Vec<(usize, usize, Segment)> = Vec::new();
        match self.kind {
            InvolutionKind::ColorPreserving => {
                for &e in &fixed_edges {
                    let edge = s.edge(e);
                    links.push((edge.black, edge.white, Segment::Edge { edge: e }));
                }
                for &f in &fixed_faces {
                    let [bm, wm, bp, wp] = s.face(f).cycle;
                    if self.vertex_map[bm] == bm && self.vertex_map[bp] == bp {
                        links.push((bm, bp, Segment::Diagonal { face: f, black: true }));
                    }
                    if self.vertex_map[wm] == wm && self.vertex_map[wp] == wp {
                        links.push((wm, wp, Segment::Diagonal { face: f, black: false }));
                    }
                }
            }
            InvolutionKind::ColorSwapping => {
                for &f in &fixed_faces {
                    let fixed_local: Vec<usize> =
                        (0..4).filter(|&j| self.edge_map[s.face_edge(f, j)] == s.face_edge(f, j)).collect();
                    if fixed_local.len() != 2 || fixed_local[1] != fixed_local[0] + 2 {
                        return Err(InvolutionError::FixedSetNotManifold);
                    }
                    let j = fixed_local[0];
                    links.push((
                        s.face_edge(f, j),
                        s.face_edge(f, j + 2),
                        Segment::Bimedian { face: f, local: j },
                    ));
                }
            }
        }

        let mut adjacency: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        match self.kind {
            InvolutionKind::ColorPreserving => {
                for &v in &fixed_vertices {
                    adjacency.insert(v, Vec::new());
                }
            }
            InvolutionKind::ColorSwapping => {
                for &e in &fixed_edges {
                    adjacency.insert(e, Vec::new());
                }
            }
        }
        for (i, &(u, v, _)) in links.iter().enumerate() {
            for node in [u, v] {
                adjacency.get_mut(&node).ok_or(InvolutionError::FixedSetNotManifold)?.push(i);
            }
        }
        if adjacency.values().any(|l| l.len() != 2) {
            return Err(InvolutionError::FixedSetNotManifold);
        }

        // Walk each component in order.
        let mut used = vec![false; links.len()];
        let mut ovals = Vec::new();
        for start in 0..links.len() {
            if used[start] {
                continue;
            }
            let mut segments = Vec::new();
            let mut cur = start;
            let mut node = links[start].1;
            loop {
                used[cur] = true;
                segments.push(links[cur].2);
                let next = adjacency[&node].iter().copied().find(|&l| l != cur || links[l].0 == links[l].1);
                let next = match next {
                    Some(n) if !used[n] => n,
                    _ => break,
                };
                node = if links[next].0 == node { links[next].1 } else { links[next].0 };
                cur = next;
            }
            ovals.push(Oval { segments });
        }
        Ok(FixedSet { kind: self.kind, fixed_vertices, fixed_edges, fixed_faces, ovals })
    }

    /// Number of components of the surface cut along the fixed set.
    pub fn cut_components(&self, s: &QuadSurface, fixed: &FixedSet) -> usize {
        // Split faces get two nodes; `side` says which half a corner is on.
        let nf = s.num_faces();
        let mut split: HashMap<FaceId, [usize; 4]> = HashMap::new();
        for seg in fixed.ovals.iter().flat_map(|o| &o.segments) {
            match *seg {
                Segment::Diagonal { face, black } => {
                    // Halves are labelled by the swapped corners.
                    let side = if black { [2, 0, 2, 1] } else { [0, 2, 1, 2] };
                    split.insert(face, side);
                }
                Segment::Bimedian { face, local } => {
                    let mut side = [0; 4];
                    for c in 0..4 {
                        side[c] = usize::from((c + 4 - local - 1) % 4 >= 2);
                    }
                    split.insert(face, side);
                }
                Segment::Edge { .. } => {}
            }
        }
        let node = |f: FaceId, corner: usize| -> usize {
            match split.get(&f) {
                Some(side) => {
                    let sd = side[corner];
                    debug_assert!(sd < 2, "diagonal corners carry no side");
                    2 * f + sd
                }
                None => 2 * f,
            }
        };
        let mut uf = UnionFind::new(2 * nf);
        let fixed_edge: Vec<bool> = (0..s.num_edges()).map(|e| self.edge_map[e] == e).collect();
        for (e, edge) in s.edges().iter().enumerate() {
            let [(f, j), (g, k)] = edge.sides;
            let endpoints_f = [j, (j + 1) % 4];
            let endpoints_g = [k, (k + 1) % 4];
            match self.kind {
                InvolutionKind::ColorPreserving => {
                    if fixed_edge[e] {
                        continue;
                    }
                    // The non-fixed endpoint decides the half on both sides.
                    for &cf in &endpoints_f {
                        let v = s.face(f).cycle[cf];
                        if self.vertex_map[v] == v {
                            continue;
                        }
                        let cg = endpoints_g.iter().copied().find(|&c| s.face(g).cycle[c] == v).unwrap();
                        uf.union(node(f, cf), node(g, cg));
                        break;
                    }
                }
                InvolutionKind::ColorSwapping => {
                    for &cf in &endpoints_f {
                        let v = s.face(f).cycle[cf];
                        let cg = endpoints_g.iter().copied().find(|&c| s.face(g).cycle[c] == v).unwrap();
                        uf.union(node(f, cf), node(g, cg));
                    }
                }
            }
        }
        let mut roots: Vec<usize> = (0..nf)
            .flat_map(|f| {
                if split.contains_key(&f) {
                    vec![2 * f, 2 * f + 1]
                } else {
                    vec![2 * f]
                }
            })
            .map(|n| uf.find(n))
            .collect();
        roots.sort_unstable();
        roots.dedup();
        roots.len()
    }

    pub fn classify(&self, s: &QuadSurface) -> Result<Classification, InvolutionError> {
        let fixed = self.fixed_set(s)?;
        let components = self.cut_components(s, &fixed);
        if components == 0 || components > 2 {
            return Err(InvolutionError::InternalComponentCount(components));
        }
        let genus = s.genus();
        let k = fixed.ovals.len();
        let dividing = components == 2;
        if !harnack_holds(genus, k, dividing) {
            return Err(InvolutionError::HarnackViolated { k, genus, dividing });
        }
        Ok(Classification { kind: self.kind, k, dividing, genus, predicted_h: predicted_h(genus, k, dividing) })
    }

    /// Corner of `face_map[f]` that corner `c` of `f` maps to.
    pub fn corner_image(&self, f: FaceId, c: usize) -> usize {
        self.corner_map[f][c]
    }

    /// True when the image of a black-type medial edge is black-type.
    pub fn preserves_edge_types(&self) -> bool {
        self.medial_map.iter().enumerate().all(|(e, img)| {
            let (_, c) = medial_face_corner(e);
            let (_, ci) = medial_face_corner(img.edge);
            is_black_type(c) == is_black_type(ci)
        })
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.parent[r] != r {
            r = self.parent[r];
        }
        let mut y = x;
        while self.parent[y] != r {
            let next = self.parent[y];
            self.parent[y] = r;
            y = next;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}
