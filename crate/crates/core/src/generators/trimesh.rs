//! Delaunay-Voronoi quadrangulation of closed triangulated surfaces.
//!
//! Every mesh edge `pq` becomes the quad `(p, T2, q, T1)`, where `T1` is the
//! triangle containing the directed edge `p -> q` and `T2` the other one. The
//! black vertices are the mesh vertices and the white vertices the triangles
//! (white id = number of mesh vertices + triangle index).
//!
//! With circumcenters as dual points, unfolding `T1` and `T2` into a common
//! plane gives `rho = (cot alpha + cot beta) / 2`, where `alpha`, `beta` are the
//! angles opposite `pq`. This is positive exactly when `alpha + beta < pi`.

use std::collections::HashMap;

use num_complex::Complex64;

use super::GeneratorError;
use crate::surface::{chart_rho, Color, Face, QuadSurface};

#[derive(Debug, Clone, PartialEq)]
pub struct TriMesh {
    pub vertices: Vec<[f64; 3]>,
    pub triangles: Vec<[usize; 3]>,
}

/// An undirected mesh edge `p < q` with the triangle on each side.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MeshEdge {
    pub p: usize,
    pub q: usize,
    /// Triangle containing `p -> q`.
    pub left: usize,
    /// Triangle containing `q -> p`.
    pub right: usize,
}

/// Where the white vertex of each triangle sits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DualPlacement {
    Circumcenter,
    Barycenter,
}

pub struct Quadrangulation {
    pub surface: QuadSurface,
    pub edges: Vec<MeshEdge>,
    pub placement: DualPlacement,
    /// Edges failing the Delaunay condition (empty with circumcenters).
    pub violations: Vec<(usize, usize)>,
}

fn check_indices(nv: usize, triangles: &[[usize; 3]]) -> Result<(), GeneratorError> {
    for (t, tri) in triangles.iter().enumerate() {
        if tri.iter().any(|&v| v >= nv) {
            return Err(GeneratorError::InvalidMesh(format!("triangle {t} has a vertex out of range")));
        }
        if tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2] {
            return Err(GeneratorError::DegenerateTriangle(t));
        }
    }
    Ok(())
}

fn directed_edges(triangles: &[[usize; 3]]) -> Result<HashMap<(usize, usize), usize>, GeneratorError> {
    let mut map = HashMap::new();
    for (t, tri) in triangles.iter().enumerate() {
        for j in 0..3 {
            if map.insert((tri[j], tri[(j + 1) % 3]), t).is_some() {
                return Err(GeneratorError::InvalidMesh(format!(
                    "directed edge {} -> {} occurs twice",
                    tri[j],
                    tri[(j + 1) % 3]
                )));
            }
        }
    }
    Ok(map)
}

/// Edges of a closed oriented triangle mesh, sorted by `(p, q)`.
pub fn mesh_edges(nv: usize, triangles: &[[usize; 3]]) -> Result<Vec<MeshEdge>, GeneratorError> {
    check_indices(nv, triangles)?;
    let directed = directed_edges(triangles)?;
    let mut edges = Vec::with_capacity(directed.len() / 2);
    for (&(u, v), &t) in &directed {
        let Some(&r) = directed.get(&(v, u)) else {
            return Err(GeneratorError::InvalidMesh(format!("edge {u}-{v} is on the boundary")));
        };
        if u < v {
            edges.push(MeshEdge { p: u, q: v, left: t, right: r });
        }
    }
    edges.sort_by_key(|e| (e.p, e.q));
    Ok(edges)
}

/// Boundary loops of an oriented triangle mesh, each following the induced
/// boundary orientation and starting at its smallest vertex.
pub fn boundary_loops(nv: usize, triangles: &[[usize; 3]]) -> Result<Vec<Vec<usize>>, GeneratorError> {
    check_indices(nv, triangles)?;
    let directed = directed_edges(triangles)?;
    let mut next: HashMap<usize, usize> = HashMap::new();
    for &(u, v) in directed.keys() {
        if !directed.contains_key(&(v, u)) && next.insert(u, v).is_some() {
            return Err(GeneratorError::InvalidMesh(format!("boundary is pinched at vertex {u}")));
        }
    }
    let mut starts: Vec<usize> = next.keys().copied().collect();
    starts.sort_unstable();
    let mut seen = std::collections::HashSet::new();
    let mut loops = Vec::new();
    for s in starts {
        if seen.contains(&s) {
            continue;
        }
        let mut lp = vec![s];
        seen.insert(s);
        let mut cur = next[&s];
        while cur != s {
            if !seen.insert(cur) {
                return Err(GeneratorError::InvalidMesh(format!("boundary is pinched at vertex {cur}")));
            }
            lp.push(cur);
            cur = *next
                .get(&cur)
                .ok_or_else(|| GeneratorError::InvalidMesh(format!("boundary ends at vertex {cur}")))?;
        }
        loops.push(lp);
    }
    Ok(loops)
}

fn sub(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn norm(a: [f64; 3]) -> f64 {
    dot(a, a).sqrt()
}

impl TriMesh {
    /// Checks indices and that the mesh is closed and oriented.
    pub fn new(vertices: Vec<[f64; 3]>, triangles: Vec<[usize; 3]>) -> Result<Self, GeneratorError> {
        mesh_edges(vertices.len(), &triangles)?;
        let mesh = TriMesh { vertices, triangles };
        for t in 0..mesh.triangles.len() {
            let [a, b, c] = mesh.triangles[t].map(|v| mesh.vertices[v]);
            let area2 = norm(cross(sub(b, a), sub(c, a)));
            let scale = dot(sub(b, a), sub(b, a)).max(dot(sub(c, a), sub(c, a)));
            if !(area2 > 1e-12 * scale) {
                return Err(GeneratorError::DegenerateTriangle(t));
            }
        }
        Ok(mesh)
    }

    /// Cotangent of the angle at the vertex of triangle `t` opposite the
    /// edge `{p, q}`.
    fn opposite_cot(&self, t: usize, p: usize, q: usize) -> f64 {
        let r = *self.triangles[t].iter().find(|&&v| v != p && v != q).expect("triangle has a third vertex");
        let u = sub(self.vertices[p], self.vertices[r]);
        let w = sub(self.vertices[q], self.vertices[r]);
        dot(u, w) / norm(cross(u, w))
    }

    /// Planar unfolding of the two triangles at `e`: `p = 0`, `q = |pq|`,
    /// the apex of the left triangle in the upper half plane and the apex of
    /// the right one in the lower half plane.
    fn unfold(&self, e: &MeshEdge) -> (Complex64, Complex64, Complex64, Complex64) {
        let apex = |t: usize| *self.triangles[t].iter().find(|&&v| v != e.p && v != e.q).unwrap();
        let p = self.vertices[e.p];
        let pq = sub(self.vertices[e.q], p);
        let len = norm(pq);
        let place = |r: usize, up: bool| {
            let pr = sub(self.vertices[r], p);
            let x = dot(pr, pq) / len;
            let y = norm(cross(pq, pr)) / len;
            Complex64::new(x, if up { y } else { -y })
        };
        (Complex64::new(0.0, 0.0), Complex64::new(len, 0.0), place(apex(e.left), true), place(apex(e.right), false))
    }

    /// `rho` of the quad at `e` with circumcentric duals.
    pub fn circumcentric_rho(&self, e: &MeshEdge) -> f64 {
        0.5 * (self.opposite_cot(e.left, e.p, e.q) + self.opposite_cot(e.right, e.p, e.q))
    }

    /// `rho` of the quad at `e` with barycentric duals.
    pub fn barycentric_rho(&self, e: &MeshEdge) -> Complex64 {
        let (p, q, r1, r2) = self.unfold(e);
        let g1 = (p + q + r1) / 3.0;
        let g2 = (p + q + r2) / 3.0;
        chart_rho(p, g2, q, g1)
    }

    pub fn edges(&self) -> Vec<MeshEdge> {
        mesh_edges(self.vertices.len(), &self.triangles).expect("validated on construction")
    }

    /// Edges whose opposite angles sum to `pi` or more.
    pub fn delaunay_violations(&self) -> Vec<(usize, usize)> {
        self.edges()
            .iter()
            .filter(|e| !(self.circumcentric_rho(e) > DELAUNAY_MARGIN))
            .map(|e| (e.p, e.q))
            .collect()
    }
}

/// Smallest accepted circumcentric `rho`; below this the two circumcenters
/// (nearly) coincide and the quad degenerates.
const DELAUNAY_MARGIN: f64 = 1e-9;

/// Quad-graph on `nv` black and `triangles.len()` white vertices with the
/// given `rho` per edge.
pub(crate) fn dual_quad_surface(
    nv: usize,
    triangles: &[[usize; 3]],
    edges: &[MeshEdge],
    rho: &[Complex64],
) -> Result<QuadSurface, GeneratorError> {
    let mut colors = vec![Color::Black; nv];
    colors.extend(std::iter::repeat_n(Color::White, triangles.len()));
    let faces = edges
        .iter()
        .zip(rho)
        .map(|(e, &rho)| Face { cycle: [e.p, nv + e.right, e.q, nv + e.left], rho })
        .collect();
    Ok(QuadSurface::new(colors, faces)?)
}

/// Vertex map on the quad-graph induced by an orientation-reversing vertex
/// involution `sigma` of the mesh.
pub(crate) fn lift_vertex_map(nv: usize, triangles: &[[usize; 3]], sigma: &[usize]) -> Result<Vec<usize>, GeneratorError> {
    let key = |t: [usize; 3]| {
        let mut k = t;
        k.sort_unstable();
        k
    };
    let index: HashMap<[usize; 3], usize> = triangles.iter().enumerate().map(|(i, &t)| (key(t), i)).collect();
    let mut map: Vec<usize> = sigma.to_vec();
    for t in triangles {
        let image = key(t.map(|v| sigma[v]));
        let j = index
            .get(&image)
            .ok_or_else(|| GeneratorError::InvalidMesh("vertex map does not preserve the triangles".into()))?;
        map.push(nv + j);
    }
    Ok(map)
}

pub fn quadrangulate(mesh: &TriMesh, allow_barycentric: bool) -> Result<Quadrangulation, GeneratorError> {
    let edges = mesh.edges();
    let violations = mesh.delaunay_violations();
    let (placement, rho): (_, Vec<Complex64>) = if violations.is_empty() {
        (DualPlacement::Circumcenter, edges.iter().map(|e| Complex64::new(mesh.circumcentric_rho(e), 0.0)).collect())
    } else if allow_barycentric {
        (DualPlacement::Barycenter, edges.iter().map(|e| mesh.barycentric_rho(e)).collect())
    } else {
        return Err(GeneratorError::DelaunayViolated(violations));
    };
    let surface = dual_quad_surface(mesh.vertices.len(), &mesh.triangles, &edges, &rho)?;
    Ok(Quadrangulation { surface, edges, placement, violations })
}

/// Delaunay-Voronoi quadrangulation; fails on non-Delaunay input.
pub fn gen_delaunay_voronoi(mesh: &TriMesh) -> Result<QuadSurface, GeneratorError> {
    Ok(quadrangulate(mesh, false)?.surface)
}

/// Quadrangulation of a purely combinatorial mesh, every triangle taken
/// equilateral (`rho = 1 / sqrt 3`).
pub(crate) fn equilateral_quad_surface(
    nv: usize,
    triangles: &[[usize; 3]],
) -> Result<(QuadSurface, Vec<MeshEdge>), GeneratorError> {
    let edges = mesh_edges(nv, triangles)?;
    let rho = vec![Complex64::new(1.0 / 3f64.sqrt(), 0.0); edges.len()];
    Ok((dual_quad_surface(nv, triangles, &edges, &rho)?, edges))
}

pub fn octahedron() -> TriMesh {
    let vertices = vec![
        [1.0, 0.0, 0.0],
        [-1.0, 0.0, 0.0],
        [0.0, 1.0, 0.0],
        [0.0, -1.0, 0.0],
        [0.0, 0.0, 1.0],
        [0.0, 0.0, -1.0],
    ];
    let triangles = vec![
        [0, 2, 4],
        [2, 1, 4],
        [1, 3, 4],
        [3, 0, 4],
        [2, 0, 5],
        [1, 2, 5],
        [3, 1, 5],
        [0, 3, 5],
    ];
    TriMesh::new(vertices, triangles).expect("octahedron is a closed mesh")
}

pub fn octahedron_surface() -> Result<QuadSurface, GeneratorError> {
    gen_delaunay_voronoi(&octahedron())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn octahedron_quads_have_rho_one_over_root_three() {
        let s = octahedron_surface().unwrap();
        assert_eq!((s.num_faces(), s.genus()), (12, 0));
        for f in 0..12 {
            assert!((s.rho(f).re - 1.0 / 3f64.sqrt()).abs() < 1e-14);
            assert_eq!(s.rho(f).im, 0.0);
        }
    }

    #[test]
    fn barycentric_rho_has_positive_real_part() {
        let mesh = octahedron();
        for e in mesh.edges() {
            let r = mesh.barycentric_rho(&e);
            assert!(r.re > 0.0);
            // Symmetric configuration: the barycenters sit on the perpendicular
            // bisector, so the quad is orthodiagonal.
            assert!(r.im.abs() < 1e-14);
        }
    }

    /// Two copies of the `k x k` unit grid (`k >= 3`), each square cut along a
    /// diagonal, glued back to back along the boundary square.
    fn pillow(k: usize) -> TriMesh {
        let top = |x: usize, y: usize| y * (k + 1) + x;
        let mut vertices: Vec<[f64; 3]> =
            (0..(k + 1) * (k + 1)).map(|v| [(v % (k + 1)) as f64, (v / (k + 1)) as f64, 0.0]).collect();
        let mut bottom_id = HashMap::new();
        for y in 0..=k {
            for x in 0..=k {
                let on_rim = x == 0 || y == 0 || x == k || y == k;
                let id = if on_rim {
                    top(x, y)
                } else {
                    vertices.push([x as f64, y as f64, 0.0]);
                    vertices.len() - 1
                };
                bottom_id.insert((x, y), id);
            }
        }
        let bottom = |x: usize, y: usize| bottom_id[&(x, y)];
        let mut triangles = Vec::new();
        for y in 0..k {
            for x in 0..k {
                // The two corner squares whose main diagonal would join rim
                // vertices are cut along the other diagonal.
                let (a, b, c, d) = if (x, y) == (0, k - 1) || (x, y) == (k - 1, 0) {
                    ((x + 1, y), (x + 1, y + 1), (x, y + 1), (x, y))
                } else {
                    ((x, y), (x + 1, y), (x + 1, y + 1), (x, y + 1))
                };
                let t = |p: (usize, usize)| top(p.0, p.1);
                let u = |p: (usize, usize)| bottom(p.0, p.1);
                triangles.push([t(a), t(b), t(c)]);
                triangles.push([t(a), t(c), t(d)]);
                triangles.push([u(a), u(c), u(b)]);
                triangles.push([u(a), u(d), u(c)]);
            }
        }
        TriMesh::new(vertices, triangles).unwrap()
    }

    /// Planar circumcenter of three points.
    fn circumcenter(a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> [f64; 2] {
        let d = 2.0 * (a[0] * (b[1] - c[1]) + b[0] * (c[1] - a[1]) + c[0] * (a[1] - b[1]));
        let n = |p: [f64; 2]| p[0] * p[0] + p[1] * p[1];
        [
            (n(a) * (b[1] - c[1]) + n(b) * (c[1] - a[1]) + n(c) * (a[1] - b[1])) / d,
            (n(a) * (c[0] - b[0]) + n(b) * (a[0] - c[0]) + n(c) * (b[0] - a[0])) / d,
        ]
    }

    #[test]
    fn flat_grid_rho_matches_planar_circumcenters() {
        let mesh = pillow(3);
        let xy = |v: usize| [mesh.vertices[v][0], mesh.vertices[v][1]];
        let mut diagonals = Vec::new();
        for e in mesh.edges() {
            let (p, q) = (xy(e.p), xy(e.q));
            let len = ((q[0] - p[0]).powi(2) + (q[1] - p[1]).powi(2)).sqrt();
            let mid = [(p[0] + q[0]) / 2.0, (p[1] + q[1]) / 2.0];
            // Signed distance of each circumcenter from pq, towards its apex.
            let dist = |t: usize| {
                let tri = mesh.triangles[t];
                let r = xy(*tri.iter().find(|&&v| v != e.p && v != e.q).unwrap());
                let c = circumcenter(xy(tri[0]), xy(tri[1]), xy(tri[2]));
                let normal = [-(q[1] - p[1]) / len, (q[0] - p[0]) / len];
                let side = ((r[0] - mid[0]) * normal[0] + (r[1] - mid[1]) * normal[1]).signum();
                side * ((c[0] - mid[0]) * normal[0] + (c[1] - mid[1]) * normal[1])
            };
            let expected = (dist(e.left) + dist(e.right)) / len;
            assert!((mesh.circumcentric_rho(&e) - expected).abs() < 1e-12, "edge {}-{}", e.p, e.q);
            if (q[0] - p[0]).abs() == 1.0 && (q[1] - p[1]).abs() == 1.0 {
                diagonals.push((e.p, e.q));
            }
        }
        // Diagonals see two right angles: the circumcenters coincide.
        let mut violations = mesh.delaunay_violations();
        violations.sort_unstable();
        diagonals.sort_unstable();
        assert_eq!(violations, diagonals);
        assert_eq!(gen_delaunay_voronoi(&mesh).err(), Some(GeneratorError::DelaunayViolated(violations)));
    }
}
