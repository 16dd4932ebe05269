//! Completing a first-octant patch by the three coordinate reflections.
//!
//! The eight sign images of the patch close up along the coordinate planes.
//! The composition of the three reflections, `v -> -v`, is an
//! orientation-reversing involution without fixed points.

use std::collections::HashMap;

use serde_json::json;

use super::trimesh::{lift_vertex_map, quadrangulate, DualPlacement, TriMesh};
use super::{GeneratedSurface, GeneratorError, TriPatch};
use crate::involution::{check_involution, RHO_TOLERANCE};

fn key(p: [f64; 3]) -> [u64; 3] {
    // `+ 0.0` turns `-0.0` into `0.0`.
    p.map(|x| (x + 0.0).to_bits())
}

/// The closed mesh and the antipodal vertex map.
pub fn octant_mesh(patch: &TriPatch) -> Result<(TriMesh, Vec<usize>), GeneratorError> {
    let loops = patch.traced_boundary_loops()?;
    for (v, p) in patch.vertices.iter().enumerate() {
        if p.iter().all(|&x| x == 0.0) {
            return Err(GeneratorError::OriginOnSurface(v));
        }
        if p.iter().any(|&x| x < 0.0) {
            return Err(GeneratorError::InvalidMesh(format!("vertex {v} is outside the first octant")));
        }
    }
    for &v in loops.iter().flatten() {
        if !patch.vertices[v].contains(&0.0) {
            return Err(GeneratorError::BoundaryNotOnCoordinatePlanes(v));
        }
    }

    let mut vertices: Vec<[f64; 3]> = Vec::new();
    let mut index: HashMap<[u64; 3], usize> = HashMap::new();
    let mut id_of = |p: [f64; 3]| -> usize {
        let p = p.map(|x| x + 0.0);
        *index.entry(key(p)).or_insert_with(|| {
            vertices.push(p);
            vertices.len() - 1
        })
    };
    let mut triangles = Vec::new();
    for signs in 0..8u32 {
        let s: [f64; 3] = [0, 1, 2].map(|k| if signs >> k & 1 == 1 { -1.0 } else { 1.0 });
        let flips = signs.count_ones() % 2 == 1;
        for &[a, b, c] in &patch.triangles {
            let img = |v: usize| {
                let p = patch.vertices[v];
                [p[0] * s[0], p[1] * s[1], p[2] * s[2]]
            };
            let (ia, ib, ic) = (id_of(img(a)), id_of(img(b)), id_of(img(c)));
            triangles.push(if flips { [ia, ic, ib] } else { [ia, ib, ic] });
        }
    }
    let sigma = vertices
        .iter()
        .map(|p| index[&key(p.map(|x| -x + 0.0))])
        .collect();
    Ok((TriMesh::new(vertices, triangles)?, sigma))
}

pub fn gen_octant_symmetric(patch: &TriPatch) -> Result<GeneratedSurface, GeneratorError> {
    let (mesh, sigma) = octant_mesh(patch)?;
    let quads = quadrangulate(&mesh, true)?;
    let mut warnings = Vec::new();
    if quads.placement == DualPlacement::Barycenter {
        warnings.push(format!(
            "Delaunay condition fails on {} edges; using barycentric dual points",
            quads.violations.len()
        ));
    }
    let map = lift_vertex_map(mesh.vertices.len(), &mesh.triangles, &sigma)?;
    let tau = check_involution(&quads.surface, &map, RHO_TOLERANCE)?;
    let parameters = json!({
        "patch_vertices": patch.vertices.len(),
        "patch_triangles": patch.triangles.len(),
    });
    GeneratedSurface::with_involution(
        "octant-symmetric",
        parameters,
        quads.surface,
        tau,
        quads.placement == DualPlacement::Circumcenter,
        warnings,
    )
}
