//! Doubling a patch across the mirror plane `z = 0`.
//!
//! The patch lies in `z > 0` except for its boundary loops, which lie in the
//! mirror. Gluing it to its mirror image along the boundary gives a closed
//! surface of genus `2g' + k - 1` whose mirror involution fixes exactly the
//! `k` boundary loops and separates the two halves.

use serde_json::json;

use super::trimesh::{lift_vertex_map, quadrangulate, DualPlacement, TriMesh};
use super::{GeneratedSurface, GeneratorError, TriPatch};
use crate::involution::{check_involution, RHO_TOLERANCE};

/// Coordinates closer than this to the mirror count as on it.
const PLANE_TOLERANCE: f64 = 1e-12;

/// The doubled mesh and the mirror vertex map.
pub fn double_mesh(patch: &TriPatch) -> Result<(TriMesh, Vec<usize>), GeneratorError> {
    let loops = patch.traced_boundary_loops()?;
    let mut on_boundary = vec![false; patch.vertices.len()];
    for &v in loops.iter().flatten() {
        on_boundary[v] = true;
    }
    let declared: std::collections::BTreeSet<usize> = patch.boundary_loops.iter().flatten().copied().collect();
    let traced: std::collections::BTreeSet<usize> = loops.iter().flatten().copied().collect();
    if !patch.boundary_loops.is_empty() && declared != traced {
        return Err(GeneratorError::InvalidMesh("declared boundary loops differ from the mesh boundary".into()));
    }
    for (v, p) in patch.vertices.iter().enumerate() {
        if on_boundary[v] {
            if p[2].abs() > PLANE_TOLERANCE {
                return Err(GeneratorError::BoundaryNotPlanar(v));
            }
        } else if !(p[2] > PLANE_TOLERANCE) {
            return Err(GeneratorError::PatchIntersectsMirror(v));
        }
    }

    let n = patch.vertices.len();
    let mut vertices = patch.vertices.clone();
    let mut sigma: Vec<usize> = (0..n).collect();
    for v in 0..n {
        if on_boundary[v] {
            vertices[v][2] = 0.0;
        } else {
            let [x, y, z] = patch.vertices[v];
            vertices.push([x, y, -z]);
            sigma[v] = vertices.len() - 1;
            sigma.push(v);
        }
    }
    let mut triangles = patch.triangles.clone();
    triangles.extend(patch.triangles.iter().map(|&[a, b, c]| [sigma[a], sigma[c], sigma[b]]));
    Ok((TriMesh::new(vertices, triangles)?, sigma))
}

pub fn gen_reflection_double(patch: &TriPatch) -> Result<GeneratedSurface, GeneratorError> {
    let patch_genus = patch.genus()?;
    let loops = patch.traced_boundary_loops()?.len();
    let (mesh, sigma) = double_mesh(patch)?;
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
    let expected_genus = 2 * patch_genus + loops - 1;
    debug_assert_eq!(quads.surface.genus(), expected_genus);
    let parameters = json!({
        "patch_vertices": patch.vertices.len(),
        "patch_triangles": patch.triangles.len(),
        "patch_genus": patch_genus,
        "boundary_loops": loops,
    });
    GeneratedSurface::with_involution(
        "reflection-double",
        parameters,
        quads.surface,
        tau,
        quads.placement == DualPlacement::Circumcenter,
        warnings,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::polycube::{cap_patch, pants_patch};

    #[test]
    fn pants_double_is_a_genus_two_m_curve() {
        let gs = gen_reflection_double(&pants_patch()).unwrap();
        let cls = gs.involution.as_ref().unwrap().classify(&gs.surface).unwrap();
        assert_eq!((gs.surface.genus(), cls.k, cls.dividing), (2, 3, true));
        assert!(gs.orthodiagonal);
        assert_eq!(gs.h.unwrap(), crate::intmat::IntMatrix::zeros(2, 2));
    }

    #[test]
    fn cap_double_is_a_sphere() {
        let gs = gen_reflection_double(&cap_patch()).unwrap();
        assert_eq!(gs.surface.genus(), 0);
        assert_eq!(gs.involution.unwrap().classify(&gs.surface).unwrap().k, 1);
    }

    #[test]
    fn mirror_problems_are_reported() {
        let mut patch = cap_patch();
        let b = patch.boundary_loops[0][0];
        patch.vertices[b][2] = 0.1;
        assert_eq!(gen_reflection_double(&patch).err(), Some(GeneratorError::BoundaryNotPlanar(b)));

        let mut patch = cap_patch();
        let interior = (0..patch.vertices.len()).find(|v| !patch.boundary_loops[0].contains(v)).unwrap();
        patch.vertices[interior][2] = -0.5;
        assert_eq!(gen_reflection_double(&patch).err(), Some(GeneratorError::PatchIntersectsMirror(interior)));
    }
}
