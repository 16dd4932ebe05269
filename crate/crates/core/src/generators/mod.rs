//! Example surfaces with involutions and adapted homology bases.
//!
//! * [`torus`]: flat square-grid tori with four kinds of reflection.
//! * [`trimesh`]: Delaunay-Voronoi quadrangulation of triangulated surfaces.
//! * [`double`]: a patch with planar boundary glued to its mirror image.
//! * [`octant`]: a first-octant patch completed by the three coordinate
//!   reflections, with the antipodal map.
//! * [`polygon`]: a subdivided `4g'`-gon with opposite sides identified,
//!   reflected across a diagonal, with optional handles across the mirror.
//! * [`polycube`]: built-in patches made of unit cubes.
//!
//! Every generator verifies what it emits: the surface, the involution and
//! the adapted basis all go through the same checks as imported data.

pub mod double;
pub mod octant;
pub mod polycube;
pub mod polygon;
pub mod torus;
pub mod trimesh;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::homology::{AdaptedBasis, HomologyError, SymplecticBasis};
use crate::intmat::IntMatrix;
use crate::involution::{Involution, InvolutionError};
use crate::surface::{QuadSurface, SurfaceError};

pub use double::gen_reflection_double;
pub use octant::gen_octant_symmetric;
pub use polygon::gen_polygon_identification;
pub use torus::{gen_flat_torus, TorusInvolution};
pub use trimesh::{gen_delaunay_voronoi, TriMesh};

#[derive(Debug, Clone, Error, PartialEq)]
pub enum GeneratorError {
    #[error("invalid parameter parity: {0}")]
    ParameterParityInvalid(String),
    #[error("rho = {0} is incompatible with the requested involution")]
    RhoIncompatibleWithKind(num_complex::Complex64),
    #[error("invalid parameter: {0}")]
    ParameterInvalid(String),
    #[error("invalid mesh: {0}")]
    InvalidMesh(String),
    #[error("triangle {0} is degenerate")]
    DegenerateTriangle(usize),
    #[error("Delaunay condition fails on edges {0:?}")]
    DelaunayViolated(Vec<(usize, usize)>),
    #[error("boundary vertex {0} is not on the mirror plane")]
    BoundaryNotPlanar(usize),
    #[error("interior vertex {0} is on or behind the mirror plane")]
    PatchIntersectsMirror(usize),
    #[error("boundary vertex {0} is not on a coordinate plane")]
    BoundaryNotOnCoordinatePlanes(usize),
    #[error("vertex {0} is at the origin")]
    OriginOnSurface(usize),
    #[error(transparent)]
    Surface(#[from] SurfaceError),
    #[error(transparent)]
    Involution(#[from] InvolutionError),
    #[error(transparent)]
    Homology(#[from] HomologyError),
}

/// Triangulated surface with boundary, the input of the symmetric
/// constructions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TriPatch {
    pub vertices: Vec<[f64; 3]>,
    pub triangles: Vec<[usize; 3]>,
    #[serde(default)]
    pub boundary_loops: Vec<Vec<usize>>,
}

impl TriPatch {
    /// Boundary loops traced from the directed edges without a partner.
    pub fn traced_boundary_loops(&self) -> Result<Vec<Vec<usize>>, GeneratorError> {
        trimesh::boundary_loops(self.vertices.len(), &self.triangles)
    }

    pub fn genus(&self) -> Result<usize, GeneratorError> {
        let loops = self.traced_boundary_loops()?;
        let v = self.vertices.len() as i64;
        let f = self.triangles.len() as i64;
        let boundary_edges: i64 = loops.iter().map(|l| l.len() as i64).sum();
        let e = (3 * f + boundary_edges) / 2;
        let chi = v - e + f;
        // chi = 2 - 2g - b
        let g2 = 2 - chi - loops.len() as i64;
        if g2 < 0 || g2 % 2 != 0 {
            return Err(GeneratorError::InvalidMesh(format!("Euler characteristic {chi} is inconsistent")));
        }
        Ok((g2 / 2) as usize)
    }
}

#[derive(Debug, Clone)]
pub struct GeneratedSurface {
    pub generator: String,
    pub parameters: serde_json::Value,
    pub surface: QuadSurface,
    pub involution: Option<Involution>,
    pub basis: SymplecticBasis,
    /// Mixing matrix of the adapted basis, present with an involution.
    pub h: Option<IntMatrix>,
    /// All `rho` real, as produced by circumcentric duals.
    pub orthodiagonal: bool,
    pub warnings: Vec<String>,
}

impl GeneratedSurface {
    pub fn adapted(&self) -> Option<AdaptedBasis> {
        self.h.as_ref().map(|h| AdaptedBasis { basis: self.basis.clone(), h: h.clone() })
    }

    fn with_involution(
        generator: &str,
        parameters: serde_json::Value,
        surface: QuadSurface,
        involution: Involution,
        orthodiagonal: bool,
        warnings: Vec<String>,
    ) -> Result<Self, GeneratorError> {
        let adapted = crate::homology::adapted_basis(&surface, &involution)?;
        Ok(GeneratedSurface {
            generator: generator.to_string(),
            parameters,
            surface,
            involution: Some(involution),
            basis: adapted.basis,
            h: Some(adapted.h),
            orthodiagonal,
            warnings,
        })
    }
}

/// Named built-in examples covering every generator.
pub fn builtin_names() -> &'static [&'static str] {
    &[
        "torus-edge-reflection",
        "torus-8x6",
        "torus-transpose",
        "torus-glide",
        "torus-bimedian",
        "double-pants",
        "double-cap",
        "double-handle",
        "polygon-1-0",
        "polygon-1-1",
        "polygon-2-0",
        "octant-octahedron",
        "octant-frame",
        "octant-frame3",
    ]
}

pub fn builtin(name: &str) -> Result<GeneratedSurface, GeneratorError> {
    use num_complex::Complex64;
    let one = Complex64::new(1.0, 0.0);
    match name {
        "torus-edge-reflection" => gen_flat_torus(8, 8, one, TorusInvolution::EdgeReflection),
        "torus-8x6" => gen_flat_torus(8, 6, one, TorusInvolution::None),
        "torus-transpose" => gen_flat_torus(8, 8, one, TorusInvolution::Transpose),
        "torus-glide" => gen_flat_torus(8, 8, one, TorusInvolution::Glide),
        "torus-bimedian" => gen_flat_torus(8, 8, one, TorusInvolution::Bimedian),
        "double-pants" => gen_reflection_double(&polycube::pants_patch()),
        "double-cap" => gen_reflection_double(&polycube::cap_patch()),
        "double-handle" => gen_reflection_double(&polycube::handle_patch()),
        "polygon-1-0" => gen_polygon_identification(1, 0),
        "polygon-1-1" => gen_polygon_identification(1, 1),
        "polygon-2-0" => gen_polygon_identification(2, 0),
        "octant-octahedron" => gen_octant_symmetric(&polycube::octahedron_octant_patch()),
        "octant-frame" => gen_octant_symmetric(&polycube::frame_octant_patch()),
        "octant-frame3" => gen_octant_symmetric(&polycube::frame3_octant_patch()),
        _ => Err(GeneratorError::ParameterInvalid(format!("unknown example {name:?}"))),
    }
}
