//! JSON surface files and report formatting.
//!
//! Surface file:
//!
//! ```json
//! {
//!   "vertices": [{"id": 0, "color": "black"}, ...],
//!   "faces": [{"id": 0, "cycle": [b-, w-, b+, w+], "rho": {"re": 1.0, "im": 0.0}}, ...],
//!   "involution": {"vertex_map": [...]},
//!   "adapted_basis": {
//!     "a": [[{"face": 3, "corner": 7, "direction": 1}, ...], ...],
//!     "b": [...],
//!     "h": [[0]]
//!   },
//!   "metadata": {...}
//! }
//! ```
//!
//! `involution`, `adapted_basis` and `metadata` are optional. A cycle step
//! names a face, the vertex at the corner the medial edge cuts off, and `+1`
//! or `-1` for travelling with or against the canonical orientation.

use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::generators::GeneratedSurface;
use crate::homology::{describe, StepDescriptor, SymplecticBasis};
use crate::intmat::IntMatrix;
use crate::linalg::CMatrix;
use crate::medial::{medial_edge, CycleError, MedialCycle, Step};
use crate::surface::{Color, Face, QuadSurface, SurfaceError};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("cannot read {path}: {message}")]
    Read { path: String, message: String },
    #[error("malformed JSON: {0}")]
    Parse(String),
    #[error("schema violation: {0}")]
    Schema(String),
    #[error(transparent)]
    Surface(#[from] SurfaceError),
    #[error("invalid cycle: {0}")]
    Cycle(#[from] CycleError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexValue {
    pub re: f64,
    pub im: f64,
}

impl From<Complex64> for ComplexValue {
    fn from(z: Complex64) -> Self {
        ComplexValue { re: z.re, im: z.im }
    }
}

impl From<ComplexValue> for Complex64 {
    fn from(z: ComplexValue) -> Self {
        Complex64::new(z.re, z.im)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VertexRecord {
    pub id: usize,
    pub color: Color,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FaceRecord {
    pub id: usize,
    pub cycle: [usize; 4],
    pub rho: ComplexValue,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InvolutionRecord {
    pub vertex_map: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BasisRecord {
    pub a: Vec<Vec<StepDescriptor>>,
    pub b: Vec<Vec<StepDescriptor>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h: Option<IntMatrix>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurfaceFile {
    pub vertices: Vec<VertexRecord>,
    pub faces: Vec<FaceRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub involution: Option<InvolutionRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub adapted_basis: Option<BasisRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metadata: Option<serde_json::Value>,
}

/// A parsed and validated surface file.
pub struct Loaded {
    pub surface: QuadSurface,
    pub vertex_map: Option<Vec<usize>>,
    pub basis: Option<SymplecticBasis>,
    pub h: Option<IntMatrix>,
    pub metadata: Option<serde_json::Value>,
}

fn permutation_check(ids: impl Iterator<Item = usize>, n: usize, what: &str) -> Result<Vec<usize>, IoError> {
    let mut pos = vec![usize::MAX; n];
    for (i, id) in ids.enumerate() {
        if id >= n || pos[id] != usize::MAX {
            return Err(IoError::Schema(format!("{what} ids must be 0..{n} without repeats, found {id}")));
        }
        pos[id] = i;
    }
    Ok(pos)
}

fn cycle_from_descriptors(s: &QuadSurface, steps: &[StepDescriptor]) -> Result<MedialCycle, IoError> {
    let steps = steps
        .iter()
        .map(|d| {
            if d.face >= s.num_faces() {
                return Err(IoError::Schema(format!("cycle step names face {} out of range", d.face)));
            }
            let c = s.face(d.face).cycle.iter().position(|&v| v == d.corner).ok_or_else(|| {
                IoError::Schema(format!("vertex {} is not a corner of face {}", d.corner, d.face))
            })?;
            if d.direction != 1 && d.direction != -1 {
                return Err(IoError::Schema(format!("direction must be 1 or -1, found {}", d.direction)));
            }
            Ok(Step { edge: medial_edge(d.face, c), forward: d.direction == 1 })
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(MedialCycle::new(s, steps)?)
}

impl SurfaceFile {
    pub fn parse(text: &str) -> Result<SurfaceFile, IoError> {
        serde_json::from_str(text).map_err(|e| IoError::Parse(e.to_string()))
    }

    pub fn read(path: &Path) -> Result<SurfaceFile, IoError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| IoError::Read { path: path.display().to_string(), message: e.to_string() })?;
        Self::parse(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("surface files serialize")
    }

    pub fn from_surface(s: &QuadSurface) -> SurfaceFile {
        SurfaceFile {
            vertices: s.colors().iter().enumerate().map(|(id, &color)| VertexRecord { id, color }).collect(),
            faces: s
                .faces()
                .iter()
                .enumerate()
                .map(|(id, f)| FaceRecord { id, cycle: f.cycle, rho: f.rho.into() })
                .collect(),
            involution: None,
            adapted_basis: None,
            metadata: None,
        }
    }

    pub fn from_generated(gs: &GeneratedSurface) -> SurfaceFile {
        let s = &gs.surface;
        let mut file = Self::from_surface(s);
        file.involution = gs.involution.as_ref().map(|t| InvolutionRecord { vertex_map: t.vertex_map().to_vec() });
        file.adapted_basis = Some(BasisRecord {
            a: gs.basis.a.iter().map(|c| describe(s, c)).collect(),
            b: gs.basis.b.iter().map(|c| describe(s, c)).collect(),
            h: gs.h.clone(),
        });
        file.metadata = Some(serde_json::json!({
            "generator": gs.generator,
            "parameters": gs.parameters,
            "orthodiagonal": gs.orthodiagonal,
            "warnings": gs.warnings,
        }));
        file
    }

    /// Builds and validates the surface and decodes the optional parts. The
    /// involution map is returned unchecked.
    pub fn load(&self) -> Result<Loaded, IoError> {
        let nv = self.vertices.len();
        let vpos = permutation_check(self.vertices.iter().map(|v| v.id), nv, "vertex")?;
        let colors: Vec<Color> = vpos.iter().map(|&i| self.vertices[i].color).collect();
        let nf = self.faces.len();
        let fpos = permutation_check(self.faces.iter().map(|f| f.id), nf, "face")?;
        let faces: Vec<Face> = fpos
            .iter()
            .map(|&i| Face { cycle: self.faces[i].cycle, rho: self.faces[i].rho.into() })
            .collect();
        let surface = QuadSurface::new(colors, faces)?;
        let vertex_map = self.involution.as_ref().map(|r| r.vertex_map.clone());
        let (basis, h) = match &self.adapted_basis {
            None => (None, None),
            Some(rec) => {
                let a = rec.a.iter().map(|c| cycle_from_descriptors(&surface, c)).collect::<Result<_, _>>()?;
                let b = rec.b.iter().map(|c| cycle_from_descriptors(&surface, c)).collect::<Result<_, _>>()?;
                (Some(SymplecticBasis { a, b }), rec.h.clone())
            }
        };
        Ok(Loaded { surface, vertex_map, basis, h, metadata: self.metadata.clone() })
    }
}

/// Rounds to 12 significant digits so that reports are stable.
pub fn round12(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 { 0.0 } else { x };
    }
    format!("{x:.11e}").parse().expect("formatted float parses")
}

pub fn complex_json(z: Complex64) -> serde_json::Value {
    serde_json::json!({ "re": round12(z.re), "im": round12(z.im) })
}

pub fn matrix_json(m: &CMatrix) -> serde_json::Value {
    serde_json::Value::Array(
        m.to_rows().into_iter().map(|r| serde_json::Value::Array(r.into_iter().map(complex_json).collect())).collect(),
    )
}

/// Recursively rounds every float in a JSON value.
pub fn round_json(v: &mut serde_json::Value) {
    match v {
        serde_json::Value::Number(n) => {
            if let (Some(x), false) = (n.as_f64(), n.is_i64() || n.is_u64()) {
                *v = serde_json::json!(round12(x));
            }
        }
        serde_json::Value::Array(a) => a.iter_mut().for_each(round_json),
        serde_json::Value::Object(o) => o.values_mut().for_each(round_json),
        _ => {}
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::torus::{gen_flat_torus, TorusInvolution};

    #[test]
    fn generated_surface_round_trips() {
        let gs = gen_flat_torus(4, 4, Complex64::new(1.0, 0.0), TorusInvolution::EdgeReflection).unwrap();
        let file = SurfaceFile::from_generated(&gs);
        let back = SurfaceFile::parse(&file.to_json()).unwrap();
        assert_eq!(back, file);
        let loaded = back.load().unwrap();
        assert_eq!(loaded.surface.fingerprint(), gs.surface.fingerprint());
        assert_eq!(loaded.basis.unwrap(), gs.basis);
        assert_eq!(loaded.vertex_map.unwrap(), gs.involution.unwrap().vertex_map());
    }

    #[test]
    fn schema_errors() {
        assert!(matches!(SurfaceFile::parse("{\"vertices\": []}"), Err(IoError::Parse(_))));
        let text = r#"{"vertices":[{"id":0,"color":"black"},{"id":0,"color":"white"}],"faces":[]}"#;
        assert!(matches!(SurfaceFile::parse(text).unwrap().load(), Err(IoError::Schema(_))));
    }

    #[test]
    fn rounding_keeps_twelve_digits() {
        assert_eq!(round12(0.1 + 0.2), 0.3);
        assert_eq!(round12(1.0 / 3.0), 0.333333333333);
        assert_eq!(round12(-0.0), 0.0);
    }
}
