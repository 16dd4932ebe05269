//! Flat tori from the `n x m` square grid.
//!
//! Vertex `(x, y)` has id `y * n + x` and is black when `x + y` is even. Every
//! square gets the same `rho`. The involutions are
//!
//! | kind             | map                 | type | ovals | basis `(a, b)`  |
//! |------------------|---------------------|------|-------|-----------------|
//! | `EdgeReflection` | `(x, -y)`           | 1    | 2     | `(h, v)`        |
//! | `Transpose`      | `(y, x)`            | 1    | 1     | `(h + v, v)`    |
//! | `Glide`          | `(x + n/2, -y)`     | 1    | 0     | `(h, v)`        |
//! | `Bimedian`       | `(1 - x, y)`        | 2    | 2     | `(v, -h)`       |
//!
//! where `h` is the horizontal medial loop along the row `y = 0` and `v` the
//! vertical one along the column `x = 0`, with `int(h, v) = 1`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::{GeneratedSurface, GeneratorError};
use crate::homology::{combine, verify_adapted, SymplecticBasis};
use crate::involution::{check_involution, RHO_TOLERANCE};
use crate::medial::{medial_edge, medial_endpoints, MedialCycle, Step};
use crate::surface::{Color, EdgeId, Face, QuadSurface};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TorusInvolution {
    None,
    EdgeReflection,
    Transpose,
    Glide,
    Bimedian,
}

impl std::str::FromStr for TorusInvolution {
    type Err = GeneratorError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "none" => TorusInvolution::None,
            "edge-reflection" => TorusInvolution::EdgeReflection,
            "transpose" => TorusInvolution::Transpose,
            "glide" => TorusInvolution::Glide,
            "bimedian" => TorusInvolution::Bimedian,
            _ => return Err(GeneratorError::ParameterInvalid(format!("unknown torus involution {s:?}"))),
        })
    }
}

struct Grid {
    n: usize,
    m: usize,
}

impl Grid {
    fn id(&self, x: i64, y: i64) -> usize {
        let x = x.rem_euclid(self.n as i64) as usize;
        let y = y.rem_euclid(self.m as i64) as usize;
        y * self.n + x
    }

    fn xy(&self, v: usize) -> (i64, i64) {
        ((v % self.n) as i64, (v / self.n) as i64)
    }
}

fn check_parameters(n: usize, m: usize, rho: Complex64, kind: TorusInvolution) -> Result<(), GeneratorError> {
    if n < 4 || m < 4 || !n.is_multiple_of(2) || !m.is_multiple_of(2) {
        return Err(GeneratorError::ParameterParityInvalid(format!("n = {n}, m = {m} must be even and at least 4")));
    }
    match kind {
        TorusInvolution::Transpose if n != m => {
            return Err(GeneratorError::ParameterParityInvalid(format!("transpose needs n = m, got {n} x {m}")));
        }
        TorusInvolution::Glide if !(n / 2).is_multiple_of(2) => {
            return Err(GeneratorError::ParameterParityInvalid(format!(
                "glide by n/2 = {} swaps colors; n/2 must be even",
                n / 2
            )));
        }
        _ => {}
    }
    if !(rho.re > 0.0) {
        return Err(GeneratorError::Surface(crate::surface::SurfaceError::NonPositiveRhoRealPart {
            face: 0,
            re: rho.re,
        }));
    }
    let compatible = match kind {
        TorusInvolution::None => true,
        TorusInvolution::EdgeReflection | TorusInvolution::Transpose | TorusInvolution::Glide => rho.im == 0.0,
        TorusInvolution::Bimedian => (rho.norm_sqr() - 1.0).abs() <= RHO_TOLERANCE,
    };
    if !compatible {
        return Err(GeneratorError::RhoIncompatibleWithKind(rho));
    }
    Ok(())
}

/// The bare torus surface.
pub fn flat_torus_surface(n: usize, m: usize, rho: Complex64) -> Result<QuadSurface, GeneratorError> {
    check_parameters(n, m, rho, TorusInvolution::None)?;
    let grid = Grid { n, m };
    let colors =
        (0..n * m).map(|v| if (v % n + v / n).is_multiple_of(2) { Color::Black } else { Color::White }).collect();
    let mut faces = Vec::with_capacity(n * m);
    for y in 0..m as i64 {
        for x in 0..n as i64 {
            let ring = [grid.id(x, y), grid.id(x + 1, y), grid.id(x + 1, y + 1), grid.id(x, y + 1)];
            let mut cycle = ring;
            if (x + y) % 2 != 0 {
                cycle.rotate_left(1);
            }
            faces.push(Face { cycle, rho });
        }
    }
    Ok(QuadSurface::new(colors, faces)?)
}

/// Closed medial walk through the quad-graph edges `edges`, consecutive
/// entries being consecutive sides of a common face.
pub(crate) fn walk_through_edges(s: &QuadSurface, edges: &[EdgeId]) -> MedialCycle {
    let k = edges.len();
    let mut steps = Vec::with_capacity(k);
    for i in 0..k {
        let (from, to) = (edges[i], edges[(i + 1) % k]);
        let step = s
            .edge(from)
            .sides
            .iter()
            .flat_map(|&(f, _)| (0..4).map(move |c| medial_edge(f, c)))
            .find_map(|e| {
                let (t, h) = medial_endpoints(s, e);
                if (t, h) == (from, to) {
                    Some(Step { edge: e, forward: true })
                } else if (h, t) == (from, to) {
                    Some(Step { edge: e, forward: false })
                } else {
                    None
                }
            })
            .expect("consecutive edges share a face corner");
        steps.push(step);
    }
    MedialCycle::new(s, steps).expect("walk through consecutive edges is closed")
}

/// Horizontal loop along `y = 0` and vertical loop along `x = 0`.
fn grid_loops(s: &QuadSurface, grid: &Grid) -> (MedialCycle, MedialCycle) {
    let e = |a: (i64, i64), b: (i64, i64)| {
        s.edge_between(grid.id(a.0, a.1), grid.id(b.0, b.1)).expect("grid neighbors share an edge")
    };
    let mut horizontal = Vec::new();
    for x in 0..grid.n as i64 {
        horizontal.push(e((x, 0), (x + 1, 0)));
        horizontal.push(e((x + 1, 0), (x + 1, 1)));
    }
    let mut vertical = Vec::new();
    for y in 0..grid.m as i64 {
        vertical.push(e((0, y), (0, y + 1)));
        vertical.push(e((0, y + 1), (1, y + 1)));
    }
    (walk_through_edges(s, &horizontal), walk_through_edges(s, &vertical))
}

pub fn gen_flat_torus(n: usize, m: usize, rho: Complex64, kind: TorusInvolution) -> Result<GeneratedSurface, GeneratorError> {
    check_parameters(n, m, rho, kind)?;
    let surface = flat_torus_surface(n, m, rho)?;
    let grid = Grid { n, m };
    let (h, v) = grid_loops(&surface, &grid);
    let parameters = json!({ "n": n, "m": m, "rho": [rho.re, rho.im], "involution": kind });

    let image = |f: &dyn Fn(i64, i64) -> (i64, i64)| -> Vec<usize> {
        (0..n * m)
            .map(|p| {
                let (x, y) = grid.xy(p);
                let (u, w) = f(x, y);
                grid.id(u, w)
            })
            .collect()
    };
    let half = n as i64 / 2;
    let (map, basis) = match kind {
        TorusInvolution::None => {
            let basis = SymplecticBasis { a: vec![h], b: vec![v] };
            basis.verify(&surface)?;
            return Ok(GeneratedSurface {
                generator: "flat-torus".into(),
                parameters,
                surface,
                involution: None,
                basis,
                h: None,
                orthodiagonal: rho.im == 0.0,
                warnings: Vec::new(),
            });
        }
        TorusInvolution::EdgeReflection => (image(&|x, y| (x, -y)), SymplecticBasis { a: vec![h], b: vec![v] }),
        TorusInvolution::Transpose => {
            let a = combine(&surface, &[h, v.clone()], &[1, 1]);
            (image(&|x, y| (y, x)), SymplecticBasis { a: vec![a], b: vec![v] })
        }
        TorusInvolution::Glide => (image(&|x, y| (x + half, -y)), SymplecticBasis { a: vec![h], b: vec![v] }),
        TorusInvolution::Bimedian => {
            (image(&|x, y| (1 - x, y)), SymplecticBasis { a: vec![v], b: vec![h.reversed()] })
        }
    };
    let tau = check_involution(&surface, &map, RHO_TOLERANCE)?;
    let hmat = verify_adapted(&surface, &tau, &basis)?;
    Ok(GeneratedSurface {
        generator: "flat-torus".into(),
        parameters,
        surface,
        involution: Some(tau),
        basis,
        h: Some(hmat),
        orthodiagonal: rho.im == 0.0,
        warnings: Vec::new(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::intmat::IntMatrix;
    use crate::involution::InvolutionKind;

    fn one() -> Complex64 {
        Complex64::new(1.0, 0.0)
    }

    #[test]
    fn four_by_four_counts() {
        let s = flat_torus_surface(4, 4, one()).unwrap();
        assert_eq!((s.num_vertices(), s.num_edges(), s.num_faces()), (16, 32, 16));
        assert_eq!(s.genus(), 1);
        assert!((0..16).all(|f| (s.rho(f) - one()).norm() < 1e-15));
    }

    #[test]
    fn involution_kinds_and_mixing_matrices() {
        let cases = [
            (TorusInvolution::EdgeReflection, InvolutionKind::ColorPreserving, 2, true, 0),
            (TorusInvolution::Transpose, InvolutionKind::ColorPreserving, 1, false, 1),
            (TorusInvolution::Glide, InvolutionKind::ColorPreserving, 0, false, 0),
            (TorusInvolution::Bimedian, InvolutionKind::ColorSwapping, 2, true, 0),
        ];
        for (kind, ty, k, dividing, h) in cases {
            let gs = gen_flat_torus(8, 8, one(), kind).unwrap();
            let tau = gs.involution.as_ref().unwrap();
            let cls = tau.classify(&gs.surface).unwrap();
            assert_eq!(tau.kind(), ty, "{kind:?}");
            assert_eq!((cls.k, cls.dividing), (k, dividing), "{kind:?}");
            assert_eq!(gs.h.unwrap(), IntMatrix::from_rows(&[vec![h]]), "{kind:?}");
        }
    }

    #[test]
    fn parity_and_rho_are_checked() {
        assert!(matches!(
            gen_flat_torus(5, 8, one(), TorusInvolution::None),
            Err(GeneratorError::ParameterParityInvalid(_))
        ));
        assert!(matches!(
            gen_flat_torus(6, 6, one(), TorusInvolution::Glide),
            Err(GeneratorError::ParameterParityInvalid(_))
        ));
        assert!(matches!(
            gen_flat_torus(8, 6, one(), TorusInvolution::Transpose),
            Err(GeneratorError::ParameterParityInvalid(_))
        ));
        assert!(matches!(
            gen_flat_torus(8, 8, Complex64::new(1.0, 0.5), TorusInvolution::EdgeReflection),
            Err(GeneratorError::RhoIncompatibleWithKind(_))
        ));
        assert!(matches!(
            gen_flat_torus(8, 8, Complex64::new(2.0, 0.0), TorusInvolution::Bimedian),
            Err(GeneratorError::RhoIncompatibleWithKind(_))
        ));
    }
}
