//! Built-in patches made of unit cubes.
//!
//! The boundary of a union of unit cubes is split into unit squares, and each
//! square is replaced by a pyramid with apex a quarter unit above its center.
//! Every triangle then has a unit base and two sides of length `sqrt 5 / 4`,
//! so all angles are below 84 degrees and any two opposite angles sum to less
//! than `pi`: the result is strictly Delaunay whatever the fold angles. At a
//! concave edge the apexes of the two walls stay distinct, which a height of
//! one half would not guarantee.

use std::collections::{BTreeSet, HashMap};

use super::{GeneratorError, TriPatch};

type Cell = [i64; 3];

const APEX_HEIGHT: f64 = 0.25;

/// Boundary squares of a cube set, corners counter-clockwise seen from
/// outside, with their outward normal axis and sign.
fn boundary_squares(cells: &BTreeSet<Cell>) -> Vec<([[i64; 3]; 4], usize, i64)> {
    let mut out = Vec::new();
    for &c in cells {
        for axis in 0..3 {
            for sign in [1i64, -1] {
                let mut nb = c;
                nb[axis] += sign;
                if cells.contains(&nb) {
                    continue;
                }
                let (b, d) = ((axis + 1) % 3, (axis + 2) % 3);
                let mut base = c;
                if sign > 0 {
                    base[axis] += 1;
                }
                let at = |db: i64, dd: i64| {
                    let mut p = base;
                    p[b] += db;
                    p[d] += dd;
                    p
                };
                let mut sq = [at(0, 0), at(1, 0), at(1, 1), at(0, 1)];
                if sign < 0 {
                    sq.reverse();
                }
                out.push((sq, axis, sign));
            }
        }
    }
    out
}

/// Pyramidized boundary of `cells`, restricted to the squares whose center
/// satisfies `keep`.
pub fn polycube_patch(cells: &BTreeSet<Cell>, keep: impl Fn([f64; 3]) -> bool) -> Result<TriPatch, GeneratorError> {
    let mut vertices: Vec<[f64; 3]> = Vec::new();
    let mut corner_ids: HashMap<[i64; 3], usize> = HashMap::new();
    let mut triangles = Vec::new();
    for (sq, axis, sign) in boundary_squares(cells) {
        let mut center = [0.0; 3];
        for p in &sq {
            for k in 0..3 {
                center[k] += p[k] as f64 / 4.0;
            }
        }
        if !keep(center) {
            continue;
        }
        let ids: Vec<usize> = sq
            .iter()
            .map(|&p| {
                *corner_ids.entry(p).or_insert_with(|| {
                    vertices.push(p.map(|x| x as f64));
                    vertices.len() - 1
                })
            })
            .collect();
        let mut apex = center;
        apex[axis] += APEX_HEIGHT * sign as f64;
        vertices.push(apex);
        let a = vertices.len() - 1;
        for k in 0..4 {
            triangles.push([ids[k], ids[(k + 1) % 4], a]);
        }
    }
    let mut patch = TriPatch { vertices, triangles, boundary_loops: Vec::new() };
    patch.boundary_loops = patch.traced_boundary_loops()?;
    Ok(patch)
}

fn cells(x: std::ops::Range<i64>, y: std::ops::Range<i64>, z: std::ops::Range<i64>, holes: &[Cell]) -> BTreeSet<Cell> {
    let mut out = BTreeSet::new();
    for i in x {
        for j in y.clone() {
            for k in z.clone() {
                out.insert([i, j, k]);
            }
        }
    }
    for h in holes {
        out.remove(h);
    }
    out
}

fn upper_half(c: [f64; 3]) -> bool {
    c[2] > 0.0
}

fn first_octant(c: [f64; 3]) -> bool {
    c.iter().all(|&x| x > 0.0)
}

/// Upper half of a `5 x 3 x 2` slab with two vertical holes: a sphere with
/// three discs removed.
pub fn pants_patch() -> TriPatch {
    let holes: Vec<Cell> = [[1, 1], [3, 1]].iter().flat_map(|&[i, j]| [[i, j, -1], [i, j, 0]]).collect();
    polycube_patch(&cells(0..5, 0..3, -1..1, &holes), upper_half).expect("valid polycube")
}

/// Upper half of a `1 x 1 x 2` column: a disc.
pub fn cap_patch() -> TriPatch {
    polycube_patch(&cells(0..1, 0..1, -1..1, &[]), upper_half).expect("valid polycube")
}

/// Upper half of a `3 x 3 x 6` block with two horizontal tunnels mirrored
/// in `z = 0`: a torus with one disc removed.
pub fn handle_patch() -> TriPatch {
    let holes: Vec<Cell> = (0..3).flat_map(|i| [[i, 1, 1], [i, 1, -2]]).collect();
    polycube_patch(&cells(0..3, 0..3, -3..3, &holes), upper_half).expect("valid polycube")
}

/// One face of the octahedron.
pub fn octahedron_octant_patch() -> TriPatch {
    TriPatch {
        vertices: vec![[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
        triangles: vec![[0, 1, 2]],
        boundary_loops: vec![vec![0, 1, 2]],
    }
}

/// First-octant part of the square frame `[-2, 2]^2 x [-1, 1]` minus
/// `[-1, 1]^2`: a torus.
pub fn frame_octant_patch() -> TriPatch {
    let holes: Vec<Cell> =
        [[-1, -1], [-1, 0], [0, -1], [0, 0]].iter().flat_map(|&[i, j]| [[i, j, -1], [i, j, 0]]).collect();
    polycube_patch(&cells(-2..2, -2..2, -1..1, &holes), first_octant).expect("valid polycube")
}

/// First-octant part of the slab `[-4, 4] x [-2, 2] x [-1, 1]` with three
/// holes: a genus-3 surface.
pub fn frame3_octant_patch() -> TriPatch {
    let mut holes = Vec::new();
    for (i, j) in [(-1, -1), (-1, 0), (0, -1), (0, 0), (2, -1), (2, 0), (-3, -1), (-3, 0)] {
        holes.push([i, j, -1]);
        holes.push([i, j, 0]);
    }
    polycube_patch(&cells(-4..4, -2..2, -1..1, &holes), first_octant).expect("valid polycube")
}
