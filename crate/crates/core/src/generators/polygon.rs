//! Non-dividing surfaces from a `4g'`-gon with opposite sides identified.
//!
//! The polygon is fanned from its center `C` into `4g'` triangles
//! `(C, P_i, P_{i+1})`, each subdivided into `N^2` small triangles. A point of
//! fan triangle `i` has integer barycentric coordinates `(a, b, c)` with
//! respect to `(C, P_i, P_{i+1})`, `a + b + c = N`. Identifications:
//!
//! * spokes: `(a, b, 0)` in triangle `i` is `(a, 0, b)` in triangle `i - 1`;
//! * sides: `(0, b, c)` in triangle `i` is `(0, c, b)` in triangle `i + 2g'`.
//!
//! The reflection across the diagonal through `P_0` and `C` sends `(a, b, c)`
//! in triangle `i` to `(a, c, b)` in triangle `-i - 1`; its fixed set is the
//! diagonal, a single non-separating oval.
//!
//! Each handle removes an interior triangle and its mirror image and joins
//! the two holes by a tube of triangular rings whose middle ring is fixed,
//! adding one to the genus and one oval.

use std::collections::HashMap;

use serde_json::json;

use super::trimesh::{equilateral_quad_surface, lift_vertex_map};
use super::{GeneratedSurface, GeneratorError};
use crate::involution::{check_involution, RHO_TOLERANCE};

/// Subdivision level of each fan triangle.
const N: usize = 4;

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, x: usize) -> usize {
        let p = self.0[x];
        if p == x {
            return x;
        }
        let r = self.find(p);
        self.0[x] = r;
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }
}

type Triangle = [usize; 3];

/// The triangulated polygon surface: vertex count, triangles, the
/// reflection as a vertex map and one interior triangle per fan.
fn polygon_mesh(g_prime: usize) -> (usize, Vec<Triangle>, Vec<usize>, Vec<Triangle>) {
    let fans = 4 * g_prime;
    let per_fan = (N + 1) * (N + 2) / 2;
    // Raw point ids: fan * per_fan + local index of (a, b).
    let mut local = HashMap::new();
    for a in 0..=N {
        for b in 0..=N - a {
            let k = local.len();
            local.insert((a, b), k);
        }
    }
    let raw = |i: usize, a: usize, b: usize| (i % fans) * per_fan + local[&(a, b)];
    let mut uf = UnionFind((0..fans * per_fan).collect());
    for i in 0..fans {
        for a in 0..=N {
            let b = N - a;
            // (a, b, 0) in i  ~  (a, 0, b) in i - 1
            uf.union(raw(i, a, b), raw(i + fans - 1, a, 0));
        }
        for b in 0..=N {
            let c = N - b;
            // (0, b, c) in i  ~  (0, c, b) in i + 2g'
            uf.union(raw(i, 0, b), raw(i + 2 * g_prime, 0, c));
        }
    }
    let mut class_id = HashMap::new();
    let mut vertex_of = vec![0; fans * per_fan];
    for (p, slot) in vertex_of.iter_mut().enumerate() {
        let r = uf.find(p);
        let next = class_id.len();
        *slot = *class_id.entry(r).or_insert(next);
    }
    let nv = class_id.len();
    let v = |i: usize, a: usize, b: usize| vertex_of[raw(i, a, b)];

    let mut sigma = vec![usize::MAX; nv];
    for i in 0..fans {
        for a in 0..=N {
            for b in 0..=N - a {
                let c = N - a - b;
                let image = v(fans - 1 - i, a, c);
                let x = v(i, a, b);
                debug_assert!(sigma[x] == usize::MAX || sigma[x] == image, "reflection respects the gluing");
                sigma[x] = image;
            }
        }
    }

    let mut triangles = Vec::new();
    // The interior up-triangle of each fan, kept for handle attachment.
    let mut interior = Vec::new();
    for i in 0..fans {
        for a in 0..N {
            for b in 0..N - a {
                // Up triangle with corner sum N - 1 at (a, b, c).
                let t = [v(i, a + 1, b), v(i, a, b + 1), v(i, a, b)];
                if a == 1 && b == 1 {
                    interior.push(t);
                }
                triangles.push(t);
                if a + b + 2 <= N {
                    // Down triangle with corner sum N - 2.
                    triangles.push([v(i, a, b + 1), v(i, a + 1, b), v(i, a + 1, b + 1)]);
                }
            }
        }
    }
    (nv, triangles, sigma, interior)
}

pub fn gen_polygon_identification(g_prime: usize, handles: usize) -> Result<GeneratedSurface, GeneratorError> {
    if g_prime == 0 {
        return Err(GeneratorError::ParameterInvalid("g' must be at least 1".into()));
    }
    if handles > 2 * g_prime {
        return Err(GeneratorError::ParameterInvalid(format!(
            "at most {} handles fit on a {}-gon",
            2 * g_prime,
            4 * g_prime
        )));
    }
    let (mut nv, mut triangles, mut sigma, interior) = polygon_mesh(g_prime);

    for h in 0..handles {
        let t = interior[h];
        let mirror = [sigma[t[0]], sigma[t[2]], sigma[t[1]]];
        let same = |x: &[usize; 3], y: &[usize; 3]| {
            let mut a = *x;
            let mut b = *y;
            a.sort_unstable();
            b.sort_unstable();
            a == b
        };
        triangles.retain(|x| !same(x, &t) && !same(x, &mirror));
        // Rings 0..=4: ring 0 is t, ring 4 its mirror image, ring 2 fixed.
        let mut rings = vec![t.to_vec()];
        for _ in 1..4 {
            rings.push((nv..nv + 3).collect());
            nv += 3;
        }
        rings.push(t.iter().map(|&x| sigma[x]).collect());
        sigma.extend([usize::MAX; 9]);
        for k in 0..3 {
            sigma[rings[1][k]] = rings[3][k];
            sigma[rings[3][k]] = rings[1][k];
            sigma[rings[2][k]] = rings[2][k];
        }
        let mut band = Vec::new();
        for j in 0..2 {
            for k in 0..3 {
                let k1 = (k + 1) % 3;
                band.push([rings[j][k], rings[j][k1], rings[j + 1][k1]]);
                band.push([rings[j][k], rings[j + 1][k1], rings[j + 1][k]]);
            }
        }
        let mirrored: Vec<[usize; 3]> = band.iter().map(|&[a, b, c]| [sigma[a], sigma[c], sigma[b]]).collect();
        triangles.extend(band);
        triangles.extend(mirrored);
    }

    let (surface, _) = equilateral_quad_surface(nv, &triangles)?;
    let map = lift_vertex_map(nv, &triangles, &sigma)?;
    let tau = check_involution(&surface, &map, RHO_TOLERANCE)?;
    GeneratedSurface::with_involution(
        "polygon-identification",
        json!({ "g_prime": g_prime, "handles": handles, "subdivision": N }),
        surface,
        tau,
        true,
        Vec::new(),
    )
}
