//! Closed-form expectations checked against independent computations.

use std::collections::BTreeSet;

use num_complex::Complex64;

use realquad::generators::polycube::{handle_patch, pants_patch};
use realquad::generators::{builtin, gen_flat_torus, gen_polygon_identification, GeneratedSurface, TorusInvolution};
use realquad::holomorphic::{dual_basis, solve_holomorphic, EquationOrder};
use realquad::homology::{class_coordinates, describe};
use realquad::involution::Segment;
use realquad::medial::exterior_derivative;
use realquad::{DiamondForm, MedialCycle, QuadSurface};

const N: usize = 8;
const M: usize = 8;

fn torus(kind: TorusInvolution) -> GeneratedSurface {
    gen_flat_torus(N, M, Complex64::new(1.0, 0.0), kind).unwrap()
}

fn id(x: i64, y: i64) -> usize {
    (y.rem_euclid(M as i64) as usize) * N + x.rem_euclid(N as i64) as usize
}

/// Vertices fixed by a grid map, by enumeration.
fn fixed_vertices(map: impl Fn(i64, i64) -> (i64, i64)) -> Vec<usize> {
    let mut out = BTreeSet::new();
    for y in 0..M as i64 {
        for x in 0..N as i64 {
            let (u, w) = map(x, y);
            if id(u, w) == id(x, y) {
                out.insert(id(x, y));
            }
        }
    }
    out.into_iter().collect()
}

#[test]
fn edge_reflection_fixes_two_horizontal_edge_loops() {
    let gs = torus(TorusInvolution::EdgeReflection);
    let fixed = gs.involution.as_ref().unwrap().fixed_set(&gs.surface).unwrap();
    let expected = fixed_vertices(|x, y| (x, -y));
    assert_eq!(expected.len(), 2 * N);
    assert!(expected.iter().all(|&v| v / N == 0 || v / N == M / 2));
    assert_eq!(fixed.fixed_vertices, expected);
    assert_eq!(fixed.fixed_edges.len(), 2 * N);
    assert!(fixed.fixed_faces.is_empty());
    assert_eq!(fixed.ovals.len(), 2);
    for oval in &fixed.ovals {
        assert_eq!(oval.segments.len(), N);
        assert!(oval.segments.iter().all(|s| matches!(s, Segment::Edge { .. })));
    }
}

#[test]
fn glide_has_no_fixed_cells() {
    let gs = torus(TorusInvolution::Glide);
    let fixed = gs.involution.as_ref().unwrap().fixed_set(&gs.surface).unwrap();
    assert!(fixed_vertices(|x, y| (x + N as i64 / 2, -y)).is_empty());
    assert!(fixed.fixed_vertices.is_empty() && fixed.fixed_edges.is_empty() && fixed.fixed_faces.is_empty());
    assert!(fixed.ovals.is_empty());
}

#[test]
fn transpose_fixes_the_main_diagonal() {
    let gs = torus(TorusInvolution::Transpose);
    let s = &gs.surface;
    let fixed = gs.involution.as_ref().unwrap().fixed_set(s).unwrap();
    let expected = fixed_vertices(|x, y| (y, x));
    assert_eq!(expected, (0..N as i64).map(|k| id(k, k)).collect::<Vec<_>>());
    assert_eq!(fixed.fixed_vertices, expected);
    // The squares along x = y, each cut by its diagonal through two fixed
    // vertices. Those vertices have x + y even, so every diagonal is black.
    let diagonal_faces: BTreeSet<usize> = (0..N as i64)
        .map(|k| s.face_with_vertices([id(k, k), id(k + 1, k), id(k + 1, k + 1), id(k, k + 1)]).unwrap())
        .collect();
    assert_eq!(fixed.fixed_faces.iter().copied().collect::<BTreeSet<_>>(), diagonal_faces);
    assert_eq!(fixed.ovals.len(), 1);
    assert_eq!(fixed.ovals[0].segments.len(), N);
    assert!(fixed.ovals[0].segments.iter().all(|s| matches!(s, Segment::Diagonal { black: true, .. })));
}

#[test]
fn bimedian_reflection_fixes_two_vertical_bimedian_loops() {
    let gs = torus(TorusInvolution::Bimedian);
    let fixed = gs.involution.as_ref().unwrap().fixed_set(&gs.surface).unwrap();
    assert!(fixed_vertices(|x, y| (1 - x, y)).is_empty());
    assert!(fixed.fixed_vertices.is_empty());
    // Columns x = 1/2 and x = (n + 1)/2, one face per row each.
    assert_eq!(fixed.fixed_faces.len(), 2 * M);
    assert_eq!(fixed.ovals.len(), 2);
    for oval in &fixed.ovals {
        assert_eq!(oval.segments.len(), M);
        assert!(oval.segments.iter().all(|s| matches!(s, Segment::Bimedian { .. })));
    }
}

#[test]
fn edge_reflection_acts_on_homology_with_h_zero() {
    let gs = torus(TorusInvolution::EdgeReflection);
    let tau = gs.involution.as_ref().unwrap();
    let s = &gs.surface;
    assert_eq!(class_coordinates(s, &tau.apply_cycle(&gs.basis.a[0]), &gs.basis).unwrap(), vec![1, 0]);
    assert_eq!(class_coordinates(s, &tau.apply_cycle(&gs.basis.b[0]), &gs.basis).unwrap(), vec![0, -1]);
}

#[test]
fn derivative_of_the_x_coordinate_on_interior_faces() {
    let gs = torus(TorusInvolution::None);
    let s = &gs.surface;
    let x = |v: usize| (v % N) as f64;
    let f: Vec<Complex64> = (0..s.num_vertices()).map(|v| Complex64::new(x(v), 0.0)).collect();
    let df = exterior_derivative(s, &f);
    let mut interior = 0;
    for (q, face) in s.faces().iter().enumerate() {
        if face.cycle.iter().any(|&v| x(v) == 0.0) && face.cycle.iter().any(|&v| x(v) == (N - 1) as f64) {
            continue;
        }
        interior += 1;
        let [bm, wm, bp, wp] = face.cycle;
        assert_eq!(df.s[q].re, (x(bp) - x(bm)) / 2.0);
        assert_eq!(df.t[q].re, (x(wp) - x(wm)) / 2.0);
        // Both diagonals of a unit square advance one column.
        assert_eq!((df.s[q].re.abs(), df.t[q].re.abs()), (0.5, 0.5));
    }
    assert_eq!(interior, (N - 1) * M);
}

/// Signed sums of a form over the black-type and white-type steps of a
/// cycle, read from its descriptors.
fn hand_periods(s: &QuadSurface, form: &DiamondForm, c: &MedialCycle) -> (Complex64, Complex64) {
    let (mut black, mut white) = (Complex64::default(), Complex64::default());
    for d in describe(s, c) {
        let corner = s.face(d.face).cycle.iter().position(|&v| v == d.corner).unwrap();
        let sign = d.direction as f64;
        if corner % 2 == 1 {
            black += sign * form.s[d.face];
        } else {
            white += sign * form.t[d.face];
        }
    }
    (2.0 * black, 2.0 * white)
}

#[test]
fn constant_form_periods_follow_the_diagonal_directions() {
    // Every black diagonal b- -> b+ rises by one row and every white
    // diagonal w- -> w+ moves one column left. The constant form s = 1,
    // t = i rho is therefore d of F = 2y on black vertices and of
    // G = -2 i rho x on white ones.
    let (n, m) = (8, 6);
    let rho = Complex64::new(1.0, 0.0);
    let gs = gen_flat_torus(n, m, rho, TorusInvolution::None).unwrap();
    let s = &gs.surface;
    let form = DiamondForm::from_black(s, vec![Complex64::new(1.0, 0.0); s.num_faces()]);
    assert!(form.closedness_defect(s) < 1e-15);
    let (h, v) = (&gs.basis.a[0], &gs.basis.b[0]);
    let expected = [
        (h, Complex64::new(0.0, 0.0), -2.0 * Complex64::i() * rho * n as f64),
        (v, Complex64::new(2.0 * m as f64, 0.0), Complex64::new(0.0, 0.0)),
    ];
    for (c, black, white) in expected {
        let p = form.integrate(c);
        assert_eq!((p.black, p.white), (black, white));
        assert_eq!((p.black, p.white), hand_periods(s, &form, c));
    }
}

#[test]
fn normalized_black_form_has_the_requested_a_periods() {
    let gs = gen_flat_torus(8, 6, Complex64::new(0.8, 0.3), TorusInvolution::None).unwrap();
    let s = &gs.surface;
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let form = solve_holomorphic(s, &gs.basis.a, &[one], &[zero], 1e-10).unwrap();
    let (black, white) = hand_periods(s, &form, &gs.basis.a[0]);
    assert!((black - one).norm() < 1e-12);
    assert!(white.norm() < 1e-12);
}

#[test]
fn conjugate_pullback_is_holomorphic_with_conjugate_a_periods() {
    // The dual forms re-solved from the a-periods of conj(tau* omega) must
    // reproduce it.
    for name in ["torus-edge-reflection", "double-pants", "polygon-1-1"] {
        let gs = builtin(name).unwrap();
        let s = &gs.surface;
        let tau = gs.involution.as_ref().unwrap();
        let dual = dual_basis(s, &gs.basis.a, EquationOrder::Natural, 1e-10).unwrap();
        for (k, omega) in dual.black.iter().enumerate() {
            let eta = tau.pullback(omega).conj();
            let periods: Vec<_> = gs.basis.a.iter().map(|a| eta.integrate(a)).collect();
            // tau fixes every a-cycle, so the a-periods are conjugated.
            for (j, p) in periods.iter().enumerate() {
                let want = if j == k { 1.0 } else { 0.0 };
                assert!((p.black - want).norm() < 1e-9 && p.white.norm() < 1e-9, "{name}");
            }
            let black: Vec<_> = periods.iter().map(|p| p.black).collect();
            let white: Vec<_> = periods.iter().map(|p| p.white).collect();
            let again = solve_holomorphic(s, &gs.basis.a, &black, &white, 1e-10).unwrap();
            let diff = eta.s.iter().zip(&again.s).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
            assert!(diff < 1e-9, "{name}: {diff}");
        }
    }
}

#[test]
fn genus_two_double_has_four_normalized_forms() {
    let gs = builtin("double-pants").unwrap();
    let s = &gs.surface;
    let dual = dual_basis(s, &gs.basis.a, EquationOrder::Natural, 1e-10).unwrap();
    assert_eq!(dual.black.len() + dual.white.len(), 4);
    for (k, (fb, fw)) in dual.black.iter().zip(&dual.white).enumerate() {
        for (j, a) in gs.basis.a.iter().enumerate() {
            let d = if j == k { 1.0 } else { 0.0 };
            let (bb, bw) = hand_periods(s, fb, a);
            let (wb, ww) = hand_periods(s, fw, a);
            assert!((bb - d).norm() < 1e-10 && bw.norm() < 1e-10);
            assert!(wb.norm() < 1e-10 && (ww - d).norm() < 1e-10);
        }
    }
}

#[test]
fn doubling_doubles_the_euler_characteristic() {
    for (name, patch) in [("double-pants", pants_patch()), ("double-handle", handle_patch())] {
        let gs = builtin(name).unwrap();
        // Boundary vertices are shared, boundary edges too, and the two
        // counts cancel on each boundary loop.
        let v = patch.vertices.len() as i64;
        let f = patch.triangles.len() as i64;
        let e = (3 * f + patch.boundary_loops.iter().map(|l| l.len() as i64).sum::<i64>()) / 2;
        assert_eq!(gs.surface.euler_characteristic(), 2 * (v - e + f), "{name}");
        assert_eq!(gs.surface.genus(), 2, "{name}");
    }
}

#[test]
fn handles_raise_genus_and_oval_count() {
    for (g_prime, handles) in [(1, 0), (1, 1), (1, 2), (2, 0), (2, 1)] {
        let gs = gen_polygon_identification(g_prime, handles).unwrap();
        let cls = gs.involution.as_ref().unwrap().classify(&gs.surface).unwrap();
        assert_eq!(gs.surface.genus(), g_prime + handles);
        assert_eq!((cls.k, cls.dividing), (1 + handles, false));
    }
}
