//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs as a plain binary (`harness = false`) so the lines always reach the
//! output. Exits nonzero when any criterion fails.

use std::collections::{HashMap, HashSet, VecDeque};
use std::panic::{catch_unwind, AssertUnwindSafe};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use realquad::checks::{verify, Tolerances};
use realquad::generators::{builtin, builtin_names, gen_flat_torus, GeneratedSurface, GeneratorError, TorusInvolution};
use realquad::holomorphic::{period_matrices, PeriodMatrices};
use realquad::homology::{describe, intersection};
use realquad::involution::{check_involution, InvolutionError, InvolutionKind, RHO_TOLERANCE};
use realquad::linalg::CMatrix;
use realquad::surface::{Color, Face, QuadSurface, SurfaceError};
use realquad::z2::{classify, congruence_apply, normal_form, Z2Matrix};
use realquad::{IntMatrix, MedialCycle};

/// Tolerance for period-matrix identities.
const PERIOD_TOL: f64 = 1e-9;
/// Tolerance for identities that hold up to rounding only.
const EXACT_TOL: f64 = 1e-12;
/// Solver residual tolerance.
const SOLVER_TOL: f64 = 1e-10;

#[derive(Default)]
struct Report {
    failures: Vec<String>,
}

impl Report {
    fn check(&mut self, ok: bool, what: impl Into<String>) {
        if !ok {
            self.failures.push(what.into());
        }
    }

    fn within(&mut self, what: &str, value: f64, tol: f64) {
        self.check(value <= tol, format!("{what}: {value:e} > {tol:e}"));
    }
}

fn one() -> Complex64 {
    Complex64::new(1.0, 0.0)
}

fn torus(n: usize, m: usize, rho: Complex64, kind: TorusInvolution) -> GeneratedSurface {
    gen_flat_torus(n, m, rho, kind).expect("valid torus parameters")
}

fn periods(gs: &GeneratedSurface) -> PeriodMatrices {
    period_matrices(&gs.surface, &gs.basis, SOLVER_TOL).expect("solver succeeds")
}

fn h_matrix(gs: &GeneratedSurface) -> CMatrix {
    CMatrix::from_real(gs.h.as_ref().expect("generated with an involution"))
}

/// Period of `dz` along a cycle on the flat `n x m` grid with unit squares.
///
/// Vertex `(x, y)` has id `y n + x`. The integral of `dz` over a medial edge
/// is the displacement between the two edge midpoints it joins, so a cycle's
/// period is the lattice translation of its lift. Returns the full period
/// and twice the sums over black-type and white-type steps.
fn grid_dz_periods(s: &QuadSurface, n: usize, m: usize, c: &MedialCycle) -> (Complex64, Complex64, Complex64) {
    let pos = |v: usize| Complex64::new((v % n) as f64, (v / n) as f64);
    // Nearest lattice image of `p` to `anchor`.
    let near = |p: Complex64, anchor: Complex64| {
        let mut q = p;
        q.re -= ((q.re - anchor.re) / n as f64).round() * n as f64;
        q.im -= ((q.im - anchor.im) / m as f64).round() * m as f64;
        q
    };
    let (mut full, mut black, mut white) = (Complex64::default(), Complex64::default(), Complex64::default());
    for d in describe(s, c) {
        let cycle = s.face(d.face).cycle;
        let corner = cycle.iter().position(|&v| v == d.corner).unwrap();
        let anchor = pos(cycle[corner]);
        let prev = near(pos(cycle[(corner + 3) % 4]), anchor);
        let next = near(pos(cycle[(corner + 1) % 4]), anchor);
        let canonical = if corner == 1 || corner == 2 { 1.0 } else { -1.0 };
        let step = (next - prev) * 0.5 * canonical * d.direction as f64;
        full += step;
        // Corners at white vertices cut off edges parallel to the black diagonal.
        if corner % 2 == 1 {
            black += 2.0 * step;
        } else {
            white += 2.0 * step;
        }
    }
    (full, black, white)
}

/// Averaged period "matrix" of a flat grid torus from the lattice of `dz`.
fn grid_oracle(gs: &GeneratedSurface, n: usize, m: usize, r: &mut Report) -> Complex64 {
    let s = &gs.surface;
    // The layout is a valid chart only if it reproduces every face's rho.
    for f in s.faces() {
        let p: Vec<Complex64> = f.cycle.iter().map(|&v| Complex64::new((v % n) as f64, (v / n) as f64)).collect();
        let near = |q: Complex64| {
            Complex64::new(q.re - ((q.re - p[0].re) / n as f64).round() * n as f64, q.im - ((q.im - p[0].im) / m as f64).round() * m as f64)
        };
        let (bm, wm, bp, wp) = (p[0], near(p[1]), near(p[2]), near(p[3]));
        let chart = -Complex64::i() * (wp - wm) / (bp - bm);
        r.within("grid layout reproduces rho", (chart - f.rho).norm(), EXACT_TOL);
    }
    let (a, ab, aw) = grid_dz_periods(s, n, m, &gs.basis.a[0]);
    let (b, _, _) = grid_dz_periods(s, n, m, &gs.basis.b[0]);
    // A constant form has equal black, white and full a-periods; it is then
    // the sum of the black and white normalized forms.
    r.within("oracle: black a-period of dz equals full", (ab - a).norm(), EXACT_TOL);
    r.within("oracle: white a-period of dz equals full", (aw - a).norm(), EXACT_TOL);
    b / a
}

fn criterion_1(r: &mut Report) {
    let gs = torus(8, 8, one(), TorusInvolution::EdgeReflection);
    let s = &gs.surface;
    let tau = gs.involution.as_ref().unwrap();
    let cls = tau.classify(s).unwrap();
    r.check(s.genus() == 1, "genus 1");
    r.check(cls.k == 2 && cls.dividing, format!("k = 2, dividing (got {}, {})", cls.k, cls.dividing));
    r.check(tau.kind() == InvolutionKind::ColorPreserving, "type 1");
    r.check(gs.h == Some(IntMatrix::zeros(1, 1)), "H = [0]");
    let pi = periods(&gs).averaged()[(0, 0)];
    let oracle = grid_oracle(&gs, 8, 8, r);
    r.within("|Re Pi|", pi.re.abs(), PERIOD_TOL);
    r.within("|Pi - i|", (pi - Complex64::i()).norm(), PERIOD_TOL);
    r.within("|Pi - oracle|", (pi - oracle).norm(), PERIOD_TOL);
}

fn criterion_2(r: &mut Report) {
    // a runs along x (8 quads), b along y (6 quads).
    let gs = torus(8, 6, one(), TorusInvolution::None);
    let pi = periods(&gs).averaged()[(0, 0)];
    let oracle = grid_oracle(&gs, 8, 6, r);
    r.within("|Pi - 3i/4|", (pi - Complex64::new(0.0, 0.75)).norm(), PERIOD_TOL);
    r.within("|Pi - oracle|", (pi - oracle).norm(), PERIOD_TOL);
}

fn criterion_3(r: &mut Report) {
    let gs = torus(8, 8, one(), TorusInvolution::Transpose);
    let cls = gs.involution.as_ref().unwrap().classify(&gs.surface).unwrap();
    r.check(cls.k == 1 && !cls.dividing, format!("k = 1, non-dividing (got {}, {})", cls.k, cls.dividing));
    r.check(gs.h == Some(IntMatrix::from_rows(&[vec![1]])), "H = [1]");
    let pi = periods(&gs).averaged()[(0, 0)];
    r.within("|Re Pi - 1/2|", (pi.re - 0.5).abs(), PERIOD_TOL);
}

fn criterion_4(r: &mut Report) {
    let gs = torus(8, 8, one(), TorusInvolution::Glide);
    let cls = gs.involution.as_ref().unwrap().classify(&gs.surface).unwrap();
    r.check(cls.k == 0 && !cls.dividing, format!("k = 0, non-dividing (got {}, {})", cls.k, cls.dividing));
    r.check(gs.h == Some(IntMatrix::zeros(1, 1)), "H = [0]");
    let pi = periods(&gs).averaged()[(0, 0)];
    r.within("|Re Pi|", pi.re.abs(), PERIOD_TOL);
}

fn criterion_5(r: &mut Report) {
    let gs = torus(8, 8, one(), TorusInvolution::Bimedian);
    let tau = gs.involution.as_ref().unwrap();
    let cls = tau.classify(&gs.surface).unwrap();
    r.check(tau.kind() == InvolutionKind::ColorSwapping, "type 2");
    r.check(cls.k == gs.surface.genus() + 1, format!("M-curve (k = {})", cls.k));
    let pm = periods(&gs);
    let h = h_matrix(&gs);
    r.within("|Re averaged Pi|", pm.averaged().max_abs_re(), PERIOD_TOL);
    r.within("|BB + conj(WW) - H|", (&(&pm.bb + &pm.ww.conj()) - &h).max_abs(), PERIOD_TOL);
    r.within("|WB + conj(BW)|", (&pm.wb + &pm.bw.conj()).max_abs(), PERIOD_TOL);
    r.within("|Im BB|", pm.bb.max_abs_im(), PERIOD_TOL);
    r.within("|BB + BB^T|", (&pm.bb + &pm.bb.transpose()).max_abs(), PERIOD_TOL);
}

/// Cholesky of a real symmetric matrix, written out for the check.
fn positive_definite(m: &[Vec<f64>]) -> bool {
    let n = m.len();
    let mut l = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..=i {
            let sum: f64 = (0..j).map(|k| l[i][k] * l[j][k]).sum();
            if i == j {
                let d = m[i][i] - sum;
                if d <= 0.0 {
                    return false;
                }
                l[i][i] = d.sqrt();
            } else {
                l[i][j] = (m[i][j] - sum) / l[j][j];
            }
        }
    }
    true
}

fn criterion_6(r: &mut Report) {
    let gs = builtin("double-pants").unwrap();
    let cls = gs.involution.as_ref().unwrap().classify(&gs.surface).unwrap();
    r.check(gs.surface.genus() == 2, "g = 2");
    r.check(cls.k == 3 && cls.dividing, format!("k = 3 (got {})", cls.k));
    r.check(gs.h == Some(IntMatrix::zeros(2, 2)), "H = 0");
    let pm = periods(&gs);
    let pi = pm.averaged();
    r.check(pi.rows() == 2 && pi.cols() == 2, "Pi is 2 x 2");
    r.within("|Re Pi|", pi.max_abs_re(), PERIOD_TOL);
    let im: Vec<Vec<f64>> = (0..2).map(|i| (0..2).map(|j| 0.5 * (pi[(i, j)].im + pi[(j, i)].im)).collect()).collect();
    r.check(positive_definite(&im), "Im Pi positive definite");
    r.check(gs.orthodiagonal, "Delaunay input gives an orthodiagonal surface");
    if gs.orthodiagonal {
        r.within("|Im BB|, |Im WW|", pm.bb.max_abs_im().max(pm.ww.max_abs_im()), PERIOD_TOL);
        r.within("|Re WB|, |Re BW|", pm.wb.max_abs_re().max(pm.bw.max_abs_re()), PERIOD_TOL);
    }
}

/// Expected `(rank, diag)` of `H` over Z2 from the topology, written out
/// independently of the library.
fn expected_h_class(g: usize, k: usize, dividing: bool) -> (usize, u8) {
    match (k, dividing) {
        (0, _) => (if g.is_multiple_of(2) { g } else { g - 1 }, 0),
        (_, true) => (g + 1 - k, 0),
        (_, false) => (g + 1 - k, 1),
    }
}

fn criterion_7(r: &mut Report) {
    let mut examples: Vec<(String, GeneratedSurface)> =
        builtin_names().iter().map(|&n| (n.to_string(), builtin(n).unwrap())).collect();
    examples.push(("oblique 6x4 torus".into(), torus(6, 4, Complex64::new(0.7, 0.2), TorusInvolution::None)));
    examples.push(("edge reflection 8x6, rho 0.6".into(), torus(8, 6, Complex64::new(0.6, 0.0), TorusInvolution::EdgeReflection)));
    examples.push(("glide 8x4, rho 1.3".into(), torus(8, 4, Complex64::new(1.3, 0.0), TorusInvolution::Glide)));
    let numerical = [
        "complete_symmetric",
        "averaged_symmetric",
        "im_averaged_positive",
        "im_wb_positive",
        "im_bw_positive",
        "black_white_split",
        "exact_forms_vanish",
        "solver_uniqueness",
    ];
    let tol = Tolerances { periods: PERIOD_TOL, solver: SOLVER_TOL };
    for (name, gs) in &examples {
        let s = &gs.surface;
        let g = s.genus();
        let v = verify(s, gs.involution.as_ref(), Some(&gs.basis), gs.h.as_ref(), tol);
        for c in v.checks.iter().filter(|c| !c.passed) {
            r.check(false, format!("{name}: {} = {:e} (tol {:e})", c.name, c.value, c.tolerance));
        }
        let required: Vec<&str> = if g == 0 { vec![] } else { numerical.to_vec() };
        for n in required {
            r.check(v.check(n).is_some(), format!("{name}: {n} was run"));
        }
        // Exact tolerances of the suite.
        for (n, t) in [("exact_forms_vanish", EXACT_TOL), ("pullback_identity", EXACT_TOL), ("black_white_split", 0.0)] {
            if let Some(c) = v.check(n) {
                r.check(c.tolerance <= t, format!("{name}: {n} held to {t:e}"));
            }
        }

        // Symplectic postconditions, from pairwise intersections.
        let a = &gs.basis.a;
        let b = &gs.basis.b;
        let int = |x: &MedialCycle, y: &MedialCycle| intersection(s, x, y).unwrap();
        for i in 0..g {
            for j in 0..g {
                let d = i64::from(i == j);
                r.check(int(&a[i], &b[j]) == d && int(&a[i], &a[j]) == 0 && int(&b[i], &b[j]) == 0, format!("{name}: int is J at ({i}, {j})"));
            }
        }

        let Some(tau) = &gs.involution else { continue };
        let Some(cls) = v.classification.as_ref() else {
            r.check(false, format!("{name}: classification"));
            continue;
        };
        let k = cls.k;
        r.check(k <= g + 1, format!("{name}: Harnack k <= g + 1"));
        if cls.dividing {
            r.check(k >= 1 && (g + 1 - k) % 2 == 0, format!("{name}: dividing implies k = g + 1 mod 2"));
        }
        if k == g + 1 {
            r.check(cls.dividing, format!("{name}: M-curve is dividing"));
        }
        // tau(a_j) = a_j and tau(b_j) = sum_i h_ij a_i - b_j, read off by
        // pairing the images with the basis.
        let h = gs.h.as_ref().expect("h");
        for j in 0..g {
            let ta = tau.apply_cycle(&a[j]);
            let tb = tau.apply_cycle(&b[j]);
            for i in 0..g {
                let d = i64::from(i == j);
                r.check(int(&ta, &b[i]) == d && int(&a[i], &ta) == 0, format!("{name}: tau(a_{j}) = a_{j}"));
                r.check(int(&tb, &b[i]) == h[(i, j)] && int(&a[i], &tb) == -d, format!("{name}: tau(b_{j})"));
            }
        }
        if g > 0 {
            let class = classify(&Z2Matrix::from_int(h).unwrap()).unwrap();
            let expected = expected_h_class(g, k, cls.dividing);
            r.check((class.rank, class.diag) == expected, format!("{name}: (rank, diag) of H {:?} vs {expected:?}", (class.rank, class.diag)));
        }
    }
}

/// All invertible `n x n` matrices over Z2.
fn general_linear(n: usize) -> Vec<Z2Matrix> {
    let mut out = Vec::new();
    for code in 0u64..1 << (n * n) {
        let rows: Vec<u64> = (0..n).map(|i| (code >> (i * n)) & ((1 << n) - 1)).collect();
        let m = Z2Matrix::from_bits(n, rows).unwrap();
        if m.is_invertible() {
            out.push(m);
        }
    }
    out
}

/// All symmetric `n x n` matrices over Z2.
fn symmetric_matrices(n: usize) -> Vec<Z2Matrix> {
    let slots: Vec<(usize, usize)> = (0..n).flat_map(|i| (i..n).map(move |j| (i, j))).collect();
    (0u64..1 << slots.len())
        .map(|code| {
            let mut m = Z2Matrix::zeros(n).unwrap();
            for (k, &(i, j)) in slots.iter().enumerate() {
                let bit = code >> k & 1 == 1;
                m.set(i, j, bit);
                m.set(j, i, bit);
            }
            m
        })
        .collect()
}

fn random_symmetric(rng: &mut ChaCha8Rng, n: usize) -> Z2Matrix {
    let mut m = Z2Matrix::zeros(n).unwrap();
    for i in 0..n {
        for j in i..n {
            let bit = rng.gen_bool(0.5);
            m.set(i, j, bit);
            m.set(j, i, bit);
        }
    }
    m
}

fn criterion_8(r: &mut Report) {
    let a = Z2Matrix::parse("1,0,0;0,0,1;0,1,0").unwrap();
    let p = Z2Matrix::parse("1,1,0;1,0,1;1,1,1").unwrap();
    r.check(congruence_apply(&p, &a).unwrap() == Z2Matrix::identity(3).unwrap(), "P A P^T = I_3");
    let nf = normal_form(&a).unwrap();
    r.check(nf.canonical == Z2Matrix::identity(3).unwrap() && nf.p == p, "normal form of (1) + G is I_3 via P");

    // Orbits under congruence by breadth-first search from each matrix.
    for n in 1..=4 {
        let group = general_linear(n);
        let all = symmetric_matrices(n);
        let mut orbit_of: HashMap<Vec<u64>, usize> = HashMap::new();
        let mut orbits = 0;
        for m in &all {
            if orbit_of.contains_key(m.bits()) {
                continue;
            }
            let mut queue = VecDeque::from([m.clone()]);
            orbit_of.insert(m.bits().to_vec(), orbits);
            while let Some(x) = queue.pop_front() {
                for q in &group {
                    let y = congruence_apply(q, &x).unwrap();
                    if !orbit_of.contains_key(y.bits()) {
                        orbit_of.insert(y.bits().to_vec(), orbits);
                        queue.push_back(y);
                    }
                }
            }
            orbits += 1;
        }
        let classes: HashSet<(usize, u8)> = all.iter().map(|m| classify(m).map(|c| (c.rank, c.diag)).unwrap()).collect();
        r.check(classes.len() == orbits, format!("n = {n}: {} classes vs {orbits} orbits", classes.len()));
        for x in &all {
            for y in &all {
                let same_orbit = orbit_of[x.bits()] == orbit_of[y.bits()];
                let same_class = classify(x).unwrap() == classify(y).unwrap();
                if same_orbit != same_class {
                    r.check(false, format!("n = {n}: {x:?} and {y:?}"));
                }
            }
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for _ in 0..1000 {
        let n = rng.gen_range(1..=8);
        let a = random_symmetric(&mut rng, n);
        let nf = normal_form(&a).unwrap();
        let again = normal_form(&nf.canonical).unwrap();
        r.check(again.canonical == nf.canonical, format!("normal form idempotent on {a:?}"));
        r.check(congruence_apply(&nf.p, &a).unwrap() == nf.canonical, format!("P A P^T = canonical on {a:?}"));
    }
}

fn criterion_9(r: &mut Report) {
    use Color::{Black, White};
    let face = |cycle: [usize; 4], re: f64| Face { cycle, rho: Complex64::new(re, 0.0) };
    let colors = vec![Black, White, Black, White];
    r.check(
        matches!(QuadSurface::new(vec![Black, Black, Black, White], vec![face([0, 1, 2, 3], 1.0)]), Err(SurfaceError::NotBipartite { .. })),
        "non-bipartite face",
    );
    for re in [0.0, -1.0] {
        r.check(
            matches!(QuadSurface::new(colors.clone(), vec![face([0, 1, 2, 3], re)]), Err(SurfaceError::NonPositiveRhoRealPart { .. })),
            format!("Re rho = {re}"),
        );
    }
    r.check(
        matches!(gen_flat_torus(8, 8, Complex64::new(-1.0, 0.0), TorusInvolution::None), Err(GeneratorError::Surface(_)) | Err(GeneratorError::ParameterInvalid(_))),
        "generator with Re rho < 0",
    );

    let gs = torus(8, 8, one(), TorusInvolution::Transpose);
    let s = &gs.surface;
    let mut map = gs.involution.as_ref().unwrap().vertex_map().to_vec();
    map[1] = map[0];
    r.check(matches!(check_involution(s, &map, RHO_TOLERANCE), Err(InvolutionError::NotInvolutive(_))), "non-involutive map");
    let identity: Vec<usize> = (0..s.num_vertices()).collect();
    r.check(
        matches!(check_involution(s, &identity, RHO_TOLERANCE), Err(InvolutionError::OrientationNotReversed(_))),
        "identity is not orientation reversing",
    );

    // Perturb one face of a reflected torus: the rho condition fails.
    let gs = torus(8, 8, one(), TorusInvolution::EdgeReflection);
    let mut faces = gs.surface.faces().to_vec();
    faces[3].rho = Complex64::new(1.5, 0.0);
    let bent = QuadSurface::new(gs.surface.colors().to_vec(), faces).unwrap();
    let map = gs.involution.as_ref().unwrap().vertex_map().to_vec();
    r.check(
        matches!(check_involution(&bent, &map, RHO_TOLERANCE), Err(InvolutionError::RhoConditionViolated { .. })),
        "rho condition violation",
    );
    r.check(
        matches!(gen_flat_torus(8, 8, Complex64::new(1.0, 0.3), TorusInvolution::EdgeReflection), Err(GeneratorError::RhoIncompatibleWithKind(_))),
        "non-real rho with a reflection",
    );
    r.check(
        matches!(gen_flat_torus(8, 8, Complex64::new(0.8, 0.0), TorusInvolution::Bimedian), Err(GeneratorError::RhoIncompatibleWithKind(_))),
        "|rho| != 1 with the bimedian reflection",
    );
}

type Criterion = (&'static str, fn(&mut Report));

fn main() {
    let criteria: [Criterion; 9] = [
        ("flat torus 8x8, edge reflection", criterion_1),
        ("flat torus 8x6, Pi = 3i/4", criterion_2),
        ("transpose torus, Re Pi = 1/2", criterion_3),
        ("glide torus, Re Pi = 0", criterion_4),
        ("bimedian torus, color-swapping M-curve blocks", criterion_5),
        ("doubled pants, genus-2 M-curve", criterion_6),
        ("universal property suite", criterion_7),
        ("Z2 congruence normal form", criterion_8),
        ("negative fixtures", criterion_9),
    ];
    let mut failed = 0;
    for (i, (title, run)) in criteria.iter().enumerate() {
        let mut report = Report::default();
        let outcome = catch_unwind(AssertUnwindSafe(|| run(&mut report)));
        if outcome.is_err() {
            report.failures.push("panicked".into());
        }
        if report.failures.is_empty() {
            println!("PASS {}: {title}", i + 1);
        } else {
            failed += 1;
            println!("FAIL {}: {title}", i + 1);
            for f in &report.failures {
                println!("    {f}");
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
