//! The full verification suite for a surface, its involution and basis.
//!
//! Checks are split into structural ones (topology, integer homology,
//! classification) and numerical ones (period matrices and forms). Every
//! check records the measured value next to the tolerance it was held to.

use num_complex::Complex64;
use serde::Serialize;

use crate::holomorphic::{
    dual_basis, imaginary_part_positive_definite, period_matrices_from_dual, real_structure_defects, DualBasis,
    EquationOrder, PeriodMatrices, SOLVER_TOLERANCE,
};
use crate::homology::{adapted_basis, symplectic_basis, verify_adapted, SymplecticBasis};
use crate::intmat::IntMatrix;
use crate::involution::{Classification, Involution, InvolutionKind};
use crate::medial::{exterior_derivative, DiamondForm, MedialCycle};
use crate::surface::QuadSurface;
use crate::z2::{classify, Z2Matrix};

/// Default tolerance for period-matrix identities.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;
/// Tolerance for identities that hold up to rounding only.
pub const EXACTNESS_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckCategory {
    Structural,
    Numerical,
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub category: CheckCategory,
    pub passed: bool,
    pub value: f64,
    pub tolerance: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Debug, Clone, Copy)]
pub struct Tolerances {
    pub periods: f64,
    pub solver: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { periods: DEFAULT_TOLERANCE, solver: SOLVER_TOLERANCE }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Verification {
    pub genus: usize,
    pub classification: Option<Classification>,
    pub h: Option<IntMatrix>,
    pub periods: Option<PeriodMatrices>,
    pub checks: Vec<Check>,
    #[serde(skip)]
    pub basis: Option<SymplecticBasis>,
    #[serde(skip)]
    pub dual: Option<DualBasis>,
}

impl Verification {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    /// The most basic category with a failing check.
    pub fn failed_category(&self) -> Option<CheckCategory> {
        self.checks.iter().filter(|c| !c.passed).map(|c| c.category).min()
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    fn push(&mut self, name: &str, category: CheckCategory, value: f64, tolerance: f64, detail: Option<String>) {
        self.checks.push(Check {
            name: name.to_string(),
            category,
            passed: value <= tolerance,
            value,
            tolerance,
            detail,
        });
    }

    fn structural(&mut self, name: &str, ok: bool, detail: Option<String>) {
        self.push(name, CheckCategory::Structural, if ok { 0.0 } else { 1.0 }, 0.0, detail);
    }

    fn numerical(&mut self, name: &str, value: f64, tolerance: f64) {
        self.push(name, CheckCategory::Numerical, value, tolerance, None);
    }
}

fn max_diff(a: &DiamondForm, b: &DiamondForm) -> f64 {
    a.s.iter().zip(&b.s).chain(a.t.iter().zip(&b.t)).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// A fixed, non-constant test function on the vertices.
fn probe_function(n: usize) -> Vec<Complex64> {
    (0..n).map(|v| Complex64::new((0.7 * v as f64).cos(), (1.3 * v as f64 + 0.2).sin())).collect()
}

/// Runs every applicable check. `basis` and `h` are taken from a file when
/// given and recomputed otherwise.
pub fn verify(
    s: &QuadSurface,
    tau: Option<&Involution>,
    basis: Option<&SymplecticBasis>,
    h: Option<&IntMatrix>,
    tol: Tolerances,
) -> Verification {
    let g = s.genus();
    let mut out =
        Verification { genus: g, classification: None, h: None, periods: None, checks: Vec::new(), basis: None, dual: None };

    // Structural part.
    let basis = match (tau, basis) {
        (Some(tau), Some(b)) => match verify_adapted(s, tau, b) {
            Ok(computed) => {
                let matches = h.is_none_or(|given| *given == computed);
                out.structural("adapted_basis", matches, (!matches).then(|| "stated h differs from the action".into()));
                out.h = Some(computed);
                Some(b.clone())
            }
            Err(e) => {
                out.structural("adapted_basis", false, Some(e.to_string()));
                None
            }
        },
        (Some(tau), None) => match adapted_basis(s, tau) {
            Ok(ab) => {
                out.structural("adapted_basis", true, None);
                out.h = Some(ab.h);
                Some(ab.basis)
            }
            Err(e) => {
                out.structural("adapted_basis", false, Some(e.to_string()));
                None
            }
        },
        (None, Some(b)) => {
            let r = b.verify(s);
            out.structural("symplectic_basis", r.is_ok(), r.err().map(|e| e.to_string()));
            Some(b.clone())
        }
        (None, None) => match symplectic_basis(s) {
            Ok(b) => {
                out.structural("symplectic_basis", true, None);
                Some(b)
            }
            Err(e) => {
                out.structural("symplectic_basis", false, Some(e.to_string()));
                None
            }
        },
    };

    if let Some(tau) = tau {
        match tau.classify(s) {
            Ok(cls) => {
                out.structural("fixed_set_and_harnack", true, None);
                if let Some(hm) = &out.h {
                    let z = Z2Matrix::from_int(hm).and_then(|m| classify(&m));
                    let ok = z.as_ref().is_ok_and(|c| {
                        c.rank == cls.predicted_h.rank && (c.diag == 0) == cls.predicted_h.diag_zero
                    });
                    let detail = format!("found {:?}, predicted {:?}", z.ok(), cls.predicted_h);
                    out.structural("h_classification", ok, (!ok).then_some(detail));
                }
                out.classification = Some(cls);
            }
            Err(e) => out.structural("fixed_set_and_harnack", false, Some(e.to_string())),
        }
    }

    let Some(basis) = basis else {
        return out;
    };
    if g == 0 {
        out.basis = Some(basis);
        return out;
    }

    // Numerical part.
    let dual = match dual_basis(s, &basis.a, EquationOrder::Natural, tol.solver) {
        Ok(d) => d,
        Err(e) => {
            out.push("solver", CheckCategory::Numerical, 1.0, 0.0, Some(e.to_string()));
            return out;
        }
    };
    match dual_basis(s, &basis.a, EquationOrder::Reversed, tol.solver) {
        Ok(other) => {
            let scale = dual.black.iter().chain(&dual.white).map(|f| f.max_abs()).fold(1.0, f64::max);
            let diff = dual
                .black
                .iter()
                .zip(&other.black)
                .chain(dual.white.iter().zip(&other.white))
                .map(|(x, y)| max_diff(x, y))
                .fold(0.0, f64::max);
            out.numerical("solver_uniqueness", diff / scale, tol.periods);
        }
        Err(e) => out.push("solver_uniqueness", CheckCategory::Numerical, 1.0, 0.0, Some(e.to_string())),
    }

    let forms: Vec<&DiamondForm> = dual.black.iter().chain(&dual.white).collect();
    let holo = forms.iter().map(|f| f.closedness_defect(s).max(f.cauchy_riemann_defect(s))).fold(0.0, f64::max);
    out.numerical("dual_forms_holomorphic", holo, tol.solver);
    let mut norm_err = 0.0f64;
    for (k, (fb, fw)) in dual.black.iter().zip(&dual.white).enumerate() {
        for (j, a) in basis.a.iter().enumerate() {
            let delta = if j == k { 1.0 } else { 0.0 };
            let pb = fb.integrate(a);
            let pw = fw.integrate(a);
            norm_err = norm_err
                .max((pb.black - delta).norm())
                .max(pb.white.norm())
                .max(pw.black.norm())
                .max((pw.white - delta).norm());
        }
    }
    out.numerical("a_period_normalization", norm_err, tol.solver);

    let pm = period_matrices_from_dual(s, &basis, &dual);
    out.numerical("complete_symmetric", pm.complete().asymmetry(), tol.periods);
    out.numerical("averaged_symmetric", pm.averaged().asymmetry(), tol.periods);
    for (name, m) in [("im_averaged_positive", pm.averaged()), ("im_wb_positive", pm.wb.clone()), ("im_bw_positive", pm.bw.clone())]
    {
        let ok = imaginary_part_positive_definite(&m);
        out.push(name, CheckCategory::Numerical, if ok { 0.0 } else { 1.0 }, 0.0, None);
    }

    let cycles: Vec<MedialCycle> = basis.cycles();
    let mut split = 0.0f64;
    for f in &forms {
        for c in &cycles {
            let p = f.integrate(c);
            split = split.max((2.0 * p.full - (p.black + p.white)).norm());
        }
    }
    out.numerical("black_white_split", split, 0.0);

    let probe = probe_function(s.num_vertices());
    let df = exterior_derivative(s, &probe);
    let mut exact = 0.0f64;
    for c in &cycles {
        let p = df.integrate(c);
        exact = exact.max(p.full.norm()).max(p.black.norm()).max(p.white.norm());
    }
    out.numerical("exact_forms_vanish", exact, EXACTNESS_TOLERANCE);

    let orthodiagonal = (0..s.num_faces()).all(|f| s.rho(f).im == 0.0);
    if orthodiagonal {
        let v = pm.bb.max_abs_im().max(pm.ww.max_abs_im()).max(pm.wb.max_abs_re()).max(pm.bw.max_abs_re());
        out.numerical("orthodiagonal_blocks", v, tol.periods);
    }

    if let (Some(tau), Some(hm)) = (tau, out.h.clone()) {
        let mut pull = 0.0f64;
        let mut anti = 0.0f64;
        for f in &forms {
            let pb = tau.pullback(f);
            for c in &cycles {
                let lhs = f.integrate(&tau.apply_cycle(c)).full;
                let rhs = pb.integrate(c).full;
                pull = pull.max((lhs - rhs).norm());
            }
            let cj = pb.conj();
            anti = anti.max(cj.closedness_defect(s).max(cj.cauchy_riemann_defect(s)));
        }
        out.numerical("pullback_identity", pull, EXACTNESS_TOLERANCE);
        out.numerical("antiholomorphic_pullback", anti, tol.solver);

        let swapping = tau.kind() == InvolutionKind::ColorSwapping;
        let d = real_structure_defects(&pm, &hm, swapping);
        out.numerical("real_structure_diagonal_blocks", d.diagonal_blocks.max(d.diagonal_blocks_white), tol.periods);
        out.numerical("real_structure_off_diagonal_blocks", d.off_diagonal_blocks, tol.periods);
        out.numerical("averaged_real_part", d.averaged, tol.periods);

        let m_curve = out.classification.as_ref().is_some_and(|c| c.k == g + 1);
        if m_curve && orthodiagonal {
            let v = if swapping {
                (&pm.bb + &pm.bb.transpose()).max_abs().max((&pm.wb - &pm.bw).max_abs())
            } else {
                pm.bb.max_abs().max(pm.ww.max_abs())
            };
            out.numerical("m_curve_blocks", v, tol.periods);
        }
    }

    out.periods = Some(pm);
    out.basis = Some(basis);
    out.dual = Some(dual);
    out
}
