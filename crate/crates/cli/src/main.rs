//! `realquad`: command-line front end.
//!
//! Exit codes: 0 success, 1 usage, 2 unreadable or malformed input,
//! 3 validation or structural failure, 4 numerical check failure.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use serde_json::{json, Value};

use realquad::checks::{self, CheckCategory, Tolerances, Verification};
use realquad::generators::{self, GeneratedSurface, GeneratorError, TorusInvolution, TriPatch};
use realquad::holomorphic::SOLVER_TOLERANCE;
use realquad::homology::{adapted_basis, describe, symplectic_basis, verify_adapted, SymplecticBasis};
use realquad::involution::{check_involution, Involution, RHO_TOLERANCE};
use realquad::io::{complex_json, matrix_json, round12, round_json, IoError, Loaded, SurfaceFile};
use realquad::linalg::CMatrix;
use realquad::z2::{classify, congruence_apply, normal_form, Z2Error, Z2Matrix};
use realquad::{IntMatrix, QuadSurface};

const EXIT_USAGE: u8 = 1;
const EXIT_PARSE: u8 = 2;
const EXIT_VALIDATION: u8 = 3;
const EXIT_NUMERICAL: u8 = 4;

#[derive(Parser)]
#[command(name = "realquad", version, about = "Discrete real Riemann surfaces on quad-graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Surface file.
    file: PathBuf,
    /// Emit a JSON report.
    #[arg(long)]
    json: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Check that a surface file is well formed, including its involution and basis.
    Validate {
        #[command(flatten)]
        common: Common,
        /// Relative tolerance of the rho condition.
        #[arg(long, default_value_t = RHO_TOLERANCE)]
        tol: f64,
    },
    /// Print counts, genus and metadata.
    Info {
        #[command(flatten)]
        common: Common,
    },
    /// Print a symplectic basis, adapted to the involution when there is one.
    Homology {
        #[command(flatten)]
        common: Common,
    },
    /// Classify the involution: type, ovals, dividing, Harnack.
    Involution {
        #[command(flatten)]
        common: Common,
        /// Relative tolerance of the rho condition.
        #[arg(long, default_value_t = RHO_TOLERANCE)]
        tol: f64,
    },
    /// Compute the period matrices.
    Periods {
        #[command(flatten)]
        common: Common,
        /// Also print the complete 2g x 2g matrix.
        #[arg(long)]
        complete: bool,
        /// Solver residual tolerance.
        #[arg(long, default_value_t = SOLVER_TOLERANCE)]
        tol: f64,
    },
    /// Run every structural and numerical check.
    Verify {
        #[command(flatten)]
        common: Common,
        /// Tolerance of the period-matrix identities.
        #[arg(long, default_value_t = checks::DEFAULT_TOLERANCE)]
        tol: f64,
    },
    /// Generate a surface file.
    Generate(GenerateArgs),
    /// Symmetric bilinear forms over Z2.
    #[command(subcommand)]
    Z2(Z2Command),
}

#[derive(Args)]
#[command(group(clap::ArgGroup::new("source").required(true).args(["torus", "patch", "polygon", "example"])))]
struct GenerateArgs {
    /// Flat torus from an n x m grid of congruent quads.
    #[arg(long)]
    torus: bool,
    #[arg(long, default_value_t = 8, requires = "torus")]
    n: usize,
    #[arg(long, default_value_t = 8, requires = "torus")]
    m: usize,
    #[arg(long, default_value_t = 1.0, requires = "torus")]
    rho_re: f64,
    #[arg(long, default_value_t = 0.0, requires = "torus")]
    rho_im: f64,
    /// none, edge-reflection, transpose, glide or bimedian.
    #[arg(long, default_value = "none", requires = "torus")]
    involution: String,
    /// Triangulated patch (JSON with `vertices` and `triangles`).
    #[arg(long, requires = "completion")]
    patch: Option<PathBuf>,
    /// Double the patch across the plane z = 0.
    #[arg(long, group = "completion", requires = "patch")]
    double: bool,
    /// Complete a first-octant patch by the coordinate reflections.
    #[arg(long, group = "completion", requires = "patch")]
    octant: bool,
    /// Polygon with opposite sides identified.
    #[arg(long)]
    polygon: bool,
    #[arg(long, default_value_t = 1, requires = "polygon")]
    g_prime: usize,
    #[arg(long, default_value_t = 0, requires = "polygon")]
    handles: usize,
    /// A built-in example by name.
    #[arg(long)]
    example: Option<String>,
    /// Output file; standard output when absent.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Z2Command {
    /// Congruence normal form `P A P^T` with the transformation `P`.
    NormalForm {
        /// Matrix as "1,0;0,1" or a JSON array of rows.
        matrix: String,
        #[arg(long)]
        json: bool,
    },
    /// Rank and diagonal type.
    Classify {
        matrix: String,
        #[arg(long)]
        json: bool,
    },
    /// Apply a congruence: prints `P A P^T`.
    Congruence {
        p: String,
        a: String,
        #[arg(long)]
        json: bool,
    },
}

/// A failed run: exit code and message.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl std::fmt::Display) -> Self {
        Failure { code, message: message.to_string() }
    }
}

impl From<IoError> for Failure {
    fn from(e: IoError) -> Self {
        let code = match e {
            IoError::Read { .. } | IoError::Parse(_) => EXIT_PARSE,
            _ => EXIT_VALIDATION,
        };
        Failure::new(code, e)
    }
}

impl From<GeneratorError> for Failure {
    fn from(e: GeneratorError) -> Self {
        let code = match e {
            GeneratorError::ParameterParityInvalid(_)
            | GeneratorError::RhoIncompatibleWithKind(_)
            | GeneratorError::ParameterInvalid(_) => EXIT_USAGE,
            _ => EXIT_VALIDATION,
        };
        Failure::new(code, e)
    }
}

impl From<Z2Error> for Failure {
    fn from(e: Z2Error) -> Self {
        let code = if matches!(e, Z2Error::Parse(_)) { EXIT_PARSE } else { EXIT_VALIDATION };
        Failure::new(code, e)
    }
}

/// The outcome of a command: report and exit code.
struct Outcome {
    report: Value,
    text: String,
    code: u8,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    let start = Instant::now();
    let (json_out, result) = run(cli.command);
    let code = match result {
        Ok(out) => {
            // A closed pipe downstream is not an error of ours.
            let mut stdout = std::io::stdout().lock();
            if json_out {
                let mut report = out.report;
                round_json(&mut report);
                let _ = writeln!(stdout, "{}", serde_json::to_string_pretty(&report).expect("reports serialize"));
            } else {
                let _ = stdout.write_all(out.text.as_bytes());
            }
            out.code
        }
        Err(f) => {
            if json_out {
                println!("{}", serde_json::to_string_pretty(&json!({ "error": f.message, "exit_code": f.code })).unwrap());
            }
            eprintln!("error: {}", f.message);
            f.code
        }
    };
    eprintln!("wall time: {} ms", start.elapsed().as_millis());
    ExitCode::from(code)
}

fn run(command: Command) -> (bool, Result<Outcome, Failure>) {
    match command {
        Command::Validate { common, tol } => (common.json, validate(&common.file, tol)),
        Command::Info { common } => (common.json, info(&common.file)),
        Command::Homology { common } => (common.json, homology(&common.file)),
        Command::Involution { common, tol } => (common.json, involution(&common.file, tol)),
        Command::Periods { common, complete, tol } => (common.json, periods(&common.file, complete, tol)),
        Command::Verify { common, tol } => (common.json, verify(&common.file, tol)),
        Command::Generate(args) => (false, generate(args)),
        Command::Z2(cmd) => match cmd {
            Z2Command::NormalForm { matrix, json } => (json, z2_normal_form(&matrix)),
            Z2Command::Classify { matrix, json } => (json, z2_classify(&matrix)),
            Z2Command::Congruence { p, a, json } => (json, z2_congruence(&p, &a)),
        },
    }
}

fn load(path: &Path) -> Result<Loaded, Failure> {
    Ok(SurfaceFile::read(path)?.load()?)
}

fn load_involution(loaded: &Loaded, tol: f64) -> Result<Option<Involution>, Failure> {
    loaded
        .vertex_map
        .as_ref()
        .map(|m| check_involution(&loaded.surface, m, tol).map_err(|e| Failure::new(EXIT_VALIDATION, e)))
        .transpose()
}

/// Twelve significant digits; scientific notation outside `[1e-4, 1e6)`.
fn num(x: f64) -> String {
    let r = round12(x);
    if r == 0.0 || (1e-4..1e6).contains(&r.abs()) {
        format!("{r}")
    } else {
        format!("{r:e}")
    }
}

fn complex_text(z: Complex64) -> String {
    let im = round12(z.im);
    if im < 0.0 {
        format!("{}-{}i", num(z.re), num(-im))
    } else {
        format!("{}+{}i", num(z.re), num(im))
    }
}

fn table<T>(rows: &[Vec<T>], cell: impl Fn(&T) -> String) -> String {
    let cells: Vec<Vec<String>> = rows.iter().map(|r| r.iter().map(&cell).collect()).collect();
    let width = cells.iter().flatten().map(String::len).max().unwrap_or(0);
    let mut out = String::new();
    for r in cells {
        let line: Vec<String> = r.iter().map(|c| format!("{c:>width$}")).collect();
        let _ = writeln!(out, "  {}", line.join("  "));
    }
    out
}

fn int_json(m: &IntMatrix) -> Value {
    json!(m.to_rows())
}

fn rho_range(s: &QuadSurface) -> (f64, f64) {
    s.faces().iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), f| (lo.min(f.rho.re), hi.max(f.rho.im.abs())))
}

fn validate(path: &Path, tol: f64) -> Result<Outcome, Failure> {
    let loaded = load(path)?;
    let s = &loaded.surface;
    let tau = load_involution(&loaded, tol)?;
    if let Some(b) = &loaded.basis {
        let given_h = loaded.h.as_ref();
        match &tau {
            Some(tau) => {
                let h = verify_adapted(s, tau, b).map_err(|e| Failure::new(EXIT_VALIDATION, e))?;
                if given_h.is_some_and(|g| *g != h) {
                    return Err(Failure::new(EXIT_VALIDATION, "stated h differs from the action of the involution"));
                }
            }
            None => b.verify(s).map_err(|e| Failure::new(EXIT_VALIDATION, e))?,
        }
    }
    let report = json!({
        "command": "validate",
        "valid": true,
        "vertices": s.num_vertices(),
        "faces": s.num_faces(),
        "involution": tau.is_some(),
        "basis": loaded.basis.is_some(),
    });
    Ok(Outcome { report, text: "valid\n".into(), code: 0 })
}

fn info(path: &Path) -> Result<Outcome, Failure> {
    let loaded = load(path)?;
    let s = &loaded.surface;
    let black = s.colors().iter().filter(|&&c| c == realquad::surface::Color::Black).count();
    let orthodiagonal = s.faces().iter().all(|f| f.rho.im == 0.0);
    let (min_re, max_im) = rho_range(s);
    let report = json!({
        "command": "info",
        "vertices": s.num_vertices(),
        "black_vertices": black,
        "white_vertices": s.num_vertices() - black,
        "edges": s.num_edges(),
        "faces": s.num_faces(),
        "euler_characteristic": s.euler_characteristic(),
        "genus": s.genus(),
        "orthodiagonal": orthodiagonal,
        "min_rho_re": min_re,
        "max_rho_im_abs": max_im,
        "has_involution": loaded.vertex_map.is_some(),
        "has_basis": loaded.basis.is_some(),
        "metadata": loaded.metadata,
    });
    let mut text = String::new();
    let _ = writeln!(text, "vertices  {} ({black} black, {} white)", s.num_vertices(), s.num_vertices() - black);
    let _ = writeln!(text, "edges     {}", s.num_edges());
    let _ = writeln!(text, "faces     {}", s.num_faces());
    let _ = writeln!(text, "euler     {}", s.euler_characteristic());
    let _ = writeln!(text, "genus     {}", s.genus());
    let _ = writeln!(text, "rho       min Re {}, max |Im| {}{}", num(min_re), num(max_im), if orthodiagonal { " (orthodiagonal)" } else { "" });
    let _ = writeln!(text, "involution {}", if loaded.vertex_map.is_some() { "yes" } else { "no" });
    let _ = writeln!(text, "basis     {}", if loaded.basis.is_some() { "yes" } else { "no" });
    Ok(Outcome { report, text, code: 0 })
}

/// Basis and `h` from the file when present, computed otherwise.
fn basis_for(loaded: &Loaded, tau: Option<&Involution>) -> Result<(SymplecticBasis, Option<IntMatrix>), Failure> {
    let s = &loaded.surface;
    let err = |e: realquad::HomologyError| Failure::new(EXIT_VALIDATION, e);
    match (&loaded.basis, tau) {
        (Some(b), Some(tau)) => Ok((b.clone(), Some(verify_adapted(s, tau, b).map_err(err)?))),
        (Some(b), None) => {
            b.verify(s).map_err(err)?;
            Ok((b.clone(), None))
        }
        (None, Some(tau)) => {
            let ab = adapted_basis(s, tau).map_err(err)?;
            Ok((ab.basis, Some(ab.h)))
        }
        (None, None) => Ok((symplectic_basis(s).map_err(err)?, None)),
    }
}

fn homology(path: &Path) -> Result<Outcome, Failure> {
    let loaded = load(path)?;
    let s = &loaded.surface;
    let tau = load_involution(&loaded, RHO_TOLERANCE)?;
    let (basis, h) = basis_for(&loaded, tau.as_ref())?;
    let cycles = |cs: &[realquad::MedialCycle]| -> Value { cs.iter().map(|c| json!(describe(s, c))).collect() };
    let report = json!({
        "command": "homology",
        "genus": s.genus(),
        "source": if loaded.basis.is_some() { "file" } else { "computed" },
        "a": cycles(&basis.a),
        "b": cycles(&basis.b),
        "h": h.as_ref().map(int_json),
    });
    let mut text = String::new();
    let _ = writeln!(text, "genus {}", s.genus());
    for (name, cs) in [("a", &basis.a), ("b", &basis.b)] {
        for (i, c) in cs.iter().enumerate() {
            let _ = writeln!(text, "{name}{} length {}", i + 1, c.len());
        }
    }
    if let Some(h) = &h {
        let _ = writeln!(text, "h =");
        text.push_str(&table(&h.to_rows(), |x| x.to_string()));
    }
    Ok(Outcome { report, text, code: 0 })
}

fn involution(path: &Path, tol: f64) -> Result<Outcome, Failure> {
    let loaded = load(path)?;
    let s = &loaded.surface;
    let tau = load_involution(&loaded, tol)?.ok_or_else(|| Failure::new(EXIT_VALIDATION, "the file has no involution"))?;
    let fixed = tau.fixed_set(s).map_err(|e| Failure::new(EXIT_VALIDATION, e))?;
    let cls = tau.classify(s).map_err(|e| Failure::new(EXIT_VALIDATION, e))?;
    let report = json!({
        "command": "involution",
        "type": cls.kind.number(),
        "genus": cls.genus,
        "k": cls.k,
        "dividing": cls.dividing,
        "harnack": true,
        "predicted_h": cls.predicted_h,
        "fixed_vertices": fixed.fixed_vertices.len(),
        "fixed_edges": fixed.fixed_edges.len(),
        "fixed_faces": fixed.fixed_faces.len(),
        "oval_lengths": fixed.ovals.iter().map(|o| o.segments.len()).collect::<Vec<_>>(),
    });
    let mut text = String::new();
    let _ = writeln!(text, "type {}, genus {}, k = {}, {}", cls.kind.number(), cls.genus, cls.k, if cls.dividing { "dividing" } else { "non-dividing" });
    let _ = writeln!(text, "predicted h: rank {}, diagonal {}", cls.predicted_h.rank, if cls.predicted_h.diag_zero { "zero" } else { "nonzero" });
    for (i, o) in fixed.ovals.iter().enumerate() {
        let _ = writeln!(text, "oval {} with {} segments", i + 1, o.segments.len());
    }
    Ok(Outcome { report, text, code: 0 })
}

fn run_checks(path: &Path, tol: Tolerances) -> Result<Verification, Failure> {
    let loaded = load(path)?;
    let tau = load_involution(&loaded, RHO_TOLERANCE)?;
    Ok(checks::verify(&loaded.surface, tau.as_ref(), loaded.basis.as_ref(), loaded.h.as_ref(), tol))
}

fn exit_code(v: &Verification) -> u8 {
    match v.failed_category() {
        None => 0,
        Some(CheckCategory::Structural) => EXIT_VALIDATION,
        Some(CheckCategory::Numerical) => EXIT_NUMERICAL,
    }
}

fn checks_json(v: &Verification) -> Value {
    json!(v.checks)
}

fn periods(path: &Path, complete: bool, tol: f64) -> Result<Outcome, Failure> {
    let v = run_checks(path, Tolerances { solver: tol, ..Tolerances::default() })?;
    let Some(pm) = &v.periods else {
        let code = if v.genus == 0 { 0 } else { exit_code(&v).max(EXIT_NUMERICAL) };
        let code = if v.failed_category() == Some(CheckCategory::Structural) { EXIT_VALIDATION } else { code };
        let failures: Vec<String> =
            v.checks.iter().filter(|c| !c.passed).map(|c| format!("{}: {}", c.name, c.detail.clone().unwrap_or_default())).collect();
        let text = if v.genus == 0 { "genus 0: no periods\n".to_string() } else { format!("{}\n", failures.join("\n")) };
        return Ok(Outcome { report: json!({ "command": "periods", "genus": v.genus, "checks": checks_json(&v) }), text, code });
    };
    let pi = pm.averaged();
    let t = pi.im();
    let residual_names = ["dual_forms_holomorphic", "a_period_normalization", "solver_uniqueness"];
    let residuals: serde_json::Map<String, Value> =
        residual_names.iter().filter_map(|n| v.check(n).map(|c| (n.to_string(), json!(c.value)))).collect();
    let mut report = json!({
        "command": "periods",
        "genus": v.genus,
        "pi": matrix_json(&pi),
        "blocks": {
            "bb": matrix_json(&pm.bb),
            "wb": matrix_json(&pm.wb),
            "bw": matrix_json(&pm.bw),
            "ww": matrix_json(&pm.ww),
        },
        "h": v.h.as_ref().map(int_json),
        "t": t.to_rows().iter().map(|r| r.iter().map(|z| round12(z.re)).collect::<Vec<_>>()).collect::<Vec<_>>(),
        "residuals": residuals,
    });
    if complete {
        report["complete"] = matrix_json(&pm.complete());
    }
    let mut text = String::new();
    let mut mat = |name: &str, m: &CMatrix| {
        let _ = writeln!(text, "{name} =");
        text.push_str(&table(&m.to_rows(), |z| complex_text(*z)));
    };
    mat("Pi", &pi);
    mat("Pi_BB", &pm.bb);
    mat("Pi_WB", &pm.wb);
    mat("Pi_BW", &pm.bw);
    mat("Pi_WW", &pm.ww);
    if complete {
        mat("complete", &pm.complete());
    }
    if let Some(h) = &v.h {
        let _ = writeln!(text, "H =");
        text.push_str(&table(&h.to_rows(), |x| x.to_string()));
    }
    let _ = writeln!(text, "T =");
    text.push_str(&table(&t.to_rows(), |z| num(z.re)));
    let width = residual_names.iter().map(|n| n.len()).max().unwrap_or(0);
    for c in residual_names.iter().filter_map(|n| v.check(n)) {
        let _ = writeln!(text, "{:width$}  {}", c.name, num(c.value));
    }
    let solver_ok = residual_names.iter().filter_map(|n| v.check(n)).all(|c| c.passed);
    Ok(Outcome { report, text, code: if solver_ok { 0 } else { EXIT_NUMERICAL } })
}

fn verify(path: &Path, tol: f64) -> Result<Outcome, Failure> {
    let v = run_checks(path, Tolerances { periods: tol, ..Tolerances::default() })?;
    let mut report = json!({
        "command": "verify",
        "input": path.display().to_string(),
        "genus": v.genus,
        "classification": v.classification,
        "h": v.h.as_ref().map(int_json),
        "checks": checks_json(&v),
        "passed": v.passed(),
    });
    if let Some(pm) = &v.periods {
        let pi = pm.averaged();
        report["pi"] = matrix_json(&pi);
        report["pi_diagonal"] = json!((0..pi.rows()).map(|i| complex_json(pi[(i, i)])).collect::<Vec<_>>());
    }
    let mut text = String::new();
    let _ = write!(text, "genus {}", v.genus);
    if let Some(c) = &v.classification {
        let _ = write!(text, ", type {}, k = {}, {}", c.kind.number(), c.k, if c.dividing { "dividing" } else { "non-dividing" });
    }
    text.push('\n');
    let width = v.checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
    for c in &v.checks {
        let status = if c.passed { "PASS" } else { "FAIL" };
        let _ = write!(text, "{status} {:width$}", c.name);
        if c.category == CheckCategory::Numerical && c.detail.is_none() {
            let _ = write!(text, "  {} (tol {})", num(c.value), num(c.tolerance));
        }
        if let Some(d) = &c.detail {
            let _ = write!(text, "  {d}");
        }
        text.push('\n');
    }
    let code = exit_code(&v);
    let _ = writeln!(text, "{}", if code == 0 { "all checks passed" } else { "some checks failed" });
    Ok(Outcome { report, text, code })
}

fn read_patch(path: &Path) -> Result<TriPatch, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::new(EXIT_PARSE, format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::new(EXIT_PARSE, format!("malformed patch: {e}")))
}

fn generate(args: GenerateArgs) -> Result<Outcome, Failure> {
    let gs: GeneratedSurface = if args.torus {
        let kind: TorusInvolution = args.involution.parse()?;
        generators::gen_flat_torus(args.n, args.m, Complex64::new(args.rho_re, args.rho_im), kind)?
    } else if let Some(path) = &args.patch {
        let patch = read_patch(path)?;
        if args.double {
            generators::gen_reflection_double(&patch)?
        } else {
            generators::gen_octant_symmetric(&patch)?
        }
    } else if args.polygon {
        generators::gen_polygon_identification(args.g_prime, args.handles)?
    } else {
        let name = args.example.as_deref().expect("clap enforces a source");
        if !generators::builtin_names().contains(&name) {
            return Err(Failure::new(
                EXIT_USAGE,
                format!("unknown example {name:?}; available: {}", generators::builtin_names().join(", ")),
            ));
        }
        generators::builtin(name)?
    };
    for w in &gs.warnings {
        eprintln!("warning: {w}");
    }
    let body = SurfaceFile::from_generated(&gs).to_json() + "\n";
    let text = match &args.output {
        Some(path) => {
            std::fs::write(path, body).map_err(|e| Failure::new(EXIT_USAGE, format!("cannot write {}: {e}", path.display())))?;
            format!(
                "wrote {} ({} faces, genus {})\n",
                path.display(),
                gs.surface.num_faces(),
                gs.surface.genus()
            )
        }
        None => body,
    };
    Ok(Outcome { report: Value::Null, text, code: 0 })
}

fn z2_rows(m: &Z2Matrix) -> Value {
    json!(m.to_rows())
}

fn z2_table(m: &Z2Matrix) -> String {
    table(&m.to_rows(), |x| x.to_string())
}

fn z2_normal_form(matrix: &str) -> Result<Outcome, Failure> {
    let a = Z2Matrix::parse(matrix)?;
    let nf = normal_form(&a)?;
    let class = classify(&a)?;
    let report = json!({
        "canonical": z2_rows(&nf.canonical),
        "p": z2_rows(&nf.p),
        "rank": class.rank,
        "diag": class.diag,
    });
    let text = format!(
        "canonical =\n{}P =\n{}rank {}, diag {}\n",
        z2_table(&nf.canonical),
        z2_table(&nf.p),
        class.rank,
        class.diag
    );
    Ok(Outcome { report, text, code: 0 })
}

fn z2_classify(matrix: &str) -> Result<Outcome, Failure> {
    let class = classify(&Z2Matrix::parse(matrix)?)?;
    Ok(Outcome {
        report: json!({ "rank": class.rank, "diag": class.diag }),
        text: format!("rank {}, diag {}\n", class.rank, class.diag),
        code: 0,
    })
}

fn z2_congruence(p: &str, a: &str) -> Result<Outcome, Failure> {
    let (p, a) = (Z2Matrix::parse(p)?, Z2Matrix::parse(a)?);
    if !p.is_invertible() {
        return Err(Z2Error::SingularP.into());
    }
    let out = congruence_apply(&p, &a)?;
    Ok(Outcome { report: json!({ "result": z2_rows(&out) }), text: z2_table(&out), code: 0 })
}
