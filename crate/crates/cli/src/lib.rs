//! Batch front end for the engine: builds a job from command-line flags,
//! runs it and renders a text or JSON report.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::PathBuf;

use drsn_core::forms::{cleared_lie_derivative_of_omega, in_ideal_dx_within, lie_derivative_form, DiffForm, FORM_TOL};
use drsn_core::normalform::{
    check_jet_order, diagonal_fixes, diagonalize, forbidden_residual, guaranteed_v_order, isotropy_group, normalize,
    residue, Isotropy, NormalFormParams,
};
use drsn_core::periods::{
    invariant_from_periods, painleve1_Thk_closed_form, painleve1_vector_field, period_series_for, PlanarHamiltonian,
};
use drsn_core::vfields::{parse_field_text, FiberedDiffeo};
use drsn_core::{Complex, Error, SaddleNodeInput, Var, VectorField};
use serde_json::{json, Value};

pub const EXIT_OK: i32 = 0;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_DEGENERATE: i32 = 3;
pub const EXIT_CONTRACT: i32 = 4;

pub const DEFAULT_COMPARE_TOL: f64 = 1e-6;
pub const DEFAULT_ISOTROPY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Command {
    Residue,
    Normalize,
    CheckHamiltonian,
    Periods,
    Compare,
    Isotropy,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Source {
    Painleve1,
    File(PathBuf),
    Inline(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Clone, PartialEq)]
pub struct JobSpec {
    pub command: Command,
    pub source: Source,
    pub order: u32,
    pub v_order: Option<u32>,
    pub tolerance: Option<f64>,
    pub format: Format,
    /// Bring a non-diagonal linear part to `diag(-λ, λ)` first.
    pub diagonalize: bool,
}

impl JobSpec {
    pub fn new(command: Command, source: Source, order: u32) -> Self {
        JobSpec { command, source, order, v_order: None, tolerance: None, format: Format::Text, diagonalize: false }
    }

    pub fn json(mut self) -> Self {
        self.format = Format::Json;
        self
    }

    pub fn with_v_order(mut self, m: u32) -> Self {
        self.v_order = Some(m);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub status: i32,
    pub stdout: String,
    pub stderr: String,
}

#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    Input(String),
    Engine(Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) | CliError::Engine(Error::Parse(_)) => EXIT_PARSE,
            CliError::Engine(Error::Degenerate { .. }) => EXIT_DEGENERATE,
            CliError::Engine(_) => EXIT_CONTRACT,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Input(m) => write!(f, "input error: {m}"),
            CliError::Engine(Error::Parse(e)) => write!(f, "parse error: {e}"),
            CliError::Engine(e @ Error::Degenerate { .. }) => write!(f, "degenerate saddle-node: {e}"),
            CliError::Engine(Error::NonDiagonalLinearPart) => write!(
                f,
                "contract violation: {} (rerun with --diagonalize)",
                Error::NonDiagonalLinearPart
            ),
            CliError::Engine(e) => write!(f, "contract violation: {e}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Engine(e)
    }
}

/// Parses the three-line field format and validates it as a saddle-node
/// with `dx = x^2`, trace-free invertible linear y-part.
pub fn parse_field(text: &str, order: u32) -> Result<SaddleNodeInput, CliError> {
    let field = parse_field_text(text, order).map_err(Error::from)?;
    Ok(SaddleNodeInput::new(field)?)
}

pub fn run(spec: &JobSpec) -> Outcome {
    match execute(spec) {
        Ok(report) => {
            let stdout = match spec.format {
                Format::Json => serde_json::to_string_pretty(&report.json).expect("serializable") + "\n",
                Format::Text => report.text,
            };
            Outcome { status: EXIT_OK, stdout, stderr: String::new() }
        }
        Err(e) => Outcome { status: e.exit_code(), stdout: String::new(), stderr: format!("error: {e}\n") },
    }
}

struct Report {
    text: String,
    json: Value,
}

struct Prepared {
    original: SaddleNodeInput,
    input: SaddleNodeInput,
    change: Option<FiberedDiffeo>,
}

fn load(spec: &JobSpec) -> Result<SaddleNodeInput, CliError> {
    match &spec.source {
        Source::Painleve1 => Ok(SaddleNodeInput::new(painleve1_vector_field(spec.order))?),
        Source::Inline(text) => parse_field(&text.replace(';', "\n"), spec.order),
        Source::File(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
            parse_field(&text, spec.order)
        }
    }
}

fn prepare(spec: &JobSpec) -> Result<Prepared, CliError> {
    let original = load(spec)?;
    if original.is_diagonal() || !(spec.diagonalize || spec.source == Source::Painleve1) {
        return Ok(Prepared { input: original.clone(), original, change: None });
    }
    let (input, change) = diagonalize(&original)?;
    Ok(Prepared { original, input, change: Some(change) })
}

fn v_order(spec: &JobSpec) -> Result<u32, CliError> {
    match spec.v_order {
        Some(m) => {
            check_jet_order(spec.order, m)?;
            Ok(m)
        }
        None => Ok(guaranteed_v_order(spec.order)),
    }
}

fn execute(spec: &JobSpec) -> Result<Report, CliError> {
    if let Some(t) = spec.tolerance {
        if !(t.is_finite() && t > 0.0) {
            return Err(CliError::Input(format!("tolerance must be positive, got {t}")));
        }
    }
    let mut r = match spec.command {
        Command::Residue => cmd_residue(spec)?,
        Command::Normalize => cmd_normalize(spec)?,
        Command::CheckHamiltonian => cmd_check_hamiltonian(spec)?,
        Command::Periods => cmd_periods(spec)?,
        Command::Compare => cmd_compare(spec)?,
        Command::Isotropy => cmd_isotropy(spec)?,
    };
    let name = match spec.command {
        Command::Residue => "residue",
        Command::Normalize => "normalize",
        Command::CheckHamiltonian => "check-hamiltonian",
        Command::Periods => "periods",
        Command::Compare => "compare",
        Command::Isotropy => "isotropy",
    };
    let obj = r.json.as_object_mut().expect("object report");
    obj.insert("command".into(), json!(name));
    obj.insert("order".into(), json!(spec.order));
    Ok(r)
}

fn fmt_c(z: Complex) -> String {
    format!("({:.16e}, {:.16e})", z.re, z.im)
}

fn cj(z: Complex) -> Value {
    json!([z.re, z.im])
}

fn jet_json(start: u32, coeffs: &[Complex]) -> Value {
    json!({ "start": start, "coeffs": coeffs.iter().map(|z| cj(*z)).collect::<Vec<_>>() })
}

fn jet_text(out: &mut String, name: &str, start: u32, coeffs: &[Complex]) {
    for (i, z) in coeffs.iter().enumerate() {
        writeln!(out, "{name}[{}]: {}", start as usize + i, fmt_c(*z)).unwrap();
    }
}

fn matrix_json(m: [[Complex; 2]; 2]) -> Value {
    json!([[cj(m[0][0]), cj(m[0][1])], [cj(m[1][0]), cj(m[1][1])]])
}

fn change_report(out: &mut String, json: &mut serde_json::Map<String, Value>, change: &Option<FiberedDiffeo>) {
    match change {
        Some(p) => {
            let m = p.linear_y_part();
            writeln!(out, "diagonalizing change (y -> M y):").unwrap();
            for row in m {
                writeln!(out, "  {} {}", fmt_c(row[0]), fmt_c(row[1])).unwrap();
            }
            json.insert("diagonalizing_change".into(), matrix_json(m));
        }
        None => {
            json.insert("diagonalizing_change".into(), Value::Null);
        }
    }
}

fn truncated(p: &NormalFormParams, m: u32) -> NormalFormParams {
    let m = m as usize;
    NormalFormParams { c1: p.c1[..m].to_vec(), c2: p.c2[..m].to_vec(), ..p.clone() }
}

fn cmd_residue(spec: &JobSpec) -> Result<Report, CliError> {
    let input = load(spec)?;
    let res = residue(&input)?;
    let text = format!("lambda: {}\nresidue: {}\n", fmt_c(input.lambda()), fmt_c(res));
    Ok(Report { text, json: json!({ "lambda": cj(input.lambda()), "residue": cj(res) }) })
}

fn normalized(spec: &JobSpec, prepared: &Prepared) -> Result<(NormalFormParams, f64, u32), CliError> {
    let m = v_order(spec)?;
    let r = normalize(&prepared.input, spec.order)?;
    let forbidden = forbidden_residual(&r.residual)?;
    Ok((truncated(&r.params, m), forbidden, m))
}

fn cmd_normalize(spec: &JobSpec) -> Result<Report, CliError> {
    let prepared = prepare(spec)?;
    let (p, forbidden, m) = normalized(spec, &prepared)?;
    let mut text = String::new();
    let mut obj = serde_json::Map::new();
    change_report(&mut text, &mut obj, &prepared.change);
    writeln!(text, "v-order: {m}").unwrap();
    writeln!(text, "lambda: {}", fmt_c(p.lambda)).unwrap();
    writeln!(text, "a1: {}", fmt_c(p.a1)).unwrap();
    writeln!(text, "a2: {}", fmt_c(p.a2)).unwrap();
    writeln!(text, "residue: {}", fmt_c(p.residue())).unwrap();
    jet_text(&mut text, "c1", 1, &p.c1);
    jet_text(&mut text, "c2", 1, &p.c2);
    jet_text(&mut text, "c", 1, &p.c());
    writeln!(text, "forbidden residual: {forbidden:.3e}").unwrap();
    obj.insert("v_order".into(), json!(m));
    obj.insert("lambda".into(), cj(p.lambda));
    obj.insert("a1".into(), cj(p.a1));
    obj.insert("a2".into(), cj(p.a2));
    obj.insert("residue".into(), cj(p.residue()));
    obj.insert("c1".into(), jet_json(1, &p.c1));
    obj.insert("c2".into(), jet_json(1, &p.c2));
    obj.insert("c".into(), jet_json(1, &p.c()));
    obj.insert("forbidden_residual".into(), json!(forbidden));
    Ok(Report { text, json: Value::Object(obj) })
}

fn hamiltonian_checks(y: &VectorField, tol: f64) -> Result<(bool, bool), CliError> {
    let l_dx = lie_derivative_form(y, &DiffForm::differential(Var::X, y.order() + 1));
    let cleared = cleared_lie_derivative_of_omega(y)?;
    Ok((in_ideal_dx_within(&l_dx, tol), in_ideal_dx_within(&cleared, tol)))
}

fn cmd_check_hamiltonian(spec: &JobSpec) -> Result<Report, CliError> {
    let input = load(spec)?;
    let tol = spec.tolerance.unwrap_or(FORM_TOL);
    let (fibered, symplectic) = hamiltonian_checks(input.field(), tol)?;
    let verdict = fibered && symplectic;
    let text = format!(
        "L_Y(dx) in <dx>: {fibered}\nx L_Y(dy1^dy2/x) in <dx>: {symplectic}\ntransversally hamiltonian: {verdict}\n"
    );
    let json = json!({
        "lie_dx_in_ideal": fibered,
        "lie_omega_in_ideal": symplectic,
        "transversally_hamiltonian": verdict,
        "tolerance": tol,
    });
    Ok(Report { text, json })
}

fn periods_of(prepared: &Prepared, m: u32, lambda: Complex) -> Result<(Vec<Complex>, Complex, Vec<Complex>), CliError> {
    let h = PlanarHamiltonian::from_field_restriction(prepared.original.field())?;
    let t = period_series_for(&h, m, lambda)?;
    let (lam, c) = invariant_from_periods(&t)?;
    Ok((t.coeffs, lam, c))
}

fn cmd_periods(spec: &JobSpec) -> Result<Report, CliError> {
    let prepared = prepare(spec)?;
    let m = v_order(spec)?;
    let h = PlanarHamiltonian::from_field_restriction(prepared.original.field())?;
    let lambda = if prepared.input.is_diagonal() { prepared.input.lambda() } else { h.principal_lambda() };
    let (t, lam, c) = periods_of(&prepared, m, lambda)?;
    let mut text = String::new();
    writeln!(text, "hamiltonian: beta = {}, alpha = {}", fmt_c(h.beta), fmt_c(h.alpha)).unwrap();
    writeln!(text, "v-order: {m}").unwrap();
    jet_text(&mut text, "T", 0, &t);
    writeln!(text, "lambda: {}", fmt_c(lam)).unwrap();
    jet_text(&mut text, "c", 1, &c);
    let mut obj = serde_json::Map::new();
    obj.insert("v_order".into(), json!(m));
    obj.insert("beta".into(), cj(h.beta));
    obj.insert("alpha".into(), cj(h.alpha));
    obj.insert("periods".into(), jet_json(0, &t));
    obj.insert("lambda".into(), cj(lam));
    obj.insert("c".into(), jet_json(1, &c));
    if spec.source == Source::Painleve1 {
        let closed: Vec<Complex> = (0..=m).map(painleve1_Thk_closed_form).collect();
        jet_text(&mut text, "T closed form", 0, &closed);
        obj.insert("periods_closed_form".into(), jet_json(0, &closed));
    }
    Ok(Report { text, json: Value::Object(obj) })
}

fn rel_dev(a: Complex, b: Complex) -> f64 {
    (a - b).norm() / a.norm().max(b.norm()).max(1e-300)
}

fn cmd_compare(spec: &JobSpec) -> Result<Report, CliError> {
    let prepared = prepare(spec)?;
    let (p, _, m) = normalized(spec, &prepared)?;
    let (_, lam, c_periods) = periods_of(&prepared, m, p.lambda)?;
    let c_norm = p.c();
    let mut dev = rel_dev(p.lambda, lam);
    for (a, b) in c_norm.iter().zip(&c_periods) {
        dev = dev.max(rel_dev(*a, *b));
    }
    let tol = spec.tolerance.unwrap_or(DEFAULT_COMPARE_TOL);
    let agree = dev <= tol;
    let mut text = String::new();
    let mut obj = serde_json::Map::new();
    change_report(&mut text, &mut obj, &prepared.change);
    writeln!(text, "{:<8}{:<52}periods", "", "normal form").unwrap();
    writeln!(text, "{:<8}{:<52}{}", "lambda", fmt_c(p.lambda), fmt_c(lam)).unwrap();
    for (k, (a, b)) in c_norm.iter().zip(&c_periods).enumerate() {
        writeln!(text, "{:<8}{:<52}{}", format!("c[{}]", k + 1), fmt_c(*a), fmt_c(*b)).unwrap();
    }
    writeln!(text, "a1: {}", fmt_c(p.a1)).unwrap();
    writeln!(text, "a2: {}", fmt_c(p.a2)).unwrap();
    writeln!(text, "max relative deviation: {dev:.3e}").unwrap();
    writeln!(text, "agree within {tol:.1e}: {agree}").unwrap();
    obj.insert("v_order".into(), json!(m));
    obj.insert("normal_form".into(), json!({ "lambda": cj(p.lambda), "a1": cj(p.a1), "a2": cj(p.a2), "c": jet_json(1, &c_norm) }));
    obj.insert("periods".into(), json!({ "lambda": cj(lam), "c": jet_json(1, &c_periods) }));
    obj.insert("max_relative_deviation".into(), json!(dev));
    obj.insert("tolerance".into(), json!(tol));
    obj.insert("agree".into(), json!(agree));
    Ok(Report { text, json: Value::Object(obj) })
}

fn cmd_isotropy(spec: &JobSpec) -> Result<Report, CliError> {
    let prepared = prepare(spec)?;
    let (p, _, m) = normalized(spec, &prepared)?;
    let tol = spec.tolerance.unwrap_or(DEFAULT_ISOTROPY_TOL) * p.max_abs().max(1.0);
    let iso = isotropy_group(&p);
    let q = match iso {
        Isotropy::Unconstrained => None,
        Isotropy::Roots(q) => Some(q),
    };
    let one = Complex::new(1.0, 0.0);
    let generator = Complex::from_polar(1.0, 2.0 * PI / q.unwrap_or(1) as f64);
    let verified = diagonal_fixes(&p, one, generator, spec.order, tol)?;
    let (text, group) = match q {
        None => ("isotropy: theta1 theta2 arbitrary (c-jets vanish)\n".to_string(), json!("unconstrained")),
        Some(q) => (format!("isotropy: (theta1 theta2)^{q} = 1\n"), json!({ "roots_of_unity": q })),
    };
    let text = format!("v-order: {m}\n{text}generator verified: {verified}\n");
    let json = json!({ "v_order": m, "isotropy": group, "generator_verified": verified });
    Ok(Report { text, json })
}
