//! Command-line surface: argument parsing, command execution and reports.

use crate::equivalence::{check_equivalence, value_names, Grid, Sample, Verdict};
use crate::error::{Error, Result};
use crate::expr::{parse_equation_file, taylor::monomials, Equation};
use crate::invariants::{
    derived2, derived3, f_invariants, frame, lie_derivatives_at, omega2, omega3, scalar_invariants, LieDerivatives,
    ScaledRational, TensorComp,
};
use crate::isotropy::classify_orbit;
use crate::jetpoly::{f_values, SectionJet};
use crate::random::Fixtures;
use crate::scalar::{fmt_q, parse_rational, qpow, Q};
use crate::transform::{det2, invert_map_jet, lift_section_jet, MapJet};
use clap::{Parser, Subcommand, ValueEnum};
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

pub const DEFAULT_GRID: &str = "-1,-1:1,1:2,2";

#[derive(Parser, Debug)]
#[command(name = "jetinv", version, about = "Exact differential invariants of y'' = a3 y'^3 + a2 y'^2 + a1 y' + a0")]
pub struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    pub format: Format,
    /// Seed for the randomized self-check of `analyze`.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Full invariant dossier at a point.
    Analyze {
        file: String,
        #[arg(long, default_value = "0,0", allow_hyphen_values = true)]
        point: String,
        #[arg(long, default_value_t = 5)]
        order: usize,
    },
    /// Orbit label of the 2- or 3-jet at a point.
    Orbit {
        file: String,
        #[arg(long, default_value = "0,0", allow_hyphen_values = true)]
        point: String,
        #[arg(long, default_value_t = 3)]
        order: usize,
    },
    /// Whether F1 = F2 = 0 at the point and on an optional grid around it.
    Linearizable {
        file: String,
        #[arg(long, default_value = "0,0", allow_hyphen_values = true)]
        point: String,
        #[arg(long, allow_hyphen_values = true)]
        grid: Option<String>,
    },
    /// Scalar invariants and their Lie derivatives at a point.
    Invariants {
        file: String,
        #[arg(long, default_value = "0,0", allow_hyphen_values = true)]
        point: String,
    },
    /// Necessary conditions for point equivalence of two equations.
    Equiv {
        file1: String,
        file2: String,
        #[arg(long, default_value = "0,0", allow_hyphen_values = true)]
        point1: String,
        #[arg(long, default_value = "0,0", allow_hyphen_values = true)]
        point2: String,
        #[arg(long, default_value = DEFAULT_GRID, allow_hyphen_values = true)]
        grid: String,
    },
    /// Transformed section jet at f(p) and the inverse map jet.
    Pushforward {
        file: String,
        #[arg(long, default_value = "0,0", allow_hyphen_values = true)]
        point: String,
        #[arg(long, default_value_t = 3)]
        order: usize,
        /// Lift back through the inverse jet and compare.
        #[arg(long)]
        verify: bool,
    },
}

/// Machine-readable output of one command. Fields are in canonical order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub command: Vec<String>,
    pub input_digest: String,
    pub results: Map<String, Value>,
    pub warnings: Vec<String>,
}

impl Report {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize") + "\n"
    }

    pub fn from_json(text: &str) -> std::result::Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("jetinv {}\n", self.command.join(" "));
        out.push_str(&format!("input sha256: {}\n", self.input_digest));
        for (k, v) in &self.results {
            render(&mut out, k, v, 0);
        }
        for w in &self.warnings {
            out.push_str(&format!("warning: {}\n", w));
        }
        out
    }
}

fn render(out: &mut String, key: &str, v: &Value, depth: usize) {
    let pad = "  ".repeat(depth);
    match v {
        Value::Object(m) if is_scaled(m) => {
            out.push_str(&format!("{pad}{key}: {} ≈ {}\n", scaled_text(m), m["decimal"].as_str().unwrap_or("")));
        }
        Value::Object(m) => {
            out.push_str(&format!("{pad}{key}:\n"));
            for (k, x) in m {
                render(out, k, x, depth + 1);
            }
        }
        Value::Array(a) if a.iter().all(|x| !x.is_object() && !x.is_array()) => {
            let items: Vec<String> = a.iter().map(scalar_text).collect();
            out.push_str(&format!("{pad}{key}: [{}]\n", items.join(", ")));
        }
        Value::Array(a) => {
            out.push_str(&format!("{pad}{key}:\n"));
            for (i, x) in a.iter().enumerate() {
                render(out, &format!("[{i}]"), x, depth + 1);
            }
        }
        other => out.push_str(&format!("{pad}{key}: {}\n", scalar_text(other))),
    }
}

fn scalar_text(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn is_scaled(m: &Map<String, Value>) -> bool {
    m.len() == 3 && m.contains_key("r") && m.contains_key("e") && m.contains_key("decimal")
}

fn scaled_text(m: &Map<String, Value>) -> String {
    let r = m["r"].as_str().unwrap_or("");
    match m["e"].as_i64() {
        Some(0) => r.to_string(),
        Some(e) => format!("{r}·t^{e}"),
        None => r.to_string(),
    }
}

/// Exit status and rendered output of one invocation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Parse `args` (including the program name) and run the command.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let args: Vec<std::ffi::OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 3 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                Outcome { code, stdout: text, stderr: String::new() }
            } else {
                Outcome { code, stdout: String::new(), stderr: text }
            };
        }
    };
    let echo: Vec<String> = args.iter().skip(1).map(|a| a.to_string_lossy().into_owned()).collect();
    match execute(&cli, echo) {
        Ok((report, code)) => {
            let stdout = match cli.format {
                Format::Json => report.to_json(),
                Format::Text => report.to_text(),
            };
            Outcome { code, stdout, stderr: String::new() }
        }
        Err(e) => Outcome { code: 3, stdout: String::new(), stderr: format!("error: {}\n", e) },
    }
}

/// Run a parsed command; the second value is the exit code.
pub fn execute(cli: &Cli, echo: Vec<String>) -> Result<(Report, i32)> {
    let mut inputs = Vec::new();
    let mut load = |path: &str| -> Result<String> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Input(format!("{path}: {e}")))?;
        inputs.push(text.clone());
        Ok(text)
    };
    let mut warnings = Vec::new();
    let (results, code) = match &cli.command {
        Command::Analyze { file, point, order } => {
            let eq = load_equation(&load(file)?, file)?;
            analyze(&eq, &parse_point(point)?, *order, cli.seed, &mut warnings)?
        }
        Command::Orbit { file, point, order } => {
            (orbit(&load_equation(&load(file)?, file)?, &parse_point(point)?, *order)?, 0)
        }
        Command::Linearizable { file, point, grid } => {
            let eq = load_equation(&load(file)?, file)?;
            let grid = grid.as_deref().map(Grid::parse).transpose()?;
            (linearizable(&eq, &parse_point(point)?, grid.as_ref())?, 0)
        }
        Command::Invariants { file, point } => {
            (invariants(&load_equation(&load(file)?, file)?, &parse_point(point)?, &mut warnings)?, 0)
        }
        Command::Equiv { file1, file2, point1, point2, grid } => {
            let eq1 = load_equation(&load(file1)?, file1)?;
            let eq2 = load_equation(&load(file2)?, file2)?;
            let grid = Grid::parse(grid)?;
            equiv(&eq1, &parse_point(point1)?, &eq2, &parse_point(point2)?, &grid, &mut warnings)?
        }
        Command::Pushforward { file, point, order, verify } => {
            let text = load(file)?;
            pushforward(&text, file, &parse_point(point)?, *order, *verify)?
        }
    };
    let report = Report { command: echo, input_digest: digest(&inputs), results, warnings };
    Ok((report, code))
}

/// SHA-256 over the input files, each followed by a zero byte.
pub fn digest(inputs: &[String]) -> String {
    let mut h = Sha256::new();
    for t in inputs {
        h.update(t.as_bytes());
        h.update([0u8]);
    }
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

pub fn parse_point(text: &str) -> Result<(Q, Q)> {
    let bad = || Error::Input(format!("point {:?} is not of the form x,y with rational coordinates", text));
    let (a, b) = text.split_once(',').ok_or_else(bad)?;
    Ok((parse_rational(a).ok_or_else(bad)?, parse_rational(b).ok_or_else(bad)?))
}

fn load_equation(text: &str, path: &str) -> Result<Equation> {
    let file = parse_equation_file(text).map_err(|e| Error::Input(format!("{path}: {e}")))?;
    file.equation.ok_or_else(|| Error::Input(format!("{path}: missing [equation] table")))
}

pub fn q_json(x: &Q) -> Value {
    Value::String(fmt_q(x))
}

pub fn point_json(p: &(Q, Q)) -> Value {
    json!([fmt_q(&p.0), fmt_q(&p.1)])
}

/// `{r, e, decimal}` for `r·t^e` with `t⁵ = F³`.
pub fn scaled_json(s: &ScaledRational, f3: &Q) -> Value {
    json!({ "r": fmt_q(&s.r), "e": s.e, "decimal": format!("{:.12e}", s.approx(f3)) })
}

pub fn tensor_json(t: &TensorComp) -> Value {
    json!({ "r": t.r, "s": t.s, "w": t.w, "components": t.to_strings() })
}

pub fn jet_json(th: &SectionJet<Q>) -> Value {
    let mut m = Map::new();
    for (i, a, b) in SectionJet::<Q>::coordinates(th.k) {
        m.insert(format!("u{}_({},{})", i, a, b), q_json(th.get(i, a, b)));
    }
    Value::Object(m)
}

fn map_jet_json(f: &MapJet) -> Value {
    let mut m = Map::new();
    for c in 0..2 {
        for (a, b) in monomials(f.m) {
            m.insert(format!("f{}_({},{})", c + 1, a, b), q_json(&f.f[c].raw_partial(a, b)));
        }
    }
    Value::Object(m)
}

fn lie_json(v: &LieDerivatives) -> Value {
    let mut m = Map::new();
    for (name, s) in value_names().into_iter().zip(v.all()) {
        m.insert(name, scaled_json(&s, &v.f3));
    }
    Value::Object(m)
}

fn f_json(th: &SectionJet<Q>) -> Result<Value> {
    let (f1, f2, f3) = f_invariants(th)?;
    let mut m = Map::new();
    m.insert("F1".into(), q_json(&f1));
    m.insert("F2".into(), q_json(&f2));
    if let Some(f3) = f3 {
        m.insert("F3".into(), q_json(&f3));
    }
    Ok(Value::Object(m))
}

fn analyze(
    eq: &Equation,
    p: &(Q, Q),
    k: usize,
    seed: Option<u64>,
    warnings: &mut Vec<String>,
) -> Result<(Map<String, Value>, i32)> {
    if k < 2 {
        return Err(Error::OrderTooLow { needed: 2, have: k });
    }
    let th = eq.section_jet(p, k)?;
    let mut r = Map::new();
    r.insert("point".into(), point_json(p));
    r.insert("order".into(), json!(k));
    r.insert("F".into(), f_json(&th)?);
    let (f1, f2, f3) = f_invariants(&th)?;
    let orbit2 = classify_orbit(&th.truncate(2)?)?;
    let orbit = match &f3 {
        Some(f3) if !f3.is_zero() => classify_orbit(&th.truncate(3)?)?,
        _ => orbit2,
    };
    r.insert("orbit".into(), json!(orbit.to_string()));
    if k >= 3 {
        r.insert("orbit_3jet".into(), json!(classify_orbit(&th.truncate(3)?)?.to_string()));
    }
    r.insert("linearizable_at_point".into(), json!(f1.is_zero() && f2.is_zero()));
    let mut tensors = Map::new();
    tensors.insert("omega2".into(), tensor_json(&omega2(&th)?));
    let (a2, b2) = derived2(&th)?;
    tensors.insert("alpha2".into(), tensor_json(&a2));
    tensors.insert("beta2".into(), tensor_json(&b2));
    if k >= 3 {
        match omega3(&th) {
            Ok(t) => {
                tensors.insert("omega3".into(), tensor_json(&t));
            }
            Err(Error::LinearizableOrbit) => {
                tensors.insert("omega3".into(), Value::Null);
                warnings.push("omega3 is undefined over Orb2_2 (F1 = F2 = 0)".into());
            }
            Err(e) => return Err(e),
        }
        let (a3, b3, nu) = derived3(&th)?;
        tensors.insert("alpha3".into(), tensor_json(&a3));
        tensors.insert("beta3".into(), tensor_json(&b3));
        tensors.insert("nu".into(), tensor_json(&nu));
        let v = f_values(&th.truncate(3)?)?;
        r.insert("Psi".into(), json!({ "Psi1": fmt_q(&v.psi1), "Psi2": fmt_q(&v.psi2) }));
    } else {
        warnings.push("order 2: F3, third-order tensors and the frame need order 3".into());
    }
    r.insert("tensors".into(), Value::Object(tensors));
    if let Some(f3) = f3.as_ref().filter(|f3| !f3.is_zero()) {
        let fr = frame(&th)?;
        r.insert(
            "frame".into(),
            json!({
                "xi1": [scaled_json(&fr.xi1[0], f3), scaled_json(&fr.xi1[1], f3)],
                "xi2": [scaled_json(&fr.xi2[0], f3), scaled_json(&fr.xi2[1], f3)],
                "determinant": scaled_json(&fr.determinant(), f3),
            }),
        );
        if k >= 5 {
            r.insert("invariants".into(), lie_json(&lie_derivatives_at(&th)?));
        } else if k == 4 {
            let v = scalar_invariants(&th)?;
            let m: Map<String, Value> =
                v.i.iter().enumerate().map(|(j, s)| (format!("I{}", j + 1), scaled_json(s, &v.f3))).collect();
            r.insert("invariants".into(), Value::Object(m));
        }
    } else if f3.is_some() {
        warnings.push("degenerate 3-jet: F3 = 0, so the frame and scalar invariants are undefined".into());
    }
    let mut code = 0;
    if let Some(seed) = seed {
        let check = self_check(&th, seed)?;
        if check.get("status") != Some(&json!("pass")) {
            code = 1;
        }
        r.insert("self_check".into(), Value::Object(check));
    }
    Ok((r, code))
}

/// Transform the jet by a seeded random point map and test every natural law.
fn self_check(th: &SectionJet<Q>, seed: u64) -> Result<Map<String, Value>> {
    let f = Fixtures::new(seed).map_jet(&th.p, th.k + 2);
    let j = f.jacobian();
    let lifted = lift_section_jet(&f, th)?;
    let mut checks = Map::new();
    checks.insert("omega2".into(), json!(omega2(&lifted)? == omega2(th)?.push(&j)));
    let (a, b) = derived2(th)?;
    let (la, lb) = derived2(&lifted)?;
    checks.insert("alpha2".into(), json!(la == a.push(&j)));
    checks.insert("beta2".into(), json!(lb == b.push(&j)));
    if th.k >= 3 {
        match (omega3(th), omega3(&lifted)) {
            (Ok(t), Ok(lt)) => {
                checks.insert("omega3".into(), json!(lt == t.push(&j)));
            }
            (Err(Error::LinearizableOrbit), Err(Error::LinearizableOrbit)) => {}
            (x, y) => {
                checks.insert("omega3".into(), json!(x.is_ok() == y.is_ok()));
            }
        }
        let (a, b, nu) = derived3(th)?;
        let (la, lb, lnu) = derived3(&lifted)?;
        checks.insert("alpha3".into(), json!(la == a.push(&j)));
        checks.insert("beta3".into(), json!(lb == b.push(&j)));
        checks.insert("nu".into(), json!(lnu == nu.push(&j)));
    }
    let f3 = f_invariants(th)?.2;
    if th.k >= 5 && f3.as_ref().is_some_and(|f| !f.is_zero()) {
        let det = det2(&j);
        let x = lie_derivatives_at(th)?;
        let y = lie_derivatives_at(&lifted)?;
        let ok = x.all().iter().zip(y.all()).all(|(u, v)| v.r == &u.r * qpow(&det, u.e) && u.real_eq(&x.f3, &v, &y.f3));
        checks.insert("scalar_invariants".into(), json!(ok));
    }
    let pass = checks.values().all(|v| v == &json!(true));
    let mut out = Map::new();
    out.insert("seed".into(), json!(seed));
    out.insert("image_point".into(), point_json(&f.value()));
    out.insert("checks".into(), Value::Object(checks));
    out.insert("status".into(), json!(if pass { "pass" } else { "fail" }));
    Ok(out)
}

fn orbit(eq: &Equation, p: &(Q, Q), k: usize) -> Result<Map<String, Value>> {
    if !(2..=3).contains(&k) {
        return Err(Error::Input(format!("orbit needs order 2 or 3, got {k}")));
    }
    let th = eq.section_jet(p, k)?;
    let mut r = Map::new();
    r.insert("point".into(), point_json(p));
    r.insert("order".into(), json!(k));
    r.insert("orbit".into(), json!(classify_orbit(&th)?.to_string()));
    r.insert("F".into(), f_json(&th)?);
    Ok(r)
}

fn linearizable(eq: &Equation, p: &(Q, Q), grid: Option<&Grid>) -> Result<Map<String, Value>> {
    let mut points = vec![p.clone()];
    if let Some(g) = grid {
        points.extend(g.offsets()?.into_iter().map(|o| (&p.0 + &o.0, &p.1 + &o.1)));
    }
    let mut samples = Vec::new();
    let mut all = true;
    for pt in &points {
        let (f1, f2, _) = f_invariants(&eq.section_jet(pt, 2)?)?;
        all &= f1.is_zero() && f2.is_zero();
        samples.push(json!({ "point": point_json(pt), "F1": fmt_q(&f1), "F2": fmt_q(&f2) }));
    }
    let mut r = Map::new();
    r.insert("samples".into(), Value::Array(samples));
    r.insert("F1_F2_vanish_at_all_samples".into(), json!(all));
    Ok(r)
}

fn invariants(eq: &Equation, p: &(Q, Q), warnings: &mut Vec<String>) -> Result<Map<String, Value>> {
    let th = eq.section_jet(p, 5)?;
    let mut r = Map::new();
    r.insert("point".into(), point_json(p));
    match lie_derivatives_at(&th) {
        Ok(v) => {
            r.insert("F3".into(), q_json(&v.f3));
            r.insert("values".into(), lie_json(&v));
        }
        Err(Error::F3Zero) => {
            warnings.push("degenerate 3-jet: F3 = 0, so the scalar invariants are undefined".into());
            r.insert("F3".into(), q_json(&Q::zero()));
            r.insert("values".into(), Value::Null);
        }
        Err(e) => return Err(e),
    }
    Ok(r)
}

fn sample_json(s: &Sample) -> Value {
    json!({ "point": point_json(&s.point), "F3": fmt_q(&s.values.f3), "values": lie_json(&s.values) })
}

fn equiv(
    eq1: &Equation,
    p1: &(Q, Q),
    eq2: &Equation,
    p2: &(Q, Q),
    grid: &Grid,
    warnings: &mut Vec<String>,
) -> Result<(Map<String, Value>, i32)> {
    let mut r = Map::new();
    r.insert("point1".into(), point_json(p1));
    r.insert("point2".into(), point_json(p2));
    r.insert("grid".into(), json!(grid.to_string()));
    let rep = match check_equivalence(eq1, p1, eq2, p2, grid) {
        Ok(rep) => rep,
        Err(Error::NonRegular(why)) => {
            r.insert(
                "verdict".into(),
                json!({ "kind": "Inconclusive", "reason": format!("non-regular point: {why}") }),
            );
            return Ok((r, 2));
        }
        Err(e) => return Err(e),
    };
    let (kind, reason) = match &rep.verdict {
        Verdict::NecessaryConditionsPass => ("NecessaryConditionsPass", None),
        Verdict::Fail(why) => ("Fail", Some(why.clone())),
        Verdict::CaseMismatch(why) => ("CaseMismatch", Some(why.clone())),
    };
    r.insert("verdict".into(), json!({ "kind": kind, "reason": reason }));
    r.insert("case1".into(), json!(rep.sig1.tag.to_string()));
    r.insert("case2".into(), json!(rep.sig2.tag.to_string()));
    r.insert("marked1".into(), sample_json(&rep.sig1.marked));
    r.insert("marked2".into(), sample_json(&rep.sig2.marked));
    r.insert("grid_samples".into(), json!(rep.sig1.grid.len()));
    let pairs: Vec<Value> = rep.matched_pairs.iter().map(|(a, b)| json!([a, b])).collect();
    r.insert("matched_grid_pairs".into(), Value::Array(pairs));
    r.insert(
        "nearest_generator_deviation".into(),
        rep.nearest_deviation.map_or(Value::Null, |d| json!(format!("{d:.6e}"))),
    );
    warnings.extend(rep.warnings.iter().cloned());
    Ok((r, rep.verdict.exit_code()))
}

fn pushforward(text: &str, path: &str, p: &(Q, Q), k: usize, verify: bool) -> Result<(Map<String, Value>, i32)> {
    let file = parse_equation_file(text).map_err(|e| Error::Input(format!("{path}: {e}")))?;
    let eq = file.equation.ok_or_else(|| Error::Input(format!("{path}: missing [equation] table")))?;
    let (f1, f2) = file.map.ok_or_else(|| Error::Input(format!("{path}: missing [map] table")))?;
    let th = eq.section_jet(p, k)?;
    let fjet = MapJet::from_exprs(&f1, &f2, p, k + 2)?;
    if det2(&fjet.jacobian()).is_zero() {
        return Err(Error::SingularJacobian);
    }
    let pushed = lift_section_jet(&fjet, &th)?;
    let inv = invert_map_jet(&fjet)?;
    let mut r = Map::new();
    r.insert("point".into(), point_json(p));
    r.insert("image_point".into(), point_json(&fjet.value()));
    r.insert("order".into(), json!(k));
    r.insert("jet".into(), jet_json(&pushed));
    r.insert("inverse_jet".into(), map_jet_json(&inv));
    if k >= 2 {
        r.insert("F".into(), f_json(&pushed)?);
    }
    let mut code = 0;
    if verify {
        let back = lift_section_jet(&inv, &pushed)?;
        let ok = back == th;
        r.insert("verify".into(), json!(if ok { "exact-match" } else { "mismatch" }));
        if !ok {
            code = 1;
        }
    }
    Ok((r, code))
}
