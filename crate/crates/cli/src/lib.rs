//! Command-line front end: flag and `--file` handling, dispatch to the core
//! crate, and JSON reports.
//!
//! Exit codes: 0 success, 1 other failure (bad usage, missing input, I/O),
//! 2 hypothesis violation, 3 expression parse error.

use std::io::Write;
use std::collections::BTreeMap;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use fermat_dde_core::growth::{check_growth_bounds, growth_report};
use fermat_dde_core::{
    classify, parse_constant, parse_exp_poly, propose_frequencies, search, set_tolerance, tolerance,
    AnsatzSpec, Certificate, ComplexScalar, Error, ExpPoly, ExpTerm, FermatDde, Forcing, TheoremBranch,
    Tolerance,
};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

pub const EXIT_OK: i32 = 0;
pub const EXIT_OTHER: i32 = 1;
pub const EXIT_HYPOTHESIS: i32 = 2;
pub const EXIT_PARSE: i32 = 3;

/// Environment variable overriding the relative tolerance.
pub const TOLERANCE_ENV: &str = "FERMAT_DDE_TOL";

#[derive(Parser, Debug)]
#[command(
    name = "fermat-dde",
    version,
    about = "Verify, classify and search for exponential-polynomial solutions of\n\
             f^n(z) + a (f^(l)(z + c))^m = p1(z) e^{a1 z^k} + p2(z) e^{a2 z^k}"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// Substitute --f into the equation and report the certificate.
    Verify(Inputs),
    /// Run the classification solver that matches the equation's shape.
    Solve(Inputs),
    /// Multistart ansatz search over --frequencies (proposed when omitted).
    Search(Inputs),
    /// Growth functionals of --f at --radii.
    Growth(Inputs),
    /// Print the canonical residual of --f.
    Residual(Inputs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Verify(_) => "verify",
            Command::Solve(_) => "solve",
            Command::Search(_) => "search",
            Command::Growth(_) => "growth",
            Command::Residual(_) => "residual",
        }
    }

    pub fn inputs(&self) -> &Inputs {
        match self {
            Command::Verify(i)
            | Command::Solve(i)
            | Command::Search(i)
            | Command::Growth(i)
            | Command::Residual(i) => i,
        }
    }
}

/// Every flag is accepted by every command; commands ignore what they do not use.
/// Complex values and functions use the expression syntax (`5i`, `-0.5+2i`, `2*pi`,
/// `exp(i*z)`).
#[derive(Args, Debug, Clone, Default)]
pub struct Inputs {
    #[arg(long = "eq-n")]
    pub eq_n: Option<u32>,
    #[arg(long = "eq-m")]
    pub eq_m: Option<u32>,
    /// Derivative order l (default 0).
    #[arg(long = "eq-l")]
    pub eq_l: Option<u32>,
    /// Coefficient a (default 1).
    #[arg(long, allow_hyphen_values = true)]
    pub a: Option<String>,
    /// Delay c (default 0).
    #[arg(long, allow_hyphen_values = true)]
    pub c: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub p1: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub a1: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub p2: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub a2: Option<String>,
    /// Exponent degree k (default 1).
    #[arg(long)]
    pub k: Option<u32>,
    /// Candidate or subject function.
    #[arg(long, allow_hyphen_values = true)]
    pub f: Option<String>,
    #[arg(long, value_delimiter = ',')]
    pub radii: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub frequencies: Option<Vec<String>>,
    #[arg(long)]
    pub starts: Option<u32>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long = "max-poly-degree")]
    pub max_poly_degree: Option<u32>,
    /// JSON object with the same keys as the flags; flags take precedence.
    #[arg(long)]
    pub file: Option<PathBuf>,
}

#[derive(Deserialize, Default)]
#[serde(untagged)]
enum Scalar {
    Number(f64),
    Text(String),
    #[default]
    Missing,
}

impl Scalar {
    fn into_text(self) -> Option<String> {
        match self {
            Scalar::Number(x) => Some(format!("{x:?}")),
            Scalar::Text(s) => Some(s),
            Scalar::Missing => None,
        }
    }
}

#[derive(Deserialize, Default)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
struct FileInputs {
    eq_n: Option<u32>,
    eq_m: Option<u32>,
    eq_l: Option<u32>,
    #[serde(default)]
    a: Scalar,
    #[serde(default)]
    c: Scalar,
    #[serde(default)]
    p1: Scalar,
    #[serde(default)]
    a1: Scalar,
    #[serde(default)]
    p2: Scalar,
    #[serde(default)]
    a2: Scalar,
    k: Option<u32>,
    f: Option<String>,
    radii: Option<Vec<f64>>,
    frequencies: Option<Vec<Scalar>>,
    starts: Option<u32>,
    seed: Option<u64>,
    max_poly_degree: Option<u32>,
}

impl Inputs {
    /// Fills unset flags from `--file`.
    pub fn merged(&self) -> Result<Inputs, Error> {
        let Some(path) = &self.file else {
            return Ok(self.clone());
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidArgument(format!("cannot read {}: {e}", path.display())))?;
        let file: FileInputs = serde_json::from_str(&text)
            .map_err(|e| Error::InvalidArgument(format!("bad input file {}: {e}", path.display())))?;
        let me = self.clone();
        Ok(Inputs {
            eq_n: me.eq_n.or(file.eq_n),
            eq_m: me.eq_m.or(file.eq_m),
            eq_l: me.eq_l.or(file.eq_l),
            a: me.a.or(file.a.into_text()),
            c: me.c.or(file.c.into_text()),
            p1: me.p1.or(file.p1.into_text()),
            a1: me.a1.or(file.a1.into_text()),
            p2: me.p2.or(file.p2.into_text()),
            a2: me.a2.or(file.a2.into_text()),
            k: me.k.or(file.k),
            f: me.f.or(file.f),
            radii: me.radii.or(file.radii),
            frequencies: me.frequencies.or_else(|| {
                file.frequencies
                    .map(|v| v.into_iter().filter_map(Scalar::into_text).collect())
            }),
            starts: me.starts.or(file.starts),
            seed: me.seed.or(file.seed),
            max_poly_degree: me.max_poly_degree.or(file.max_poly_degree),
            file: me.file,
        })
    }
}

/// The JSON document written to stdout. Field order is fixed.
#[derive(Debug, Serialize)]
pub struct Report {
    pub command: String,
    pub input_echo: BTreeMap<String, Value>,
    pub status: String,
    pub solutions: Vec<Value>,
    pub certificates: Vec<Value>,
    pub notes: Vec<String>,
    /// Command-specific payload (residual, growth samples, search traces).
    pub data: Value,
}

pub struct Outcome {
    pub report: Report,
    pub exit_code: i32,
}

#[derive(Serialize)]
struct ExpPolyJson<'a> {
    expr: String,
    terms: &'a [ExpTerm],
}

fn exp_poly_json(f: &ExpPoly) -> Value {
    serde_json::to_value(ExpPolyJson {
        expr: f.to_string(),
        terms: f.terms(),
    })
    .expect("serializable")
}

fn certificate_json(cert: &Certificate) -> Value {
    json!({
        "candidate": exp_poly_json(&cert.candidate),
        "residual_max_coeff": cert.residual_max_coeff,
        "verified": cert.verified,
    })
}

fn scalar_json(c: ComplexScalar) -> Value {
    json!({ "re": c.re, "im": c.im })
}

pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Syntax { .. } | Error::Lowering(_) => EXIT_PARSE,
        Error::Hypothesis(_) => EXIT_HYPOTHESIS,
        _ => EXIT_OTHER,
    }
}

fn error_status(err: &Error) -> &'static str {
    match exit_code(err) {
        EXIT_PARSE => "parse-error",
        EXIT_HYPOTHESIS => "hypothesis-violation",
        _ => "error",
    }
}

/// Parses inputs while recording what was understood.
struct Resolver {
    inputs: Inputs,
    echo: BTreeMap<String, Value>,
}

impl Resolver {
    fn required<'a>(value: &'a Option<String>, flag: &str) -> Result<&'a str, Error> {
        value
            .as_deref()
            .ok_or_else(|| Error::InvalidArgument(format!("missing --{flag}")))
    }

    fn constant(&mut self, flag: &str, value: Option<String>, default: Option<ComplexScalar>) -> Result<ComplexScalar, Error> {
        let c = match value {
            Some(text) => parse_constant(&text).map_err(|e| annotate(e, flag))?,
            None => default.ok_or_else(|| Error::InvalidArgument(format!("missing --{flag}")))?,
        };
        self.echo.insert(flag.into(), scalar_json(c));
        Ok(c)
    }

    fn function(&mut self, flag: &str, value: &Option<String>) -> Result<ExpPoly, Error> {
        let text = Self::required(value, flag)?;
        let f = parse_exp_poly(text).map_err(|e| annotate(e, flag))?;
        self.echo.insert(flag.into(), json!(text));
        Ok(f)
    }

    fn count(&mut self, flag: &str, value: Option<u32>, default: Option<u32>) -> Result<u32, Error> {
        let v = value
            .or(default)
            .ok_or_else(|| Error::InvalidArgument(format!("missing --{flag}")))?;
        self.echo.insert(flag.into(), json!(v));
        Ok(v)
    }

    fn equation(&mut self) -> Result<FermatDde, Error> {
        let inputs = self.inputs.clone();
        let n = self.count("eq-n", inputs.eq_n, None)?;
        let m = self.count("eq-m", inputs.eq_m, None)?;
        let l = self.count("eq-l", inputs.eq_l, Some(0))?;
        let k = self.count("k", inputs.k, Some(1))?;
        let a = self.constant("a", inputs.a, Some(ComplexScalar::ONE))?;
        let c = self.constant("c", inputs.c, Some(ComplexScalar::ZERO))?;
        let p1 = self.function("p1", &inputs.p1)?;
        let a1 = self.constant("a1", inputs.a1, None)?;
        let p2 = self.function("p2", &inputs.p2)?;
        let a2 = self.constant("a2", inputs.a2, None)?;
        FermatDde::new((n, m), l, a, c, [Forcing::new(p1, a1), Forcing::new(p2, a2)], k)
    }

    fn subject(&mut self) -> Result<ExpPoly, Error> {
        let f = self.inputs.f.clone();
        self.function("f", &f)
    }
}

fn annotate(err: Error, flag: &str) -> Error {
    match err {
        Error::Syntax { offset, message } => Error::Syntax {
            offset,
            message: format!("--{flag}: {message}"),
        },
        Error::Lowering(message) => Error::Lowering(format!("--{flag}: {message}")),
        other => other,
    }
}

fn empty_report(command: &str, echo: BTreeMap<String, Value>, status: &str) -> Report {
    Report {
        command: command.into(),
        input_echo: echo,
        status: status.into(),
        solutions: Vec::new(),
        certificates: Vec::new(),
        notes: Vec::new(),
        data: Value::Null,
    }
}

fn order_note(eq: &FermatDde) -> Option<String> {
    (!eq.coefficient_order_below_k()).then(|| {
        format!(
            "p1 or p2 has exponent degree >= k = {}; solvers will reject this equation, substitution is unaffected",
            eq.k()
        )
    })
}

fn run_verify(r: &mut Resolver, residual_only: bool) -> Result<Report, Error> {
    let eq = r.equation()?;
    let f = r.subject()?;
    let cert = eq.verify(&f);
    let command = if residual_only { "residual" } else { "verify" };
    let mut report = empty_report(command, std::mem::take(&mut r.echo), "");
    report.notes.extend(order_note(&eq));
    if residual_only {
        let residual = eq.residual(&f);
        report.status = if residual.is_zero() { "zero" } else { "nonzero" }.into();
        report.data = json!({
            "residual": exp_poly_json(&residual),
            "residual_max_coeff": cert.residual_max_coeff,
        });
    } else {
        report.status = if cert.verified { "verified" } else { "not-verified" }.into();
        if cert.verified {
            report.solutions.push(exp_poly_json(&f));
        }
    }
    report.certificates.push(certificate_json(&cert));
    Ok(report)
}

fn run_solve(r: &mut Resolver) -> Result<Report, Error> {
    let eq = r.equation()?;
    let result = classify(&eq)?;
    let mut report = empty_report("solve", std::mem::take(&mut r.echo), result.theorem_branch.tag());
    report.solutions = result.solutions.iter().map(|c| exp_poly_json(&c.candidate)).collect();
    report.certificates = result
        .solutions
        .iter()
        .chain(&result.rejected)
        .map(certificate_json)
        .collect();
    report.notes = result.notes.clone();
    if result.theorem_branch == TheoremBranch::OutOfScope {
        report.notes.push("the `search` command can still explore this equation".into());
    }
    report.data = json!({
        "theorem_branch": result.theorem_branch,
        "enumerated": result.enumerated(),
        "rejected": result.rejected.len(),
    });
    Ok(report)
}

fn run_search(r: &mut Resolver) -> Result<Report, Error> {
    let eq = r.equation()?;
    let inputs = r.inputs.clone();
    let mut notes = Vec::new();
    let frequencies = match &inputs.frequencies {
        Some(list) => list
            .iter()
            .map(|t| parse_constant(t).map_err(|e| annotate(e, "frequencies")))
            .collect::<Result<Vec<_>, _>>()?,
        None => {
            notes.push("frequencies proposed from the equation data".to_string());
            propose_frequencies(&eq)?
        }
    };
    let mut spec = AnsatzSpec::new(frequencies);
    if let Some(s) = inputs.starts {
        spec = spec.with_starts(s);
    }
    if let Some(s) = inputs.seed {
        spec = spec.with_seed(s);
    }
    if let Some(d) = inputs.max_poly_degree {
        spec = spec.with_max_poly_degree(d);
    }
    r.echo.insert(
        "frequencies".into(),
        Value::Array(spec.frequencies.iter().map(|&w| scalar_json(w)).collect()),
    );
    r.echo.insert("starts".into(), json!(spec.starts));
    r.echo.insert("seed".into(), json!(spec.seed));
    r.echo.insert("max-poly-degree".into(), json!(spec.max_poly_degree));
    let result = search(&eq, &spec)?;
    let status = if result.found.is_empty() { "none-found" } else { "found" };
    let mut report = empty_report("search", std::mem::take(&mut r.echo), status);
    report.solutions = result.found.iter().map(|c| exp_poly_json(&c.candidate)).collect();
    report.certificates = result.found.iter().map(certificate_json).collect();
    notes.extend(result.notes.iter().cloned());
    report.notes = notes;
    report.data = json!({
        "exhausted": result.exhausted,
        "outcomes": result.outcomes,
        "residual_norm_history": result.residual_norm_history,
    });
    Ok(report)
}

fn run_growth(r: &mut Resolver) -> Result<Report, Error> {
    let f = r.subject()?;
    let radii = r
        .inputs
        .radii
        .clone()
        .ok_or_else(|| Error::InvalidArgument("missing --radii".into()))?;
    r.echo.insert("radii".into(), json!(radii));
    let growth = growth_report(&f, &radii)?;
    let mut report = empty_report("growth", std::mem::take(&mut r.echo), "ok");
    let bounds = if growth.order >= 1.0 {
        Some(check_growth_bounds(&f, &radii)?)
    } else {
        report
            .notes
            .push("order 0: the bounds check needs an exponential term".into());
        None
    };
    if let Some(b) = &bounds {
        if !b.within_bounds {
            report.status = "bounds-violated".into();
        }
    }
    report.data = json!({ "growth": growth, "bounds": bounds });
    Ok(report)
}

/// Runs one command. Failures still produce a report whose status names
/// the failure class.
pub fn execute(command: &Command) -> Outcome {
    let name = command.name();
    let inputs = match command.inputs().merged() {
        Ok(i) => i,
        Err(e) => return failure(name, BTreeMap::new(), e),
    };
    let mut resolver = Resolver {
        inputs,
        echo: BTreeMap::new(),
    };
    let result = match command {
        Command::Verify(_) => run_verify(&mut resolver, false),
        Command::Residual(_) => run_verify(&mut resolver, true),
        Command::Solve(_) => run_solve(&mut resolver),
        Command::Search(_) => run_search(&mut resolver),
        Command::Growth(_) => run_growth(&mut resolver),
    };
    match result {
        Ok(report) => Outcome {
            report,
            exit_code: EXIT_OK,
        },
        Err(e) => failure(name, resolver.echo, e),
    }
}

fn failure(command: &str, echo: BTreeMap<String, Value>, err: Error) -> Outcome {
    let mut report = empty_report(command, echo, error_status(&err));
    report.notes.push(err.to_string());
    Outcome {
        report,
        exit_code: exit_code(&err),
    }
}

/// Applies `FERMAT_DDE_TOL` (a relative tolerance) when set.
pub fn apply_tolerance_env(value: Option<&str>) -> Result<(), Error> {
    let Some(text) = value else { return Ok(()) };
    let rel: f64 = text
        .trim()
        .parse()
        .map_err(|_| Error::InvalidArgument(format!("{TOLERANCE_ENV}={text} is not a number")))?;
    set_tolerance(Tolerance {
        abs: tolerance().abs,
        rel,
    })
}

/// Entry point for the binary; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_OTHER } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    if let Err(e) = apply_tolerance_env(std::env::var(TOLERANCE_ENV).ok().as_deref()) {
        eprintln!("error: {e}");
        return EXIT_OTHER;
    }
    let outcome = execute(&cli.command);
    if outcome.exit_code != EXIT_OK {
        for note in &outcome.report.notes {
            eprintln!("error: {note}");
        }
    }
    let json = serde_json::to_string_pretty(&outcome.report).expect("report serializes");
    // a closed pipe (e.g. `| head`) is not an error worth a panic
    let _ = writeln!(std::io::stdout().lock(), "{json}");
    outcome.exit_code
}
