//! Command-line front end: input parsing, the run itself, JSON/CSV output.

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::branch::ShiftedProblem;
use crate::certificate::{select_parameters, verify_certificate, DEFAULT_SAMPLES_PER_ARC};
use crate::error::Error;
use crate::oracle::{match_root_sets, oracle_roots};
use crate::poly::{Polynomial, ToleranceConfig};
use crate::solver::{reduce, solve_all, Solution, SolverConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_SOLVER: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "quadroots",
    version,
    about = "Polynomial roots from integrals over the positive real axis"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute all roots of a polynomial.
    Solve(SolveArgs),
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    /// Coefficients, leading first: "1, 0, -2+3i".
    #[arg(
        long,
        conflicts_with = "input",
        required_unless_present = "input",
        allow_hyphen_values = true
    )]
    pub coeffs: Option<String>,
    /// JSON file {"coefficients": [[re, im], ...]}.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Relative tolerance for GCD remainders and zero-root deflation.
    #[arg(long, allow_hyphen_values = true)]
    pub tol: Option<f64>,
    /// Absolute tolerance for each improper integral.
    #[arg(long, allow_hyphen_values = true)]
    pub quad_tol: Option<f64>,
    /// Starting shift A (must exceed 1 + max |a_j|).
    #[arg(long, allow_hyphen_values = true)]
    pub shift: Option<f64>,
    /// Skip Newton polishing.
    #[arg(long)]
    pub raw: bool,
    /// Compare against the Durand–Kerner oracle.
    #[arg(long)]
    pub with_oracle: bool,
    /// Sample the Rouché certificate on the keyhole contour.
    #[arg(long)]
    pub certificate: bool,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write results here instead of stdout.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

/// A fully parsed invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRequest {
    pub coefficients: Vec<Complex64>,
    pub config: SolverConfig,
    pub with_oracle: bool,
    pub certificate: bool,
    pub format: Format,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    pub exit_code: i32,
    /// Serialized results (empty on input errors).
    pub output: String,
    /// Messages for stderr.
    pub messages: Vec<String>,
}

#[derive(Debug, Deserialize)]
struct InputFile {
    coefficients: Vec<[f64; 2]>,
}

/// Parses `"re"`, `"re+imi"`, `"re-imi"`, `"imi"`, `"i"` or `"-i"`.
pub fn parse_complex(token: &str) -> Result<Complex64, String> {
    let s: String = token.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        return Err("empty coefficient".into());
    }
    let bad = || format!("cannot parse coefficient {token:?}");
    let num = |t: &str| -> Result<f64, String> {
        let v: f64 = t.parse().map_err(|_| bad())?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(bad())
        }
    };
    let Some(body) = s.strip_suffix(['i', 'j']) else {
        return Ok(Complex64::new(num(&s)?, 0.0));
    };
    let imag = |t: &str| -> Result<f64, String> {
        match t {
            "" | "+" => Ok(1.0),
            "-" => Ok(-1.0),
            _ => num(t),
        }
    };
    // split at the last sign that is not an exponent sign
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&j| (bytes[j] == b'+' || bytes[j] == b'-') && !matches!(bytes[j - 1], b'e' | b'E'));
    match split {
        Some(j) => Ok(Complex64::new(num(&body[..j])?, imag(&body[j..])?)),
        None => Ok(Complex64::new(0.0, imag(body)?)),
    }
}

pub fn parse_coefficients(text: &str) -> Result<Vec<Complex64>, String> {
    let coeffs = text.split(',').map(parse_complex).collect::<Result<Vec<_>, _>>()?;
    validate_coefficients(coeffs)
}

pub fn parse_input_json(text: &str) -> Result<Vec<Complex64>, String> {
    let file: InputFile = serde_json::from_str(text).map_err(|e| format!("invalid input JSON: {e}"))?;
    if file.coefficients.iter().flatten().any(|v| !v.is_finite()) {
        return Err("coefficients must be finite".into());
    }
    validate_coefficients(
        file.coefficients
            .iter()
            .map(|&[re, im]| Complex64::new(re, im))
            .collect(),
    )
}

fn validate_coefficients(coeffs: Vec<Complex64>) -> Result<Vec<Complex64>, String> {
    let first = coeffs.iter().position(|c| c.norm() != 0.0);
    match first {
        Some(i) if coeffs.len() - i >= 2 => Ok(coeffs[i..].to_vec()),
        _ => Err("polynomial must have degree at least 1".into()),
    }
}

impl RunRequest {
    pub fn from_args(args: &SolveArgs) -> Result<Self, String> {
        let coefficients = match (&args.coeffs, &args.input) {
            (Some(text), _) => parse_coefficients(text)?,
            (None, Some(path)) => {
                let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
                parse_input_json(&text)?
            }
            (None, None) => return Err("one of --coeffs or --input is required".into()),
        };
        let mut config = SolverConfig {
            polish: !args.raw,
            shift: args.shift,
            ..Default::default()
        };
        if let Some(tol) = args.tol {
            config.tolerance = ToleranceConfig::new(tol).map_err(|e| e.to_string())?;
        }
        if let Some(q) = args.quad_tol {
            config.quad_tol = q;
        }
        config.validate().map_err(|e| e.to_string())?;
        Ok(Self {
            coefficients,
            config,
            with_oracle: args.with_oracle,
            certificate: args.certificate,
            format: args.format,
        })
    }
}

/// Root entry of the JSON output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RootEntry {
    pub re: f64,
    pub im: f64,
    pub multiplicity: usize,
    pub residual: f64,
    pub branch: Option<usize>,
    pub raw_re: f64,
    pub raw_im: f64,
}

fn root_entries(solution: &Solution) -> Vec<RootEntry> {
    solution
        .reports
        .iter()
        .map(|r| RootEntry {
            re: r.root.re,
            im: r.root.im,
            multiplicity: r.multiplicity,
            residual: r.residual,
            branch: r.branch.map(|b| b.index()),
            raw_re: r.raw_root.re,
            raw_im: r.raw_root.im,
        })
        .collect()
}

fn diagnostics(solution: &Solution, config: &SolverConfig) -> Value {
    let per_root: Vec<Value> = solution
        .reports
        .iter()
        .map(|r| {
            json!({
                "branch": r.branch.map(|b| b.index()),
                "xi": r.xi.map(|x| [x.re, x.im]),
                "numerator_error": r.diagnostics.numerator_error,
                "denominator_error": r.diagnostics.denominator_error,
                "evaluations": r.diagnostics.evaluations,
                "quadrature_converged": r.diagnostics.quadrature_converged,
                "raw_residual": r.diagnostics.raw_residual,
                "polish_iterations": r.diagnostics.polish_iterations,
                "polish_converged": r.diagnostics.polish_converged,
                "flags": r.diagnostics.flags,
            })
        })
        .collect();
    json!({
        "complete": solution.complete,
        "normalized_from": solution.normalized_from.map(|c| [c.re, c.im]),
        "shift_escalations": solution.shift_escalations,
        "quad_tol": config.quad_tol,
        "polish": config.polish,
        "per_root": per_root,
    })
}

fn certificate_json(request: &RunRequest, solution: &Solution) -> Result<Value, Error> {
    let Some(shift) = solution.shift else {
        return Ok(Value::Null);
    };
    let p = Polynomial::new(request.coefficients.clone())?;
    let reduction = reduce(&p, &request.config.tolerance);
    let sf = reduction
        .square_free()
        .expect("a shift implies a nonconstant square-free part");
    let sp = ShiftedProblem::new(sf, shift)?;
    let params = select_parameters(&sp);
    let report = verify_certificate(&sp, &params, DEFAULT_SAMPLES_PER_ARC)?;
    Ok(serde_json::to_value(report).expect("serializable"))
}

/// Executes a parsed request.
pub fn run(request: &RunRequest) -> RunOutcome {
    let mut messages = Vec::new();
    let p = match Polynomial::new(request.coefficients.clone()) {
        Ok(p) if p.degree() >= 1 => p,
        _ => {
            return RunOutcome {
                exit_code: EXIT_INPUT,
                output: String::new(),
                messages: vec!["polynomial must have degree at least 1".into()],
            }
        }
    };
    let solution = match solve_all(&p, &request.config) {
        Ok(s) => s,
        Err(e @ Error::InvalidConfig(_)) => {
            return RunOutcome {
                exit_code: EXIT_INPUT,
                output: String::new(),
                messages: vec![e.to_string()],
            }
        }
        Err(e) => {
            return RunOutcome {
                exit_code: EXIT_SOLVER,
                output: String::new(),
                messages: vec![format!("solver failed: {e}")],
            }
        }
    };
    let mut exit_code = EXIT_OK;
    if !solution.complete {
        exit_code = EXIT_SOLVER;
        messages.push("solver returned an incomplete root set (see diagnostics.per_root[].flags)".into());
    }
    if let Some(lead) = solution.normalized_from {
        messages.push(format!("normalized by leading coefficient {lead}"));
    }

    let output = match request.format {
        Format::Csv => {
            let mut out = String::new();
            for r in &solution.reports {
                let _ = writeln!(out, "{},{},{},{}", r.root.re, r.root.im, r.multiplicity, r.residual);
            }
            out
        }
        Format::Json => {
            let mut doc = json!({
                "degree": solution.degree,
                "shift_A": solution.shift,
                "roots": root_entries(&solution),
                "diagnostics": diagnostics(&solution, &request.config),
            });
            if request.certificate {
                match certificate_json(request, &solution) {
                    Ok(v) => doc["certificate"] = v,
                    Err(e) => {
                        exit_code = EXIT_SOLVER;
                        messages.push(format!("certificate failed: {e}"));
                    }
                }
            }
            if request.with_oracle {
                let dk = oracle_roots(&p);
                let m = match_root_sets(&solution.roots(), &dk.roots);
                doc["oracle_max_distance"] = json!(m.max_distance);
                doc["oracle_unmatched"] = json!(m.unmatched_a + m.unmatched_b);
                doc["oracle_converged"] = json!(dk.converged);
            }
            let mut s = serde_json::to_string_pretty(&doc).expect("serializable");
            s.push('\n');
            s
        }
    };
    RunOutcome {
        exit_code,
        output,
        messages,
    }
}

/// Parses the output JSON back into root entries.
pub fn parse_output_roots(text: &str) -> Result<Vec<RootEntry>, String> {
    #[derive(Deserialize)]
    struct Doc {
        roots: Vec<RootEntry>,
    }
    serde_json::from_str::<Doc>(text)
        .map(|d| d.roots)
        .map_err(|e| e.to_string())
}

/// Parses the process arguments and runs; returns the exit code.
pub fn main_from_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => main_with(cli),
        Err(e) => {
            let _ = e.print();
            if e.use_stderr() {
                EXIT_INPUT
            } else {
                EXIT_OK
            }
        }
    }
}

/// Runs a parsed command line; returns the process exit code.
pub fn main_with(cli: Cli) -> i32 {
    let Command::Solve(args) = cli.command;
    let request = match RunRequest::from_args(&args) {
        Ok(r) => r,
        Err(msg) => {
            eprintln!("error: {msg}");
            return EXIT_INPUT;
        }
    };
    let outcome = run(&request);
    for m in &outcome.messages {
        eprintln!("{m}");
    }
    if !outcome.output.is_empty() {
        match &args.output {
            Some(path) => {
                if let Err(e) = std::fs::write(path, &outcome.output) {
                    eprintln!("error: cannot write {}: {e}", path.display());
                    return EXIT_INPUT;
                }
            }
            None => print!("{}", outcome.output),
        }
    }
    outcome.exit_code
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn complex_tokens() {
        assert_eq!(parse_complex("1"), Ok(c(1.0, 0.0)));
        assert_eq!(parse_complex(" -2+3i "), Ok(c(-2.0, 3.0)));
        assert_eq!(parse_complex("0.5-0.25i"), Ok(c(0.5, -0.25)));
        assert_eq!(parse_complex("i"), Ok(c(0.0, 1.0)));
        assert_eq!(parse_complex("-i"), Ok(c(0.0, -1.0)));
        assert_eq!(parse_complex("4i"), Ok(c(0.0, 4.0)));
        assert_eq!(parse_complex("1e-3+2E+1i"), Ok(c(1e-3, 20.0)));
        assert_eq!(parse_complex("-1e-3-i"), Ok(c(-1e-3, -1.0)));
        assert!(parse_complex("abc").is_err());
        assert!(parse_complex("").is_err());
        assert!(parse_complex("inf").is_err());
    }

    #[test]
    fn coefficient_lists() {
        assert_eq!(
            parse_coefficients("1, 0, -2+3i").unwrap(),
            vec![c(1.0, 0.0), c(0.0, 0.0), c(-2.0, 3.0)]
        );
        assert_eq!(parse_coefficients("0, 2, 1").unwrap(), vec![c(2.0, 0.0), c(1.0, 0.0)]);
        assert!(parse_coefficients("5").is_err());
        assert!(parse_coefficients("0, 0").is_err());
        assert!(parse_coefficients("1,,2").is_err());
    }

    #[test]
    fn input_json() {
        let v = parse_input_json(r#"{"coefficients": [[1, 0], [0, 0], [-1, 0.5]]}"#).unwrap();
        assert_eq!(v, vec![c(1.0, 0.0), c(0.0, 0.0), c(-1.0, 0.5)]);
        assert!(parse_input_json(r#"{"coefficients": [[1, 0]]}"#).is_err());
        assert!(parse_input_json(r#"{"coeffs": []}"#).is_err());
        assert!(parse_input_json("not json").is_err());
    }

    fn request(coeffs: &str) -> RunRequest {
        RunRequest {
            coefficients: parse_coefficients(coeffs).unwrap(),
            config: SolverConfig::default(),
            with_oracle: false,
            certificate: false,
            format: Format::Json,
        }
    }

    #[test]
    fn json_output_schema() {
        let mut req = request("2, 0, 4, 0, 0");
        req.with_oracle = true;
        req.certificate = true;
        let out = run(&req);
        let doc: Value = serde_json::from_str(&out.output).unwrap();
        assert_eq!(doc["degree"], 4);
        assert!(doc["shift_A"].is_number());
        let roots = doc["roots"].as_array().unwrap();
        for key in ["re", "im", "multiplicity", "residual", "branch", "raw_re", "raw_im"] {
            assert!(roots[0].get(key).is_some(), "missing {key}");
        }
        assert!(doc["certificate"]["pass"].is_boolean());
        assert!(doc["oracle_max_distance"].is_number());
        assert!(doc["diagnostics"]["per_root"].is_array());
        assert!(out.messages.iter().any(|m| m.contains("normalized")));
    }

    #[test]
    fn csv_output_lines() {
        let mut req = request("1, 2, 0");
        req.format = Format::Csv;
        let out = run(&req);
        assert_eq!(out.exit_code, EXIT_OK);
        let lines: Vec<&str> = out.output.lines().collect();
        assert_eq!(lines.len(), 2);
        assert!(lines.iter().all(|l| l.split(',').count() == 4));
        assert!(lines.contains(&"0,0,1,0"));
    }

    #[test]
    fn bad_shift_is_an_input_error() {
        let mut req = request("1, 0, -1");
        req.config.shift = Some(1.0);
        assert_eq!(run(&req).exit_code, EXIT_INPUT);
    }
}
