//! Command-line driver.

mod verify;

pub use verify::{run_suite, Check, Suite};

use std::ffi::OsString;
use std::io::Write;

use clap::{Parser, Subcommand};
use rug::{Complex, Integer, Rational};
use serde_json::json;

use crate::cmfield::{
    class_field_report, embedding_from_coords, fixed_point_of, search_generators, CmError,
    JsonComplex, ReportConfig, Substitution,
};
use crate::exactfield::QuadRat;
use crate::hyperbolic::{builtin_matrix, BUILTIN_NAMES};
use crate::num::{digits_for, fmt_complex, parse_complex};
use crate::quaternion::order_basis;
use crate::theta::{lambda_eval, phi_values, LambdaValue, ThetaContext, ThetaError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DOMAIN: i32 = 2;
pub const EXIT_NOT_FOUND: i32 = 3;
pub const EXIT_VERIFY: i32 = 4;

/// Environment variable giving the default working precision.
pub const PREC_ENV: &str = "CMTRIANGLE_PREC";

#[derive(Debug, Parser)]
#[command(
    name = "cmtriangle",
    version,
    about = "CM values of the (3,3,5) triangle modular function"
)]
pub struct Cli {
    /// Working precision in bits (at least 64).
    #[arg(long, global = true, env = PREC_ENV, default_value_t = 256)]
    pub prec: u32,
    /// Coordinate bound for the generator search.
    #[arg(long, global = true, default_value_t = 8)]
    pub bound: i64,
    /// Continued-fraction cut threshold.
    #[arg(long, global = true, default_value = "1000000000000")]
    pub threshold: String,
    /// Largest admissible theta truncation radius.
    #[arg(long, global = true, default_value_t = 64)]
    pub max_radius: u32,
    /// Sum theta series on all cores.
    #[arg(long, global = true)]
    pub parallel: bool,
    /// Emit JSON.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// lambda(u) at a disc point.
    Lambda {
        /// Disc point as "re,im".
        #[arg(long, allow_hyphen_values = true)]
        u: String,
    },
    /// phi(u) at a disc point.
    Phi {
        #[arg(long, allow_hyphen_values = true)]
        u: String,
    },
    /// phi~(u) at a disc point.
    Phitilde {
        #[arg(long, allow_hyphen_values = true)]
        u: String,
    },
    /// Generators G of the order with G^2 + delta = 0.
    Search {
        /// Totally positive integer of Q(sqrt 5), e.g. "6-2*w".
        #[arg(long, allow_hyphen_values = true)]
        delta: String,
    },
    /// Fixed point in the disc of an order element given by 8 integers.
    Fixpoint {
        #[arg(long, allow_hyphen_values = true)]
        generator: String,
    },
    /// Class-field report for delta.
    Classfield {
        #[arg(long, allow_hyphen_values = true)]
        delta: String,
        /// Explicit generator as 8 integers; may be repeated.
        #[arg(long = "generators", allow_hyphen_values = true)]
        generators: Vec<String>,
        /// Expected degree of the class field over M.
        #[arg(long, default_value_t = 1)]
        degree: usize,
        /// Factor applied to phi~^2 before forming the minimal polynomial.
        #[arg(long, default_value = "1")]
        scale: String,
        /// "scale:C", "inverse:C" or "mobius:C,A,B" for the integral model.
        #[arg(long)]
        substitution: Option<String>,
    },
    /// Runs a verification suite.
    Verify {
        #[arg(long, value_enum, default_value_t = Suite::All)]
        suite: Suite,
    },
    /// Prints a named matrix.
    Matrix { name: String },
}

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn usage(m: impl Into<String>) -> Self {
        CliError {
            code: EXIT_USAGE,
            message: m.into(),
        }
    }
}

impl From<ThetaError> for CliError {
    fn from(e: ThetaError) -> Self {
        CliError {
            code: EXIT_DOMAIN,
            message: e.to_string(),
        }
    }
}

impl From<CmError> for CliError {
    fn from(e: CmError) -> Self {
        let code = match &e {
            CmError::NotTotallyPositive(_)
            | CmError::NotIntegral(_)
            | CmError::InvalidGenerator(_) => EXIT_DOMAIN,
            CmError::Theta(_) => EXIT_DOMAIN,
            CmError::NotFound(_)
            | CmError::NoInteriorRoot
            | CmError::NothingRecognized
            | CmError::RecognitionFailed(_)
            | CmError::InsufficientValues { .. }
            | CmError::NotClearable => EXIT_NOT_FOUND,
            _ => EXIT_DOMAIN,
        };
        CliError {
            code,
            message: e.to_string(),
        }
    }
}

/// Parses arguments and runs, writing to the given streams; returns the exit
/// code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    EXIT_OK
                }
                _ => EXIT_USAGE,
            };
            let _ = if code == EXIT_OK {
                write!(out, "{e}")
            } else {
                write!(err, "{e}")
            };
            return code;
        }
    };
    match execute(&cli, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {}", e.message);
            e.code
        }
    }
}

fn theta_ctx(cli: &Cli) -> ThetaContext {
    ThetaContext {
        prec: cli.prec,
        max_radius: cli.max_radius,
        radius_factor: 1.0,
        parallel: cli.parallel,
    }
}

fn parse_point(s: &str, prec: u32) -> Result<Complex, CliError> {
    parse_complex(s, prec)
        .ok_or_else(|| CliError::usage(format!("cannot parse point {s:?}; expected \"re,im\"")))
}

fn parse_delta(s: &str) -> Result<QuadRat, CliError> {
    s.parse::<QuadRat>()
        .map_err(|e| CliError::usage(format!("cannot parse delta {s:?}: {e}")))
}

fn parse_generator(s: &str) -> Result<[(i64, i64); 4], CliError> {
    let v: Vec<i64> = s
        .split(',')
        .map(|t| t.trim().parse::<i64>())
        .collect::<Result<_, _>>()
        .map_err(|_| {
            CliError::usage(format!(
                "generator {s:?} must be 8 comma-separated integers"
            ))
        })?;
    if v.len() != 8 {
        return Err(CliError::usage(format!(
            "generator {s:?} must be 8 comma-separated integers"
        )));
    }
    Ok([(v[0], v[1]), (v[2], v[3]), (v[4], v[5]), (v[6], v[7])])
}

/// `"scale:C"`, `"inverse:C"` or `"mobius:C,A,B"`.
pub fn parse_substitution(s: &str) -> Option<Substitution> {
    let (kind, rest) = s.split_once(':')?;
    let ints: Vec<Integer> = rest
        .split(',')
        .map(|t| t.trim().parse::<Integer>())
        .collect::<Result<_, _>>()
        .ok()?;
    match (kind.trim(), ints.as_slice()) {
        ("scale", [c]) => Some(Substitution::scale(c.clone())),
        ("inverse", [c]) => Some(Substitution::inverse(c.clone())),
        ("mobius", [c, a, b]) => Some(Substitution::mobius(c.clone(), a.clone(), b.clone())),
        _ => None,
    }
}

fn print_json(out: &mut dyn Write, v: &serde_json::Value) {
    let _ = writeln!(
        out,
        "{}",
        serde_json::to_string_pretty(v).expect("serializable")
    );
}

fn execute(cli: &Cli, out: &mut dyn Write) -> Result<i32, CliError> {
    if cli.prec < 64 {
        return Err(CliError::usage("--prec must be at least 64"));
    }
    let threshold: Integer = cli
        .threshold
        .parse()
        .map_err(|_| CliError::usage("--threshold must be an integer"))?;
    let prec = cli.prec;
    let digits = digits_for(prec);
    match &cli.command {
        Command::Lambda { u } => {
            let z = parse_point(u, prec)?;
            let ev = lambda_eval(&z, &theta_ctx(cli))?;
            if cli.json {
                let v = match &ev.value {
                    LambdaValue::Finite(l) => {
                        json!({ "u": JsonComplex::new(&z, prec), "lambda": JsonComplex::new(l, prec), "infinity": false })
                    }
                    LambdaValue::Infinity => {
                        json!({ "u": JsonComplex::new(&z, prec), "lambda": null, "infinity": true, "inverse": JsonComplex::new(&ev.recip, prec) })
                    }
                };
                print_json(out, &v);
            } else {
                match &ev.value {
                    LambdaValue::Finite(l) => {
                        writeln!(out, "lambda = {}", fmt_complex(l, digits)).ok()
                    }
                    LambdaValue::Infinity => writeln!(
                        out,
                        "lambda = Infinity (1/lambda = {})",
                        fmt_complex(&ev.recip, digits)
                    )
                    .ok(),
                };
            }
        }
        Command::Phi { u } | Command::Phitilde { u } => {
            let z = parse_point(u, prec)?;
            let v = phi_values(&z, &theta_ctx(cli))?;
            let (label, val) = match &cli.command {
                Command::Phi { .. } => ("phi", &v.phi),
                _ => ("phi_tilde", &v.phi_tilde),
            };
            let sq = Complex::with_val(prec, val.square_ref());
            if cli.json {
                print_json(
                    out,
                    &json!({ "u": JsonComplex::new(&z, prec), label: JsonComplex::new(val, prec), format!("{label}_sq"): JsonComplex::new(&sq, prec) }),
                );
            } else {
                writeln!(out, "{label} = {}", fmt_complex(val, digits)).ok();
                writeln!(out, "{label}^2 = {}", fmt_complex(&sq, digits)).ok();
            }
        }
        Command::Search { delta } => {
            let d = parse_delta(delta)?;
            let order = order_basis().map_err(CmError::from)?;
            let found = search_generators(&order, &d, cli.bound)?;
            if found.is_empty() {
                return Err(CliError {
                    code: EXIT_NOT_FOUND,
                    message: format!("no generator within bound {}", cli.bound),
                });
            }
            if cli.json {
                let list: Vec<_> = found
                    .iter()
                    .map(|e| json!({ "coords": e.flat(), "optimal": e.optimal, "element": e.element.to_string() }))
                    .collect();
                print_json(
                    out,
                    &json!({ "delta": d.to_string(), "bound": cli.bound, "generators": list }),
                );
            } else {
                for e in &found {
                    let c: Vec<String> = e.flat().iter().map(|x| x.to_string()).collect();
                    writeln!(
                        out,
                        "{}{}",
                        c.join(","),
                        if e.optimal { "" } else { "  (not optimal)" }
                    )
                    .ok();
                }
            }
        }
        Command::Fixpoint { generator } => {
            let c = parse_generator(generator)?;
            let order = order_basis().map_err(CmError::from)?;
            let elem = order.element_from_ints(c);
            let alg = &order.algebra;
            let (t, n) = (alg.trd(&elem), alg.nrd(&elem));
            let delta = if t.is_zero() {
                n.clone()
            } else {
                QuadRat::from_int(0)
            };
            if !t.is_zero() || !n.is_totally_positive() {
                return Err(CliError {
                    code: EXIT_DOMAIN,
                    message: format!("generator must have trace 0 and totally positive norm (trace {t}, norm {n})"),
                });
            }
            let emb = embedding_from_coords(&order, &delta, c)?;
            let u = fixed_point_of(&order, &emb, prec)?;
            if cli.json {
                print_json(
                    out,
                    &json!({ "trace": t.to_string(), "norm": n.to_string(), "fixed_point": JsonComplex::new(&u.z, prec) }),
                );
            } else {
                writeln!(out, "Trd = {t}, Nrd = {n}").ok();
                writeln!(out, "u0 = {}", fmt_complex(&u.z, digits)).ok();
            }
        }
        Command::Classfield {
            delta,
            generators,
            degree,
            scale,
            substitution,
        } => {
            let d = parse_delta(delta)?;
            let scale: Rational = scale
                .parse()
                .map_err(|_| CliError::usage("--scale must be a rational number"))?;
            let substitution = match substitution {
                Some(s) => Some(
                    parse_substitution(s)
                        .ok_or_else(|| CliError::usage(format!("bad substitution {s:?}")))?,
                ),
                None => None,
            };
            let cfg = ReportConfig {
                prec,
                bound: cli.bound,
                threshold,
                degree: (*degree).max(1),
                scale,
                substitution,
                generators: generators
                    .iter()
                    .map(|g| parse_generator(g))
                    .collect::<Result<_, _>>()?,
                max_radius: cli.max_radius,
                parallel: cli.parallel,
            };
            let report = class_field_report(&d, &cfg)?;
            if cli.json {
                writeln!(out, "{}", report.to_json()).ok();
            } else {
                writeln!(out, "delta = {}", report.delta).ok();
                writeln!(out, "generators found: {}", report.generators_found).ok();
                for e in &report.embeddings {
                    writeln!(
                        out,
                        "G = [{}]  u0 = {},{}",
                        e.coords.join(", "),
                        e.fixed_point.re,
                        e.fixed_point.im
                    )
                    .ok();
                    writeln!(
                        out,
                        "  phi~^2 = {},{}",
                        e.phi_tilde_sq.re, e.phi_tilde_sq.im
                    )
                    .ok();
                }
                if let Some(r) = &report.phi_tilde_sq {
                    writeln!(out, "phi~^2 = {}/{}", r.num, r.den).ok();
                }
                if let Some(r) = &report.phi_sq {
                    writeln!(out, "phi^2 = {}/{}", r.num, r.den).ok();
                }
                if let Some(f) = &report.factorization {
                    writeln!(out, "factorization: {f}").ok();
                }
                if let Some(m) = report.m {
                    writeln!(out, "m = {m}").ok();
                }
                if let Some(mp) = &report.min_poly {
                    let c: Vec<String> = mp
                        .rational
                        .iter()
                        .map(|r| format!("{}/{}", r.num, r.den))
                        .collect();
                    writeln!(out, "min poly (constant first): [{}]", c.join(", ")).ok();
                }
                if let Some(im) = &report.integral_model {
                    writeln!(
                        out,
                        "integral model ({}): [{}]",
                        im.substitution,
                        im.coefficients.join(", ")
                    )
                    .ok();
                    writeln!(
                        out,
                        "discriminant = {} = {}",
                        im.discriminant, im.discriminant_factored
                    )
                    .ok();
                }
                writeln!(out, "{}", report.class_field).ok();
            }
        }
        Command::Verify { suite } => {
            let checks = run_suite(*suite, prec, &threshold);
            let failed = checks.iter().filter(|c| !c.pass).count();
            if cli.json {
                let list: Vec<_> = checks
                    .iter()
                    .map(|c| json!({ "suite": c.suite, "name": c.name, "pass": c.pass, "detail": c.detail }))
                    .collect();
                print_json(out, &json!({ "checks": list, "failed": failed }));
            } else {
                for c in &checks {
                    writeln!(
                        out,
                        "{} {}/{}: {}",
                        if c.pass { "PASS" } else { "FAIL" },
                        c.suite,
                        c.name,
                        c.detail
                    )
                    .ok();
                }
                writeln!(out, "{} checks, {} failed", checks.len(), failed).ok();
            }
            if failed > 0 {
                return Ok(EXIT_VERIFY);
            }
        }
        Command::Matrix { name } => {
            let m = builtin_matrix(name, prec).map_err(|e| {
                CliError::usage(format!("{e}; known names: {}", BUILTIN_NAMES.join(", ")))
            })?;
            if cli.json {
                let e: Vec<_> = m
                    .entries()
                    .iter()
                    .map(|z| JsonComplex::new(z, prec))
                    .collect();
                print_json(out, &json!({ "name": name, "entries": e }));
            } else {
                for (label, z) in ["a", "b", "c", "d"].iter().zip(m.entries()) {
                    writeln!(out, "{label} = {}", fmt_complex(z, digits)).ok();
                }
            }
        }
    }
    Ok(EXIT_OK)
}
