//! Command dispatch and exit-code policy.
//!
//! Exit codes: `0` verified/success, `1` mathematical negative (not Poisson,
//! counterexample candidate), `2` usage or parse error, `3` precondition
//! error (resonance, inadmissible eigenvalues, violated hypotheses). A
//! mathematical negative is a first-class result and is still reported as a
//! full JSON document.

use std::collections::BTreeMap;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use clap::{Parser, Subcommand, ValueEnum};

use schouten_core::deformation::{verify_pullback_deformations, DeformationSpaces};
use schouten_core::multivector::MultiVector;
use schouten_core::poincare::{
    ad_diagonal_kernel, decompose_bivector, linearize_formal, nonresonant_up_to_order, EigenData,
    DEFAULT_TRUNCATION_DEGREE,
};
use schouten_core::projective::{pullback_bivector, random_quadratic_field, GlobalSection};
use schouten_core::scalar::Scalar;
use schouten_core::Error as CoreError;

use crate::expr::{format_expression, parse_expression, Mode, ParseError};
use crate::report::{verification_report, CertificateJson, Report};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_PRECONDITION: i32 = 3;

/// Environment variable overriding the default truncation degree.
pub const TRUNCATION_ENV: &str = "SCHOUTEN_TRUNC_DEGREE";

#[derive(Clone, Copy, PartialEq, Eq, Debug, ValueEnum)]
pub enum ModeArg {
    Affine,
    Homogeneous,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Affine => Mode::Affine,
            ModeArg::Homogeneous => Mode::Homogeneous,
        }
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "schouten",
    version,
    about = "Exact Schouten-bracket calculus and first-order deformation checks for projective Poisson structures"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Write the JSON report to this path instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<std::path::PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Compute the integrability residual [Pi, Pi] of a bivector expression.
    CheckPoisson {
        expr: String,
        /// Ambient variable count.
        #[arg(long)]
        vars: usize,
        #[arg(long, value_enum, default_value_t = ModeArg::Affine)]
        mode: ModeArg,
    },
    /// Generic rank of a bivector expression.
    Rank {
        expr: String,
        #[arg(long)]
        vars: usize,
        #[arg(long, value_enum, default_value_t = ModeArg::Affine)]
        mode: ModeArg,
    },
    /// Schouten bracket of two expressions.
    Schouten {
        a: String,
        b: String,
        #[arg(long)]
        vars: usize,
        #[arg(long, value_enum, default_value_t = ModeArg::Affine)]
        mode: ModeArg,
    },
    /// Tangent space of the Poisson locus at a global bivector.
    TangentPois {
        #[command(flatten)]
        instance: InstanceArgs,
    },
    /// Tangent space of the foliation locus at a global bivector.
    TangentFol {
        #[command(flatten)]
        instance: InstanceArgs,
    },
    /// Verify first-order deformation coincidence for seeded pull-back
    /// instances; multiple seeds run in parallel and report in seed order.
    VerifyPullback {
        #[arg(long)]
        n: usize,
        /// Seed for the deterministic sampler; repeatable.
        #[arg(long = "seed", required = true)]
        seeds: Vec<u64>,
        /// Comma-separated eigenvalues, length n-1 (e.g. "2,5,11" or "1+i,2-i").
        #[arg(long)]
        lambda: String,
        /// Bounded non-resonance order for admissibility.
        #[arg(long, default_value_t = 4)]
        order: u32,
    },
    /// Kernel of the diagonal adjoint operator on a truncated grade.
    DeltaKernel {
        #[arg(long)]
        lambda: String,
        #[arg(long)]
        grade: usize,
        /// Truncation degree (default: SCHOUTEN_TRUNC_DEGREE or 4).
        #[arg(long)]
        deg: Option<u32>,
    },
    /// Formal linearization of an affine vector field singular at the origin.
    Linearize {
        expr: String,
        #[arg(long)]
        vars: usize,
        #[arg(long, default_value_t = 4)]
        order: u32,
    },
    /// Constructive decomposition of a bivector against the diagonal field.
    DecomposeAlpha0 {
        expr: String,
        #[arg(long)]
        lambda: String,
        /// Truncation degree (default: SCHOUTEN_TRUNC_DEGREE or 4).
        #[arg(long)]
        deg: Option<u32>,
    },
}

#[derive(clap::Args, Debug)]
pub struct InstanceArgs {
    /// Projective ambient dimension.
    #[arg(long)]
    pub n: usize,
    /// Global bivector expression in homogeneous mode (n+1 variables).
    #[arg(long, conflicts_with_all = ["seed", "lambda"])]
    pub pi: Option<String>,
    /// Sampler seed for a pull-back instance.
    #[arg(long, requires = "lambda")]
    pub seed: Option<u64>,
    /// Comma-separated eigenvalues of length n-1.
    #[arg(long)]
    pub lambda: Option<String>,
    #[arg(long, default_value_t = 4)]
    pub order: u32,
}

/// Failure carrying the exit code and a JSON error record.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub record: serde_json::Value,
}

impl Failure {
    fn new(command: &str, code: i32, message: String) -> Self {
        Failure {
            code,
            record: serde_json::json!({
                "command": command,
                "version": env!("CARGO_PKG_VERSION"),
                "error": message,
                "exit_code": code,
            }),
        }
    }

    fn with_certificate(mut self, cert: CertificateJson) -> Self {
        self.record["certificates"] = serde_json::json!([cert]);
        self
    }
}

fn exit_code_for(e: &CoreError) -> i32 {
    match e {
        CoreError::NonPoisson { .. } => EXIT_NEGATIVE,
        CoreError::Resonance(_)
        | CoreError::Hypothesis(_)
        | CoreError::NotInImage { .. }
        | CoreError::DivisionFailed(_)
        | CoreError::DegenerateInput(_)
        | CoreError::MalformedSection(_)
        | CoreError::Structural(_) => EXIT_PRECONDITION,
        CoreError::VarMismatch { .. }
        | CoreError::GradeMismatch { .. }
        | CoreError::Capability(_)
        | CoreError::ScalarParse(_) => EXIT_USAGE,
    }
}

fn core_failure(command: &str, e: CoreError) -> Failure {
    let f = Failure::new(command, exit_code_for(&e), e.to_string());
    if let CoreError::Resonance(cert) = &e {
        f.with_certificate(CertificateJson::from_resonance(cert))
    } else {
        f
    }
}

fn parse_failure(command: &str, e: ParseError) -> Failure {
    Failure::new(command, EXIT_USAGE, e.to_string())
}

fn parse_lambda(command: &str, text: &str) -> Result<EigenData, Failure> {
    let values: Result<Vec<Scalar>, _> = text.split(',').map(|s| s.trim().parse()).collect();
    let values = values.map_err(|e: CoreError| {
        Failure::new(command, EXIT_USAGE, format!("--lambda: {e}"))
    })?;
    EigenData::new(values).map_err(|e| core_failure(command, e))
}

fn truncation_default(deg: Option<u32>) -> u32 {
    deg.or_else(|| {
        std::env::var(TRUNCATION_ENV)
            .ok()
            .and_then(|v| v.parse().ok())
    })
    .unwrap_or(DEFAULT_TRUNCATION_DEGREE)
}

fn now_epoch_secs() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

fn finalize(mut report: Report, started: Instant) -> Report {
    report.timing_ms = started.elapsed().as_millis() as u64;
    report.timestamp = now_epoch_secs();
    report
}

fn parse_bivector(
    command: &str,
    expr: &str,
    mode: Mode,
    vars: usize,
) -> Result<MultiVector, Failure> {
    let mv = parse_expression(expr, mode, vars).map_err(|e| parse_failure(command, e))?;
    if !mv.is_zero() && mv.grade() != 2 {
        return Err(Failure::new(
            command,
            EXIT_USAGE,
            format!("expected a bivector (grade 2), got grade {}", mv.grade()),
        ));
    }
    Ok(mv)
}

fn resolve_instance(command: &str, args: &InstanceArgs) -> Result<GlobalSection, Failure> {
    if args.n < 3 {
        return Err(Failure::new(
            command,
            EXIT_USAGE,
            format!("--n must be at least 3, got {}", args.n),
        ));
    }
    if let Some(expr) = &args.pi {
        let mv = parse_bivector(command, expr, Mode::Homogeneous, args.n + 1)?;
        let space = schouten_core::projective::SectionSpace::new(args.n, 2, 0)
            .map_err(|e| core_failure(command, e))?;
        return space.reduce(&mv).map_err(|e| core_failure(command, e));
    }
    let (Some(seed), Some(lambda_text)) = (args.seed, &args.lambda) else {
        return Err(Failure::new(
            command,
            EXIT_USAGE,
            "provide either --pi EXPR or --seed S --lambda L".to_string(),
        ));
    };
    let lambda = parse_lambda(command, lambda_text)?;
    if lambda.len() != args.n - 1 {
        return Err(Failure::new(
            command,
            EXIT_PRECONDITION,
            format!(
                "--lambda has {} entries, expected n - 1 = {}",
                lambda.len(),
                args.n - 1
            ),
        ));
    }
    let cert = nonresonant_up_to_order(&lambda, args.order);
    if !cert.is_nonresonant() {
        return Err(core_failure(command, CoreError::Resonance(cert)));
    }
    let y = random_quadratic_field(args.n - 1, seed, Some(&lambda))
        .map_err(|e| core_failure(command, e))?;
    pullback_bivector(&y).map_err(|e| core_failure(command, e))
}

fn tangent_command(
    command: &str,
    args: &InstanceArgs,
    foliation: bool,
) -> Result<(i32, Report), Failure> {
    let started = Instant::now();
    let pi = resolve_instance(command, args)?;
    let spaces = DeformationSpaces::new(args.n).map_err(|e| core_failure(command, e))?;
    let tangent = if foliation {
        spaces.tangent_foliation(&pi)
    } else {
        spaces.tangent_poisson(&pi)
    }
    .map_err(|e| core_failure(command, e))?;
    let mut report = Report::new(command);
    report.config_num("n", args.n as u64);
    report.config_str("mode", "homogeneous");
    if let Some(seed) = args.seed {
        report.seed = Some(seed);
        report.config_num("order_bound", u64::from(args.order));
    }
    if let Some(lambda) = &args.lambda {
        report.config_str("lambda", lambda.clone());
    }
    if let Some(expr) = &args.pi {
        report.config_str("pi", expr.clone());
    }
    let key = if foliation { "tangent_fol" } else { "tangent_pois" };
    report.dimensions.insert(key.to_string(), tangent.dim);
    report.bases.insert(
        key.to_string(),
        tangent
            .basis
            .iter()
            .map(|s| format_expression(s.rep(), Mode::Homogeneous))
            .collect(),
    );
    report.verdict = "computed".to_string();
    report.result = serde_json::json!({
        "pi": format_expression(pi.rep(), Mode::Homogeneous),
        "dimension": tangent.dim,
    });
    Ok((EXIT_OK, finalize(report, started)))
}

/// Run one command, producing the exit code and the JSON document to emit.
pub fn execute(cli: &Cli) -> (i32, serde_json::Value) {
    match dispatch(cli) {
        Ok((code, value)) => (code, value),
        Err(f) => (f.code, f.record),
    }
}

fn dispatch(cli: &Cli) -> Result<(i32, serde_json::Value), Failure> {
    match &cli.command {
        Command::CheckPoisson { expr, vars, mode } => {
            let started = Instant::now();
            let command = "check-poisson";
            let pi = parse_bivector(command, expr, (*mode).into(), *vars)?;
            let residual = pi
                .integrability_residual()
                .map_err(|e| core_failure(command, e))?;
            let poisson = residual.is_zero();
            let mut report = Report::new(command);
            report.config_str("expr", expr.clone());
            report.config_num("vars", *vars as u64);
            report.config_str("mode", format!("{:?}", mode).to_lowercase());
            report.verdict = if poisson { "poisson" } else { "not-poisson" }.to_string();
            report.result = serde_json::json!({
                "residual": format_expression(&residual, (*mode).into()),
            });
            let code = if poisson { EXIT_OK } else { EXIT_NEGATIVE };
            Ok((code, to_value(finalize(report, started))))
        }
        Command::Rank { expr, vars, mode } => {
            let started = Instant::now();
            let command = "rank";
            let pi = parse_bivector(command, expr, (*mode).into(), *vars)?;
            let rank = pi.generic_rank().map_err(|e| core_failure(command, e))?;
            let mut report = Report::new(command);
            report.config_str("expr", expr.clone());
            report.config_num("vars", *vars as u64);
            report.config_str("mode", format!("{:?}", mode).to_lowercase());
            report.verdict = "computed".to_string();
            report.result = serde_json::json!({ "rank": rank });
            Ok((EXIT_OK, to_value(finalize(report, started))))
        }
        Command::Schouten { a, b, vars, mode } => {
            let started = Instant::now();
            let command = "schouten";
            let m: Mode = (*mode).into();
            let lhs = parse_expression(a, m, *vars).map_err(|e| parse_failure(command, e))?;
            let rhs = parse_expression(b, m, *vars).map_err(|e| parse_failure(command, e))?;
            let bracket = lhs.schouten(&rhs).map_err(|e| core_failure(command, e))?;
            let mut report = Report::new(command);
            report.config_str("a", a.clone());
            report.config_str("b", b.clone());
            report.config_num("vars", *vars as u64);
            report.config_str("mode", format!("{:?}", mode).to_lowercase());
            report.verdict = "computed".to_string();
            report.result = serde_json::json!({
                "bracket": format_expression(&bracket, m),
                "grade": bracket.grade(),
            });
            Ok((EXIT_OK, to_value(finalize(report, started))))
        }
        Command::TangentPois { instance } => {
            let (code, report) = tangent_command("tangent-pois", instance, false)?;
            Ok((code, to_value(report)))
        }
        Command::TangentFol { instance } => {
            let (code, report) = tangent_command("tangent-fol", instance, true)?;
            Ok((code, to_value(report)))
        }
        Command::VerifyPullback {
            n,
            seeds,
            lambda,
            order,
        } => {
            let command = "verify-pullback";
            let lambda = parse_lambda(command, lambda)?;
            let mut seeds = seeds.clone();
            seeds.sort_unstable();
            seeds.dedup();
            // run seeds in parallel; results keep seed order
            let mut results: Vec<Option<Result<Report, Failure>>> =
                (0..seeds.len()).map(|_| None).collect();
            std::thread::scope(|scope| {
                let mut handles = Vec::new();
                for &seed in &seeds {
                    let lambda = &lambda;
                    handles.push(scope.spawn(move || {
                        let started = Instant::now();
                        verify_pullback_deformations(*n, seed, lambda, *order)
                            .map(|run| finalize(verification_report(command, &run), started))
                            .map_err(|e| core_failure(command, e))
                    }));
                }
                for (slot, handle) in results.iter_mut().zip(handles) {
                    *slot = Some(handle.join().expect("verification thread"));
                }
            });
            let mut reports = Vec::with_capacity(results.len());
            for r in results.into_iter().flatten() {
                reports.push(r?);
            }
            let all_verified = reports
                .iter()
                .all(|r| r.verdict == "first-order-theorem-verified");
            let code = if all_verified { EXIT_OK } else { EXIT_NEGATIVE };
            let value = if reports.len() == 1 {
                to_value(reports.into_iter().next().unwrap())
            } else {
                serde_json::Value::Array(reports.into_iter().map(to_value).collect())
            };
            Ok((code, value))
        }
        Command::DeltaKernel { lambda, grade, deg } => {
            let started = Instant::now();
            let command = "delta-kernel";
            let lambda = parse_lambda(command, lambda)?;
            let deg = truncation_default(*deg);
            let kernel = ad_diagonal_kernel(&lambda, *grade, deg)
                .map_err(|e| core_failure(command, e))?;
            let mut report = Report::new(command);
            report.config_str("lambda", lambda.to_string());
            report.config_num("grade", *grade as u64);
            report.config_num("deg", u64::from(deg));
            report
                .certificates
                .push(CertificateJson::from_resonance(&nonresonant_up_to_order(
                    &lambda,
                    deg + 2,
                )));
            report.verdict = "computed".to_string();
            report
                .dimensions
                .insert("kernel".to_string(), kernel.len());
            report.bases.insert(
                "kernel".to_string(),
                kernel
                    .iter()
                    .map(|k| format_expression(k, Mode::Affine))
                    .collect(),
            );
            report.result = serde_json::json!({ "count": kernel.len() });
            Ok((EXIT_OK, to_value(finalize(report, started))))
        }
        Command::Linearize { expr, vars, order } => {
            let started = Instant::now();
            let command = "linearize";
            let field = parse_expression(expr, Mode::Affine, *vars)
                .map_err(|e| parse_failure(command, e))?;
            let lin = linearize_formal(&field, *order).map_err(|e| core_failure(command, e))?;
            let mut report = Report::new(command);
            report.config_str("expr", expr.clone());
            report.config_num("vars", *vars as u64);
            report.config_num("order", u64::from(*order));
            report.verdict = if lin.residual.is_zero() {
                "linearized"
            } else {
                "residual-nonzero"
            }
            .to_string();
            report.result = serde_json::json!({
                "eigenvalues": lin.eigenvalues.to_string(),
                "change": lin
                    .change
                    .images()
                    .iter()
                    .map(|p| format_expression(&MultiVector::from_polynomial(p), Mode::Affine))
                    .collect::<Vec<_>>(),
                "transformed": format_expression(&lin.transformed, Mode::Affine),
                "residual": format_expression(&lin.residual, Mode::Affine),
            });
            Ok((EXIT_OK, to_value(finalize(report, started))))
        }
        Command::DecomposeAlpha0 { expr, lambda, deg } => {
            let started = Instant::now();
            let command = "decompose-alpha0";
            let lambda = parse_lambda(command, lambda)?;
            let alpha0 = parse_bivector(command, expr, Mode::Affine, lambda.len())?;
            let deg = truncation_default(*deg);
            let dec = decompose_bivector(&lambda, &alpha0, deg)
                .map_err(|e| core_failure(command, e))?;
            let mut report = Report::new(command);
            report.config_str("expr", expr.clone());
            report.config_str("lambda", lambda.to_string());
            report.config_num("deg", u64::from(deg));
            report.verdict = if dec.residual.is_zero() {
                "decomposed"
            } else {
                "residual-nonzero"
            }
            .to_string();
            let diagonal: BTreeMap<String, String> = dec
                .diagonal
                .iter()
                .map(|((i, j), c)| (format!("a_{}_{}", i + 1, j + 1), c.to_string()))
                .collect();
            report.result = serde_json::json!({
                "vector_part": format_expression(&dec.vector_part, Mode::Affine),
                "diagonal": diagonal,
                "residual": format_expression(&dec.residual, Mode::Affine),
            });
            let code = if dec.residual.is_zero() {
                EXIT_OK
            } else {
                EXIT_NEGATIVE
            };
            Ok((code, to_value(finalize(report, started))))
        }
    }
}

fn to_value(report: Report) -> serde_json::Value {
    serde_json::to_value(&report).expect("report serializes")
}
