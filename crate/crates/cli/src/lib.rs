//! Command-line front end: tradeoff curves and points, oracle verification
//! and Monte Carlo runs, emitted as CSV or JSON.
//!
//! Every JSON document starts with `version`, `rng_algorithm` and `command`,
//! followed by the command body in declaration order of the structs below.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};
use std::fmt;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use helstrom::oracle::{self, OracleConfig, VerificationReport};
use helstrom::qubit::{eigh, symmetric_pair, ComplexMatrix};
use helstrom::simulate::{self, SimulationConfig, SimulationResult, RNG_ALGORITHM};
use helstrom::tradeoff::{
    alpha_from_fidelity_squared, helstrom_probability, normalized, optimal_instrument,
    optimal_tilt, t_for_probability, tradeoff_identity_residual, tradeoff_point, TradeoffPoint,
};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub const CSV_HEADER: &str = "alpha,t,P,D,beta_t,info,dist,identity_residual";

#[derive(Debug, Parser)]
#[command(
    name = "helstrom",
    version,
    about = "Optimal information-disturbance tradeoff for two pure qubit states"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Tradeoff curve sampled uniformly in t (or in P with --by-probability).
    Curve(CurveArgs),
    /// Single point with its Kraus operators and POVM.
    Point(PointArgs),
    /// Compare the closed form against the numerical oracle.
    Verify(VerifyArgs),
    /// Monte Carlo run of the optimal instrument.
    Simulate(SimulateArgs),
}

#[derive(Debug, Clone, Args)]
pub struct AngleArgs {
    /// Half the angle between the two states, in radians.
    #[arg(
        long,
        allow_negative_numbers = true,
        conflicts_with = "fsq",
        required_unless_present = "fsq"
    )]
    pub alpha: Option<f64>,
    /// Squared overlap |⟨ψ₁|ψ₂⟩|², in [0, 1].
    #[arg(long)]
    pub fsq: Option<f64>,
    /// Read --alpha in degrees.
    #[arg(long, requires = "alpha")]
    pub degrees: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Args)]
pub struct CurveArgs {
    #[command(flatten)]
    pub angle: AngleArgs,
    #[arg(long, default_value_t = 101, value_parser = clap::value_parser!(u32).range(2..))]
    pub points: u32,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Sample uniformly in P between ½ and cos²α instead of uniformly in t.
    #[arg(long)]
    pub by_probability: bool,
    #[arg(long)]
    pub out: Option<std::path::PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct PointArgs {
    #[command(flatten)]
    pub angle: AngleArgs,
    #[arg(long)]
    pub t: f64,
    #[arg(long)]
    pub out: Option<std::path::PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub angle: AngleArgs,
    /// Comma-separated t grid.
    #[arg(long, value_delimiter = ',', default_value = "0,0.25,0.5,0.75,1")]
    pub t: Vec<f64>,
    #[arg(long, default_value_t = 1e-4)]
    pub tol: f64,
    #[arg(long, default_value_t = OracleConfig::default().restarts)]
    pub restarts: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<std::path::PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub angle: AngleArgs,
    #[arg(long)]
    pub t: f64,
    #[arg(long, default_value_t = 1_000_000, value_parser = clap::value_parser!(u64).range(1..))]
    pub shots: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<std::path::PathBuf>,
}

impl Command {
    pub fn out(&self) -> Option<&std::path::Path> {
        match self {
            Command::Curve(a) => a.out.as_deref(),
            Command::Point(a) => a.out.as_deref(),
            Command::Verify(a) => a.out.as_deref(),
            Command::Simulate(a) => a.out.as_deref(),
        }
    }
}

/// Bad input; maps to exit status 2.
#[derive(Debug, Clone, PartialEq)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

impl From<helstrom::Error> for UsageError {
    fn from(e: helstrom::Error) -> Self {
        UsageError(e.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Success,
    VerificationFailed,
}

impl Status {
    pub fn code(self) -> i32 {
        match self {
            Status::Success => 0,
            Status::VerificationFailed => 1,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Outcome {
    pub output: String,
    pub warnings: Vec<String>,
    pub status: Status,
}

/// Resolves the angle flags to α ∈ [0, π/4], warning when the input had to
/// be folded into that range.
pub fn resolve_alpha(a: &AngleArgs, warnings: &mut Vec<String>) -> Result<f64, UsageError> {
    match (a.alpha, a.fsq) {
        (Some(raw), None) => {
            if !raw.is_finite() {
                return Err(UsageError(format!("alpha must be finite, got {raw}")));
            }
            let rad = if a.degrees { raw.to_radians() } else { raw };
            let folded = fold_alpha(rad);
            if (folded - rad).abs() > 1e-15 {
                warnings.push(format!(
                    "alpha = {rad} rad folded into [0, pi/4] as {folded} (same pair up to relabeling)"
                ));
            }
            Ok(folded)
        }
        (None, Some(fsq)) => Ok(alpha_from_fidelity_squared(fsq)?),
        _ => Err(UsageError(
            "exactly one of --alpha and --fsq is required".into(),
        )),
    }
}

/// α and π/2 − α (and shifts by π/2) describe the same pair up to relabeling.
pub fn fold_alpha(alpha: f64) -> f64 {
    let a = alpha.rem_euclid(FRAC_PI_2);
    let a = if a > FRAC_PI_4 { FRAC_PI_2 - a } else { a };
    a.clamp(0.0, FRAC_PI_4)
}

/// Ten significant digits, plain decimal notation for moderate magnitudes.
pub fn format_sig10(x: f64) -> String {
    let x = if x == 0.0 { 0.0 } else { x };
    let sci = format!("{x:.9e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-5..=15).contains(&exp) {
        return sci;
    }
    let (sign, mantissa) = match mantissa.strip_prefix('-') {
        Some(m) => ("-", m),
        None => ("", mantissa),
    };
    let digits: String = mantissa.chars().filter(|c| *c != '.').collect();
    let body = if exp < 0 {
        format!("0.{}{}", "0".repeat((-exp - 1) as usize), digits)
    } else {
        let split = exp as usize + 1;
        if split >= digits.len() {
            format!("{}{}", digits, "0".repeat(split - digits.len()))
        } else {
            format!("{}.{}", &digits[..split], &digits[split..])
        }
    };
    format!("{sign}{body}")
}

#[derive(Debug, Serialize)]
struct Envelope<'a, T: Serialize> {
    version: &'a str,
    rng_algorithm: &'a str,
    command: &'a str,
    #[serde(flatten)]
    body: T,
}

fn to_json<T: Serialize>(command: &str, body: T) -> String {
    let env = Envelope {
        version: VERSION,
        rng_algorithm: RNG_ALGORITHM,
        command,
        body,
    };
    let mut s = serde_json::to_string_pretty(&env).expect("serializable");
    s.push('\n');
    s
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurveRow {
    pub alpha: f64,
    pub t: f64,
    #[serde(rename = "P")]
    pub p: f64,
    #[serde(rename = "D")]
    pub d: f64,
    pub beta_t: f64,
    pub info: Option<f64>,
    pub dist: Option<f64>,
    pub identity_residual: Option<f64>,
}

/// Rows of the optimal curve; normalized columns are `None` where the
/// normalization is undefined (α = 0 or π/4).
pub fn curve_rows(
    alpha: f64,
    points: u32,
    by_probability: bool,
    warnings: &mut Vec<String>,
) -> Result<Vec<CurveRow>, UsageError> {
    if points < 2 {
        return Err(UsageError("--points must be at least 2".into()));
    }
    let p_opt = helstrom_probability(alpha)?;
    let n = points - 1;
    let mut degenerate = false;
    let mut rows = Vec::with_capacity(points as usize);
    for k in 0..points {
        let s = f64::from(k) / f64::from(n);
        let t = if by_probability {
            t_for_probability(alpha, 0.5 + s * (p_opt - 0.5))
                .map_err(|e| UsageError(format!("--by-probability: {e}")))?
        } else {
            s
        };
        let pt = tradeoff_point(alpha, t)?;
        let (info, dist, identity_residual) = match normalized(alpha, pt.p, pt.d) {
            Ok(np) => {
                let r = tradeoff_identity_residual(alpha, np.info, np.dist)?;
                (Some(np.info), Some(np.dist), Some(r))
            }
            Err(_) => {
                degenerate = true;
                (None, None, None)
            }
        };
        rows.push(CurveRow {
            alpha: pt.alpha,
            t: pt.t,
            p: pt.p,
            d: pt.d,
            beta_t: pt.beta_t,
            info,
            dist,
            identity_residual,
        });
    }
    if degenerate {
        warnings.push(format!(
            "alpha = {alpha}: normalized info/dist undefined, columns left blank"
        ));
    }
    Ok(rows)
}

pub fn rows_to_csv(rows: &[CurveRow]) -> String {
    let opt = |v: Option<f64>| v.map(format_sig10).unwrap_or_default();
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        let fields = [
            format_sig10(r.alpha),
            format_sig10(r.t),
            format_sig10(r.p),
            format_sig10(r.d),
            format_sig10(r.beta_t),
            opt(r.info),
            opt(r.dist),
            opt(r.identity_residual),
        ];
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    out
}

#[derive(Debug, Serialize)]
struct CurveBody {
    alpha: f64,
    by_probability: bool,
    rows: Vec<CurveRow>,
}

#[derive(Debug, Clone, Serialize)]
pub struct KrausReport {
    pub matrix: ComplexMatrix,
    pub rank: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct PointBody {
    pub point: TradeoffPoint,
    /// Feedback angle of the full-strength instrument.
    pub helstrom_tilt: f64,
    pub tilt_degenerate: bool,
    pub info: Option<f64>,
    pub dist: Option<f64>,
    pub kraus: Vec<KrausReport>,
    pub povm: Vec<ComplexMatrix>,
}

fn rank(e: &ComplexMatrix) -> Result<usize, UsageError> {
    let (vals, _) = eigh(&(&e.adjoint() * e))?;
    Ok(vals.iter().filter(|v| **v > 1e-12).count())
}

pub fn point_body(alpha: f64, t: f64) -> Result<PointBody, UsageError> {
    let point = tradeoff_point(alpha, t)?;
    let tilt = optimal_tilt(alpha)?;
    let inst = optimal_instrument(alpha, t)?;
    let kraus = inst
        .outcomes()
        .iter()
        .flatten()
        .map(|e| {
            Ok(KrausReport {
                matrix: e.clone(),
                rank: rank(e)?,
            })
        })
        .collect::<Result<Vec<_>, UsageError>>()?;
    let np = normalized(alpha, point.p, point.d).ok();
    Ok(PointBody {
        point,
        helstrom_tilt: tilt.angle,
        tilt_degenerate: tilt.degenerate,
        info: np.map(|n| n.info),
        dist: np.map(|n| n.dist),
        kraus,
        povm: inst.povm(),
    })
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct ClosedForm {
    #[serde(rename = "P")]
    pub p: f64,
    #[serde(rename = "D")]
    pub d: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SimulateBody {
    pub alpha: f64,
    pub t: f64,
    pub closed_form: ClosedForm,
    pub result: SimulationResult,
    /// `None` when the standard error vanishes.
    pub z_p: Option<f64>,
    pub z_d: Option<f64>,
}

pub fn simulate_body(
    alpha: f64,
    t: f64,
    shots: u64,
    seed: u64,
) -> Result<SimulateBody, UsageError> {
    let cfg = SimulationConfig::new(shots, seed)?;
    let point = tradeoff_point(alpha, t)?;
    let inst = optimal_instrument(alpha, t)?;
    let result = simulate::run(&inst, &symmetric_pair(alpha)?, &cfg)?;
    let z = |emp: f64, exact: f64, se: f64| (se > 0.0).then(|| (emp - exact) / se);
    Ok(SimulateBody {
        alpha,
        t: point.t,
        closed_form: ClosedForm {
            p: point.p,
            d: point.d,
        },
        z_p: z(result.empirical_p, point.p, result.stderr_p),
        z_d: z(result.empirical_d, point.d, result.stderr_d),
        result,
    })
}

pub fn verify_report(
    alpha: f64,
    grid: &[f64],
    tol: f64,
    restarts: usize,
    seed: u64,
) -> Result<VerificationReport, UsageError> {
    if alpha <= 0.0 || alpha >= FRAC_PI_4 {
        return Err(UsageError(format!(
            "verify needs alpha strictly inside (0, pi/4), got {alpha}"
        )));
    }
    if !(tol.is_finite() && tol >= 0.0) {
        return Err(UsageError(format!(
            "--tol must be a nonnegative number, got {tol}"
        )));
    }
    let cfg = OracleConfig {
        restarts,
        seed,
        ..OracleConfig::default()
    };
    Ok(oracle::verify_closed_form(
        &symmetric_pair(alpha)?,
        grid,
        &cfg,
        tol,
    )?)
}

/// Executes one command and returns the text to emit.
pub fn run(cmd: &Command) -> Result<Outcome, UsageError> {
    let mut warnings = Vec::new();
    let (output, status) = match cmd {
        Command::Curve(a) => {
            let alpha = resolve_alpha(&a.angle, &mut warnings)?;
            let rows = curve_rows(alpha, a.points, a.by_probability, &mut warnings)?;
            let text = match a.format {
                Format::Csv => rows_to_csv(&rows),
                Format::Json => to_json(
                    "curve",
                    CurveBody {
                        alpha,
                        by_probability: a.by_probability,
                        rows,
                    },
                ),
            };
            (text, Status::Success)
        }
        Command::Point(a) => {
            let alpha = resolve_alpha(&a.angle, &mut warnings)?;
            (to_json("point", point_body(alpha, a.t)?), Status::Success)
        }
        Command::Verify(a) => {
            let alpha = resolve_alpha(&a.angle, &mut warnings)?;
            let report = verify_report(alpha, &a.t, a.tol, a.restarts, a.seed)?;
            let status = if report.all_pass {
                Status::Success
            } else {
                Status::VerificationFailed
            };
            (to_json("verify", report), status)
        }
        Command::Simulate(a) => {
            let alpha = resolve_alpha(&a.angle, &mut warnings)?;
            (
                to_json("simulate", simulate_body(alpha, a.t, a.shots, a.seed)?),
                Status::Success,
            )
        }
    };
    Ok(Outcome {
        output,
        warnings,
        status,
    })
}
