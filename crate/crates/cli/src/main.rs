//! `monop`: command-line driver for monop-core.
//!
//! Exit codes: 0 success or affirmative verdict, 2 negative verdict, 1 error.

use std::fs;
use std::io::{self, Read, Write};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use monop_core::flatbound::{flat_verdict, poisson_sweep, BoundaryProfile, Sample, ScanSpec, VerdictStatus};
use monop_core::funcexpr::FuncExpr;
use monop_core::halfplane::{HalfPlaneAutomorphism, HalfPlanePoint};
use monop_core::l2poly::MonomialSum;
use monop_core::monop::{builtin, norm_curve, MonomialOperatorSpec};
use monop_core::pick::{np_interpolate_with_tol, pick_matrix, NpData, PsdStatus, PsdVerdict};
use monop_core::unitaryop::{build_unitary, isometry_check, weight_agreement};
use monop_core::{Complex64, Error, DEFAULT_TOL};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

#[derive(Parser, Debug)]
#[command(name = "monop", version, about = "Monomial operators on L2[0,1]")]
struct Cli {
    /// Output format; each command has its own default.
    #[arg(long, global = true, value_enum)]
    out: Option<Format>,
    /// Tolerance for PSD tests and residual checks.
    #[arg(long, global = true, env = "MONOP_TOL", default_value_t = DEFAULT_TOL, allow_hyphen_values = true)]
    tol: f64,
    /// Seed for sampled checks.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads for grid sweeps.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Pick-matrix feasibility of a power sequence: {"p": [[re,im],...], "sizes": [...]}.
    PickCheck {
        /// JSON file, `-` for stdin.
        input: String,
    },
    /// Nevanlinna-Pick interpolation: {"nodes": [...], "targets": [...], "eval": [...]}.
    NpInterp { input: String },
    /// Applies an operator to a monomial sum.
    Apply {
        #[command(flatten)]
        spec: SpecArgs,
        /// MonomialSum JSON file, `-` for stdin.
        #[arg(long)]
        f: String,
    },
    /// Galerkin norm estimates, one row (N, estimate) per degree.
    Norm {
        #[command(flatten)]
        spec: SpecArgs,
        /// Degrees, comma separated.
        #[arg(long = "n", value_delimiter = ',', required = true)]
        degrees: Vec<usize>,
    },
    /// Boundedness verdict for the flat operator with shift tau and weight g.
    FlatCheck {
        #[arg(long)]
        g: String,
        /// `re` or `re,im`.
        #[arg(long, allow_hyphen_values = true)]
        tau: String,
        /// ScanSpec JSON file; defaults apply to missing fields.
        #[arg(long)]
        scan: Option<String>,
        /// Also write the sampled (sigma, t, value) grid as CSV here.
        #[arg(long)]
        sweep: Option<String>,
    },
    /// Unitary operator from an automorphism of the half-plane.
    Unitary {
        /// Phase of the weight.
        #[arg(long, allow_hyphen_values = true)]
        theta: f64,
        /// Rotation of the disk automorphism.
        #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
        rotation: f64,
        /// Disk parameter `re` or `re,im`, |a| < 1.
        #[arg(long, allow_hyphen_values = true)]
        a: String,
        #[arg(value_enum)]
        action: UnitaryAction,
        /// Random pairs for `check`.
        #[arg(long, default_value_t = 1000)]
        pairs: usize,
    },
    /// Poisson integrals of |g(-1/2+iy)|^2 on a grid.
    PoissonSweep {
        #[arg(long)]
        g: String,
        /// Comma separated sigma values (default: the scan grid).
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        sigma: Vec<f64>,
        /// Comma separated t values (default: the scan grid).
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        t: Vec<f64>,
        #[arg(long)]
        scan: Option<String>,
    },
}

#[derive(clap::Args, Debug)]
struct SpecArgs {
    /// Operator spec JSON file, `-` for stdin.
    #[arg(long, conflicts_with = "builtin", required_unless_present = "builtin")]
    spec: Option<String>,
    /// hardy, volterra, mult_x or identity.
    #[arg(long)]
    builtin: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum UnitaryAction {
    Build,
    Check,
}

/// A command's result: what to print and the exit code.
struct Report {
    json: Value,
    csv: Option<String>,
    default: Format,
    code: u8,
}

impl Report {
    fn json(json: Value, code: u8) -> Self {
        Report {
            json,
            csv: None,
            default: Format::Json,
            code,
        }
    }
}

fn read_input(path: &str) -> Result<String> {
    if path == "-" {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s).context("reading stdin")?;
        Ok(s)
    } else {
        fs::read_to_string(path).with_context(|| format!("reading {path}"))
    }
}

fn parse_json<T: for<'de> Deserialize<'de>>(path: &str, what: &str) -> Result<T> {
    let text = read_input(path)?;
    serde_json::from_str(&text).map_err(|e| anyhow!("invalid {what} in {path}: {e}"))
}

fn parse_complex(text: &str) -> Result<Complex64> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    let num = |s: &str| s.parse::<f64>().map_err(|_| anyhow!("not a number: {s:?}"));
    match parts.as_slice() {
        [re] => Ok(Complex64::new(num(re)?, 0.0)),
        [re, im] => Ok(Complex64::new(num(re)?, num(im)?)),
        _ => bail!("expected `re` or `re,im`, got {text:?}"),
    }
}

/// 9 significant digits, shortest form.
fn sig9(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    let r: f64 = format!("{x:.8e}").parse().expect("formatted float parses");
    r.to_string()
}

fn load_spec(args: &SpecArgs) -> Result<MonomialOperatorSpec> {
    if let Some(name) = &args.builtin {
        return Ok(builtin(name)?);
    }
    let path = args.spec.as_deref().expect("clap enforces --spec or --builtin");
    parse_json(path, "operator spec")
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PickInput {
    p: Vec<Complex64>,
    sizes: Vec<usize>,
}

#[derive(Serialize)]
struct SizedVerdict {
    size: usize,
    #[serde(flatten)]
    verdict: PsdVerdict,
}

fn cmd_pick_check(input: &str, tol: f64) -> Result<Report> {
    let data: PickInput = parse_json(input, "pick-check input")?;
    let p = data
        .p
        .iter()
        .map(|&z| HalfPlanePoint::new(z))
        .collect::<Result<Vec<_>, _>>()?;
    let mut out = Vec::new();
    for &size in &data.sizes {
        let verdict = pick_matrix(&p, size)?.check(tol)?;
        out.push(SizedVerdict { size, verdict });
    }
    let negative = out.iter().any(|v| v.verdict.status == PsdStatus::NotPsd);
    let mut csv = String::from("size,status,boundary,min_eig\n");
    for v in &out {
        let status = if v.verdict.is_psd() { "psd" } else { "notpsd" };
        csv += &format!("{},{},{},{}\n", v.size, status, v.verdict.boundary, sig9(v.verdict.min_eigenvalue));
    }
    Ok(Report {
        json: serde_json::to_value(&out)?,
        csv: Some(csv),
        default: Format::Json,
        code: if negative { 2 } else { 0 },
    })
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct NpInput {
    nodes: Vec<HalfPlanePoint>,
    targets: Vec<HalfPlanePoint>,
    #[serde(default)]
    eval: Vec<HalfPlanePoint>,
}

fn cmd_np_interp(input: &str, tol: f64) -> Result<Report> {
    let data: NpInput = parse_json(input, "np-interp input")?;
    match np_interpolate_with_tol(&data.nodes, &data.targets, tol) {
        Ok(beta) => {
            let values = data
                .eval
                .iter()
                .map(|&s| beta.eval(s))
                .collect::<Result<Vec<_>, _>>()?;
            let residual = data
                .nodes
                .iter()
                .zip(&data.targets)
                .map(|(&z, w)| beta.eval(z).map(|b| (b.value() - w.value()).norm()))
                .collect::<Result<Vec<_>, _>>()?
                .into_iter()
                .fold(0.0, f64::max);
            let interpolant: NpData = beta.into();
            let mut csv = String::from("re,im,beta_re,beta_im\n");
            for (s, b) in data.eval.iter().zip(&values) {
                csv += &format!(
                    "{},{},{},{}\n",
                    sig9(s.value().re),
                    sig9(s.value().im),
                    sig9(b.value().re),
                    sig9(b.value().im)
                );
            }
            Ok(Report {
                json: json!({
                    "status": "interpolated",
                    "interpolant": interpolant,
                    "node_residual": residual,
                    "values": values,
                }),
                csv: Some(csv),
                default: Format::Json,
                code: 0,
            })
        }
        Err(Error::NotInterpolable(verdict)) => Ok(Report::json(
            json!({"status": "not_interpolable", "pick": *verdict}),
            2,
        )),
        Err(e) => Err(e.into()),
    }
}

fn cmd_apply(spec: &SpecArgs, f: &str) -> Result<Report> {
    let spec = load_spec(spec)?;
    let f: MonomialSum = parse_json(f, "monomial sum")?;
    let image = spec.apply(&f)?;
    let mut csv = String::from("coeff_re,coeff_im,exp_re,exp_im\n");
    for t in image.terms() {
        csv += &format!(
            "{},{},{},{}\n",
            sig9(t.coeff.re),
            sig9(t.coeff.im),
            sig9(t.exp.value().re),
            sig9(t.exp.value().im)
        );
    }
    Ok(Report {
        json: serde_json::to_value(&image)?,
        csv: Some(csv),
        default: Format::Json,
        code: 0,
    })
}

fn cmd_norm(spec: &SpecArgs, degrees: &[usize]) -> Result<Report> {
    let spec = load_spec(spec)?;
    let curve = norm_curve(&spec, degrees)?;
    let mut csv = String::from("N,estimate\n");
    for (n, v) in degrees.iter().zip(&curve) {
        csv += &format!("{n},{}\n", sig9(*v));
    }
    let rows: Vec<Value> = degrees
        .iter()
        .zip(&curve)
        .map(|(n, v)| json!({"N": n, "estimate": v}))
        .collect();
    Ok(Report {
        json: Value::Array(rows),
        csv: Some(csv),
        default: Format::Csv,
        code: 0,
    })
}

fn load_scan(path: Option<&str>) -> Result<ScanSpec> {
    match path {
        Some(p) => parse_json(p, "scan grid"),
        None => Ok(ScanSpec::default()),
    }
}

fn samples_csv(samples: &[Sample]) -> String {
    let mut csv = String::from("sigma,t,value\n");
    for s in samples {
        csv += &format!("{},{},{}\n", sig9(s.sigma), sig9(s.t), sig9(s.value));
    }
    csv
}

fn cmd_flat_check(g: &str, tau: &str, scan: Option<&str>, sweep: Option<&str>) -> Result<Report> {
    let g = FuncExpr::parse(g).map_err(|e| anyhow!("weight g: {e}"))?;
    let tau = parse_complex(tau)?;
    let scan = load_scan(scan)?;
    let verdict = flat_verdict(&g, tau, &scan)?;
    if let Some(path) = sweep {
        fs::write(path, samples_csv(&verdict.samples)).with_context(|| format!("writing {path}"))?;
    }
    let code = if verdict.status == VerdictStatus::Bounded { 0 } else { 2 };
    Ok(Report::json(serde_json::to_value(&verdict)?, code))
}

fn random_point(rng: &mut ChaCha8Rng) -> HalfPlanePoint {
    HalfPlanePoint::new(Complex64::new(rng.gen_range(-0.45..5.0), rng.gen_range(-5.0..5.0)))
        .expect("sampled inside the half-plane")
}

fn cmd_unitary(
    theta: f64,
    rotation: f64,
    a: &str,
    action: UnitaryAction,
    pairs: usize,
    tol: f64,
    seed: u64,
) -> Result<Report> {
    let auto = HalfPlaneAutomorphism::new(rotation, parse_complex(a)?)?;
    let spec = build_unitary(&auto, theta)?;
    match action {
        UnitaryAction::Build => Ok(Report::json(serde_json::to_value(&spec)?, 0)),
        UnitaryAction::Check => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let sample: Vec<_> = (0..pairs).map(|_| (random_point(&mut rng), random_point(&mut rng))).collect();
            let residual = isometry_check(&spec, &sample)?;
            let points: Vec<HalfPlanePoint> = sample.iter().map(|p| p.0).collect();
            let (phase, deviation) = weight_agreement(&auto, theta, &points);
            let ok = residual <= tol && deviation <= tol && (phase.norm() - 1.0).abs() <= tol;
            Ok(Report::json(
                json!({
                    "status": if ok { "unitary" } else { "not_unitary" },
                    "isometry_residual": residual,
                    "kernel_weight_phase": phase,
                    "kernel_weight_deviation": deviation,
                    "pairs": pairs,
                    "seed": seed,
                }),
                if ok { 0 } else { 2 },
            ))
        }
    }
}

fn cmd_poisson_sweep(g: &str, sigma: &[f64], t: &[f64], scan: Option<&str>) -> Result<Report> {
    let g = FuncExpr::parse(g).map_err(|e| anyhow!("weight g: {e}"))?;
    let scan = load_scan(scan)?;
    scan.validate()?;
    let sigmas = if sigma.is_empty() { scan.sigma_grid() } else { sigma.to_vec() };
    let ts = if t.is_empty() { scan.t_grid() } else { t.to_vec() };
    let profile = BoundaryProfile::from_weight(&g);
    let samples = poisson_sweep(&profile, &sigmas, &ts)?;
    Ok(Report {
        json: serde_json::to_value(&samples)?,
        csv: Some(samples_csv(&samples)),
        default: Format::Csv,
        code: 0,
    })
}

fn run(cli: &Cli) -> Result<Report> {
    if !(cli.tol > 0.0 && cli.tol.is_finite()) {
        bail!("--tol must be a positive number, got {}", cli.tol);
    }
    match &cli.cmd {
        Cmd::PickCheck { input } => cmd_pick_check(input, cli.tol),
        Cmd::NpInterp { input } => cmd_np_interp(input, cli.tol),
        Cmd::Apply { spec, f } => cmd_apply(spec, f),
        Cmd::Norm { spec, degrees } => cmd_norm(spec, degrees),
        Cmd::FlatCheck { g, tau, scan, sweep } => cmd_flat_check(g, tau, scan.as_deref(), sweep.as_deref()),
        Cmd::Unitary {
            theta,
            rotation,
            a,
            action,
            pairs,
        } => cmd_unitary(*theta, *rotation, a, *action, *pairs, cli.tol, cli.seed),
        Cmd::PoissonSweep { g, sigma, t, scan } => cmd_poisson_sweep(g, sigma, t, scan.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // usage errors exit 1: code 2 is reserved for negative verdicts
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    if let Some(k) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(k).build_global() {
            eprintln!("error: --jobs: {e}");
            return ExitCode::from(1);
        }
    }
    match run(&cli) {
        Ok(report) => {
            let text = match (cli.out.unwrap_or(report.default), report.csv) {
                (Format::Csv, Some(csv)) => csv,
                (Format::Csv, None) => {
                    eprintln!("error: this command has no CSV form; use --out json");
                    return ExitCode::from(1);
                }
                (Format::Json, _) => {
                    serde_json::to_string_pretty(&report.json).expect("JSON values serialize") + "\n"
                }
            };
            let mut stdout = io::stdout().lock();
            if stdout.write_all(text.as_bytes()).is_err() {
                return ExitCode::from(1);
            }
            ExitCode::from(report.code)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
