//! The `polyeig` command line.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use polyeig_core::locg::{self, Diagnostics};
use polyeig_core::{problems, rate, verify, Preconditioner, ProblemBundle, SolverConfig, Status, Variant};

use crate::error::{Error, Result};
use crate::{problem_dir, trace};

pub const EXIT_OK: i32 = 0;
pub const EXIT_MAX_ITERS: i32 = 2;
pub const EXIT_FAILURE: i32 = 3;
pub const EXIT_USAGE: i32 = 64;

#[derive(Debug, Parser)]
#[command(name = "polyeig", version, about = "Smallest positive-type eigenvalue of Hermitian matrix polynomials")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write a test problem to a directory.
    Generate(GenerateArgs),
    /// Run LOCG or SD on a problem directory.
    Solve(SolveArgs),
    /// Print the predicted convergence rate.
    Predict(PredictArgs),
    /// Inertia counts, bisection and brute-force oracles.
    Verify(VerifyArgs),
    /// Compare two traces iteration by iteration.
    Compare(CompareArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ProblemName {
    Wiresaw1,
    Hyperbolic,
    Pencil,
}

#[derive(Debug, Args)]
struct GenerateArgs {
    #[arg(long, value_enum)]
    problem: ProblemName,
    #[arg(long)]
    n: usize,
    /// Wire speed for `wiresaw1`.
    #[arg(long, default_value_t = 0.1)]
    nu: f64,
    /// `A..B` (unit steps), `A..B/K` (K points) or `a,b,c`; `pm` mirrors a
    /// positive list, `POS;NEG` gives both halves of a hyperbolic spectrum.
    #[arg(long)]
    spectrum: Option<String>,
    #[arg(long, env = "POLYEIG_SEED", default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum VariantArg {
    Locg,
    Sd,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PrecondArg {
    Identity,
    InvC,
    InvCCg,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum DiagnosticsArg {
    Off,
    Cheap,
    Full,
}

#[derive(Debug, Args)]
struct PrecondOpts {
    #[arg(long, value_enum, default_value = "inv-c")]
    precond: PrecondArg,
    #[arg(long, default_value_t = 0.1)]
    cg_tol: f64,
    #[arg(long, default_value_t = 10)]
    cg_maxit: usize,
}

#[derive(Debug, Args)]
struct SolveArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long, value_enum, default_value = "locg")]
    variant: VariantArg,
    #[arg(long, default_value_t = 1)]
    me: usize,
    #[command(flatten)]
    precond: PrecondOpts,
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    #[arg(long, default_value_t = 500)]
    max_iters: usize,
    #[arg(long, env = "POLYEIG_SEED", default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    trace: Option<PathBuf>,
    /// `auto` (bisection), `final` (last iterate) or a value; fills `abs_err`.
    #[arg(long)]
    lambda1: Option<String>,
    #[arg(long, value_enum, default_value = "cheap")]
    diagnostics: DiagnosticsArg,
}

#[derive(Debug, Args)]
struct PredictArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long, default_value_t = 1)]
    me: usize,
    #[command(flatten)]
    precond: PrecondOpts,
    /// `auto` (bisection) or a value.
    #[arg(long, default_value = "auto")]
    lambda1: String,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[arg(long = "in")]
    input: PathBuf,
    /// Print the number of eigenvalues in `(λ₋, μ]`.
    #[arg(long)]
    mu: Vec<f64>,
    /// Print `λ₁` by bisection.
    #[arg(long)]
    bisect: bool,
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    /// Print `λ₁` and all real eigenvalues from a dense linearization.
    #[arg(long)]
    brute_force: bool,
}

#[derive(Debug, Args)]
struct CompareArgs {
    #[arg(long, num_args = 1, required = true)]
    trace: Vec<PathBuf>,
}

/// Parses `argv` (program name first), runs the command and returns the exit
/// code.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { write!(err, "{text}") } else { write!(out, "{text}") };
            return code;
        }
    };
    let result = match cli.command {
        Command::Generate(a) => generate(a, out),
        Command::Solve(a) => solve(a, out),
        Command::Predict(a) => predict(a, out),
        Command::Verify(a) => verify_cmd(a, out),
        Command::Compare(a) => compare(a, out),
    };
    match result {
        Ok(code) => code,
        Err(Error::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_USAGE
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_FAILURE
        }
    }
}

fn usage(msg: impl Into<String>) -> Error {
    Error::Usage(msg.into())
}

fn io_out(e: std::io::Error) -> Error {
    Error::io("<stdout>", e)
}

/// Expands `A..B`, `A..B/K` or a comma list.
pub fn parse_values(s: &str) -> Result<Vec<f64>> {
    let num = |w: &str| w.trim().parse::<f64>().map_err(|_| usage(format!("bad number `{w}` in spectrum")));
    if let Some((a, rest)) = s.split_once("..") {
        let (b, count) = match rest.split_once('/') {
            Some((b, k)) => (b, Some(k.trim().parse::<usize>().map_err(|_| usage("bad point count in spectrum"))?)),
            None => (rest, None),
        };
        let (a, b) = (num(a)?, num(b)?);
        if a.is_nan() || b.is_nan() || a > b {
            return Err(usage("empty spectrum range"));
        }
        return Ok(match count {
            Some(0) => return Err(usage("spectrum range needs at least one point")),
            Some(1) => vec![a],
            Some(k) => (0..k).map(|i| a + (b - a) * i as f64 / (k - 1) as f64).collect(),
            None => (0..=((b - a).floor() as usize)).map(|i| a + i as f64).collect(),
        });
    }
    s.split(',').map(num).collect()
}

/// Positive- and negative-type halves of a hyperbolic spectrum.
pub fn parse_hyperbolic_spectrum(s: &str) -> Result<(Vec<f64>, Vec<f64>)> {
    if let Some(rest) = s.strip_prefix("pm") {
        let pos = parse_values(rest)?;
        let neg = pos.iter().rev().map(|v| -v).collect();
        return Ok((pos, neg));
    }
    let (p, q) = s.split_once(';').ok_or_else(|| usage("hyperbolic spectrum must be `pmR` or `POS;NEG`"))?;
    Ok((parse_values(p)?, parse_values(q)?))
}

fn generate(a: GenerateArgs, out: &mut dyn Write) -> Result<i32> {
    let bundle = match a.problem {
        ProblemName::Wiresaw1 => {
            if a.spectrum.is_some() {
                return Err(usage("wiresaw1 takes --nu, not --spectrum"));
            }
            problems::wiresaw1(a.n, a.nu)?
        }
        ProblemName::Hyperbolic => {
            let (pos, neg) = match &a.spectrum {
                Some(s) => parse_hyperbolic_spectrum(s)?,
                None => parse_hyperbolic_spectrum(&format!("pm1..{}", a.n))?,
            };
            if pos.len() != a.n || neg.len() != a.n {
                return Err(usage(format!("spectrum must give {} values of each type", a.n)));
            }
            problems::prescribed_hyperbolic(&pos, &neg, a.seed)?
        }
        ProblemName::Pencil => {
            let eigs = match &a.spectrum {
                Some(s) => parse_values(s)?,
                None => parse_values(&format!("1..{}", a.n.div_ceil(2)))?,
            };
            problems::definite_pencil(a.n, &eigs, a.seed)?
        }
    };
    let meta = problem_dir::write_problem(&bundle, &a.out)?;
    write!(out, "{}", meta.to_text()).map_err(io_out)?;
    Ok(EXIT_OK)
}

fn preconditioner(bundle: &ProblemBundle, opts: &PrecondOpts) -> Result<Preconditioner> {
    Ok(match opts.precond {
        PrecondArg::Identity => Preconditioner::identity(),
        PrecondArg::InvC => Preconditioner::exact_inverse(bundle.natural_preconditioner_matrix()?)?,
        PrecondArg::InvCCg => {
            Preconditioner::inner_cg(bundle.natural_preconditioner_matrix()?, opts.cg_tol, opts.cg_maxit)?
        }
    })
}

const BISECT_TOL: f64 = 1e-13;

fn resolve_lambda1(bundle: &ProblemBundle, spec: &str) -> Result<f64> {
    match spec {
        "auto" => Ok(verify::bisect_lambda1(&bundle.polynomial, None, BISECT_TOL)?),
        v => v.parse().map_err(|_| usage(format!("--lambda1 expects auto or a number, got `{v}`"))),
    }
}

fn solve(a: SolveArgs, out: &mut dyn Write) -> Result<i32> {
    let bundle = problem_dir::read_problem(&a.input)?;
    let k = preconditioner(&bundle, &a.precond)?;
    let reference = match a.lambda1.as_deref() {
        None | Some("final") => None,
        Some(s) => Some(resolve_lambda1(&bundle, s)?),
    };
    let config = SolverConfig {
        m_e: a.me,
        variant: match a.variant {
            VariantArg::Locg => Variant::Locg,
            VariantArg::Sd => Variant::Sd,
        },
        tol: a.tol,
        max_iters: a.max_iters,
        seed: a.seed,
        diagnostics: match a.diagnostics {
            DiagnosticsArg::Off => Diagnostics::Off,
            DiagnosticsArg::Cheap => Diagnostics::Cheap,
            DiagnosticsArg::Full => Diagnostics::Full,
        },
        reference_lambda1: reference,
    };
    let start = Instant::now();
    let mut output = locg::solve_with_clock(&bundle.polynomial, &k, &config, None, &mut || {
        start.elapsed().as_secs_f64()
    })?;
    if a.lambda1.as_deref() == Some("final") {
        let last = output.lambda_hat;
        for r in &mut output.trace {
            r.abs_err = Some(r.rho - last);
        }
    }
    if let Some(path) = &a.trace {
        trace::write_trace(&output.trace, path)?;
    }
    let (name, code) = match &output.status {
        Status::Converged => ("converged".to_string(), EXIT_OK),
        Status::LuckyBreakdown => ("lucky_breakdown".to_string(), EXIT_OK),
        Status::MaxIters => ("max_iters".to_string(), EXIT_MAX_ITERS),
        Status::Running => ("running".to_string(), EXIT_FAILURE),
        Status::Failed(e) => (format!("failed: {e}"), EXIT_FAILURE),
    };
    let last = output.trace.last().expect("trace has a final row");
    writeln!(out, "status = {name}").map_err(io_out)?;
    writeln!(out, "lambda_hat = {:.16e}", output.lambda_hat).map_err(io_out)?;
    writeln!(out, "iterations = {}", last.iter).map_err(io_out)?;
    writeln!(out, "normalized_residual = {:.3e}", last.normalized_residual).map_err(io_out)?;
    Ok(code)
}

fn predict(a: PredictArgs, out: &mut dyn Write) -> Result<i32> {
    let bundle = problem_dir::read_problem(&a.input)?;
    let k = preconditioner(&bundle, &a.precond)?;
    let lambda1 = resolve_lambda1(&bundle, &a.lambda1)?;
    let p = rate::predict(&bundle.polynomial, &k, lambda1, a.me)?;
    writeln!(out, "lambda1 = {lambda1:.16e}").map_err(io_out)?;
    for (key, v) in [
        ("gamma", p.gamma_lo),
        ("Gamma", p.gamma_hi),
        ("kappa", p.kappa),
        ("Delta", p.delta),
        ("eta", p.eta),
        ("eta_sq", p.eta_sq),
    ] {
        writeln!(out, "{key} = {v:.10e}").map_err(io_out)?;
    }
    Ok(EXIT_OK)
}

fn verify_cmd(a: VerifyArgs, out: &mut dyn Write) -> Result<i32> {
    if a.mu.is_empty() && !a.bisect && !a.brute_force {
        return Err(usage("verify needs --mu, --bisect or --brute-force"));
    }
    let bundle = problem_dir::read_problem(&a.input)?;
    let f = &bundle.polynomial;
    for mu in &a.mu {
        writeln!(out, "count({mu}) = {}", verify::count_eigs_upto(f, *mu)?).map_err(io_out)?;
    }
    if a.bisect {
        writeln!(out, "{:.10}", verify::bisect_lambda1(f, None, a.tol)?).map_err(io_out)?;
    }
    if a.brute_force {
        let eigs = verify::brute_force_eigs(f)?;
        let interval = f.interval();
        let l1 = eigs.iter().find(|&&v| interval.contains(v)).ok_or(polyeig_core::Error::DegenerateSpectrum)?;
        writeln!(out, "lambda1 = {l1:.16e}").map_err(io_out)?;
        let list: Vec<String> = eigs.iter().map(|v| format!("{v:.12e}")).collect();
        writeln!(out, "eigenvalues = {}", list.join(",")).map_err(io_out)?;
    }
    Ok(EXIT_OK)
}

fn compare(a: CompareArgs, out: &mut dyn Write) -> Result<i32> {
    let [pa, pb] = a.trace.as_slice() else {
        return Err(usage("compare takes exactly two --trace files"));
    };
    let ta = trace::read_trace(pa)?;
    let tb = trace::read_trace(pb)?;
    let (Some(la), Some(lb)) = (ta.last(), tb.last()) else {
        return Err(usage("empty trace"));
    };
    // error column: abs_err when both traces carry it, else the normalized residual
    let use_err = ta.iter().chain(&tb).all(|r| r.abs_err.is_some());
    let metric = |r: &polyeig_core::TraceRow| if use_err { r.abs_err.unwrap_or(0.0) } else { r.normalized_residual };
    let label = if use_err { "abs_err" } else { "normalized_residual" };
    writeln!(out, "{:>6} {:>14} {:>14} {:>12}", "iter", format!("A {label}"), format!("B {label}"), "A/B")
        .map_err(io_out)?;
    for i in 0..ta.len().max(tb.len()) {
        let va = ta.get(i).map(metric);
        let vb = tb.get(i).map(metric);
        let cell = |v: Option<f64>| v.map(|v| format!("{v:.6e}")).unwrap_or_else(|| "-".into());
        let ratio = match (va, vb) {
            (Some(x), Some(y)) if y != 0.0 => format!("{:.4e}", x / y),
            _ => "-".into(),
        };
        writeln!(out, "{i:>6} {:>14} {:>14} {ratio:>12}", cell(va), cell(vb)).map_err(io_out)?;
    }
    writeln!(out, "A: iterations = {}, rho = {:.16e}, normalized_residual = {:.3e}", la.iter, la.rho, la.normalized_residual)
        .map_err(io_out)?;
    writeln!(out, "B: iterations = {}, rho = {:.16e}, normalized_residual = {:.3e}", lb.iter, lb.rho, lb.normalized_residual)
        .map_err(io_out)?;
    Ok(EXIT_OK)
}
