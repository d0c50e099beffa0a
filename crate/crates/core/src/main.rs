use std::fs::File;
use std::io::BufWriter;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use serde::Serialize;

use loconc::bounds::BoundParams;
use loconc::concentration::{
    exact_convolution, q_discrete, q_monte_carlo, ConcentrationEstimate, Method, DEFAULT_ATOM_CAP,
};
use loconc::dist::{Distribution, SumSpec};
use loconc::harness::spec::CoeffSpec;
use loconc::harness::{run, run_suite, write_csv, RunSpec, Suite};
use loconc::lattice::{default_t_max, essential_lcd, lattice_infimum};

/// Concentration functions of weighted sums: estimation, arithmetic
/// structure, bounds and verification suites.
#[derive(Parser)]
#[command(name = "loconc", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Concentration Q(F_a, λ) of a weighted sum.
    Q {
        /// Summand law as JSON (inline or a file path).
        #[arg(long)]
        dist: String,
        /// Coefficients as JSON (inline or a file path).
        #[arg(long)]
        coeffs: String,
        #[arg(long)]
        lambda: f64,
        #[arg(long, default_value = "exact")]
        method: Method,
        #[arg(long, default_value_t = 1_000_000)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1e-3)]
        delta: f64,
    },
    /// Essential least common denominator.
    Lcd {
        #[arg(long)]
        coeffs: String,
        #[arg(long)]
        gamma: f64,
        #[arg(long)]
        alpha: f64,
        /// Search horizon; defaults to 10³ ‖a‖∞ / α.
        #[arg(long)]
        tmax: Option<f64>,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
    },
    /// Certified infimum of dist(ta, ℤⁿ) over [tlo, thi].
    Alpha {
        #[arg(long)]
        coeffs: String,
        #[arg(long)]
        tlo: f64,
        #[arg(long)]
        thi: f64,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
    },
    /// Evaluates one bound from a parameter object.
    Bound {
        #[arg(long)]
        params: String,
    },
    /// Runs an experiment specification and writes the CSV report.
    Run {
        #[arg(long)]
        spec: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Runs a verification suite and writes its CSV.
    Verify {
        #[arg(long)]
        suite: Suite,
        #[arg(long)]
        out: PathBuf,
    },
}

/// Inline JSON when the argument starts with `{` or `[`, otherwise a file to read.
fn json_arg(arg: &str) -> Result<String> {
    let trimmed = arg.trim_start();
    if trimmed.starts_with('{') || trimmed.starts_with('[') {
        Ok(arg.to_string())
    } else {
        std::fs::read_to_string(arg).with_context(|| format!("reading {arg}"))
    }
}

fn print_json<T: Serialize>(value: &T) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(value)?);
    Ok(())
}

fn coefficients(arg: &str) -> Result<Vec<f64>> {
    Ok(CoeffSpec::from_json(&json_arg(arg)?)?.resolve()?)
}

fn concentration(
    spec: &SumSpec,
    lambda: f64,
    method: Method,
    count: usize,
    seed: u64,
    delta: f64,
) -> Result<ConcentrationEstimate> {
    Ok(match method {
        Method::Exact => {
            let conv = exact_convolution(spec, DEFAULT_ATOM_CAP)?;
            if lambda.is_nan() || lambda < 0.0 {
                anyhow::bail!("lambda must be nonnegative, got {lambda}");
            }
            ConcentrationEstimate {
                lambda,
                value: q_discrete(&conv, lambda),
                method: Method::Exact,
                sample_count: 0,
                ci_half_width: 0.0,
                seed: None,
            }
        }
        Method::MonteCarlo => q_monte_carlo(spec, lambda, count, seed, delta)?,
    })
}

/// Exit status: 0 pass, 1 violation.
fn execute(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Q {
            dist,
            coeffs,
            lambda,
            method,
            count,
            seed,
            delta,
        } => {
            let law = Distribution::from_json(&json_arg(&dist)?)?;
            let spec = SumSpec::iid(coefficients(&coeffs)?, law)?;
            print_json(&concentration(&spec, lambda, method, count, seed, delta)?)?;
        }
        Command::Lcd {
            coeffs,
            gamma,
            alpha,
            tmax,
            tol,
        } => {
            let a = coefficients(&coeffs)?;
            let t_max = tmax.unwrap_or_else(|| default_t_max(&a, alpha));
            print_json(&essential_lcd(&a, gamma, alpha, t_max, tol)?)?;
        }
        Command::Alpha { coeffs, tlo, thi, tol } => {
            let a = coefficients(&coeffs)?;
            print_json(&lattice_infimum(&a, tlo, thi, tol)?)?;
        }
        Command::Bound { params } => {
            let params: BoundParams = serde_json::from_str(&json_arg(&params)?).context("bound parameters")?;
            print_json(&params.evaluate()?)?;
        }
        Command::Run { spec, out } => {
            let spec = RunSpec::from_json(&json_arg(&spec)?)?;
            let report = run(&spec)?;
            let file = File::create(&out).with_context(|| format!("creating {}", out.display()))?;
            write_csv(&report.rows, BufWriter::new(file))?;
            print_json(&serde_json::json!({ "summary": report.summary, "fits": report.fits }))?;
            return Ok(if report.passed() { 0 } else { 1 });
        }
        Command::Verify { suite, out } => {
            let report = run_suite(suite)?;
            let file = File::create(&out).with_context(|| format!("creating {}", out.display()))?;
            report.write_csv(BufWriter::new(file))?;
            for c in report.failures() {
                eprintln!("{suite}: {} = {:e} exceeds limit {:?}", c.check, c.observed, c.limit);
            }
            println!("{suite}: {}", if report.passed() { "pass" } else { "fail" });
            return Ok(if report.passed() { 0 } else { 1 });
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
