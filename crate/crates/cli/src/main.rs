use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use dioph_core::density::{self, DensitySample};
use dioph_core::gamma::{self, Branch};
use dioph_core::pattern;
use dioph_core::sequences::{self, SequenceSpec};
use dioph_core::{Error, Natural};

const EXIT_DOMAIN: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_VIOLATION: u8 = 3;

#[derive(Parser)]
#[command(
    name = "dioph",
    version,
    about = "Classify pairs by the half-product Diophantine equation they use"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    #[default]
    Plain,
    Csv,
    Jsonl,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Family {
    Fibonacci,
    Power,
    Ceilpow2,
    Ap,
    Sgp,
    Recurrence,
    Explicit,
}

#[derive(Subcommand)]
enum Command {
    /// Print Γ(a, b): 1 or 2
    Gamma {
        a: Natural,
        b: Natural,
        /// Also show the reduced pair, the deciding Θ and the unique solution
        #[arg(long, alias = "solve")]
        show_solution: bool,
        #[arg(long, value_enum, default_value_t)]
        format: OutputFormat,
    },
    /// Print Θ(a, b), the inverse of a/d modulo b/d
    Theta { a: Natural, b: Natural },
    /// Stream Δ over a window of a sequence
    Delta {
        #[arg(long, value_enum)]
        family: Family,
        #[arg(long)]
        k: Option<Natural>,
        #[arg(long)]
        a: Option<Natural>,
        #[arg(long)]
        b: Option<Natural>,
        #[arg(long)]
        r: Option<Natural>,
        /// One decimal natural per line (explicit family)
        #[arg(long)]
        file: Option<PathBuf>,
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
        start: u64,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        count: u64,
        #[arg(long, value_enum, default_value_t)]
        format: OutputFormat,
        /// Append the run-length encoding
        #[arg(long)]
        runs: bool,
    },
    /// Detect the period of Γ(k, n) over n
    Period {
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        k: u64,
        /// Terms to verify over; defaults to 8k
        #[arg(long)]
        window: Option<u64>,
    },
    /// Print the alternation threshold M_k and the truncated polynomial g
    Mk {
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        k: u32,
        #[arg(long, value_enum, default_value_t)]
        format: OutputFormat,
    },
    /// Scan the Γ = 1 density over 1 ≤ a ≤ b ≤ x
    Density {
        #[arg(long = "max", value_parser = clap::value_parser!(u64).range(1..))]
        x_max: u64,
        #[arg(long, default_value_t = 2000, value_parser = clap::value_parser!(u64).range(1..))]
        samples: u64,
        /// Restrict to gcd(a, b) = 1
        #[arg(long)]
        coprime: bool,
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long)]
        svg: Option<PathBuf>,
        /// Worker threads; 0 uses all available
        #[arg(long, default_value_t = 0)]
        jobs: usize,
    },
    /// Check uniqueness and criterion-vs-oracle agreement up to a bound
    Verify {
        #[arg(long = "max", value_parser = clap::value_parser!(u64).range(2..))]
        limit: u64,
        #[arg(long, default_value_t = 0)]
        jobs: usize,
        #[arg(long, value_enum, default_value_t)]
        format: OutputFormat,
    },
}

struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::TheoremViolation { .. } | Error::NoPeriod { .. } => EXIT_VIOLATION,
            _ => EXIT_DOMAIN,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        // a closed downstream pipe is not a failure of ours
        let code = if e.kind() == io::ErrorKind::BrokenPipe {
            0
        } else {
            EXIT_DOMAIN
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_USAGE,
        message: message.into(),
    }
}

type CmdResult = Result<u8, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = io::stdout();
    let mut out = stdout.lock();
    let result = run(cli.command, &mut out).and_then(|code| {
        out.flush()?;
        Ok(code)
    });
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) if f.code == 0 => ExitCode::SUCCESS,
        Err(f) => {
            let _ = out.flush();
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(command: Command, out: &mut impl Write) -> CmdResult {
    match command {
        Command::Gamma {
            a,
            b,
            show_solution,
            format,
        } => cmd_gamma(&a, &b, show_solution, format, out),
        Command::Theta { a, b } => {
            writeln!(out, "{}", dioph_core::theta(&a, &b)?)?;
            Ok(0)
        }
        Command::Delta {
            family,
            k,
            a,
            b,
            r,
            file,
            start,
            count,
            format,
            runs,
        } => {
            let spec = build_spec(family, k, a, b, r, file)?;
            cmd_delta(&spec, start, count, format, runs, out)
        }
        Command::Period { k, window } => {
            let window = window.unwrap_or(8 * k);
            let report = pattern::detect_period(k, window)?;
            writeln!(
                out,
                "{}",
                serde_json::to_string(&report).map_err(io::Error::from)?
            )?;
            Ok(0)
        }
        Command::Mk { k, format } => {
            let cert = pattern::mk_certificate(k)?;
            match format {
                OutputFormat::Jsonl => writeln!(
                    out,
                    "{}",
                    serde_json::to_string(&cert).map_err(io::Error::from)?
                )?,
                _ => {
                    writeln!(out, "{}", cert.m_k)?;
                    writeln!(out, "g(x) = {}", cert.g)?;
                }
            }
            Ok(0)
        }
        Command::Density {
            x_max,
            samples,
            coprime,
            csv,
            svg,
            jobs,
        } => cmd_density(x_max, samples, coprime, csv, svg, jobs, out),
        Command::Verify {
            limit,
            jobs,
            format,
        } => cmd_verify(limit, jobs, format, out),
    }
}

/// Runs `f` on a pool of `jobs` workers (0 means all available cores).
fn with_pool<T: Send>(jobs: usize, f: impl FnOnce() -> T + Send) -> Result<T, Failure> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| usage(e.to_string()))?;
    Ok(pool.install(f))
}

fn cmd_gamma(
    a: &Natural,
    b: &Natural,
    show_solution: bool,
    format: OutputFormat,
    out: &mut impl Write,
) -> CmdResult {
    let class = gamma::classify(a, b)?;
    let solution = if show_solution {
        let reduced = &class.reduced;
        let solutions = dioph_core::solve_brute(&reduced.a, &reduced.b)?;
        if solutions.len() != 1 {
            return Err(Error::TheoremViolation {
                a: a.clone(),
                b: b.clone(),
                found: solutions.len(),
            }
            .into());
        }
        if solutions[0].tag != class.tag {
            return Err(Failure {
                code: EXIT_VIOLATION,
                message: format!(
                    "criterion says {} but enumeration found equation {}",
                    class.tag, solutions[0].tag
                ),
            });
        }
        solutions.into_iter().next()
    } else {
        None
    };

    if format == OutputFormat::Jsonl {
        let mut rec = serde_json::json!({ "a": a, "b": b, "gamma": class.tag });
        if let Some(s) = &solution {
            rec["reduced"] = serde_json::to_value(&class.reduced).map_err(io::Error::from)?;
            rec["branch"] = serde_json::to_value(&class.branch).map_err(io::Error::from)?;
            rec["solution"] = serde_json::to_value(s).map_err(io::Error::from)?;
        }
        writeln!(out, "{rec}")?;
        return Ok(0);
    }

    writeln!(out, "{}", class.tag)?;
    if let Some(s) = solution {
        let r = &class.reduced;
        writeln!(out, "reduced: ({}, {}), d = {}", r.a, r.b, r.d)?;
        match &class.branch {
            Branch::Divisible => writeln!(out, "rule: one reduced member divides the other")?,
            Branch::OddFirst { theta_ba } => writeln!(
                out,
                "rule: a/d odd, Theta(b, a) = {theta_ba} ({})",
                parity(theta_ba)
            )?,
            Branch::EvenFirst { theta_ab } => writeln!(
                out,
                "rule: a/d even, Theta(a, b) = {theta_ab} ({})",
                parity(theta_ab)
            )?,
        }
        writeln!(
            out,
            "solution: equation {}, x = {}, y = {}",
            s.tag, s.x, s.y
        )?;
    }
    Ok(0)
}

fn parity(v: &Natural) -> &'static str {
    if v.is_odd() {
        "odd"
    } else {
        "even"
    }
}

fn small_k(k: Option<Natural>) -> Result<u32, Failure> {
    let k = k.ok_or_else(|| usage("--k is required for this family"))?;
    k.to_u64()
        .and_then(|v| u32::try_from(v).ok())
        .ok_or_else(|| usage(format!("--k {k} is too large")))
}

fn build_spec(
    family: Family,
    k: Option<Natural>,
    a: Option<Natural>,
    b: Option<Natural>,
    r: Option<Natural>,
    file: Option<PathBuf>,
) -> Result<SequenceSpec, Failure> {
    let need = |v: Option<Natural>, flag: &str| {
        v.ok_or_else(|| usage(format!("--{flag} is required for this family")))
    };
    let spec = match family {
        Family::Fibonacci => SequenceSpec::Fibonacci,
        Family::Power => SequenceSpec::Power { k: small_k(k)? },
        Family::Ceilpow2 => SequenceSpec::CeilPow2 { k: small_k(k)? },
        Family::Ap => SequenceSpec::Arithmetic {
            a: need(a, "a")?,
            r: need(r, "r")?,
        },
        Family::Sgp => SequenceSpec::ShiftedGeometric {
            a: need(a, "a")?,
            r: need(r, "r")?,
        },
        Family::Recurrence => SequenceSpec::Recurrence2 {
            a: need(a, "a")?,
            b: need(b, "b")?,
            k: need(k, "k")?,
        },
        Family::Explicit => {
            let path = file.ok_or_else(|| usage("--file is required for the explicit family"))?;
            return Ok(SequenceSpec::load_explicit(path)?);
        }
    };
    spec.validate()?;
    Ok(spec)
}

fn cmd_delta(
    spec: &SequenceSpec,
    start: u64,
    count: u64,
    format: OutputFormat,
    runs: bool,
    out: &mut impl Write,
) -> CmdResult {
    let rows = sequences::delta_rows(spec, start, count)?;
    let tags: Vec<_> = rows.iter().map(|r| r.gamma).collect();
    let rle = pattern::run_length(&tags)?;
    match format {
        OutputFormat::Plain => {
            let line: Vec<String> = tags.iter().map(ToString::to_string).collect();
            writeln!(out, "{}", line.join(","))?;
            if runs {
                writeln!(out, "runs: {rle}")?;
            }
        }
        OutputFormat::Csv => {
            sequences::write_delta_csv(&rows, &mut *out)?;
            if runs {
                writeln!(out, "# runs: {rle}")?;
            }
        }
        OutputFormat::Jsonl => {
            sequences::write_delta_jsonl(&rows, &mut *out)?;
            if runs {
                let rec = serde_json::json!({ "runs": rle.runs });
                writeln!(out, "{rec}")?;
            }
        }
    }
    Ok(0)
}

fn cmd_density(
    x_max: u64,
    samples: u64,
    coprime: bool,
    csv: Option<PathBuf>,
    svg: Option<PathBuf>,
    jobs: usize,
    out: &mut impl Write,
) -> CmdResult {
    let checkpoints = density::even_checkpoints(x_max, samples);
    let scan: Vec<DensitySample> =
        with_pool(jobs, || density::density_scan(x_max, &checkpoints, coprime))??;
    if let Some(path) = csv {
        density::emit_csv(&scan, path)?;
    }
    if let Some(path) = svg {
        density::emit_svg(&scan, path)?;
    }
    let last = scan.last().expect("checkpoints always include x_max");
    let ratio = last.ratio().to_decimal(8).unwrap_or_else(|| "nan".into());
    writeln!(out, "{ratio}")?;
    Ok(0)
}

fn cmd_verify(limit: u64, jobs: usize, format: OutputFormat, out: &mut impl Write) -> CmdResult {
    let reports = with_pool(jobs, || -> dioph_core::Result<_> {
        Ok([
            gamma::verify_exactly_one(limit)?,
            gamma::verify_criterion(limit)?,
        ])
    })??;
    for report in &reports {
        match format {
            OutputFormat::Jsonl => report.write_jsonl(&mut *out)?,
            _ => {
                let check = serde_json::to_value(report.check).map_err(io::Error::from)?;
                writeln!(
                    out,
                    "{}: {} pairs checked, {} counterexamples",
                    check.as_str().unwrap_or_default(),
                    report.pairs_checked,
                    report.counterexamples.len()
                )?;
                for c in &report.counterexamples {
                    writeln!(out, "  counterexample: ({}, {})", c.a, c.b)?;
                }
            }
        }
    }
    let clean = reports.iter().all(|r| r.is_clean());
    Ok(if clean { 0 } else { EXIT_VIOLATION })
}
