//! `projsurf` command-line driver.
//!
//! Exit codes: 0 all checks pass, 1 a check failed, 2 usage error, 3 IO error.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use nalgebra::Matrix3;
use projsurf::geodesics::{random_initial_conditions, IntegrationOptions};
use projsurf::models::random::seeded;
use projsurf::models::{ModelKind, SL3Matrix, SurfaceModel};
use projsurf::suite::{
    emit_geodesics, read_report, report_csv, report_json, run_suite, write_atomic, Format,
    MetricSpec, SuiteConfig, SuiteError, SuiteReport,
};

#[derive(Parser)]
#[command(
    name = "projsurf",
    version,
    about = "Numerical verification of projective structures on surfaces"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a verification suite and write its report.
    Verify(VerifyArgs),
    /// Integrate geodesics and write their samples as CSV.
    Geodesics(GeodesicArgs),
    /// Re-emit a saved JSON report, optionally as CSV.
    Report(ReportArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum OutputFormat {
    Json,
    Csv,
}

impl From<OutputFormat> for Format {
    fn from(f: OutputFormat) -> Self {
        match f {
            OutputFormat::Json => Format::Json,
            OutputFormat::Csv => Format::Csv,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Metric {
    Round,
    Beltrami,
    Flat,
}

#[derive(Args)]
struct Output {
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    format: OutputFormat,
}

#[derive(Args)]
struct VerifyArgs {
    /// structure, projective, beltrami, degree, uniqueness, jets or all.
    suite: String,
    #[arg(long, default_value = "sphere")]
    model: String,
    /// Base finite-difference step of the nested pipelines.
    #[arg(long, default_value_t = 1e-3)]
    h: f64,
    #[arg(long, default_value_t = projsurf::geodesics::DEFAULT_DT)]
    dt: f64,
    #[arg(long, default_value_t = projsurf::geodesics::DEFAULT_STEPS)]
    steps: usize,
    #[arg(long, default_value_t = 21)]
    grid: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Replace the tolerance of every upper-bounded check.
    #[arg(long)]
    tol: Option<f64>,
    /// Random projective transformations in the Beltrami suite.
    #[arg(long = "n", default_value_t = 20)]
    samples: usize,
    /// Geodesics per transformation in the Beltrami suite.
    #[arg(long, default_value_t = 50)]
    paths: usize,
    /// Degree quadrature mesh, `LONxLAT` (sphere) or `NxN` (torus).
    #[arg(long, default_value = "400x200", value_parser = parse_mesh)]
    mesh: (usize, usize),
    /// Include per-check runtimes (makes the output run-dependent).
    #[arg(long)]
    timings: bool,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct GeodesicArgs {
    #[arg(long, default_value = "sphere")]
    model: String,
    #[arg(long, value_enum, default_value = "round")]
    metric: Metric,
    /// Projective transformation for `--metric beltrami`: three diagonal
    /// entries or nine row-major entries, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    psi: Vec<f64>,
    /// Number of geodesics, from random initial conditions.
    #[arg(long = "n", default_value_t = 5)]
    count: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, default_value_t = projsurf::geodesics::DEFAULT_DT)]
    dt: f64,
    #[arg(long, default_value_t = projsurf::geodesics::DEFAULT_STEPS)]
    steps: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ReportArgs {
    /// JSON report written by `verify`.
    input: PathBuf,
    #[command(flatten)]
    output: Output,
}

fn parse_mesh(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s.split_once(['x', ',']).ok_or("expected LONxLAT")?;
    let parse = |t: &str| t.trim().parse::<usize>().map_err(|e| e.to_string());
    Ok((parse(a)?, parse(b)?))
}

fn exit_code(e: &SuiteError) -> u8 {
    match e {
        SuiteError::Usage(_) => 2,
        SuiteError::Io { .. } => 3,
        SuiteError::Geom(_) => 1,
    }
}

fn write_output(text: &str, out: &Option<PathBuf>) -> Result<(), SuiteError> {
    match out {
        Some(path) => write_atomic(path, text.as_bytes()),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|source| SuiteError::Io {
                path: "<stdout>".into(),
                source,
            }),
    }
}

fn summarize(report: &SuiteReport) {
    for c in &report.checks {
        let residual = c.residual.map_or("n/a".to_string(), |r| format!("{r:.3e}"));
        let op = match c.bound {
            projsurf::suite::Bound::Max => "<=",
            projsurf::suite::Bound::Min => ">=",
        };
        eprintln!(
            "{} {}/{}: {residual} {op} {:.1e}{}",
            if c.passed { "PASS" } else { "FAIL" },
            c.suite,
            c.name,
            c.tolerance,
            c.note.as_ref().map_or(String::new(), |n| format!(" ({n})"))
        );
    }
    let failed = report.failures().count();
    eprintln!(
        "{}: {} checks, {failed} failed",
        report.suite,
        report.checks.len()
    );
}

fn emit(report: &SuiteReport, output: &Output, timings: bool) -> Result<(), SuiteError> {
    let text = match Format::from(output.format) {
        Format::Json => report_json(report, timings),
        Format::Csv => report_csv(report, timings),
    };
    write_output(&text, &output.out)
}

fn verify(args: &VerifyArgs) -> Result<bool, SuiteError> {
    let config = SuiteConfig {
        model: args.model.clone(),
        h: args.h,
        dt: args.dt,
        steps: args.steps,
        grid: args.grid,
        seed: args.seed,
        tol: args.tol,
        samples: args.samples,
        paths: args.paths,
        mesh: args.mesh,
    };
    let report = run_suite(&args.suite, &config)?;
    summarize(&report);
    emit(&report, &args.output, args.timings)?;
    Ok(report.passed)
}

fn psi_matrix(entries: &[f64]) -> Result<SL3Matrix, SuiteError> {
    let m = match entries.len() {
        3 => Matrix3::from_diagonal(&nalgebra::Vector3::new(entries[0], entries[1], entries[2])),
        9 => Matrix3::from_row_slice(entries),
        n => {
            return Err(SuiteError::Usage(format!(
                "--psi takes 3 or 9 numbers, got {n}"
            )))
        }
    };
    SL3Matrix::new(m).map_err(|e| SuiteError::Usage(e.to_string()))
}

fn geodesics(args: &GeodesicArgs) -> Result<bool, SuiteError> {
    let model = SurfaceModel::by_name(&args.model).map_err(|e| SuiteError::Usage(e.to_string()))?;
    let spec = match args.metric {
        Metric::Round => MetricSpec::Round,
        Metric::Flat => MetricSpec::Flat,
        Metric::Beltrami => MetricSpec::Beltrami(psi_matrix(&args.psi)?),
    };
    if !(args.dt > 0.0) || args.steps == 0 {
        return Err(SuiteError::Usage(
            "dt must be positive and steps at least 1".into(),
        ));
    }
    let charts: &[usize] = match model.kind {
        ModelKind::Sphere { .. } => &[0, 1],
        _ => &[0],
    };
    let ics = random_initial_conditions(&mut seeded(args.seed), args.count, 1.0, charts);
    let paths = emit_geodesics(
        &model,
        &spec,
        &ics,
        &IntegrationOptions::new(args.steps, args.dt),
        &args.out,
    )?;
    let truncated = paths.iter().filter(|p| p.truncated).count();
    eprintln!(
        "wrote {} geodesics to {} ({truncated} truncated)",
        paths.len(),
        args.out.display()
    );
    Ok(true)
}

fn report(args: &ReportArgs) -> Result<bool, SuiteError> {
    let report = read_report(&args.input)?;
    summarize(&report);
    let timings = report.checks.iter().any(|c| c.runtime_ms.is_some());
    emit(&report, &args.output, timings)?;
    Ok(report.passed)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Verify(a) => verify(a),
        Command::Geodesics(a) => geodesics(a),
        Command::Report(a) => report(a),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mesh_flag() {
        assert_eq!(parse_mesh("400x200"), Ok((400, 200)));
        assert_eq!(parse_mesh("64,64"), Ok((64, 64)));
        assert!(parse_mesh("400").is_err());
        assert!(parse_mesh("ax2").is_err());
    }

    #[test]
    fn psi_flag() {
        assert!(psi_matrix(&[2.0, 1.0, 0.5]).is_ok());
        assert!(psi_matrix(&[1.0; 9]).is_err());
        assert!(matches!(psi_matrix(&[1.0, 2.0]), Err(SuiteError::Usage(_))));
    }
}
