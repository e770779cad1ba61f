use std::fs::OpenOptions;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use kricci::campaign::{run_campaign, write_outputs, FlowReport};
use kricci::core::certify::{certify_k_ricci, CertStatus, CertifyOptions, Direction};
use kricci::error::{Error, Result};
use kricci::flowcfg::{load_campaign, parse_discretization};
use kricci::formats::{read_tensor, write_json, CertificateFile};
use kricci::generate::{generate, load_manifest, Constraint};
use kricci::suites::{run_suite, Suite, SuiteConfig};
use serde_json::Value;

#[derive(Parser)]
#[command(name = "kricci", version, about = "k-Ricci curvature checks and twisted Kähler-Ricci flow on torus models")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate random bihermitian forms, optionally shifted to Ric_k <= bound.
    Gen(GenArgs),
    /// Run a property suite and emit a JSONL report.
    Verify(VerifyArgs),
    /// Certify a k-Ricci bound for one tensor file.
    Certify(CertifyArgs),
    /// Run a flow campaign from a JSON config.
    Flow(FlowArgs),
    /// Summarize suite (JSONL) and flow (JSON) reports.
    Report(ReportArgs),
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 10)]
    count: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// With --bound, shift each form until Ric_k <= bound certifies.
    #[arg(long, requires = "bound")]
    k: Option<usize>,
    #[arg(long, requires = "k", allow_hyphen_values = true)]
    bound: Option<f64>,
    #[arg(long, default_value = "instances")]
    out: PathBuf,
}

#[derive(Args)]
struct VerifyArgs {
    /// royden, interpolation, mixed-trace, ric-scalar, berger or rigidity-model
    suite: String,
    #[arg(long, value_delimiter = ',', default_values_t = [2usize, 3])]
    n: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_values_t = [1usize, 2, 3])]
    k: Vec<usize>,
    #[arg(long, default_value_t = 10)]
    count: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Override the suite's default margin tolerance.
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    sigma: f64,
    /// Monte Carlo samples per berger case.
    #[arg(long, default_value_t = 100_000)]
    samples: usize,
    /// Manifest from `gen`; replaces the random instance stream.
    #[arg(long)]
    instances: Option<PathBuf>,
    /// JSONL file to append to; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CertifyArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    k: usize,
    #[arg(long, allow_hyphen_values = true)]
    bound: f64,
    #[arg(long, default_value = "upper")]
    direction: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 64)]
    starts: usize,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct FlowArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long, default_value = "flow-out")]
    out: PathBuf,
    /// Override the config's margin tolerance.
    #[arg(long)]
    tol: Option<f64>,
    /// fd2 or spectral; overrides the config.
    #[arg(long)]
    discretization: Option<String>,
}

#[derive(Args)]
struct ReportArgs {
    /// Suite JSONL files, flow report.json files, or flow output directories.
    #[arg(required = true)]
    inputs: Vec<PathBuf>,
}

fn append(path: &Path, text: &str) -> Result<()> {
    let io = |source| Error::Io { path: path.into(), source };
    let mut f = OpenOptions::new().create(true).append(true).open(path).map_err(io)?;
    f.write_all(text.as_bytes()).map_err(io)
}

fn cmd_gen(a: GenArgs) -> Result<bool> {
    let constraint = match (a.k, a.bound) {
        (Some(k), Some(bound)) => Constraint::RicKUpper { k, bound },
        _ => Constraint::None,
    };
    let m = generate(&a.out, a.n, a.count, a.seed, constraint)?;
    println!("wrote {} instances to {}", m.instances.len(), a.out.display());
    Ok(true)
}

fn cmd_verify(a: VerifyArgs) -> Result<bool> {
    let suite = Suite::parse(&a.suite)?;
    let instances = match &a.instances {
        Some(p) => Some(load_manifest(p)?.1),
        None => None,
    };
    let cfg = SuiteConfig {
        suite,
        dims: a.n,
        ks: a.k,
        count: a.count,
        seed: a.seed,
        tolerance: a.tol,
        sigma: a.sigma,
        samples: a.samples,
        instances,
    };
    let report = run_suite(&cfg)?;
    let text = report.to_jsonl()?;
    match &a.out {
        Some(p) => append(p, &text)?,
        None => print!("{text}"),
    }
    let s = &report.summary;
    eprintln!(
        "{}: {}/{} records pass, worst margin {}",
        s.suite,
        s.pass_count,
        s.records,
        s.worst_margin.map_or("n/a".into(), |m| format!("{m:e}"))
    );
    Ok(report.passed())
}

fn cmd_certify(a: CertifyArgs) -> Result<bool> {
    let t = read_tensor(&a.input)?;
    if t.violation > 1e-12 {
        eprintln!("note: input symmetrized (violation {:e})", t.violation);
    }
    let direction = match a.direction.as_str() {
        "upper" => Direction::Upper,
        "lower" => Direction::Lower,
        other => return Err(Error::Invalid(format!("direction {other:?} is not upper or lower"))),
    };
    let mut opts = CertifyOptions { seed: a.seed, n_starts: a.starts, ..CertifyOptions::default() };
    if let Some(tol) = a.tol {
        opts.tol = tol;
    }
    let cert = certify_k_ricci(&t.form, &t.metric, a.k, a.bound, direction, &opts)?;
    let file = CertificateFile::from(&cert);
    match &a.out {
        Some(p) => write_json(p, &file)?,
        None => println!("{}", serde_json::to_string_pretty(&file)?),
    }
    eprintln!("{}: extremal value {:e} against bound {}", file.status, cert.extremal_value, cert.bound);
    Ok(cert.status == CertStatus::Satisfied)
}

fn cmd_flow(a: FlowArgs) -> Result<bool> {
    let disc = a.discretization.as_deref().map(parse_discretization).transpose()?;
    let mut campaign = load_campaign(&a.config, disc)?;
    if let Some(tol) = a.tol {
        campaign.tolerance = tol;
        campaign.tolerance_overridden = true;
    }
    let result = run_campaign(&campaign)?;
    write_outputs(&a.out, &result)?;
    let r = &result.report;
    eprintln!(
        "{} at t = {} after {} steps; horizon {}",
        r.termination,
        r.final_t,
        r.steps,
        r.horizon.value.map_or(r.horizon.kind.clone(), |v| format!("{v}"))
    );
    for d in &r.diagnostics {
        let status = if d.pass { "pass" } else { "FAIL" };
        let detail = d.detail.as_deref().unwrap_or("");
        eprintln!("  {status} {} margin {:?} {detail}", d.name, d.margin);
    }
    Ok(r.pass)
}

fn report_file(path: &Path) -> Result<bool> {
    let path = if path.is_dir() { path.join("report.json") } else { path.to_path_buf() };
    let text = std::fs::read_to_string(&path).map_err(|source| Error::Io { path: path.clone(), source })?;
    if let Ok(r) = serde_json::from_str::<FlowReport>(&text) {
        let failed: Vec<&str> = r.diagnostics.iter().filter(|d| !d.pass).map(|d| d.name.as_str()).collect();
        println!(
            "{}: flow n={} N={} {} t={} horizon={} {}",
            path.display(),
            r.n,
            r.size,
            r.termination,
            r.final_t,
            r.horizon.value.map_or(r.horizon.kind.clone(), |v| format!("{v}")),
            if failed.is_empty() { "PASS".to_string() } else { format!("FAIL [{}]", failed.join(", ")) }
        );
        return Ok(r.pass);
    }
    let mut ok = true;
    for (i, line) in text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()) {
        let v: Value = serde_json::from_str(line).map_err(|e| Error::Parse {
            path: path.clone(),
            line: i + 1,
            column: e.column(),
            message: e.to_string(),
        })?;
        if v["type"] == "summary" {
            let fails = v["fail_count"].as_u64().unwrap_or(0);
            ok &= fails == 0;
            println!(
                "{}: {} {}/{} pass, worst margin {}, {:.3} s {}",
                path.display(),
                v["suite"].as_str().unwrap_or("?"),
                v["pass_count"],
                v["records"],
                v["worst_margin"],
                v["wall_time_s"].as_f64().unwrap_or(0.0),
                if fails == 0 { "PASS" } else { "FAIL" }
            );
        }
    }
    Ok(ok)
}

fn cmd_report(a: ReportArgs) -> Result<bool> {
    let mut ok = true;
    for p in &a.inputs {
        ok &= report_file(p)?;
    }
    Ok(ok)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.cmd {
        Cmd::Gen(a) => cmd_gen(a),
        Cmd::Verify(a) => cmd_verify(a),
        Cmd::Certify(a) => cmd_certify(a),
        Cmd::Flow(a) => cmd_flow(a),
        Cmd::Report(a) => cmd_report(a),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
