//! Command-line driver: run scenario configs, sweep vanishing-parameter
//! ladders, solve delay problems, verify kernel-integral identities, and
//! rebuild summary reports from written certificates.
//!
//! Exit status: 0 when everything passed, 1 when at least one certificate
//! failed, 2 on configuration or usage errors.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use yosida::scenario::{self, KindFilter, RunOptions, ScenarioOutcome};
use yosida::{report, IntegralParams};

#[derive(Parser)]
#[command(
    name = "yosida",
    about = "Solve regularized evolution equations and certify the results",
    version
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run every scenario in a config file.
    Run(CommonArgs),
    /// Run only the sweep scenarios in a config file.
    Sweep(CommonArgs),
    /// Run only the delay scenarios in a config file.
    Delay(CommonArgs),
    /// Verify the kernel-integral identities and bounds.
    VerifyIntegrals(VerifyArgs),
    /// Rebuild the summary index from certificates already on disk.
    Report(ReportArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// Scenario config file (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Output directory root.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Override every check seed in the run.
    #[arg(long)]
    seed: Option<u64>,
    /// Upper bound on concurrently running scenarios.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

#[derive(Args)]
struct VerifyArgs {
    /// Comma-separated identity numbers (1-8); default runs all of them
    /// plus the order-interchange check.
    #[arg(long)]
    items: Option<String>,
    /// Output directory root.
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

#[derive(Args)]
struct ReportArgs {
    /// Output directory root holding earlier scenario runs.
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let verdict = match cli.cmd {
        Cmd::Run(args) => run_config(&args, KindFilter::All),
        Cmd::Sweep(args) => run_config(&args, KindFilter::SweepOnly),
        Cmd::Delay(args) => run_config(&args, KindFilter::DelayOnly),
        Cmd::VerifyIntegrals(args) => verify_integrals(&args),
        Cmd::Report(args) => rebuild_report(&args),
    };
    match verdict {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

/// `Ok(true)`: ran and everything passed.  `Ok(false)`: ran, some
/// certificate failed.  `Err`: configuration problem.
fn run_config(args: &CommonArgs, filter: KindFilter) -> Result<bool, String> {
    let file = scenario::load_file(&args.config).map_err(|e| e.to_string())?;
    let opts = RunOptions { out_dir: args.out.clone(), seed: args.seed, jobs: args.jobs };
    let outcomes = scenario::run_file(&file, filter, &opts).map_err(|e| e.to_string())?;
    Ok(print_outcomes(&outcomes))
}

fn print_outcomes(outcomes: &[ScenarioOutcome]) -> bool {
    let mut all_pass = true;
    for outcome in outcomes {
        if outcome.certificates.is_empty() {
            println!("OK   {}: solved, no checks requested", outcome.name);
            continue;
        }
        for cert in &outcome.certificates {
            println!("{} [{}]", cert.one_line(), outcome.name);
        }
        all_pass &= outcome.all_pass();
    }
    all_pass
}

fn parse_items(text: &str) -> Result<Vec<usize>, String> {
    let mut items = Vec::new();
    for piece in text.split(',') {
        let piece = piece.trim();
        if piece.is_empty() {
            continue;
        }
        let item: usize = piece
            .parse()
            .map_err(|_| format!("`{piece}` is not an identity number"))?;
        if !(1..=8).contains(&item) {
            return Err(format!("identity number {item} is out of range 1-8"));
        }
        items.push(item);
    }
    if items.is_empty() {
        return Err("the item list is empty".into());
    }
    Ok(items)
}

fn verify_integrals(args: &VerifyArgs) -> Result<bool, String> {
    let params = IntegralParams::default();
    let mut table = Vec::new();
    match &args.items {
        Some(text) => {
            for item in parse_items(text)? {
                let cert = yosida::verify_some_integrals(item, &params)
                    .map_err(|e| format!("identity {item}: {e}"))?;
                table.push((item, cert));
            }
        }
        None => {
            let all = yosida::verify_all_integrals(&params).map_err(|e| e.to_string())?;
            table.extend(all);
            // Order-interchange check on the canonical pair of iterated
            // kernels; recorded as item 0 in the table.
            let f = |t: f64, s: f64| (-(t + s)).exp() * (1.0 + t * s).recip();
            let g = |t: f64, s: f64| (-(t - s).abs()).exp() * (-s).exp();
            let cert = yosida::check_interchange(&f, &g, 30.0, 16).map_err(|e| e.to_string())?;
            table.push((0, cert));
        }
    }

    std::fs::create_dir_all(&args.out).map_err(|e| e.to_string())?;
    report::write_identity_table_csv(&args.out.join("integrals.csv"), &table)
        .map_err(|e| e.to_string())?;
    let certs: Vec<_> = table.iter().map(|(_, c)| c.clone()).collect();
    report::write_certificates(&args.out.join("certificates"), &certs)
        .map_err(|e| e.to_string())?;
    let mut all_pass = true;
    for (item, cert) in &table {
        println!("{} [identity {}]", cert.one_line(), item);
        all_pass &= cert.pass;
    }
    Ok(all_pass)
}

fn rebuild_report(args: &ReportArgs) -> Result<bool, String> {
    if !args.out.is_dir() {
        return Err(format!("`{}` is not a directory", args.out.display()));
    }
    let mut entries: Vec<PathBuf> = std::fs::read_dir(&args.out)
        .map_err(|e| e.to_string())?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.join("certificates").is_dir())
        .collect();
    entries.sort();
    if entries.is_empty() {
        return Err(format!("no scenario outputs under `{}`", args.out.display()));
    }
    let mut loaded = Vec::new();
    for dir in &entries {
        let name = dir
            .file_name()
            .and_then(|n| n.to_str())
            .ok_or_else(|| format!("unreadable directory name under `{}`", args.out.display()))?
            .to_string();
        let certs = report::load_certificates(&dir.join("certificates"))
            .map_err(|e| e.to_string())?;
        loaded.push((name, certs));
    }
    let rows: Vec<(&str, &yosida::Certificate)> = loaded
        .iter()
        .flat_map(|(name, certs)| certs.iter().map(move |c| (name.as_str(), c)))
        .collect();
    report::write_summary_csv(&args.out.join("summary.csv"), &rows)
        .map_err(|e| e.to_string())?;
    let mut all_pass = true;
    for (name, cert) in &rows {
        println!("{} [{}]", cert.one_line(), name);
        all_pass &= cert.pass;
    }
    Ok(all_pass)
}
