use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{ArgGroup, Parser};

use toric_koszul::io::{fan_from_json, sheaf_from_json};
use toric_koszul::suite::{run_with_threads, Job, Suite};
use toric_koszul::{builtin_fan, Fan, BUILTIN_FANS};

/// Run exact degreewise verification suites on smooth toric fans.
#[derive(Parser, Debug)]
#[command(name = "toric-koszul", version, group(ArgGroup::new("input").required(true).args(["fan", "builtin"])))]
struct Args {
    /// Fan description (JSON).
    #[arg(long, value_name = "FILE")]
    fan: Option<PathBuf>,
    /// Built-in fan: a2, p1, p2, p1xp1, hirzebruch1.
    #[arg(long, value_name = "NAME")]
    builtin: Option<String>,
    /// Sheaf or line-bundle descriptor (JSON).
    #[arg(long, value_name = "FILE")]
    sheaf: Option<PathBuf>,
    /// validate | koszul-selfcheck | complete-acyclicity | serre-check | cousin-check | hom-table | commute-check
    #[arg(long, value_name = "NAME", default_value = "validate")]
    suite: String,
    /// Degree cube [LO, HI]^n replacing the computed window.
    #[arg(long, value_name = "LO..HI", allow_hyphen_values = true, value_parser = parse_window)]
    window: Option<(i64, i64)>,
    /// Sweep one representative per chamber instead of every degree.
    #[arg(long)]
    chambers: bool,
    /// Worker threads.
    #[arg(long, value_name = "N", default_value_t = 1)]
    jobs: usize,
    /// Write the JSON report here instead of stdout.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

fn parse_window(s: &str) -> Result<(i64, i64), String> {
    let (lo, hi) = s.split_once("..").ok_or("expected LO..HI")?;
    let lo: i64 = lo.trim().parse().map_err(|e| format!("bad LO: {e}"))?;
    let hi: i64 = hi.trim().parse().map_err(|e| format!("bad HI: {e}"))?;
    if lo > hi {
        return Err(format!("empty window {lo}..{hi}"));
    }
    Ok((lo, hi))
}

fn read(path: &Path) -> Result<String, String> {
    std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))
}

fn label(path: &Path) -> String {
    path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| path.display().to_string())
}

fn build_job(args: &Args) -> Result<Job, String> {
    let suite: Suite = args.suite.parse().map_err(|e| format!("{e}"))?;
    let (fan, fan_label): (Fan, String) = match (&args.fan, &args.builtin) {
        (Some(p), _) => (fan_from_json(&read(p)?).map_err(|e| format!("{}: {e}", p.display()))?, label(p)),
        (None, Some(name)) => {
            let f = builtin_fan(name).map_err(|e| format!("{e} (known: {})", BUILTIN_FANS.join(", ")))?;
            (f, name.clone())
        }
        (None, None) => unreachable!("clap requires an input"),
    };
    let fan = Arc::new(fan);
    let mut job = Job::new(fan.clone(), fan_label, suite);
    if let Some(p) = &args.sheaf {
        let sheaf = sheaf_from_json(&fan, &read(p)?).map_err(|e| format!("{}: {e}", p.display()))?;
        job = job.with_sheaf(sheaf, label(p));
    }
    job.window = args.window;
    job.chambers = args.chambers;
    Ok(job)
}

fn main() -> ExitCode {
    let args = Args::parse();
    let job = match build_job(&args) {
        Ok(j) => j,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let report = match run_with_threads(&job, args.jobs.max(1)) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {} suite: {e}", job.suite);
            return ExitCode::from(2);
        }
    };
    let json = report.to_json();
    match &args.out {
        Some(p) => {
            if let Err(e) = std::fs::write(p, &json) {
                eprintln!("error: {}: {e}", p.display());
                return ExitCode::from(2);
            }
        }
        None => print!("{json}"),
    }
    eprint!("{}", report.summary());
    if report.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
