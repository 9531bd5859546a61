//! `mlfrac <scenario.cfg> [--override key=value]...`
//!
//! Exit status: 0 success, 2 a verification did not pass, 1 operational error.

mod config;
mod output;
mod run;
mod specs;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use serde_json::{json, Value};

use config::ScenarioConfig;

#[derive(Parser, Debug)]
#[command(
    name = "mlfrac",
    version,
    about = "Run a multi-term fractional diffusion scenario"
)]
struct Args {
    /// Scenario file (`key = value` lines under `[section]` headers).
    scenario: PathBuf,
    /// Replace or add `section.key=value`; a bare key targets `[scenario]`.
    #[arg(long = "override", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

/// Environment variable capping the worker thread count.
const THREADS_ENV: &str = "MLFRAC_THREADS";

fn print_line(v: &Value) {
    println!(
        "{}",
        serde_json::to_string(v).expect("JSON values serialize")
    );
}

fn fail(kind: Option<&str>, errors: Vec<String>) -> ExitCode {
    for e in &errors {
        eprintln!("error: {e}");
    }
    print_line(&json!({ "kind": kind, "status": "error", "errors": errors }));
    ExitCode::from(1)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let args = Args::parse();

    if let Ok(v) = std::env::var(THREADS_ENV) {
        match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => {
                if let Err(e) = rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build_global()
                {
                    return fail(None, vec![format!("{THREADS_ENV}: {e}")]);
                }
            }
            _ => {
                return fail(
                    None,
                    vec![format!(
                        "{THREADS_ENV} must be a positive integer, got `{v}`"
                    )],
                )
            }
        }
    }

    let cfg = match ScenarioConfig::load(&args.scenario, &args.overrides) {
        Ok(c) => c,
        Err(e) => return fail(None, e.0),
    };
    let kind = cfg.kind.name();
    let report = match run::run(&cfg) {
        Ok(r) => r,
        Err(e) => return fail(Some(kind), vec![e]),
    };

    let writes = [
        (cfg.output.csv.as_ref(), report.csv.clone()),
        (
            cfg.output.observation.as_ref(),
            report.observation_csv.clone(),
        ),
        (
            cfg.output.json.as_ref(),
            Some(serde_json::to_string_pretty(&report.artifact).expect("JSON") + "\n"),
        ),
    ];
    let mut written = Vec::new();
    for (path, contents) in writes {
        let Some(path) = path else { continue };
        let Some(contents) = contents else {
            return fail(
                Some(kind),
                vec![format!(
                    "scenario kind {kind} produces no artifact for {}",
                    path.display()
                )],
            );
        };
        if let Err(e) = output::write_atomic(path, &contents) {
            return fail(
                Some(kind),
                vec![format!("cannot write {}: {e}", path.display())],
            );
        }
        written.push(path.display().to_string());
    }

    let status = match report.passed {
        None => "ok",
        Some(true) => "pass",
        Some(false) => "fail",
    };
    let mut line = serde_json::Map::new();
    line.insert("kind".into(), json!(kind));
    line.insert("status".into(), json!(status));
    line.extend(report.summary);
    if !written.is_empty() {
        line.insert("artifacts".into(), json!(written));
    }
    print_line(&Value::Object(line));
    if report.passed == Some(false) {
        ExitCode::from(2)
    } else {
        ExitCode::SUCCESS
    }
}
