use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use odl_cli::config::{self, GenStreamConfig, SuiteConfig};
use odl_cli::presets;
use odl_cli::runner::{self, RunStatus, SUITE_SUMMARY_FILE};

#[derive(Parser)]
#[command(name = "odl")]
#[command(about = "Online deep learning on streams: hedged multi-depth nets vs fixed-depth baselines")]
#[command(version)]
struct Cli {
    /// Root directory for run artifacts (default: "runs", or the config's
    /// output_dir for `run`)
    #[arg(long, global = true)]
    output_dir: Option<PathBuf>,

    /// Number of experiments to run concurrently
    #[arg(long, global = true)]
    parallelism: Option<usize>,

    /// off, error, warn, info, debug or trace
    #[arg(long, global = true, default_value = "info")]
    log_level: String,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every experiment declared in a TOML suite config
    Run { config: PathBuf },
    /// Materialize a synthetic stream spec to CSV in the ingestion format
    GenStream { spec: PathBuf, out: PathBuf },
    /// Run a built-in replication suite with baked-in seeds
    Replicate { name: String },
}

const EXIT_VALIDATION: u8 = 1;
const EXIT_RUNTIME: u8 = 2;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => EXIT_VALIDATION,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let Ok(level) = cli.log_level.parse::<log::LevelFilter>() else {
        eprintln!(
            "invalid --log-level '{}': use off, error, warn, info, debug or trace",
            cli.log_level
        );
        return ExitCode::from(EXIT_VALIDATION);
    };
    // Level comes from the flag alone; the environment never changes
    // behavior.
    env_logger::Builder::new().filter_level(level).init();

    match &cli.command {
        Command::Run { config: path } => cmd_run(&cli, path),
        Command::GenStream { spec, out } => cmd_gen_stream(spec, out),
        Command::Replicate { name } => cmd_replicate(&cli, name),
    }
}

fn validation_failure(problems: &[String]) -> ExitCode {
    eprintln!(
        "configuration invalid ({} problem{}):",
        problems.len(),
        if problems.len() == 1 { "" } else { "s" }
    );
    for p in problems {
        eprintln!("  - {p}");
    }
    ExitCode::from(EXIT_VALIDATION)
}

fn cmd_run(cli: &Cli, path: &Path) -> ExitCode {
    let suite = match config::load_suite(path) {
        Ok(s) => s,
        Err(message) => return validation_failure(&[message]),
    };
    let problems = suite.violations();
    if !problems.is_empty() {
        return validation_failure(&problems);
    }
    let root = cli
        .output_dir
        .clone()
        .or_else(|| suite.output_dir.clone())
        .unwrap_or_else(|| PathBuf::from(config::DEFAULT_OUTPUT_DIR));
    let parallelism = cli.parallelism.or(suite.parallelism).unwrap_or(1);
    execute(&suite, &root, parallelism)
}

fn cmd_replicate(cli: &Cli, name: &str) -> ExitCode {
    let Some(suite) = presets::preset(name) else {
        return validation_failure(&[format!(
            "unknown preset '{name}'; available: {}",
            presets::PRESET_NAMES.join(", ")
        )]);
    };
    let root = cli
        .output_dir
        .clone()
        .unwrap_or_else(|| PathBuf::from(config::DEFAULT_OUTPUT_DIR))
        .join(name);
    execute(&suite, &root, cli.parallelism.unwrap_or(1))
}

fn execute(suite: &SuiteConfig, root: &Path, parallelism: usize) -> ExitCode {
    match runner::run_suite(suite, root, parallelism) {
        Ok(outcomes) => {
            let mut failures = 0;
            for o in &outcomes {
                match &o.status {
                    RunStatus::Ok { final_error, steps } => {
                        println!("{}: ok ({} rounds, final error {:.4})", o.name, steps, final_error);
                    }
                    RunStatus::Failed { message } => {
                        failures += 1;
                        println!("{}: FAILED ({message})", o.name);
                    }
                }
            }
            println!("summary: {}", root.join(SUITE_SUMMARY_FILE).display());
            if failures > 0 {
                eprintln!("{failures} of {} experiments failed", outcomes.len());
                ExitCode::from(EXIT_RUNTIME)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("suite execution failed: {e}");
            ExitCode::from(EXIT_RUNTIME)
        }
    }
}

fn cmd_gen_stream(spec_path: &Path, out: &Path) -> ExitCode {
    let cfg = match config::load_gen_stream(spec_path) {
        Ok(c) => c,
        Err(message) => return validation_failure(&[message]),
    };
    let problems = cfg.violations();
    if !problems.is_empty() {
        return validation_failure(&problems);
    }
    match write_stream_csv(&cfg, out) {
        Ok(rows) => {
            println!("wrote {rows} instances to {}", out.display());
            ExitCode::SUCCESS
        }
        Err(message) => {
            eprintln!("{message}");
            ExitCode::from(EXIT_RUNTIME)
        }
    }
}

/// Writes the stream as `f1..fd,label` rows with a header, via temp +
/// rename. Floats use shortest round-trip formatting, so re-ingesting the
/// file reproduces the exact instance sequence.
fn write_stream_csv(cfg: &GenStreamConfig, out: &Path) -> Result<u64, String> {
    let ctx = |e: &dyn std::fmt::Display| format!("{}: {e}", out.display());
    let (dim, _) = cfg.stream.dimensions().map_err(|e| e.to_string())?;
    let stream = cfg.stream.open(cfg.stream_seed).map_err(|e| e.to_string())?;
    if let Some(parent) = out.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).map_err(|e| ctx(&e))?;
    }
    let file_name = out
        .file_name()
        .and_then(|n| n.to_str())
        .ok_or_else(|| format!("{}: not a file path", out.display()))?;
    let tmp = out.with_file_name(format!("{file_name}.tmp"));
    let mut w = csv::Writer::from_path(&tmp).map_err(|e| ctx(&e))?;
    let mut header: Vec<String> = (1..=dim).map(|i| format!("f{i}")).collect();
    header.push("label".to_string());
    w.write_record(&header).map_err(|e| ctx(&e))?;
    let mut rows = 0u64;
    for item in stream {
        let inst = item.map_err(|e| e.to_string())?;
        let mut record: Vec<String> =
            inst.features.as_slice().iter().map(|x| x.to_string()).collect();
        record.push(inst.label.to_string());
        w.write_record(&record).map_err(|e| ctx(&e))?;
        rows += 1;
    }
    w.flush().map_err(|e| ctx(&e))?;
    drop(w);
    std::fs::rename(&tmp, out).map_err(|e| ctx(&e))?;
    Ok(rows)
}
