//! Suite execution: fan experiments out to a bounded worker pool, write
//! per-run artifacts through `RunWriter`, then aggregate the suite tables.
//! One experiment failing is recorded and does not stop the others.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use serde_json::json;

use odl_core::{
    expected_depth, run_prequential_with, Activation, ExperimentResult, HbpTrainer,
    HedgedNetwork, InitScheme, NetConfig, OgdTrainer, OnlineTrainer, RunWriter, SeededRng,
};

use crate::config::{ExperimentConfig, ModelConfig, SuiteConfig};

pub const SUITE_SUMMARY_FILE: &str = "suite_summary.csv";
pub const WINDOW_ERRORS_FILE: &str = "window_errors.csv";

#[derive(Clone, Debug)]
pub enum RunStatus {
    Ok { final_error: f64, steps: u64 },
    Failed { message: String },
}

#[derive(Clone, Debug)]
pub struct ExperimentOutcome {
    pub name: String,
    pub status: RunStatus,
    /// Per-window errors, empty on failure.
    pub window_errors: Vec<(f64, f64, Option<f64>)>,
}

impl ExperimentOutcome {
    pub fn failed(&self) -> bool {
        matches!(self.status, RunStatus::Failed { .. })
    }
}

/// Builds the trainer an experiment declares, with dimensions taken from
/// its stream.
pub fn build_trainer(
    exp: &ExperimentConfig,
    input_dim: usize,
    num_classes: usize,
) -> Result<Box<dyn OnlineTrainer>, String> {
    let mut rng = SeededRng::new(exp.seeds.init_seed);
    match &exp.model {
        ModelConfig::Hbp { depth, width, hyperparams } => {
            let config = NetConfig::new(input_dim, vec![*width; *depth], num_classes);
            let net = HedgedNetwork::init_hedged(&config, InitScheme::relu_default(), &mut rng)
                .map_err(|e| e.to_string())?;
            Ok(Box::new(HbpTrainer::new(net, *hyperparams).map_err(|e| e.to_string())?))
        }
        ModelConfig::Ogd { depth, width, hyperparams } => {
            let config = NetConfig::new(input_dim, vec![*width; *depth], num_classes);
            let net =
                HedgedNetwork::init_fixed_depth(&config, InitScheme::relu_default(), &mut rng)
                    .map_err(|e| e.to_string())?;
            Ok(Box::new(OgdTrainer::new(net, *hyperparams).map_err(|e| e.to_string())?))
        }
        ModelConfig::Linear { hyperparams } => {
            let config = NetConfig {
                activation: Activation::Relu,
                attach_input_classifier: true,
                ..NetConfig::new(input_dim, vec![], num_classes)
            };
            let net =
                HedgedNetwork::init_fixed_depth(&config, InitScheme::relu_default(), &mut rng)
                    .map_err(|e| e.to_string())?;
            Ok(Box::new(OgdTrainer::new(net, *hyperparams).map_err(|e| e.to_string())?))
        }
    }
}

/// Runs one experiment to completion, writing metrics.csv / alphas.csv /
/// summary.json into `dir`. On error the partial outputs are cleaned up by
/// the writer and the message is returned.
pub fn run_experiment(exp: &ExperimentConfig, dir: &Path) -> Result<ExperimentResult, String> {
    let (input_dim, num_classes) = exp.stream.dimensions().map_err(|e| e.to_string())?;
    let mut trainer = build_trainer(exp, input_dim, num_classes)?;
    let depths = trainer.network().classifier_depths().to_vec();
    let mut writer =
        RunWriter::create(dir, depths.len()).map_err(|e| format!("{}: {e}", dir.display()))?;
    let stream = exp.stream.open(exp.seeds.stream_seed).map_err(|e| e.to_string())?;
    let stride = exp.alpha_log_stride;
    let result = run_prequential_with(&mut *trainer, stream, &exp.windows, stride, |rec| {
        writer.write_step(rec)?;
        if rec.round == 1 || rec.round % stride == 0 {
            writer.write_alphas(rec.round, &rec.alpha_snapshot)?;
        }
        Ok(())
    })
    .map_err(|e| e.to_string())?;

    let final_alphas = trainer.network().hedge_weights().as_slice().to_vec();
    let summary = json!({
        "name": exp.name,
        "config": serde_json::to_value(exp).map_err(|e| e.to_string())?,
        "step_count": result.step_count,
        "final_cumulative_error": result.final_cumulative_error,
        "window_errors": result
            .window_errors
            .iter()
            .map(|w| {
                json!({
                    "start_fraction": w.window.start_fraction,
                    "end_fraction": w.window.end_fraction,
                    "error": w.error,
                })
            })
            .collect::<Vec<_>>(),
        "classifier_depths": depths,
        "final_alphas": final_alphas,
        "final_expected_depth": expected_depth(&final_alphas, &depths),
    });
    writer.finalize(&summary).map_err(|e| format!("{}: {e}", dir.display()))?;
    Ok(result)
}

/// Runs the whole suite with `parallelism` workers and writes the suite
/// tables under `output_root`. Outcomes come back in config order.
pub fn run_suite(
    suite: &SuiteConfig,
    output_root: &Path,
    parallelism: usize,
) -> io::Result<Vec<ExperimentOutcome>> {
    fs::create_dir_all(output_root)?;
    let n = suite.experiments.len();
    let slots: Vec<Mutex<Option<ExperimentOutcome>>> =
        (0..n).map(|_| Mutex::new(None)).collect();
    let next = AtomicUsize::new(0);
    let workers = parallelism.clamp(1, n.max(1));
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= n {
                    break;
                }
                let exp = &suite.experiments[i];
                let dir = exp.run_dir(output_root);
                log::info!("running experiment '{}' -> {}", exp.name, dir.display());
                let outcome = match run_experiment(exp, &dir) {
                    Ok(result) => ExperimentOutcome {
                        name: exp.name.clone(),
                        status: RunStatus::Ok {
                            final_error: result.final_cumulative_error,
                            steps: result.step_count,
                        },
                        window_errors: result
                            .window_errors
                            .iter()
                            .map(|w| {
                                (w.window.start_fraction, w.window.end_fraction, w.error)
                            })
                            .collect(),
                    },
                    Err(message) => {
                        log::error!("experiment '{}' failed: {message}", exp.name);
                        ExperimentOutcome {
                            name: exp.name.clone(),
                            status: RunStatus::Failed { message },
                            window_errors: vec![],
                        }
                    }
                };
                *slots[i].lock().unwrap() = Some(outcome);
            });
        }
    });
    let outcomes: Vec<ExperimentOutcome> =
        slots.into_iter().map(|s| s.into_inner().unwrap().unwrap()).collect();
    write_suite_tables(output_root, &outcomes)?;
    Ok(outcomes)
}

/// `suite_summary.csv`: one row per experiment, config order. Failed rows
/// keep their message in the last column.
fn write_suite_tables(root: &Path, outcomes: &[ExperimentOutcome]) -> io::Result<()> {
    let mut summary = csv::Writer::from_writer(Vec::new());
    summary
        .write_record(["name", "status", "steps", "final_error", "message"])
        .map_err(io_err)?;
    for o in outcomes {
        match &o.status {
            RunStatus::Ok { final_error, steps } => summary
                .write_record([
                    o.name.as_str(),
                    "ok",
                    &steps.to_string(),
                    &final_error.to_string(),
                    "",
                ])
                .map_err(io_err)?,
            RunStatus::Failed { message } => summary
                .write_record([o.name.as_str(), "failed", "", "", message])
                .map_err(io_err)?,
        }
    }
    write_atomic(&root.join(SUITE_SUMMARY_FILE), &summary.into_inner().map_err(io_err)?)?;

    let mut windows = csv::Writer::from_writer(Vec::new());
    windows
        .write_record(["name", "window_start", "window_end", "error"])
        .map_err(io_err)?;
    for o in outcomes {
        for (start, end, error) in &o.window_errors {
            windows
                .write_record([
                    o.name.as_str(),
                    &start.to_string(),
                    &end.to_string(),
                    &error.map(|e| e.to_string()).unwrap_or_default(),
                ])
                .map_err(io_err)?;
        }
    }
    write_atomic(&root.join(WINDOW_ERRORS_FILE), &windows.into_inner().map_err(io_err)?)
}

fn io_err<E: std::error::Error + Send + Sync + 'static>(e: E) -> io::Error {
    io::Error::new(io::ErrorKind::Other, e)
}

/// Whole-file replace via temp + rename, so the suite tables are never torn.
fn write_atomic(path: &Path, bytes: &[u8]) -> io::Result<()> {
    let file_name = path
        .file_name()
        .and_then(|n| n.to_str())
        .ok_or_else(|| io::Error::new(io::ErrorKind::InvalidInput, "bad path"))?;
    let tmp: PathBuf = path.with_file_name(format!("{file_name}.tmp"));
    fs::write(&tmp, bytes)?;
    fs::rename(&tmp, path)
}
