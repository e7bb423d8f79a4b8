//! Prequential (test-then-train) evaluation: run any trainer over any
//! stream, accumulate cumulative and windowed error, and track where the
//! hedge mass sits over time.

pub mod metrics;

use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::net::{HedgedNetwork, InitScheme, NetConfig};
use crate::rng::SeededRng;
use crate::stream::{LabeledInstance, StreamError, StreamSpec};
use crate::train::{BaselineHyperParams, OgdTrainer, OnlineTrainer, StepRecord, TrainError};

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("trainer failed at round {round}: {source}")]
    Train {
        round: u64,
        #[source]
        source: TrainError,
    },
    #[error("stream failed at round {round}: {source}")]
    Stream {
        round: u64,
        #[source]
        source: StreamError,
    },
    #[error("stream produced no instances")]
    EmptyStream,
    #[error("invalid evaluation settings: {0}")]
    InvalidSettings(String),
    #[error("metrics i/o: {0}")]
    Io(#[from] std::io::Error),
}

/// A fractional slice of the stream, e.g. the first half percent or the
/// 60–80% stretch.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SegmentWindow {
    pub start_fraction: f64,
    pub end_fraction: f64,
}

impl SegmentWindow {
    pub fn new(start_fraction: f64, end_fraction: f64) -> Self {
        SegmentWindow { start_fraction, end_fraction }
    }

    /// Violations of `0 <= start < end <= 1`; empty means valid.
    pub fn violations(&self) -> Vec<String> {
        let mut v = Vec::new();
        if !(self.start_fraction >= 0.0)
            || !(self.end_fraction <= 1.0)
            || !(self.start_fraction < self.end_fraction)
        {
            v.push(format!(
                "window must satisfy 0 <= start < end <= 1, got [{}, {}]",
                self.start_fraction, self.end_fraction
            ));
        }
        v
    }

    /// Round `t` (1-indexed) belongs to the window iff
    /// `start·T < t ≤ end·T`. Products within 1e-6 of an integer snap to
    /// it, so decimal fractions of round totals behave exactly: window
    /// [0.10, 0.15] of T=1000 is precisely rounds 101..=150.
    pub fn contains(&self, round: u64, total: u64) -> bool {
        let t = round as f64;
        boundary(self.start_fraction, total) < t && t <= boundary(self.end_fraction, total)
    }

    /// Stable text form used in file headers and summaries.
    pub fn label(&self) -> String {
        format!("{}..{}", self.start_fraction, self.end_fraction)
    }
}

fn boundary(fraction: f64, total: u64) -> f64 {
    let x = fraction * total as f64;
    let r = x.round();
    if (x - r).abs() < 1e-6 {
        r
    } else {
        x
    }
}

/// Hedge-weight snapshot at one round.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AlphaSnapshot {
    pub round: u64,
    pub alphas: Vec<f64>,
}

/// Windowed error, `None` when the window contains no rounds.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct WindowError {
    pub window: SegmentWindow,
    pub error: Option<f64>,
}

/// Everything a prequential run produces.
#[derive(Clone, Debug)]
pub struct ExperimentResult {
    pub final_cumulative_error: f64,
    pub window_errors: Vec<WindowError>,
    /// Downsampled hedge-weight history: round 1, then every
    /// `alpha_log_stride`-th round.
    pub alpha_trajectory: Vec<AlphaSnapshot>,
    pub wall_time: Duration,
    pub step_count: u64,
}

/// Runs the full prequential protocol: for each instance predict, reveal
/// the label, update, never the other way around. Windowed errors count
/// mistakes only among rounds falling inside each window.
pub fn run_prequential<T, I>(
    trainer: &mut T,
    stream: I,
    windows: &[SegmentWindow],
    alpha_log_stride: u64,
) -> Result<ExperimentResult, EvalError>
where
    T: OnlineTrainer + ?Sized,
    I: IntoIterator<Item = Result<LabeledInstance, StreamError>>,
{
    run_prequential_with(trainer, stream, windows, alpha_log_stride, |_| Ok(()))
}

/// [`run_prequential`] with a per-step sink (used to stream metrics rows to
/// disk without buffering the whole run).
pub fn run_prequential_with<T, I, F>(
    trainer: &mut T,
    stream: I,
    windows: &[SegmentWindow],
    alpha_log_stride: u64,
    mut on_step: F,
) -> Result<ExperimentResult, EvalError>
where
    T: OnlineTrainer + ?Sized,
    I: IntoIterator<Item = Result<LabeledInstance, StreamError>>,
    F: FnMut(&StepRecord) -> std::io::Result<()>,
{
    if alpha_log_stride == 0 {
        return Err(EvalError::InvalidSettings("alpha_log_stride must be >= 1".to_string()));
    }
    for w in windows {
        let problems = w.violations();
        if !problems.is_empty() {
            return Err(EvalError::InvalidSettings(problems.join("; ")));
        }
    }
    let start = Instant::now();
    let mut correct_flags: Vec<bool> = Vec::new();
    let mut alpha_trajectory = Vec::new();
    let mut final_error = 0.0;
    for (i, item) in stream.into_iter().enumerate() {
        let round = i as u64 + 1;
        let inst = item.map_err(|source| EvalError::Stream { round, source })?;
        let rec = trainer
            .step(&inst.features, inst.label)
            .map_err(|source| EvalError::Train { round, source })?;
        debug_assert_eq!(rec.round, round, "trainer must count rounds from 1");
        if round == 1 || round % alpha_log_stride == 0 {
            alpha_trajectory
                .push(AlphaSnapshot { round, alphas: rec.alpha_snapshot.clone() });
        }
        correct_flags.push(rec.correct);
        final_error = rec.cumulative_error;
        on_step(&rec)?;
    }
    let total = correct_flags.len() as u64;
    if total == 0 {
        return Err(EvalError::EmptyStream);
    }
    let window_errors = windows
        .iter()
        .map(|&window| {
            let mut rounds = 0u64;
            let mut mistakes = 0u64;
            for (i, &ok) in correct_flags.iter().enumerate() {
                if window.contains(i as u64 + 1, total) {
                    rounds += 1;
                    if !ok {
                        mistakes += 1;
                    }
                }
            }
            WindowError {
                window,
                error: (rounds > 0).then(|| mistakes as f64 / rounds as f64),
            }
        })
        .collect();
    Ok(ExperimentResult {
        final_cumulative_error: final_error,
        window_errors,
        alpha_trajectory,
        wall_time: start.elapsed(),
        step_count: total,
    })
}

/// Σ depth·α over a hedge snapshot: a scalar for where the mixture mass
/// sits. `depths[k]` is the attachment depth of classifier `k`.
pub fn expected_depth(alphas: &[f64], depths: &[usize]) -> f64 {
    assert_eq!(alphas.len(), depths.len(), "one depth per hedge weight");
    debug_assert!((alphas.iter().sum::<f64>() - 1.0).abs() < 1e-6);
    alphas.iter().zip(depths).map(|(&a, &d)| a * d as f64).sum()
}

/// One row of the depth-sweep table.
#[derive(Clone, Debug)]
pub struct DepthSweepRow {
    pub depth: usize,
    pub final_cumulative_error: f64,
    pub window_errors: Vec<WindowError>,
}

/// Trains one fixed-depth baseline per depth on identical replicas of the
/// stream (same seeds throughout) and tabulates windowed errors — the
/// "which depth wins, and when" experiment.
#[allow(clippy::too_many_arguments)]
pub fn depth_dilemma_experiment(
    depths: &[usize],
    width: usize,
    spec: &StreamSpec,
    hp: &BaselineHyperParams,
    windows: &[SegmentWindow],
    stream_seed: u64,
    init_seed: u64,
) -> Result<Vec<DepthSweepRow>, EvalError> {
    let (input_dim, num_classes) =
        spec.dimensions().map_err(|source| EvalError::Stream { round: 0, source })?;
    let mut rows = Vec::with_capacity(depths.len());
    for &depth in depths {
        let config = NetConfig::new(input_dim, vec![width; depth], num_classes);
        let net = HedgedNetwork::init_fixed_depth(
            &config,
            InitScheme::relu_default(),
            &mut SeededRng::new(init_seed),
        )
        .map_err(|e| EvalError::InvalidSettings(e.to_string()))?;
        let mut trainer = OgdTrainer::new(net, *hp)
            .map_err(|source| EvalError::Train { round: 0, source })?;
        let stream =
            spec.open(stream_seed).map_err(|source| EvalError::Stream { round: 0, source })?;
        let result = run_prequential(&mut trainer, stream, windows, u64::MAX)?;
        rows.push(DepthSweepRow {
            depth,
            final_cumulative_error: result.final_cumulative_error,
            window_errors: result.window_errors,
        });
    }
    Ok(rows)
}
