//! Online training loops: the hedged multi-depth trainer and the
//! fixed-depth baselines. One labeled instance per step, predict before
//! update, no batching.

mod hbp;
mod hedge;
mod ogd;

pub use hbp::{hidden_gradient, hidden_gradients, theta_gradient, HbpHyperParams, HbpTrainer};
pub use hedge::{hedge_regret_audit, hedge_update, tuned_discount, RegretAudit};
pub use ogd::{BaselineHyperParams, OgdTrainer};

use thiserror::Error;

use crate::net::HedgedNetwork;
use crate::numeric::Vector;

#[derive(Debug, Error)]
pub enum TrainError {
    #[error("invalid hyperparameters: {0}")]
    InvalidParams(String),
    #[error("non-finite {quantity} in {location} at round {round}")]
    NonFinite { quantity: &'static str, location: String, round: u64 },
    #[error("label {label} out of range for {num_classes} classes")]
    LabelOutOfRange { label: usize, num_classes: usize },
}

/// Telemetry from one online step. `alpha_snapshot` holds the hedge weights
/// that were in force when the prediction was made, i.e. before this step's
/// hedge update.
#[derive(Clone, Debug)]
pub struct StepRecord {
    /// 1-indexed round counter.
    pub round: u64,
    pub predicted: usize,
    pub correct: bool,
    /// Hedge-weighted sum of the per-classifier losses.
    pub combined_loss: f64,
    /// Raw (unclipped) cross-entropy of each attached classifier.
    pub per_classifier_loss: Vec<f64>,
    pub alpha_snapshot: Vec<f64>,
    /// Fraction of mistaken predictions over rounds 1..=round.
    pub cumulative_error: f64,
}

/// Anything that consumes one labeled instance per round: predict, then
/// update, then report. Steps are strictly sequential; a trainer owns its
/// network exclusively.
pub trait OnlineTrainer {
    fn step(&mut self, x: &Vector, y: usize) -> Result<StepRecord, TrainError>;

    fn network(&self) -> &HedgedNetwork;

    fn input_dim(&self) -> usize {
        self.network().input_dim()
    }

    fn num_classes(&self) -> usize {
        self.network().num_classes()
    }
}

/// Shared mistake counter so both trainers report cumulative error the same
/// way.
#[derive(Clone, Copy, Debug, Default)]
struct ErrorCounter {
    round: u64,
    mistakes: u64,
}

impl ErrorCounter {
    /// Advances to the next round, returning (round, cumulative_error).
    fn record(&mut self, correct: bool) -> (u64, f64) {
        self.round += 1;
        if !correct {
            self.mistakes += 1;
        }
        (self.round, self.mistakes as f64 / self.round as f64)
    }

    fn round(&self) -> u64 {
        self.round
    }
}
