//! Fixed-depth online gradient descent baselines: plain, momentum, and
//! Nesterov. These train a network with a single classifier at its deepest
//! layer; with zero hidden layers the same code is the linear baseline.

use serde::{Deserialize, Serialize};

use crate::net::HedgedNetwork;
use crate::numeric::{Matrix, Vector};
use crate::train::hbp::{hidden_gradients, theta_gradient};
use crate::train::{ErrorCounter, OnlineTrainer, StepRecord, TrainError};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BaselineHyperParams {
    pub eta: f64,
    /// Velocity decay μ; 0 disables momentum entirely.
    pub momentum: f64,
    /// Nesterov lookahead: the parameter step becomes `μ·v_new − η·g`
    /// instead of `v_new` (the formulation common in online frameworks).
    pub nesterov: bool,
}

impl Default for BaselineHyperParams {
    fn default() -> Self {
        BaselineHyperParams { eta: 0.01, momentum: 0.0, nesterov: false }
    }
}

impl BaselineHyperParams {
    /// Standard momentum settings: the lower learning rate compensates for
    /// velocity accumulation.
    pub fn momentum_default() -> Self {
        BaselineHyperParams { eta: 0.001, momentum: 0.9, nesterov: false }
    }

    pub fn nesterov_default() -> Self {
        BaselineHyperParams { nesterov: true, ..Self::momentum_default() }
    }

    /// Violations of the config-level invariants; empty means valid.
    pub fn violations(&self) -> Vec<String> {
        let mut v = Vec::new();
        if !(self.eta > 0.0) || !self.eta.is_finite() {
            v.push(format!("eta must be a positive finite number, got {}", self.eta));
        }
        if !(0.0..1.0).contains(&self.momentum) {
            v.push(format!("momentum must lie in [0,1), got {}", self.momentum));
        }
        v
    }

    /// As with the hedged trainer, the step loop tolerates η = 0.
    fn mechanical_violations(&self) -> Vec<String> {
        let mut v = Vec::new();
        if !(self.eta >= 0.0) || !self.eta.is_finite() {
            v.push(format!("eta must be finite and >= 0, got {}", self.eta));
        }
        if !(0.0..1.0).contains(&self.momentum) {
            v.push(format!("momentum must lie in [0,1), got {}", self.momentum));
        }
        v
    }
}

/// Online gradient descent on a single-classifier network.
pub struct OgdTrainer {
    net: HedgedNetwork,
    hp: BaselineHyperParams,
    vel_hidden: Vec<Matrix>,
    vel_classifier: Matrix,
    counter: ErrorCounter,
}

impl OgdTrainer {
    /// Wraps a fixed-depth (single-classifier) network. Hedged networks
    /// belong to the hedged trainer.
    pub fn new(net: HedgedNetwork, hp: BaselineHyperParams) -> Result<Self, TrainError> {
        let mut problems = hp.mechanical_violations();
        if net.num_classifiers() != 1 {
            problems.push(format!(
                "baseline trainer needs exactly one classifier, network has {}",
                net.num_classifiers()
            ));
        }
        if !problems.is_empty() {
            return Err(TrainError::InvalidParams(problems.join("; ")));
        }
        let vel_hidden =
            net.hidden_weights().iter().map(|w| Matrix::zeros(w.rows(), w.cols())).collect();
        let theta = &net.classifier_weights()[0];
        let vel_classifier = Matrix::zeros(theta.rows(), theta.cols());
        Ok(OgdTrainer { net, hp, vel_hidden, vel_classifier, counter: ErrorCounter::default() })
    }

    pub fn hyperparams(&self) -> &BaselineHyperParams {
        &self.hp
    }

    pub fn into_network(self) -> HedgedNetwork {
        self.net
    }

    /// v ← μv − ηg, then steps `weight` by v (or by μv − ηg with Nesterov
    /// lookahead). With μ = 0 both variants reduce to `weight −= ηg`.
    fn apply(hp: &BaselineHyperParams, weight: &mut Matrix, velocity: &mut Matrix, grad: &Matrix) {
        velocity.scale(hp.momentum);
        velocity.accumulate_scaled(grad, -hp.eta);
        if hp.nesterov {
            weight.accumulate_scaled(velocity, hp.momentum);
            weight.accumulate_scaled(grad, -hp.eta);
        } else {
            weight.accumulate_scaled(velocity, 1.0);
        }
    }
}

impl OnlineTrainer for OgdTrainer {
    fn step(&mut self, x: &Vector, y: usize) -> Result<StepRecord, TrainError> {
        if y >= self.net.num_classes() {
            return Err(TrainError::LabelOutOfRange { label: y, num_classes: self.net.num_classes() });
        }
        let cache = self.net.forward(x);
        let predicted = cache.combined.argmax();
        let correct = predicted == y;
        let per_classifier_loss = cache.per_classifier_losses(y);
        let loss = per_classifier_loss[0];
        let round = self.counter.round() + 1;
        if !loss.is_finite() {
            return Err(TrainError::NonFinite {
                quantity: "loss",
                location: "classifier".into(),
                round,
            });
        }

        // α is identically 1 here, so these are the plain backprop gradients.
        let theta_grad = theta_gradient(&self.net, &cache, y, 0);
        let w_grads = hidden_gradients(&self.net, &cache, y);
        if !theta_grad.is_finite() {
            return Err(TrainError::NonFinite {
                quantity: "gradient",
                location: "classifier".into(),
                round,
            });
        }
        for (l, g) in w_grads.iter().enumerate() {
            if !g.is_finite() {
                return Err(TrainError::NonFinite {
                    quantity: "gradient",
                    location: format!("hidden layer {}", l + 1),
                    round,
                });
            }
        }

        Self::apply(&self.hp, self.net.classifier_weight_mut(0), &mut self.vel_classifier, &theta_grad);
        for (l, g) in w_grads.iter().enumerate() {
            Self::apply(&self.hp, self.net.hidden_weight_mut(l), &mut self.vel_hidden[l], g);
        }

        let (round, cumulative_error) = self.counter.record(correct);
        Ok(StepRecord {
            round,
            predicted,
            correct,
            combined_loss: loss,
            per_classifier_loss,
            alpha_snapshot: vec![1.0],
            cumulative_error,
        })
    }

    fn network(&self) -> &HedgedNetwork {
        &self.net
    }
}
