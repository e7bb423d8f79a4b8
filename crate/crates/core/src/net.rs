//! The hedged network: a stack of fully connected hidden layers with a
//! softmax classifier attached at one or more depths, plus a hedge weight
//! per classifier. The combined prediction is the hedge-weighted mixture of
//! all attached classifiers. A network with a single classifier at the top
//! is an ordinary fixed-depth net and is what the baselines train.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numeric::{cross_entropy, softmax, Matrix, Vector};
use crate::rng::SeededRng;

#[derive(Debug, Error)]
pub enum NetError {
    #[error("invalid network config: {0}")]
    InvalidConfig(String),
}

/// Hidden-layer activation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Activation {
    Relu,
    Tanh,
}

impl Activation {
    pub fn apply_in_place(self, v: &mut [f64]) {
        match self {
            Activation::Relu => {
                for x in v {
                    // Not f64::max: NaN must propagate so poisoned weights
                    // get reported rather than silently zeroed.
                    if *x < 0.0 {
                        *x = 0.0;
                    }
                }
            }
            Activation::Tanh => {
                for x in v {
                    *x = x.tanh();
                }
            }
        }
    }

    /// Derivative expressed through the activation *output*. For ReLU the
    /// subgradient at 0 is 0.
    pub fn grad_from_output(self, y: f64) -> f64 {
        match self {
            Activation::Relu => {
                if y > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Activation::Tanh => 1.0 - y * y,
        }
    }
}

/// Architecture of a network before any weights exist.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NetConfig {
    pub input_dim: usize,
    pub hidden_widths: Vec<usize>,
    pub num_classes: usize,
    pub activation: Activation,
    /// When true, hedged networks also attach a classifier directly to the
    /// raw input (depth 0).
    pub attach_input_classifier: bool,
}

impl NetConfig {
    pub fn new(input_dim: usize, hidden_widths: Vec<usize>, num_classes: usize) -> Self {
        NetConfig {
            input_dim,
            hidden_widths,
            num_classes,
            activation: Activation::Relu,
            attach_input_classifier: false,
        }
    }

    /// Number of hidden layers.
    pub fn depth(&self) -> usize {
        self.hidden_widths.len()
    }

    /// Width of the representation at depth `l` (depth 0 is the input).
    pub fn width_at(&self, l: usize) -> usize {
        if l == 0 {
            self.input_dim
        } else {
            self.hidden_widths[l - 1]
        }
    }

    fn validate(&self) -> Result<(), NetError> {
        let mut problems = Vec::new();
        if self.input_dim == 0 {
            problems.push("input_dim must be >= 1".to_string());
        }
        if self.num_classes < 2 {
            problems.push(format!("num_classes must be >= 2, got {}", self.num_classes));
        }
        for (i, &w) in self.hidden_widths.iter().enumerate() {
            if w == 0 {
                problems.push(format!("hidden layer {} has width 0", i + 1));
            }
        }
        if self.hidden_widths.is_empty() && !self.attach_input_classifier {
            problems.push(
                "network with no hidden layers needs attach_input_classifier=true".to_string(),
            );
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(NetError::InvalidConfig(problems.join("; ")))
        }
    }
}

/// Weight initialization scheme.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitScheme {
    /// Zero-mean Gaussian with std `gain / sqrt(fan_in)`; biases start at 0.
    /// `gain = sqrt(2)` is the usual ReLU scaling, `gain = 1` suits tanh.
    FanInGaussian { gain: f64 },
}

impl InitScheme {
    pub fn relu_default() -> Self {
        InitScheme::FanInGaussian { gain: std::f64::consts::SQRT_2 }
    }

    pub fn tanh_default() -> Self {
        InitScheme::FanInGaussian { gain: 1.0 }
    }

    /// Draws an `out x (fan_in + 1)` affine matrix, bias column zero. Entries
    /// are drawn row-major, bias entries consume no draws.
    fn draw(&self, out: usize, fan_in: usize, rng: &mut SeededRng) -> Matrix {
        let InitScheme::FanInGaussian { gain } = *self;
        let std = gain / (fan_in as f64).sqrt();
        let mut m = Matrix::zeros(out, fan_in + 1);
        for r in 0..out {
            for c in 0..fan_in {
                m.set(r, c, std * rng.normal());
            }
        }
        m
    }
}

/// Everything a forward pass produces for one input: each hidden
/// representation, each attached classifier's distribution, and their
/// hedge-weighted combination.
#[derive(Clone, Debug)]
pub struct ForwardCache {
    /// `hidden[l]` is the representation at depth `l`; `hidden[0]` is the input.
    pub hidden: Vec<Vector>,
    /// One probability distribution per attached classifier, in depth order.
    pub classifier_outputs: Vec<Vector>,
    /// Hedge-weighted mixture of the classifier outputs.
    pub combined: Vector,
}

impl ForwardCache {
    /// Raw cross-entropy of every attached classifier against `label`.
    pub fn per_classifier_losses(&self, label: usize) -> Vec<f64> {
        self.classifier_outputs.iter().map(|f| cross_entropy(f, label)).collect()
    }
}

/// A feedforward network with classifiers attached at `classifier_depths`
/// and one hedge weight per classifier.
#[derive(Clone, Debug, PartialEq)]
pub struct HedgedNetwork {
    config: NetConfig,
    classifier_depths: Vec<usize>,
    hidden_weights: Vec<Matrix>,
    classifier_weights: Vec<Matrix>,
    hedge_weights: Vector,
}

impl HedgedNetwork {
    /// Builds a hedged network with a classifier at every hidden depth
    /// (plus depth 0 when `attach_input_classifier` is set) and uniform
    /// hedge weights. Hidden matrices are drawn first (shallow to deep),
    /// then classifier matrices in depth order.
    pub fn init_hedged(
        config: &NetConfig,
        scheme: InitScheme,
        rng: &mut SeededRng,
    ) -> Result<Self, NetError> {
        config.validate()?;
        let mut depths: Vec<usize> = Vec::new();
        if config.attach_input_classifier {
            depths.push(0);
        }
        depths.extend(1..=config.depth());
        Self::init_with_depths(config, depths, scheme, rng)
    }

    /// Builds a network with a single classifier at the deepest layer; with
    /// no hidden layers this is a plain linear softmax model.
    pub fn init_fixed_depth(
        config: &NetConfig,
        scheme: InitScheme,
        rng: &mut SeededRng,
    ) -> Result<Self, NetError> {
        config.validate()?;
        Self::init_with_depths(config, vec![config.depth()], scheme, rng)
    }

    fn init_with_depths(
        config: &NetConfig,
        depths: Vec<usize>,
        scheme: InitScheme,
        rng: &mut SeededRng,
    ) -> Result<Self, NetError> {
        assert!(!depths.is_empty());
        let hidden_weights: Vec<Matrix> = (1..=config.depth())
            .map(|l| scheme.draw(config.width_at(l), config.width_at(l - 1), rng))
            .collect();
        let classifier_weights: Vec<Matrix> = depths
            .iter()
            .map(|&l| scheme.draw(config.num_classes, config.width_at(l), rng))
            .collect();
        let k = depths.len();
        let hedge_weights = Vector::from_vec(vec![1.0 / k as f64; k]);
        Ok(HedgedNetwork {
            config: config.clone(),
            classifier_depths: depths,
            hidden_weights,
            classifier_weights,
            hedge_weights,
        })
    }

    /// Reassembles a network from parts, validating shapes. Used by
    /// checkpoint loading.
    pub(crate) fn from_parts(
        config: NetConfig,
        classifier_depths: Vec<usize>,
        hidden_weights: Vec<Matrix>,
        classifier_weights: Vec<Matrix>,
        hedge_weights: Vector,
    ) -> Result<Self, NetError> {
        config.validate()?;
        let err = |msg: String| Err(NetError::InvalidConfig(msg));
        if classifier_depths.is_empty() {
            return err("no classifiers attached".into());
        }
        if hidden_weights.len() != config.depth() {
            return err(format!(
                "expected {} hidden matrices, got {}",
                config.depth(),
                hidden_weights.len()
            ));
        }
        for (i, m) in hidden_weights.iter().enumerate() {
            let (want_r, want_c) = (config.width_at(i + 1), config.width_at(i) + 1);
            if m.rows() != want_r || m.cols() != want_c {
                return err(format!(
                    "hidden matrix {} is {}x{}, expected {}x{}",
                    i + 1,
                    m.rows(),
                    m.cols(),
                    want_r,
                    want_c
                ));
            }
        }
        if classifier_weights.len() != classifier_depths.len()
            || hedge_weights.len() != classifier_depths.len()
        {
            return err("classifier count mismatch".into());
        }
        for (&d, m) in classifier_depths.iter().zip(&classifier_weights) {
            if d > config.depth() {
                return err(format!("classifier depth {} exceeds network depth", d));
            }
            if m.rows() != config.num_classes || m.cols() != config.width_at(d) + 1 {
                return err(format!("classifier at depth {} has shape {}x{}", d, m.rows(), m.cols()));
            }
        }
        Ok(HedgedNetwork {
            config,
            classifier_depths,
            hidden_weights,
            classifier_weights,
            hedge_weights,
        })
    }

    pub fn config(&self) -> &NetConfig {
        &self.config
    }

    pub fn input_dim(&self) -> usize {
        self.config.input_dim
    }

    pub fn num_classes(&self) -> usize {
        self.config.num_classes
    }

    /// Depths (0 = input) at which classifiers are attached, ascending.
    pub fn classifier_depths(&self) -> &[usize] {
        &self.classifier_depths
    }

    pub fn num_classifiers(&self) -> usize {
        self.classifier_depths.len()
    }

    pub fn hidden_weights(&self) -> &[Matrix] {
        &self.hidden_weights
    }

    pub fn hidden_weight_mut(&mut self, l: usize) -> &mut Matrix {
        &mut self.hidden_weights[l]
    }

    pub fn classifier_weights(&self) -> &[Matrix] {
        &self.classifier_weights
    }

    pub fn classifier_weight_mut(&mut self, k: usize) -> &mut Matrix {
        &mut self.classifier_weights[k]
    }

    pub fn hedge_weights(&self) -> &Vector {
        &self.hedge_weights
    }

    /// Replaces the hedge weights. They must be nonnegative and sum to 1
    /// within 1e-9.
    pub fn set_hedge_weights(&mut self, weights: Vector) {
        assert_eq!(weights.len(), self.num_classifiers(), "hedge weight count mismatch");
        assert!(
            weights.iter().all(|&a| a >= 0.0) && (weights.sum() - 1.0).abs() < 1e-9,
            "hedge weights must be a distribution, got sum {}",
            weights.sum()
        );
        self.hedge_weights = weights;
    }

    /// Full forward pass: every hidden representation, every classifier
    /// distribution, and the combined prediction.
    pub fn forward(&self, x: &Vector) -> ForwardCache {
        assert_eq!(
            x.len(),
            self.config.input_dim,
            "input length {} does not match input_dim {}",
            x.len(),
            self.config.input_dim
        );
        let mut hidden = Vec::with_capacity(self.config.depth() + 1);
        hidden.push(x.clone());
        for w in &self.hidden_weights {
            let mut z = w.affine_apply(hidden.last().unwrap());
            self.config.activation.apply_in_place(z.as_mut_slice());
            hidden.push(z);
        }
        let classifier_outputs: Vec<Vector> = self
            .classifier_depths
            .iter()
            .zip(&self.classifier_weights)
            .map(|(&d, theta)| softmax(&theta.affine_apply(&hidden[d])))
            .collect();
        let mut combined = Vector::zeros(self.config.num_classes);
        for (f, &a) in classifier_outputs.iter().zip(self.hedge_weights.iter()) {
            for c in 0..combined.len() {
                combined[c] += a * f[c];
            }
        }
        ForwardCache { hidden, classifier_outputs, combined }
    }

    /// Predicted class: argmax of the combined distribution, ties to the
    /// lowest class index.
    pub fn predict(&self, x: &Vector) -> usize {
        self.forward(x).combined.argmax()
    }

    /// True when every weight entry is finite.
    pub fn is_finite(&self) -> bool {
        self.hidden_weights.iter().all(Matrix::is_finite)
            && self.classifier_weights.iter().all(Matrix::is_finite)
            && self.hedge_weights.is_finite()
    }
}
