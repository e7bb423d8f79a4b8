//! Synthetic labeling functions: a randomly initialized tanh network whose
//! argmax output labels each input. Tanh rather than ReLU because deep
//! random ReLU nets frequently collapse to a constant label; tanh keeps
//! the decision surface nontrivial even at depth 8.

use serde::{Deserialize, Serialize};

use crate::net::{Activation, HedgedNetwork, InitScheme, NetConfig};
use crate::numeric::Vector;
use crate::rng::SeededRng;
use crate::stream::StreamError;

/// Weight scale for the generator network (std = gain / sqrt(fan_in)).
/// Gain 1 keeps a tanh net near its linear regime and the resulting labels
/// are learnable by a shallow net; 2 pushes each layer into saturation, so
/// the decision surface actually gains complexity with depth.
const GENERATOR_GAIN: f64 = 2.0;

/// How many inputs to probe when checking the label distribution.
const BALANCE_PROBE: usize = 10_000;

/// Minimum per-class frequency over the probe; below this the concept is
/// considered degenerate and rebuilt from a derived seed.
const BALANCE_MIN_FRACTION: f64 = 0.05;

const BALANCE_MAX_ATTEMPTS: u32 = 16;

/// Recipe for one synthetic labeling function.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConceptSpec {
    pub input_dim: usize,
    pub hidden_layers: usize,
    pub width: usize,
    pub num_classes: usize,
    pub seed: u64,
    /// Probability of replacing the clean label with a uniformly chosen
    /// other class.
    #[serde(default)]
    pub label_noise: f64,
}

impl ConceptSpec {
    /// Violations of the spec-level invariants; empty means valid.
    pub fn violations(&self) -> Vec<String> {
        let mut v = Vec::new();
        if self.input_dim == 0 {
            v.push("concept input_dim must be >= 1".to_string());
        }
        if self.num_classes < 2 {
            v.push(format!("concept num_classes must be >= 2, got {}", self.num_classes));
        }
        if self.hidden_layers > 0 && self.width == 0 {
            v.push("concept width must be >= 1 when hidden_layers > 0".to_string());
        }
        if !(0.0..1.0).contains(&self.label_noise) {
            v.push(format!("label_noise must lie in [0,1), got {}", self.label_noise));
        }
        v
    }
}

/// A built labeling function. Labels are deterministic: the same feature
/// vector always maps to the same class (noise is applied by the stream,
/// not here).
#[derive(Clone, Debug)]
pub struct Concept {
    spec: ConceptSpec,
    net: HedgedNetwork,
}

impl Concept {
    /// Builds the generator network from `spec.seed`. If the label
    /// distribution over a fixed probe set leaves some class under 5%,
    /// rebuilds from a derived seed, up to a bounded number of attempts.
    pub fn build(spec: &ConceptSpec) -> Result<Concept, StreamError> {
        let problems = spec.violations();
        if !problems.is_empty() {
            return Err(StreamError::InvalidSpec(problems.join("; ")));
        }
        let config = NetConfig {
            input_dim: spec.input_dim,
            hidden_widths: vec![spec.width; spec.hidden_layers],
            num_classes: spec.num_classes,
            activation: Activation::Tanh,
            attach_input_classifier: spec.hidden_layers == 0,
        };
        let base = SeededRng::new(spec.seed);
        for attempt in 0..BALANCE_MAX_ATTEMPTS {
            let mut init_rng =
                if attempt == 0 { SeededRng::new(spec.seed) } else { base.derive(attempt as u64) };
            let net = HedgedNetwork::init_fixed_depth(
                &config,
                InitScheme::FanInGaussian { gain: GENERATOR_GAIN },
                &mut init_rng,
            )
            .expect("validated config");
            let candidate = Concept { spec: spec.clone(), net };
            if candidate.is_balanced() {
                return Ok(candidate);
            }
        }
        Err(StreamError::DegenerateConcept { seed: spec.seed, attempts: BALANCE_MAX_ATTEMPTS })
    }

    pub fn spec(&self) -> &ConceptSpec {
        &self.spec
    }

    /// The clean label for `x`: argmax of the generator's output.
    pub fn label(&self, x: &Vector) -> usize {
        self.net.predict(x)
    }

    /// Probes the label distribution on inputs drawn from a seed derived
    /// from the concept seed (independent of any stream's feature RNG).
    fn is_balanced(&self) -> bool {
        let mut rng = SeededRng::new(self.spec.seed).derive(0xBA1A);
        let mut counts = vec![0u64; self.spec.num_classes];
        for _ in 0..BALANCE_PROBE {
            let x = Vector::from_vec(
                (0..self.spec.input_dim).map(|_| rng.uniform_in(-1.0, 1.0)).collect(),
            );
            counts[self.label(&x)] += 1;
        }
        let min = (BALANCE_MIN_FRACTION * BALANCE_PROBE as f64) as u64;
        counts.iter().all(|&c| c >= min)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(seed: u64) -> ConceptSpec {
        ConceptSpec {
            input_dim: 10,
            hidden_layers: 3,
            width: 8,
            num_classes: 2,
            seed,
            label_noise: 0.0,
        }
    }

    #[test]
    fn same_spec_same_labels() {
        let a = Concept::build(&spec(1)).unwrap();
        let b = Concept::build(&spec(1)).unwrap();
        let mut rng = SeededRng::new(3);
        for _ in 0..200 {
            let x = Vector::from_vec((0..10).map(|_| rng.uniform_in(-1.0, 1.0)).collect());
            assert_eq!(a.label(&x), b.label(&x));
        }
    }

    #[test]
    fn labels_are_stationary() {
        let c = Concept::build(&spec(2)).unwrap();
        let x = Vector::from_vec((0..10).map(|i| (i as f64) / 10.0 - 0.5).collect());
        let first = c.label(&x);
        for _ in 0..10 {
            assert_eq!(c.label(&x), first);
        }
    }

    #[test]
    fn deep_recipe_stays_balanced() {
        // The headline generator shape: 50 inputs, 8 hidden layers, 2
        // classes. Probe a fresh sample, not the one used internally.
        let deep = ConceptSpec {
            input_dim: 50,
            hidden_layers: 8,
            width: 32,
            num_classes: 2,
            seed: 41,
            label_noise: 0.0,
        };
        let c = Concept::build(&deep).unwrap();
        let mut rng = SeededRng::new(99);
        let n = 4000;
        let mut ones = 0;
        for _ in 0..n {
            let x = Vector::from_vec((0..50).map(|_| rng.uniform_in(-1.0, 1.0)).collect());
            ones += c.label(&x);
        }
        let frac = ones as f64 / n as f64;
        assert!(frac > 0.04 && frac < 0.96, "class-1 fraction {}", frac);
    }

    #[test]
    fn linear_concept_without_hidden_layers() {
        let lin = ConceptSpec { hidden_layers: 0, width: 0, ..spec(7) };
        let c = Concept::build(&lin).unwrap();
        let x = Vector::from_vec(vec![0.5; 10]);
        assert!(c.label(&x) < 2);
    }

    #[test]
    fn rejects_invalid_specs() {
        assert!(Concept::build(&ConceptSpec { num_classes: 1, ..spec(1) }).is_err());
        assert!(Concept::build(&ConceptSpec { input_dim: 0, ..spec(1) }).is_err());
        assert!(Concept::build(&ConceptSpec { label_noise: 1.0, ..spec(1) }).is_err());
        assert!(Concept::build(&ConceptSpec { label_noise: -0.1, ..spec(1) }).is_err());
    }

    #[test]
    fn multiclass_concepts_cover_all_classes() {
        let multi = ConceptSpec { num_classes: 4, ..spec(13) };
        let c = Concept::build(&multi).unwrap();
        let mut rng = SeededRng::new(4);
        let mut counts = [0u64; 4];
        for _ in 0..4000 {
            let x = Vector::from_vec((0..10).map(|_| rng.uniform_in(-1.0, 1.0)).collect());
            counts[c.label(&x)] += 1;
        }
        for (cls, &n) in counts.iter().enumerate() {
            assert!(n > 0, "class {} never appeared", cls);
        }
    }
}
