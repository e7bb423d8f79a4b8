//! Canonical synthetic stream recipes at desk scale: 50 input features,
//! 2 classes, generator width 32. Layer counts follow the reference
//! datasets (8-hidden-layer concepts; the middle drift concept of the
//! three-phase variant uses a shallower 6-layer generator); instance
//! counts shrink to laptop scale and stay configurable.

use crate::stream::{ConceptSpec, Segment, StreamSpec};

pub const DESK_INPUT_DIM: usize = 50;
pub const DESK_GENERATOR_WIDTH: usize = 32;
pub const DESK_NUM_CLASSES: usize = 2;

/// An 8-hidden-layer concept over 50 features.
pub fn deep_concept(seed: u64) -> ConceptSpec {
    ConceptSpec {
        input_dim: DESK_INPUT_DIM,
        hidden_layers: 8,
        width: DESK_GENERATOR_WIDTH,
        num_classes: DESK_NUM_CLASSES,
        seed,
        label_noise: 0.0,
    }
}

/// A shallower 6-hidden-layer concept, used as the middle segment of the
/// three-concept drift stream.
pub fn shallow_concept(seed: u64) -> ConceptSpec {
    ConceptSpec { hidden_layers: 6, ..deep_concept(seed) }
}

/// Stationary stream from one 8-layer concept ("Syn8" shape).
pub fn syn8(concept_seed: u64, instances: u64) -> StreamSpec {
    StreamSpec::Synthetic {
        segments: vec![Segment { concept: deep_concept(concept_seed), instances }],
    }
}

/// Recurring drift A-B-A: three equal segments, the outer two sharing the
/// exact same concept (same seed) so recovery after the drift back is
/// measurable.
pub fn cd1(seed_a: u64, seed_b: u64, per_segment: u64) -> StreamSpec {
    StreamSpec::Synthetic {
        segments: vec![
            Segment { concept: deep_concept(seed_a), instances: per_segment },
            Segment { concept: deep_concept(seed_b), instances: per_segment },
            Segment { concept: deep_concept(seed_a), instances: per_segment },
        ],
    }
}

/// Three-way drift A-B-C with a shallower middle concept.
pub fn cd2(seed_a: u64, seed_b: u64, seed_c: u64, per_segment: u64) -> StreamSpec {
    StreamSpec::Synthetic {
        segments: vec![
            Segment { concept: deep_concept(seed_a), instances: per_segment },
            Segment { concept: shallow_concept(seed_b), instances: per_segment },
            Segment { concept: deep_concept(seed_c), instances: per_segment },
        ],
    }
}
