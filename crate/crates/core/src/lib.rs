//! Online deep learning on streams: a hedged multi-depth network trained
//! with depth-adaptive online backprop, fixed-depth online baselines,
//! synthetic drift stream generators, CSV ingestion, and a prequential
//! (test-then-train) evaluation harness.
//!
//! Everything is deterministic given the seeds: same seeds, same platform,
//! same build produce bit-identical models and metrics.

pub mod checkpoint;
pub mod eval;
pub mod net;
pub mod numeric;
pub mod rng;
pub mod stream;
pub mod train;

pub use eval::{
    depth_dilemma_experiment, expected_depth, metrics::RunWriter, run_prequential,
    run_prequential_with, AlphaSnapshot, DepthSweepRow, EvalError, ExperimentResult,
    SegmentWindow, WindowError,
};
pub use net::{Activation, ForwardCache, HedgedNetwork, InitScheme, NetConfig, NetError};
pub use numeric::{cross_entropy, relu, relu_grad, softmax, Matrix, Vector, LOG_FLOOR};
pub use rng::SeededRng;
pub use stream::{
    read_csv_stream, synthetic_stream, Concept, ConceptSpec, CsvSchema, LabeledInstance, Segment,
    StreamError, StreamSpec,
};
pub use train::{
    BaselineHyperParams, HbpHyperParams, HbpTrainer, OgdTrainer, OnlineTrainer, StepRecord,
    TrainError,
};
