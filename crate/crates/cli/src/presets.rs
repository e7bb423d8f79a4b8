//! Built-in desk-scale experiment suites behind `replicate <name>`. Seeds
//! are fixed constants so every checkout reproduces identical numbers.

use odl_core::stream::recipes;
use odl_core::{BaselineHyperParams, HbpHyperParams, SegmentWindow};

use crate::config::{ExperimentConfig, ModelConfig, Seeds, SuiteConfig};

pub const PRESET_NAMES: [&str; 5] =
    ["depth-dilemma", "main-table", "alpha-evolution", "drift", "depth-robustness"];

const CONCEPT_SEED: u64 = 40;
const DRIFT_CONCEPT_SEED: u64 = 41;
const STREAM_SEED: u64 = 7;
const INIT_SEED: u64 = 11;
const LEARNER_WIDTH: usize = 32;
const SYN_ROUNDS: u64 = 100_000;
const DRIFT_SEGMENT_ROUNDS: u64 = 30_000;

const SEEDS: Seeds = Seeds { stream_seed: STREAM_SEED, init_seed: INIT_SEED };

/// Windows used by the depth-dilemma and mixture-evolution suites: very
/// early, early, late, and tail slices of the stream.
fn segment_windows() -> Vec<SegmentWindow> {
    vec![
        SegmentWindow::new(0.0, 0.005),
        SegmentWindow::new(0.10, 0.15),
        SegmentWindow::new(0.60, 0.80),
        SegmentWindow::new(0.80, 1.0),
    ]
}

/// Discount tuned for desk-length streams. The default discount barely
/// forgets within 10^5 rounds, so whichever classifier leads after the
/// opening phase keeps its lead to the end; a faster discount lets the
/// mixture keep moving as the per-depth losses converge.
fn desk_hedge() -> HbpHyperParams {
    HbpHyperParams { beta: 0.6, ..HbpHyperParams::default() }
}

/// The 10% of rounds after each labeling change of the A-B-A stream
/// (segment boundaries sit at 1/3 and 2/3 of the run).
fn drift_windows() -> Vec<SegmentWindow> {
    vec![
        SegmentWindow::new(1.0 / 3.0, 1.0 / 3.0 + 0.1),
        SegmentWindow::new(2.0 / 3.0, 2.0 / 3.0 + 0.1),
    ]
}

fn ogd(name: &str, depth: usize, hp: BaselineHyperParams, windows: Vec<SegmentWindow>) -> ExperimentConfig {
    ExperimentConfig {
        name: name.to_string(),
        model: ModelConfig::Ogd { depth, width: LEARNER_WIDTH, hyperparams: hp },
        stream: recipes::syn8(CONCEPT_SEED, SYN_ROUNDS),
        seeds: SEEDS,
        windows,
        alpha_log_stride: crate::config::DEFAULT_ALPHA_LOG_STRIDE,
        output_dir: None,
    }
}

fn hbp(
    name: &str,
    depth: usize,
    hyperparams: HbpHyperParams,
    windows: Vec<SegmentWindow>,
) -> ExperimentConfig {
    ExperimentConfig {
        name: name.to_string(),
        model: ModelConfig::Hbp { depth, width: LEARNER_WIDTH, hyperparams },
        stream: recipes::syn8(CONCEPT_SEED, SYN_ROUNDS),
        seeds: SEEDS,
        windows,
        alpha_log_stride: crate::config::DEFAULT_ALPHA_LOG_STRIDE,
        output_dir: None,
    }
}

pub fn preset(name: &str) -> Option<SuiteConfig> {
    let experiments = match name {
        // Fixed-depth nets racing on one stream: shallow wins the early
        // windows, deeper wins the late one.
        "depth-dilemma" => [2, 4, 8, 16]
            .into_iter()
            .map(|d| ogd(&format!("ogd-{d}"), d, BaselineHyperParams::default(), segment_windows()))
            .collect(),
        // Final cumulative error, one row per method.
        "main-table" => {
            let mut exps: Vec<ExperimentConfig> = [2usize, 3, 4, 8, 16, 20]
                .into_iter()
                .map(|d| ogd(&format!("ogd-{d}"), d, BaselineHyperParams::default(), vec![]))
                .collect();
            exps.push(ogd("ogd-momentum-20", 20, BaselineHyperParams::momentum_default(), vec![]));
            exps.push(ogd("ogd-nesterov-20", 20, BaselineHyperParams::nesterov_default(), vec![]));
            exps.push(hbp("hbp-20", 20, HbpHyperParams::default(), vec![]));
            exps
        }
        // One hedged run logged densely enough to plot how the mixture
        // moves across depths over time. Shallow base depth and a fast
        // discount: at this stream length that is the regime where the
        // mixture visibly shifts after its early collapse.
        "alpha-evolution" => {
            let mut exp = hbp("hbp-4", 4, desk_hedge(), segment_windows());
            exp.alpha_log_stride = 25;
            vec![exp]
        }
        // A-B-A labeling change: hedged net versus the deepest fixed net,
        // scored right after each boundary.
        "drift" => {
            let stream = recipes::cd1(CONCEPT_SEED, DRIFT_CONCEPT_SEED, DRIFT_SEGMENT_ROUNDS);
            let mut h = hbp("hbp-16", 16, HbpHyperParams::default(), drift_windows());
            h.stream = stream.clone();
            let mut o = ogd("ogd-16", 16, BaselineHyperParams::default(), drift_windows());
            o.stream = stream;
            vec![h, o]
        }
        // Same hedged learner at several base depths: final errors should
        // barely move.
        "depth-robustness" => {
            [8, 12, 16, 20]
                .into_iter()
                .map(|d| hbp(&format!("hbp-{d}"), d, HbpHyperParams::default(), vec![]))
                .collect()
        }
        _ => return None,
    };
    Some(SuiteConfig { parallelism: None, output_dir: None, experiments })
}
