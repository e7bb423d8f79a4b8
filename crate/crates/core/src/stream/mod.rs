//! Data sources: synthetic concept streams (with optional drift between
//! segments) and CSV ingestion. Every stream is an iterator of labeled
//! instances; synthetic streams are bit-for-bit reproducible from their
//! seeds, CSV streams read rows lazily with bounded memory.

mod concept;
mod csv;
pub mod recipes;

pub use concept::{Concept, ConceptSpec};
pub use csv::{read_csv_stream, CsvSchema, CsvStream};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numeric::Vector;
use crate::rng::SeededRng;

#[derive(Debug, Error)]
pub enum StreamError {
    #[error("invalid stream spec: {0}")]
    InvalidSpec(String),
    #[error("concept seed {seed} produced a degenerate label distribution after {attempts} attempts")]
    DegenerateConcept { seed: u64, attempts: u32 },
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path} data row {row}: {message}")]
    MalformedRow { path: String, row: u64, message: String },
}

/// One observation of the stream.
#[derive(Clone, Debug, PartialEq)]
pub struct LabeledInstance {
    pub features: Vector,
    pub label: usize,
}

/// One stationary stretch of a synthetic stream.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub concept: ConceptSpec,
    pub instances: u64,
}

/// Where instances come from: generated on the fly, or read from a file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StreamSpec {
    Synthetic { segments: Vec<Segment> },
    Csv { path: String, schema: CsvSchema },
}

impl StreamSpec {
    pub fn total_instances(&self) -> Option<u64> {
        match self {
            StreamSpec::Synthetic { segments } => {
                Some(segments.iter().map(|s| s.instances).sum())
            }
            StreamSpec::Csv { .. } => None,
        }
    }

    /// (input_dim, num_classes) the spec will produce.
    pub fn dimensions(&self) -> Result<(usize, usize), StreamError> {
        match self {
            StreamSpec::Synthetic { segments } => segments
                .first()
                .map(|s| (s.concept.input_dim, s.concept.num_classes))
                .ok_or_else(|| StreamError::InvalidSpec("stream has no segments".to_string())),
            StreamSpec::Csv { schema, .. } => Ok((schema.num_features, schema.num_classes)),
        }
    }

    /// Opens the spec as a uniform fallible-instance iterator. Synthetic
    /// streams draw features from `stream_seed`; CSV sources ignore it.
    pub fn open(
        &self,
        stream_seed: u64,
    ) -> Result<Box<dyn Iterator<Item = Result<LabeledInstance, StreamError>> + Send>, StreamError>
    {
        match self {
            StreamSpec::Synthetic { segments } => {
                Ok(Box::new(synthetic_stream(segments, stream_seed)?.map(Ok)))
            }
            StreamSpec::Csv { path, schema } => Ok(Box::new(read_csv_stream(path, schema)?)),
        }
    }

    /// Violations of the spec-level invariants; empty means valid.
    pub fn violations(&self) -> Vec<String> {
        let mut v = Vec::new();
        match self {
            StreamSpec::Synthetic { segments } => {
                if segments.is_empty() {
                    v.push("stream needs at least one segment".to_string());
                }
                let dims: Vec<usize> = segments.iter().map(|s| s.concept.input_dim).collect();
                if dims.windows(2).any(|w| w[0] != w[1]) {
                    v.push("all segments must share input_dim".to_string());
                }
                let classes: Vec<usize> = segments.iter().map(|s| s.concept.num_classes).collect();
                if classes.windows(2).any(|w| w[0] != w[1]) {
                    v.push("all segments must share num_classes".to_string());
                }
                for (i, seg) in segments.iter().enumerate() {
                    if seg.instances == 0 {
                        v.push(format!("segment {} has zero instances; empty streams are rejected", i + 1));
                    }
                    for p in seg.concept.violations() {
                        v.push(format!("segment {}: {}", i + 1, p));
                    }
                }
            }
            StreamSpec::Csv { path, schema } => {
                if path.is_empty() {
                    v.push("csv path is empty".to_string());
                }
                v.extend(schema.violations());
            }
        }
        v
    }
}

/// Synthetic instance source. Features are drawn from a single RNG seeded
/// with `stream_seed` that runs continuously across segment boundaries, so
/// the drift is purely in the labeling function, never in the inputs.
pub struct SyntheticStream {
    segments: Vec<(Concept, u64)>,
    current: usize,
    emitted: u64,
    remaining_total: u64,
    rng: SeededRng,
}

/// Builds the stream for `segments`, constructing every concept up front
/// (so degenerate-concept errors surface before any instance is drawn).
pub fn synthetic_stream(segments: &[Segment], stream_seed: u64) -> Result<SyntheticStream, StreamError> {
    let spec = StreamSpec::Synthetic { segments: segments.to_vec() };
    let problems = spec.violations();
    if !problems.is_empty() {
        return Err(StreamError::InvalidSpec(problems.join("; ")));
    }
    let mut built = Vec::with_capacity(segments.len());
    for seg in segments {
        built.push((Concept::build(&seg.concept)?, seg.instances));
    }
    let remaining_total = segments.iter().map(|s| s.instances).sum();
    Ok(SyntheticStream {
        segments: built,
        current: 0,
        emitted: 0,
        remaining_total,
        rng: SeededRng::new(stream_seed),
    })
}

impl SyntheticStream {
    pub fn total_instances(&self) -> u64 {
        self.segments.iter().map(|&(_, n)| n).sum()
    }
}

impl Iterator for SyntheticStream {
    type Item = LabeledInstance;

    fn next(&mut self) -> Option<LabeledInstance> {
        while self.current < self.segments.len() && self.emitted >= self.segments[self.current].1 {
            self.current += 1;
            self.emitted = 0;
        }
        if self.current >= self.segments.len() {
            return None;
        }
        let concept = &self.segments[self.current].0;
        let d = concept.spec().input_dim;
        let mut x = Vec::with_capacity(d);
        for _ in 0..d {
            x.push(self.rng.uniform_in(-1.0, 1.0));
        }
        let features = Vector::from_vec(x);
        let mut label = concept.label(&features);
        // Label noise replaces the label with a uniformly chosen *other*
        // class, so noise never silently agrees with the clean label.
        let noise = concept.spec().label_noise;
        if noise > 0.0 && self.rng.uniform() < noise {
            let c = concept.spec().num_classes;
            let offset = 1 + self.rng.below(c as u64 - 1) as usize;
            label = (label + offset) % c;
        }
        self.emitted += 1;
        self.remaining_total -= 1;
        Some(LabeledInstance { features, label })
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = self.remaining_total.min(usize::MAX as u64) as usize;
        (n, Some(n))
    }
}
