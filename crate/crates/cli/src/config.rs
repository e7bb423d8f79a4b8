//! TOML experiment configuration. A suite file declares any number of
//! `[[experiment]]` tables; validation is total — every violation across
//! every experiment is reported in one pass, and nothing runs unless the
//! whole file is clean.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use odl_core::{BaselineHyperParams, HbpHyperParams, SegmentWindow, StreamSpec};

pub const DEFAULT_ALPHA_LOG_STRIDE: u64 = 100;
pub const DEFAULT_OUTPUT_DIR: &str = "runs";

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteConfig {
    /// Worker count; overridable with `--parallelism`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parallelism: Option<usize>,
    /// Root for all run directories; overridable with `--output-dir`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    #[serde(rename = "experiment", default)]
    pub experiments: Vec<ExperimentConfig>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Unique across the suite; doubles as the run directory name.
    pub name: String,
    pub model: ModelConfig,
    pub stream: StreamSpec,
    pub seeds: Seeds,
    #[serde(default)]
    pub windows: Vec<SegmentWindow>,
    #[serde(default = "default_stride")]
    pub alpha_log_stride: u64,
    /// Overrides `<suite output dir>/<name>`; relative paths resolve
    /// against the suite output dir.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
}

fn default_stride() -> u64 {
    DEFAULT_ALPHA_LOG_STRIDE
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Seeds {
    pub stream_seed: u64,
    pub init_seed: u64,
}

/// What to train. Input and output dimensions always come from the stream,
/// so a model only declares its hidden shape.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ModelConfig {
    /// Hedged multi-classifier network with `depth` hidden layers.
    Hbp {
        depth: usize,
        width: usize,
        #[serde(default)]
        hyperparams: HbpHyperParams,
    },
    /// Fixed-depth net, single classifier at the deepest layer.
    Ogd {
        depth: usize,
        width: usize,
        #[serde(default)]
        hyperparams: BaselineHyperParams,
    },
    /// Softmax regression straight off the inputs.
    Linear {
        #[serde(default)]
        hyperparams: BaselineHyperParams,
    },
}

impl ModelConfig {
    pub fn kind(&self) -> &'static str {
        match self {
            ModelConfig::Hbp { .. } => "hbp",
            ModelConfig::Ogd { .. } => "ogd",
            ModelConfig::Linear { .. } => "linear",
        }
    }

    fn violations(&self) -> Vec<String> {
        let mut v = Vec::new();
        match self {
            ModelConfig::Hbp { depth, width, hyperparams } => {
                if *depth == 0 {
                    v.push("model.depth must be >= 1 (use kind = \"linear\" for a depth-0 model)".to_string());
                }
                if *width == 0 {
                    v.push("model.width must be >= 1".to_string());
                }
                v.extend(hyperparams.violations().into_iter().map(|m| format!("model.hyperparams: {m}")));
            }
            ModelConfig::Ogd { depth, width, hyperparams } => {
                if *depth == 0 {
                    v.push("model.depth must be >= 1 (use kind = \"linear\" for a depth-0 model)".to_string());
                }
                if *width == 0 {
                    v.push("model.width must be >= 1".to_string());
                }
                v.extend(hyperparams.violations().into_iter().map(|m| format!("model.hyperparams: {m}")));
            }
            ModelConfig::Linear { hyperparams } => {
                v.extend(hyperparams.violations().into_iter().map(|m| format!("model.hyperparams: {m}")));
            }
        }
        v
    }
}

impl ExperimentConfig {
    fn violations(&self) -> Vec<String> {
        let mut v = Vec::new();
        if self.name.is_empty() {
            v.push("name must not be empty".to_string());
        } else if !self
            .name
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || matches!(c, '-' | '_' | '.'))
        {
            v.push(format!(
                "name '{}' may only contain letters, digits, '-', '_', '.' (it becomes a directory name)",
                self.name
            ));
        }
        v.extend(self.model.violations());
        v.extend(self.stream.violations().into_iter().map(|m| format!("stream: {m}")));
        for (i, w) in self.windows.iter().enumerate() {
            v.extend(w.violations().into_iter().map(|m| format!("windows[{i}]: {m}")));
        }
        if self.alpha_log_stride == 0 {
            v.push("alpha_log_stride must be >= 1".to_string());
        }
        v
    }

    /// Run directory for this experiment under `root`.
    pub fn run_dir(&self, root: &Path) -> PathBuf {
        match &self.output_dir {
            Some(dir) if dir.is_absolute() => dir.clone(),
            Some(dir) => root.join(dir),
            None => root.join(&self.name),
        }
    }
}

impl SuiteConfig {
    /// Every violation in the whole file, each prefixed with enough context
    /// to locate it. Empty means the suite may run.
    pub fn violations(&self) -> Vec<String> {
        let mut v = Vec::new();
        if self.experiments.is_empty() {
            v.push("config declares no experiments".to_string());
        }
        if self.parallelism == Some(0) {
            v.push("parallelism must be >= 1".to_string());
        }
        let mut seen = std::collections::HashSet::new();
        for exp in &self.experiments {
            if !seen.insert(exp.name.as_str()) {
                v.push(format!("experiment name '{}' is not unique", exp.name));
            }
        }
        for exp in &self.experiments {
            v.extend(
                exp.violations()
                    .into_iter()
                    .map(|m| format!("experiment '{}': {m}", exp.name)),
            );
        }
        v
    }
}

/// Input to `gen-stream`: a synthetic stream spec plus the feature seed.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GenStreamConfig {
    #[serde(default)]
    pub stream_seed: u64,
    pub stream: StreamSpec,
}

impl GenStreamConfig {
    pub fn violations(&self) -> Vec<String> {
        let mut v: Vec<String> =
            self.stream.violations().into_iter().map(|m| format!("stream: {m}")).collect();
        if matches!(self.stream, StreamSpec::Csv { .. }) {
            v.push("gen-stream materializes synthetic streams; stream.kind must be \"synthetic\"".to_string());
        }
        v
    }
}

pub fn load_suite(path: &Path) -> Result<SuiteConfig, String> {
    parse_toml(path)
}

pub fn load_gen_stream(path: &Path) -> Result<GenStreamConfig, String> {
    parse_toml(path)
}

fn parse_toml<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    toml::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))
}
