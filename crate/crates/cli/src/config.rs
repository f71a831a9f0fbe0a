//! Run configuration: defaults, then the key=value config file, then CLI
//! flags, with flags winning.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use cultmig::analysis::{AnalysisConfig, ThresholdMode};
use cultmig::flows::FlowEstimator;

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub data_dir: Option<PathBuf>,
    pub out_dir: PathBuf,
    pub estimator: FlowEstimator,
    pub threshold_mode: ThresholdMode,
    pub sparse_rule: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            data_dir: None,
            out_dir: PathBuf::from("out"),
            estimator: FlowEstimator::PositiveDiff,
            threshold_mode: ThresholdMode::Recompute,
            sparse_rule: true,
        }
    }
}

impl RunConfig {
    pub fn analysis_config(&self) -> AnalysisConfig {
        AnalysisConfig {
            estimator: self.estimator,
            threshold_mode: self.threshold_mode,
            sparse_rule: self.sparse_rule,
        }
    }

    /// Applies one `key = value` assignment from a config file.
    fn apply(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "data_dir" => self.data_dir = Some(PathBuf::from(value)),
            "out_dir" => self.out_dir = PathBuf::from(value),
            "flow_estimator" => {
                self.estimator = value.parse().map_err(|e: String| anyhow::anyhow!(e))?
            }
            "thresholds" => self.threshold_mode = parse_threshold_mode(value)?,
            "sparse_rule" => {
                self.sparse_rule = value
                    .parse()
                    .with_context(|| format!("sparse_rule must be true/false, got {value:?}"))?
            }
            other => bail!("unknown config key {other:?}"),
        }
        Ok(())
    }

    /// Loads a `key = value` config file (# starts a comment).
    pub fn load_file(&mut self, path: &Path) -> Result<()> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .with_context(|| format!("{}:{}: expected key = value", path.display(), idx + 1))?;
            let value = value.trim().trim_matches('"');
            self.apply(key.trim(), value)
                .with_context(|| format!("{}:{}", path.display(), idx + 1))?;
        }
        Ok(())
    }
}

pub fn parse_threshold_mode(value: &str) -> Result<ThresholdMode> {
    match value {
        "recompute" => Ok(ThresholdMode::Recompute),
        "paper" => Ok(ThresholdMode::Paper),
        other => bail!("thresholds must be recompute or paper, got {other:?}"),
    }
}
