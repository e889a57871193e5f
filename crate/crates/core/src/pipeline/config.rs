use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::eval::{DEFAULT_BUDGETS, DEFAULT_IOU_THRESH};
use crate::imageio::WINDOW;
use crate::scaler::DEFAULT_BASE_SIZES;
use crate::selector::{DEFAULT_TOP_K, DEFAULT_TOP_N};

pub const THREADS_ENV: &str = "STREAMPROP_THREADS";

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheduler {
    #[default]
    Plain,
    Pingpong,
}

impl std::str::FromStr for Scheduler {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "plain" => Ok(Scheduler::Plain),
            "pingpong" => Ok(Scheduler::Pingpong),
            _ => Err(Error::Config(format!(
                "unknown scheduler {s:?} (plain | pingpong)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub base_sizes: Vec<usize>,
    pub scheduler: Scheduler,
    pub top_n_per_scale: usize,
    pub top_k: usize,
    pub iou_thresh: f64,
    pub budgets: Vec<usize>,
    pub model_path: Option<PathBuf>,
    /// Worker threads for independent scales; outputs do not depend on it.
    pub threads: usize,
    /// Run the three kernel stages on separate threads.
    pub pipelined_stages: bool,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            base_sizes: DEFAULT_BASE_SIZES.to_vec(),
            scheduler: Scheduler::Plain,
            top_n_per_scale: DEFAULT_TOP_N,
            top_k: DEFAULT_TOP_K,
            iou_thresh: DEFAULT_IOU_THRESH,
            budgets: DEFAULT_BUDGETS.to_vec(),
            model_path: None,
            threads: 1,
            pipelined_stages: false,
        }
    }
}

impl PipelineConfig {
    /// Parses `key = value` lines (TOML syntax; strings quoted, lists in brackets).
    /// Keys left out keep their defaults.
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: PipelineConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<std::path::Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&text)
    }

    /// Applies `STREAMPROP_THREADS` when set.
    pub fn apply_env(&mut self) -> Result<()> {
        if let Ok(v) = std::env::var(THREADS_ENV) {
            self.threads = v
                .trim()
                .parse()
                .ok()
                .filter(|&n: &usize| n > 0)
                .ok_or_else(|| {
                    Error::Config(format!("{THREADS_ENV}={v:?} is not a positive integer"))
                })?;
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if self.base_sizes.is_empty() || self.base_sizes.iter().any(|&b| b < WINDOW) {
            return bad(format!("base_sizes must be non-empty and each >= {WINDOW}"));
        }
        if self.top_n_per_scale == 0 || self.top_k == 0 || self.threads == 0 {
            return bad("top_n_per_scale, top_k and threads must be positive".into());
        }
        if !(self.iou_thresh > 0.0 && self.iou_thresh < 1.0) {
            return bad(format!("iou_thresh {} outside (0, 1)", self.iou_thresh));
        }
        if self.budgets.is_empty() || self.budgets.contains(&0) {
            return bad("budgets must be non-empty and positive".into());
        }
        Ok(())
    }
}
