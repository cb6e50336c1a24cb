use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::distributions::{GeneratorKind, GeneratorSpec, SmoothingSpec};
use crate::error::{Error, Result};
use crate::learning::{DesignMethod, SweepPlan};
use crate::model::{CostModel, Projection, QualityFunction};
use crate::threshold::{Algorithm1Params, DEFAULT_ANGULAR_STEPS, DEFAULT_MAX_GRID};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DesignKind {
    Linear,
    ThresholdBaseline,
    ThresholdAlg1,
    Bruteforce,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BruteForceGrid {
    #[serde(default = "default_direction_grid")]
    pub direction_grid: usize,
    #[serde(default = "default_bias_grid")]
    pub bias_grid: usize,
}

impl Default for BruteForceGrid {
    fn default() -> Self {
        Self {
            direction_grid: default_direction_grid(),
            bias_grid: default_bias_grid(),
        }
    }
}

/// Sizes of the `verify` command's randomized checks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyPlan {
    #[serde(default = "default_bands")]
    pub bands: usize,
    #[serde(default = "default_tail_eps")]
    pub tail_eps: Vec<f64>,
    #[serde(default = "default_mechanisms")]
    pub mechanisms: usize,
}

impl Default for VerifyPlan {
    fn default() -> Self {
        Self {
            bands: default_bands(),
            tail_eps: default_tail_eps(),
            mechanisms: default_mechanisms(),
        }
    }
}

/// One experiment, read from a single JSON document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub population: GeneratorSpec,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default)]
    pub smoothing: SmoothingSpec,
    pub quality: QualityFunction,
    pub projection: Projection,
    pub cost: CostModel,
    #[serde(default = "default_design")]
    pub design: DesignKind,
    #[serde(default = "default_eps")]
    pub eps: f64,
    #[serde(default = "default_angular_steps")]
    pub angular_steps: usize,
    /// Norm cap `R` of linear mechanisms.
    #[serde(default = "default_norm_cap")]
    pub norm_cap: f64,
    #[serde(default)]
    pub bruteforce: BruteForceGrid,
    #[serde(default = "default_max_grid")]
    pub max_grid: u64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    #[serde(default)]
    pub sweep: Option<SweepPlan>,
    #[serde(default)]
    pub verify: VerifyPlan,
}

fn default_samples() -> usize {
    10_000
}
fn default_design() -> DesignKind {
    DesignKind::ThresholdAlg1
}
fn default_eps() -> f64 {
    0.1
}
fn default_angular_steps() -> usize {
    DEFAULT_ANGULAR_STEPS
}
fn default_norm_cap() -> f64 {
    1.0
}
fn default_max_grid() -> u64 {
    DEFAULT_MAX_GRID
}
fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}
fn default_direction_grid() -> usize {
    2048
}
fn default_bias_grid() -> usize {
    4096
}
fn default_bands() -> usize {
    50
}
fn default_tail_eps() -> Vec<f64> {
    vec![0.1, 0.01, 0.001]
}
fn default_mechanisms() -> usize {
    20
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_json(&text).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: RunConfig = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Dimensional consistency and parameter ranges.
    pub fn validate(&self) -> Result<()> {
        let wrap = |e: Error| Error::Config(e.to_string());
        self.population.validate().map_err(wrap)?;
        let n = self.population.n;
        if self.quality.dim() != n {
            return Err(Error::Config(format!(
                "quality has dimension {}, population has {n}",
                self.quality.dim()
            )));
        }
        if self.projection.dim() != n {
            return Err(Error::Config(format!(
                "projection has dimension {}, population has {n}",
                self.projection.dim()
            )));
        }
        if self.samples == 0 {
            return Err(Error::Config("samples must be at least 1".into()));
        }
        SmoothingSpec::new(self.smoothing.sigma).map_err(wrap)?;
        if !(self.eps > 0.0 && self.eps < 1.0) {
            return Err(Error::Config(format!("eps must lie in (0, 1), got {}", self.eps)));
        }
        if self.angular_steps == 0 {
            return Err(Error::Config("angular_steps must be at least 1".into()));
        }
        if !(self.norm_cap > 0.0 && self.norm_cap.is_finite()) {
            return Err(Error::Config(format!("norm_cap must be > 0, got {}", self.norm_cap)));
        }
        if self.bruteforce.direction_grid == 0 || self.bruteforce.bias_grid == 0 {
            return Err(Error::Config("bruteforce grids must be nonempty".into()));
        }
        if let Some(plan) = &self.sweep {
            plan.validate().map_err(wrap)?;
        }
        if self.verify.tail_eps.iter().any(|e| !(*e > 0.0 && *e <= 1.0)) {
            return Err(Error::Config("verify.tail_eps values must lie in (0, 1]".into()));
        }
        Ok(())
    }

    pub fn radius(&self) -> f64 {
        self.population.kind.radius()
    }

    /// Threshold design routine for `design`; `None` for linear.
    pub fn design_method(&self, sigma: f64) -> Option<DesignMethod> {
        match self.design {
            DesignKind::Linear => None,
            DesignKind::ThresholdBaseline => Some(DesignMethod::Baseline { r: self.radius() }),
            DesignKind::ThresholdAlg1 => Some(DesignMethod::Algorithm1(Algorithm1Params {
                sigma,
                r: self.radius(),
                eps: self.eps,
                angular_steps: self.angular_steps,
                max_grid: self.max_grid,
            })),
            DesignKind::Bruteforce => Some(DesignMethod::BruteForce {
                direction_grid: self.bruteforce.direction_grid,
                bias_grid: self.bruteforce.bias_grid,
            }),
        }
    }

    /// Whether the population is drawn from a file rather than generated.
    pub fn is_file_population(&self) -> bool {
        matches!(self.population.kind, GeneratorKind::File { .. })
    }
}
