use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{check_dim, check_finite, check_unit, dot};

/// Monotone transform applied to the affine quality score.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Transform {
    /// Raw affine value, not clipped.
    Identity,
    Logistic {
        scale: f64,
    },
    /// 1 when the affine value is >= 0, else 0.
    Sign,
}

impl Transform {
    #[inline]
    pub fn apply(&self, z: f64) -> f64 {
        match *self {
            Transform::Identity => z,
            Transform::Logistic { scale } => 1.0 / (1.0 + (-scale * z).exp()),
            Transform::Sign => {
                if z >= 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }
}

/// True quality `f(x) = h(w_f . x - b_f)` with unit `w_f`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawQuality")]
pub struct QualityFunction {
    w: Vec<f64>,
    b: f64,
    transform: Transform,
}

#[derive(Deserialize)]
struct RawQuality {
    w: Vec<f64>,
    #[serde(default)]
    b: f64,
    #[serde(default = "identity")]
    transform: Transform,
}

fn identity() -> Transform {
    Transform::Identity
}

impl TryFrom<RawQuality> for QualityFunction {
    type Error = Error;

    fn try_from(raw: RawQuality) -> Result<Self> {
        Self::new(raw.w, raw.b, raw.transform)
    }
}

impl QualityFunction {
    pub fn new(w: Vec<f64>, b: f64, transform: Transform) -> Result<Self> {
        check_finite(&w)?;
        if w.is_empty() {
            return Err(Error::param("w_f", "must be non-empty"));
        }
        if !b.is_finite() {
            return Err(Error::param("b_f", "must be finite"));
        }
        check_unit(&w)?;
        if let Transform::Logistic { scale } = transform {
            if !(scale > 0.0 && scale.is_finite()) {
                return Err(Error::param(
                    "scale",
                    format!("logistic scale must be > 0, got {scale}"),
                ));
            }
        }
        Ok(Self { w, b, transform })
    }

    /// Identity-transform quality `w . x - b`.
    pub fn linear(w: Vec<f64>, b: f64) -> Result<Self> {
        Self::new(w, b, Transform::Identity)
    }

    pub fn w(&self) -> &[f64] {
        &self.w
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn transform(&self) -> Transform {
        self.transform
    }

    pub fn dim(&self) -> usize {
        self.w.len()
    }

    #[inline]
    pub fn affine(&self, x: &[f64]) -> f64 {
        dot(&self.w, x) - self.b
    }

    #[inline]
    pub(crate) fn eval_unchecked(&self, x: &[f64]) -> f64 {
        self.transform.apply(self.affine(x))
    }

    /// `h(w_f . x - b_f)`.
    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        check_dim(self.dim(), x.len())?;
        Ok(self.eval_unchecked(x))
    }
}

/// Free-function form of [`QualityFunction::eval`].
pub fn eval_quality(f: &QualityFunction, x: &[f64]) -> Result<f64> {
    f.eval(x)
}
