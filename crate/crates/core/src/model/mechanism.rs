use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{check_finite, check_unit, dot, norm, GEOMETRY_TOL};

use super::Projection;

/// Movement cost `c |x - x'|`; the margin width is `1/c`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawCost")]
pub struct CostModel {
    c: f64,
}

#[derive(Deserialize)]
struct RawCost {
    c: f64,
}

impl TryFrom<RawCost> for CostModel {
    type Error = Error;

    fn try_from(raw: RawCost) -> Result<Self> {
        Self::new(raw.c)
    }
}

impl CostModel {
    pub fn new(c: f64) -> Result<Self> {
        if c > 0.0 && c.is_finite() {
            Ok(Self { c })
        } else {
            Err(Error::param(
                "c",
                format!("cost per unit distance must be > 0, got {c}"),
            ))
        }
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    /// Width of the band below a threshold from which agents move, `1/c`.
    pub fn margin(&self) -> f64 {
        1.0 / self.c
    }
}

/// `g(x) = w . x - b` with `|w| <= R`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawLinear")]
pub struct LinearMechanism {
    w: Vec<f64>,
    b: f64,
    #[serde(rename = "R")]
    cap: f64,
}

#[derive(Deserialize)]
struct RawLinear {
    w: Vec<f64>,
    #[serde(default)]
    b: f64,
    #[serde(rename = "R")]
    cap: f64,
}

impl TryFrom<RawLinear> for LinearMechanism {
    type Error = Error;

    fn try_from(raw: RawLinear) -> Result<Self> {
        Self::new(raw.w, raw.b, raw.cap)
    }
}

impl LinearMechanism {
    pub fn new(w: Vec<f64>, b: f64, cap: f64) -> Result<Self> {
        check_finite(&w)?;
        if !b.is_finite() {
            return Err(Error::param("b_g", "must be finite"));
        }
        if !(cap > 0.0 && cap.is_finite()) {
            return Err(Error::param("R", format!("norm cap must be > 0, got {cap}")));
        }
        let n = norm(&w);
        if n > cap + GEOMETRY_TOL {
            return Err(Error::param("w_g", format!("norm {n} exceeds cap {cap}")));
        }
        Ok(Self { w, b, cap })
    }

    pub fn w(&self) -> &[f64] {
        &self.w
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn cap(&self) -> f64 {
        self.cap
    }

    pub fn norm(&self) -> f64 {
        norm(&self.w)
    }

    #[inline]
    pub fn output(&self, x: &[f64]) -> f64 {
        dot(&self.w, x) - self.b
    }
}

/// `g(x) = sign(w . x - b)` with unit `w`; `sign(0) = 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawThreshold")]
pub struct ThresholdMechanism {
    w: Vec<f64>,
    b: f64,
}

#[derive(Deserialize)]
struct RawThreshold {
    w: Vec<f64>,
    b: f64,
}

impl TryFrom<RawThreshold> for ThresholdMechanism {
    type Error = Error;

    fn try_from(raw: RawThreshold) -> Result<Self> {
        Self::new(raw.w, raw.b)
    }
}

impl ThresholdMechanism {
    pub fn new(w: Vec<f64>, b: f64) -> Result<Self> {
        check_finite(&w)?;
        if !b.is_finite() {
            return Err(Error::param("b_g", "must be finite"));
        }
        check_unit(&w)?;
        Ok(Self { w, b })
    }

    pub fn w(&self) -> &[f64] {
        &self.w
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    /// Signed distance to the decision boundary, `w . x - b`.
    #[inline]
    pub fn gap(&self, x: &[f64]) -> f64 {
        dot(&self.w, x) - self.b
    }

    #[inline]
    pub fn output(&self, x: &[f64]) -> f64 {
        if self.gap(x) >= 0.0 {
            1.0
        } else {
            0.0
        }
    }
}

/// Either mechanism class; serialized as `{"type": "linear" | "threshold", ...}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Mechanism {
    Linear(LinearMechanism),
    Threshold(ThresholdMechanism),
}

impl Mechanism {
    pub fn w(&self) -> &[f64] {
        match self {
            Mechanism::Linear(g) => g.w(),
            Mechanism::Threshold(g) => g.w(),
        }
    }

    pub fn b(&self) -> f64 {
        match self {
            Mechanism::Linear(g) => g.b(),
            Mechanism::Threshold(g) => g.b(),
        }
    }

    pub fn dim(&self) -> usize {
        self.w().len()
    }

    #[inline]
    pub fn output(&self, x: &[f64]) -> f64 {
        match self {
            Mechanism::Linear(g) => g.output(x),
            Mechanism::Threshold(g) => g.output(x),
        }
    }

    /// Checks that the mechanism reads only visible features.
    pub fn check_visible(&self, p: &Projection) -> Result<()> {
        p.check_visible(self.w())
    }
}

impl From<LinearMechanism> for Mechanism {
    fn from(g: LinearMechanism) -> Self {
        Mechanism::Linear(g)
    }
}

impl From<ThresholdMechanism> for Mechanism {
    fn from(g: ThresholdMechanism) -> Self {
        Mechanism::Threshold(g)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cost_model_margin() {
        let cm = CostModel::new(4.0).unwrap();
        assert_eq!(cm.margin(), 0.25);
        assert!(CostModel::new(0.0).is_err());
        assert!(CostModel::new(f64::NAN).is_err());
    }

    #[test]
    fn linear_cap_enforced() {
        assert!(LinearMechanism::new(vec![0.6, 0.8], 0.0, 1.0).is_ok());
        assert!(LinearMechanism::new(vec![1.2, 0.0], 0.0, 1.0).is_err());
    }

    #[test]
    fn threshold_sign_convention() {
        let g = ThresholdMechanism::new(vec![1.0, 0.0], 0.5).unwrap();
        assert_eq!(g.output(&[0.5, 3.0]), 1.0);
        assert_eq!(g.output(&[0.4999, 3.0]), 0.0);
        assert!(ThresholdMechanism::new(vec![1.0, 1.0], 0.0).is_err());
    }

    #[test]
    fn mechanism_json_shape() {
        let g = Mechanism::Linear(LinearMechanism::new(vec![0.0, 1.0], 0.0, 1.0).unwrap());
        let s = serde_json::to_string(&g).unwrap();
        assert_eq!(s, r#"{"type":"linear","w":[0.0,1.0],"b":0.0,"R":1.0}"#);
        let back: Mechanism = serde_json::from_str(&s).unwrap();
        assert_eq!(back, g);

        let t: Mechanism = serde_json::from_str(r#"{"type":"threshold","w":[0.6,0.8],"b":0.1}"#).unwrap();
        assert!(matches!(t, Mechanism::Threshold(_)));
        assert!(serde_json::from_str::<Mechanism>(r#"{"type":"threshold","w":[1,1],"b":0}"#).is_err());
    }
}
