//! Agent-side calculus: movement cost, utility and best response.

use crate::error::Result;
use crate::numeric::{check_dim, distance, dot};

use super::{CostModel, FeatureVector, LinearMechanism, Mechanism, ThresholdMechanism};

/// Outcome of an agent's best response to a mechanism.
#[derive(Debug, Clone, PartialEq)]
pub enum BestResponse {
    /// The agent keeps its features and pays nothing.
    Stay,
    /// The agent relocates to `point` paying `cost`.
    Move { point: FeatureVector, cost: f64 },
    /// Utility grows without bound along the mechanism direction.
    Unbounded,
}

impl BestResponse {
    /// Resulting feature vector, or `None` when unbounded.
    pub fn point<'a>(&'a self, original: &'a [f64]) -> Option<&'a [f64]> {
        match self {
            BestResponse::Stay => Some(original),
            BestResponse::Move { point, .. } => Some(point),
            BestResponse::Unbounded => None,
        }
    }

    pub fn cost_paid(&self) -> Option<f64> {
        match self {
            BestResponse::Stay => Some(0.0),
            BestResponse::Move { cost, .. } => Some(*cost),
            BestResponse::Unbounded => None,
        }
    }

    pub fn is_unbounded(&self) -> bool {
        matches!(self, BestResponse::Unbounded)
    }
}

/// `c |x - x'|`.
pub fn cost(x: &[f64], x_new: &[f64], cm: &CostModel) -> Result<f64> {
    check_dim(x.len(), x_new.len())?;
    Ok(cm.c() * distance(x, x_new))
}

/// `g(x') - cost(x, x')`.
pub fn utility(g: &Mechanism, x: &[f64], x_new: &[f64], cm: &CostModel) -> Result<f64> {
    check_dim(g.dim(), x.len())?;
    check_dim(g.dim(), x_new.len())?;
    Ok(g.output(x_new) - cm.c() * distance(x, x_new))
}

pub fn best_response_linear(g: &LinearMechanism, x: &[f64], cm: &CostModel) -> Result<BestResponse> {
    check_dim(g.w().len(), x.len())?;
    Ok(if cm.c() > g.norm() {
        BestResponse::Stay
    } else {
        BestResponse::Unbounded
    })
}

/// Gap `w . x - b` when the agent moves (gap in `[-1/c, 0)`), else `None`.
///
/// Agents exactly on the boundary are already accepted and stay; agents at
/// exactly `-1/c` move (zero utility either way).
#[inline]
pub(crate) fn threshold_move_gap(g: &ThresholdMechanism, x: &[f64], margin: f64) -> Option<f64> {
    let gap = g.gap(x);
    (gap >= -margin && gap < 0.0).then_some(gap)
}

/// Writes the boundary projection of `x` into `out`, nudged along `w` until
/// `w . out - b >= 0` holds in floating point.
#[inline]
pub(crate) fn move_to_boundary(g: &ThresholdMechanism, x: &[f64], gap: f64, out: &mut [f64]) {
    let w = g.w();
    for ((o, &xi), &wi) in out.iter_mut().zip(x).zip(w) {
        *o = xi - gap * wi;
    }
    let scale = 1.0 + g.b().abs() + x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mut push = f64::EPSILON * scale;
    for _ in 0..16 {
        let residual = dot(w, out) - g.b();
        if residual >= 0.0 {
            return;
        }
        let step = -residual + push;
        out.iter_mut().zip(w).for_each(|(o, &wi)| *o += step * wi);
        push *= 2.0;
    }
}

pub fn best_response_threshold(g: &ThresholdMechanism, x: &[f64], cm: &CostModel) -> Result<BestResponse> {
    check_dim(g.w().len(), x.len())?;
    Ok(match threshold_move_gap(g, x, cm.margin()) {
        None => BestResponse::Stay,
        Some(gap) => {
            let mut point = vec![0.0; x.len()];
            move_to_boundary(g, x, gap, &mut point);
            BestResponse::Move {
                point: FeatureVector::new(point)?,
                cost: cm.c() * gap.abs(),
            }
        }
    })
}

pub fn best_response(g: &Mechanism, x: &[f64], cm: &CostModel) -> Result<BestResponse> {
    match g {
        Mechanism::Linear(g) => best_response_linear(g, x, cm),
        Mechanism::Threshold(g) => best_response_threshold(g, x, cm),
    }
}
