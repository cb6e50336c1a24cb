//! The optimal linear mechanism and its best-response regime.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{CostModel, LinearMechanism, Projection, QualityFunction};
use crate::numeric::{check_dim, norm, VISIBILITY_TOL};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LinearRegime {
    /// `c > |w_g|`: nobody moves and the gain is zero.
    Inert,
    /// `c <= |w_g|`: improvement is unbounded.
    Unbounded,
}

/// `w_g = R P w_f / |P w_f|`, `b_g = 0`.
///
/// The result depends only on `(P, w_f, R)`; no sample is consulted.
pub fn optimal_linear(p: &Projection, f: &QualityFunction, cap: f64) -> Result<LinearMechanism> {
    check_dim(p.dim(), f.dim())?;
    if !(cap > 0.0 && cap.is_finite()) {
        return Err(Error::param("R", format!("norm cap must be > 0, got {cap}")));
    }
    let pw = p.apply_unchecked(f.w());
    let len = norm(&pw);
    if len <= VISIBILITY_TOL {
        return Err(Error::InvisibleQuality {
            norm: len,
            tolerance: VISIBILITY_TOL,
        });
    }
    let w = pw.iter().map(|v| cap * v / len).collect();
    LinearMechanism::new(w, 0.0, cap)
}

pub fn linear_regime(g: &LinearMechanism, cm: &CostModel) -> LinearRegime {
    if cm.c() > g.norm() {
        LinearRegime::Inert
    } else {
        LinearRegime::Unbounded
    }
}
