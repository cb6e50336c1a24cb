use crate::error::{Error, Result};
use crate::metrics::gain_closed_form;
use crate::model::{CostModel, Projection, QualityFunction, SampleSet, ThresholdMechanism, Transform};
use crate::numeric::check_dim;

use super::family::VisibleFrame;
use super::{argmax_candidate, Candidate, DesignReport};

/// Nonnegative grid `i / (2c)` for `i = 0..=ceil(2 r c)`.
pub fn baseline_bias_grid(r: f64, cm: &CostModel) -> Vec<f64> {
    let top = (2.0 * r * cm.c()).ceil() as u64;
    (0..=top).map(|i| i as f64 / (2.0 * cm.c())).collect()
}

/// Best threshold along `P w_f / |P w_f|` over the biases `+-i / (2c)`.
pub fn baseline_4rc(
    s: &SampleSet,
    p: &Projection,
    f: &QualityFunction,
    cm: &CostModel,
    r: f64,
) -> Result<DesignReport> {
    if f.transform() != Transform::Identity {
        return Err(Error::UnsupportedTransform);
    }
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::param("r", format!("radius must be > 0, got {r}")));
    }
    check_dim(p.dim(), s.dim())?;
    s.non_empty()?;
    let frame = VisibleFrame::new(p, f.w())?;
    let u = frame.pole().to_vec();
    let mut biases = Vec::new();
    for (i, b) in baseline_bias_grid(r, cm).into_iter().enumerate() {
        biases.push(b);
        if i > 0 {
            biases.push(-b);
        }
    }
    let candidates = biases
        .into_iter()
        .map(|b| {
            let g = ThresholdMechanism::new(u.clone(), b)?;
            Ok(Candidate {
                w: u.clone(),
                b,
                gain: gain_closed_form(&g, s, f, cm)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let best = &candidates[argmax_candidate(&candidates).expect("grid is nonempty")];
    Ok(DesignReport {
        chosen: ThresholdMechanism::new(best.w.clone(), best.b)?,
        gain: best.gain,
        candidates,
        oracle_calls: 0,
        epsilon_prime: None,
    })
}
