//! Population functionals over a finite sample set: Val, Gain, (soft) margin
//! density, the threshold gain identity and the full-visibility reachable mass.
//!
//! All averages are compensated sums over fixed-size chunks, so the value is
//! the same with or without the `parallel` feature.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{
    move_to_boundary, threshold_move_gap, CostModel, Mechanism, QualityFunction, SampleSet, ThresholdMechanism,
    Transform,
};
use crate::numeric::{check_dim, check_unit, distance, dot, NeumaierSum};
use crate::par;

/// Val, baseline and Gain of a mechanism on a sample set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GainReport {
    /// Average post-response quality; `None` when improvement is unbounded.
    pub val: Option<f64>,
    /// Average pre-response quality.
    pub baseline: f64,
    pub gain: Option<f64>,
    pub unbounded: bool,
    pub m: usize,
    /// Monte Carlo standard error of `gain` (sample std of per-agent gain / sqrt m).
    pub std_error: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Valuation {
    Finite(f64),
    Unbounded,
}

impl Valuation {
    pub fn finite(self) -> Option<f64> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::Unbounded => None,
        }
    }
}

fn check_consistent(g: &Mechanism, s: &SampleSet, f: &QualityFunction) -> Result<usize> {
    let m = s.non_empty()?;
    check_dim(s.dim(), g.dim())?;
    check_dim(s.dim(), f.dim())?;
    Ok(m)
}

fn check_margin(l: f64) -> Result<()> {
    if l > 0.0 && l.is_finite() {
        Ok(())
    } else {
        Err(Error::param("l", format!("margin must be > 0, got {l}")))
    }
}

/// Average true quality before any mechanism is deployed.
pub fn baseline(s: &SampleSet, f: &QualityFunction) -> Result<f64> {
    let m = s.non_empty()?;
    check_dim(s.dim(), f.dim())?;
    Ok(par::sum_by(m, |i| f.eval_unchecked(s.point(i))) / m as f64)
}

#[derive(Default)]
struct Sums {
    after: NeumaierSum,
    before: NeumaierSum,
    diff: NeumaierSum,
    diff_sq: NeumaierSum,
}

fn threshold_sums(g: &ThresholdMechanism, s: &SampleSet, f: &QualityFunction, cm: &CostModel) -> Sums {
    let l = cm.margin();
    let parts = par::map_chunks(s.len(), par::CHUNK, |range| {
        let mut scratch = vec![0.0; s.dim()];
        let mut acc = Sums::default();
        for i in range {
            let x = s.point(i);
            let before = f.eval_unchecked(x);
            let after = match threshold_move_gap(g, x, l) {
                Some(gap) => {
                    move_to_boundary(g, x, gap, &mut scratch);
                    f.eval_unchecked(&scratch)
                }
                None => before,
            };
            let d = after - before;
            acc.after.add(after);
            acc.before.add(before);
            acc.diff.add(d);
            acc.diff_sq.add(d * d);
        }
        acc
    });
    let mut total = Sums::default();
    for p in &parts {
        total.after.merge(&p.after);
        total.before.merge(&p.before);
        total.diff.merge(&p.diff);
        total.diff_sq.merge(&p.diff_sq);
    }
    total
}

/// `Val(g) = E[f(delta_g(x))]` over the sample set.
pub fn val(g: &Mechanism, s: &SampleSet, f: &QualityFunction, cm: &CostModel) -> Result<Valuation> {
    Ok(match gain(g, s, f, cm)?.val {
        Some(v) => Valuation::Finite(v),
        None => Valuation::Unbounded,
    })
}

/// `Gain(g) = Val(g) - E[f(x)]` with its Monte Carlo standard error.
pub fn gain(g: &Mechanism, s: &SampleSet, f: &QualityFunction, cm: &CostModel) -> Result<GainReport> {
    let m = check_consistent(g, s, f)?;
    let mf = m as f64;
    match g {
        Mechanism::Linear(lin) => {
            let base = baseline(s, f)?;
            if cm.c() > lin.norm() {
                Ok(GainReport {
                    val: Some(base),
                    baseline: base,
                    gain: Some(0.0),
                    unbounded: false,
                    m,
                    std_error: Some(0.0),
                })
            } else {
                Ok(GainReport {
                    val: None,
                    baseline: base,
                    gain: None,
                    unbounded: true,
                    m,
                    std_error: None,
                })
            }
        }
        Mechanism::Threshold(thr) => {
            let sums = threshold_sums(thr, s, f, cm);
            let val = sums.after.value() / mf;
            let base = sums.before.value() / mf;
            let mean_d = sums.diff.value() / mf;
            let var = if m > 1 {
                ((sums.diff_sq.value() - mf * mean_d * mean_d) / (mf - 1.0)).max(0.0)
            } else {
                0.0
            };
            Ok(GainReport {
                val: Some(val),
                baseline: base,
                gain: Some(val - base),
                unbounded: false,
                m,
                std_error: Some((var / mf).sqrt()),
            })
        }
    }
}

/// Fraction of samples with `w . x - b` in the closed interval `[-l, 0]`.
pub fn margin_density(s: &SampleSet, w: &[f64], b: f64, l: f64) -> Result<f64> {
    let m = s.non_empty()?;
    check_dim(s.dim(), w.len())?;
    check_unit(w)?;
    check_margin(l)?;
    let hits = par::count_by(m, |i| {
        let gap = dot(w, s.point(i)) - b;
        gap >= -l && gap <= 0.0
    });
    Ok(hits as f64 / m as f64)
}

/// `E[(b - w . x) 1(w . x - b in [-l, 0])]`.
pub fn soft_margin_density(s: &SampleSet, w: &[f64], b: f64, l: f64) -> Result<f64> {
    let m = s.non_empty()?;
    check_dim(s.dim(), w.len())?;
    check_unit(w)?;
    check_margin(l)?;
    Ok(par::sum_by(m, |i| {
        let gap = dot(w, s.point(i)) - b;
        if gap >= -l && gap <= 0.0 {
            -gap
        } else {
            0.0
        }
    }) / m as f64)
}

/// Threshold gain via `(w_g . w_f) * S-Den^{1/c}(w_g, b_g)`; requires a
/// linear (identity-transform) quality function.
pub fn gain_closed_form(g: &ThresholdMechanism, s: &SampleSet, f: &QualityFunction, cm: &CostModel) -> Result<f64> {
    if f.transform() != Transform::Identity {
        return Err(Error::UnsupportedTransform);
    }
    check_dim(s.dim(), f.dim())?;
    let corr = dot(g.w(), f.w());
    Ok(corr * soft_margin_density(s, g.w(), g.b(), cm.margin())?)
}

/// Fraction of samples within distance `1/c` (inclusive) of the halfspace
/// `{y : w . y >= b}`, members included.
pub fn reachable_mass_halfspace(s: &SampleSet, w: &[f64], b: f64, cm: &CostModel) -> Result<f64> {
    let m = s.non_empty()?;
    check_dim(s.dim(), w.len())?;
    check_unit(w)?;
    let l = cm.margin();
    let hits = par::count_by(m, |i| dot(w, s.point(i)) - b >= -l);
    Ok(hits as f64 / m as f64)
}

/// Fraction of samples that are accepted by `accept` or lie within distance
/// `1/c` (inclusive) of an accepted point of `candidates`.
///
/// For acceptance sets without a closed-form distance the caller supplies a
/// finite candidate set; the result is exact only relative to that set.
pub fn reachable_mass<F>(s: &SampleSet, accept: F, candidates: &[Vec<f64>], cm: &CostModel) -> Result<f64>
where
    F: Fn(&[f64]) -> bool + Sync + Send,
{
    let m = s.non_empty()?;
    for c in candidates {
        check_dim(s.dim(), c.len())?;
    }
    let accepted: Vec<&Vec<f64>> = candidates.iter().filter(|y| accept(y)).collect();
    let l = cm.margin();
    let hits = par::count_by(m, |i| {
        let x = s.point(i);
        accept(x) || accepted.iter().any(|y| distance(x, y) <= l)
    });
    Ok(hits as f64 / m as f64)
}
