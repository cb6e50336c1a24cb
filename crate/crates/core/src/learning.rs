//! Designing from finite samples and the empirical convergence sweep.

use serde::{Deserialize, Serialize};

use crate::distributions::{self, mix_seed, GeneratorSpec, SmoothingSpec};
use crate::error::{Error, Result};
use crate::metrics::gain_closed_form;
use crate::model::{CostModel, Projection, QualityFunction, SampleSet};
use crate::par;
use crate::threshold::{algorithm1, baseline_4rc, bruteforce_opt, Algorithm1Params, Candidate, DesignReport};

/// Which threshold design routine to run on a training set.
#[derive(Debug, Clone, PartialEq)]
pub enum DesignMethod {
    Algorithm1(Algorithm1Params),
    Baseline { r: f64 },
    BruteForce { direction_grid: usize, bias_grid: usize },
}

/// Runs the chosen design routine on `s_train` alone.
pub fn design_from_samples(
    s_train: &SampleSet,
    p: &Projection,
    f: &QualityFunction,
    cm: &CostModel,
    method: &DesignMethod,
) -> Result<DesignReport> {
    match method {
        DesignMethod::Algorithm1(params) => algorithm1(s_train, p, f, cm, params),
        DesignMethod::Baseline { r } => baseline_4rc(s_train, p, f, cm, *r),
        DesignMethod::BruteForce {
            direction_grid,
            bias_grid,
        } => {
            let res = bruteforce_opt(s_train, p, f, cm, *direction_grid, *bias_grid)?;
            Ok(DesignReport {
                candidates: vec![Candidate {
                    w: res.mechanism.w().to_vec(),
                    b: res.mechanism.b(),
                    gain: res.gain,
                }],
                chosen: res.mechanism,
                gain: res.gain,
                oracle_calls: 0,
                epsilon_prime: None,
            })
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepPlan {
    pub m_list: Vec<usize>,
    pub trials: usize,
    /// Defaults to ten times the largest training size.
    #[serde(default)]
    pub holdout_m: Option<usize>,
}

impl SweepPlan {
    pub fn holdout_size(&self) -> usize {
        self.holdout_m
            .unwrap_or_else(|| 10 * self.m_list.iter().copied().max().unwrap_or(0))
    }

    pub fn validate(&self) -> Result<()> {
        if self.m_list.is_empty() {
            return Err(Error::param("m_list", "must contain at least one sample size"));
        }
        if self.m_list[0] == 0 || self.m_list.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::param("m_list", "must be positive and strictly increasing"));
        }
        if self.trials == 0 {
            return Err(Error::param("trials", "must be at least 1"));
        }
        let max = *self.m_list.last().expect("nonempty");
        if self.holdout_size() < 10 * max {
            return Err(Error::param(
                "holdout_m",
                format!("must be at least 10 x {max}, got {}", self.holdout_size()),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub m: usize,
    pub trial: usize,
    pub empirical_gain: f64,
    pub holdout_gain: f64,
    pub gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
}

impl SweepResult {
    /// `(m, median gap over trials)` in `m` order.
    pub fn median_gaps(&self) -> Vec<(usize, f64)> {
        let mut out: Vec<(usize, f64)> = Vec::new();
        let mut ms: Vec<usize> = self.rows.iter().map(|r| r.m).collect();
        ms.dedup();
        for m in ms {
            let gaps: Vec<f64> = self.rows.iter().filter(|r| r.m == m).map(|r| r.gap).collect();
            out.push((m, median(&gaps)));
        }
        out
    }
}

pub fn median(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    let mut v = values.to_vec();
    v.sort_unstable_by(f64::total_cmp);
    let h = v.len() / 2;
    if v.len() % 2 == 1 {
        v[h]
    } else {
        0.5 * (v[h - 1] + v[h])
    }
}

/// Least-squares slope of `ln y` against `ln x`, ignoring points with a
/// non-positive coordinate. `None` with fewer than two usable points.
pub fn fit_loglog_slope(points: &[(f64, f64)]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = points
        .iter()
        .filter(|(x, y)| *x > 0.0 && *y > 0.0)
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

const TRAIN_SALT: u64 = 0x7472_6169_6e00_0000;
const TRAIN_NOISE_SALT: u64 = 0x7472_6169_6e6e_0000;
const HOLDOUT_SALT: u64 = 0x686f_6c64_6f75_7400;
const HOLDOUT_NOISE_SALT: u64 = 0x686f_6c64_6e00_0000;

fn draw(spec: &GeneratorSpec, sm: &SmoothingSpec, m: usize, gen_seed: u64, noise_seed: u64) -> Result<SampleSet> {
    let spec = GeneratorSpec {
        seed: gen_seed,
        ..spec.clone()
    };
    let base = distributions::sample(&spec, m)?;
    distributions::smooth(&base, sm, noise_seed)
}

/// For every `(m, trial)`, designs on fresh `m` smoothed samples and scores the
/// result on one shared holdout set. Seeds derive from `seed` alone.
#[allow(clippy::too_many_arguments)]
pub fn convergence_sweep(
    spec: &GeneratorSpec,
    sm: &SmoothingSpec,
    p: &Projection,
    f: &QualityFunction,
    cm: &CostModel,
    method: &DesignMethod,
    plan: &SweepPlan,
    seed: u64,
) -> Result<SweepResult> {
    plan.validate()?;
    let holdout = draw(
        spec,
        sm,
        plan.holdout_size(),
        mix_seed(seed, HOLDOUT_SALT),
        mix_seed(seed, HOLDOUT_NOISE_SALT),
    )?;
    let jobs: Vec<(usize, usize)> = plan
        .m_list
        .iter()
        .flat_map(|&m| (0..plan.trials).map(move |t| (m, t)))
        .collect();
    let rows = par::map_indexed(jobs.len(), |j| {
        let (m, trial) = jobs[j];
        let key = ((m as u64) << 20) ^ trial as u64;
        let train = draw(
            spec,
            sm,
            m,
            mix_seed(mix_seed(seed, TRAIN_SALT), key),
            mix_seed(mix_seed(seed, TRAIN_NOISE_SALT), key),
        )?;
        let report = design_from_samples(&train, p, f, cm, method)?;
        let holdout_gain = gain_closed_form(&report.chosen, &holdout, f, cm)?;
        Ok(SweepRow {
            m,
            trial,
            empirical_gain: report.gain,
            holdout_gain,
            gap: (report.gain - holdout_gain).abs(),
        })
    });
    Ok(SweepResult {
        rows: rows.into_iter().collect::<Result<Vec<_>>>()?,
    })
}
