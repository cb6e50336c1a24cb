use std::cmp::Ordering;
use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::metrics::gain_closed_form;
use crate::model::{CostModel, Projection, QualityFunction, SampleSet, ThresholdMechanism, Transform};
use crate::numeric::{check_dim, dot};
use crate::par;

use super::family::VisibleFrame;
use super::preference;
use super::window::sort;

pub const MAX_BRUTE_FORCE_RANK: usize = 3;

#[derive(Debug, Clone, PartialEq)]
pub struct BruteForceResult {
    pub mechanism: ThresholdMechanism,
    pub gain: f64,
}

/// Frame coefficients of `count` unit directions covering the whole sphere of
/// `Img(P)`, starting with the pole `P w_f / |P w_f|`. Doubling `count` gives a
/// superset.
pub fn visible_direction_grid(rank: usize, count: usize) -> Vec<Vec<f64>> {
    match rank {
        1 => [vec![1.0], vec![-1.0]].into_iter().take(count.min(2)).collect(),
        2 => (0..count)
            .map(|j| {
                let theta = TAU * (j as f64 / count as f64);
                vec![theta.cos(), theta.sin()]
            })
            .collect(),
        _ => {
            let golden = (5f64.sqrt() - 1.0) / 2.0;
            (0..count)
                .map(|j| {
                    let z = 1.0 - 2.0 * van_der_corput(j as u64);
                    let rho = ((1.0 - z) * (1.0 + z)).max(0.0).sqrt();
                    let phi = TAU * (j as f64 * golden).fract();
                    vec![z, rho * phi.cos(), rho * phi.sin()]
                })
                .collect()
        }
    }
}

fn van_der_corput(mut j: u64) -> f64 {
    let mut x = 0.0;
    let mut base = 0.5;
    while j > 0 {
        if j & 1 == 1 {
            x += base;
        }
        base *= 0.5;
        j >>= 1;
    }
    x
}

/// Scans `direction_grid` directions of `Img(P)` and `bias_grid` biases per
/// direction and returns the best threshold by closed-form gain.
///
/// Biases are `lo + (hi - lo) j / bias_grid` for `j = 1..=bias_grid` with
/// `lo = min w.x` and `hi = max w.x + 1/c`: every bias whose margin holds a
/// sample lies in `[lo, hi]`, and doubling the grid gives a superset.
pub fn bruteforce_opt(
    s: &SampleSet,
    p: &Projection,
    f: &QualityFunction,
    cm: &CostModel,
    direction_grid: usize,
    bias_grid: usize,
) -> Result<BruteForceResult> {
    if p.rank() > MAX_BRUTE_FORCE_RANK {
        return Err(Error::RankTooHigh {
            rank: p.rank(),
            max: MAX_BRUTE_FORCE_RANK,
        });
    }
    if f.transform() != Transform::Identity {
        return Err(Error::UnsupportedTransform);
    }
    if direction_grid == 0 || bias_grid == 0 {
        return Err(Error::param("grid", "direction and bias grids must be nonempty"));
    }
    check_dim(p.dim(), s.dim())?;
    let m = s.non_empty()?;
    let frame = VisibleFrame::new(p, f.w())?;
    let y = frame.sample_coords(s)?;
    let l = cm.margin();
    let coefs = visible_direction_grid(frame.rank(), direction_grid);

    let per_direction = par::map_indexed(coefs.len(), |d| {
        let w = frame.direction(&coefs[d]);
        let corr = dot(&w, f.w());
        let mut proj: Vec<f64> = (0..m)
            .map(|i| coefs[d].iter().zip(&y).map(|(c, col)| c * col[i]).sum())
            .collect();
        sort(&mut proj);
        let mut prefix = Vec::with_capacity(m + 1);
        prefix.push(0.0);
        let mut acc = 0.0;
        for v in &proj {
            acc += v;
            prefix.push(acc);
        }
        let lo = proj[0];
        let hi = proj[m - 1] + l;
        let mut best = (f64::NEG_INFINITY, 0.0);
        // Biases increase with j, so both window ends only move forward.
        let (mut i0, mut i1) = (0, 0);
        for j in 1..=bias_grid {
            let b = lo + (hi - lo) * (j as f64 / bias_grid as f64);
            while i0 < m && proj[i0] - b < -l {
                i0 += 1;
            }
            while i1 < m && proj[i1] - b <= 0.0 {
                i1 += 1;
            }
            let soft = ((i1 - i0) as f64 * b - (prefix[i1] - prefix[i0])) / m as f64;
            let gain = corr * soft;
            if preference((gain, b, &w), (best.0, best.1, &w)) == Ordering::Greater {
                best = (gain, b);
            }
        }
        (best.0, best.1, w)
    });

    let mut best = &per_direction[0];
    for cand in &per_direction[1..] {
        if preference((cand.0, cand.1, &cand.2), (best.0, best.1, &best.2)) == Ordering::Greater {
            best = cand;
        }
    }
    let mechanism = ThresholdMechanism::new(best.2.clone(), best.1)?;
    let gain = gain_closed_form(&mechanism, s, f, cm)?;
    Ok(BruteForceResult { mechanism, gain })
}
