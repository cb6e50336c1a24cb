use crate::error::{Error, Result};
use crate::metrics::{gain_closed_form, soft_margin_density};
use crate::model::{CostModel, Projection, QualityFunction, SampleSet, ThresholdMechanism, Transform};
use crate::numeric::{check_dim, dot};

use super::family::VisibleFrame;
use super::oracle::{AngularOracle, DensityOracle};
use super::{argmax_candidate, Candidate, DesignReport, DEFAULT_ANGULAR_STEPS, DEFAULT_MAX_GRID};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Algorithm1Params {
    /// Smoothing noise level of the sample set.
    pub sigma: f64,
    /// Radius of the base distribution.
    pub r: f64,
    pub eps: f64,
    pub angular_steps: usize,
    /// Largest admissible number of correlation values.
    pub max_grid: u64,
}

impl Algorithm1Params {
    pub fn new(sigma: f64, r: f64, eps: f64) -> Self {
        Self {
            sigma,
            r,
            eps,
            angular_steps: DEFAULT_ANGULAR_STEPS,
            max_grid: DEFAULT_MAX_GRID,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return Err(Error::param("sigma", format!("must be > 0, got {}", self.sigma)));
        }
        if !(self.r > 0.0 && self.r.is_finite()) {
            return Err(Error::param("r", format!("must be > 0, got {}", self.r)));
        }
        if !(self.eps > 0.0 && self.eps < 1.0) {
            return Err(Error::param("eps", format!("must lie in (0, 1), got {}", self.eps)));
        }
        if self.angular_steps == 0 {
            return Err(Error::param("angular_steps", "must be at least 1"));
        }
        Ok(())
    }
}

/// `min(eps^4, eps^2 sigma^4 / r^4)`.
pub fn epsilon_prime(eps: f64, sigma: f64, r: f64) -> f64 {
    let q = sigma / r;
    (eps.powi(4)).min(eps * eps * q.powi(4))
}

/// `floor(1 / eps') + 1`; the floor forgives a relative rounding error of 1e-12.
pub fn grid_len(eps_prime: f64) -> u64 {
    ((1.0 / eps_prime) * (1.0 + 1e-12)).floor() as u64 + 1
}

/// Relative correlations `t_i = i eps'` for `i < len - 1`, ending at exactly 1.
pub fn correlation_grid(eps_prime: f64, len: u64) -> Vec<f64> {
    (0..len)
        .map(|i| {
            if i + 1 == len {
                1.0
            } else {
                (i as f64 * eps_prime).min(1.0)
            }
        })
        .collect()
}

pub fn algorithm1(
    s: &SampleSet,
    p: &Projection,
    f: &QualityFunction,
    cm: &CostModel,
    params: &Algorithm1Params,
) -> Result<DesignReport> {
    let oracle = AngularOracle {
        angular_steps: params.angular_steps,
    };
    algorithm1_with_oracle(&oracle, s, p, f, cm, params)
}

/// For each correlation `eta` on the grid, asks the oracle for the densest
/// `(w, b)` of `K_eta`, keeps both `(w, b)` and `(w, b + 1/(2c))`, and returns
/// the candidate of largest `(w . w_f) S-Den`.
pub fn algorithm1_with_oracle(
    oracle: &dyn DensityOracle,
    s: &SampleSet,
    p: &Projection,
    f: &QualityFunction,
    cm: &CostModel,
    params: &Algorithm1Params,
) -> Result<DesignReport> {
    params.validate()?;
    if f.transform() != Transform::Identity {
        return Err(Error::UnsupportedTransform);
    }
    check_dim(p.dim(), s.dim())?;
    s.non_empty()?;
    let frame = VisibleFrame::new(p, f.w())?;
    let eps_prime = epsilon_prime(params.eps, params.sigma, params.r);
    let len = grid_len(eps_prime);
    if len > params.max_grid {
        return Err(Error::GridTooFine {
            required: len,
            cap: params.max_grid,
        });
    }
    let margin = cm.margin();
    let shift = margin / 2.0;
    let families: Vec<_> = correlation_grid(eps_prime, len)
        .into_iter()
        .map(|t| frame.family_at(t))
        .collect();
    let results = oracle.maximize_batch(s, margin, &families, shift)?;

    let mut candidates = Vec::with_capacity(2 * results.len());
    for item in results {
        let (r, soft) = match item {
            Ok(v) => v,
            Err(Error::EmptyFamily { .. }) => continue,
            Err(e) => return Err(e),
        };
        let corr = dot(&r.w, f.w());
        let (at_b, at_shifted) = match soft {
            Some(sd) => (sd.at_b, sd.at_shifted),
            None => (
                soft_margin_density(s, &r.w, r.b, margin)?,
                soft_margin_density(s, &r.w, r.b + shift, margin)?,
            ),
        };
        candidates.push(Candidate {
            w: r.w.clone(),
            b: r.b,
            gain: corr * at_b,
        });
        candidates.push(Candidate {
            w: r.w,
            b: r.b + shift,
            gain: corr * at_shifted,
        });
    }
    let Some(best) = argmax_candidate(&candidates) else {
        return Err(Error::param("projection", "no correlation value admits a direction"));
    };
    let chosen = ThresholdMechanism::new(candidates[best].w.clone(), candidates[best].b)?;
    let gain = gain_closed_form(&chosen, s, f, cm)?;
    Ok(DesignReport {
        chosen,
        gain,
        candidates,
        oracle_calls: len,
        epsilon_prime: Some(eps_prime),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::{self, GeneratorKind, GeneratorSpec, SmoothingSpec};

    #[test]
    fn epsilon_prime_and_grid() {
        assert!((epsilon_prime(0.1, 1.0, 1.0) - 1e-4).abs() < 1e-18);
        assert!((epsilon_prime(0.05, 0.2, 1.0) - 4e-6).abs() < 1e-18);
        assert_eq!(grid_len(4e-6), 250_001);
        assert_eq!(grid_len(0.3), 4);
        assert_eq!(grid_len(0.25), 5);
        let g = correlation_grid(0.3, 4);
        assert_eq!(g, vec![0.0, 0.3, 0.6, 1.0]);
    }

    fn instance(k: usize, m: usize, seed: u64) -> (SampleSet, Projection, QualityFunction) {
        let spec = GeneratorSpec {
            kind: GeneratorKind::UniformBall { r: 1.0 },
            n: 3,
            seed,
        };
        let base = distributions::sample(&spec, m).unwrap();
        let s = distributions::smooth(&base, &SmoothingSpec { sigma: 0.5 }, seed).unwrap();
        let p = Projection::coordinates(3, &(0..k).collect::<Vec<_>>()).unwrap();
        let a = 1.0 / 3f64.sqrt();
        (s, p, QualityFunction::linear(vec![a, a, a], 0.0).unwrap())
    }

    #[test]
    fn report_shape() {
        let (s, p, f) = instance(2, 2000, 1);
        let cm = CostModel::new(3.0).unwrap();
        let params = Algorithm1Params::new(0.5, 1.0, 0.5);
        let rep = algorithm1(&s, &p, &f, &cm, &params).unwrap();
        let len = grid_len(epsilon_prime(0.5, 0.5, 1.0));
        assert_eq!(rep.oracle_calls, len);
        assert_eq!(rep.candidates.len() as u64, 2 * len);
        let best = rep.candidates.iter().map(|c| c.gain).fold(f64::MIN, f64::max);
        assert!((rep.gain - best).abs() < 1e-9);
        assert!(p.check_visible(rep.chosen.w()).is_ok());
        for pair in rep.candidates.chunks(2) {
            assert_eq!(pair[0].w, pair[1].w);
            assert!((pair[1].b - pair[0].b - 1.0 / 6.0).abs() < 1e-15);
        }
    }

    #[test]
    fn rank_one_counts_every_call() {
        let (s, p, f) = instance(1, 500, 2);
        let cm = CostModel::new(2.0).unwrap();
        let params = Algorithm1Params::new(0.5, 1.0, 0.5);
        let rep = algorithm1(&s, &p, &f, &cm, &params).unwrap();
        assert_eq!(rep.oracle_calls, grid_len(epsilon_prime(0.5, 0.5, 1.0)));
        assert_eq!(rep.candidates.len(), 2);
    }

    #[test]
    fn grid_cap_and_preconditions() {
        let (s, p, f) = instance(2, 100, 3);
        let cm = CostModel::new(2.0).unwrap();
        let mut params = Algorithm1Params::new(0.5, 1.0, 0.5);
        params.max_grid = 10;
        assert!(matches!(
            algorithm1(&s, &p, &f, &cm, &params),
            Err(Error::GridTooFine { required: 65, cap: 10 })
        ));
        assert!(algorithm1(&s, &p, &f, &cm, &Algorithm1Params::new(0.0, 1.0, 0.5)).is_err());
        assert!(algorithm1(&s, &p, &f, &cm, &Algorithm1Params::new(0.5, 1.0, 1.0)).is_err());
    }
}
