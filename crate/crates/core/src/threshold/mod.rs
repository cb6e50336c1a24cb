//! Threshold mechanism design: direction discretization, the margin-density
//! oracle, the fixed-direction baseline, the correlation-grid approximation
//! algorithm and a brute-force validator.

mod algorithm1;
mod baseline;
mod bruteforce;
mod discretize;
mod family;
mod oracle;
mod sphere;
mod window;

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::model::ThresholdMechanism;
use crate::numeric::lex_cmp;

pub use algorithm1::{algorithm1, algorithm1_with_oracle, correlation_grid, epsilon_prime, grid_len, Algorithm1Params};
pub use baseline::{baseline_4rc, baseline_bias_grid};
pub use bruteforce::{bruteforce_opt, visible_direction_grid, BruteForceResult};
pub use discretize::discretize_direction;
pub use family::{DirectionFamily, VisibleFrame};
pub use oracle::{density_oracle, AngularOracle, BatchItem, DensityOracle, OracleResult, ShiftedSoftDensity};
pub use sphere::sphere_points;
pub use window::best_bias_for_direction;

pub const DEFAULT_ANGULAR_STEPS: usize = 4096;
pub const DEFAULT_MAX_GRID: u64 = 10_000_000;

/// A scored candidate mechanism.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    pub w: Vec<f64>,
    pub b: f64,
    pub gain: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesignReport {
    pub chosen: ThresholdMechanism,
    /// Gain of `chosen` on the design sample set.
    pub gain: f64,
    pub candidates: Vec<Candidate>,
    pub oracle_calls: u64,
    pub epsilon_prime: Option<f64>,
}

/// Ordering used by every argmax: larger score, then smaller `|b|`, then
/// lexicographically smaller `w`. `Greater` means `a` is preferred.
pub(crate) fn preference(a: (f64, f64, &[f64]), b: (f64, f64, &[f64])) -> Ordering {
    a.0.total_cmp(&b.0)
        .then_with(|| b.1.abs().total_cmp(&a.1.abs()))
        .then_with(|| b.1.total_cmp(&a.1))
        .then_with(|| lex_cmp(b.2, a.2))
}

/// Index of the preferred candidate (first wins on exact ties).
pub(crate) fn argmax_candidate(candidates: &[Candidate]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, c) in candidates.iter().enumerate() {
        best = match best {
            Some(j) => {
                let o = &candidates[j];
                if preference((c.gain, c.b, &c.w), (o.gain, o.b, &o.w)) == Ordering::Greater {
                    Some(i)
                } else {
                    Some(j)
                }
            }
            None => Some(i),
        };
    }
    best
}
