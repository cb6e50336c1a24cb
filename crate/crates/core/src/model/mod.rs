//! Agents, quality functions, projections, mechanisms and best responses.

mod mechanism;
mod projection;
mod quality;
mod response;
mod sample;

pub use mechanism::{CostModel, LinearMechanism, Mechanism, ThresholdMechanism};
pub use projection::{project, Projection};
pub use quality::{eval_quality, QualityFunction, Transform};
pub use response::{best_response, best_response_linear, best_response_threshold, cost, utility, BestResponse};
pub use sample::{FeatureVector, SampleSet};

pub(crate) use response::{move_to_boundary, threshold_move_gap};
