use crate::error::{Error, Result};
use crate::numeric::{check_dim, check_unit, dot};

/// Unit vector `w = a w1 + b w2` in the span of `w1, w2` with
/// `w . w2 = w1 . w2 + eps` and `w . w1 >= 1 - eps`.
///
/// `a = sqrt((1 - (omega+eps)^2) / (1 - omega^2))` and
/// `b = (omega + eps) - a omega`, valid for either sign of `omega + eps`.
pub fn discretize_direction(w1: &[f64], w2: &[f64], eps: f64) -> Result<Vec<f64>> {
    check_dim(w1.len(), w2.len())?;
    check_unit(w1)?;
    check_unit(w2)?;
    if !(0.0..1.0).contains(&eps) {
        return Err(Error::param("eps", format!("must lie in [0, 1), got {eps}")));
    }
    if eps == 0.0 {
        return Ok(w1.to_vec());
    }
    let omega = dot(w1, w2).clamp(-1.0, 1.0);
    let limit = 1.0 - 2.0 * eps;
    if omega > limit {
        return Err(Error::DirectionsTooAligned { omega, limit });
    }
    if 1.0 + omega <= 1e-12 {
        return Err(Error::AntipodalDirections { omega });
    }
    let target = omega + eps;
    let alpha = (((1.0 - target) * (1.0 + target)) / ((1.0 - omega) * (1.0 + omega))).sqrt();
    let beta = target - alpha * omega;
    Ok(w1.iter().zip(w2).map(|(a, b)| alpha * a + beta * b).collect())
}
