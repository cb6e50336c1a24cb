//! Deterministic quasi-uniform point sets on unit spheres.

use std::f64::consts::TAU;

use statrs::distribution::{ContinuousCDF, Normal};

/// `count` points on the unit sphere of `R^dim`.
///
/// * `dim = 1`: the two points `+1, -1` regardless of `count`.
/// * `dim = 2`: angles `2 pi j / count`; the set for `2 count` contains the set for `count`.
/// * `dim >= 3`: the additive recurrence `frac(1/2 + j alpha)` with
///   `alpha_i = phi_dim^-i` (`phi_dim` the root of `x^(dim+1) = x + 1`), mapped
///   through the inverse normal CDF and normalized. Prefixes are nested.
pub fn sphere_points(dim: usize, count: usize) -> Vec<Vec<f64>> {
    match dim {
        0 => Vec::new(),
        1 => vec![vec![1.0], vec![-1.0]],
        2 => (0..count)
            .map(|j| {
                let theta = TAU * (j as f64 / count as f64);
                vec![theta.cos(), theta.sin()]
            })
            .collect(),
        _ => recurrence_points(dim, count),
    }
}

fn generalized_golden(dim: usize) -> f64 {
    let mut x = 2.0f64;
    for _ in 0..64 {
        x = (1.0 + x).powf(1.0 / (dim as f64 + 1.0));
    }
    x
}

fn recurrence_points(dim: usize, count: usize) -> Vec<Vec<f64>> {
    let phi = generalized_golden(dim);
    let alpha: Vec<f64> = (1..=dim).map(|i| phi.powi(-(i as i32))).collect();
    let normal = Normal::standard();
    (0..count)
        .map(|j| {
            let mut v: Vec<f64> = alpha
                .iter()
                .map(|a| {
                    let u = (0.5 + j as f64 * a).fract().clamp(1e-12, 1.0 - 1e-12);
                    normal.inverse_cdf(u)
                })
                .collect();
            let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if n > 0.0 {
                v.iter_mut().for_each(|x| *x /= n);
            } else {
                v = vec![0.0; dim];
                v[0] = 1.0;
            }
            v
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_unit() {
        for dim in 1..6 {
            for p in sphere_points(dim, 100) {
                let n = p.iter().map(|x| x * x).sum::<f64>().sqrt();
                assert!((n - 1.0).abs() < 1e-12);
                assert_eq!(p.len(), dim);
            }
        }
    }

    #[test]
    fn circle_doubling_is_superset() {
        let small = sphere_points(2, 64);
        let big = sphere_points(2, 128);
        for p in &small {
            assert!(big.iter().any(|q| q == p));
        }
    }

    #[test]
    fn recurrence_prefix_nested_and_spread() {
        let a = sphere_points(3, 50);
        let b = sphere_points(3, 500);
        assert_eq!(&b[..50], &a[..]);
        // every octant is hit
        let mut seen = [false; 8];
        for p in &b {
            let idx = (p[0] > 0.0) as usize | ((p[1] > 0.0) as usize) << 1 | ((p[2] > 0.0) as usize) << 2;
            seen[idx] = true;
        }
        assert!(seen.iter().all(|&s| s));
    }

    #[test]
    fn golden_root() {
        let phi = generalized_golden(1);
        assert!((phi - (1.0 + 5f64.sqrt()) / 2.0).abs() < 1e-12);
    }
}
