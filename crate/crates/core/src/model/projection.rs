use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{check_dim, check_finite, dot, gram_schmidt, norm, GEOMETRY_TOL};

/// Orthogonal projection onto the visible subspace `Img(P)`, stored as
/// `k` orthonormal basis rows of length `n`. The induced map is
/// `P = basis^T basis`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawProjection")]
pub struct Projection {
    basis: Vec<Vec<f64>>,
}

#[derive(Deserialize)]
struct RawProjection {
    basis: Vec<Vec<f64>>,
}

impl TryFrom<RawProjection> for Projection {
    type Error = Error;

    fn try_from(raw: RawProjection) -> Result<Self> {
        Self::new(raw.basis)
    }
}

impl Projection {
    /// Validates that `basis` rows are orthonormal within 1e-9.
    pub fn new(basis: Vec<Vec<f64>>) -> Result<Self> {
        let Some(first) = basis.first() else {
            return Err(Error::param("projection", "basis must contain at least one row"));
        };
        let n = first.len();
        if n == 0 {
            return Err(Error::param("projection", "basis rows must be non-empty"));
        }
        if basis.len() > n {
            return Err(Error::param(
                "projection",
                format!("rank {} exceeds dimension {n}", basis.len()),
            ));
        }
        for row in &basis {
            check_dim(n, row.len())?;
            check_finite(row)?;
        }
        for i in 0..basis.len() {
            for j in i..basis.len() {
                let value = dot(&basis[i], &basis[j]);
                let target = if i == j { 1.0 } else { 0.0 };
                if (value - target).abs() > GEOMETRY_TOL {
                    return Err(Error::NotOrthonormal { i, j, value });
                }
            }
        }
        Ok(Self { basis })
    }

    /// Orthonormalizes an arbitrary spanning set of rows.
    pub fn from_spanning(rows: &[Vec<f64>]) -> Result<Self> {
        Self::new(gram_schmidt(rows, 1e-12))
    }

    pub fn identity(n: usize) -> Self {
        Self::coordinates(n, &(0..n).collect::<Vec<_>>()).expect("identity projection is valid")
    }

    /// Projection onto the listed coordinate axes (0-based).
    pub fn coordinates(n: usize, axes: &[usize]) -> Result<Self> {
        let mut basis = Vec::with_capacity(axes.len());
        for &a in axes {
            if a >= n {
                return Err(Error::param("axes", format!("axis {a} out of range for dimension {n}")));
            }
            let mut row = vec![0.0; n];
            row[a] = 1.0;
            basis.push(row);
        }
        Self::new(basis)
    }

    pub fn dim(&self) -> usize {
        self.basis[0].len()
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vec<f64>] {
        &self.basis
    }

    /// Coordinates of `x` in the basis, `basis . x`.
    pub fn coords(&self, x: &[f64]) -> Vec<f64> {
        self.basis.iter().map(|row| dot(row, x)).collect()
    }

    /// Maps basis coordinates back to the ambient space, `basis^T y`.
    pub fn lift(&self, y: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim()];
        for (row, &c) in self.basis.iter().zip(y) {
            out.iter_mut().zip(row).for_each(|(o, r)| *o += c * r);
        }
        out
    }

    pub(crate) fn apply_unchecked(&self, x: &[f64]) -> Vec<f64> {
        self.lift(&self.coords(x))
    }

    /// `P x`.
    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.dim(), x.len())?;
        Ok(self.apply_unchecked(x))
    }

    /// `|w - P w|`.
    pub fn residual(&self, w: &[f64]) -> f64 {
        let pw = self.apply_unchecked(w);
        w.iter().zip(&pw).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt()
    }

    pub fn check_visible(&self, w: &[f64]) -> Result<()> {
        check_dim(self.dim(), w.len())?;
        let residual = self.residual(w);
        if residual <= GEOMETRY_TOL * norm(w).max(1.0) {
            Ok(())
        } else {
            Err(Error::NotVisible { residual })
        }
    }
}

/// Free-function form of [`Projection::apply`].
pub fn project(p: &Projection, x: &[f64]) -> Result<Vec<f64>> {
    p.apply(x)
}
