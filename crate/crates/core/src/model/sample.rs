use std::ops::Deref;

use serde::{Deserialize, Serialize};

use crate::distributions::Provenance;
use crate::error::{Error, Result};
use crate::numeric::{check_dim, check_finite};

/// A single agent's true feature vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct FeatureVector(Vec<f64>);

impl FeatureVector {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        check_finite(&coords)?;
        Ok(Self(coords))
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl Deref for FeatureVector {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl TryFrom<Vec<f64>> for FeatureVector {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<FeatureVector> for Vec<f64> {
    fn from(v: FeatureVector) -> Self {
        v.0
    }
}

/// A finite population of agents, stored row-major.
///
/// `radius` is the declared radius of the pre-smoothing support; smoothed
/// points are allowed to lie outside it.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet {
    dim: usize,
    coords: Vec<f64>,
    radius: f64,
    provenance: Provenance,
}

impl SampleSet {
    pub fn from_flat(dim: usize, coords: Vec<f64>, radius: f64, provenance: Provenance) -> Result<Self> {
        if dim == 0 {
            return Err(Error::param("n", "dimension must be at least 1"));
        }
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::param("r", format!("radius must be positive, got {radius}")));
        }
        if !coords.len().is_multiple_of(dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: coords.len() % dim,
            });
        }
        check_finite(&coords)?;
        Ok(Self {
            dim,
            coords,
            radius,
            provenance,
        })
    }

    pub fn from_rows<I>(dim: usize, rows: I, radius: f64, provenance: Provenance) -> Result<Self>
    where
        I: IntoIterator,
        I::Item: AsRef<[f64]>,
    {
        let mut coords = Vec::new();
        for row in rows {
            let row = row.as_ref();
            check_dim(dim, row.len())?;
            coords.extend_from_slice(row);
        }
        Self::from_flat(dim, coords, radius, provenance)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn with_provenance(mut self, provenance: Provenance) -> Self {
        self.provenance = provenance;
        self
    }

    #[inline]
    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn points(&self) -> std::slice::ChunksExact<'_, f64> {
        self.coords.chunks_exact(self.dim)
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub(crate) fn coords_mut(&mut self) -> &mut [f64] {
        &mut self.coords
    }

    pub(crate) fn non_empty(&self) -> Result<usize> {
        if self.is_empty() {
            Err(Error::EmptySampleSet)
        } else {
            Ok(self.len())
        }
    }
}
