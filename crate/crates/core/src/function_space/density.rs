use nalgebra::DVector;

use crate::error::{Error, Result};

/// A finite object set 𝒳 = {x₁, …, x_k}.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteSpace {
    size: usize,
    labels: Option<Vec<String>>,
}

impl FiniteSpace {
    pub fn new(size: usize) -> Result<Self> {
        if size == 0 {
            return Err(Error::EmptySpace);
        }
        Ok(Self { size, labels: None })
    }

    pub fn with_labels(labels: Vec<String>) -> Result<Self> {
        let mut space = Self::new(labels.len())?;
        space.labels = Some(labels);
        Ok(space)
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }
}

/// Vectors of the function space ℝᵏ over a finite space.
pub type FnVector = DVector<f64>;

/// The constant function e(x) ≡ 1.
pub fn ones(k: usize) -> FnVector {
    DVector::from_element(k, 1.0)
}

/// A point on the probability simplex.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityVector {
    values: FnVector,
}

impl DensityVector {
    /// Sums within this distance of 1 are accepted as they are.
    pub const SUM_TOLERANCE: f64 = 1e-12;
    /// Sums within this distance of 1 are silently renormalized.
    pub const RENORMALIZE_TOLERANCE: f64 = 1e-9;

    pub fn new(values: Vec<f64>) -> Result<Self> {
        Self::from_vector(DVector::from_vec(values))
    }

    pub fn from_vector(values: FnVector) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptySpace);
        }
        for (index, &value) in values.iter().enumerate() {
            if !value.is_finite() {
                return Err(Error::NonFinite { index, value });
            }
            if value < 0.0 {
                return Err(Error::NegativeMass { index, value });
            }
        }
        let sum: f64 = values.iter().sum();
        let dev = (sum - 1.0).abs();
        if dev <= Self::SUM_TOLERANCE {
            Ok(Self { values })
        } else if dev <= Self::RENORMALIZE_TOLERANCE {
            Ok(Self {
                values: values / sum,
            })
        } else {
            Err(Error::NotNormalized { sum })
        }
    }

    pub fn uniform(k: usize) -> Result<Self> {
        FiniteSpace::new(k)?;
        Self::from_vector(DVector::from_element(k, 1.0 / k as f64))
    }

    pub fn point_mass(k: usize, index: usize) -> Result<Self> {
        if index >= k {
            return Err(Error::DimensionMismatch {
                expected: k,
                got: index + 1,
            });
        }
        let mut v = DVector::zeros(k);
        v[index] = 1.0;
        Self::from_vector(v)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn space(&self) -> FiniteSpace {
        FiniteSpace {
            size: self.len(),
            labels: None,
        }
    }

    pub fn vector(&self) -> &FnVector {
        &self.values
    }

    pub fn as_slice(&self) -> &[f64] {
        self.values.as_slice()
    }

    pub fn into_vector(self) -> FnVector {
        self.values
    }

    pub fn min(&self) -> f64 {
        self.values.min()
    }

    /// Whether every point carries strictly positive mass.
    pub fn has_full_support(&self) -> bool {
        self.values.iter().all(|&v| v > 0.0)
    }

    /// Difference `self − other` as a function-space vector.
    pub fn diff(&self, other: &DensityVector) -> Result<FnVector> {
        check_len(self.len(), other.len())?;
        Ok(&self.values - &other.values)
    }
}

pub(crate) fn check_len(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(Error::DimensionMismatch { expected, got });
    }
    Ok(())
}
