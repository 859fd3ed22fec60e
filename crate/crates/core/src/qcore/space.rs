use serde::{Deserialize, Serialize};

use crate::error::{out_of_range, Error, Result};

/// Default cap on the total dimension of a factorized space.
pub const DEFAULT_DIM_CAP: usize = 1 << 14;

/// Ordered list of tensor-factor dimensions.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct HilbertFactorization {
    dims: Vec<usize>,
}

impl HilbertFactorization {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        Self::with_cap(dims, DEFAULT_DIM_CAP)
    }

    pub fn with_cap(dims: Vec<usize>, cap: usize) -> Result<Self> {
        if let Some(&bad) = dims.iter().find(|&&d| d < 2) {
            return Err(Error::InvalidFactor(bad));
        }
        let mut total: usize = 1;
        for &d in &dims {
            total = match total.checked_mul(d) {
                Some(t) if t <= cap => t,
                _ => {
                    return Err(Error::DimensionCap {
                        dim: total.saturating_mul(d),
                        cap,
                    })
                }
            };
        }
        Ok(Self { dims })
    }

    /// The trivial (scalar) space of dimension 1.
    pub fn scalar() -> Self {
        Self { dims: Vec::new() }
    }

    /// `n` factors of dimension `d`.
    pub fn uniform(n: usize, d: usize) -> Result<Self> {
        Self::new(vec![d; n])
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn num_factors(&self) -> usize {
        self.dims.len()
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().product()
    }

    /// Product of the first `keep` dimensions.
    pub fn prefix_dim(&self, keep: usize) -> usize {
        self.dims[..keep].iter().product()
    }

    pub fn prefix(&self, keep: usize) -> Result<Self> {
        if keep > self.dims.len() {
            return Err(out_of_range(
                "keep",
                keep,
                format!("0..={}", self.dims.len()),
            ));
        }
        Ok(Self {
            dims: self.dims[..keep].to_vec(),
        })
    }

    pub fn concat(&self, other: &Self) -> Result<Self> {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        Self::new(dims)
    }

    /// Splits a basis index into per-factor digits.
    pub fn digits(&self, mut index: usize) -> Vec<usize> {
        let mut out = vec![0; self.dims.len()];
        for (slot, &d) in out.iter_mut().zip(&self.dims).rev() {
            *slot = index % d;
            index /= d;
        }
        out
    }

    pub fn index(&self, digits: &[usize]) -> usize {
        digits
            .iter()
            .zip(&self.dims)
            .fold(0, |acc, (&digit, &d)| acc * d + digit)
    }
}

impl TryFrom<Vec<usize>> for HilbertFactorization {
    type Error = Error;
    fn try_from(dims: Vec<usize>) -> Result<Self> {
        Self::new(dims)
    }
}

impl From<HilbertFactorization> for Vec<usize> {
    fn from(f: HilbertFactorization) -> Vec<usize> {
        f.dims
    }
}
