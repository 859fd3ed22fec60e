use nalgebra::{DMatrix, DVector};

use super::linalg::{hermiticity_defect, spectrum, symmetrize};
use super::{CMatrix, CVector, HilbertFactorization, C64, STATE_TOL};
use crate::error::{out_of_range, Error, Result};

/// Normalized pure state on a factorized space.
#[derive(Clone, Debug)]
pub struct Ket {
    factorization: HilbertFactorization,
    amplitudes: CVector,
}

impl Ket {
    pub fn new(factorization: HilbertFactorization, amplitudes: CVector) -> Result<Self> {
        let dim = factorization.total_dim();
        if amplitudes.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                actual: amplitudes.len(),
            });
        }
        let norm_sq = amplitudes.norm_squared();
        if (norm_sq - 1.0).abs() > STATE_TOL {
            return Err(Error::InvalidState(format!("squared norm {norm_sq} != 1")));
        }
        Ok(Self {
            factorization,
            amplitudes,
        })
    }

    /// Rescales `amplitudes` to unit norm before validating.
    pub fn normalized(factorization: HilbertFactorization, amplitudes: CVector) -> Result<Self> {
        let norm = amplitudes.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::InvalidState("cannot normalize a zero vector".into()));
        }
        Self::new(factorization, amplitudes.unscale(norm))
    }

    pub fn basis(factorization: HilbertFactorization, index: usize) -> Result<Self> {
        let dim = factorization.total_dim();
        if index >= dim {
            return Err(out_of_range("basis index", index, format!("0..{dim}")));
        }
        let mut amplitudes = CVector::zeros(dim);
        amplitudes[index] = C64::new(1.0, 0.0);
        Ok(Self {
            factorization,
            amplitudes,
        })
    }

    /// `Σ_j sqrt(p_j) |j⟩|j⟩` on `[len, len]`: the Schmidt-diagonal state with
    /// Schmidt probabilities `probs`.
    pub fn schmidt_diagonal(probs: &[f64]) -> Result<Self> {
        let n = probs.len();
        let factorization = HilbertFactorization::new(vec![n, n])?;
        let mut amplitudes = CVector::zeros(n * n);
        for (j, &p) in probs.iter().enumerate() {
            if p < 0.0 {
                return Err(Error::InvalidState(format!(
                    "negative schmidt probability {p}"
                )));
            }
            amplitudes[j * n + j] = C64::new(p.sqrt(), 0.0);
        }
        Self::new(factorization, amplitudes)
    }

    pub fn factorization(&self) -> &HilbertFactorization {
        &self.factorization
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn inner(&self, other: &Ket) -> Result<C64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: other.dim(),
            });
        }
        Ok(self.amplitudes.dotc(&other.amplitudes))
    }

    pub fn to_density(&self) -> DensityMatrix {
        let m = &self.amplitudes * self.amplitudes.adjoint();
        DensityMatrix::from_trusted(self.factorization.clone(), m)
    }
}

/// Positive semidefinite, unit-trace operator on a factorized space.
#[derive(Clone, Debug)]
pub struct DensityMatrix {
    factorization: HilbertFactorization,
    entries: CMatrix,
}

impl DensityMatrix {
    /// Checks that `entries` is a density matrix to within 1e-10, then stores
    /// the symmetrized matrix.
    pub fn new(factorization: HilbertFactorization, entries: CMatrix) -> Result<Self> {
        let dim = factorization.total_dim();
        if entries.nrows() != dim || entries.ncols() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                actual: entries.nrows().max(entries.ncols()),
            });
        }
        let defect = hermiticity_defect(&entries);
        if defect > STATE_TOL {
            return Err(Error::NotHermitian(defect));
        }
        let entries = symmetrize(&entries);
        let trace = entries.trace();
        if (trace.re - 1.0).abs() > STATE_TOL || trace.im.abs() > STATE_TOL {
            return Err(Error::InvalidState(format!("trace {trace} != 1")));
        }
        let min_eig = spectrum(&entries).into_iter().fold(f64::INFINITY, f64::min);
        if min_eig < -STATE_TOL {
            return Err(Error::InvalidState(format!(
                "negative eigenvalue {min_eig}"
            )));
        }
        Ok(Self {
            factorization,
            entries,
        })
    }

    /// For results of operations that preserve validity; symmetrizes only.
    pub(crate) fn from_trusted(factorization: HilbertFactorization, entries: CMatrix) -> Self {
        debug_assert_eq!(entries.nrows(), factorization.total_dim());
        Self {
            factorization,
            entries: symmetrize(&entries),
        }
    }

    pub fn diagonal(factorization: HilbertFactorization, probs: &[f64]) -> Result<Self> {
        let dim = factorization.total_dim();
        if probs.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                actual: probs.len(),
            });
        }
        if let Some(&p) = probs.iter().find(|&&p| p < -STATE_TOL || !p.is_finite()) {
            return Err(Error::InvalidState(format!("invalid probability {p}")));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > STATE_TOL {
            return Err(Error::InvalidState(format!("probabilities sum to {total}")));
        }
        let diag = DVector::from_iterator(dim, probs.iter().map(|&p| C64::new(p, 0.0)));
        Ok(Self {
            factorization,
            entries: DMatrix::from_diagonal(&diag),
        })
    }

    pub fn maximally_mixed(factorization: HilbertFactorization) -> Self {
        let dim = factorization.total_dim();
        let entries = CMatrix::identity(dim, dim).unscale(dim as f64);
        Self {
            factorization,
            entries,
        }
    }

    pub fn pure(ket: &Ket) -> Self {
        ket.to_density()
    }

    pub fn factorization(&self) -> &HilbertFactorization {
        &self.factorization
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.entries
    }

    pub fn into_matrix(self) -> CMatrix {
        self.entries
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    /// Real parts of the diagonal (populations in the computational basis).
    pub fn populations(&self) -> Vec<f64> {
        self.entries.diagonal().iter().map(|z| z.re).collect()
    }

    /// `‖self − other‖₁`.
    pub fn trace_norm_distance(&self, other: &DensityMatrix) -> Result<f64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: other.dim(),
            });
        }
        Ok(super::trace_norm(&(&self.entries - &other.entries)))
    }

    /// Conjugates by `u` (`u ρ u†`). `u` is trusted to be unitary.
    pub fn conjugate_by(&self, u: &CMatrix) -> Result<DensityMatrix> {
        if u.nrows() != self.dim() || u.ncols() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: u.nrows(),
            });
        }
        let m = u * &self.entries * u.adjoint();
        Ok(Self::from_trusted(self.factorization.clone(), m))
    }
}

/// Kronecker product of two objects of the same kind.
pub trait TensorProduct: Sized {
    fn tensor(&self, other: &Self) -> Result<Self>;
}

impl TensorProduct for Ket {
    fn tensor(&self, other: &Self) -> Result<Self> {
        let factorization = self.factorization.concat(&other.factorization)?;
        let amplitudes = self.amplitudes.kronecker(&other.amplitudes);
        Ok(Self {
            factorization,
            amplitudes,
        })
    }
}

impl TensorProduct for DensityMatrix {
    fn tensor(&self, other: &Self) -> Result<Self> {
        let factorization = self.factorization.concat(&other.factorization)?;
        let entries = self.entries.kronecker(&other.entries);
        Ok(Self {
            factorization,
            entries,
        })
    }
}

pub fn tensor_product<T: TensorProduct>(a: &T, b: &T) -> Result<T> {
    a.tensor(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn qubit() -> HilbertFactorization {
        HilbertFactorization::new(vec![2]).unwrap()
    }

    #[test]
    fn maximally_mixed_product() {
        let a = DensityMatrix::maximally_mixed(qubit());
        let b = tensor_product(&a, &a).unwrap();
        let expected = CMatrix::identity(4, 4).unscale(4.0);
        assert_abs_diff_eq!((b.matrix() - expected).norm(), 0.0, epsilon = 1e-15);
        assert_eq!(b.factorization().dims(), &[2, 2]);
    }

    #[test]
    fn basis_kets_tensor() {
        let zero = Ket::basis(qubit(), 0).unwrap();
        let one = Ket::basis(qubit(), 1).unwrap();
        let ket = tensor_product(&zero, &one).unwrap();
        let expected = Ket::basis(HilbertFactorization::new(vec![2, 2]).unwrap(), 1).unwrap();
        assert_abs_diff_eq!(ket.inner(&expected).unwrap().norm(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn vdh4_tensor_epr_spectrum() {
        // (12/25)(1, 1/2, 1/3, 1/4) ⊗ (1/2, 1/2)
        let h4 = 25.0 / 12.0;
        let mu: Vec<f64> = (1..=4).map(|j| 1.0 / (j as f64) / h4).collect();
        let mu4 =
            DensityMatrix::diagonal(HilbertFactorization::new(vec![2, 2]).unwrap(), &mu).unwrap();
        let epr = DensityMatrix::diagonal(qubit(), &[0.5, 0.5]).unwrap();
        let prod = tensor_product(&mu4, &epr).unwrap();
        let mut spec = spectrum(prod.matrix());
        spec.sort_by(|a, b| b.partial_cmp(a).unwrap());
        let expected = [0.24, 0.24, 0.12, 0.12, 0.08, 0.08, 0.06, 0.06];
        for (got, want) in spec.iter().zip(expected) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-12);
        }
    }

    #[test]
    fn validation_rejects_bad_states() {
        let f = qubit();
        let not_herm = CMatrix::from_row_slice(
            2,
            2,
            &[
                C64::new(0.5, 0.0),
                C64::new(0.1, 0.0),
                C64::new(0.0, 0.0),
                C64::new(0.5, 0.0),
            ],
        );
        assert!(matches!(
            DensityMatrix::new(f.clone(), not_herm),
            Err(Error::NotHermitian(_))
        ));
        let bad_trace = CMatrix::identity(2, 2);
        assert!(DensityMatrix::new(f.clone(), bad_trace).is_err());
        let negative = CMatrix::from_diagonal(&DVector::from_vec(vec![
            C64::new(1.5, 0.0),
            C64::new(-0.5, 0.0),
        ]));
        assert!(DensityMatrix::new(f.clone(), negative).is_err());
        assert!(Ket::new(f, CVector::from_element(2, C64::new(1.0, 0.0))).is_err());
    }
}
