//! Dense complex linear algebra and quantum-information primitives.
//!
//! Site ordering is big-endian: in a factorization `[d0, d1, ..., dk]` the
//! basis index is `((i0 * d1 + i1) * d2 + i2) ...`, so site 0 is the most
//! significant digit. Chains put the embezzler at site 0.

mod linalg;
pub mod random;
mod space;
mod state;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{out_of_range, Result};

pub(crate) use linalg::check_unitary;
pub use linalg::{
    entropy_of_spectrum, fidelity, hermitian_eigen, hermitian_evolve, hermiticity_defect,
    is_unitary, matrix_sqrt_psd, partial_trace_keep_prefix, partial_trace_matrix, schatten_norm,
    schatten_norm_of_spectrum, schmidt_spectrum, spectrum, symmetrize, trace_norm,
    unitary_from_hermitian, von_neumann_entropy,
};
pub use space::{HilbertFactorization, DEFAULT_DIM_CAP};
pub use state::{tensor_product, DensityMatrix, Ket, TensorProduct};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

/// Tolerance used for state validation (normalization, hermiticity, trace).
pub const STATE_TOL: f64 = 1e-10;

/// Eigenvalues below this are treated as exact zeros before taking logs.
pub const EIGEN_CLAMP: f64 = 1e-14;

/// Base of the logarithm used by entropies and bounds.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct LogBase(f64);

impl LogBase {
    pub const NATURAL: LogBase = LogBase(std::f64::consts::E);
    pub const BITS: LogBase = LogBase(2.0);

    pub fn new(base: f64) -> Result<Self> {
        if !(base.is_finite() && base > 0.0 && base != 1.0) {
            return Err(out_of_range("log_base", base, "positive, finite and != 1"));
        }
        Ok(LogBase(base))
    }

    pub fn base(self) -> f64 {
        self.0
    }

    #[inline]
    pub fn log(self, x: f64) -> f64 {
        x.ln() / self.ln_base()
    }

    /// Converts a value measured in nats into this base.
    #[inline]
    pub fn from_nats(self, nats: f64) -> f64 {
        nats / self.ln_base()
    }

    #[inline]
    fn ln_base(self) -> f64 {
        if self.0 == std::f64::consts::E {
            1.0
        } else {
            self.0.ln()
        }
    }
}

impl Default for LogBase {
    fn default() -> Self {
        LogBase::NATURAL
    }
}

impl TryFrom<f64> for LogBase {
    type Error = crate::Error;
    fn try_from(value: f64) -> Result<Self> {
        LogBase::new(value)
    }
}

impl From<LogBase> for f64 {
    fn from(value: LogBase) -> f64 {
        value.0
    }
}
