//! Seeded random states and Hermitian matrices.

use rand::Rng;
use rand_distr::StandardNormal;

use super::{
    partial_trace_keep_prefix, schatten_norm, symmetrize, CMatrix, CVector, DensityMatrix,
    HilbertFactorization, Ket, C64,
};
use crate::error::Result;

fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Haar-random pure state (normalized complex Gaussian vector).
pub fn haar_ket<R: Rng + ?Sized>(factorization: &HilbertFactorization, rng: &mut R) -> Ket {
    let dim = factorization.total_dim();
    let v = CVector::from_fn(dim, |_, _| complex_gaussian(rng));
    Ket::normalized(factorization.clone(), v).expect("gaussian vector is almost surely nonzero")
}

/// Mixed state obtained by tracing an environment of dimension `env_dim`
/// out of a Haar-random pure state. `env_dim = 1` yields a pure state.
pub fn induced_mixed<R: Rng + ?Sized>(
    factorization: &HilbertFactorization,
    env_dim: usize,
    rng: &mut R,
) -> Result<DensityMatrix> {
    if env_dim <= 1 {
        return Ok(haar_ket(factorization, rng).to_density());
    }
    let mut dims = factorization.dims().to_vec();
    dims.push(env_dim);
    let joint = HilbertFactorization::new(dims)?;
    let psi = haar_ket(&joint, rng).to_density();
    let reduced = partial_trace_keep_prefix(&psi, factorization.num_factors())?;
    Ok(DensityMatrix::from_trusted(
        factorization.clone(),
        reduced.into_matrix(),
    ))
}

/// Gaussian Hermitian matrix (GUE-like), unnormalized.
pub fn gaussian_hermitian<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> CMatrix {
    let g = CMatrix::from_fn(dim, dim, |_, _| complex_gaussian(rng));
    symmetrize(&g)
}

/// Gaussian Hermitian matrix rescaled to operator norm `norm`.
pub fn hermitian_with_norm<R: Rng + ?Sized>(dim: usize, norm: f64, rng: &mut R) -> CMatrix {
    let h = gaussian_hermitian(dim, rng);
    let op = schatten_norm(&h, f64::INFINITY).expect("p = inf is valid");
    h.scale(norm / op)
}
