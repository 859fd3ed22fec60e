use nalgebra::DVector;

use super::{
    CMatrix, DensityMatrix, HilbertFactorization, Ket, LogBase, C64, EIGEN_CLAMP, STATE_TOL,
};
use crate::error::{out_of_range, Error, Result};

/// Largest entrywise deviation `max |A − A†|`.
pub fn hermiticity_defect(a: &CMatrix) -> f64 {
    let n = a.nrows();
    if n != a.ncols() {
        return f64::INFINITY;
    }
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((a[(i, j)] - a[(j, i)].conj()).norm());
        }
    }
    worst
}

/// `(A + A†) / 2`.
pub fn symmetrize(a: &CMatrix) -> CMatrix {
    (a + a.adjoint()).unscale(2.0)
}

/// Eigenvalues and eigenvectors (as columns) of a Hermitian matrix.
pub fn hermitian_eigen(a: &CMatrix) -> (Vec<f64>, CMatrix) {
    let eig = a.clone().symmetric_eigen();
    (eig.eigenvalues.iter().copied().collect(), eig.eigenvectors)
}

/// Eigenvalues of a Hermitian matrix, unsorted.
pub fn spectrum(a: &CMatrix) -> Vec<f64> {
    a.clone().symmetric_eigenvalues().iter().copied().collect()
}

/// `−Σ λ log λ`, with eigenvalues below 1e-14 treated as zero.
pub fn entropy_of_spectrum(eigenvalues: &[f64], log_base: LogBase) -> f64 {
    let nats: f64 = eigenvalues
        .iter()
        .filter(|&&l| l > EIGEN_CLAMP)
        .map(|&l| -l * l.ln())
        .sum();
    log_base.from_nats(nats)
}

pub fn von_neumann_entropy(rho: &DensityMatrix, log_base: LogBase) -> f64 {
    entropy_of_spectrum(&spectrum(rho.matrix()), log_base)
}

fn singular_values(a: &CMatrix) -> Vec<f64> {
    if a.is_square() && hermiticity_defect(a) < 1e-13 {
        spectrum(&symmetrize(a)).into_iter().map(f64::abs).collect()
    } else {
        a.clone().singular_values().iter().copied().collect()
    }
}

/// Schatten norm from a list of singular values. `p = f64::INFINITY` gives
/// the largest one.
pub fn schatten_norm_of_spectrum(singular_values: &[f64], p: f64) -> Result<f64> {
    if p.is_nan() || p < 1.0 {
        return Err(out_of_range("p", p, "p >= 1"));
    }
    let values = singular_values.iter().map(|s| s.abs());
    if p.is_infinite() {
        return Ok(values.fold(0.0, f64::max));
    }
    if p == 1.0 {
        return Ok(values.sum());
    }
    // scale by the largest value so high powers do not underflow
    let max = singular_values.iter().fold(0.0f64, |m, s| m.max(s.abs()));
    if max == 0.0 {
        return Ok(0.0);
    }
    let sum: f64 = values.map(|s| (s / max).powf(p)).sum();
    Ok(max * sum.powf(1.0 / p))
}

/// `(Σ σ_k^p)^{1/p}` over the singular values of `a`; `p = ∞` is the
/// operator norm.
pub fn schatten_norm(a: &CMatrix, p: f64) -> Result<f64> {
    if p.is_nan() || p < 1.0 {
        return Err(out_of_range("p", p, "p >= 1"));
    }
    schatten_norm_of_spectrum(&singular_values(a), p)
}

pub fn trace_norm(a: &CMatrix) -> f64 {
    singular_values(a).into_iter().sum()
}

/// Principal square root of a positive semidefinite matrix.
pub fn matrix_sqrt_psd(a: &CMatrix) -> CMatrix {
    let (vals, vecs) = hermitian_eigen(&symmetrize(a));
    let sqrt = DVector::from_iterator(
        vals.len(),
        vals.iter().map(|&l| C64::new(l.max(0.0).sqrt(), 0.0)),
    );
    &vecs * CMatrix::from_diagonal(&sqrt) * vecs.adjoint()
}

/// Uhlmann fidelity `(Tr √(√ρ σ √ρ))²`, evaluated as the squared trace norm
/// of `√ρ √σ` so that it is symmetric by construction.
pub fn fidelity(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            actual: sigma.dim(),
        });
    }
    let cross = matrix_sqrt_psd(rho.matrix()) * matrix_sqrt_psd(sigma.matrix());
    let root: f64 = cross.singular_values().iter().sum();
    Ok((root * root).min(1.0))
}

/// Traces out every factor after the first `keep` of an arbitrary square
/// operator on `factorization`.
pub fn partial_trace_matrix(
    a: &CMatrix,
    factorization: &HilbertFactorization,
    keep: usize,
) -> Result<CMatrix> {
    let dim = factorization.total_dim();
    if a.nrows() != dim || a.ncols() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            actual: a.nrows(),
        });
    }
    if keep > factorization.num_factors() {
        return Err(out_of_range(
            "keep",
            keep,
            format!("0..={}", factorization.num_factors()),
        ));
    }
    let dk = factorization.prefix_dim(keep);
    let dr = dim / dk;
    Ok(CMatrix::from_fn(dk, dk, |i, j| {
        (0..dr).map(|k| a[(i * dr + k, j * dr + k)]).sum()
    }))
}

/// Reduced state on the first `keep` factors.
pub fn partial_trace_keep_prefix(rho: &DensityMatrix, keep: usize) -> Result<DensityMatrix> {
    let reduced = partial_trace_matrix(rho.matrix(), rho.factorization(), keep)?;
    Ok(DensityMatrix::from_trusted(
        rho.factorization().prefix(keep)?,
        reduced,
    ))
}

/// Squared Schmidt coefficients across the cut after `split` factors,
/// sorted descending.
pub fn schmidt_spectrum(psi: &Ket, split: usize) -> Result<Vec<f64>> {
    let f = psi.factorization();
    if split == 0 || split >= f.num_factors() {
        return Err(out_of_range(
            "split",
            split,
            format!("1..{}", f.num_factors()),
        ));
    }
    let da = f.prefix_dim(split);
    let db = psi.dim() / da;
    let amps = psi.amplitudes();
    let m = CMatrix::from_fn(da, db, |i, j| amps[i * db + j]);
    let mut probs: Vec<f64> = m.singular_values().iter().map(|s| s * s).collect();
    probs.sort_by(|a, b| b.total_cmp(a));
    Ok(probs)
}

/// Deviation `‖U†U − I‖_max`.
fn unitarity_defect(u: &CMatrix) -> f64 {
    if !u.is_square() {
        return f64::INFINITY;
    }
    let n = u.nrows();
    (u.adjoint() * u - CMatrix::identity(n, n))
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max)
}

pub fn is_unitary(u: &CMatrix, tol: f64) -> bool {
    unitarity_defect(u) <= tol
}

pub(crate) fn check_unitary(u: &CMatrix, tol: f64) -> Result<()> {
    let defect = unitarity_defect(u);
    if defect > tol {
        return Err(Error::NotUnitary(defect));
    }
    Ok(())
}

/// `exp(−i dt H)` through the eigendecomposition of `H`.
pub fn unitary_from_hermitian(h: &CMatrix, dt: f64) -> Result<CMatrix> {
    let defect = hermiticity_defect(h);
    if defect > STATE_TOL {
        return Err(Error::NotHermitian(defect));
    }
    let (vals, vecs) = hermitian_eigen(&symmetrize(h));
    let phases = DVector::from_iterator(
        vals.len(),
        vals.iter().map(|&l| C64::from_polar(1.0, -dt * l)),
    );
    Ok(&vecs * CMatrix::from_diagonal(&phases) * vecs.adjoint())
}

/// One slice of unitary evolution, `e^{−i dt H} ρ e^{+i dt H}`.
pub fn hermitian_evolve(rho: &DensityMatrix, h: &CMatrix, dt: f64) -> Result<DensityMatrix> {
    if h.nrows() != rho.dim() || h.ncols() != rho.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            actual: h.nrows(),
        });
    }
    let u = unitary_from_hermitian(h, dt)?;
    rho.conjugate_by(&u)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::tensor_product;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{LN_2, PI};

    fn fact(dims: &[usize]) -> HilbertFactorization {
        HilbertFactorization::new(dims.to_vec()).unwrap()
    }

    fn epr() -> Ket {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let amps = DVector::from_vec(vec![
            C64::new(s, 0.0),
            C64::default(),
            C64::default(),
            C64::new(s, 0.0),
        ]);
        Ket::new(fact(&[2, 2]), amps).unwrap()
    }

    fn sigma_x() -> CMatrix {
        CMatrix::from_row_slice(
            2,
            2,
            &[
                C64::default(),
                C64::new(1.0, 0.0),
                C64::new(1.0, 0.0),
                C64::default(),
            ],
        )
    }

    #[test]
    fn partial_trace_of_product_and_epr() {
        let a = DensityMatrix::diagonal(fact(&[2]), &[0.7, 0.3]).unwrap();
        let b = DensityMatrix::maximally_mixed(fact(&[3]));
        let ab = tensor_product(&a, &b).unwrap();
        let ra = partial_trace_keep_prefix(&ab, 1).unwrap();
        assert_abs_diff_eq!((ra.matrix() - a.matrix()).norm(), 0.0, epsilon = 1e-14);

        let r = partial_trace_keep_prefix(&epr().to_density(), 1).unwrap();
        let half = CMatrix::identity(2, 2).unscale(2.0);
        assert_abs_diff_eq!((r.matrix() - half).norm(), 0.0, epsilon = 1e-14);

        assert!(partial_trace_keep_prefix(&ab, 3).is_err());
        let scalar = partial_trace_keep_prefix(&ab, 0).unwrap();
        assert_eq!(scalar.dim(), 1);
    }

    #[test]
    fn partial_trace_against_index_contraction() {
        // μ4 ⊗ EPR-diagonal on three qubits, keep the first two.
        let h4 = 25.0 / 12.0;
        let mu: Vec<f64> = (1..=4).map(|j| 1.0 / (j as f64) / h4).collect();
        let full: Vec<f64> = mu.iter().flat_map(|&m| [m / 2.0, m / 2.0]).collect();
        let rho = DensityMatrix::diagonal(fact(&[2, 2, 2]), &full).unwrap();
        let reduced = partial_trace_keep_prefix(&rho, 2).unwrap();
        // brute force: sum the traced-out pairs
        let expected: Vec<f64> = full.chunks(2).map(|c| c[0] + c[1]).collect();
        for (i, e) in expected.iter().enumerate() {
            assert_abs_diff_eq!(reduced.matrix()[(i, i)].re, *e, epsilon = 1e-15);
        }
        assert_abs_diff_eq!(expected[0], 0.48, epsilon = 1e-15);
    }

    #[test]
    fn entropies() {
        let ln = LogBase::NATURAL;
        assert_abs_diff_eq!(
            von_neumann_entropy(&epr().to_density(), ln),
            0.0,
            epsilon = 1e-12
        );
        let half = DensityMatrix::maximally_mixed(fact(&[2]));
        assert_abs_diff_eq!(von_neumann_entropy(&half, ln), LN_2, epsilon = 1e-14);
        assert_abs_diff_eq!(
            von_neumann_entropy(&half, LogBase::BITS),
            1.0,
            epsilon = 1e-14
        );
        let probs: Vec<f64> = (1..=4).map(|j| 12.0 / 25.0 / j as f64).collect();
        let direct: f64 = probs.iter().map(|p| -p * p.ln()).sum();
        let mu4 = DensityMatrix::diagonal(fact(&[4]), &probs).unwrap();
        assert_abs_diff_eq!(von_neumann_entropy(&mu4, ln), direct, epsilon = 1e-13);
        assert_abs_diff_eq!(direct, 1.242_457_788, epsilon = 1e-9);
    }

    #[test]
    fn schatten_norms() {
        let rho = DensityMatrix::diagonal(fact(&[3]), &[0.5, 0.3, 0.2]).unwrap();
        assert_abs_diff_eq!(
            schatten_norm(rho.matrix(), 1.0).unwrap(),
            1.0,
            epsilon = 1e-14
        );
        let psi = DensityMatrix::maximally_mixed(fact(&[2]));
        for p in [1.0, 1.5, 2.0, 3.0, 7.0] {
            let want = 2f64.powf(1.0 / p - 1.0);
            assert_abs_diff_eq!(
                schatten_norm(psi.matrix(), p).unwrap(),
                want,
                epsilon = 1e-14
            );
        }
        assert_abs_diff_eq!(
            schatten_norm(psi.matrix(), f64::INFINITY).unwrap(),
            0.5,
            epsilon = 1e-14
        );
        let (l1, l2) = (0.5, 0.25);
        let itp: Vec<f64> = [1.0, l2, l1, l1 * l2]
            .iter()
            .map(|x| x / ((1.0 + l1) * (1.0 + l2)))
            .collect();
        let block = DensityMatrix::diagonal(fact(&[2, 2]), &itp).unwrap();
        let direct = itp.iter().map(|x| x * x).sum::<f64>().sqrt();
        assert_abs_diff_eq!(
            schatten_norm(block.matrix(), 2.0).unwrap(),
            direct,
            epsilon = 1e-14
        );
        assert_abs_diff_eq!(direct, 0.61464, epsilon = 1e-5);
        assert!(schatten_norm(psi.matrix(), 0.5).is_err());
    }

    #[test]
    fn fidelities() {
        let zero = Ket::basis(fact(&[2]), 0).unwrap().to_density();
        let one = Ket::basis(fact(&[2]), 1).unwrap().to_density();
        let half = DensityMatrix::maximally_mixed(fact(&[2]));
        assert_abs_diff_eq!(fidelity(&half, &half).unwrap(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(fidelity(&zero, &one).unwrap(), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(fidelity(&half, &zero).unwrap(), 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(fidelity(&zero, &half).unwrap(), 0.5, epsilon = 1e-12);
        let big = DensityMatrix::maximally_mixed(fact(&[3]));
        assert!(fidelity(&half, &big).is_err());
    }

    #[test]
    fn schmidt_spectra() {
        let prod = tensor_product(
            &Ket::basis(fact(&[2]), 0).unwrap(),
            &Ket::basis(fact(&[3]), 2).unwrap(),
        )
        .unwrap();
        let s = schmidt_spectrum(&prod, 1).unwrap();
        assert_abs_diff_eq!(s[0], 1.0, epsilon = 1e-14);
        assert!(s[1..].iter().all(|&x| x.abs() < 1e-14));
        let s = schmidt_spectrum(&epr(), 1).unwrap();
        assert_abs_diff_eq!(s[0], 0.5, epsilon = 1e-14);
        assert_abs_diff_eq!(s[1], 0.5, epsilon = 1e-14);
        let h4 = 25.0 / 12.0;
        let probs: Vec<f64> = (1..=4).map(|j| 1.0 / j as f64 / h4).collect();
        let omega = Ket::schmidt_diagonal(&probs).unwrap();
        let s = schmidt_spectrum(&omega, 1).unwrap();
        for (got, want) in s.iter().zip([0.48, 0.24, 0.16, 0.12]) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-14);
        }
        assert!(schmidt_spectrum(&omega, 0).is_err());
        assert!(schmidt_spectrum(&omega, 2).is_err());
    }

    #[test]
    fn evolution() {
        let zero = Ket::basis(fact(&[2]), 0).unwrap().to_density();
        let same = hermitian_evolve(&zero, &CMatrix::zeros(2, 2), 1.3).unwrap();
        assert_abs_diff_eq!((same.matrix() - zero.matrix()).norm(), 0.0, epsilon = 1e-15);
        let same = hermitian_evolve(&zero, &sigma_x(), 0.0).unwrap();
        assert_abs_diff_eq!((same.matrix() - zero.matrix()).norm(), 0.0, epsilon = 1e-15);
        let flipped = hermitian_evolve(&zero, &sigma_x(), PI / 2.0).unwrap();
        let one = Ket::basis(fact(&[2]), 1).unwrap().to_density();
        assert!((flipped.matrix() - one.matrix()).norm() < 1e-9);
        let mut bad = sigma_x();
        bad[(0, 1)] = C64::new(0.0, 1.0);
        assert!(matches!(
            hermitian_evolve(&zero, &bad, 1.0),
            Err(Error::NotHermitian(_))
        ));
    }
}
