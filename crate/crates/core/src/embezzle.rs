//! Embezzling families and the permutation protocol.
//!
//! Joint one-sided indices follow chain order: the embezzler is the most
//! significant digit, so basis state `(e, j)` of embezzler ⊗ catalyst has
//! index `e * N + j`.

use serde::{Deserialize, Serialize};

use crate::error::{out_of_range, Error, Result};
use crate::qcore::{
    self, check_unitary, hermitian_eigen, partial_trace_keep_prefix, schmidt_spectrum,
    tensor_product, von_neumann_entropy, CMatrix, DensityMatrix, HilbertFactorization, Ket,
    LogBase, C64, STATE_TOL,
};

/// van Dam-Hayden catalyst `C Σ_{j=1}^{N} j^{-1/2} |jj⟩`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VdhFamily {
    rank: usize,
}

impl VdhFamily {
    pub fn new(rank: usize) -> Result<Self> {
        if rank < 2 {
            return Err(out_of_range("N", rank, "N >= 2"));
        }
        Ok(Self { rank })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// `p_j = (1/j) / H_N`, descending.
    pub fn schmidt_probabilities(&self) -> Vec<f64> {
        let harmonic: f64 = (1..=self.rank).map(|j| 1.0 / j as f64).sum();
        (1..=self.rank)
            .map(|j| 1.0 / (j as f64 * harmonic))
            .collect()
    }

    /// Two-sided catalyst ket on `[N, N]`.
    pub fn catalyst_ket(&self) -> Result<Ket> {
        Ket::schmidt_diagonal(&self.schmidt_probabilities())
    }

    /// One-sided reduction `diag(p)` on a single factor of dimension `N`.
    pub fn one_sided_state(&self) -> Result<DensityMatrix> {
        self.one_sided_state_on(HilbertFactorization::new(vec![self.rank])?)
    }

    /// One-sided reduction laid out on `factorization` (e.g. `n` qudit sites
    /// with `d^n = N`).
    pub fn one_sided_state_on(&self, factorization: HilbertFactorization) -> Result<DensityMatrix> {
        if factorization.total_dim() != self.rank {
            return Err(Error::DimensionMismatch {
                expected: self.rank,
                actual: factorization.total_dim(),
            });
        }
        DensityMatrix::diagonal(factorization, &self.schmidt_probabilities())
    }
}

pub fn vdh_schmidt_vector(rank: usize) -> Result<Vec<f64>> {
    Ok(VdhFamily::new(rank)?.schmidt_probabilities())
}

/// Bijection on basis indices: `|x⟩ ↦ |perm[x]⟩`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn new(map: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; map.len()];
        for &y in &map {
            if y >= map.len() || std::mem::replace(&mut seen[y], true) {
                return Err(Error::InvalidParameter(format!(
                    "not a permutation of 0..{}",
                    map.len()
                )));
            }
        }
        Ok(Self(map))
    }

    pub fn identity(len: usize) -> Self {
        Self((0..len).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn apply(&self, x: usize) -> usize {
        self.0[x]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(x, &y)| x == y)
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.0.len()];
        for (x, &y) in self.0.iter().enumerate() {
            inv[y] = x;
        }
        Self(inv)
    }

    /// Permutation matrix with `P[perm[x], x] = 1`.
    pub fn to_matrix(&self) -> CMatrix {
        let n = self.0.len();
        let mut m = CMatrix::zeros(n, n);
        for (x, &y) in self.0.iter().enumerate() {
            m[(y, x)] = C64::new(1.0, 0.0);
        }
        m
    }
}

impl TryFrom<Vec<usize>> for Permutation {
    type Error = Error;
    fn try_from(map: Vec<usize>) -> Result<Self> {
        Self::new(map)
    }
}

impl From<Permutation> for Vec<usize> {
    fn from(p: Permutation) -> Self {
        p.0
    }
}

/// Embezzling task: take the embezzler from `phi` to `psi`. Both kets live
/// on `[d_e, d_e]` (Alice's half first).
#[derive(Clone, Debug)]
pub struct EmbezzleTask {
    phi: Ket,
    psi: Ket,
    d_e: usize,
}

impl EmbezzleTask {
    pub fn new(phi: Ket, psi: Ket) -> Result<Self> {
        let dims = phi.factorization().dims().to_vec();
        if dims.len() != 2 || dims[0] != dims[1] {
            return Err(Error::InvalidState(format!(
                "embezzler kets must live on [d_e, d_e], got {dims:?}"
            )));
        }
        if psi.factorization().dims() != dims.as_slice() {
            return Err(Error::DimensionMismatch {
                expected: phi.dim(),
                actual: psi.dim(),
            });
        }
        Ok(Self {
            phi,
            psi,
            d_e: dims[0],
        })
    }

    /// Schmidt-diagonal task from Schmidt probabilities, zero-padded to `d_e`.
    pub fn from_schmidt(phi_probs: &[f64], psi_probs: &[f64], d_e: usize) -> Result<Self> {
        let pad = |probs: &[f64]| -> Result<Vec<f64>> {
            if probs.len() > d_e {
                return Err(out_of_range(
                    "schmidt rank",
                    probs.len(),
                    format!("<= d_e = {d_e}"),
                ));
            }
            let mut v = probs.to_vec();
            v.resize(d_e, 0.0);
            Ok(v)
        };
        Self::new(
            Ket::schmidt_diagonal(&pad(phi_probs)?)?,
            Ket::schmidt_diagonal(&pad(psi_probs)?)?,
        )
    }

    /// `|00⟩ → d`-dimensional maximally entangled state, on `d_e >= d`.
    pub fn product_to_max_entangled(d: usize, d_e: usize) -> Result<Self> {
        if d < 2 || d > d_e {
            return Err(out_of_range("d", d, format!("2..={d_e}")));
        }
        Self::from_schmidt(&[1.0], &vec![1.0 / d as f64; d], d_e)
    }

    pub fn phi(&self) -> &Ket {
        &self.phi
    }

    pub fn psi(&self) -> &Ket {
        &self.psi
    }

    pub fn d_e(&self) -> usize {
        self.d_e
    }

    /// Alice's reduction of `phi`.
    pub fn phi_reduced(&self) -> DensityMatrix {
        partial_trace_keep_prefix(&self.phi.to_density(), 1).expect("two-factor ket")
    }

    pub fn psi_reduced(&self) -> DensityMatrix {
        partial_trace_keep_prefix(&self.psi.to_density(), 1).expect("two-factor ket")
    }

    /// Number of nonzero Schmidt coefficients of the target.
    pub fn target_schmidt_rank(&self) -> usize {
        schmidt_spectrum(&self.psi, 1)
            .expect("two-factor ket")
            .iter()
            .filter(|&&p| p > 1e-12)
            .count()
    }
}

fn diagonal_populations(rho: &DensityMatrix) -> Result<Vec<f64>> {
    let m = rho.matrix();
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            if i != j && m[(i, j)].norm() > STATE_TOL {
                return Err(Error::NotSchmidtDiagonal);
            }
        }
    }
    Ok(rho.populations())
}

fn check_catalyst(catalyst: &[f64]) -> Result<()> {
    if catalyst.is_empty() {
        return Err(Error::InvalidParameter("empty catalyst spectrum".into()));
    }
    if catalyst.iter().any(|&p| p < 0.0 || !p.is_finite()) {
        return Err(Error::InvalidParameter(
            "catalyst probabilities must be nonnegative".into(),
        ));
    }
    if catalyst.windows(2).any(|w| w[1] > w[0]) {
        return Err(Error::InvalidParameter(
            "catalyst spectrum must be sorted descending".into(),
        ));
    }
    Ok(())
}

/// Joint one-sided populations `(initial, target)` of embezzler ⊗ catalyst.
fn joint_populations(catalyst: &[f64], task: &EmbezzleTask) -> Result<(Vec<f64>, Vec<f64>)> {
    check_catalyst(catalyst)?;
    let phi = diagonal_populations(&task.phi_reduced())?;
    let psi = diagonal_populations(&task.psi_reduced())?;
    let joint = |emb: &[f64]| -> Vec<f64> {
        emb.iter()
            .flat_map(|&e| catalyst.iter().map(move |&p| e.max(0.0) * p))
            .collect()
    };
    let (a, b) = (joint(&phi), joint(&psi));
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: a.len(),
            actual: b.len(),
        });
    }
    Ok((a, b))
}

fn descending_order(values: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&x, &y| values[y].total_cmp(&values[x]).then(x.cmp(&y)));
    order
}

/// Matches the sorted spectra of `catalyst ⊗ φ_A` and `catalyst ⊗ ψ_A`.
///
/// Returns the permutation sending the r-th largest initial population to the
/// position of the r-th largest target population, and the achieved overlap
/// `Σ_r sqrt(a_r b_r)` over the sorted spectra.
pub fn embezzle_permutation(catalyst: &[f64], task: &EmbezzleTask) -> Result<(Permutation, f64)> {
    let (a, b) = joint_populations(catalyst, task)?;
    let (oa, ob) = (descending_order(&a), descending_order(&b));
    let mut map = vec![0; a.len()];
    let mut overlap = 0.0;
    for (&x, &y) in oa.iter().zip(&ob) {
        map[x] = y;
        overlap += (a[x] * b[y]).sqrt();
    }
    Ok((Permutation(map), overlap))
}

/// One-sided trace-norm deviation of the sorted-spectra protocol without
/// building matrices: `Σ_r |a_r − b_r|`.
pub fn sorted_spectra_deviation(catalyst: &[f64], task: &EmbezzleTask) -> Result<f64> {
    let (mut a, mut b) = joint_populations(catalyst, task)?;
    a.sort_by(|x, y| y.total_cmp(x));
    b.sort_by(|x, y| y.total_cmp(x));
    Ok(a.iter().zip(&b).map(|(x, y)| (x - y).abs()).sum())
}

/// Measured figures of the vdH permutation protocol.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VdhProtocolSummary {
    pub rank: usize,
    pub d: usize,
    pub d_e: usize,
    pub overlap: f64,
    pub infidelity: f64,
    /// `log d / log N`.
    pub precision_bound: f64,
    /// `‖U(φ_A ⊗ ω)U† − ψ_A ⊗ ω‖₁`.
    pub trace_norm_deviation: f64,
    /// `|S(φ_A) − S(ψ_A)|` in nats.
    pub delta_s: f64,
}

pub fn vdh_protocol(family: &VdhFamily, task: &EmbezzleTask) -> Result<VdhProtocolSummary> {
    let catalyst = family.schmidt_probabilities();
    let (_, overlap) = embezzle_permutation(&catalyst, task)?;
    let d = task.target_schmidt_rank();
    Ok(VdhProtocolSummary {
        rank: family.rank(),
        d,
        d_e: task.d_e(),
        overlap,
        infidelity: 1.0 - overlap,
        precision_bound: (d as f64).ln() / (family.rank() as f64).ln(),
        trace_norm_deviation: sorted_spectra_deviation(&catalyst, task)?,
        delta_s: entanglement_delta(task, LogBase::NATURAL),
    })
}

/// `‖U (φ_A ⊗ ω) U† − ψ_A ⊗ ω‖₁` (embezzler first).
pub fn one_sided_deviation(omega: &DensityMatrix, task: &EmbezzleTask, u: &CMatrix) -> Result<f64> {
    let initial = tensor_product(&task.phi_reduced(), omega)?;
    let target = tensor_product(&task.psi_reduced(), omega)?;
    if u.nrows() != initial.dim() || u.ncols() != initial.dim() {
        return Err(Error::DimensionMismatch {
            expected: initial.dim(),
            actual: u.nrows(),
        });
    }
    check_unitary(u, 1e-9)?;
    initial.conjugate_by(u)?.trace_norm_distance(&target)
}

fn ket_as_matrix(ket: &Ket) -> Result<CMatrix> {
    let dims = ket.factorization().dims();
    if dims.len() != 2 {
        return Err(Error::InvalidState(format!(
            "expected a bipartite ket, got factors {dims:?}"
        )));
    }
    let (rows, cols) = (dims[0], dims[1]);
    let amps = ket.amplitudes();
    Ok(CMatrix::from_fn(rows, cols, |i, j| amps[i * cols + j]))
}

/// `|⟨Ω_c, ψ| U_A ⊗ U_B |Ω_c, φ⟩|`. `U_A` acts on `A_e ⊗ A_c`, `U_B` on
/// `B_e ⊗ B_c`, embezzler first on each side.
pub fn two_sided_overlap(
    omega_ket: &Ket,
    task: &EmbezzleTask,
    u_a: &CMatrix,
    u_b: &CMatrix,
) -> Result<f64> {
    let omega = ket_as_matrix(omega_ket)?;
    let phi = ket_as_matrix(task.phi())?;
    let psi = ket_as_matrix(task.psi())?;
    let initial = phi.kronecker(&omega);
    let target = psi.kronecker(&omega);
    for (u, dim) in [(u_a, initial.nrows()), (u_b, initial.ncols())] {
        if u.nrows() != dim || u.ncols() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                actual: u.nrows(),
            });
        }
        check_unitary(u, 1e-9)?;
    }
    let evolved = u_a * initial * u_b.transpose();
    let amp: C64 = target
        .iter()
        .zip(evolved.iter())
        .map(|(t, e)| t.conj() * e)
        .sum();
    Ok(amp.norm())
}

/// Result of [`uhlmann_partner`].
#[derive(Clone, Debug)]
pub struct UhlmannPartner {
    /// Unitary on the purifying factor.
    pub unitary: CMatrix,
    /// `|⟨Ψ_target| (I ⊗ W) |Ψ_evolved⟩|`, computed from the purifications.
    pub overlap: f64,
}

/// Canonical purification as a `dim × purification_dim` matrix `X` with
/// `X X† = ρ`.
fn purification(rho: &DensityMatrix, purification_dim: usize) -> Result<CMatrix> {
    let (vals, vecs) = hermitian_eigen(rho.matrix());
    let mut order: Vec<usize> = (0..vals.len()).collect();
    order.sort_by(|&a, &b| vals[b].total_cmp(&vals[a]));
    let kept: Vec<usize> = order
        .into_iter()
        .filter(|&k| vals[k] > qcore::EIGEN_CLAMP)
        .collect();
    if kept.len() > purification_dim {
        return Err(out_of_range(
            "purification_dim",
            purification_dim,
            format!(">= rank {}", kept.len()),
        ));
    }
    let mut x = CMatrix::zeros(rho.dim(), purification_dim);
    for (col, &k) in kept.iter().enumerate() {
        let scaled = vecs.column(k) * C64::new(vals[k].sqrt(), 0.0);
        x.set_column(col, &scaled);
    }
    Ok(x)
}

/// Unitary `W` on the purifier maximizing the overlap between the canonical
/// purifications, from the polar decomposition of the cross-Gram matrix.
pub fn uhlmann_partner(
    rho_evolved: &DensityMatrix,
    rho_target: &DensityMatrix,
    purification_dim: usize,
) -> Result<UhlmannPartner> {
    if rho_evolved.dim() != rho_target.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho_evolved.dim(),
            actual: rho_target.dim(),
        });
    }
    let x_evolved = purification(rho_evolved, purification_dim)?;
    let x_target = purification(rho_target, purification_dim)?;
    let gram = x_target.adjoint() * &x_evolved;
    let svd = gram.svd(true, true);
    let (u, v_t) = (svd.u.expect("requested u"), svd.v_t.expect("requested v_t"));
    // (I ⊗ W) vec(X) = vec(X Wᵀ), and Tr(G Wᵀ) is maximal for Wᵀ = (U Vᵗ)†.
    let w_t = (u * v_t).adjoint();
    let moved = &x_evolved * &w_t;
    let amp: C64 = x_target
        .iter()
        .zip(moved.iter())
        .map(|(t, e)| t.conj() * e)
        .sum();
    Ok(UhlmannPartner {
        unitary: w_t.transpose(),
        overlap: amp.norm(),
    })
}

/// Infinite-tensor-product catalyst built from alternating
/// `diag(1, λ₁)/(1+λ₁)` and `diag(1, λ₂)/(1+λ₂)` blocks.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ItpFamily {
    lambda1: f64,
    lambda2: f64,
    n_pairs: usize,
}

impl ItpFamily {
    pub fn new(lambda1: f64, lambda2: f64, n_pairs: usize) -> Result<Self> {
        for (name, l) in [("lambda1", lambda1), ("lambda2", lambda2)] {
            if !(l > 0.0 && l < 1.0) {
                return Err(out_of_range(name, l, "(0, 1)"));
            }
        }
        if lambda1 == lambda2 {
            return Err(Error::InvalidParameter(
                "lambda1 and lambda2 must differ".into(),
            ));
        }
        if n_pairs == 0 {
            return Err(out_of_range("n_pairs", n_pairs, ">= 1"));
        }
        Ok(Self {
            lambda1,
            lambda2,
            n_pairs,
        })
    }

    pub fn lambda1(&self) -> f64 {
        self.lambda1
    }

    pub fn lambda2(&self) -> f64 {
        self.lambda2
    }

    pub fn n_pairs(&self) -> usize {
        self.n_pairs
    }

    /// Diagonal of the block on `site` (0-based).
    pub fn block(&self, site: usize) -> [f64; 2] {
        let l = if site.is_multiple_of(2) {
            self.lambda1
        } else {
            self.lambda2
        };
        [1.0 / (1.0 + l), l / (1.0 + l)]
    }

    fn check_sites(&self, sites: usize) -> Result<()> {
        if !sites.is_multiple_of(2) {
            return Err(out_of_range("sites", sites, "an even number"));
        }
        if sites > 2 * self.n_pairs {
            return Err(out_of_range(
                "sites",
                sites,
                format!("<= {}", 2 * self.n_pairs),
            ));
        }
        Ok(())
    }
}

/// Diagonal (= spectrum, with multiplicity) of the reduced ITP state on the
/// first `sites` sites, built by successive Kronecker products.
pub fn itp_reduced_spectrum(family: &ItpFamily, sites: usize) -> Result<Vec<f64>> {
    family.check_sites(sites)?;
    if sites > 26 {
        return Err(out_of_range(
            "sites",
            sites,
            "<= 26 for an explicit spectrum",
        ));
    }
    let mut diag = vec![1.0];
    for site in 0..sites {
        let [p0, p1] = family.block(site);
        diag = diag.iter().flat_map(|&x| [x * p0, x * p1]).collect();
    }
    Ok(diag)
}

/// Dense reduced ITP state on the first `sites` sites. `sites = 0` gives the
/// scalar state 1.
pub fn itp_reduced_state(family: &ItpFamily, sites: usize) -> Result<DensityMatrix> {
    family.check_sites(sites)?;
    let factorization = HilbertFactorization::new(vec![2; sites])?;
    DensityMatrix::diagonal(factorization, &itp_reduced_spectrum(family, sites)?)
}

/// `|S(φ_A) − S(ψ_A)|` in `log_base`.
pub fn entanglement_delta(task: &EmbezzleTask, log_base: LogBase) -> f64 {
    (von_neumann_entropy(&task.phi_reduced(), log_base)
        - von_neumann_entropy(&task.psi_reduced(), log_base))
    .abs()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::fidelity;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::LN_2;

    #[test]
    fn vdh_vectors() {
        let v = vdh_schmidt_vector(2).unwrap();
        assert_abs_diff_eq!(v[0], 2.0 / 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(v[1], 1.0 / 3.0, epsilon = 1e-15);
        let v = vdh_schmidt_vector(4).unwrap();
        for (got, want) in v.iter().zip([0.48, 0.24, 0.16, 0.12]) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-15);
        }
        assert!(vdh_schmidt_vector(1).is_err());
        let sum: f64 = vdh_schmidt_vector(4096).unwrap().iter().sum();
        assert_abs_diff_eq!(sum, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn trivial_task_gives_identity() {
        let task = EmbezzleTask::from_schmidt(&[1.0], &[1.0], 2).unwrap();
        let (perm, overlap) = embezzle_permutation(&vdh_schmidt_vector(8).unwrap(), &task).unwrap();
        assert!(perm.is_identity());
        assert_abs_diff_eq!(overlap, 1.0, epsilon = 1e-14);
    }

    #[test]
    fn vdh_overlaps() {
        let task = EmbezzleTask::product_to_max_entangled(2, 2).unwrap();
        let (_, ov2) = embezzle_permutation(&vdh_schmidt_vector(2).unwrap(), &task).unwrap();
        // sorted spectra (2/3, 1/3, 0, 0) against (1/3, 1/3, 1/6, 1/6)
        let oracle = (2.0f64 / 9.0).sqrt() + 1.0 / 3.0;
        assert_abs_diff_eq!(ov2, oracle, epsilon = 1e-14);
        assert_abs_diff_eq!(ov2, 0.8047, epsilon = 1e-4);
        let (_, ov4) = embezzle_permutation(&vdh_schmidt_vector(4).unwrap(), &task).unwrap();
        // (0.48, 0.24, 0.16, 0.12, 0...) against (0.24, 0.24, 0.12, 0.12, 0.08, 0.08, 0.06, 0.06)
        let oracle = (0.48f64 * 0.24).sqrt() + 0.24 + (0.16f64 * 0.12).sqrt() + 0.12;
        assert_abs_diff_eq!(ov4, oracle, epsilon = 1e-14);
        assert!(1.0 - ov4 <= 0.5);
        assert_abs_diff_eq!(1.0 - ov4, 0.162, epsilon = 1e-3);
    }

    #[test]
    fn rejects_unsorted_catalyst() {
        let task = EmbezzleTask::product_to_max_entangled(2, 2).unwrap();
        assert!(embezzle_permutation(&[0.2, 0.8], &task).is_err());
    }

    #[test]
    fn one_sided_deviation_examples() {
        let omega = VdhFamily::new(4).unwrap().one_sided_state().unwrap();
        let same = EmbezzleTask::from_schmidt(&[0.5, 0.5], &[0.5, 0.5], 2).unwrap();
        let id = CMatrix::identity(8, 8);
        assert_abs_diff_eq!(
            one_sided_deviation(&omega, &same, &id).unwrap(),
            0.0,
            epsilon = 1e-14
        );
        let task = EmbezzleTask::product_to_max_entangled(2, 2).unwrap();
        assert_abs_diff_eq!(
            one_sided_deviation(&omega, &task, &id).unwrap(),
            1.0,
            epsilon = 1e-12
        );
        assert!(one_sided_deviation(&omega, &task, &CMatrix::identity(4, 4)).is_err());
        assert!(one_sided_deviation(&omega, &task, &CMatrix::identity(8, 8).scale(2.0)).is_err());
    }

    #[test]
    fn one_sided_deviation_shrinks_with_rank() {
        let task = EmbezzleTask::product_to_max_entangled(2, 2).unwrap();
        let mut previous = f64::INFINITY;
        for rank in [4, 16, 64] {
            let family = VdhFamily::new(rank).unwrap();
            let (perm, overlap) =
                embezzle_permutation(&family.schmidt_probabilities(), &task).unwrap();
            let dev =
                one_sided_deviation(&family.one_sided_state().unwrap(), &task, &perm.to_matrix())
                    .unwrap();
            assert!(dev <= 2.0 * (2.0 * (1.0 - overlap)).sqrt());
            assert!(dev < previous);
            let spectral =
                sorted_spectra_deviation(&family.schmidt_probabilities(), &task).unwrap();
            assert_abs_diff_eq!(dev, spectral, epsilon = 1e-12);
            previous = dev;
        }
    }

    #[test]
    fn two_sided_examples() {
        let family = VdhFamily::new(2).unwrap();
        let omega = family.catalyst_ket().unwrap();
        let same = EmbezzleTask::from_schmidt(&[1.0], &[1.0], 2).unwrap();
        let id = CMatrix::identity(4, 4);
        assert_abs_diff_eq!(
            two_sided_overlap(&omega, &same, &id, &id).unwrap(),
            1.0,
            epsilon = 1e-14
        );

        let task = EmbezzleTask::product_to_max_entangled(2, 2).unwrap();
        let (perm, overlap) = embezzle_permutation(&family.schmidt_probabilities(), &task).unwrap();
        let p = perm.to_matrix();
        assert_abs_diff_eq!(
            two_sided_overlap(&omega, &task, &p, &p).unwrap(),
            overlap,
            epsilon = 1e-12
        );

        let orthogonal = EmbezzleTask::new(
            Ket::basis(HilbertFactorization::new(vec![2, 2]).unwrap(), 0).unwrap(),
            Ket::basis(HilbertFactorization::new(vec![2, 2]).unwrap(), 3).unwrap(),
        )
        .unwrap();
        assert_abs_diff_eq!(
            two_sided_overlap(&omega, &orthogonal, &id, &id).unwrap(),
            0.0,
            epsilon = 1e-14
        );
    }

    #[test]
    fn uhlmann_examples() {
        let f = HilbertFactorization::new(vec![2]).unwrap();
        let zero = Ket::basis(f.clone(), 0).unwrap().to_density();
        let res = uhlmann_partner(&zero, &zero, 2).unwrap();
        assert_abs_diff_eq!(res.overlap, 1.0, epsilon = 1e-12);
        assert!(crate::qcore::is_unitary(&res.unitary, 1e-10));

        let s = std::f64::consts::FRAC_1_SQRT_2;
        let plus = Ket::new(
            f.clone(),
            nalgebra::DVector::from_vec(vec![C64::new(s, 0.0), C64::new(0.0, s)]),
        )
        .unwrap();
        let res = uhlmann_partner(&zero, &plus.to_density(), 1).unwrap();
        assert_abs_diff_eq!(res.overlap, s, epsilon = 1e-12);

        let half = DensityMatrix::maximally_mixed(f);
        let res = uhlmann_partner(&half, &zero, 2).unwrap();
        assert_abs_diff_eq!(res.overlap, 0.5f64.sqrt(), epsilon = 1e-8);
        assert_abs_diff_eq!(
            res.overlap,
            fidelity(&half, &zero).unwrap().sqrt(),
            epsilon = 1e-8
        );
        assert!(uhlmann_partner(&half, &zero, 1).is_err());
    }

    #[test]
    fn itp_states() {
        let fam = ItpFamily::new(0.5, 0.25, 4).unwrap();
        let empty = itp_reduced_state(&fam, 0).unwrap();
        assert_eq!(empty.dim(), 1);
        assert_abs_diff_eq!(empty.matrix()[(0, 0)].re, 1.0);
        let two = itp_reduced_state(&fam, 2).unwrap();
        let want = [1.0, 0.25, 0.5, 0.125].map(|x| x / 1.875);
        for (got, w) in two.populations().iter().zip(want) {
            assert_abs_diff_eq!(*got, w, epsilon = 1e-15);
        }
        assert_abs_diff_eq!(
            crate::qcore::schatten_norm(two.matrix(), 1.0).unwrap(),
            1.0,
            epsilon = 1e-14
        );
        assert!(itp_reduced_state(&fam, 3).is_err());
        assert!(itp_reduced_state(&fam, 10).is_err());
        assert!(ItpFamily::new(0.5, 0.5, 1).is_err());
        assert!(ItpFamily::new(1.0, 0.5, 1).is_err());
    }

    #[test]
    fn entanglement_deltas() {
        let same = EmbezzleTask::from_schmidt(&[0.7, 0.3], &[0.7, 0.3], 2).unwrap();
        assert_abs_diff_eq!(
            entanglement_delta(&same, LogBase::NATURAL),
            0.0,
            epsilon = 1e-14
        );
        let epr = EmbezzleTask::product_to_max_entangled(2, 2).unwrap();
        assert_abs_diff_eq!(
            entanglement_delta(&epr, LogBase::NATURAL),
            LN_2,
            epsilon = 1e-14
        );
        let d3 = EmbezzleTask::product_to_max_entangled(3, 4).unwrap();
        assert_abs_diff_eq!(
            entanglement_delta(&d3, LogBase::NATURAL),
            3f64.ln(),
            epsilon = 1e-13
        );
    }
}
