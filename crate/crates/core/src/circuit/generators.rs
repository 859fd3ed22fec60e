use serde::{Deserialize, Serialize};

use super::sparse::SparseOp;
use super::ChainSpec;
use crate::error::{out_of_range, Error, Result};
use crate::qcore::{CMatrix, C64};

const GENERATOR_TOL: f64 = 1e-10;

/// Traceless Hermitian generator with unit operator norm, supported on the
/// contiguous window of sites `first..first + dims.len()`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(try_from = "RawTerm", into = "RawTerm")]
pub struct GeneratorTerm {
    label: String,
    first: usize,
    dims: Vec<usize>,
    matrix: SparseOp,
    penalty: f64,
    /// Absolute indices of sites the operator acts on non-trivially.
    active: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct RawTerm {
    label: String,
    first: usize,
    dims: Vec<usize>,
    penalty: f64,
    matrix: SparseOp,
}

impl TryFrom<RawTerm> for GeneratorTerm {
    type Error = Error;
    fn try_from(raw: RawTerm) -> Result<Self> {
        GeneratorTerm::new(raw.label, raw.first, raw.dims, raw.matrix, raw.penalty)
    }
}

impl From<GeneratorTerm> for RawTerm {
    fn from(t: GeneratorTerm) -> Self {
        RawTerm {
            label: t.label,
            first: t.first,
            dims: t.dims,
            penalty: t.penalty,
            matrix: t.matrix,
        }
    }
}

impl GeneratorTerm {
    pub fn new(
        label: impl Into<String>,
        first: usize,
        dims: Vec<usize>,
        matrix: SparseOp,
        penalty: f64,
    ) -> Result<Self> {
        let label = label.into();
        let invalid = |reason: String| Error::InvalidGenerator {
            label: label.clone(),
            reason,
        };
        if dims.is_empty() {
            return Err(invalid("empty support window".into()));
        }
        let window_dim: usize = dims.iter().product();
        if matrix.dim() != window_dim {
            return Err(invalid(format!(
                "matrix dimension {} != window dimension {window_dim}",
                matrix.dim()
            )));
        }
        if !(penalty.is_finite() && penalty > 0.0) {
            return Err(invalid(format!("penalty {penalty} must be positive")));
        }
        let defect = matrix.hermiticity_defect();
        if defect > GENERATOR_TOL {
            return Err(invalid(format!("not hermitian (defect {defect:.3e})")));
        }
        let trace = matrix.trace();
        if trace.norm() > GENERATOR_TOL {
            return Err(invalid(format!("trace {trace} != 0")));
        }
        let norm = matrix.hermitian_op_norm();
        if (norm - 1.0).abs() > GENERATOR_TOL {
            return Err(invalid(format!("operator norm {norm} != 1")));
        }
        let active = (0..dims.len())
            .filter(|&s| !matrix.acts_trivially_on(&dims, s))
            .map(|s| first + s)
            .collect();
        Ok(Self {
            label,
            first,
            dims,
            matrix,
            penalty,
            active,
        })
    }

    pub fn from_dense(
        label: impl Into<String>,
        first: usize,
        dims: Vec<usize>,
        matrix: &CMatrix,
    ) -> Result<Self> {
        let mut term = Self::new(label, first, dims, SparseOp::from_dense(matrix), 1.0)?;
        term.penalty = term.distance().max(1) as f64;
        Ok(term)
    }

    pub fn with_penalty(mut self, penalty: f64) -> Result<Self> {
        if !(penalty.is_finite() && penalty > 0.0) {
            return Err(Error::InvalidGenerator {
                label: self.label,
                reason: format!("penalty {penalty} must be positive"),
            });
        }
        self.penalty = penalty;
        Ok(self)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn first(&self) -> usize {
        self.first
    }

    pub fn width(&self) -> usize {
        self.dims.len()
    }

    pub fn last(&self) -> usize {
        self.first + self.dims.len() - 1
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn matrix(&self) -> &SparseOp {
        &self.matrix
    }

    pub fn penalty(&self) -> f64 {
        self.penalty
    }

    pub fn active_sites(&self) -> &[usize] {
        &self.active
    }

    /// Distance between the outermost sites acted on.
    pub fn distance(&self) -> usize {
        match (self.active.first(), self.active.last()) {
            (Some(a), Some(b)) => b - a,
            _ => 0,
        }
    }

    /// Whether the term couples sites `<= cut` with sites `> cut`.
    pub fn crosses_cut(&self, cut: usize) -> bool {
        self.active.iter().any(|&s| s <= cut) && self.active.iter().any(|&s| s > cut)
    }

    /// `min(dim left of cut, dim right of cut)` over the active sites, or
    /// `None` when the term does not cross the cut.
    pub fn cut_dimension(&self, cut: usize) -> Option<usize> {
        if !self.crosses_cut(cut) {
            return None;
        }
        let dim_of = |s: usize| self.dims[s - self.first];
        let left: usize = self
            .active
            .iter()
            .filter(|&&s| s <= cut)
            .map(|&s| dim_of(s))
            .product();
        let right: usize = self
            .active
            .iter()
            .filter(|&&s| s > cut)
            .map(|&s| dim_of(s))
            .product();
        Some(left.min(right))
    }

    /// The operator embedded into a chain with site dimensions `chain_dims`.
    pub fn embedded(&self, chain_dims: &[usize]) -> Result<SparseOp> {
        if self.last() >= chain_dims.len() || chain_dims[self.first..=self.last()] != self.dims[..]
        {
            return Err(Error::InvalidGenerator {
                label: self.label.clone(),
                reason: format!("window does not fit chain {chain_dims:?}"),
            });
        }
        let left: usize = chain_dims[..self.first].iter().product();
        let right: usize = chain_dims[self.last() + 1..].iter().product();
        Ok(self.matrix.embed(left, right))
    }
}

/// Local operator basis used to build generators.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GeneratorBasis {
    /// Pauli matrices; qubit sites only.
    PauliLike,
    /// Generalized Gell-Mann matrices; any local dimension.
    GellmannLike,
}

fn one() -> C64 {
    C64::new(1.0, 0.0)
}

/// Local basis `[I, B_1, ..., B_{q²−1}]` with short names.
fn local_basis(basis: GeneratorBasis, q: usize) -> Result<Vec<(String, SparseOp)>> {
    let identity = SparseOp::from_triplets(q, (0..q).map(|i| (i, i, one())));
    match basis {
        GeneratorBasis::PauliLike => {
            if q != 2 {
                return Err(Error::UnsupportedBasis {
                    basis: "pauli_like",
                    dim: q,
                });
            }
            let i = C64::new(0.0, 1.0);
            Ok(vec![
                ("I".into(), identity),
                (
                    "X".into(),
                    SparseOp::from_triplets(2, [(0, 1, one()), (1, 0, one())]),
                ),
                (
                    "Y".into(),
                    SparseOp::from_triplets(2, [(0, 1, -i), (1, 0, i)]),
                ),
                (
                    "Z".into(),
                    SparseOp::from_triplets(2, [(0, 0, one()), (1, 1, -one())]),
                ),
            ])
        }
        GeneratorBasis::GellmannLike => {
            let mut out = vec![("g0".to_string(), identity)];
            let i = C64::new(0.0, 1.0);
            for j in 0..q {
                for k in j + 1..q {
                    out.push((
                        format!("s{j}{k}"),
                        SparseOp::from_triplets(q, [(j, k, one()), (k, j, one())]),
                    ));
                    out.push((
                        format!("a{j}{k}"),
                        SparseOp::from_triplets(q, [(j, k, -i), (k, j, i)]),
                    ));
                }
            }
            for l in 1..q {
                // diag(1, ..., 1, −l, 0, ...) / l has unit operator norm
                let entries =
                    (0..l)
                        .map(|m| (m, m, one()))
                        .chain(std::iter::once((l, l, -one() * l as f64)));
                out.push((
                    format!("d{l}"),
                    SparseOp::from_triplets(q, entries).scale(1.0 / l as f64),
                ));
            }
            Ok(out)
        }
    }
}

/// Complete traceless Hermitian basis on every contiguous `k`-site window of
/// the chain (embezzler included), each element normalized to unit operator
/// norm. Products of identities are excluded; 1-local products are kept.
pub fn build_generators(
    spec: &ChainSpec,
    k: usize,
    basis: GeneratorBasis,
) -> Result<Vec<GeneratorTerm>> {
    let sites = spec.num_sites();
    if k < 2 || k > sites {
        return Err(out_of_range("k", k, format!("2..={sites}")));
    }
    let dims = spec.site_dims();
    let locals: Vec<Vec<(String, SparseOp)>> = dims
        .iter()
        .map(|&q| local_basis(basis, q))
        .collect::<Result<_>>()?;
    let norms: Vec<Vec<f64>> = locals
        .iter()
        .map(|b| b.iter().map(|(_, op)| op.hermitian_op_norm()).collect())
        .collect();

    let mut out = Vec::new();
    for first in 0..=sites - k {
        let window = &dims[first..first + k];
        let mut choice = vec![0usize; k];
        loop {
            // odometer over local basis indices, last site fastest
            let mut pos = k;
            while pos > 0 {
                pos -= 1;
                choice[pos] += 1;
                if choice[pos] < locals[first + pos].len() {
                    break;
                }
                choice[pos] = 0;
            }
            if choice.iter().all(|&c| c == 0) {
                break;
            }
            let mut op = locals[first][choice[0]].1.clone();
            let mut norm = norms[first][choice[0]];
            let mut name = locals[first][choice[0]].0.clone();
            for s in 1..k {
                let (n, o) = &locals[first + s][choice[s]];
                op = op.kron(o);
                norm *= norms[first + s][choice[s]];
                if basis == GeneratorBasis::GellmannLike {
                    name.push('.');
                }
                name.push_str(n);
            }
            let term = GeneratorTerm::new(
                format!("{first}:{name}"),
                first,
                window.to_vec(),
                op.scale(1.0 / norm),
                1.0,
            )?;
            let penalty = term.distance().max(1) as f64;
            out.push(term.with_penalty(penalty)?);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_qubit_windows() {
        let spec = ChainSpec::new(2, 2, 2).unwrap();
        let gens = build_generators(&spec, 2, GeneratorBasis::PauliLike).unwrap();
        assert_eq!(gens.len(), 2 * 15);
        for g in &gens {
            let dense = g.matrix().to_dense();
            assert!(dense.trace().norm() < 1e-12);
            let norm = crate::qcore::schatten_norm(&dense, f64::INFINITY).unwrap();
            assert!((norm - 1.0).abs() < 1e-12, "{} has norm {norm}", g.label());
        }
        let mut labels: Vec<&str> = gens.iter().map(|g| g.label()).collect();
        labels.sort();
        labels.dedup();
        assert_eq!(labels.len(), 30);
    }

    #[test]
    fn window_count_is_n_for_pairs() {
        for n in 1..5 {
            let spec = ChainSpec::new(n, 2, 2).unwrap();
            let gens = build_generators(&spec, 2, GeneratorBasis::PauliLike).unwrap();
            let mut windows: Vec<usize> = gens.iter().map(|g| g.first()).collect();
            windows.dedup();
            assert_eq!(windows.len(), n);
        }
    }

    #[test]
    fn gellmann_qutrits() {
        let spec = ChainSpec::new(1, 3, 3).unwrap();
        let gens = build_generators(&spec, 2, GeneratorBasis::GellmannLike).unwrap();
        assert_eq!(gens.len(), 81 - 1);
        let one_local = gens.iter().filter(|g| g.active_sites().len() == 1).count();
        assert_eq!(one_local, 2 * 8);
        assert!(build_generators(&spec, 2, GeneratorBasis::PauliLike).is_err());
    }

    #[test]
    fn cut_accounting() {
        let spec = ChainSpec::new(3, 2, 2).unwrap();
        let gens = build_generators(&spec, 2, GeneratorBasis::PauliLike).unwrap();
        let xz = gens.iter().find(|g| g.label() == "1:XZ").unwrap();
        assert_eq!(xz.active_sites(), &[1, 2]);
        assert!(xz.crosses_cut(1));
        assert!(!xz.crosses_cut(0));
        assert_eq!(xz.cut_dimension(1), Some(2));
        let xi = gens.iter().find(|g| g.label() == "1:XI").unwrap();
        assert!(!xi.crosses_cut(1));
        assert_eq!(xi.distance(), 0);
        assert_eq!(xi.penalty(), 1.0);
    }

    #[test]
    fn rejects_bad_generators() {
        let id = SparseOp::from_triplets(2, [(0, 0, one()), (1, 1, one())]);
        assert!(GeneratorTerm::new("id", 0, vec![2], id, 1.0).is_err());
        let big = SparseOp::from_triplets(2, [(0, 1, one() * 2.0), (1, 0, one() * 2.0)]);
        assert!(GeneratorTerm::new("2x", 0, vec![2], big, 1.0).is_err());
        let x = SparseOp::from_triplets(2, [(0, 1, one()), (1, 0, one())]);
        assert!(GeneratorTerm::new("x", 0, vec![2], x.clone(), 0.0).is_err());
        assert!(GeneratorTerm::new("x", 0, vec![3], x, 1.0).is_err());
    }
}
