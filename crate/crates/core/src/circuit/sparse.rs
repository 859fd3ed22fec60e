use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::qcore::{hermitian_eigen, CMatrix, C64};

const DROP: f64 = 1e-15;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SparseEntry {
    pub row: usize,
    pub col: usize,
    pub re: f64,
    pub im: f64,
}

impl SparseEntry {
    pub fn value(&self) -> C64 {
        C64::new(self.re, self.im)
    }
}

/// Square operator stored as sorted `(row, col, value)` triplets.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SparseOp {
    dim: usize,
    entries: Vec<SparseEntry>,
}

impl SparseOp {
    pub fn from_triplets(
        dim: usize,
        triplets: impl IntoIterator<Item = (usize, usize, C64)>,
    ) -> Self {
        let mut acc: BTreeMap<(usize, usize), C64> = BTreeMap::new();
        for (r, c, v) in triplets {
            assert!(
                r < dim && c < dim,
                "triplet ({r}, {c}) outside dimension {dim}"
            );
            *acc.entry((r, c)).or_default() += v;
        }
        let entries = acc
            .into_iter()
            .filter(|(_, v)| v.norm() > DROP)
            .map(|((row, col), v)| SparseEntry {
                row,
                col,
                re: v.re,
                im: v.im,
            })
            .collect();
        Self { dim, entries }
    }

    pub fn from_dense(m: &CMatrix) -> Self {
        let dim = m.nrows();
        let triplets = (0..dim)
            .flat_map(|r| (0..dim).map(move |c| (r, c)))
            .map(|(r, c)| (r, c, m[(r, c)]));
        Self::from_triplets(dim, triplets)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[SparseEntry] {
        &self.entries
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, C64)> + '_ {
        self.entries.iter().map(|e| (e.row, e.col, e.value()))
    }

    pub fn to_dense(&self) -> CMatrix {
        let mut m = CMatrix::zeros(self.dim, self.dim);
        for (r, c, v) in self.iter() {
            m[(r, c)] += v;
        }
        m
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .map(|e| SparseEntry {
                    re: e.re * s,
                    im: e.im * s,
                    ..*e
                })
                .collect(),
        }
    }

    pub fn kron(&self, other: &SparseOp) -> Self {
        let dim = self.dim * other.dim;
        let triplets = self.iter().flat_map(|(r1, c1, v1)| {
            other
                .iter()
                .map(move |(r2, c2, v2)| (r1 * other.dim + r2, c1 * other.dim + c2, v1 * v2))
        });
        Self::from_triplets(dim, triplets)
    }

    pub fn trace(&self) -> C64 {
        self.iter()
            .filter(|(r, c, _)| r == c)
            .map(|(_, _, v)| v)
            .sum()
    }

    pub fn hermiticity_defect(&self) -> f64 {
        let lookup: BTreeMap<(usize, usize), C64> =
            self.iter().map(|(r, c, v)| ((r, c), v)).collect();
        lookup
            .iter()
            .map(|(&(r, c), v)| {
                let mirror = lookup.get(&(c, r)).copied().unwrap_or_default();
                (v - mirror.conj()).norm()
            })
            .fold(0.0, f64::max)
    }

    /// Indices touched by any nonzero entry, sorted.
    pub fn active_indices(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = self.entries.iter().flat_map(|e| [e.row, e.col]).collect();
        idx.sort_unstable();
        idx.dedup();
        idx
    }

    /// Dense restriction to `indices` (rows and columns).
    pub fn restrict(&self, indices: &[usize]) -> CMatrix {
        let pos: BTreeMap<usize, usize> =
            indices.iter().enumerate().map(|(i, &x)| (x, i)).collect();
        let n = indices.len();
        let mut m = CMatrix::zeros(n, n);
        for (r, c, v) in self.iter() {
            if let (Some(&i), Some(&j)) = (pos.get(&r), pos.get(&c)) {
                m[(i, j)] += v;
            }
        }
        m
    }

    /// Operator norm of a Hermitian operator, computed on its active block.
    pub fn hermitian_op_norm(&self) -> f64 {
        let active = self.active_indices();
        if active.is_empty() {
            return 0.0;
        }
        let (vals, _) = hermitian_eigen(&self.restrict(&active));
        vals.into_iter().map(f64::abs).fold(0.0, f64::max)
    }

    /// Embeds an operator on a window of sites into the full chain:
    /// `I_left ⊗ self ⊗ I_right`.
    pub fn embed(&self, left_dim: usize, right_dim: usize) -> Self {
        let dim = left_dim * self.dim * right_dim;
        let w = self.dim;
        let triplets = (0..left_dim).flat_map(|l| {
            self.iter().flat_map(move |(r, c, v)| {
                (0..right_dim)
                    .map(move |k| ((l * w + r) * right_dim + k, (l * w + c) * right_dim + k, v))
            })
        });
        Self::from_triplets(dim, triplets)
    }

    /// Sum of `coef * op` over operators of the same dimension.
    pub fn linear_combination<'a>(
        dim: usize,
        terms: impl IntoIterator<Item = (f64, &'a SparseOp)>,
    ) -> Self {
        let triplets: Vec<(usize, usize, C64)> = terms
            .into_iter()
            .flat_map(|(coef, op)| op.iter().map(move |(r, c, v)| (r, c, v * coef)))
            .collect();
        Self::from_triplets(dim, triplets)
    }

    /// Whether the operator acts as the identity on tensor factor `site` of
    /// `dims`, i.e. equals `A ⊗ I_site` up to reordering.
    pub fn acts_trivially_on(&self, dims: &[usize], site: usize) -> bool {
        let q = dims[site];
        let stride: usize = dims[site + 1..].iter().product();
        let digit = |x: usize| (x / stride) % q;
        let lookup: BTreeMap<(usize, usize), C64> =
            self.iter().map(|(r, c, v)| ((r, c), v)).collect();
        for (&(r, c), v) in &lookup {
            if digit(r) != digit(c) {
                return false;
            }
            let (rb, cb) = (r - digit(r) * stride, c - digit(c) * stride);
            for k in 0..q {
                let partner = lookup
                    .get(&(rb + k * stride, cb + k * stride))
                    .copied()
                    .unwrap_or_default();
                if (partner - v).norm() > 1e-12 {
                    return false;
                }
            }
        }
        true
    }
}
