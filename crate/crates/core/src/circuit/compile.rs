use std::collections::BTreeMap;
use std::f64::consts::FRAC_PI_2;

use super::generators::GeneratorTerm;
use super::schedule::{Schedule, Slice};
use super::sparse::SparseOp;
use super::ChainSpec;
use crate::embezzle::Permutation;
use crate::error::{out_of_range, Error, Result};
use crate::qcore::{HilbertFactorization, C64};

/// Largest chain dimension `compile_permutation` accepts.
pub const COMPILE_DIM_CAP: usize = 1 << 10;

/// Transpositions of basis positions whose time-ordered product is `perm`.
fn transpositions(perm: &Permutation) -> Vec<(usize, usize)> {
    let n = perm.len();
    // pos[x]: where original basis state x currently sits; at[p]: inverse
    let mut pos: Vec<usize> = (0..n).collect();
    let mut at: Vec<usize> = (0..n).collect();
    let mut out = Vec::new();
    for x in 0..n {
        let (from, to) = (pos[x], perm.apply(x));
        if from == to {
            continue;
        }
        let y = at[to];
        out.push((from.min(to), from.max(to)));
        pos.swap(x, y);
        at.swap(from, to);
    }
    out
}

/// Basis states `v_0 = p, ..., v_r = q`, changing one differing digit per hop.
fn digit_path(fact: &HilbertFactorization, p: usize, q: usize) -> Vec<usize> {
    let mut digits = fact.digits(p);
    let target = fact.digits(q);
    let mut path = vec![p];
    for site in 0..digits.len() {
        if digits[site] != target[site] {
            digits[site] = target[site];
            path.push(fact.index(&digits));
        }
    }
    path
}

fn hop_term(dims: &[usize], a: usize, b: usize) -> Result<GeneratorTerm> {
    let dim = dims.iter().product();
    let one = C64::new(1.0, 0.0);
    let op = SparseOp::from_triplets(dim, [(a, b, one), (b, a, one)]);
    let term = GeneratorTerm::new(format!("swap:{a}-{b}"), 0, dims.to_vec(), op, 1.0)?;
    let penalty = term.distance().max(1) as f64;
    term.with_penalty(penalty)
}

/// Piecewise-constant schedule realizing the basis permutation `perm` on the
/// chain, up to phases on the moved states.
///
/// Each transposition is routed through single-digit two-level swaps
/// `exp(−i π/2 (|a⟩⟨b| + |b⟩⟨a|))`; every swap occupies one slice of duration
/// `1/m` with coefficient `m π/2`, so the unweighted cost is `m π/2`.
pub fn compile_permutation(perm: &Permutation, spec: &ChainSpec) -> Result<Schedule> {
    let fact = spec.factorization()?;
    let dim = fact.total_dim();
    if dim > COMPILE_DIM_CAP {
        return Err(Error::DimensionCap {
            dim,
            cap: COMPILE_DIM_CAP,
        });
    }
    if perm.len() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            actual: perm.len(),
        });
    }
    if perm.is_identity() {
        return Ok(Schedule::empty(fact.dims().to_vec()));
    }

    let mut hops = Vec::new();
    for (p, q) in transpositions(perm) {
        let path = digit_path(&fact, p, q);
        let r = path.len() - 1;
        let forward = (1..=r).map(|k| (path[k - 1], path[k]));
        let back = (1..r).rev().map(|k| (path[k - 1], path[k]));
        hops.extend(forward.chain(back));
    }
    if hops.is_empty() {
        return Err(out_of_range("permutation", "no hops", "non-identity"));
    }

    let m = hops.len() as f64;
    let mut terms: BTreeMap<String, GeneratorTerm> = BTreeMap::new();
    let mut slices = Vec::with_capacity(hops.len());
    for (a, b) in hops {
        let (a, b) = (a.min(b), a.max(b));
        let term = hop_term(fact.dims(), a, b)?;
        let label = term.label().to_string();
        terms.entry(label.clone()).or_insert(term);
        slices.push(Slice::new(1.0 / m, [(label, FRAC_PI_2 * m)]));
    }
    Schedule::new(fact.dims().to_vec(), terms.into_values().collect(), slices)
}
