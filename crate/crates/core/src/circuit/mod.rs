//! Piecewise-constant control schedules on qudit chains and their evolution.

mod compile;
mod evolve;
mod generators;
mod schedule;
mod sparse;

use serde::{Deserialize, Serialize};

use crate::error::{out_of_range, Result};
use crate::qcore::HilbertFactorization;

pub use compile::{compile_permutation, COMPILE_DIM_CAP};
pub use evolve::{
    cut_entropies, entropy_flow, evolve_final, evolve_schedule, evolve_schedule_with,
    EvolveOptions, Propagator, Trajectory, DEFAULT_SUBSTEPS,
};
pub use generators::{build_generators, GeneratorBasis, GeneratorTerm};
pub use schedule::{schedule_cost, CostMode, Schedule, Slice};
pub use sparse::{SparseEntry, SparseOp};

/// An embezzler of dimension `d_e` (site 0) followed by `n` sites of
/// dimension `d`. Cut `i` separates sites `0..=i` from the rest.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainSpec {
    pub n: usize,
    pub d: usize,
    pub d_e: usize,
}

impl ChainSpec {
    pub fn new(n: usize, d: usize, d_e: usize) -> Result<Self> {
        if n < 1 {
            return Err(out_of_range("n", n, ">= 1"));
        }
        if d < 2 {
            return Err(out_of_range("d", d, ">= 2"));
        }
        if d_e < 2 {
            return Err(out_of_range("d_e", d_e, ">= 2"));
        }
        Ok(Self { n, d, d_e })
    }

    pub fn num_sites(&self) -> usize {
        self.n + 1
    }

    pub fn num_cuts(&self) -> usize {
        self.n
    }

    pub fn site_dims(&self) -> Vec<usize> {
        std::iter::once(self.d_e)
            .chain(std::iter::repeat_n(self.d, self.n))
            .collect()
    }

    /// Full chain factorization; fails above the default dimension cap.
    pub fn factorization(&self) -> Result<HilbertFactorization> {
        HilbertFactorization::new(self.site_dims())
    }

    /// The `n` catalyst sites alone.
    pub fn catalyst_factorization(&self) -> Result<HilbertFactorization> {
        HilbertFactorization::uniform(self.n, self.d)
    }
}
