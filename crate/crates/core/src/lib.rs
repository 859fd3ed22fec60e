//! Finite-dimensional laboratory for entanglement embezzlement.
//!
//! Modules, from the bottom up:
//!
//! * [`qcore`]: dense linear algebra over tensor-factored Hilbert spaces.
//! * [`embezzle`]: catalyst families and the embezzling protocol.
//! * [`circuit`]: control-Hamiltonian schedules on qudit chains, their cost
//!   and their evolution with cut-entropy tracking.
//! * [`bounds`]: scalar circuit-complexity lower bounds.
//! * [`verify`]: seeded randomized checks of the inequalities behind them.

pub mod bounds;
pub mod circuit;
pub mod embezzle;
mod error;
pub mod qcore;
pub mod verify;

pub use error::{Error, Result};

pub use bounds::{BoundParams, BoundReport};
pub use circuit::{
    ChainSpec, CostMode, GeneratorBasis, GeneratorTerm, Schedule, Slice, Trajectory,
};
pub use embezzle::{EmbezzleTask, ItpFamily, Permutation, VdhFamily};
pub use qcore::{CMatrix, DensityMatrix, HilbertFactorization, Ket, LogBase, C64};
pub use verify::VerificationRecord;
