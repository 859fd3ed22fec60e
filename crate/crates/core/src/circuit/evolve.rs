use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::schedule::Schedule;
use super::sparse::SparseOp;
use crate::error::{Error, Result};
use crate::qcore::{
    partial_trace_keep_prefix, unitary_from_hermitian, von_neumann_entropy, CMatrix, DensityMatrix,
    LogBase,
};

pub const DEFAULT_SUBSTEPS: usize = 64;

/// How each substep of a slice is propagated.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Propagator {
    /// `exp(−i Δt H)` of the full slice Hamiltonian.
    #[default]
    Exact,
    /// Symmetric product of per-term exponentials (second order in `Δt`).
    Strang,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EvolveOptions {
    pub substeps: usize,
    pub propagator: Propagator,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        Self {
            substeps: DEFAULT_SUBSTEPS,
            propagator: Propagator::Exact,
        }
    }
}

/// Full-chain states and cut entropies (nats) along a schedule, one record
/// per substep plus the initial state.
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<DensityMatrix>,
    /// `cut_entropies[record][i] = S(ρ_i)` with `ρ_i` the state of sites `0..=i`.
    pub cut_entropies: Vec<Vec<f64>>,
}

impl Trajectory {
    pub fn initial(&self) -> &DensityMatrix {
        &self.states[0]
    }

    pub fn last(&self) -> &DensityMatrix {
        self.states
            .last()
            .expect("trajectory holds at least the initial state")
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }
}

/// `S(ρ_i)` in nats for every cut `i = 0..sites−1`.
pub fn cut_entropies(rho: &DensityMatrix) -> Vec<f64> {
    let cuts = rho.factorization().num_factors().saturating_sub(1);
    (0..cuts)
        .map(|i| {
            let reduced = partial_trace_keep_prefix(rho, i + 1).expect("cut inside the chain");
            von_neumann_entropy(&reduced, LogBase::NATURAL)
        })
        .collect()
}

/// Unitary acting as the identity outside `indices`.
#[derive(Clone)]
struct BlockUnitary {
    indices: Vec<usize>,
    block: CMatrix,
}

impl BlockUnitary {
    fn from_hamiltonian(h: &SparseOp, dt: f64) -> Result<Option<Self>> {
        let indices = h.active_indices();
        if indices.is_empty() {
            return Ok(None);
        }
        let block = unitary_from_hermitian(&h.restrict(&indices), dt)?;
        Ok(Some(Self { indices, block }))
    }

    /// `ρ ← U ρ U†`.
    fn conjugate(&self, rho: &mut CMatrix) {
        let dim = rho.nrows();
        if self.indices.len() == dim {
            *rho = &self.block * &*rho * self.block.adjoint();
            return;
        }
        let k = self.indices.len();
        let rows = CMatrix::from_fn(k, dim, |a, c| rho[(self.indices[a], c)]);
        let rows = &self.block * rows;
        for (a, &r) in self.indices.iter().enumerate() {
            for c in 0..dim {
                rho[(r, c)] = rows[(a, c)];
            }
        }
        let cols = CMatrix::from_fn(dim, k, |r, b| rho[(r, self.indices[b])]);
        let cols = cols * self.block.adjoint();
        for (b, &c) in self.indices.iter().enumerate() {
            for r in 0..dim {
                rho[(r, c)] = cols[(r, b)];
            }
        }
    }
}

pub fn evolve_schedule(
    initial: &DensityMatrix,
    schedule: &Schedule,
    substeps: usize,
) -> Result<Trajectory> {
    evolve_schedule_with(
        initial,
        schedule,
        EvolveOptions {
            substeps,
            ..EvolveOptions::default()
        },
    )
}

/// Path-ordered evolution of `initial` under `schedule`, recording the state
/// and every cut entropy after each substep.
pub fn evolve_schedule_with(
    initial: &DensityMatrix,
    schedule: &Schedule,
    options: EvolveOptions,
) -> Result<Trajectory> {
    let factorization = initial.factorization().clone();
    let mut traj = Trajectory {
        times: vec![0.0],
        states: vec![initial.clone()],
        cut_entropies: vec![cut_entropies(initial)],
    };
    propagate(initial, schedule, options, |t, rho| {
        let state = DensityMatrix::from_trusted(factorization.clone(), rho.clone());
        traj.cut_entropies.push(cut_entropies(&state));
        traj.states.push(state);
        traj.times.push(t);
    })?;
    Ok(traj)
}

/// Final state of the evolution without intermediate records.
pub fn evolve_final(
    initial: &DensityMatrix,
    schedule: &Schedule,
    options: EvolveOptions,
) -> Result<DensityMatrix> {
    let rho = propagate(initial, schedule, options, |_, _| {})?;
    Ok(DensityMatrix::from_trusted(
        initial.factorization().clone(),
        rho,
    ))
}

fn propagate(
    initial: &DensityMatrix,
    schedule: &Schedule,
    options: EvolveOptions,
    mut on_step: impl FnMut(f64, &CMatrix),
) -> Result<CMatrix> {
    if initial.factorization().dims() != schedule.dims() {
        return Err(Error::DimensionMismatch {
            expected: schedule.dims().iter().product(),
            actual: initial.dim(),
        });
    }
    if options.substeps == 0 {
        return Err(Error::InvalidParameter("substeps must be >= 1".into()));
    }
    let dim = initial.dim();
    let mut embedded: HashMap<&str, SparseOp> = HashMap::new();
    let mut rho = initial.matrix().clone();
    let mut t = 0.0;

    for slice in schedule.slices() {
        let dt = slice.duration / options.substeps as f64;
        for (term, _) in schedule.slice_terms(slice) {
            if !embedded.contains_key(term.label()) {
                embedded.insert(term.label(), term.embedded(schedule.dims())?);
            }
        }
        let weighted: Vec<(f64, &SparseOp)> = schedule
            .slice_terms(slice)
            .filter(|&(_, y)| y != 0.0)
            .map(|(term, y)| (y, &embedded[term.label()]))
            .collect();
        let steps: Vec<BlockUnitary> = match options.propagator {
            Propagator::Exact => {
                let h = SparseOp::linear_combination(dim, weighted.iter().map(|&(y, op)| (y, op)));
                BlockUnitary::from_hamiltonian(&h, dt)?
                    .into_iter()
                    .collect()
            }
            Propagator::Strang => {
                let half: Vec<BlockUnitary> = weighted
                    .iter()
                    .map(|&(y, op)| BlockUnitary::from_hamiltonian(&op.scale(y), dt / 2.0))
                    .collect::<Result<Vec<_>>>()?
                    .into_iter()
                    .flatten()
                    .collect();
                let mut seq = half.clone();
                seq.extend(half.into_iter().rev());
                seq
            }
        };
        for _ in 0..options.substeps {
            for u in &steps {
                u.conjugate(&mut rho);
            }
            t += dt;
            on_step(t, &rho);
        }
    }
    Ok(rho)
}

/// `|S(ρ_i(final)) − S(ρ_i(initial))|` for every cut, in `log_base`.
pub fn entropy_flow(traj: &Trajectory, log_base: LogBase) -> Result<Vec<f64>> {
    if traj.cut_entropies.len() < 2 {
        return Err(Error::InvalidParameter(format!(
            "entropy flow needs at least 2 records, trajectory has {}",
            traj.cut_entropies.len()
        )));
    }
    let first = &traj.cut_entropies[0];
    let last = traj.cut_entropies.last().expect("checked length");
    Ok(first
        .iter()
        .zip(last)
        .map(|(a, b)| log_base.from_nats((b - a).abs()))
        .collect())
}
