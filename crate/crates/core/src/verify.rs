//! Randomized checks of the inequalities the lower bounds rest on.
//!
//! Every check is deterministic in `(seed, trials, params)`: trial `t` draws
//! from its own ChaCha stream seeded with `seed + t`, trials run in parallel
//! and results are reduced in trial order.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{fannes_bound, DEFAULT_C, FANNES_MAX_EPSILON};
use crate::circuit::{
    build_generators, evolve_schedule, ChainSpec, CostMode, GeneratorBasis, Schedule, Slice,
};
use crate::error::{out_of_range, Error, Result};
use crate::qcore::random::{gaussian_hermitian, haar_ket, hermitian_with_norm, induced_mixed};
use crate::qcore::{
    entropy_of_spectrum, partial_trace_matrix, schatten_norm, schmidt_spectrum, tensor_product,
    trace_norm, unitary_from_hermitian, von_neumann_entropy, CMatrix, CVector, DensityMatrix,
    HilbertFactorization, Ket, LogBase,
};

/// Additive slack for the Fannes and norm checks.
pub const DEFAULT_SLACK: f64 = 1e-7;
/// Additive slack for checks whose left side is a finite difference or a
/// long evolution.
pub const EVOLUTION_SLACK: f64 = 1e-6;
/// Central finite-difference step for entropy rates.
pub const FD_STEP: f64 = 1e-5;
/// Largest total dimension accepted by the chain checks.
pub const VERIFY_DIM_CAP: usize = 1 << 10;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationRecord {
    pub check_name: String,
    pub dims: Vec<usize>,
    pub trials: usize,
    pub violations: usize,
    /// `min_t (rhs − lhs)`.
    pub worst_margin: f64,
    pub seed: u64,
    pub slack: f64,
    /// Observed convergence order of the finite-difference derivative.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub fd_order: Option<f64>,
}

impl VerificationRecord {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

fn trial_rng(seed: u64, trial: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed.wrapping_add(trial as u64))
}

/// Runs `trial` for each index in parallel and folds the margins in order.
fn run_trials<F>(
    name: &str,
    dims: Vec<usize>,
    trials: usize,
    seed: u64,
    slack: f64,
    trial: F,
) -> Result<VerificationRecord>
where
    F: Fn(&mut ChaCha8Rng, usize) -> Result<f64> + Sync,
{
    if trials == 0 {
        return Err(out_of_range("trials", 0, ">= 1"));
    }
    let margins: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|t| trial(&mut trial_rng(seed, t), t))
        .collect::<Result<_>>()?;
    Ok(VerificationRecord {
        check_name: name.to_string(),
        dims,
        trials,
        violations: margins.iter().filter(|&&m| m < -slack).count(),
        worst_margin: margins.iter().copied().fold(f64::INFINITY, f64::min),
        seed,
        slack,
        fd_order: None,
    })
}

/// Splits the chain sites into four contiguous, nonempty groups.
fn four_groups(spec: &ChainSpec) -> Result<Vec<usize>> {
    let dims = spec.site_dims();
    let sites = dims.len();
    if sites < 4 {
        return Err(out_of_range("sites", sites, ">= 4 for a four-factor split"));
    }
    let total: usize = dims.iter().product();
    if total > VERIFY_DIM_CAP {
        return Err(Error::DimensionCap {
            dim: total,
            cap: VERIFY_DIM_CAP,
        });
    }
    let mut groups = Vec::with_capacity(4);
    let mut start = 0;
    for g in 0..4 {
        let end = start + (sites - start) / (4 - g);
        groups.push(dims[start..end].iter().product());
        start = end;
    }
    Ok(groups)
}

/// `exp(−i t H₂₃)` applied to factors 2 and 3 of a four-factor ket.
fn evolve_middle(psi: &Ket, h23: &CMatrix, t: f64) -> Result<Ket> {
    let dims = psi.factorization().dims();
    let (d1, dm, d4) = (dims[0], dims[1] * dims[2], dims[3]);
    if h23.nrows() != dm {
        return Err(Error::DimensionMismatch {
            expected: dm,
            actual: h23.nrows(),
        });
    }
    let u = unitary_from_hermitian(h23, t)?;
    let a = psi.amplitudes();
    let mut out = CVector::zeros(a.len());
    for x in 0..d1 {
        for y in 0..d4 {
            for m in 0..dm {
                let mut acc = crate::qcore::C64::new(0.0, 0.0);
                for k in 0..dm {
                    acc += u[(m, k)] * a[(x * dm + k) * d4 + y];
                }
                out[(x * dm + m) * d4 + y] = acc;
            }
        }
    }
    Ket::new(psi.factorization().clone(), out)
}

fn entropy_12(psi: &Ket) -> Result<f64> {
    Ok(entropy_of_spectrum(
        &schmidt_spectrum(psi, 2)?,
        LogBase::NATURAL,
    ))
}

/// Central finite difference of `S(χ₁₂)` (nats) under `I ⊗ H₂₃ ⊗ I` at `t = 0`.
pub fn sie_derivative(psi: &Ket, h23: &CMatrix, step: f64) -> Result<f64> {
    if psi.factorization().num_factors() != 4 {
        return Err(out_of_range(
            "factors",
            psi.factorization().num_factors(),
            "4",
        ));
    }
    let plus = entropy_12(&evolve_middle(psi, h23, step)?)?;
    let minus = entropy_12(&evolve_middle(psi, h23, -step)?)?;
    Ok((plus - minus) / (2.0 * step))
}

/// Order `log₂(|D(h) − D(h/2)| / |D(h/2) − D(h/4)|)`; `None` when the
/// differences are at rounding level.
fn richardson_order(psi: &Ket, h23: &CMatrix, step: f64) -> Result<Option<f64>> {
    let d: Vec<f64> = [step, step / 2.0, step / 4.0]
        .iter()
        .map(|&h| sie_derivative(psi, h23, h))
        .collect::<Result<_>>()?;
    let (e1, e2) = ((d[0] - d[1]).abs(), (d[1] - d[2]).abs());
    if e2 < 1e-12 {
        return Ok(None);
    }
    Ok(Some((e1 / e2).log2()))
}

/// `|dS(χ₁₂)/dt| ≤ 22 log(D) ‖H‖` for random pure states and random
/// Hamiltonians coupling factors 2 and 3, with `D = min(d₂, d₃)`.
pub fn check_sie(trials: usize, spec: &ChainSpec, seed: u64) -> Result<VerificationRecord> {
    let groups = four_groups(spec)?;
    let fact = HilbertFactorization::new(groups.clone())?;
    let dm = groups[1] * groups[2];
    let log_d = (groups[1].min(groups[2]) as f64).ln();
    let draw = |rng: &mut ChaCha8Rng| {
        let psi = haar_ket(&fact, rng);
        let norm = rng.random_range(0.1..2.0);
        (psi, hermitian_with_norm(dm, norm, rng), norm)
    };
    let mut record = run_trials(
        "sie",
        groups.clone(),
        trials,
        seed,
        EVOLUTION_SLACK,
        |rng, _| {
            let (psi, h, norm) = draw(rng);
            let rate = sie_derivative(&psi, &h, FD_STEP)?.abs();
            Ok(DEFAULT_C * log_d * norm - rate)
        },
    )?;
    let (psi, h, _) = draw(&mut trial_rng(seed, 0));
    record.fd_order = richardson_order(&psi, &h, 1e-2)?;
    Ok(record)
}

/// `|S(ρ) − S(σ)| ≤ ε log(dim) − ε log ε` for pairs at trace distance `ε ≤ 1/e`.
pub fn check_fannes(trials: usize, dim: usize, seed: u64) -> Result<VerificationRecord> {
    if !(2..=64).contains(&dim) {
        return Err(out_of_range("dim", dim, "2..=64"));
    }
    let fact = HilbertFactorization::new(vec![dim])?;
    run_trials(
        "fannes",
        vec![dim],
        trials,
        seed,
        DEFAULT_SLACK,
        |rng, _| {
            let rho = induced_mixed(&fact, rng.random_range(1..=dim), rng)?;
            let tau = induced_mixed(&fact, rng.random_range(1..=dim), rng)?;
            let gap = rho.trace_norm_distance(&tau)?;
            let target = rng.random_range(0.0..=FANNES_MAX_EPSILON);
            let t = if gap > 0.0 {
                (target / gap).min(1.0)
            } else {
                0.0
            };
            let mixed = rho.matrix().scale(1.0 - t) + tau.matrix().scale(t);
            let sigma = DensityMatrix::new(fact.clone(), mixed)?;
            let eps = rho.trace_norm_distance(&sigma)?.min(FANNES_MAX_EPSILON);
            let lhs = (von_neumann_entropy(&rho, LogBase::NATURAL)
                - von_neumann_entropy(&sigma, LogBase::NATURAL))
            .abs();
            Ok(fannes_bound(eps, dim as f64, LogBase::NATURAL)? - lhs)
        },
    )
}

/// `‖A‖_p ≤ ‖A‖₁` for `p ∈ {1.5, 2, 3, ∞}` and `‖Tr_B A‖₁ ≤ ‖A‖₁` for random
/// Hermitian matrices and density matrices `A`.
pub fn check_norm_monotonicity(
    trials: usize,
    dims: &HilbertFactorization,
    seed: u64,
) -> Result<VerificationRecord> {
    let dim = dims.total_dim();
    if dim > VERIFY_DIM_CAP {
        return Err(Error::DimensionCap {
            dim,
            cap: VERIFY_DIM_CAP,
        });
    }
    run_trials(
        "norm_monotonicity",
        dims.dims().to_vec(),
        trials,
        seed,
        DEFAULT_SLACK,
        |rng, t| {
            let a = match t % 3 {
                0 => gaussian_hermitian(dim, rng),
                1 => {
                    let g = gaussian_hermitian(dim, rng);
                    let shift = g.trace() / crate::qcore::C64::new(dim as f64, 0.0);
                    g - CMatrix::identity(dim, dim) * shift
                }
                _ => induced_mixed(dims, rng.random_range(1..=dim), rng)?.into_matrix(),
            };
            let one = trace_norm(&a);
            let mut margin = f64::INFINITY;
            for p in [1.5, 2.0, 3.0, f64::INFINITY] {
                margin = margin.min(one - schatten_norm(&a, p)?);
            }
            let keep = rng.random_range(0..=dims.num_factors());
            let reduced = partial_trace_matrix(&a, dims, keep)?;
            Ok(margin.min(one - trace_norm(&reduced)))
        },
    )
}

fn random_schedule(
    rng: &mut ChaCha8Rng,
    spec: &ChainSpec,
    pool: &[crate::circuit::GeneratorTerm],
) -> Result<Schedule> {
    let slices = rng.random_range(1..=3usize);
    let weights: Vec<f64> = (0..slices).map(|_| rng.random_range(0.1..1.0)).collect();
    let total: f64 = weights.iter().sum();
    let mut used: Vec<usize> = Vec::new();
    let mut out = Vec::with_capacity(slices);
    for w in weights {
        let count = rng.random_range(1..=4usize);
        let mut coefficients = Vec::with_capacity(count);
        for _ in 0..count {
            let idx = rng.random_range(0..pool.len());
            if !used.contains(&idx) {
                used.push(idx);
            }
            let y: f64 = rng.random_range(-2.0..2.0);
            coefficients.push((pool[idx].label().to_string(), y));
        }
        out.push(Slice::new(w / total, coefficients));
    }
    used.sort_unstable();
    let terms = used.into_iter().map(|i| pool[i].clone()).collect();
    Schedule::new(spec.site_dims(), terms, out)
}

fn random_product_state(rng: &mut ChaCha8Rng, spec: &ChainSpec) -> Result<DensityMatrix> {
    let mut rho: Option<DensityMatrix> = None;
    for q in spec.site_dims() {
        let site = induced_mixed(
            &HilbertFactorization::new(vec![q])?,
            rng.random_range(1..=q),
            rng,
        )?;
        rho = Some(match rho {
            None => site,
            Some(r) => tensor_product(&r, &site)?,
        });
    }
    Ok(rho.expect("chain has at least two sites"))
}

/// `Σ_i |ΔS(ρ_i)| ≤ 22 log(d) · cost` for random 2-local schedules applied to
/// random product or pure initial states.
pub fn check_cost_entropy_chain(
    trials: usize,
    spec: &ChainSpec,
    seed: u64,
) -> Result<VerificationRecord> {
    let fact = spec.factorization()?;
    if fact.total_dim() > VERIFY_DIM_CAP {
        return Err(Error::DimensionCap {
            dim: fact.total_dim(),
            cap: VERIFY_DIM_CAP,
        });
    }
    let basis = if spec.d == 2 && spec.d_e == 2 {
        GeneratorBasis::PauliLike
    } else {
        GeneratorBasis::GellmannLike
    };
    let pool = build_generators(spec, 2, basis)?;
    let log_d = (spec.d as f64).ln();
    run_trials(
        "cost_entropy_chain",
        fact.dims().to_vec(),
        trials,
        seed,
        EVOLUTION_SLACK,
        |rng, t| {
            let initial = if t % 2 == 0 {
                random_product_state(rng, spec)?
            } else {
                haar_ket(&fact, rng).to_density()
            };
            let schedule = random_schedule(rng, spec, &pool)?;
            chain_margin(&initial, &schedule, log_d)
        },
    )
}

/// `22 log(d) · cost − Σ_i |ΔS(ρ_i)|` for one schedule (nats).
pub fn chain_margin(initial: &DensityMatrix, schedule: &Schedule, log_d: f64) -> Result<f64> {
    let rhs = DEFAULT_C * log_d * schedule.cost(CostMode::Unweighted);
    if schedule.slices().is_empty() {
        return Ok(rhs);
    }
    let traj = evolve_schedule(initial, schedule, 1)?;
    let first = &traj.cut_entropies[0];
    let last = traj
        .cut_entropies
        .last()
        .expect("evolution records the final state");
    let lhs: f64 = first.iter().zip(last).map(|(a, b)| (b - a).abs()).sum();
    Ok(rhs - lhs)
}
