mod bounds;
mod compile;
mod simulate;
mod sweep;
mod verify;

use embezzle_core::bounds::{finite_n_bound, itp_asymptotic_bound, FANNES_MAX_EPSILON};
use embezzle_core::circuit::{
    compile_permutation, cut_entropies, evolve_final, EvolveOptions, COMPILE_DIM_CAP,
};
use embezzle_core::embezzle::{
    embezzle_permutation, sorted_spectra_deviation, vdh_protocol, VdhProtocolSummary,
};
use embezzle_core::qcore::tensor_product;
use embezzle_core::{BoundParams, ChainSpec, CostMode, EmbezzleTask, LogBase, Schedule, VdhFamily};

use crate::config::{invalid, Command, RunConfig};
use crate::error::{CliError, CliResult};
use crate::table::{Cell, Report};

pub(crate) use bounds::bounds;
pub(crate) use compile::compile;
pub(crate) use simulate::simulate;
pub(crate) use sweep::sweep;
pub(crate) use verify::verify;

fn report(cfg: &RunConfig, log_base: LogBase, columns: &[&str]) -> Report {
    Report::new(
        cfg.command,
        cfg.parameters.clone(),
        log_base.base(),
        columns,
    )
}

fn family(cfg: &RunConfig, allowed: &[&str]) -> CliResult<String> {
    let family: String = cfg.require("family")?;
    if !allowed.contains(&family.as_str()) {
        return Err(invalid(
            "family",
            &family,
            &format!("expected one of {}", allowed.join(", ")),
        ));
    }
    Ok(family)
}

/// `(d, d_e)` with `d_e` defaulting to `d`.
fn dims(cfg: &RunConfig) -> CliResult<(usize, usize)> {
    let d: usize = cfg.get_or("d", 2)?;
    let d_e: usize = cfg.get_or("d-e", d)?;
    Ok((d, d_e))
}

fn natural_only(cfg: &RunConfig, what: &str) -> CliResult<LogBase> {
    let lb = cfg.log_base()?;
    if lb != LogBase::NATURAL {
        return Err(CliError::Usage(format!(
            "{what} is reported in natural log only"
        )));
    }
    Ok(lb)
}

pub(crate) fn dispatch(cfg: &RunConfig) -> CliResult<Report> {
    match cfg.command {
        Command::Simulate => simulate(cfg),
        Command::Bounds => bounds(cfg),
        Command::Sweep => sweep(cfg),
        Command::Verify => verify(cfg),
        Command::Compile => compile(cfg),
    }
}

/// `n` with `d^n = rank`, if any.
pub fn catalyst_sites(rank: usize, d: usize) -> Option<usize> {
    let (mut power, mut n) = (1usize, 0usize);
    while power < rank {
        power = power.checked_mul(d)?;
        n += 1;
    }
    (power == rank && n >= 1).then_some(n)
}

/// Measured figures of the vdH protocol compiled into a chain circuit.
#[derive(Clone, Debug)]
pub struct CompiledVdh {
    pub spec: ChainSpec,
    pub summary: VdhProtocolSummary,
    pub schedule: Schedule,
    pub cost_unweighted: f64,
    pub cost_distance_penalty: f64,
    /// `‖U(φ_A ⊗ ω)U† − ψ_A ⊗ ω‖₁` with `U` the evolved circuit.
    pub evolved_deviation: f64,
    /// Embezzler entropy change produced by the circuit, in the report base.
    pub delta_s: f64,
    /// Finite-n lower bounds at each of [`CompiledVdh::epsilons`], `None` above 1/e.
    pub bounds: [Option<f64>; 3],
}

impl CompiledVdh {
    /// `[1 - overlap, ½‖Δ‖₁, ‖Δ‖₁]` with `Δ` the one-sided output deviation.
    pub fn epsilons(&self) -> [f64; 3] {
        let dev = self.summary.trace_norm_deviation;
        [self.summary.infidelity, dev / 2.0, dev]
    }
}

/// Compiles the vdH permutation for a rank-`d^n` catalyst on `n` sites and
/// evaluates the finite-n bound at the circuit's measured precision.
pub fn compile_vdh(
    rank: usize,
    d: usize,
    d_e: usize,
    substeps: usize,
    c: f64,
    log_base: LogBase,
) -> CliResult<CompiledVdh> {
    let n = catalyst_sites(rank, d).ok_or_else(|| {
        invalid(
            "N",
            &rank.to_string(),
            &format!("must be a power of d = {d}"),
        )
    })?;
    let spec = ChainSpec::new(n, d, d_e)?;
    let dim = rank * d_e;
    if dim > COMPILE_DIM_CAP {
        return Err(embezzle_core::Error::DimensionCap {
            dim,
            cap: COMPILE_DIM_CAP,
        }
        .into());
    }
    let family = VdhFamily::new(rank)?;
    let task = EmbezzleTask::product_to_max_entangled(d, d_e)?;
    let summary = vdh_protocol(&family, &task)?;
    let catalyst = family.schmidt_probabilities();
    let (perm, _) = embezzle_permutation(&catalyst, &task)?;
    let schedule = compile_permutation(&perm, &spec)?;

    let omega = family.one_sided_state_on(spec.catalyst_factorization()?)?;
    let initial = tensor_product(&task.phi_reduced(), &omega)?;
    let target = tensor_product(&task.psi_reduced(), &omega)?;
    let options = EvolveOptions {
        substeps,
        ..EvolveOptions::default()
    };
    let evolved = evolve_final(&initial, &schedule, options)?;
    let evolved_deviation = evolved.trace_norm_distance(&target)?;
    debug_assert!(
        (sorted_spectra_deviation(&catalyst, &task)? - summary.trace_norm_deviation).abs() < 1e-12
    );
    let delta_s =
        log_base.from_nats((cut_entropies(&evolved)[0] - cut_entropies(&initial)[0]).abs());

    let mut compiled = CompiledVdh {
        spec,
        cost_unweighted: schedule.cost(CostMode::Unweighted),
        cost_distance_penalty: schedule.cost(CostMode::DistancePenalty),
        summary,
        schedule,
        evolved_deviation,
        delta_s,
        bounds: [None; 3],
    };
    for (slot, eps) in compiled.epsilons().into_iter().enumerate() {
        if eps > 0.0 && eps <= FANNES_MAX_EPSILON {
            let params = BoundParams::new(delta_s, eps, d, d_e)?
                .with_c(c)?
                .with_log_base(log_base)?;
            compiled.bounds[slot] = Some(finite_n_bound(&params, n)?.total);
        }
    }
    Ok(compiled)
}

const ITP_COLUMNS: [&str; 11] = [
    "lambda1",
    "lambda2",
    "epsilon",
    "log_base",
    "A",
    "direct_sum",
    "tail_sum",
    "asymptote",
    "tail_ratio",
    "direct_ratio",
    "terms",
];

/// ITP parameters, defaulting to `(0.5, 0.25)`.
fn itp_lambdas(cfg: &RunConfig) -> CliResult<(f64, f64)> {
    Ok((cfg.get_or("lambda1", 0.5)?, cfg.get_or("lambda2", 0.25)?))
}

fn itp_row(lambda1: f64, lambda2: f64, epsilon: f64) -> CliResult<Vec<Cell>> {
    let r = itp_asymptotic_bound(lambda1, lambda2, epsilon)?;
    Ok(vec![
        r.lambda1.into(),
        r.lambda2.into(),
        r.epsilon.into(),
        LogBase::NATURAL.base().into(),
        r.a_constant.into(),
        r.direct_sum.into(),
        r.tail_sum.into(),
        r.asymptote.into(),
        (r.tail_sum / r.asymptote).into(),
        (r.direct_sum / r.asymptote).into(),
        r.terms.into(),
    ])
}

const VDH_COLUMNS: [&str; 10] = [
    "N",
    "d",
    "d_e",
    "log_base",
    "overlap",
    "infidelity",
    "precision_bound",
    "within_bound",
    "trace_norm_deviation",
    "delta_S",
];

fn vdh_row(
    rank: usize,
    d: usize,
    d_e: usize,
    log_base: LogBase,
) -> CliResult<(Vec<Cell>, VdhProtocolSummary)> {
    let s = vdh_protocol(
        &VdhFamily::new(rank)?,
        &EmbezzleTask::product_to_max_entangled(d, d_e)?,
    )?;
    let row = vec![
        rank.into(),
        s.d.into(),
        s.d_e.into(),
        log_base.base().into(),
        s.overlap.into(),
        s.infidelity.into(),
        s.precision_bound.into(),
        (s.infidelity <= s.precision_bound).into(),
        s.trace_norm_deviation.into(),
        log_base.from_nats(s.delta_s).into(),
    ];
    Ok((row, s))
}

fn precision_violation(s: &VdhProtocolSummary) -> Option<String> {
    (s.infidelity > s.precision_bound).then(|| {
        format!(
            "N={} d={}: infidelity {} exceeds log d/log N = {}",
            s.rank, s.d, s.infidelity, s.precision_bound
        )
    })
}
