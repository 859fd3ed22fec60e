use embezzle_core::bounds::{
    asymptotic_bound, coarse_grained_bound, finite_n_bound, klocal_adjusted_bound,
    saturation_length, Remedy,
};
use rayon::prelude::*;

use super::bounds::bound_params;
use super::{
    dims, itp_lambdas, itp_row, natural_only, precision_violation, report, vdh_row, ITP_COLUMNS,
    VDH_COLUMNS,
};
use crate::config::RunConfig;
use crate::error::{CliError, CliResult};
use crate::table::{Cell, Report};

const BOUND_COLUMNS: [&str; 17] = [
    "delta_S",
    "epsilon",
    "d",
    "d_e",
    "c",
    "k",
    "m",
    "log_base",
    "n",
    "finite_n",
    "klocal_overall_factor",
    "klocal_strided_sum",
    "coarse_grained",
    "M",
    "asymptotic_exact_M_sum",
    "asymptotic_clipped_sum",
    "asymptotic_leading_term",
];

/// Columns required to be nonincreasing in ε and nondecreasing in ΔS. The
/// closed-form M-sum is excluded: its subleading logarithm makes it
/// non-monotone at small M.
pub const MONOTONE_COLUMNS: [&str; 6] = [
    "finite_n",
    "klocal_overall_factor",
    "klocal_strided_sum",
    "coarse_grained",
    "asymptotic_clipped_sum",
    "asymptotic_leading_term",
];

const MONOTONE_TOL: f64 = 1e-12;

pub(crate) fn sweep(cfg: &RunConfig) -> CliResult<Report> {
    match cfg.raw("family") {
        None => sweep_bounds(cfg),
        Some("vdh") => sweep_vdh(cfg),
        Some("itp") => sweep_itp(cfg),
        Some(other) => Err(crate::config::invalid(
            "family",
            other,
            "expected vdh or itp",
        )),
    }
}

fn nonempty<T>(items: Vec<T>, key: &str) -> CliResult<Vec<T>> {
    if items.is_empty() {
        return Err(CliError::Usage(format!("empty grid for --{key}")));
    }
    Ok(items)
}

fn sweep_bounds(cfg: &RunConfig) -> CliResult<Report> {
    let deltas: Vec<f64> = nonempty(cfg.require_list("delta-S")?, "delta-S")?;
    let epsilons: Vec<f64> = nonempty(cfg.require_list("epsilon")?, "epsilon")?;
    let sites: Option<usize> = cfg.get("sites")?;
    let lb = cfg.log_base()?;
    let points: Vec<(f64, f64)> = deltas
        .iter()
        .flat_map(|&ds| epsilons.iter().map(move |&eps| (ds, eps)))
        .collect();
    let rows: Vec<Vec<Cell>> = points
        .par_iter()
        .map(|&(ds, eps)| bound_grid_row(cfg, ds, eps, sites))
        .collect::<CliResult<_>>()?;
    let mut out = report(cfg, lb, &BOUND_COLUMNS);
    for row in rows {
        out.push(row);
    }
    for col in MONOTONE_COLUMNS {
        out.violations.extend(monotone_violations(&out, col));
    }
    Ok(out)
}

fn bound_grid_row(
    cfg: &RunConfig,
    delta_s: f64,
    epsilon: f64,
    sites: Option<usize>,
) -> CliResult<Vec<Cell>> {
    let p = bound_params(cfg, delta_s, epsilon)?;
    let n = match sites {
        Some(n) => n,
        None => saturation_length(&p)?.max(1),
    };
    let asym = asymptotic_bound(&p).ok();
    Ok(vec![
        p.delta_s.into(),
        p.epsilon.into(),
        p.d.into(),
        p.d_e.into(),
        p.c.into(),
        p.k.into(),
        p.m.into(),
        p.log_base.base().into(),
        n.into(),
        finite_n_bound(&p, n)?.total.into(),
        klocal_adjusted_bound(&p, n, Remedy::OverallFactor)?
            .total
            .into(),
        klocal_adjusted_bound(&p, n, Remedy::StridedSum)?
            .total
            .into(),
        coarse_grained_bound(&p, n)?.total.into(),
        asym.map(|a| a.m).into(),
        asym.map(|a| a.exact_m_sum).into(),
        asym.map(|a| a.clipped_sum).into(),
        asym.map(|a| a.leading_term).into(),
    ])
}

/// Checks `col` is nonincreasing in ε at fixed ΔS and nondecreasing in ΔS at
/// fixed ε, skipping empty cells.
pub fn monotone_violations(report: &Report, col: &str) -> Vec<String> {
    let ds = report.values("delta_S");
    let eps = report.values("epsilon");
    let vals = report.values(col);
    let mut out = Vec::new();
    let n = vals.len();
    for i in 0..n {
        for j in 0..n {
            let (Some(vi), Some(vj)) = (vals[i], vals[j]) else {
                continue;
            };
            let same_ds = ds[i] == ds[j];
            let same_eps = eps[i] == eps[j];
            // row j has smaller ε (same ΔS) or larger ΔS (same ε): value must not drop
            let tighter = (same_ds && eps[j] < eps[i]) || (same_eps && ds[j] > ds[i]);
            if tighter && vj < vi - MONOTONE_TOL {
                out.push(format!(
                    "{col}: {vj} at (delta_S={:?}, epsilon={:?}) is below {vi} at (delta_S={:?}, epsilon={:?})",
                    ds[j], eps[j], ds[i], eps[i]
                ));
            }
        }
    }
    out
}

fn sweep_vdh(cfg: &RunConfig) -> CliResult<Report> {
    let ranks: Vec<usize> = nonempty(cfg.require_list("N")?, "N")?;
    let (d, d_e) = dims(cfg)?;
    let lb = cfg.log_base()?;
    let rows: Vec<_> = ranks
        .par_iter()
        .map(|&rank| vdh_row(rank, d, d_e, lb))
        .collect::<CliResult<_>>()?;
    let mut out = report(cfg, lb, &VDH_COLUMNS);
    let mut best: Option<(usize, f64)> = None;
    for (row, summary) in rows {
        out.violations.extend(precision_violation(&summary));
        if let Some((rank, overlap)) = best {
            if summary.rank > rank && summary.overlap < overlap - MONOTONE_TOL {
                out.violations.push(format!(
                    "overlap {} at N={} is below {overlap} at N={rank}",
                    summary.overlap, summary.rank
                ));
            }
        }
        if best.is_none_or(|(rank, _)| summary.rank > rank) {
            best = Some((summary.rank, summary.overlap));
        }
        out.push(row);
    }
    Ok(out)
}

fn sweep_itp(cfg: &RunConfig) -> CliResult<Report> {
    let lb = natural_only(cfg, "the ITP family")?;
    let epsilons: Vec<f64> = nonempty(cfg.require_list("epsilon")?, "epsilon")?;
    let (lambda1, lambda2) = itp_lambdas(cfg)?;
    let rows: Vec<Vec<Cell>> = epsilons
        .par_iter()
        .map(|&eps| itp_row(lambda1, lambda2, eps))
        .collect::<CliResult<_>>()?;
    let mut out = report(cfg, lb, &ITP_COLUMNS);
    for row in rows {
        out.push(row);
    }
    let eps = out.values("epsilon");
    let sums = out.values("direct_sum");
    for i in 0..eps.len() {
        for j in 0..eps.len() {
            if let (Some(ei), Some(ej), Some(si), Some(sj)) = (eps[i], eps[j], sums[i], sums[j]) {
                if ej < ei && sj < si - MONOTONE_TOL {
                    out.violations.push(format!(
                        "direct_sum {sj} at epsilon={ej} is below {si} at epsilon={ei}"
                    ));
                }
            }
        }
    }
    Ok(out)
}
