use embezzle_core::bounds::{
    asymptotic_bound, coarse_grained_bound, entropy_sum_bound, fannes_bound, finite_n_bound,
    itp_norm_delta, klocal_adjusted_bound, saturation_length, schatten_bound, Remedy,
    BOUND_CSV_HEADER, DEFAULT_C,
};
use embezzle_core::{BoundParams, BoundReport};

use super::{dims, itp_lambdas, itp_row, natural_only, report, ITP_COLUMNS};
use crate::config::{invalid, RunConfig};
use crate::error::{CliError, CliResult};
use crate::table::{Cell, Report};

const FORMULAS: [&str; 8] = [
    "fannes",
    "entropy_sum",
    "finite_n",
    "klocal",
    "coarse_grained",
    "asymptotic",
    "schatten",
    "itp_asymptotic",
];

pub(crate) fn bounds(cfg: &RunConfig) -> CliResult<Report> {
    let formula: String = cfg.require("formula")?;
    match formula.as_str() {
        "fannes" => fannes(cfg),
        "entropy_sum" => entropy_sum(cfg),
        "finite_n" | "klocal" | "coarse_grained" => cut_summed(cfg, &formula),
        "asymptotic" => asymptotic(cfg),
        "schatten" => schatten(cfg),
        "itp_asymptotic" => {
            let lb = natural_only(cfg, "itp_asymptotic")?;
            let mut columns = vec!["formula"];
            columns.extend(ITP_COLUMNS);
            let mut out = report(cfg, lb, &columns);
            let mut row: Vec<Cell> = vec!["itp_asymptotic".into()];
            let (lambda1, lambda2) = itp_lambdas(cfg)?;
            row.extend(itp_row(lambda1, lambda2, cfg.require("epsilon")?)?);
            out.push(row);
            Ok(out)
        }
        other => Err(invalid(
            "formula",
            other,
            &format!("expected one of {}", FORMULAS.join(", ")),
        )),
    }
}

/// Bound parameters from flags; `epsilon` may be absent only when `M` is given.
pub(super) fn bound_params(cfg: &RunConfig, delta_s: f64, epsilon: f64) -> CliResult<BoundParams> {
    let (d, d_e) = dims(cfg)?;
    Ok(BoundParams::new(delta_s, epsilon, d, d_e)?
        .with_c(cfg.get_or("c", DEFAULT_C)?)?
        .with_k(cfg.get_or("k", 2)?)?
        .with_m(cfg.get_or("m", 1)?)?
        .with_log_base(cfg.log_base()?)?)
}

fn fannes(cfg: &RunConfig) -> CliResult<Report> {
    let lb = cfg.log_base()?;
    let epsilon: f64 = cfg.require("epsilon")?;
    let dim: usize = cfg.require("dim")?;
    let mut out = report(cfg, lb, &["formula", "epsilon", "dim", "log_base", "value"]);
    let value = fannes_bound(epsilon, dim as f64, lb)?;
    out.push(vec![
        "fannes".into(),
        epsilon.into(),
        dim.into(),
        lb.base().into(),
        value.into(),
    ]);
    Ok(out)
}

fn entropy_sum(cfg: &RunConfig) -> CliResult<Report> {
    let lb = cfg.log_base()?;
    let per_cut: Vec<f64> = cfg.require_list("delta-S")?;
    let d: usize = cfg.get_or("d", 2)?;
    let c: f64 = cfg.get_or("c", DEFAULT_C)?;
    let value = entropy_sum_bound(&per_cut, d, c, lb)?;
    let mut out = report(
        cfg,
        lb,
        &[
            "formula",
            "cuts",
            "delta_S_sum",
            "d",
            "c",
            "log_base",
            "value",
        ],
    );
    out.push(vec![
        "entropy_sum".into(),
        per_cut.len().into(),
        per_cut.iter().map(|x| x.abs()).sum::<f64>().into(),
        d.into(),
        c.into(),
        lb.base().into(),
        value.into(),
    ]);
    Ok(out)
}

pub(super) fn bound_rows(out: &mut Report, r: &BoundReport) {
    let p = &r.params;
    for (cut, term) in r.cut_indices.iter().zip(&r.per_cut_terms) {
        out.push(vec![
            r.formula.name().into(),
            p.delta_s.into(),
            p.epsilon.into(),
            p.d.into(),
            p.d_e.into(),
            p.c.into(),
            p.k.into(),
            p.m.into(),
            p.log_base.base().into(),
            r.n.into(),
            (*cut).into(),
            (*term).into(),
            r.total.into(),
        ]);
    }
}

fn remedy(cfg: &RunConfig) -> CliResult<Remedy> {
    match cfg.raw("remedy").unwrap_or("overall_factor") {
        "overall_factor" => Ok(Remedy::OverallFactor),
        "strided_sum" => Ok(Remedy::StridedSum),
        other => Err(invalid(
            "remedy",
            other,
            "expected overall_factor or strided_sum",
        )),
    }
}

fn cut_summed(cfg: &RunConfig, formula: &str) -> CliResult<Report> {
    let params = bound_params(cfg, cfg.require("delta-S")?, cfg.require("epsilon")?)?;
    let n = match cfg.get::<usize>("sites")? {
        Some(n) => n,
        None if formula == "coarse_grained" => params.m,
        None => saturation_length(&params)?.max(1),
    };
    let r = match formula {
        "finite_n" => finite_n_bound(&params, n)?,
        "klocal" => klocal_adjusted_bound(&params, n, remedy(cfg)?)?,
        _ => coarse_grained_bound(&params, n)?,
    };
    let mut out = report(cfg, params.log_base, &BOUND_CSV_HEADER);
    bound_rows(&mut out, &r);
    Ok(out)
}

fn asymptotic(cfg: &RunConfig) -> CliResult<Report> {
    let delta_s: f64 = cfg.require("delta-S")?;
    let params = match (cfg.get::<f64>("M")?, cfg.get::<f64>("epsilon")?) {
        (Some(_), Some(_)) => {
            return Err(CliError::Usage(
                "give either --M or --epsilon, not both".into(),
            ))
        }
        (None, None) => return Err(CliError::Missing("M (or --epsilon)".into())),
        (None, Some(eps)) => bound_params(cfg, delta_s, eps)?,
        (Some(m), None) => {
            let (d, d_e) = dims(cfg)?;
            let eps = BoundParams::from_m(delta_s, m, d, d_e, cfg.log_base()?)?.epsilon;
            bound_params(cfg, delta_s, eps)?
        }
    };
    let a = asymptotic_bound(&params)?;
    let mut out = report(
        cfg,
        params.log_base,
        &[
            "formula",
            "delta_S",
            "epsilon",
            "d",
            "d_e",
            "c",
            "log_base",
            "M_real",
            "M",
            "epsilon_M",
            "exact_M_sum",
            "clipped_sum",
            "leading_term",
            "exact_over_leading",
        ],
    );
    out.push(vec![
        "asymptotic".into(),
        params.delta_s.into(),
        params.epsilon.into(),
        params.d.into(),
        params.d_e.into(),
        params.c.into(),
        params.log_base.base().into(),
        a.m_real.into(),
        a.m.into(),
        a.epsilon_m.into(),
        a.exact_m_sum.into(),
        a.clipped_sum.into(),
        a.leading_term.into(),
        (a.exact_m_sum / a.leading_term).into(),
    ]);
    Ok(out)
}

fn schatten(cfg: &RunConfig) -> CliResult<Report> {
    let lb = natural_only(cfg, "schatten")?;
    let (lambda1, lambda2) = itp_lambdas(cfg)?;
    let epsilon: f64 = cfg.require("epsilon")?;
    let pairs: usize = cfg.require("sites")?;
    let deltas: Vec<f64> = (1..=pairs)
        .map(|i| itp_norm_delta(lambda1, lambda2, i))
        .collect::<Result<_, _>>()?;
    let mut out = report(
        cfg,
        lb,
        &["formula", "lambda1", "lambda2", "epsilon", "pairs", "value"],
    );
    out.push(vec![
        "schatten".into(),
        lambda1.into(),
        lambda2.into(),
        epsilon.into(),
        pairs.into(),
        schatten_bound(&deltas, epsilon).into(),
    ]);
    Ok(out)
}
