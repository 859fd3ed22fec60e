use std::fs;
use std::path::PathBuf;

use embezzle_core::bounds::DEFAULT_C;

use super::{compile_vdh, dims, family, report};
use crate::config::RunConfig;
use crate::error::CliResult;
use crate::table::{Cell, Report};

const COLUMNS: [&str; 19] = [
    "family",
    "N",
    "d",
    "d_e",
    "c",
    "log_base",
    "sites",
    "slices",
    "terms",
    "cost_unweighted",
    "cost_distance_penalty",
    "infidelity",
    "trace_norm_deviation",
    "evolved_deviation",
    "delta_S",
    "bound_eps_infidelity",
    "bound_eps_half_trace",
    "bound_eps_trace",
    "lower_below_cost",
];

pub(crate) fn compile(cfg: &RunConfig) -> CliResult<Report> {
    family(cfg, &["vdh"])?;
    let rank: usize = cfg.require("N")?;
    let (d, d_e) = dims(cfg)?;
    let substeps: usize = cfg.get_or("substeps", 1)?;
    let c: f64 = cfg.get_or("c", DEFAULT_C)?;
    let lb = cfg.log_base()?;
    let compiled = compile_vdh(rank, d, d_e, substeps, c, lb)?;
    if let Some(path) = cfg.get::<PathBuf>("schedule-out")? {
        fs::write(path, compiled.schedule.to_json()? + "\n")?;
    }

    let below = compiled
        .bounds
        .iter()
        .flatten()
        .all(|&b| b < compiled.cost_unweighted);
    let mut out = report(cfg, lb, &COLUMNS);
    let mut row: Vec<Cell> = vec![
        "vdh".into(),
        rank.into(),
        d.into(),
        d_e.into(),
        c.into(),
        lb.base().into(),
        compiled.spec.n.into(),
        compiled.schedule.slices().len().into(),
        compiled.schedule.terms().len().into(),
        compiled.cost_unweighted.into(),
        compiled.cost_distance_penalty.into(),
        compiled.summary.infidelity.into(),
        compiled.summary.trace_norm_deviation.into(),
        compiled.evolved_deviation.into(),
        compiled.delta_s.into(),
    ];
    row.extend(compiled.bounds.iter().map(|&b| Cell::from(b)));
    row.push(below.into());
    out.push(row);
    if !below {
        out.violations.push(format!(
            "a finite-n lower bound {:?} is not below the circuit cost {}",
            compiled.bounds, compiled.cost_unweighted
        ));
    }
    Ok(out)
}
