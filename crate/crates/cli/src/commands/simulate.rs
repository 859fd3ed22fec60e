use embezzle_core::bounds::DEFAULT_C;
use embezzle_core::circuit::COMPILE_DIM_CAP;

use super::{
    catalyst_sites, compile_vdh, dims, family, itp_lambdas, itp_row, natural_only,
    precision_violation, report, vdh_row, ITP_COLUMNS, VDH_COLUMNS,
};
use crate::config::RunConfig;
use crate::error::CliResult;
use crate::table::{Cell, Report};

pub(crate) fn simulate(cfg: &RunConfig) -> CliResult<Report> {
    match family(cfg, &["vdh", "itp"])?.as_str() {
        "vdh" => simulate_vdh(cfg),
        _ => simulate_itp(cfg),
    }
}

fn simulate_vdh(cfg: &RunConfig) -> CliResult<Report> {
    let rank: usize = cfg.require("N")?;
    let (d, d_e) = dims(cfg)?;
    let substeps: usize = cfg.get_or("substeps", 1)?;
    let lb = cfg.log_base()?;
    let mut columns = vec!["family"];
    columns.extend(VDH_COLUMNS);
    columns.extend([
        "circuit_sites",
        "circuit_slices",
        "circuit_cost",
        "evolved_deviation",
    ]);
    let mut out = report(cfg, lb, &columns);

    let (row, summary) = vdh_row(rank, d, d_e, lb)?;
    // the circuit is simulated only when the catalyst is a chain of d-level sites
    let compiled = match catalyst_sites(rank, d) {
        Some(_) if rank * d_e <= COMPILE_DIM_CAP => {
            Some(compile_vdh(rank, d, d_e, substeps, DEFAULT_C, lb)?)
        }
        _ => None,
    };
    let mut cells: Vec<Cell> = vec!["vdh".into()];
    cells.extend(row);
    cells.extend([
        compiled.as_ref().map(|c| c.spec.n).into(),
        compiled.as_ref().map(|c| c.schedule.slices().len()).into(),
        compiled.as_ref().map(|c| c.cost_unweighted).into(),
        compiled.as_ref().map(|c| c.evolved_deviation).into(),
    ]);
    out.push(cells);
    out.violations.extend(precision_violation(&summary));
    Ok(out)
}

fn simulate_itp(cfg: &RunConfig) -> CliResult<Report> {
    let lb = natural_only(cfg, "the ITP family")?;
    let (lambda1, lambda2) = itp_lambdas(cfg)?;
    let epsilon: f64 = cfg.get_or("epsilon", 1e-3)?;
    let mut columns = vec!["family"];
    columns.extend(ITP_COLUMNS);
    let mut out = report(cfg, lb, &columns);
    let mut cells: Vec<Cell> = vec!["itp".into()];
    cells.extend(itp_row(lambda1, lambda2, epsilon)?);
    out.push(cells);
    Ok(out)
}
