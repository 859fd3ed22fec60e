use embezzle_core::verify::{
    check_cost_entropy_chain, check_fannes, check_norm_monotonicity, check_sie,
};
use embezzle_core::{ChainSpec, LogBase, VerificationRecord};

use super::report;
use crate::config::{invalid, RunConfig};
use crate::error::CliResult;
use crate::table::{Cell, Report};

const COLUMNS: [&str; 9] = [
    "check_name",
    "dims",
    "trials",
    "violations",
    "worst_margin",
    "seed",
    "slack",
    "fd_order",
    "passed",
];

const DEFAULT_TRIALS: usize = 500;
// each chain trial evolves a full schedule
const DEFAULT_CHAIN_TRIALS: usize = 200;
const DEFAULT_SIE_SITES: usize = 3;
const DEFAULT_CHAIN_SITES: usize = 4;
const DEFAULT_FANNES_DIM: usize = 16;

#[derive(Clone, Copy, PartialEq, Eq)]
enum Suite {
    Sie,
    Fannes,
    Norm,
    Chain,
}

fn suites(name: &str) -> CliResult<Vec<Suite>> {
    Ok(match name {
        "all" => vec![Suite::Sie, Suite::Fannes, Suite::Norm, Suite::Chain],
        "sie" => vec![Suite::Sie],
        "fannes" => vec![Suite::Fannes],
        "norm" | "norm_monotonicity" => vec![Suite::Norm],
        "chain" | "cost_entropy_chain" => vec![Suite::Chain],
        other => {
            return Err(invalid(
                "suite",
                other,
                "expected all, sie, fannes, norm_monotonicity or cost_entropy_chain",
            ))
        }
    })
}

pub(crate) fn verify(cfg: &RunConfig) -> CliResult<Report> {
    let suite: String = cfg.get_or("suite", "all".to_string())?;
    let seed: u64 = cfg.require("seed")?;
    let trials: Option<usize> = cfg.get("trials")?;
    let sites: Option<usize> = cfg.get("sites")?;
    let d: usize = cfg.get_or("d", 2)?;
    let d_e: usize = cfg.get_or("d-e", d)?;
    let fannes_dim: usize = cfg.get_or("dim", DEFAULT_FANNES_DIM)?;

    let mut out = report(cfg, LogBase::NATURAL, &COLUMNS);
    for s in suites(&suite)? {
        let rec = match s {
            Suite::Sie => {
                let spec = ChainSpec::new(sites.unwrap_or(DEFAULT_SIE_SITES), d, d_e)?;
                check_sie(trials.unwrap_or(DEFAULT_TRIALS), &spec, seed)?
            }
            Suite::Fannes => check_fannes(trials.unwrap_or(DEFAULT_TRIALS), fannes_dim, seed)?,
            Suite::Norm => {
                let spec = ChainSpec::new(sites.unwrap_or(DEFAULT_SIE_SITES), d, d_e)?;
                check_norm_monotonicity(
                    trials.unwrap_or(DEFAULT_TRIALS),
                    &spec.factorization()?,
                    seed,
                )?
            }
            Suite::Chain => {
                let spec = ChainSpec::new(sites.unwrap_or(DEFAULT_CHAIN_SITES), d, d_e)?;
                check_cost_entropy_chain(trials.unwrap_or(DEFAULT_CHAIN_TRIALS), &spec, seed)?
            }
        };
        if !rec.passed() {
            out.violations.push(format!(
                "{}: {} of {} trials violated, worst margin {}",
                rec.check_name, rec.violations, rec.trials, rec.worst_margin
            ));
        }
        out.push(record_row(&rec));
    }
    Ok(out)
}

fn record_row(rec: &VerificationRecord) -> Vec<Cell> {
    let dims: Vec<String> = rec.dims.iter().map(usize::to_string).collect();
    vec![
        rec.check_name.as_str().into(),
        dims.join("x").into(),
        rec.trials.into(),
        rec.violations.into(),
        rec.worst_margin.into(),
        rec.seed.into(),
        rec.slack.into(),
        rec.fd_order.into(),
        rec.passed().into(),
    ]
}
