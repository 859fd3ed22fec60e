//! Lower bounds on the circuit complexity of embezzlement, evaluated as
//! scalar functions of the task parameters.
//!
//! Entropies and `ΔS` are measured in the report's `log_base`; the ITP
//! norm-based bounds are natural-log quantities.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{out_of_range, Error, Result};
use crate::qcore::LogBase;

/// Largest ε for which the Fannes continuity bound is used.
pub const FANNES_MAX_EPSILON: f64 = 1.0 / std::f64::consts::E;

/// Default SIE constant.
pub const DEFAULT_C: f64 = 22.0;

/// Hard stop on the number of terms summed by the ITP asymptotic bound.
const ITP_MAX_TERMS: usize = 100_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundParams {
    pub delta_s: f64,
    pub epsilon: f64,
    pub d: usize,
    pub d_e: usize,
    pub c: f64,
    pub k: usize,
    /// Coarse-graining cutoff.
    pub m: usize,
    pub log_base: LogBase,
}

impl BoundParams {
    /// Defaults: `c = 22`, `k = 2`, `m = 1`, natural log.
    pub fn new(delta_s: f64, epsilon: f64, d: usize, d_e: usize) -> Result<Self> {
        let params = Self {
            delta_s,
            epsilon,
            d,
            d_e,
            c: DEFAULT_C,
            k: 2,
            m: 1,
            log_base: LogBase::NATURAL,
        };
        params.validate()?;
        Ok(params)
    }

    /// Parameters with `ε = ΔS/(log d · M)`.
    pub fn from_m(
        delta_s: f64,
        m_param: f64,
        d: usize,
        d_e: usize,
        log_base: LogBase,
    ) -> Result<Self> {
        if !(m_param.is_finite() && m_param >= 1.0) {
            return Err(out_of_range("M", m_param, ">= 1"));
        }
        if d < 2 {
            return Err(out_of_range("d", d, ">= 2"));
        }
        let epsilon = delta_s / (log_base.log(d as f64) * m_param);
        Self::new(delta_s, epsilon, d, d_e)?.with_log_base(log_base)
    }

    pub fn with_c(mut self, c: f64) -> Result<Self> {
        self.c = c;
        self.validate()?;
        Ok(self)
    }

    pub fn with_k(mut self, k: usize) -> Result<Self> {
        self.k = k;
        self.validate()?;
        Ok(self)
    }

    pub fn with_m(mut self, m: usize) -> Result<Self> {
        self.m = m;
        self.validate()?;
        Ok(self)
    }

    pub fn with_log_base(mut self, log_base: LogBase) -> Result<Self> {
        self.log_base = log_base;
        self.validate()?;
        Ok(self)
    }

    pub fn with_epsilon(mut self, epsilon: f64) -> Result<Self> {
        self.epsilon = epsilon;
        self.validate()?;
        Ok(self)
    }

    pub fn with_delta_s(mut self, delta_s: f64) -> Result<Self> {
        self.delta_s = delta_s;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.delta_s.is_finite() && self.delta_s >= 0.0) {
            return Err(out_of_range("delta_S", self.delta_s, ">= 0"));
        }
        if !(self.epsilon.is_finite() && self.epsilon > 0.0) {
            return Err(out_of_range("epsilon", self.epsilon, "> 0"));
        }
        if self.d < 2 {
            return Err(out_of_range("d", self.d, ">= 2"));
        }
        if self.d_e < self.d {
            return Err(out_of_range("d_e", self.d_e, format!(">= d = {}", self.d)));
        }
        if !(self.c.is_finite() && self.c > 0.0) {
            return Err(out_of_range("c", self.c, "> 0"));
        }
        if self.k < 2 {
            return Err(out_of_range("k", self.k, ">= 2"));
        }
        if self.m < 1 {
            return Err(out_of_range("m", self.m, ">= 1"));
        }
        Ok(())
    }

    fn check_fannes(&self) -> Result<()> {
        self.validate()?;
        check_fannes_epsilon(self.epsilon)
    }

    fn log_d(&self) -> f64 {
        self.log_base.log(self.d as f64)
    }
}

fn check_fannes_epsilon(epsilon: f64) -> Result<()> {
    if !(0.0..=FANNES_MAX_EPSILON).contains(&epsilon) {
        return Err(out_of_range("epsilon", epsilon, "[0, 1/e]"));
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Formula {
    FiniteN,
    KlocalOverallFactor,
    KlocalStridedSum,
    CoarseGrained,
}

impl Formula {
    pub fn name(self) -> &'static str {
        match self {
            Formula::FiniteN => "finite_n",
            Formula::KlocalOverallFactor => "klocal_overall_factor",
            Formula::KlocalStridedSum => "klocal_strided_sum",
            Formula::CoarseGrained => "coarse_grained",
        }
    }
}

/// Per-cut contributions of a cut-summed bound:
/// `total = Σ per_cut_terms / normalization`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub formula: Formula,
    pub params: BoundParams,
    pub n: usize,
    pub cut_indices: Vec<usize>,
    pub per_cut_terms: Vec<f64>,
    pub normalization: f64,
    pub total: f64,
}

pub const BOUND_CSV_HEADER: [&str; 13] = [
    "formula", "delta_S", "epsilon", "d", "d_e", "c", "k", "m", "log_base", "n", "cut", "term",
    "total",
];

impl BoundReport {
    /// One CSV row per cut, columns as in [`BOUND_CSV_HEADER`].
    pub fn write_csv<W: Write>(&self, out: W, header: bool) -> Result<()> {
        let mut w = csv::WriterBuilder::new()
            .has_headers(false)
            .from_writer(out);
        if header {
            w.write_record(BOUND_CSV_HEADER)?;
        }
        let p = &self.params;
        for (cut, term) in self.cut_indices.iter().zip(&self.per_cut_terms) {
            w.write_record([
                self.formula.name().to_string(),
                p.delta_s.to_string(),
                p.epsilon.to_string(),
                p.d.to_string(),
                p.d_e.to_string(),
                p.c.to_string(),
                p.k.to_string(),
                p.m.to_string(),
                p.log_base.base().to_string(),
                self.n.to_string(),
                cut.to_string(),
                term.to_string(),
                self.total.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// `ε log(dim) − ε log ε`, zero at `ε = 0`; defined for `ε ≤ 1/e`.
pub fn fannes_bound(epsilon: f64, dim: f64, log_base: LogBase) -> Result<f64> {
    check_fannes_epsilon(epsilon)?;
    if !(dim.is_finite() && dim >= 1.0) {
        return Err(out_of_range("dim", dim, ">= 1"));
    }
    if epsilon == 0.0 {
        return Ok(0.0);
    }
    Ok(epsilon * log_base.log(dim) - epsilon * log_base.log(epsilon))
}

/// `Σ_i |ΔS_i| / (c log d)`.
pub fn entropy_sum_bound(
    delta_s_per_cut: &[f64],
    d: usize,
    c: f64,
    log_base: LogBase,
) -> Result<f64> {
    if d < 2 {
        return Err(out_of_range("d", d, ">= 2"));
    }
    if !(c.is_finite() && c > 0.0) {
        return Err(out_of_range("c", c, "> 0"));
    }
    Ok(delta_s_per_cut.iter().map(|x| x.abs()).sum::<f64>() / (c * log_base.log(d as f64)))
}

/// Clipped entropy term of cut `i`: `max(ΔS − ε log(d_e d^i / ε), 0)`.
fn cut_term(p: &BoundParams, i: usize) -> f64 {
    let lb = p.log_base;
    let fannes = p.epsilon * (lb.log(p.d_e as f64) + i as f64 * p.log_d() - lb.log(p.epsilon));
    (p.delta_s - fannes).max(0.0)
}

fn cut_report(
    formula: Formula,
    params: &BoundParams,
    n: usize,
    cuts: Vec<usize>,
    normalization: f64,
) -> BoundReport {
    let per_cut_terms: Vec<f64> = cuts.iter().map(|&i| cut_term(params, i)).collect();
    let total = per_cut_terms.iter().sum::<f64>() / normalization;
    BoundReport {
        formula,
        params: *params,
        n,
        cut_indices: cuts,
        per_cut_terms,
        normalization,
        total,
    }
}

fn check_n(n: usize) -> Result<()> {
    if n < 1 {
        return Err(out_of_range("n", n, ">= 1"));
    }
    Ok(())
}

/// `Σ_{i<n} max(ΔS − ε log(d_e d^i/ε), 0) / (c log d)`.
pub fn finite_n_bound(params: &BoundParams, n: usize) -> Result<BoundReport> {
    params.check_fannes()?;
    check_n(n)?;
    Ok(cut_report(
        Formula::FiniteN,
        params,
        n,
        (0..n).collect(),
        params.c * params.log_d(),
    ))
}

/// Number of cuts with a nonzero term; beyond it the finite-n bound no longer
/// grows with `n`.
pub fn saturation_length(params: &BoundParams) -> Result<usize> {
    params.check_fannes()?;
    let lb = params.log_base;
    let x = (params.delta_s / params.epsilon - lb.log(params.d_e as f64) + lb.log(params.epsilon))
        / params.log_d();
    if x <= 0.0 {
        return Ok(0);
    }
    // terms are strictly positive for i < x
    let mut len = x.ceil() as usize;
    while len > 0 && cut_term(params, len - 1) <= 0.0 {
        len -= 1;
    }
    while cut_term(params, len) > 0.0 {
        len += 1;
    }
    Ok(len)
}

/// The finite-n bound at `n = max(saturation_length, 1)`.
pub fn finite_n_bound_saturated(params: &BoundParams) -> Result<BoundReport> {
    finite_n_bound(params, saturation_length(params)?.max(1))
}

/// Large-`M` behaviour with `ε` parameterized as `ΔS/(log d · M)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticBound {
    pub params: BoundParams,
    /// `ΔS/(log d · ε)`.
    pub m_real: f64,
    /// `⌊m_real⌋`.
    pub m: usize,
    /// `ΔS/(log d · m)`, the precision matching the integer `m`.
    pub epsilon_m: f64,
    /// `(MΔS/(2c log d))·(1 + 2 log(ΔS/(log d M d_e))/(log d M) + 1/M)`.
    pub exact_m_sum: f64,
    /// Saturated finite-n bound at `epsilon_m`.
    pub clipped_sum: f64,
    /// `ΔS² / (2c log²d ε)`.
    pub leading_term: f64,
}

pub fn asymptotic_bound(params: &BoundParams) -> Result<AsymptoticBound> {
    params.check_fannes()?;
    let log_d = params.log_d();
    let m_real = params.delta_s / (log_d * params.epsilon);
    // absorb representation error when ε was derived from an integer M
    let m = (m_real * (1.0 + 1e-12)).floor();
    if m < 1.0 {
        return Err(out_of_range("M", m_real, ">= 1"));
    }
    let ds = params.delta_s;
    let c = params.c;
    let ratio = ds / (log_d * m * params.d_e as f64);
    let exact_m_sum = (m * ds / (2.0 * c * log_d))
        * (1.0 + 2.0 * params.log_base.log(ratio) / (log_d * m) + 1.0 / m);
    let leading_term = ds * ds / (2.0 * c * log_d * log_d * params.epsilon);
    let epsilon_m = ds / (log_d * m);
    let clipped_sum = match params.with_epsilon(epsilon_m) {
        Ok(p) if epsilon_m <= FANNES_MAX_EPSILON => finite_n_bound_saturated(&p)?.total,
        _ => 0.0,
    };
    Ok(AsymptoticBound {
        params: *params,
        m_real,
        m: m as usize,
        epsilon_m,
        exact_m_sum,
        clipped_sum,
        leading_term,
    })
}

/// How the cut sum is corrected for `k`-local generators.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Remedy {
    /// Divide the total by `k − 1`.
    OverallFactor,
    /// Keep only cuts `0, k−1, 2(k−1), ...`.
    StridedSum,
}

/// Finite-n bound for `k`-local generators: `log d` in the normalization
/// becomes `⌊k/2⌋ log d`, plus the chosen remedy for terms crossing several cuts.
pub fn klocal_adjusted_bound(
    params: &BoundParams,
    n: usize,
    remedy: Remedy,
) -> Result<BoundReport> {
    params.check_fannes()?;
    check_n(n)?;
    let k = params.k;
    let base = params.c * (k / 2) as f64 * params.log_d();
    Ok(match remedy {
        Remedy::OverallFactor => cut_report(
            Formula::KlocalOverallFactor,
            params,
            n,
            (0..n).collect(),
            base * (k - 1) as f64,
        ),
        Remedy::StridedSum => cut_report(
            Formula::KlocalStridedSum,
            params,
            n,
            (0..n).step_by(k - 1).collect(),
            base,
        ),
    })
}

/// Finite-n bound restricted to the first `params.m` cuts.
pub fn coarse_grained_bound(params: &BoundParams, n: usize) -> Result<BoundReport> {
    params.check_fannes()?;
    check_n(n)?;
    let cuts = (0..n.min(params.m)).collect();
    Ok(cut_report(
        Formula::CoarseGrained,
        params,
        n,
        cuts,
        params.c * params.log_d(),
    ))
}

/// `m ΔS / (c log d)`: the `ε → 0` limit of the coarse-grained bound.
pub fn coarse_grained_cap(params: &BoundParams) -> Result<f64> {
    params.validate()?;
    Ok(params.m as f64 * params.delta_s / (params.c * params.log_d()))
}

/// `½ Σ_i max(δ_i − ε, 0)`.
pub fn schatten_bound(norm_deltas: &[f64], epsilon: f64) -> f64 {
    0.5 * norm_deltas
        .iter()
        .map(|&x| (x - epsilon).max(0.0))
        .sum::<f64>()
}

fn check_lambda(name: &'static str, l: f64) -> Result<()> {
    if !(l > 0.0 && l < 1.0) {
        return Err(out_of_range(name, l, "(0, 1)"));
    }
    Ok(())
}

/// Closed-form Schatten `p`-norm of the ITP reduced state on `i` pairs:
/// `((1+λ₁^p)^{1/p} (1+λ₂^p)^{1/p} / ((1+λ₁)(1+λ₂)))^i`.
pub fn itp_norm(lambda1: f64, lambda2: f64, i: usize, p: f64) -> Result<f64> {
    check_lambda("lambda1", lambda1)?;
    check_lambda("lambda2", lambda2)?;
    if p.is_nan() || p < 1.0 {
        return Err(out_of_range("p", p, ">= 1"));
    }
    let per_pair = |l: f64| {
        if p.is_infinite() {
            -(1.0 + l).ln()
        } else {
            (1.0 + l.powf(p)).ln() / p - (1.0 + l).ln()
        }
    };
    Ok((i as f64 * (per_pair(lambda1) + per_pair(lambda2))).exp())
}

/// `A = ln 2 · λ₁^{λ₁/(1+λ₁)} λ₂^{λ₂/(1+λ₂)} / ((1+λ₁)(1+λ₂))`, the `1/i`
/// coefficient of the norm change on `i` pairs at `p = 1 + 1/i`.
pub fn itp_a_constant(lambda1: f64, lambda2: f64) -> Result<f64> {
    check_lambda("lambda1", lambda1)?;
    check_lambda("lambda2", lambda2)?;
    let f = |l: f64| l.powf(l / (1.0 + l)) / (1.0 + l);
    Ok(std::f64::consts::LN_2 * f(lambda1) * f(lambda2))
}

/// Norm change on `i ≥ 1` pairs when a maximally entangled qubit pair is
/// embezzled: `(1 − 2^{−1/(1+i)}) · itp_norm(λ₁, λ₂, i, 1 + 1/i)`.
pub fn itp_norm_delta(lambda1: f64, lambda2: f64, i: usize) -> Result<f64> {
    if i == 0 {
        return Err(out_of_range("i", i, ">= 1"));
    }
    let p = 1.0 + 1.0 / i as f64;
    Ok((1.0 - 2f64.powf(-1.0 / (1.0 + i as f64))) * itp_norm(lambda1, lambda2, i, p)?)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ItpAsymptotic {
    pub lambda1: f64,
    pub lambda2: f64,
    pub epsilon: f64,
    pub a_constant: f64,
    /// `½(1 + tail_sum)`.
    pub direct_sum: f64,
    /// `Σ_{i≥1} max(δ_i − ε, 0)`.
    pub tail_sum: f64,
    /// `A ln(A/ε)`.
    pub asymptote: f64,
    /// Number of pairs with `δ_i > ε`.
    pub terms: usize,
}

/// ITP lower bound summed until the norm changes drop below `ε`.
pub fn itp_asymptotic_bound(lambda1: f64, lambda2: f64, epsilon: f64) -> Result<ItpAsymptotic> {
    if !(epsilon.is_finite() && epsilon > 0.0) {
        return Err(out_of_range("epsilon", epsilon, "> 0"));
    }
    let a = itp_a_constant(lambda1, lambda2)?;
    let mut tail = 0.0;
    let mut terms = 0;
    // δ_i decreases monotonically, so the first clipped term ends the sum
    for i in 1..=ITP_MAX_TERMS {
        let delta = itp_norm_delta(lambda1, lambda2, i)?;
        if delta <= epsilon {
            break;
        }
        tail += delta - epsilon;
        terms = i;
    }
    if terms == ITP_MAX_TERMS {
        return Err(Error::InvalidParameter(format!(
            "epsilon {epsilon} needs more than {ITP_MAX_TERMS} terms"
        )));
    }
    Ok(ItpAsymptotic {
        lambda1,
        lambda2,
        epsilon,
        a_constant: a,
        direct_sum: 0.5 * (1.0 + tail),
        tail_sum: tail,
        asymptote: a * (a / epsilon).ln(),
        terms,
    })
}
