use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use super::generators::GeneratorTerm;
use crate::error::{Error, Result};
use crate::qcore::LogBase;

const DURATION_TOL: f64 = 1e-9;

/// Constant-coefficient piece of a control Hamiltonian `Σ_I Y_I T_I`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Slice {
    pub duration: f64,
    pub coefficients: BTreeMap<String, f64>,
}

impl Slice {
    pub fn new(duration: f64, coefficients: impl IntoIterator<Item = (String, f64)>) -> Self {
        Self {
            duration,
            coefficients: coefficients.into_iter().collect(),
        }
    }
}

/// Piecewise-constant control schedule over `t ∈ [0, 1]` on a chain with
/// site dimensions `dims`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(try_from = "RawSchedule", into = "RawSchedule")]
pub struct Schedule {
    dims: Vec<usize>,
    terms: Vec<GeneratorTerm>,
    slices: Vec<Slice>,
    index: HashMap<String, usize>,
}

#[derive(Serialize, Deserialize)]
struct RawSchedule {
    dims: Vec<usize>,
    terms: Vec<GeneratorTerm>,
    slices: Vec<Slice>,
}

impl TryFrom<RawSchedule> for Schedule {
    type Error = Error;
    fn try_from(raw: RawSchedule) -> Result<Self> {
        Schedule::new(raw.dims, raw.terms, raw.slices)
    }
}

impl From<Schedule> for RawSchedule {
    fn from(s: Schedule) -> Self {
        RawSchedule {
            dims: s.dims,
            terms: s.terms,
            slices: s.slices,
        }
    }
}

/// Weighting of `|Y_I|` in the cost functional.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CostMode {
    Unweighted,
    /// Weight each term by its penalty (at least the distance it couples).
    DistancePenalty,
}

impl Schedule {
    /// A schedule with no slices is the identity circuit; otherwise slice
    /// durations must be positive and sum to 1.
    pub fn new(dims: Vec<usize>, terms: Vec<GeneratorTerm>, slices: Vec<Slice>) -> Result<Self> {
        let mut index = HashMap::with_capacity(terms.len());
        for (i, t) in terms.iter().enumerate() {
            t.embedded_check(&dims)?;
            if index.insert(t.label().to_string(), i).is_some() {
                return Err(Error::InvalidSchedule(format!(
                    "duplicate term label {}",
                    t.label()
                )));
            }
        }
        let mut total = 0.0;
        for (n, slice) in slices.iter().enumerate() {
            if !(slice.duration.is_finite() && slice.duration > 0.0) {
                return Err(Error::InvalidSchedule(format!(
                    "slice {n} has duration {}",
                    slice.duration
                )));
            }
            total += slice.duration;
            for (label, y) in &slice.coefficients {
                if !index.contains_key(label) {
                    return Err(Error::InvalidSchedule(format!(
                        "slice {n} references unknown term {label}"
                    )));
                }
                if !y.is_finite() {
                    return Err(Error::InvalidSchedule(format!(
                        "slice {n} coefficient {label} = {y}"
                    )));
                }
            }
        }
        if !slices.is_empty() && (total - 1.0).abs() > DURATION_TOL {
            return Err(Error::InvalidSchedule(format!(
                "durations sum to {total}, expected 1"
            )));
        }
        Ok(Self {
            dims,
            terms,
            slices,
            index,
        })
    }

    pub fn empty(dims: Vec<usize>) -> Self {
        Self {
            dims,
            terms: Vec::new(),
            slices: Vec::new(),
            index: HashMap::new(),
        }
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn terms(&self) -> &[GeneratorTerm] {
        &self.terms
    }

    pub fn slices(&self) -> &[Slice] {
        &self.slices
    }

    pub fn term(&self, label: &str) -> Option<&GeneratorTerm> {
        self.index.get(label).map(|&i| &self.terms[i])
    }

    /// `(term, Y_I)` pairs of a slice.
    pub fn slice_terms<'a>(
        &'a self,
        slice: &'a Slice,
    ) -> impl Iterator<Item = (&'a GeneratorTerm, f64)> + 'a {
        slice
            .coefficients
            .iter()
            .map(move |(label, &y)| (&self.terms[self.index[label]], y))
    }

    /// Splits every slice into `parts` equal slices with the same coefficients.
    pub fn subdivide(&self, parts: usize) -> Result<Self> {
        let parts = parts.max(1);
        let slices = self
            .slices
            .iter()
            .flat_map(|s| {
                std::iter::repeat_n(
                    Slice {
                        duration: s.duration / parts as f64,
                        coefficients: s.coefficients.clone(),
                    },
                    parts,
                )
            })
            .collect();
        Self::new(self.dims.clone(), self.terms.clone(), slices)
    }

    /// `Σ_slices duration · Σ_I w_I |Y_I|`.
    pub fn cost(&self, mode: CostMode) -> f64 {
        self.weighted_sum(|term| match mode {
            CostMode::Unweighted => Some(1.0),
            CostMode::DistancePenalty => Some(term.penalty()),
        })
    }

    /// Unweighted cost restricted to terms crossing `cut`.
    pub fn crossing_cost(&self, cut: usize) -> f64 {
        self.weighted_sum(|term| term.crosses_cut(cut).then_some(1.0))
    }

    /// `Σ_slices duration · Σ_{I crossing cut} log(D_I) |Y_I|`, the
    /// right-hand side of the incremental-entangling bound for `cut` without
    /// the constant `c`.
    pub fn entangling_budget(&self, cut: usize, log_base: LogBase) -> f64 {
        self.weighted_sum(|term| term.cut_dimension(cut).map(|d| log_base.log(d as f64)))
    }

    fn weighted_sum(&self, weight: impl Fn(&GeneratorTerm) -> Option<f64>) -> f64 {
        self.slices
            .iter()
            .map(|slice| {
                let inner: f64 = self
                    .slice_terms(slice)
                    .filter_map(|(term, y)| weight(term).map(|w| w * y.abs()))
                    .sum();
                slice.duration * inner
            })
            .sum()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

impl GeneratorTerm {
    pub(crate) fn embedded_check(&self, dims: &[usize]) -> Result<()> {
        if self.last() >= dims.len() || dims[self.first()..=self.last()] != *self.dims() {
            return Err(Error::InvalidSchedule(format!(
                "term {} does not fit chain dims {dims:?}",
                self.label()
            )));
        }
        Ok(())
    }
}

pub fn schedule_cost(schedule: &Schedule, mode: CostMode) -> f64 {
    schedule.cost(mode)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{build_generators, ChainSpec, GeneratorBasis};

    fn chain() -> (ChainSpec, Vec<GeneratorTerm>) {
        let spec = ChainSpec::new(2, 2, 2).unwrap();
        let gens = build_generators(&spec, 2, GeneratorBasis::PauliLike).unwrap();
        (spec, gens)
    }

    fn slice(duration: f64, coeffs: &[(&str, f64)]) -> Slice {
        Slice::new(duration, coeffs.iter().map(|&(l, y)| (l.to_string(), y)))
    }

    #[test]
    fn costs() {
        let (spec, gens) = chain();
        let dims = spec.site_dims();
        let zero = Schedule::new(
            dims.clone(),
            gens.clone(),
            vec![slice(1.0, &[("0:XX", 0.0)])],
        )
        .unwrap();
        assert_eq!(zero.cost(CostMode::Unweighted), 0.0);
        let one = Schedule::new(
            dims.clone(),
            gens.clone(),
            vec![slice(1.0, &[("0:XX", -3.0)])],
        )
        .unwrap();
        assert_eq!(one.cost(CostMode::Unweighted), 3.0);
        let two = Schedule::new(
            dims,
            gens,
            vec![slice(0.5, &[("0:XX", 2.0)]), slice(0.5, &[("1:ZY", 4.0)])],
        )
        .unwrap();
        assert_eq!(two.cost(CostMode::Unweighted), 3.0);
        assert_eq!(two.cost(CostMode::DistancePenalty), 3.0);
        assert_eq!(two.crossing_cost(0), 1.0);
        assert_eq!(two.crossing_cost(1), 2.0);
        let sub = two.subdivide(7).unwrap();
        assert!((sub.cost(CostMode::Unweighted) - 3.0).abs() < 1e-12);
    }

    #[test]
    fn validation() {
        let (spec, gens) = chain();
        let dims = spec.site_dims();
        assert!(Schedule::new(dims.clone(), gens.clone(), vec![slice(0.5, &[])]).is_err());
        assert!(Schedule::new(
            dims.clone(),
            gens.clone(),
            vec![slice(1.0, &[("nope", 1.0)])]
        )
        .is_err());
        assert!(Schedule::new(
            dims.clone(),
            gens.clone(),
            vec![slice(-1.0, &[]), slice(2.0, &[])]
        )
        .is_err());
        let dup = vec![gens[0].clone(), gens[0].clone()];
        assert!(Schedule::new(dims, dup, vec![]).is_err());
        assert!(Schedule::new(vec![2, 2], gens, vec![]).is_err());
    }

    #[test]
    fn json_round_trip() {
        let (spec, gens) = chain();
        let s = Schedule::new(
            spec.site_dims(),
            gens,
            vec![
                slice(0.25, &[("0:XX", 0.1), ("1:YZ", -2.5)]),
                slice(0.75, &[("0:ZI", 1e-3)]),
            ],
        )
        .unwrap();
        let text = s.to_json().unwrap();
        let back = Schedule::from_json(&text).unwrap();
        assert_eq!(back.slices(), s.slices());
        assert_eq!(back.terms().len(), s.terms().len());
        assert_eq!(back.to_json().unwrap(), text);
        let mut bad: serde_json::Value = serde_json::from_str(&text).unwrap();
        bad["slices"][0]["duration"] = serde_json::json!(0.5);
        assert!(Schedule::from_json(&bad.to_string()).is_err());
    }
}
