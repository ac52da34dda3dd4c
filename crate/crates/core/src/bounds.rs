//! Monogamy and polygamy bounds built on pairwise UE / UEoA values.
//!
//! Pairwise values are always sorted in descending order before any weighted
//! sum is formed; [`BoundReport::ordering`] records the relabeling.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::entropy::{classify_domain, EntropyParams};
use crate::measures::{
    convex_roof, pure_state_ue, ue_two_qubit, ueoa_two_qubit, Direction, MeasureError, RoofOptions, RANK_TOL,
};
use crate::states::{DensityMatrix, PartitionSpec, QuantumState, StateError};

/// Slack allowed when comparing bounds that are equal in exact arithmetic.
pub const HIERARCHY_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BoundError {
    #[error("invalid tightening parameters: {0}")]
    InvalidParams(String),
    #[error("(q, s) = ({q}, {s}) is outside the {mode} domain")]
    Domain { mode: Mode, q: f64, s: f64 },
    #[error("exponent {exponent} is not admissible in {mode} mode")]
    ExponentRange { mode: Mode, exponent: f64 },
    #[error("pairwise value {index} is {value}; the negative-power bound needs every value > 0")]
    ZeroPairwise { index: usize, value: f64 },
    #[error("mixed global states need a 3-qubit state of rank at most 2 and the mixed-LHS flag (got {0})")]
    MixedLhs(String),
    #[error("bound hierarchy broken: {0}")]
    Hierarchy(String),
    #[error(transparent)]
    Measure(#[from] MeasureError),
    #[error(transparent)]
    State(#[from] StateError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Monogamy,
    Polygamy,
    NegativePower,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Monogamy => "monogamy",
            Mode::Polygamy => "polygamy",
            Mode::NegativePower => "negative-power",
        }
    }

    pub fn admits(self, exponent: f64) -> bool {
        match self {
            Mode::Monogamy => exponent >= 1.0 && exponent.is_finite(),
            Mode::Polygamy => (0.0..=1.0).contains(&exponent),
            Mode::NegativePower => exponent < 0.0 && exponent.is_finite(),
        }
    }

    /// Whether the parameters lie in the domain of the baseline inequality
    /// this mode refines.
    pub fn admits_entropy(self, p: &EntropyParams) -> bool {
        let flags = classify_domain(p);
        match self {
            Mode::Monogamy | Mode::NegativePower => flags.monogamy_valid,
            Mode::Polygamy => flags.polygamy_valid,
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "monogamy" => Ok(Mode::Monogamy),
            "polygamy" => Ok(Mode::Polygamy),
            "negative-power" => Ok(Mode::NegativePower),
            other => Err(format!("unknown mode `{other}` (expected monogamy, polygamy or negative-power)")),
        }
    }
}

/// `k`, `δ` and the power applied to every entanglement value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TighteningParams {
    pub k: f64,
    pub delta: f64,
    pub exponent: f64,
}

impl TighteningParams {
    pub fn new(k: f64, delta: f64, exponent: f64) -> Result<Self, BoundError> {
        let t = Self { k, delta, exponent };
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<(), BoundError> {
        if !(self.k > 0.0 && self.k <= 1.0) {
            return Err(BoundError::InvalidParams(format!("k = {} must lie in (0, 1]", self.k)));
        }
        if !(self.delta >= 1.0 && self.delta.is_finite()) {
            return Err(BoundError::InvalidParams(format!("delta = {} must be a finite value ≥ 1", self.delta)));
        }
        if !self.exponent.is_finite() {
            return Err(BoundError::InvalidParams(format!("exponent = {} is not finite", self.exponent)));
        }
        Ok(())
    }

    /// `k^δ`, the gap factor of the ordering conditions.
    pub fn gap(&self) -> f64 {
        self.k.powf(self.delta)
    }
}

/// A subsystem index together with the number of ones in its binary expansion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BinaryIndex {
    pub j: u64,
    pub hamming_weight: u32,
}

impl BinaryIndex {
    pub fn new(j: u64) -> Self {
        Self { j, hamming_weight: hamming_weight(j) }
    }
}

pub fn hamming_weight(j: u64) -> u32 {
    j.count_ones()
}

/// `((1 + k^δ)^x − 1) / k^{δx}` for `x = t.exponent`.
pub fn tightening_coefficient(t: &TighteningParams) -> Result<f64, BoundError> {
    t.validate()?;
    let g = t.gap();
    let x = t.exponent;
    Ok((x * g.ln_1p()).exp_m1() / g.powf(x))
}

/// Sorts descending and reports whether `k^δ·v_j ≥ v_{j+1}` then holds for
/// every consecutive pair. `perm[i]` is the original index of the i-th entry.
pub fn check_gap_ordering(values: &[f64], t: &TighteningParams) -> (Vec<usize>, bool) {
    let perm = descending_order(values);
    let g = t.gap();
    let holds = perm.windows(2).all(|w| g * values[w[0]] >= values[w[1]]);
    (perm, holds)
}

/// `k^δ·v_i ≥ Σ_{j>i} v_j` for every `i`, in the order given.
pub fn check_tail_condition(values: &[f64], t: &TighteningParams) -> bool {
    let g = t.gap();
    let mut tail: f64 = values.iter().sum();
    for (i, &v) in values.iter().enumerate() {
        tail -= v;
        if i + 1 < values.len() && g * v < tail {
            return false;
        }
    }
    true
}

fn descending_order(values: &[f64]) -> Vec<usize> {
    let mut perm: Vec<usize> = (0..values.len()).collect();
    perm.sort_by(|&a, &b| values[b].total_cmp(&values[a]));
    perm
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Weighting {
    /// `c^{ω_H(j)}` with the tightening coefficient `c`.
    Hamming,
    /// `c^j` with the tightening coefficient `c`.
    Positional,
    /// `x^{ω_H(j)}` with `x` the exponent.
    KimHamming,
    /// `x^j` with `x` the exponent.
    KimPositional,
    /// Unweighted, unpowered sum.
    Plain,
}

impl Weighting {
    pub const ALL: [Weighting; 5] =
        [Weighting::Plain, Weighting::Hamming, Weighting::Positional, Weighting::KimHamming, Weighting::KimPositional];

    pub fn name(self) -> &'static str {
        match self {
            Weighting::Hamming => "hamming",
            Weighting::Positional => "positional",
            Weighting::KimHamming => "kim-hamming",
            Weighting::KimPositional => "kim-positional",
            Weighting::Plain => "plain",
        }
    }
}

/// `Σ_j c^{w(j)} v_j^x` over the values in the order given.
pub fn weighted_power_sum(values: &[f64], t: &TighteningParams, weighting: Weighting) -> Result<f64, BoundError> {
    let x = t.exponent;
    let (c, positional) = match weighting {
        Weighting::Plain => return Ok(values.iter().sum()),
        Weighting::Hamming => (tightening_coefficient(t)?, false),
        Weighting::Positional => (tightening_coefficient(t)?, true),
        Weighting::KimHamming => (x, false),
        Weighting::KimPositional => (x, true),
    };
    Ok(values
        .iter()
        .enumerate()
        .map(|(j, &v)| {
            let w = if positional { j as i32 } else { hamming_weight(j as u64) as i32 };
            c.powi(w) * v.powf(x)
        })
        .sum())
}

/// Mean of the `α`-th powers, an upper bound on the `α`-th power of the
/// global value for `α < 0`.
pub fn mean_power_bound(values: &[f64], alpha: f64) -> Result<f64, BoundError> {
    if !(alpha < 0.0) {
        return Err(BoundError::ExponentRange { mode: Mode::NegativePower, exponent: alpha });
    }
    if values.is_empty() {
        return Err(BoundError::InvalidParams("no pairwise values".into()));
    }
    if let Some((index, &value)) = values.iter().enumerate().find(|(_, &v)| !(v > 0.0)) {
        return Err(BoundError::ZeroPairwise { index, value });
    }
    Ok(values.iter().map(|v| v.powf(alpha)).sum::<f64>() / values.len() as f64)
}

pub const MEAN_POWER: &str = "mean-power";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReportParams {
    pub mode: Mode,
    pub q: f64,
    pub s: f64,
    pub k: f64,
    pub delta: f64,
    pub exponent: f64,
}

/// Both sides of every applicable bound for one state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    /// Global value raised to the exponent.
    pub lhs: f64,
    /// Global value itself; the plain bound compares against this.
    pub lhs_base: f64,
    /// Pairwise values in the partition's B order.
    pub pairwise: Vec<f64>,
    /// `ordering[i]` is the B index placed at sorted position `i`.
    pub ordering: Vec<usize>,
    pub rhs: BTreeMap<String, f64>,
    /// `lhs − rhs` for lower bounds, `rhs − lhs` for upper bounds.
    pub slack: BTreeMap<String, f64>,
    pub preconditions: BTreeMap<String, bool>,
    pub params: ReportParams,
}

impl BoundReport {
    pub fn slack_of(&self, name: &str) -> Option<f64> {
        self.slack.get(name).copied()
    }

    pub fn precondition(&self, name: &str) -> bool {
        self.preconditions.get(name).copied().unwrap_or(false)
    }

    /// Positional ≥ Hamming ≥ Kim (monogamy) or the reverse chain (polygamy),
    /// restricted to bounds whose preconditions hold. `None` when the chain
    /// does not apply to this sample.
    pub fn hierarchy_holds(&self) -> Option<bool> {
        let ham = Weighting::Hamming.name();
        let pos = Weighting::Positional.name();
        let kim = Weighting::KimHamming.name();
        if !(self.precondition(ham) && self.precondition(pos)) {
            return None;
        }
        let (p, h, k) = (self.rhs[pos], self.rhs[ham], self.rhs[kim]);
        match self.params.mode {
            Mode::Monogamy => Some(p >= h - HIERARCHY_TOL && h >= k - HIERARCHY_TOL),
            Mode::Polygamy => Some(p <= h + HIERARCHY_TOL && h <= k + HIERARCHY_TOL),
            Mode::NegativePower => None,
        }
    }
}

/// Options for [`evaluate_bounds`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EvaluateOptions {
    pub roof: RoofOptions,
    /// Allow a mixed global state (3 qubits, rank ≤ 2) through the convex roof.
    pub mixed_lhs: bool,
}

fn check_inputs(p: &EntropyParams, t: &TighteningParams, mode: Mode) -> Result<(), BoundError> {
    t.validate()?;
    if !mode.admits(t.exponent) {
        return Err(BoundError::ExponentRange { mode, exponent: t.exponent });
    }
    if !mode.admits_entropy(p) {
        return Err(BoundError::Domain { mode, q: p.q, s: p.s });
    }
    Ok(())
}

/// Builds a report from an already computed global value and pairwise values.
pub fn evaluate_from_values(
    lhs_base: f64,
    pairwise: &[f64],
    p: &EntropyParams,
    t: &TighteningParams,
    mode: Mode,
) -> Result<BoundReport, BoundError> {
    check_inputs(p, t, mode)?;
    if pairwise.is_empty() {
        return Err(BoundError::InvalidParams("no pairwise values".into()));
    }
    if let Some(v) = std::iter::once(&lhs_base).chain(pairwise).find(|v| !(v.is_finite() && **v >= 0.0)) {
        return Err(BoundError::InvalidParams(format!("entanglement value {v} is not a finite nonnegative number")));
    }

    let (ordering, ordered) = check_gap_ordering(pairwise, t);
    let sorted: Vec<f64> = ordering.iter().map(|&i| pairwise[i]).collect();
    let lhs = lhs_base.powf(t.exponent);
    let mut rhs = BTreeMap::new();
    let mut slack = BTreeMap::new();
    let mut preconditions = BTreeMap::new();
    let lower = mode == Mode::Monogamy;
    let mut put = |name: &str, holds: bool, value: Option<f64>, reference: f64| {
        preconditions.insert(name.to_string(), holds);
        if let Some(r) = value {
            rhs.insert(name.to_string(), r);
            slack.insert(name.to_string(), if lower { reference - r } else { r - reference });
        }
    };

    if mode == Mode::NegativePower {
        let holds = sorted.iter().all(|&v| v > 0.0);
        let value = if holds { Some(mean_power_bound(&sorted, t.exponent)?) } else { None };
        put(MEAN_POWER, holds, value, lhs);
    } else {
        let tail_gap = check_tail_condition(&sorted, t);
        let unit = TighteningParams { k: 1.0, delta: 1.0, ..*t };
        let tail_unit = check_tail_condition(&sorted, &unit);
        let sum = |w| weighted_power_sum(&sorted, t, w);
        put(Weighting::Plain.name(), true, Some(sum(Weighting::Plain)?), lhs_base);
        // reported even when the ordering fails, so its necessity can be studied
        put(Weighting::Hamming.name(), ordered, Some(sum(Weighting::Hamming)?), lhs);
        put(Weighting::Positional.name(), tail_gap, tail_gap.then(|| sum(Weighting::Positional)).transpose()?, lhs);
        put(Weighting::KimHamming.name(), true, Some(sum(Weighting::KimHamming)?), lhs);
        put(
            Weighting::KimPositional.name(),
            tail_unit,
            tail_unit.then(|| sum(Weighting::KimPositional)).transpose()?,
            lhs,
        );
    }

    let report = BoundReport {
        lhs,
        lhs_base,
        pairwise: pairwise.to_vec(),
        ordering,
        rhs,
        slack,
        preconditions,
        params: ReportParams { mode, q: p.q, s: p.s, k: t.k, delta: t.delta, exponent: t.exponent },
    };
    if mode == Mode::Monogamy {
        let (h, k) = (report.rhs["hamming"], report.rhs["kim-hamming"]);
        if h < k - HIERARCHY_TOL {
            return Err(BoundError::Hierarchy(format!("hamming rhs {h} below kim-hamming rhs {k}")));
        }
    }
    Ok(report)
}

fn pair_state(state: &QuantumState, a: usize, b: usize) -> Result<DensityMatrix, BoundError> {
    let rho = state.reduce(&[a, b])?;
    // reductions come back in ascending party order; put A first
    Ok(if a > b { rho.permute(&[1, 0])? } else { rho })
}

/// Global value of the `A | B₀…B_{N−1}` split: exact for pure states, convex
/// roof for small mixed ones when enabled.
pub fn global_value(
    state: &QuantumState,
    part: &PartitionSpec,
    p: &EntropyParams,
    mode: Mode,
    opts: &EvaluateOptions,
) -> Result<f64, BoundError> {
    part.validate(state.n_parties())?;
    let covers_all = part.n_others() + 1 == state.n_parties();
    if let (QuantumState::Pure(psi), true) = (state, covers_all) {
        // the pure state is its own unique ensemble, so UE and UEoA coincide
        return Ok(pure_state_ue(psi, part, p)?);
    }
    let rho = match state {
        QuantumState::Mixed(m) => m.reduce(&part.parties())?,
        QuantumState::Pure(psi) => psi.reduce(&part.parties())?,
    };
    if !opts.mixed_lhs {
        return Err(BoundError::MixedLhs("mixed-LHS evaluation is disabled".into()));
    }
    let rank = rho.spectrum()?.values().iter().filter(|&&l| l > RANK_TOL).count();
    if rho.dims() != [2, 2, 2] || rank > 2 {
        return Err(BoundError::MixedLhs(format!("dims {:?}, rank {rank}", rho.dims())));
    }
    // reduce() sorts parties, so relabel the partition against the sorted list
    let mut sorted = part.parties();
    sorted.sort_unstable();
    let pos = |x: usize| sorted.iter().position(|&y| y == x).unwrap_or(0);
    let local = PartitionSpec::new(pos(part.focus), part.others.iter().map(|&o| pos(o)).collect());
    let direction = if mode == Mode::Polygamy { Direction::Max } else { Direction::Min };
    Ok(convex_roof(&rho, &local, p, direction, &opts.roof)?.value)
}

/// Global and pairwise UE (or UEoA in polygamy mode) of a state.
pub fn measure_values(
    state: &QuantumState,
    part: &PartitionSpec,
    p: &EntropyParams,
    mode: Mode,
    opts: &EvaluateOptions,
) -> Result<(f64, Vec<f64>), BoundError> {
    part.validate(state.n_parties())?;
    let lhs = global_value(state, part, p, mode, opts)?;
    let pairwise = part
        .others
        .iter()
        .map(|&b| {
            let rho = pair_state(state, part.focus, b)?;
            Ok(match mode {
                Mode::Polygamy => ueoa_two_qubit(&rho, p, &opts.roof)?,
                _ => ue_two_qubit(&rho, p, &opts.roof)?,
            })
        })
        .collect::<Result<Vec<f64>, BoundError>>()?;
    Ok((lhs, pairwise))
}

pub fn evaluate_bounds(
    state: &QuantumState,
    part: &PartitionSpec,
    p: &EntropyParams,
    t: &TighteningParams,
    mode: Mode,
    opts: &EvaluateOptions,
) -> Result<BoundReport, BoundError> {
    check_inputs(p, t, mode)?;
    let (lhs, pairwise) = measure_values(state, part, p, mode, opts)?;
    evaluate_from_values(lhs, &pairwise, p, t, mode)
}
