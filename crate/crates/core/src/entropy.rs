//! Unified-(q,s) entropy and its Rényi, Tsallis and von Neumann limits.
//!
//! `S_{q,s}(ρ) = [(tr ρ^q)^s − 1] / ((1−q)s)`. The formula is evaluated as
//! `expm1(s·ln tr ρ^q) / ((1−q)s)` with `ln tr ρ^q` accumulated through
//! `ln_1p`/`expm1`, which keeps full relative precision arbitrarily close to
//! the singular loci `q = 1` and `s = 0`. Inside the windows `|q−1| < TAU_Q`
//! and `s < TAU_S` the limit formulas are used instead.
//!
//! All logarithms are natural: that is the base in which the limits of the
//! general formula exist, so the branches join continuously. Use
//! [`von_neumann_bits`] for the conventional base-2 value.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{Spectrum, EPS_PSD, EPS_TRACE};

/// Half-width of the von Neumann window around `q = 1`.
pub const TAU_Q: f64 = 1e-7;
/// Width of the Rényi window above `s = 0`.
pub const TAU_S: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EntropyError {
    #[error("entropy parameters must be finite and nonnegative (q={q}, s={s})")]
    InvalidParams { q: f64, s: f64 },
    #[error("not a density spectrum: {0}")]
    InvalidSpectrum(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    Unified,
    RenyiLimit,
    TsallisLimit,
    VonNeumannLimit,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EntropyParams {
    pub q: f64,
    pub s: f64,
}

impl EntropyParams {
    pub fn new(q: f64, s: f64) -> Result<Self, EntropyError> {
        if !(q >= 0.0 && s >= 0.0 && q.is_finite() && s.is_finite()) {
            return Err(EntropyError::InvalidParams { q, s });
        }
        Ok(Self { q, s })
    }

    /// Tsallis-2, the shared corner of the monogamy and polygamy domains.
    pub fn tsallis2() -> Self {
        Self { q: 2.0, s: 1.0 }
    }

    pub fn regime(&self) -> Regime {
        if (self.q - 1.0).abs() < TAU_Q {
            Regime::VonNeumannLimit
        } else if self.s < TAU_S {
            Regime::RenyiLimit
        } else if self.s == 1.0 {
            Regime::TsallisLimit
        } else {
            Regime::Unified
        }
    }

    pub fn is_tsallis2(&self) -> bool {
        self.q == 2.0 && self.s == 1.0
    }

    fn validate(&self) -> Result<(), EntropyError> {
        Self::new(self.q, self.s).map(|_| ())
    }
}

/// Which of the two baseline inequalities the parameters admit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MonogamyDomainFlag {
    /// `q ≥ 2`, `0 ≤ s ≤ 1`, `qs ≤ 3`.
    pub monogamy_valid: bool,
    /// `1 ≤ q ≤ 2`, `−q² + 4q − 3 ≤ s ≤ 1`.
    pub polygamy_valid: bool,
}

pub fn classify_domain(p: &EntropyParams) -> MonogamyDomainFlag {
    let (q, s) = (p.q, p.s);
    MonogamyDomainFlag {
        monogamy_valid: q >= 2.0 && (0.0..=1.0).contains(&s) && q * s <= 3.0,
        polygamy_valid: (1.0..=2.0).contains(&q) && -q * q + 4.0 * q - 3.0 <= s && s <= 1.0,
    }
}

pub fn unified_entropy(spec: &Spectrum, p: &EntropyParams) -> Result<f64, EntropyError> {
    p.validate()?;
    let values = spec.values();
    if values.is_empty() {
        return Err(EntropyError::InvalidSpectrum("empty".into()));
    }
    if let Some(v) = values.iter().find(|v| !v.is_finite() || **v < -EPS_PSD) {
        return Err(EntropyError::InvalidSpectrum(format!("eigenvalue {v}")));
    }
    let sum: f64 = values.iter().sum();
    if (sum - 1.0).abs() > EPS_TRACE {
        return Err(EntropyError::InvalidSpectrum(format!("eigenvalues sum to {sum}")));
    }
    let clipped: Vec<f64> = values.iter().map(|v| v.clamp(0.0, 1.0) / sum.max(f64::MIN_POSITIVE)).collect();
    Ok(entropy_of_probabilities(&clipped, p))
}

/// Evaluates the entropy on nonnegative values summing to one. No validation.
pub(crate) fn entropy_of_probabilities(values: &[f64], p: &EntropyParams) -> f64 {
    let value = match p.regime() {
        Regime::VonNeumannLimit => values.iter().filter(|&&l| l > 0.0).map(|&l| -l * l.ln()).sum(),
        Regime::RenyiLimit => log_trace_power(values, p.q) / (1.0 - p.q),
        Regime::Unified | Regime::TsallisLimit => {
            (p.s * log_trace_power(values, p.q)).exp_m1() / ((1.0 - p.q) * p.s)
        }
    };
    value.max(0.0)
}

/// `ln Σ λ^q` over strictly positive `λ`, as `ln_1p(Σ λ·expm1((q−1) ln λ))`.
fn log_trace_power(values: &[f64], q: f64) -> f64 {
    let excess: f64 = values.iter().filter(|&&l| l > 0.0).map(|&l| l * ((q - 1.0) * l.ln()).exp_m1()).sum();
    excess.ln_1p()
}

/// `tr ρ^q` over strictly positive eigenvalues.
pub fn trace_power(spec: &Spectrum, q: f64) -> f64 {
    spec.values().iter().filter(|&&l| l > 0.0).map(|&l| l.powf(q)).sum()
}

/// `−tr ρ log₂ ρ`.
pub fn von_neumann_bits(spec: &Spectrum) -> f64 {
    spec.values().iter().filter(|&&l| l > 0.0).map(|&l| -l * l.log2()).sum()
}

/// Entropy of a 2×2 Hermitian unit-trace operator given its entries
/// `[[a, b], [b*, d]]`; eigenvalues in closed form.
pub(crate) fn qubit_entropy(a: f64, d: f64, b_norm_sqr: f64, p: &EntropyParams) -> f64 {
    let t = a + d;
    let diff = a - d;
    let disc = (0.25 * diff * diff + b_norm_sqr).sqrt();
    let hi = (0.5 * t + disc) / t;
    let lo = ((0.5 * t - disc) / t).max(0.0);
    entropy_of_probabilities(&[hi, lo], p)
}
