//! Unified-(q,s) entanglement (UE) and entanglement of assistance (UEoA).
//!
//! Pure states are handled exactly through the reduced-state entropy. Mixed
//! states go through [`convex_roof`]. For two qubits at `(q,s) = (2,1)` the
//! closed form `C²/2` in the Wootters concurrence is available as a fast path,
//! but [`ue_two_qubit`] only trusts it after [`tsallis2_fast_path`] has checked
//! it against the optimizer.

pub mod nelder_mead;
mod roof;

use std::sync::OnceLock;

use serde::Serialize;
use thiserror::Error;

pub use roof::{convex_roof, DecompositionEnsemble, Direction, RoofOptions, RoofResult, MAX_ROOF_DIM, RANK_TOL};

use crate::entropy::{unified_entropy, EntropyError, EntropyParams};
use crate::linalg::{hermitian_eigensystem, ComplexMatrix, LinalgError, C64};
use crate::states::{ginibre_mixed, DensityMatrix, PartitionSpec, PureState, StateError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MeasureError {
    #[error(transparent)]
    State(#[from] StateError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Entropy(#[from] EntropyError),
    #[error("expected a two-qubit state, got dims {0:?}")]
    NotTwoQubit(Vec<usize>),
    #[error("partition must split all parties of a pure state: {0}")]
    NotBipartition(String),
    #[error("dimension {dim} exceeds the convex-roof limit of {limit}")]
    DimensionLimit { dim: usize, limit: usize },
    #[error("optimizer produced no finite value in {restarts} restarts")]
    OptimizerFailure { restarts: usize },
    #[error("invalid optimizer options: {0}")]
    InvalidOptions(String),
    #[error("numeric failure: {0}")]
    Numeric(String),
}

/// `E(|ψ⟩_{A|B}) = S_{q,s}(ρ_A)`, where the partition must cover every party.
pub fn pure_state_ue(psi: &PureState, part: &PartitionSpec, p: &EntropyParams) -> Result<f64, MeasureError> {
    part.validate(psi.n_parties())?;
    if part.n_others() + 1 != psi.n_parties() {
        return Err(MeasureError::NotBipartition(format!(
            "{} parties but the partition names {}",
            psi.n_parties(),
            part.n_others() + 1
        )));
    }
    let focus_dim = psi.dims()[part.focus];
    let rest_dim: usize = part.others.iter().map(|&o| psi.dims()[o]).product();
    // nonzero spectra of the two marginals coincide; diagonalize the smaller one
    let reduced = if focus_dim <= rest_dim { psi.reduce(&[part.focus])? } else { psi.reduce(&part.others)? };
    Ok(unified_entropy(&reduced.spectrum()?, p)?)
}

fn check_two_qubit(rho: &DensityMatrix) -> Result<(), MeasureError> {
    if rho.dims() != [2, 2] {
        return Err(MeasureError::NotTwoQubit(rho.dims().to_vec()));
    }
    Ok(())
}

/// Wootters concurrence `max(0, s₁ − s₂ − s₃ − s₄)`.
///
/// The `sᵢ` are taken as singular values of `τ = Wᵀ (σ_y ⊗ σ_y) W` with
/// `ρ = W W†` over the numerical support, rather than as square roots of the
/// eigenvalues of `ρρ̃`: the latter turns eigensolver noise of ~1e−17 on the
/// kernel into errors of ~1e−9 in `C`.
pub fn concurrence(rho: &DensityMatrix) -> Result<f64, MeasureError> {
    check_two_qubit(rho)?;
    let (spec, vecs) = hermitian_eigensystem(rho.matrix())?;
    let w: Vec<Vec<C64>> = spec
        .values()
        .iter()
        .enumerate()
        .filter(|&(_, &l)| l > RANK_TOL)
        .map(|(j, &l)| vecs.column(j).into_iter().map(|z| z * l.sqrt()).collect())
        .collect();
    let r = w.len();
    // σ_y ⊗ σ_y is the antidiagonal (−1, 1, 1, −1)
    let sign = [-1.0, 1.0, 1.0, -1.0];
    let tau = |i: usize, j: usize| -> C64 { (0..4).map(|k| w[i][k] * w[j][3 - k] * sign[k]).sum() };
    let tau = ComplexMatrix::from_fn(r, r, tau);
    let gram = tau.adjoint().matmul(&tau)?;
    let gram = ComplexMatrix::from_fn(r, r, |a, b| (gram[(a, b)] + gram[(b, a)].conj()) * 0.5);
    let (sv, _) = hermitian_eigensystem(&gram)?;
    let s: Vec<f64> = sv.values().iter().map(|&l| l.max(0.0).sqrt()).collect();
    Ok((s[0] - s[1..].iter().sum::<f64>()).clamp(0.0, 1.0))
}

/// Closed-form Tsallis-2 entanglement of two qubits, `C²/2`.
pub fn tsallis2_two_qubit(rho: &DensityMatrix) -> Result<f64, MeasureError> {
    let c = concurrence(rho)?;
    Ok(0.5 * c * c)
}

/// Outcome of the one-time comparison between `C²/2` and the optimizer.
#[derive(Debug, Clone, Serialize)]
pub struct FastPathValidation {
    pub samples: usize,
    pub tolerance: f64,
    pub max_deviation: f64,
    pub passed: bool,
}

pub const FAST_PATH_SAMPLES: usize = 200;
pub const FAST_PATH_TOLERANCE: f64 = 5e-4;
/// Restarts per roof in the one-time suite; rank-2 landscapes are benign.
pub const FAST_PATH_RESTARTS: usize = 8;
const FAST_PATH_SEED: u64 = 0xFA57_0000;

/// Compares `C²/2` against `convex_roof(min)` at `(2,1)` on random rank-2
/// two-qubit states. Deterministic for given options.
pub fn validate_tsallis2_fast_path(samples: usize, opts: &RoofOptions) -> Result<FastPathValidation, MeasureError> {
    let p = EntropyParams::tsallis2();
    let part = PartitionSpec::new(0, vec![1]);
    let opts = RoofOptions { fast_path: false, ..*opts };
    let mut max_deviation: f64 = 0.0;
    for i in 0..samples {
        let rho = ginibre_mixed(4, 2, FAST_PATH_SEED ^ i as u64)?;
        let closed = tsallis2_two_qubit(&rho)?;
        let roof = convex_roof(&rho, &part, &p, Direction::Min, &RoofOptions { seed: opts.seed ^ i as u64, ..opts })?;
        max_deviation = max_deviation.max((roof.value - closed).abs());
    }
    Ok(FastPathValidation { samples, tolerance: FAST_PATH_TOLERANCE, max_deviation, passed: max_deviation < FAST_PATH_TOLERANCE })
}

static FAST_PATH: OnceLock<FastPathValidation> = OnceLock::new();

/// Process-wide validation of the `C²/2` fast path, run on first use.
pub fn tsallis2_fast_path() -> &'static FastPathValidation {
    FAST_PATH.get_or_init(|| {
        // serial: a rayon worker blocked in this initializer must not steal a job
        // that re-enters it
        let opts = RoofOptions { restarts: FAST_PATH_RESTARTS, parallel: false, ..Default::default() };
        validate_tsallis2_fast_path(FAST_PATH_SAMPLES, &opts).unwrap_or(FastPathValidation {
            samples: 0,
            tolerance: FAST_PATH_TOLERANCE,
            max_deviation: f64::INFINITY,
            passed: false,
        })
    })
}

/// Pure ensembles have exactly one decomposition.
fn rank_one_vector(rho: &DensityMatrix) -> Result<Option<PureState>, MeasureError> {
    let (spec, vecs) = hermitian_eigensystem(rho.matrix())?;
    if spec.values().iter().skip(1).all(|&l| l <= RANK_TOL) {
        return Ok(Some(PureState::normalized(rho.dims().to_vec(), vecs.column(0))?));
    }
    Ok(None)
}

/// UE of a two-qubit state.
pub fn ue_two_qubit(rho: &DensityMatrix, p: &EntropyParams, opts: &RoofOptions) -> Result<f64, MeasureError> {
    check_two_qubit(rho)?;
    let part = PartitionSpec::new(0, vec![1]);
    if let Some(psi) = rank_one_vector(rho)? {
        return pure_state_ue(&psi, &part, p);
    }
    if p.is_tsallis2() && opts.fast_path && tsallis2_fast_path().passed {
        return tsallis2_two_qubit(rho);
    }
    Ok(convex_roof(rho, &part, p, Direction::Min, opts)?.value)
}

/// UEoA of a two-qubit state.
pub fn ueoa_two_qubit(rho: &DensityMatrix, p: &EntropyParams, opts: &RoofOptions) -> Result<f64, MeasureError> {
    check_two_qubit(rho)?;
    let part = PartitionSpec::new(0, vec![1]);
    if let Some(psi) = rank_one_vector(rho)? {
        return pure_state_ue(&psi, &part, p);
    }
    Ok(convex_roof(rho, &part, p, Direction::Max, opts)?.value)
}
