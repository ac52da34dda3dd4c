//! Convex-roof search over pure-state decompositions.
//!
//! A rank-`r` state `ρ = Σ_j μ_j |v_j⟩⟨v_j|` is decomposed into `m`
//! unnormalized vectors `|ψ̃_i⟩ = Σ_j V_ij √μ_j |v_j⟩`, where `V` is an
//! `m × r` isometry. Every decomposition with `m` members arises this way.
//! `V` is the first `r` columns of `U₀·exp(A)` with `U₀` a Haar-random
//! starting unitary and `A` anti-Hermitian, restricted to the Stiefel
//! directions `[[B, −C†], [C, 0]]` (`B` is `r × r`, `C` is `(m−r) × r`), so the
//! search runs over `r² + 2r(m−r)` real coordinates.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::nelder_mead::{self, NelderMeadOptions};
use super::{pure_state_ue, MeasureError};
use crate::entropy::{entropy_of_probabilities, qubit_entropy, EntropyParams};
use crate::linalg::{
    hermitian_eigensystem, jacobi_in_place, subsystem_offsets, ComplexMatrix, C64,
};
use crate::states::{haar_random_unitary, rng_from_seed, DensityMatrix, PartitionSpec, PureState, MAX_MIXED_QUBITS};

/// Largest total dimension accepted by [`convex_roof`].
pub const MAX_ROOF_DIM: usize = 16;
/// Eigenvalues at or below this are treated as zero when fixing the rank.
pub const RANK_TOL: f64 = 1e-11;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    /// Unified entanglement: minimum average over decompositions.
    Min,
    /// Entanglement of assistance: maximum average over decompositions.
    Max,
}

/// Optimizer settings for [`convex_roof`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RoofOptions {
    pub restarts: usize,
    pub max_iterations: usize,
    /// Ensemble size is `ensemble_factor · r²`, between 1 and 4.
    pub ensemble_factor: usize,
    /// Simplex value spread at which a local search stops.
    pub tolerance: f64,
    /// The best two restarts must agree this closely for `converged`.
    pub agreement: f64,
    /// Extra local searches restarted from the incumbent with a shrunken simplex.
    pub polish_rounds: usize,
    pub seed: u64,
    pub parallel: bool,
    /// Use the closed form `C²/2` at `(q,s) = (2,1)` once it has been validated.
    pub fast_path: bool,
}

impl Default for RoofOptions {
    fn default() -> Self {
        Self {
            restarts: 32,
            max_iterations: 2000,
            ensemble_factor: 1,
            tolerance: 1e-10,
            agreement: 1e-6,
            polish_rounds: 3,
            seed: 0x5EED,
            parallel: true,
            fast_path: true,
        }
    }
}

impl RoofOptions {
    pub fn validate(&self) -> Result<(), MeasureError> {
        if self.restarts == 0 {
            return Err(MeasureError::InvalidOptions("restarts must be positive".into()));
        }
        if self.max_iterations == 0 {
            return Err(MeasureError::InvalidOptions("max_iterations must be positive".into()));
        }
        if !(1..=4).contains(&self.ensemble_factor) {
            return Err(MeasureError::InvalidOptions(format!(
                "ensemble_factor {} outside 1..=4",
                self.ensemble_factor
            )));
        }
        if !(self.tolerance > 0.0 && self.agreement > 0.0) {
            return Err(MeasureError::InvalidOptions("tolerances must be positive".into()));
        }
        Ok(())
    }
}

/// Weighted pure-state ensemble `{p_i, |ψ_i⟩}`.
#[derive(Debug, Clone, PartialEq)]
pub struct DecompositionEnsemble {
    pub weights: Vec<f64>,
    pub states: Vec<PureState>,
}

impl DecompositionEnsemble {
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// `Σ p_i |ψ_i⟩⟨ψ_i|`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let d = self.states.first().map_or(1, |s| s.amplitudes().len());
        let mut out = ComplexMatrix::zeros(d, d);
        for (w, psi) in self.weights.iter().zip(&self.states) {
            let a = psi.amplitudes();
            for r in 0..d {
                let x = a[r] * *w;
                for c in 0..d {
                    out[(r, c)] += x * a[c].conj();
                }
            }
        }
        out
    }

    /// `Σ p_i E(ψ_i)` for the given partition.
    pub fn average(&self, part: &PartitionSpec, p: &EntropyParams) -> Result<f64, MeasureError> {
        self.weights
            .iter()
            .zip(&self.states)
            .map(|(w, psi)| Ok(w * pure_state_ue(psi, part, p)?))
            .sum()
    }
}

#[derive(Debug, Clone)]
pub struct RoofResult {
    pub value: f64,
    pub ensemble: DecompositionEnsemble,
    /// Partition in the party labels of the ensemble states.
    pub partition: PartitionSpec,
    pub converged: bool,
    pub restarts_used: usize,
    /// Best value of each restart, in restart order.
    pub restart_values: Vec<f64>,
}

impl RoofResult {
    /// Gap between the best and second-best restart outcomes.
    pub fn restart_spread(&self) -> f64 {
        let mut v = self.restart_values.clone();
        v.sort_by(f64::total_cmp);
        if v.len() < 2 {
            return 0.0;
        }
        (v[1] - v[0]).abs()
    }
}

struct Problem {
    dims: Vec<usize>,
    d: usize,
    rank: usize,
    m: usize,
    /// `√μ_j v_j`, row-major `rank × d`.
    weighted: Vec<C64>,
    /// Offsets on the side whose reduced state is diagonalized (the smaller one).
    small_off: Vec<usize>,
    large_off: Vec<usize>,
    params: EntropyParams,
    sign: f64,
}

struct Scratch {
    h: Vec<C64>,
    w: Vec<C64>,
    e: Vec<C64>,
    v: Vec<C64>,
    psi: Vec<C64>,
    red: Vec<C64>,
    vecs: Vec<C64>,
}

impl Problem {
    fn n_params(&self) -> usize {
        self.rank * self.rank + 2 * self.rank * (self.m - self.rank)
    }

    fn scratch(&self) -> Scratch {
        let ds = self.small_off.len();
        Scratch {
            h: vec![C64::default(); self.m * self.m],
            w: vec![C64::default(); self.m * self.m],
            e: vec![C64::default(); self.m * self.rank],
            v: vec![C64::default(); self.m * self.rank],
            psi: vec![C64::default(); self.d],
            red: vec![C64::default(); ds * ds],
            vecs: vec![C64::default(); ds * ds],
        }
    }

    /// Fills `s.v` with the `m × r` isometry for coordinates `x`.
    fn isometry(&self, x: &[f64], u0: &ComplexMatrix, s: &mut Scratch) {
        let (m, r) = (self.m, self.rank);
        // H = −iA, Hermitian
        s.h.iter_mut().for_each(|z| *z = C64::default());
        let mut k = 0;
        for c in 0..r {
            s.h[c * m + c] = C64::new(x[k], 0.0);
            k += 1;
        }
        let put = |row: usize, col: usize, z: C64, h: &mut [C64]| {
            // A[row][col] = z, A[col][row] = −z*  ⇒  H[row][col] = −iz, H[col][row] = (−iz)*
            let hz = C64::new(z.im, -z.re);
            h[row * m + col] = hz;
            h[col * m + row] = hz.conj();
        };
        for c in 0..r {
            for c2 in (c + 1)..r {
                put(c2, c, C64::new(x[k], x[k + 1]), &mut s.h);
                k += 2;
            }
        }
        for row in r..m {
            for c in 0..r {
                put(row, c, C64::new(x[k], x[k + 1]), &mut s.h);
                k += 2;
            }
        }
        s.w.iter_mut().for_each(|z| *z = C64::default());
        for i in 0..m {
            s.w[i * m + i] = C64::new(1.0, 0.0);
        }
        jacobi_in_place(m, &mut s.h, &mut s.w);
        // E = exp(iH)[:, :r] = W e^{iΛ} W†[:, :r]
        for i in 0..m {
            for c in 0..r {
                let mut acc = C64::default();
                for kk in 0..m {
                    let phase = C64::from_polar(1.0, s.h[kk * m + kk].re);
                    acc += s.w[i * m + kk] * phase * s.w[c * m + kk].conj();
                }
                s.e[i * r + c] = acc;
            }
        }
        for i in 0..m {
            for c in 0..r {
                let mut acc = C64::default();
                for l in 0..m {
                    acc += u0[(i, l)] * s.e[l * r + c];
                }
                s.v[i * r + c] = acc;
            }
        }
    }

    /// Unnormalized member `i` into `s.psi`; returns its weight.
    fn member(&self, i: usize, s: &mut Scratch) -> f64 {
        let (r, d) = (self.rank, self.d);
        s.psi.iter_mut().for_each(|z| *z = C64::default());
        for j in 0..r {
            let coef = s.v[i * r + j];
            let row = &self.weighted[j * d..(j + 1) * d];
            for (p, w) in s.psi.iter_mut().zip(row) {
                *p += coef * w;
            }
        }
        s.psi.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Entropy of the normalized reduced state of `s.psi` (weight `weight`).
    fn member_entropy(&self, weight: f64, s: &mut Scratch) -> f64 {
        let ds = self.small_off.len();
        for a in 0..ds {
            for b in a..ds {
                let z: C64 = self
                    .large_off
                    .iter()
                    .map(|&t| s.psi[self.small_off[a] + t] * s.psi[self.small_off[b] + t].conj())
                    .sum();
                s.red[a * ds + b] = z / weight;
                s.red[b * ds + a] = (z / weight).conj();
            }
        }
        if ds == 2 {
            return qubit_entropy(s.red[0].re, s.red[3].re, s.red[1].norm_sqr(), &self.params);
        }
        s.vecs.iter_mut().for_each(|z| *z = C64::default());
        jacobi_in_place(ds, &mut s.red, &mut s.vecs);
        let mut lam: Vec<f64> = (0..ds).map(|k| s.red[k * ds + k].re.max(0.0)).collect();
        let total: f64 = lam.iter().sum();
        lam.iter_mut().for_each(|l| *l /= total);
        entropy_of_probabilities(&lam, &self.params)
    }

    fn objective(&self, x: &[f64], u0: &ComplexMatrix, s: &mut Scratch) -> f64 {
        self.isometry(x, u0, s);
        let mut total = 0.0;
        for i in 0..self.m {
            let weight = self.member(i, s);
            if weight > 1e-300 {
                total += weight * self.member_entropy(weight, s);
            }
        }
        self.sign * total
    }

    fn ensemble(&self, x: &[f64], u0: &ComplexMatrix) -> Result<DecompositionEnsemble, MeasureError> {
        let mut s = self.scratch();
        self.isometry(x, u0, &mut s);
        let mut weights = Vec::with_capacity(self.m);
        let mut states = Vec::with_capacity(self.m);
        for i in 0..self.m {
            let weight = self.member(i, &mut s);
            if weight <= 1e-15 {
                continue;
            }
            weights.push(weight);
            states.push(PureState::normalized(self.dims.clone(), s.psi.clone())?);
        }
        Ok(DecompositionEnsemble { weights, states })
    }
}

/// Convex-roof extension of the pure-state unified entanglement.
///
/// `rho` is first reduced to the parties of `part`. The returned partition
/// refers to the party order of the reduced state, which is also the order of
/// the ensemble members.
pub fn convex_roof(
    rho: &DensityMatrix,
    part: &PartitionSpec,
    p: &EntropyParams,
    direction: Direction,
    opts: &RoofOptions,
) -> Result<RoofResult, MeasureError> {
    opts.validate()?;
    EntropyParams::new(p.q, p.s)?;
    part.validate(rho.n_parties())?;
    let mut kept = part.parties();
    kept.sort_unstable();
    let reduced = if kept.len() == rho.n_parties() { rho.clone() } else { rho.reduce(&kept)? };
    let local = |g: usize| kept.iter().position(|&k| k == g).expect("party is kept");
    let partition = PartitionSpec::new(local(part.focus), part.others.iter().map(|&o| local(o)).collect());

    let dims = reduced.dims().to_vec();
    let d = reduced.dim();
    if d > MAX_ROOF_DIM || (dims.iter().all(|&x| x == 2) && dims.len() > MAX_MIXED_QUBITS) {
        return Err(MeasureError::DimensionLimit { dim: d, limit: MAX_ROOF_DIM });
    }

    let (spec, vecs) = hermitian_eigensystem(reduced.matrix())?;
    let rank = spec.values().iter().filter(|&&l| l > RANK_TOL).count();
    if rank == 0 {
        return Err(MeasureError::Numeric("state has no eigenvalue above the rank tolerance".into()));
    }
    if rank == 1 {
        let psi = PureState::normalized(dims, vecs.column(0))?;
        let value = pure_state_ue(&psi, &partition, p)?;
        return Ok(RoofResult {
            value,
            ensemble: DecompositionEnsemble { weights: vec![1.0], states: vec![psi] },
            partition,
            converged: true,
            restarts_used: 0,
            restart_values: vec![value],
        });
    }

    let m = opts.ensemble_factor * rank * rank;
    let mut weighted = Vec::with_capacity(rank * d);
    for j in 0..rank {
        let scale = spec.values()[j].sqrt();
        weighted.extend(vecs.column(j).into_iter().map(|z| z * scale));
    }
    let focus_off = subsystem_offsets(&dims, &[partition.focus]);
    let rest_off = subsystem_offsets(&dims, &partition.others);
    let (small_off, large_off) =
        if focus_off.len() <= rest_off.len() { (focus_off, rest_off) } else { (rest_off, focus_off) };
    let problem = Problem {
        dims,
        d,
        rank,
        m,
        weighted,
        small_off,
        large_off,
        params: *p,
        sign: if direction == Direction::Min { 1.0 } else { -1.0 },
    };

    let run = |i: usize| -> (f64, Vec<f64>, ComplexMatrix) {
        let seed = opts.seed ^ (i as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
        let u0 = haar_random_unitary(m, &mut rng_from_seed(seed));
        let mut scratch = problem.scratch();
        let mut nm = NelderMeadOptions {
            max_iterations: opts.max_iterations,
            spread_tolerance: opts.tolerance,
            initial_step: 0.4,
        };
        let mut best =
            nelder_mead::minimize(|x| problem.objective(x, &u0, &mut scratch), &vec![0.0; problem.n_params()], &nm);
        for _ in 0..opts.polish_rounds {
            nm.initial_step *= 0.25;
            let next = nelder_mead::minimize(|x| problem.objective(x, &u0, &mut scratch), &best.x, &nm);
            let gain = best.value - next.value;
            if next.value < best.value {
                best = next;
            }
            if gain < opts.tolerance {
                break;
            }
        }
        (best.value, best.x, u0)
    };

    let outcomes: Vec<(f64, Vec<f64>, ComplexMatrix)> = if opts.parallel {
        (0..opts.restarts).into_par_iter().map(run).collect()
    } else {
        (0..opts.restarts).map(run).collect()
    };

    let restart_values: Vec<f64> = outcomes.iter().map(|o| problem.sign * o.0).collect();
    let best = outcomes
        .iter()
        .enumerate()
        .filter(|(_, o)| o.0.is_finite())
        .min_by(|a, b| a.1 .0.total_cmp(&b.1 .0).then(a.0.cmp(&b.0)))
        .map(|(i, _)| i)
        .ok_or(MeasureError::OptimizerFailure { restarts: opts.restarts })?;

    let ensemble = problem.ensemble(&outcomes[best].1, &outcomes[best].2)?;
    let value = ensemble.average(&partition, p)?;
    let mut sorted: Vec<f64> = outcomes.iter().map(|o| o.0).filter(|v| v.is_finite()).collect();
    sorted.sort_by(f64::total_cmp);
    let converged = sorted.len() >= 2 && (sorted[1] - sorted[0]).abs() < opts.agreement;

    Ok(RoofResult { value, ensemble, partition, converged, restarts_used: opts.restarts, restart_values })
}
