//! Multiqubit pure and mixed states: constructors, random generators and
//! reductions.

use rand::{Rng, SeedableRng};
use rand_distr::StandardNormal;
use rand_xoshiro::Xoshiro256PlusPlus;
use thiserror::Error;

use crate::linalg::{
    hermitian_eigensystem, partial_trace, split_parties, subsystem_offsets, ComplexMatrix, LinalgError, Spectrum, C64,
    EPS_HERM, EPS_PSD, EPS_TRACE,
};

/// Maximum number of qubits for generated pure states.
pub const MAX_PURE_QUBITS: usize = 10;
/// Maximum number of qubits of a mixed state handed to a convex-roof search.
pub const MAX_MIXED_QUBITS: usize = 4;

const NORM_TOL: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StateError {
    #[error("state is not normalized: squared norm {norm_sq:.12} (deficit {deficit:.3e})")]
    NotNormalized { norm_sq: f64, deficit: f64 },
    #[error("expected {expected} amplitudes for dims {dims:?}, got {got}")]
    LengthMismatch { dims: Vec<usize>, expected: usize, got: usize },
    #[error("{requested} qubits exceeds the limit of {limit}")]
    TooManyQubits { requested: usize, limit: usize },
    #[error("rank {rank} is outside 1..={dim}")]
    RankOutOfRange { rank: usize, dim: usize },
    #[error("invalid state parameters: {0}")]
    InvalidParams(String),
    #[error("not a density matrix: {0}")]
    NotDensity(String),
    #[error("invalid partition: {0}")]
    InvalidPartition(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

fn check_dims(dims: &[usize]) -> Result<usize, StateError> {
    if dims.is_empty() || dims.contains(&0) {
        return Err(StateError::InvalidParams(format!("invalid subsystem dimensions {dims:?}")));
    }
    dims.iter()
        .try_fold(1usize, |acc, &d| acc.checked_mul(d))
        .filter(|&n| n <= crate::linalg::MAX_DIM)
        .ok_or_else(|| StateError::InvalidParams(format!("dims {dims:?} exceed the maximum dimension")))
}

#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    dims: Vec<usize>,
    amplitudes: Vec<C64>,
}

impl PureState {
    pub fn new(dims: Vec<usize>, amplitudes: Vec<C64>) -> Result<Self, StateError> {
        let expected = check_dims(&dims)?;
        if amplitudes.len() != expected {
            return Err(StateError::LengthMismatch { dims, expected, got: amplitudes.len() });
        }
        if amplitudes.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(StateError::InvalidParams("non-finite amplitude".into()));
        }
        let norm_sq: f64 = amplitudes.iter().map(|z| z.norm_sqr()).sum();
        if (norm_sq - 1.0).abs() > NORM_TOL {
            return Err(StateError::NotNormalized { norm_sq, deficit: 1.0 - norm_sq });
        }
        Ok(Self { dims, amplitudes })
    }

    /// Normalizes `amplitudes` first. Fails only on a zero vector.
    pub fn normalized(dims: Vec<usize>, mut amplitudes: Vec<C64>) -> Result<Self, StateError> {
        let norm = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(StateError::NotNormalized { norm_sq: norm * norm, deficit: 1.0 - norm * norm });
        }
        amplitudes.iter_mut().for_each(|z| *z /= norm);
        Self::new(dims, amplitudes)
    }

    /// Computational basis product state `|bits⟩` on qubits.
    pub fn basis(bits: &[u8]) -> Self {
        let n = bits.len();
        let index = bits.iter().fold(0usize, |acc, &b| (acc << 1) | usize::from(b != 0));
        let mut amplitudes = vec![C64::new(0.0, 0.0); 1 << n];
        amplitudes[index] = C64::new(1.0, 0.0);
        Self { dims: vec![2; n], amplitudes }
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn n_parties(&self) -> usize {
        self.dims.len()
    }

    pub fn to_density(&self) -> DensityMatrix {
        DensityMatrix { dims: self.dims.clone(), matrix: ComplexMatrix::outer(&self.amplitudes) }
    }

    /// Reduced state on `keep`, computed as `M M†` with `M` the amplitude
    /// matrix reshaped over (kept, traced) indices.
    pub fn reduce(&self, keep: &[usize]) -> Result<DensityMatrix, StateError> {
        let (kept, traced) = split_parties(self.amplitudes.len(), &self.dims, keep)?;
        let keep_off = subsystem_offsets(&self.dims, &kept);
        let trace_off = subsystem_offsets(&self.dims, &traced);
        let dk = keep_off.len();
        let mut m = ComplexMatrix::zeros(dk, dk);
        for i in 0..dk {
            for j in i..dk {
                let z: C64 = trace_off
                    .iter()
                    .map(|&t| self.amplitudes[keep_off[i] + t] * self.amplitudes[keep_off[j] + t].conj())
                    .sum();
                m[(i, j)] = z;
                m[(j, i)] = z.conj();
            }
        }
        let dims = kept.iter().map(|&k| self.dims[k]).collect();
        Ok(DensityMatrix { dims, matrix: m })
    }

    /// Reorders the parties: party `order[i]` of `self` becomes party `i`.
    pub fn permute(&self, order: &[usize]) -> Result<Self, StateError> {
        check_permutation(order, self.dims.len())?;
        let new_dims: Vec<usize> = order.iter().map(|&o| self.dims[o]).collect();
        let src = subsystem_offsets(&self.dims, order);
        let amplitudes = src.iter().map(|&s| self.amplitudes[s]).collect();
        Ok(Self { dims: new_dims, amplitudes })
    }
}

fn check_permutation(order: &[usize], n: usize) -> Result<(), StateError> {
    let mut seen = vec![false; n];
    if order.len() != n || order.iter().any(|&o| o >= n || std::mem::replace(&mut seen[o], true)) {
        return Err(StateError::InvalidParams(format!("{order:?} is not a permutation of 0..{n}")));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    dims: Vec<usize>,
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    /// Validates Hermiticity, positivity and unit trace.
    pub fn new(dims: Vec<usize>, matrix: ComplexMatrix) -> Result<Self, StateError> {
        let n = check_dims(&dims)?;
        if matrix.rows() != n || matrix.cols() != n {
            return Err(StateError::NotDensity(format!(
                "matrix is {}x{} but dims {dims:?} require {n}x{n}",
                matrix.rows(),
                matrix.cols()
            )));
        }
        let deviation = matrix.hermitian_deviation();
        if deviation > EPS_HERM {
            return Err(StateError::NotDensity(format!("not Hermitian (deviation {deviation:.3e})")));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > EPS_TRACE || tr.im.abs() > EPS_TRACE {
            return Err(StateError::NotDensity(format!("trace is {:.12}{:+.3e}i", tr.re, tr.im)));
        }
        let (spec, _) = hermitian_eigensystem(&matrix)?;
        if spec.min() < -EPS_PSD {
            return Err(StateError::NotDensity(format!("negative eigenvalue {:.3e}", spec.min())));
        }
        Ok(Self { dims, matrix })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn n_parties(&self) -> usize {
        self.dims.len()
    }

    pub fn reduce(&self, keep: &[usize]) -> Result<DensityMatrix, StateError> {
        let (kept, _) = split_parties(self.dim(), &self.dims, keep)?;
        let matrix = partial_trace(&self.matrix, &self.dims, &kept)?;
        let dims = kept.iter().map(|&k| self.dims[k]).collect();
        Ok(DensityMatrix { dims, matrix })
    }

    pub fn spectrum(&self) -> Result<Spectrum, StateError> {
        let (spec, _) = hermitian_eigensystem(&self.matrix)?;
        Ok(Spectrum::density(spec.values().to_vec())?)
    }

    pub fn purity(&self) -> f64 {
        // tr ρ² = Σ |ρ_ij|² for Hermitian ρ
        self.matrix.data().iter().map(|z| z.norm_sqr()).sum()
    }

    /// Reorders the parties: party `order[i]` of `self` becomes party `i`.
    pub fn permute(&self, order: &[usize]) -> Result<Self, StateError> {
        check_permutation(order, self.dims.len())?;
        let dims: Vec<usize> = order.iter().map(|&o| self.dims[o]).collect();
        let src = subsystem_offsets(&self.dims, order);
        let matrix = ComplexMatrix::from_fn(src.len(), src.len(), |r, c| self.matrix[(src[r], src[c])]);
        Ok(Self { dims, matrix })
    }
}

/// Either kind of state, as ingested from files or produced by generators.
#[derive(Debug, Clone, PartialEq)]
pub enum QuantumState {
    Pure(PureState),
    Mixed(DensityMatrix),
}

impl QuantumState {
    pub fn dims(&self) -> &[usize] {
        match self {
            QuantumState::Pure(p) => p.dims(),
            QuantumState::Mixed(m) => m.dims(),
        }
    }

    pub fn n_parties(&self) -> usize {
        self.dims().len()
    }

    pub fn reduce(&self, keep: &[usize]) -> Result<DensityMatrix, StateError> {
        match self {
            QuantumState::Pure(p) => p.reduce(keep),
            QuantumState::Mixed(m) => m.reduce(keep),
        }
    }
}

/// Amplitudes of the five-term canonical three-qubit form
/// `λ₀|000⟩ + λ₁e^{iφ}|100⟩ + λ₂|101⟩ + λ₃|110⟩ + λ₄|111⟩`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchmidtParams {
    pub lambdas: [f64; 5],
    pub phi: f64,
}

impl SchmidtParams {
    /// The state used by both worked examples: λ₀=√3/3, λ₂=√2/2, λ₃=√6/6.
    pub fn worked_example() -> Self {
        Self { lambdas: [3f64.sqrt() / 3.0, 0.0, 2f64.sqrt() / 2.0, 6f64.sqrt() / 6.0, 0.0], phi: 0.0 }
    }
}

pub fn build_generalized_schmidt(p: &SchmidtParams) -> Result<PureState, StateError> {
    if p.lambdas.iter().any(|&l| !(l >= 0.0) || !l.is_finite()) || !p.phi.is_finite() {
        return Err(StateError::InvalidParams(format!("lambdas must be finite and nonnegative: {:?}", p.lambdas)));
    }
    let norm_sq: f64 = p.lambdas.iter().map(|l| l * l).sum();
    if (norm_sq - 1.0).abs() > 1e-12 {
        return Err(StateError::NotNormalized { norm_sq, deficit: 1.0 - norm_sq });
    }
    let [l0, l1, l2, l3, l4] = p.lambdas;
    let mut amps = vec![C64::new(0.0, 0.0); 8];
    amps[0b000] = C64::new(l0, 0.0);
    amps[0b100] = C64::from_polar(l1, p.phi);
    amps[0b101] = C64::new(l2, 0.0);
    amps[0b110] = C64::new(l3, 0.0);
    amps[0b111] = C64::new(l4, 0.0);
    PureState::new(vec![2; 3], amps)
}

pub(crate) fn rng_from_seed(seed: u64) -> Xoshiro256PlusPlus {
    Xoshiro256PlusPlus::seed_from_u64(seed)
}

pub(crate) fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im)
}

/// Uniformly (Haar) distributed pure state on `n_qubits` qubits.
pub fn haar_random_pure(n_qubits: usize, seed: u64) -> Result<PureState, StateError> {
    haar_random_pure_with(n_qubits, &mut rng_from_seed(seed))
}

pub fn haar_random_pure_with<R: Rng + ?Sized>(n_qubits: usize, rng: &mut R) -> Result<PureState, StateError> {
    if n_qubits == 0 || n_qubits > MAX_PURE_QUBITS {
        return Err(StateError::TooManyQubits { requested: n_qubits, limit: MAX_PURE_QUBITS });
    }
    let amps = (0..1usize << n_qubits).map(|_| complex_gaussian(rng)).collect();
    PureState::normalized(vec![2; n_qubits], amps)
}

/// Random density matrix `G G† / tr(G G†)` with `G` a `dim × rank` complex
/// Gaussian matrix. Power-of-two dimensions are split into qubits.
pub fn ginibre_mixed(dim: usize, rank: usize, seed: u64) -> Result<DensityMatrix, StateError> {
    ginibre_mixed_with(dim, rank, &mut rng_from_seed(seed))
}

pub fn ginibre_mixed_with<R: Rng + ?Sized>(dim: usize, rank: usize, rng: &mut R) -> Result<DensityMatrix, StateError> {
    if dim == 0 || dim > crate::linalg::MAX_DIM {
        return Err(StateError::InvalidParams(format!("dimension {dim} out of range")));
    }
    if rank == 0 || rank > dim {
        return Err(StateError::RankOutOfRange { rank, dim });
    }
    let g = ComplexMatrix::from_fn(dim, rank, |_, _| complex_gaussian(rng));
    let gg = g.matmul(&g.adjoint())?;
    let tr = gg.trace().re;
    let rho = gg.scale(C64::new(1.0 / tr, 0.0));
    let dims = if dim.is_power_of_two() && dim > 1 { vec![2; dim.trailing_zeros() as usize] } else { vec![dim] };
    // hermitize exactly; the product is Hermitian only up to rounding
    let rho = ComplexMatrix::from_fn(dim, dim, |r, c| (rho[(r, c)] + rho[(c, r)].conj()) * 0.5);
    DensityMatrix::new(dims, rho)
}

/// Haar-random unitary by Gram–Schmidt on a complex Ginibre matrix.
pub fn haar_random_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMatrix {
    let mut cols: Vec<Vec<C64>> = (0..n).map(|_| (0..n).map(|_| complex_gaussian(rng)).collect()).collect();
    for k in 0..n {
        for j in 0..k {
            let (done, rest) = cols.split_at_mut(k);
            let proj: C64 = done[j].iter().zip(&rest[0]).map(|(a, b)| a.conj() * b).sum();
            for (x, q) in rest[0].iter_mut().zip(&done[j]) {
                *x -= proj * q;
            }
        }
        let norm = cols[k].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        cols[k].iter_mut().for_each(|z| *z /= norm);
    }
    ComplexMatrix::from_fn(n, n, |r, c| cols[c][r])
}

/// Party A against an ordered list of parties B₀…B_{N−1}.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct PartitionSpec {
    pub focus: usize,
    pub others: Vec<usize>,
}

impl PartitionSpec {
    pub fn new(focus: usize, others: Vec<usize>) -> Self {
        Self { focus, others }
    }

    /// Party 0 against all remaining parties in index order.
    pub fn first_vs_rest(n_parties: usize) -> Self {
        Self { focus: 0, others: (1..n_parties).collect() }
    }

    pub fn n_others(&self) -> usize {
        self.others.len()
    }

    pub fn validate(&self, n_parties: usize) -> Result<(), StateError> {
        if self.others.is_empty() {
            return Err(StateError::InvalidPartition("no parties on the B side".into()));
        }
        let mut seen = vec![false; n_parties];
        for &i in std::iter::once(&self.focus).chain(&self.others) {
            if i >= n_parties {
                return Err(StateError::InvalidPartition(format!("party {i} out of range for {n_parties} parties")));
            }
            if std::mem::replace(&mut seen[i], true) {
                return Err(StateError::InvalidPartition(format!("party {i} listed twice")));
            }
        }
        Ok(())
    }

    /// All parties involved, focus first.
    pub fn parties(&self) -> Vec<usize> {
        std::iter::once(self.focus).chain(self.others.iter().copied()).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn amp(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn schmidt_single_term() {
        let psi = build_generalized_schmidt(&SchmidtParams { lambdas: [1.0, 0.0, 0.0, 0.0, 0.0], phi: 0.3 }).unwrap();
        assert_eq!(psi, PureState::basis(&[0, 0, 0]));
    }

    #[test]
    fn schmidt_ghz_like() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let psi = build_generalized_schmidt(&SchmidtParams { lambdas: [h, 0.0, 0.0, 0.0, h], phi: 0.0 }).unwrap();
        let a = psi.amplitudes();
        assert_eq!(a[0], amp(h));
        assert_eq!(a[7], amp(h));
        assert!(a[1..7].iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn schmidt_phase_and_normalization() {
        let psi = build_generalized_schmidt(&SchmidtParams { lambdas: [0.6, 0.8, 0.0, 0.0, 0.0], phi: 1.0 }).unwrap();
        assert!((psi.amplitudes()[4] - C64::from_polar(0.8, 1.0)).norm() < 1e-15);
        let err = build_generalized_schmidt(&SchmidtParams { lambdas: [0.6, 0.6, 0.0, 0.0, 0.0], phi: 0.0 });
        assert!(matches!(err, Err(StateError::NotNormalized { .. })));
        let err = build_generalized_schmidt(&SchmidtParams { lambdas: [-1.0, 0.0, 0.0, 0.0, 0.0], phi: 0.0 });
        assert!(matches!(err, Err(StateError::InvalidParams(_))));
    }

    #[test]
    fn worked_example_reductions() {
        let psi = build_generalized_schmidt(&SchmidtParams::worked_example()).unwrap();
        let ra = psi.reduce(&[0]).unwrap();
        assert!((ra.purity() - 5.0 / 9.0).abs() < 1e-14);
        let spec = ra.spectrum().unwrap();
        assert!((spec.values()[0] - 2.0 / 3.0).abs() < 1e-14);
        assert!((spec.values()[1] - 1.0 / 3.0).abs() < 1e-14);

        // ρ_AB is supported on span{|00⟩, |10⟩, |11⟩}
        let rab = psi.reduce(&[0, 1]).unwrap();
        let m = rab.matrix();
        for k in 0..4 {
            assert_eq!(m[(1, k)].norm(), 0.0);
            assert_eq!(m[(k, 1)].norm(), 0.0);
        }
        let rank = rab.spectrum().unwrap().values().iter().filter(|&&v| v > 1e-12).count();
        assert_eq!(rank, 2);
    }

    #[test]
    fn pure_reduce_matches_partial_trace() {
        let psi = haar_random_pure(4, 9).unwrap();
        let rho = psi.to_density();
        for keep in [vec![0], vec![1, 3], vec![0, 2, 3]] {
            let a = psi.reduce(&keep).unwrap();
            let b = rho.reduce(&keep).unwrap();
            assert!(a.matrix().max_abs_diff(b.matrix()) < 1e-15);
            assert_eq!(a.dims(), b.dims());
        }
    }

    #[test]
    fn bell_reduces_to_maximally_mixed() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let bell = PureState::new(vec![2, 2], vec![amp(h), amp(0.0), amp(0.0), amp(h)]).unwrap();
        let r = bell.reduce(&[1]).unwrap();
        assert!(r.matrix().max_abs_diff(&ComplexMatrix::from_diag(&[0.5, 0.5])) < 1e-15);
    }

    #[test]
    fn product_reduce_is_exact() {
        let a = ginibre_mixed(2, 2, 3).unwrap();
        let b = ginibre_mixed(2, 2, 4).unwrap();
        let ab = crate::linalg::tensor_product(a.matrix(), b.matrix()).unwrap();
        let ab = DensityMatrix::new(vec![2, 2], ab).unwrap();
        assert!(ab.reduce(&[0]).unwrap().matrix().max_abs_diff(a.matrix()) < 1e-15);
    }

    #[test]
    fn reduce_commutes_with_relabeling() {
        let rho = ginibre_mixed(8, 3, 21).unwrap();
        let order = [2, 0, 1];
        let permuted = rho.permute(&order).unwrap();
        // party 0 of `permuted` is party 2 of `rho`, party 1 is party 0
        let a = rho.reduce(&[0, 2]).unwrap().permute(&[1, 0]).unwrap();
        let b = permuted.reduce(&[0, 1]).unwrap();
        assert!(a.matrix().max_abs_diff(b.matrix()) < 1e-12);

        let psi = haar_random_pure(3, 5).unwrap();
        let a = psi.reduce(&[1, 2]).unwrap();
        let b = psi.permute(&[1, 2, 0]).unwrap().reduce(&[0, 1]).unwrap();
        assert!(a.matrix().max_abs_diff(b.matrix()) < 1e-12);
    }

    #[test]
    fn haar_is_normalized_and_deterministic() {
        for n in 1..=MAX_PURE_QUBITS {
            let a = haar_random_pure(n, 77).unwrap();
            let norm: f64 = a.amplitudes().iter().map(|z| z.norm_sqr()).sum();
            assert!((norm - 1.0).abs() < 1e-12);
        }
        assert_eq!(haar_random_pure(3, 5).unwrap(), haar_random_pure(3, 5).unwrap());
        assert_ne!(haar_random_pure(3, 5).unwrap(), haar_random_pure(3, 6).unwrap());
        assert!(matches!(haar_random_pure(11, 0), Err(StateError::TooManyQubits { .. })));
    }

    #[test]
    fn haar_two_qubit_mean_purity() {
        // independent oracle: for |ψ⟩ = a|00⟩+b|01⟩+c|10⟩+d|11⟩,
        // tr ρ_A² = 1 − 2|ad − bc|²; the Haar average is (2+2)/(2·2+1)
        let n = 10_000;
        let mut total = 0.0;
        for seed in 0..n {
            let psi = haar_random_pure(2, seed).unwrap();
            let z = psi.amplitudes();
            let purity = 1.0 - 2.0 * (z[0] * z[3] - z[1] * z[2]).norm_sqr();
            let via_reduce = psi.reduce(&[0]).unwrap().purity();
            assert!((purity - via_reduce).abs() < 1e-12);
            total += purity;
        }
        let mean = total / n as f64;
        assert!((mean - 0.8).abs() < 0.01, "mean purity {mean}");
    }

    #[test]
    fn ginibre_properties() {
        let rho = ginibre_mixed(4, 1, 8).unwrap();
        assert!((rho.purity() - 1.0).abs() < 1e-10);
        assert_eq!(rho.dims(), &[2, 2]);
        for rank in 1..=4 {
            let rho = ginibre_mixed(4, rank, 100 + rank as u64).unwrap();
            let nz = rho.spectrum().unwrap().values().iter().filter(|&&v| v > 1e-12).count();
            assert!(nz <= rank);
        }
        assert!(matches!(ginibre_mixed(4, 5, 0), Err(StateError::RankOutOfRange { .. })));
        assert!(matches!(ginibre_mixed(4, 0, 0), Err(StateError::RankOutOfRange { .. })));
        assert_eq!(ginibre_mixed(3, 2, 1).unwrap().dims(), &[3]);
        assert_eq!(ginibre_mixed(4, 2, 1).unwrap(), ginibre_mixed(4, 2, 1).unwrap());
    }

    #[test]
    fn ginibre_full_rank_is_positive_definite() {
        let positive = (0..1000u64).filter(|&s| ginibre_mixed(4, 4, s).unwrap().spectrum().unwrap().min() > 0.0).count();
        assert!(positive >= 999, "{positive}");
    }

    #[test]
    fn haar_unitary_is_unitary() {
        let mut rng = rng_from_seed(3);
        let u = haar_random_unitary(6, &mut rng);
        let g = u.adjoint().matmul(&u).unwrap();
        assert!(g.max_abs_diff(&ComplexMatrix::identity(6)) < 1e-13);
    }

    #[test]
    fn density_validation() {
        assert!(DensityMatrix::new(vec![2], ComplexMatrix::from_diag(&[0.7, 0.4])).is_err());
        assert!(DensityMatrix::new(vec![2], ComplexMatrix::from_diag(&[1.2, -0.2])).is_err());
        assert!(DensityMatrix::new(vec![2, 2], ComplexMatrix::from_diag(&[0.5, 0.5])).is_err());
        let mut m = ComplexMatrix::from_diag(&[0.5, 0.5]);
        m[(0, 1)] = C64::new(0.1, 0.0);
        assert!(DensityMatrix::new(vec![2], m).is_err());
    }

    #[test]
    fn pure_state_validation() {
        let err = PureState::new(vec![2], vec![amp(0.5), amp(0.5)]).unwrap_err();
        assert!(matches!(err, StateError::NotNormalized { deficit, .. } if (deficit - 0.5).abs() < 1e-15));
        assert!(matches!(PureState::new(vec![2, 2], vec![amp(1.0)]), Err(StateError::LengthMismatch { .. })));
    }

    #[test]
    fn partition_validation() {
        assert!(PartitionSpec::new(0, vec![1, 2]).validate(3).is_ok());
        assert!(PartitionSpec::new(0, vec![]).validate(3).is_err());
        assert!(PartitionSpec::new(0, vec![0, 1]).validate(3).is_err());
        assert!(PartitionSpec::new(0, vec![3]).validate(3).is_err());
        assert_eq!(PartitionSpec::first_vs_rest(4).parties(), vec![0, 1, 2, 3]);
    }
}
