//! Dense complex linear algebra for small Hilbert spaces.
//!
//! Everything here works on row-major [`ComplexMatrix`] values of dimension at
//! most [`MAX_DIM`]. The eigensolver is a cyclic complex Jacobi method, which is
//! slow for large matrices but accurate to a few ulps at the sizes used by the
//! entanglement measures (2 to 64).

use std::fmt;
use std::ops::{Index, IndexMut};

use num_complex::Complex64;
use thiserror::Error;

pub type C64 = Complex64;

/// Largest row or column count accepted by any constructor or product.
pub const MAX_DIM: usize = 1024;

/// Input Hermiticity tolerance (max-norm of `h - h†`).
pub const EPS_HERM: f64 = 1e-9;
/// Input positivity tolerance for eigenvalues.
pub const EPS_PSD: f64 = 1e-9;
/// Trace tolerance for density operators.
pub const EPS_TRACE: f64 = 1e-9;
/// Output accuracy target for eigen reconstructions.
pub const EPS_EIG: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("data length {len} does not match shape {rows}x{cols}")]
    ShapeMismatch { rows: usize, cols: usize, len: usize },
    #[error("matrix contains a non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
    #[error("dimension {dim} exceeds the maximum of {MAX_DIM}")]
    TooLarge { dim: usize },
    #[error("incompatible dimensions: {0}")]
    DimensionMismatch(String),
    #[error("subsystem selection is invalid: {0}")]
    InvalidSelection(String),
    #[error("matrix is not Hermitian (max deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },
    #[error("matrix is not positive semidefinite (eigenvalue {eigenvalue:.3e})")]
    NotPositive { eigenvalue: f64 },
    #[error("spectrum is not a density spectrum: {0}")]
    InvalidSpectrum(String),
}

#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            write!(f, "  ")?;
            for c in 0..self.cols {
                let z = self[(r, c)];
                write!(f, "{:+.6}{:+.6}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;

    #[inline]
    fn index(&self, (r, c): (usize, usize)) -> &C64 {
        &self.data[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    #[inline]
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut C64 {
        &mut self.data[r * self.cols + c]
    }
}

impl ComplexMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self, LinalgError> {
        if rows == 0 || cols == 0 || data.len() != rows * cols {
            return Err(LinalgError::ShapeMismatch { rows, cols, len: data.len() });
        }
        if rows > MAX_DIM || cols > MAX_DIM {
            return Err(LinalgError::TooLarge { dim: rows.max(cols) });
        }
        if let Some(pos) = data.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(LinalgError::NonFinite { row: pos / cols, col: pos % cols });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![C64::new(0.0, 0.0); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_diag(values: &[f64]) -> Self {
        let mut m = Self::zeros(values.len(), values.len());
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = C64::new(v, 0.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }

    /// `|v⟩⟨v|` for a column vector `v`.
    pub fn outer(v: &[C64]) -> Self {
        Self::from_fn(v.len(), v.len(), |r, c| v[r] * v[c].conj())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<C64> {
        self.data
    }

    pub fn column(&self, c: usize) -> Vec<C64> {
        (0..self.rows).map(|r| self[(r, c)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)].conj())
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn scale(&self, factor: C64) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|z| z * factor).collect() }
    }

    pub fn add(&self, other: &Self) -> Result<Self, LinalgError> {
        self.same_shape(other)?;
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect();
        Ok(Self { rows: self.rows, cols: self.cols, data })
    }

    pub fn sub(&self, other: &Self) -> Result<Self, LinalgError> {
        self.same_shape(other)?;
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect();
        Ok(Self { rows: self.rows, cols: self.cols, data })
    }

    pub fn matmul(&self, other: &Self) -> Result<Self, LinalgError> {
        if self.cols != other.rows {
            return Err(LinalgError::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(r, k)];
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                let row = &other.data[k * other.cols..(k + 1) * other.cols];
                let dst = &mut out.data[r * other.cols..(r + 1) * other.cols];
                for (d, b) in dst.iter_mut().zip(row) {
                    *d += a * b;
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[C64]) -> Result<Vec<C64>, LinalgError> {
        if v.len() != self.cols {
            return Err(LinalgError::DimensionMismatch(format!(
                "{}x{} times vector of length {}",
                self.rows,
                self.cols,
                v.len()
            )));
        }
        Ok((0..self.rows)
            .map(|r| self.data[r * self.cols..(r + 1) * self.cols].iter().zip(v).map(|(a, b)| a * b).sum())
            .collect())
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        if self.rows != other.rows || self.cols != other.cols {
            return f64::INFINITY;
        }
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    pub fn hermitian_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut dev: f64 = 0.0;
        for r in 0..self.rows {
            for c in r..self.cols {
                dev = dev.max((self[(r, c)] - self[(c, r)].conj()).norm());
            }
        }
        dev
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermitian_deviation() <= tol
    }

    fn same_shape(&self, other: &Self) -> Result<(), LinalgError> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(LinalgError::DimensionMismatch(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(())
    }
}

/// Real eigenvalues sorted in descending order.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    values: Vec<f64>,
}

impl Spectrum {
    /// Sorts `values` descending. No positivity or normalization is implied.
    pub fn new(mut values: Vec<f64>) -> Self {
        values.sort_by(|a, b| b.total_cmp(a));
        Self { values }
    }

    /// Validates `values` as the spectrum of a density operator, then clips each
    /// eigenvalue into `[0, 1]` and renormalizes to unit sum.
    pub fn density(values: Vec<f64>) -> Result<Self, LinalgError> {
        if values.is_empty() {
            return Err(LinalgError::InvalidSpectrum("empty".into()));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(LinalgError::InvalidSpectrum(format!("non-finite eigenvalue {v}")));
        }
        if let Some(&v) = values.iter().find(|&&v| v < -EPS_PSD) {
            return Err(LinalgError::NotPositive { eigenvalue: v });
        }
        let sum: f64 = values.iter().sum();
        if (sum - 1.0).abs() > EPS_TRACE {
            return Err(LinalgError::InvalidSpectrum(format!("eigenvalues sum to {sum}")));
        }
        let clipped: Vec<f64> = values.iter().map(|v| v.clamp(0.0, 1.0)).collect();
        let total: f64 = clipped.iter().sum();
        Ok(Self::new(clipped.into_iter().map(|v| v / total).collect()))
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }

    pub fn min(&self) -> f64 {
        self.values.last().copied().unwrap_or(f64::NAN)
    }
}

/// Kronecker product `a ⊗ b`.
pub fn tensor_product(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix, LinalgError> {
    let rows = a.rows.checked_mul(b.rows).filter(|&d| d <= MAX_DIM);
    let cols = a.cols.checked_mul(b.cols).filter(|&d| d <= MAX_DIM);
    let (Some(rows), Some(cols)) = (rows, cols) else {
        return Err(LinalgError::TooLarge { dim: a.rows.saturating_mul(b.rows).max(a.cols.saturating_mul(b.cols)) });
    };
    let mut out = ComplexMatrix::zeros(rows, cols);
    for ar in 0..a.rows {
        for ac in 0..a.cols {
            let x = a[(ar, ac)];
            for br in 0..b.rows {
                for bc in 0..b.cols {
                    out[(ar * b.rows + br, ac * b.cols + bc)] = x * b[(br, bc)];
                }
            }
        }
    }
    Ok(out)
}

/// Offsets into the full row-major index space for every multi-index over
/// the subsystems in `parties` (in the given order).
pub(crate) fn subsystem_offsets(dims: &[usize], parties: &[usize]) -> Vec<usize> {
    let mut strides = vec![1usize; dims.len()];
    for i in (0..dims.len().saturating_sub(1)).rev() {
        strides[i] = strides[i + 1] * dims[i + 1];
    }
    let mut offsets = vec![0usize];
    for &p in parties {
        let mut next = Vec::with_capacity(offsets.len() * dims[p]);
        for &o in &offsets {
            for x in 0..dims[p] {
                next.push(o + x * strides[p]);
            }
        }
        offsets = next;
    }
    offsets
}

/// Checks `dims` against a square matrix of side `n` and returns the sorted
/// kept parties together with their complement.
pub(crate) fn split_parties(
    n: usize,
    dims: &[usize],
    keep: &[usize],
) -> Result<(Vec<usize>, Vec<usize>), LinalgError> {
    if dims.is_empty() || dims.contains(&0) {
        return Err(LinalgError::InvalidSelection(format!("invalid subsystem dimensions {dims:?}")));
    }
    let total = dims.iter().try_fold(1usize, |acc, &d| acc.checked_mul(d));
    if total != Some(n) {
        return Err(LinalgError::DimensionMismatch(format!("dims {dims:?} do not multiply to {n}")));
    }
    if keep.is_empty() {
        return Err(LinalgError::InvalidSelection("keep set is empty".into()));
    }
    let mut kept: Vec<usize> = keep.to_vec();
    kept.sort_unstable();
    kept.dedup();
    if kept.len() != keep.len() {
        return Err(LinalgError::InvalidSelection(format!("duplicate indices in {keep:?}")));
    }
    if let Some(&bad) = kept.iter().find(|&&k| k >= dims.len()) {
        return Err(LinalgError::InvalidSelection(format!("index {bad} out of range for {} subsystems", dims.len())));
    }
    let traced = (0..dims.len()).filter(|i| !kept.contains(i)).collect();
    Ok((kept, traced))
}

/// Traces out every subsystem not listed in `keep`. Kept subsystems stay in
/// their original relative order.
pub fn partial_trace(rho: &ComplexMatrix, dims: &[usize], keep: &[usize]) -> Result<ComplexMatrix, LinalgError> {
    if !rho.is_square() {
        return Err(LinalgError::DimensionMismatch(format!("{}x{} is not square", rho.rows, rho.cols)));
    }
    let (kept, traced) = split_parties(rho.rows, dims, keep)?;
    let keep_off = subsystem_offsets(dims, &kept);
    let trace_off = subsystem_offsets(dims, &traced);
    let dk = keep_off.len();
    let mut out = ComplexMatrix::zeros(dk, dk);
    for (i, &oi) in keep_off.iter().enumerate() {
        for (j, &oj) in keep_off.iter().enumerate() {
            out[(i, j)] = trace_off.iter().map(|&t| rho[(oi + t, oj + t)]).sum();
        }
    }
    Ok(out)
}

/// Eigen-decomposition of a Hermitian matrix. Eigenvalues are sorted
/// descending; column `k` of the returned matrix is the eigenvector for
/// eigenvalue `k`.
pub fn hermitian_eigensystem(h: &ComplexMatrix) -> Result<(Spectrum, ComplexMatrix), LinalgError> {
    if !h.is_square() {
        return Err(LinalgError::DimensionMismatch(format!("{}x{} is not square", h.rows, h.cols)));
    }
    let deviation = h.hermitian_deviation();
    if deviation > EPS_HERM {
        return Err(LinalgError::NotHermitian { deviation });
    }
    let n = h.rows;
    let mut a: Vec<C64> = ComplexMatrix::from_fn(n, n, |r, c| (h[(r, c)] + h[(c, r)].conj()) * 0.5).into_data();
    let mut v = ComplexMatrix::identity(n).into_data();
    jacobi_in_place(n, &mut a, &mut v);

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[j * n + j].re.total_cmp(&a[i * n + i].re));
    let values = order.iter().map(|&i| a[i * n + i].re).collect();
    let vecs = ComplexMatrix::from_fn(n, n, |r, c| v[r * n + order[c]]);
    Ok((Spectrum { values }, vecs))
}

/// Cyclic complex Jacobi sweeps. `a` is overwritten by a diagonal matrix,
/// `v` is right-multiplied by the accumulated rotations.
pub(crate) fn jacobi_in_place(n: usize, a: &mut [C64], v: &mut [C64]) {
    let frob: f64 = a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if frob == 0.0 {
        return;
    }
    for _sweep in 0..64 {
        let mut off = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off += a[p * n + q].norm_sqr();
            }
        }
        if off.sqrt() <= 1e-17 * frob {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                let mag = apq.norm();
                if mag <= 1e-300 {
                    continue;
                }
                let app = a[p * n + p].re;
                let aqq = a[q * n + q].re;
                let theta = (aqq - app) / (2.0 * mag);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                let e = apq / mag;
                let ec = e.conj();
                // columns: A <- A G with G = [[c, s], [-s e*, c e*]]
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = akp * c - akq * ec * s;
                    a[k * n + q] = akp * s + akq * ec * c;
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = vkp * c - vkq * ec * s;
                    v[k * n + q] = vkp * s + vkq * ec * c;
                }
                // rows: A <- G† A
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = apk * c - aqk * e * s;
                    a[q * n + k] = apk * s + aqk * e * c;
                }
                a[p * n + q] = C64::new(0.0, 0.0);
                a[q * n + p] = C64::new(0.0, 0.0);
                a[p * n + p].im = 0.0;
                a[q * n + q].im = 0.0;
            }
        }
    }
}

/// Principal square root of a positive semidefinite matrix.
pub fn hermitian_sqrt(h: &ComplexMatrix) -> Result<ComplexMatrix, LinalgError> {
    let (spec, vecs) = hermitian_eigensystem(h)?;
    let min = spec.min();
    if min < -EPS_PSD {
        return Err(LinalgError::NotPositive { eigenvalue: min });
    }
    let roots: Vec<f64> = spec.values().iter().map(|&l| l.max(0.0).sqrt()).collect();
    Ok(spectral_compose(&vecs, &roots))
}

/// `V diag(values) V†`.
pub fn spectral_compose(vecs: &ComplexMatrix, values: &[f64]) -> ComplexMatrix {
    let n = vecs.rows;
    let mut out = ComplexMatrix::zeros(n, n);
    for (k, &lam) in values.iter().enumerate() {
        if lam == 0.0 {
            continue;
        }
        for r in 0..n {
            let vr = vecs[(r, k)] * lam;
            for c in 0..n {
                out[(r, c)] += vr * vecs[(c, k)].conj();
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_xoshiro::Xoshiro256PlusPlus;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn random_hermitian(n: usize, seed: u64) -> ComplexMatrix {
        let mut rng = Xoshiro256PlusPlus::seed_from_u64(seed);
        let g = ComplexMatrix::from_fn(n, n, |_, _| c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5));
        g.add(&g.adjoint()).unwrap()
    }

    fn random_density(n: usize, seed: u64) -> ComplexMatrix {
        let mut rng = Xoshiro256PlusPlus::seed_from_u64(seed);
        let g = ComplexMatrix::from_fn(n, n, |_, _| c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5));
        let p = g.matmul(&g.adjoint()).unwrap();
        let tr = p.trace().re;
        p.scale(c(1.0 / tr, 0.0))
    }

    #[test]
    fn constructor_rejects_bad_input() {
        assert!(matches!(ComplexMatrix::new(2, 2, vec![c(0.0, 0.0); 3]), Err(LinalgError::ShapeMismatch { .. })));
        let mut data = vec![c(0.0, 0.0); 4];
        data[3] = c(f64::NAN, 0.0);
        assert_eq!(ComplexMatrix::new(2, 2, data), Err(LinalgError::NonFinite { row: 1, col: 1 }));
    }

    #[test]
    fn identity_tensor_identity() {
        let i4 = tensor_product(&ComplexMatrix::identity(2), &ComplexMatrix::identity(2)).unwrap();
        assert_eq!(i4, ComplexMatrix::identity(4));
    }

    #[test]
    fn projector_tensor_projector() {
        let p = ComplexMatrix::from_diag(&[1.0, 0.0]);
        assert_eq!(tensor_product(&p, &p).unwrap(), ComplexMatrix::from_diag(&[1.0, 0.0, 0.0, 0.0]));
    }

    #[test]
    fn zero_plus_product_is_rank_one() {
        let zero = ComplexMatrix::from_diag(&[1.0, 0.0]);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let plus = ComplexMatrix::outer(&[c(h, 0.0), c(h, 0.0)]);
        let prod = tensor_product(&zero, &plus).unwrap();
        assert!((prod.trace().re - 1.0).abs() < 1e-15);
        let (spec, _) = hermitian_eigensystem(&prod).unwrap();
        let rank = spec.values().iter().filter(|&&v| v > 1e-12).count();
        assert_eq!(rank, 1);
    }

    #[test]
    fn tensor_product_size_limit() {
        let big = ComplexMatrix::identity(64);
        assert!(matches!(tensor_product(&big, &ComplexMatrix::identity(32)), Err(LinalgError::TooLarge { dim: 2048 })));
    }

    #[test]
    fn tensor_product_is_associative() {
        // dyadic entries keep every product exact, so equality is bitwise
        let mut rng = Xoshiro256PlusPlus::seed_from_u64(1);
        let mut dyadic = |n: usize| {
            ComplexMatrix::from_fn(n, n, |_, _| {
                c(rng.random_range(-8..8) as f64 / 8.0, rng.random_range(-8..8) as f64 / 8.0)
            })
        };
        let a = dyadic(2);
        let b = dyadic(3);
        let d = dyadic(2);
        let left = tensor_product(&tensor_product(&a, &b).unwrap(), &d).unwrap();
        let right = tensor_product(&a, &tensor_product(&b, &d).unwrap()).unwrap();
        assert_eq!(left.max_abs_diff(&right), 0.0);
    }

    #[test]
    fn partial_trace_of_product() {
        let a = random_density(2, 10);
        let b = random_density(4, 11);
        let ab = tensor_product(&a, &b).unwrap();
        let ra = partial_trace(&ab, &[2, 2, 2], &[0]).unwrap();
        assert!(ra.max_abs_diff(&a) < 1e-15);
        let rb = partial_trace(&ab, &[2, 4], &[1]).unwrap();
        assert!(rb.max_abs_diff(&b) < 1e-15);
    }

    #[test]
    fn partial_trace_of_bell_state() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let bell = ComplexMatrix::outer(&[c(h, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(h, 0.0)]);
        let half = ComplexMatrix::from_diag(&[0.5, 0.5]);
        for keep in [0, 1] {
            let r = partial_trace(&bell, &[2, 2], &[keep]).unwrap();
            assert!(r.max_abs_diff(&half) < 1e-15);
        }
    }

    #[test]
    fn partial_trace_errors() {
        let rho = ComplexMatrix::identity(4);
        assert!(matches!(partial_trace(&rho, &[2, 3], &[0]), Err(LinalgError::DimensionMismatch(_))));
        assert!(matches!(partial_trace(&rho, &[2, 2], &[]), Err(LinalgError::InvalidSelection(_))));
        assert!(matches!(partial_trace(&rho, &[2, 2], &[2]), Err(LinalgError::InvalidSelection(_))));
        assert!(matches!(partial_trace(&rho, &[2, 2], &[1, 1]), Err(LinalgError::InvalidSelection(_))));
    }

    #[test]
    fn complementary_traces_agree() {
        let rho = random_density(8, 5);
        let dims = [2, 2, 2];
        for keep in [vec![0], vec![1], vec![2], vec![0, 2], vec![1, 2]] {
            let rest: Vec<usize> = (0..3).filter(|i| !keep.contains(i)).collect();
            let a = partial_trace(&rho, &dims, &keep).unwrap();
            let b = partial_trace(&rho, &dims, &rest).unwrap();
            assert!((a.trace() - rho.trace()).norm() < 1e-12);
            assert!((b.trace() - rho.trace()).norm() < 1e-12);
            assert!(a.is_hermitian(1e-14));
        }
    }

    #[test]
    fn eigen_of_diagonal_inputs() {
        let (spec, _) = hermitian_eigensystem(&ComplexMatrix::from_diag(&[0.3, 0.7])).unwrap();
        assert_eq!(spec.values(), &[0.7, 0.3]);
        let (spec, _) = hermitian_eigensystem(&ComplexMatrix::from_diag(&[0.5, 0.5])).unwrap();
        assert_eq!(spec.values(), &[0.5, 0.5]);
    }

    #[test]
    fn eigen_rejects_non_hermitian() {
        let mut m = ComplexMatrix::identity(2);
        m[(0, 1)] = c(1.0, 0.0);
        assert!(matches!(hermitian_eigensystem(&m), Err(LinalgError::NotHermitian { .. })));
    }

    #[test]
    fn eigen_reconstruction_and_trace() {
        for (n, seed) in [(2, 1u64), (3, 2), (4, 3), (8, 4), (16, 5), (33, 6), (64, 7)] {
            let h = random_hermitian(n, seed);
            let (spec, vecs) = hermitian_eigensystem(&h).unwrap();
            let sum: f64 = spec.values().iter().sum();
            assert!((sum - h.trace().re).abs() < 1e-10, "n={n}");
            assert!(spec.values().windows(2).all(|w| w[0] >= w[1]));
            let recon = spectral_compose(&vecs, spec.values());
            assert!(recon.max_abs_diff(&h) < EPS_EIG, "n={n}: {}", recon.max_abs_diff(&h));
            let gram = vecs.adjoint().matmul(&vecs).unwrap();
            assert!(gram.max_abs_diff(&ComplexMatrix::identity(n)) < EPS_EIG, "n={n}");
        }
    }

    #[test]
    fn sqrt_of_projector_and_diagonal() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let proj = ComplexMatrix::outer(&[c(h, 0.0), c(0.0, h)]);
        assert!(hermitian_sqrt(&proj).unwrap().max_abs_diff(&proj) < 1e-12);
        let d = ComplexMatrix::from_diag(&[4.0 / 5.0, 1.0 / 5.0]);
        let expect = ComplexMatrix::from_diag(&[2.0 / 5f64.sqrt(), 1.0 / 5f64.sqrt()]);
        assert!(hermitian_sqrt(&d).unwrap().max_abs_diff(&expect) < 1e-15);
    }

    #[test]
    fn sqrt_squares_back() {
        for seed in 0..10 {
            let rho = random_density(4 + (seed as usize % 5), seed);
            let s = hermitian_sqrt(&rho).unwrap();
            assert!(s.matmul(&s).unwrap().max_abs_diff(&rho) < 1e-10);
            let (spec, _) = hermitian_eigensystem(&s).unwrap();
            assert!(spec.min() > -1e-12);
        }
    }

    #[test]
    fn sqrt_rejects_negative() {
        let m = ComplexMatrix::from_diag(&[1.0, -0.1]);
        assert!(matches!(hermitian_sqrt(&m), Err(LinalgError::NotPositive { .. })));
    }

    #[test]
    fn density_spectrum_clips_and_normalizes() {
        let s = Spectrum::density(vec![0.5 + 5e-10, -5e-10, 0.5]).unwrap();
        assert_eq!(s.values()[2], 0.0);
        assert!((s.sum() - 1.0).abs() < 1e-15);
        assert!(Spectrum::density(vec![0.6, 0.6]).is_err());
        assert!(Spectrum::density(vec![1.1, -0.1]).is_err());
    }
}
