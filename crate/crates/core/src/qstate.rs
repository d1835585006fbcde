//! Density matrices, spectra and the random-matrix building blocks (Ginibre
//! and Haar-distributed unitaries) that every sampler is assembled from.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;

/// Entrywise tolerance for `A = A†`.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Tolerance on `tr ρ = 1` and on `Σ λ = 1`.
pub const TRACE_TOL: f64 = 1e-12;
/// Eigenvalues in `[-PSD_TOL, 0)` are treated as round-off and clamped to zero.
pub const PSD_TOL: f64 = 1e-10;
/// Entrywise tolerance for `U U† = I`.
pub const UNITARY_TOL: f64 = 1e-10;

fn hermitian_deviation(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// `(A + A†) / 2`, which removes the last-bit asymmetry of products like `U Λ U†`.
pub(crate) fn hermitize(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()) * Complex64::new(0.5, 0.0)
}

fn real_trace(m: &CMatrix) -> f64 {
    m.diagonal().iter().map(|z| z.re).sum()
}

/// Eigen-decomposition of a Hermitian matrix with eigenvalues sorted descending
/// (stable in the original index). Returns `(values, vectors)` with vectors as
/// matching columns.
pub(crate) fn hermitian_eigen(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let eig = SymmetricEigen::new(m.clone());
    let n = m.nrows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]).then(a.cmp(&b)));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = CMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    (values, vectors)
}

/// Positive semi-definite, Hermitian, unit-trace `N×N` matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    m: CMatrix,
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positivity.
    pub fn new(m: CMatrix) -> Result<Self> {
        let n = m.nrows();
        if n == 0 {
            return Err(Error::InvalidDimension(0));
        }
        if m.ncols() != n {
            return Err(Error::DimensionMismatch(n, m.ncols()));
        }
        let dev = hermitian_deviation(&m);
        if dev > HERMITIAN_TOL {
            return Err(Error::NotHermitian(dev));
        }
        let tr = m.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::InvalidTrace(tr.re, 1.0));
        }
        let min = m
            .clone()
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min);
        if min < -PSD_TOL {
            return Err(Error::NotPositive(min));
        }
        Ok(Self { m })
    }

    /// For matrices that are PSD by construction (Gram matrices, `U Λ U†`):
    /// hermitizes and rescales to unit trace without an eigen-check.
    pub(crate) fn from_psd_unnormalized(m: &CMatrix) -> Self {
        let h = hermitize(m);
        let tr = real_trace(&h);
        Self { m: h.unscale(tr) }
    }

    /// `A A† / tr(A A†)`.
    pub(crate) fn from_gram(a: &CMatrix) -> Self {
        Self::from_psd_unnormalized(&(a * a.adjoint()))
    }

    pub fn maximally_mixed(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidDimension(0));
        }
        Ok(Self {
            m: CMatrix::from_diagonal_element(dim, dim, Complex64::new(1.0 / dim as f64, 0.0)),
        })
    }

    pub fn diagonal(probs: &[f64]) -> Result<Self> {
        let n = probs.len();
        Self::new(CMatrix::from_fn(n, n, |i, j| {
            if i == j {
                Complex64::new(probs[i], 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        }))
    }

    /// `|ψ⟩⟨ψ|` for a (not necessarily normalized) nonzero vector.
    pub fn pure(psi: &[Complex64]) -> Result<Self> {
        let n = psi.len();
        if n == 0 {
            return Err(Error::InvalidDimension(0));
        }
        let norm: f64 = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::InvalidArgument("zero state vector".into()));
        }
        let v: Vec<Complex64> = psi.iter().map(|z| z / norm).collect();
        Self::new(CMatrix::from_fn(n, n, |i, j| v[i] * v[j].conj()))
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.m
    }

    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        self.m[(i, j)]
    }

    /// `U ρ U†`.
    pub fn conjugate_by(&self, u: &UnitaryMatrix) -> Result<Self> {
        check_dims(self.dim(), u.dim())?;
        Ok(Self::from_psd_unnormalized(&(u.matrix() * &self.m * u.matrix().adjoint())))
    }

    /// `p·self + (1−p)·other`, for `p ∈ [0, 1]`.
    pub fn mixture(&self, other: &DensityMatrix, p: f64) -> Result<Self> {
        check_dims(self.dim(), other.dim())?;
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::Domain { value: p, domain: "[0, 1]" });
        }
        Ok(Self::from_psd_unnormalized(&(self.m.scale(p) + other.m.scale(1.0 - p))))
    }

    /// `tr(ρσ)`, real for Hermitian arguments.
    pub fn trace_product(&self, other: &DensityMatrix) -> Result<f64> {
        check_dims(self.dim(), other.dim())?;
        Ok(trace_product(&self.m, &other.m))
    }

    /// Flattened row-major `(re, im)` pairs.
    pub fn flattened(&self) -> Vec<f64> {
        let n = self.dim();
        let mut out = Vec::with_capacity(2 * n * n);
        for i in 0..n {
            for j in 0..n {
                out.push(self.m[(i, j)].re);
                out.push(self.m[(i, j)].im);
            }
        }
        out
    }
}

pub(crate) fn trace_product(a: &CMatrix, b: &CMatrix) -> f64 {
    let n = a.nrows();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            acc += (a[(i, j)] * b[(j, i)]).re;
        }
    }
    acc
}

pub(crate) fn check_dims(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::DimensionMismatch(a, b));
    }
    Ok(())
}

/// Point of the eigenvalue simplex, sorted descending.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenvalueVector {
    values: Vec<f64>,
}

impl EigenvalueVector {
    /// Accepts values in any order; they are sorted descending (stable).
    pub fn new(mut values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidDimension(0));
        }
        if let Some(bad) = values.iter().find(|v| !(0.0..=1.0 + TRACE_TOL).contains(*v)) {
            return Err(Error::InvalidEigenvalues(format!("value {bad} outside [0, 1]")));
        }
        let sum: f64 = values.iter().sum();
        if (sum - 1.0).abs() > TRACE_TOL {
            return Err(Error::InvalidEigenvalues(format!("values sum to {sum}")));
        }
        for v in values.iter_mut() {
            *v = v.min(1.0);
        }
        values.sort_by(|a, b| b.total_cmp(a));
        Ok(Self { values })
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.values
    }

    pub fn purity(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryMatrix {
    m: CMatrix,
}

impl UnitaryMatrix {
    pub fn new(m: CMatrix) -> Result<Self> {
        let n = m.nrows();
        if n == 0 {
            return Err(Error::InvalidDimension(0));
        }
        if m.ncols() != n {
            return Err(Error::DimensionMismatch(n, m.ncols()));
        }
        let dev = unitarity_defect(&m);
        if dev > UNITARY_TOL {
            return Err(Error::NotUnitary(dev));
        }
        Ok(Self { m })
    }

    pub fn identity(dim: usize) -> Self {
        Self { m: CMatrix::identity(dim, dim) }
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.m
    }

    /// `self · other`.
    pub fn compose(&self, other: &UnitaryMatrix) -> Result<Self> {
        check_dims(self.dim(), other.dim())?;
        Ok(Self { m: &self.m * &other.m })
    }
}

/// `max |(U U† − I)_ij|`.
pub fn unitarity_defect(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let p = m * m.adjoint();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((p[(i, j)] - Complex64::new(target, 0.0)).norm());
        }
    }
    worst
}

/// Hermitian traceless perturbation `dρ`.
#[derive(Debug, Clone, PartialEq)]
pub struct TangentDirection {
    m: CMatrix,
}

impl TangentDirection {
    pub fn new(m: CMatrix) -> Result<Self> {
        let n = m.nrows();
        if n == 0 {
            return Err(Error::InvalidDimension(0));
        }
        if m.ncols() != n {
            return Err(Error::DimensionMismatch(n, m.ncols()));
        }
        let dev = hermitian_deviation(&m);
        if dev > HERMITIAN_TOL {
            return Err(Error::NotHermitian(dev));
        }
        let tr = m.trace();
        if tr.norm() > TRACE_TOL {
            return Err(Error::InvalidTrace(tr.re, 0.0));
        }
        Ok(Self { m })
    }

    pub fn zero(dim: usize) -> Self {
        Self { m: CMatrix::zeros(dim, dim) }
    }

    /// Random Hermitian traceless direction with unit Frobenius norm.
    pub fn random<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidDimension(dim));
        }
        let g = ginibre(dim, rng)?;
        let mut h = hermitize(&g);
        let shift = Complex64::new(real_trace(&h) / dim as f64, 0.0);
        for i in 0..dim {
            h[(i, i)] -= shift;
        }
        let norm = h.norm();
        Ok(Self { m: h.unscale(norm) })
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.m
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self { m: self.m.scale(s) }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.m.norm()
    }
}

/// Complex Ginibre matrix: i.i.d. entries with `Re`, `Im ~ N(0, 1/2)`.
pub fn ginibre<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Result<CMatrix> {
    if dim == 0 {
        return Err(Error::InvalidDimension(0));
    }
    Ok(CMatrix::from_fn(dim, dim, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
    }))
}

/// Haar-distributed unitary: QR of a Ginibre matrix with the phases of the
/// triangular diagonal moved into `Q`.
pub fn haar_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Result<UnitaryMatrix> {
    let g = ginibre(dim, rng)?;
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..dim {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { Complex64::new(1.0, 0.0) };
        for i in 0..dim {
            q[(i, j)] *= phase;
        }
    }
    Ok(UnitaryMatrix { m: q })
}

/// `U diag(λ) U†`.
pub fn compose_state(eigs: &EigenvalueVector, u: &UnitaryMatrix) -> Result<DensityMatrix> {
    check_dims(eigs.dim(), u.dim())?;
    let um = u.matrix();
    let n = eigs.dim();
    let mut scaled = um.clone();
    for (j, &lam) in eigs.as_slice().iter().enumerate() {
        for i in 0..n {
            scaled[(i, j)] *= lam;
        }
    }
    Ok(DensityMatrix::from_psd_unnormalized(&(scaled * um.adjoint())))
}

/// Spectrum of an arbitrary Hermitian matrix that should be a state.
pub fn spectrum_of(m: &CMatrix) -> Result<EigenvalueVector> {
    let n = m.nrows();
    if n == 0 {
        return Err(Error::InvalidDimension(0));
    }
    if m.ncols() != n {
        return Err(Error::DimensionMismatch(n, m.ncols()));
    }
    let dev = hermitian_deviation(m);
    if dev > HERMITIAN_TOL {
        return Err(Error::NotHermitian(dev));
    }
    let raw = m.clone().symmetric_eigenvalues();
    clamp_spectrum(raw.iter().copied().collect())
}

pub(crate) fn clamp_spectrum(mut values: Vec<f64>) -> Result<EigenvalueVector> {
    for v in values.iter_mut() {
        if *v < -PSD_TOL {
            return Err(Error::NotPositive(*v));
        }
        if *v < 0.0 {
            *v = 0.0;
        }
    }
    let sum: f64 = values.iter().sum();
    if (sum - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidTrace(sum, 1.0));
    }
    for v in values.iter_mut() {
        *v /= sum;
    }
    EigenvalueVector::new(values)
}

/// Descending eigenvalues of `ρ`, with round-off negatives clamped.
pub fn spectrum(rho: &DensityMatrix) -> Result<EigenvalueVector> {
    spectrum_of(rho.matrix())
}

/// `tr ρ²`.
pub fn purity(rho: &DensityMatrix) -> f64 {
    frobenius_sq(rho.matrix())
}

pub(crate) fn frobenius_sq(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RngStream;
    use crate::statlab::{ks_test, ks_two_sample, mc_mean};
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn mixture_interpolates() {
        let a = DensityMatrix::diagonal(&[1.0, 0.0]).unwrap();
        let b = DensityMatrix::maximally_mixed(2).unwrap();
        let m = a.mixture(&b, 0.5).unwrap();
        assert_abs_diff_eq!(m.entry(0, 0).re, 0.75, epsilon = 1e-15);
        assert_abs_diff_eq!(m.entry(1, 1).re, 0.25, epsilon = 1e-15);
        assert!(a.mixture(&b, 1.5).is_err());
        assert!(a.mixture(&DensityMatrix::maximally_mixed(3).unwrap(), 0.5).is_err());
    }

    #[test]
    fn ginibre_is_deterministic() {
        let a = ginibre(1, &mut RngStream::new(9, 0)).unwrap();
        let b = ginibre(1, &mut RngStream::new(9, 0)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn ginibre_streams_differ() {
        let a = ginibre(2, &mut RngStream::new(9, 0)).unwrap();
        let b = ginibre(2, &mut RngStream::new(9, 1)).unwrap();
        assert_ne!(a, b);
    }

    #[test]
    fn ginibre_entry_variance_is_one() {
        let mut rng = RngStream::new(11, 0);
        let mut vals = Vec::with_capacity(900_000);
        for _ in 0..100_000 {
            vals.extend(ginibre(3, &mut rng).unwrap().iter().map(|z| z.norm_sqr()));
        }
        let (mean, _) = mc_mean(&vals).unwrap();
        assert!((mean - 1.0).abs() < 0.02, "mean |g|^2 = {mean}");
    }

    #[test]
    fn zero_dimension_rejected() {
        let mut rng = RngStream::new(1, 0);
        assert!(matches!(ginibre(0, &mut rng), Err(Error::InvalidDimension(0))));
        assert!(matches!(haar_unitary(0, &mut rng), Err(Error::InvalidDimension(0))));
    }

    #[test]
    fn haar_is_unitary() {
        let mut rng = RngStream::new(3, 0);
        for n in 1..=8 {
            for _ in 0..20 {
                let u = haar_unitary(n, &mut rng).unwrap();
                assert!(unitarity_defect(u.matrix()) <= 1e-10);
            }
        }
    }

    #[test]
    fn haar_phase_uniform_for_dim_one() {
        let mut rng = RngStream::new(5, 0);
        let angles: Vec<f64> = (0..10_000)
            .map(|_| haar_unitary(1, &mut rng).unwrap().matrix()[(0, 0)].arg())
            .collect();
        let (mean, se) = mc_mean(&angles).unwrap();
        assert!(mean.abs() <= 3.0 * se, "mean {mean} se {se}");
        let pi = std::f64::consts::PI;
        let gof = ks_test(&angles, |x| ((x + pi) / (2.0 * pi)).clamp(0.0, 1.0)).unwrap();
        assert!(gof.p_value > 0.01, "{gof:?}");
    }

    #[test]
    fn haar_first_moment() {
        let mut rng = RngStream::new(6, 0);
        let v: Vec<f64> = (0..10_000)
            .map(|_| haar_unitary(2, &mut rng).unwrap().matrix()[(0, 0)].norm_sqr())
            .collect();
        let (mean, se) = mc_mean(&v).unwrap();
        assert!((mean - 0.5).abs() <= 3.0 * se, "mean {mean} se {se}");
    }

    #[test]
    fn haar_left_invariance() {
        let mut rng = RngStream::new(8, 0);
        let v = haar_unitary(3, &mut RngStream::new(100, 0)).unwrap();
        let mut plain = Vec::new();
        let mut rotated = Vec::new();
        for _ in 0..10_000 {
            plain.push(haar_unitary(3, &mut rng).unwrap().matrix()[(0, 0)].norm_sqr());
            let u = haar_unitary(3, &mut rng).unwrap();
            rotated.push(v.compose(&u).unwrap().matrix()[(0, 0)].norm_sqr());
        }
        let gof = ks_two_sample(&plain, &rotated).unwrap();
        assert!(gof.p_value > 0.01, "{gof:?}");
    }

    #[test]
    fn compose_identity_rotation() {
        let eigs = EigenvalueVector::new(vec![1.0, 0.0]).unwrap();
        let rho = compose_state(&eigs, &UnitaryMatrix::identity(2)).unwrap();
        assert_eq!(rho, DensityMatrix::diagonal(&[1.0, 0.0]).unwrap());
    }

    #[test]
    fn compose_preserves_spectrum() {
        let mut rng = RngStream::new(12, 0);
        let eigs = EigenvalueVector::new(vec![0.7, 0.3]).unwrap();
        for _ in 0..50 {
            let u = haar_unitary(2, &mut rng).unwrap();
            let spec = spectrum(&compose_state(&eigs, &u).unwrap()).unwrap();
            assert_abs_diff_eq!(spec.as_slice()[0], 0.7, epsilon = 1e-10);
            assert_abs_diff_eq!(spec.as_slice()[1], 0.3, epsilon = 1e-10);
        }
    }

    #[test]
    fn maximally_mixed_is_rotation_invariant() {
        let mut rng = RngStream::new(13, 0);
        let eigs = EigenvalueVector::new(vec![1.0 / 3.0; 3]).unwrap();
        let u = haar_unitary(3, &mut rng).unwrap();
        let rho = compose_state(&eigs, &u).unwrap();
        let mm = DensityMatrix::maximally_mixed(3).unwrap();
        assert!((rho.matrix() - mm.matrix()).iter().all(|z| z.norm() <= 1e-10));
    }

    #[test]
    fn compose_rejects_mismatch() {
        let eigs = EigenvalueVector::new(vec![0.5, 0.5]).unwrap();
        assert!(matches!(
            compose_state(&eigs, &UnitaryMatrix::identity(3)),
            Err(Error::DimensionMismatch(2, 3))
        ));
    }

    #[test]
    fn invalid_simplex_points_rejected() {
        assert!(EigenvalueVector::new(vec![0.6, 0.6]).is_err());
        assert!(EigenvalueVector::new(vec![1.2, -0.2]).is_err());
        assert!(EigenvalueVector::new(vec![]).is_err());
        let e = EigenvalueVector::new(vec![0.2, 0.5, 0.3]).unwrap();
        assert_eq!(e.as_slice(), &[0.5, 0.3, 0.2]);
    }

    #[test]
    fn spectrum_of_diagonal_and_pure() {
        let rho = DensityMatrix::diagonal(&[0.5, 0.3, 0.2]).unwrap();
        let s = spectrum(&rho).unwrap();
        for (a, b) in s.as_slice().iter().zip([0.5, 0.3, 0.2]) {
            assert_abs_diff_eq!(*a, b, epsilon = 1e-14);
        }
        let pure = DensityMatrix::pure(&[c(1.0, 0.0), c(0.0, 1.0), c(0.5, -0.5)]).unwrap();
        let s = spectrum(&pure).unwrap();
        assert_abs_diff_eq!(s.as_slice()[0], 1.0, epsilon = 1e-12);
        assert!(s.as_slice()[1..].iter().all(|v| *v >= 0.0 && *v < 1e-12));
    }

    #[test]
    fn spectrum_rejects_non_hermitian() {
        let m = CMatrix::from_row_slice(2, 2, &[c(0.5, 0.0), c(0.1, 0.0), c(0.2, 0.0), c(0.5, 0.0)]);
        assert!(matches!(spectrum_of(&m), Err(Error::NotHermitian(_))));
    }

    #[test]
    fn density_matrix_validation() {
        let bad_trace = CMatrix::from_diagonal_element(2, 2, c(0.6, 0.0));
        assert!(matches!(DensityMatrix::new(bad_trace), Err(Error::InvalidTrace(..))));
        let negative = CMatrix::from_row_slice(2, 2, &[c(1.2, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-0.2, 0.0)]);
        assert!(matches!(DensityMatrix::new(negative), Err(Error::NotPositive(_))));
    }

    #[test]
    fn spectrum_clamps_small_negatives() {
        let s = clamp_spectrum(vec![1.0 + 5e-11, -5e-11]).unwrap();
        assert_eq!(s.as_slice()[1], 0.0);
        assert!(clamp_spectrum(vec![1.0 + 1e-9, -1e-9]).is_err());
    }

    #[test]
    fn purity_examples() {
        assert_abs_diff_eq!(purity(&DensityMatrix::maximally_mixed(4).unwrap()), 0.25, epsilon = 1e-15);
        let pure = DensityMatrix::pure(&[c(0.3, 0.1), c(-0.2, 0.9)]).unwrap();
        assert_abs_diff_eq!(purity(&pure), 1.0, epsilon = 1e-14);
        let rho = DensityMatrix::diagonal(&[0.7, 0.3]).unwrap();
        assert_abs_diff_eq!(purity(&rho), 0.58, epsilon = 1e-15);
    }

    #[test]
    fn tangent_validation() {
        let t = TangentDirection::random(3, &mut RngStream::new(1, 1)).unwrap();
        assert_abs_diff_eq!(t.frobenius_norm(), 1.0, epsilon = 1e-12);
        assert!(t.matrix().trace().norm() < 1e-12);
        let not_traceless = CMatrix::identity(2, 2);
        assert!(TangentDirection::new(not_traceless).is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(64))]

            #[test]
            fn spectrum_round_trips(n in 2usize..=6, seed in any::<u64>()) {
                let mut rng = RngStream::new(seed, 0);
                let g = ginibre(n, &mut rng).unwrap();
                let eigs = spectrum(&DensityMatrix::from_gram(&g)).unwrap();
                let u = haar_unitary(n, &mut rng).unwrap();
                let back = spectrum(&compose_state(&eigs, &u).unwrap()).unwrap();
                for (a, b) in eigs.as_slice().iter().zip(back.as_slice()) {
                    prop_assert!((a - b).abs() <= 1e-10);
                }
            }

            #[test]
            fn purity_matches_spectrum(n in 2usize..=6, seed in any::<u64>()) {
                let mut rng = RngStream::new(seed, 0);
                let rho = DensityMatrix::from_gram(&ginibre(n, &mut rng).unwrap());
                let eigs = spectrum(&rho).unwrap();
                prop_assert!((purity(&rho) - eigs.purity()).abs() <= 1e-12);
                prop_assert!(DensityMatrix::new(rho.matrix().clone()).is_ok());
            }
        }
    }
}
