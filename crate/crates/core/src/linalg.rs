//! Dense complex linear algebra.
//!
//! Eigendecompositions and QR factorizations are delegated to `nalgebra`;
//! everything here wraps them behind validated, Hermitian-aware entry points.

use alloc::vec::Vec;
use core::ops::{Add, Index, Mul, Sub};

use nalgebra::linalg::{SymmetricEigen, QR};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::tol::Tolerances;

pub type C64 = num_complex::Complex<f64>;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);
pub(crate) const I: C64 = C64::new(0.0, 1.0);

/// Which factor of a bipartite system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Subsystem {
    A,
    B,
}

/// Square, finite, dense complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix(DMatrix<C64>);

impl ComplexMatrix {
    pub fn new(m: DMatrix<C64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::NotSquare {
                rows: m.nrows(),
                cols: m.ncols(),
            });
        }
        if m.nrows() == 0 {
            return Err(Error::Empty);
        }
        if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self(m))
    }

    /// Wraps a matrix already known to be square and finite.
    pub(crate) fn from_raw(m: DMatrix<C64>) -> Self {
        debug_assert!(m.is_square() && m.nrows() > 0);
        Self(m)
    }

    pub fn from_row_major(dim: usize, entries: &[C64]) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                found: entries.len(),
            });
        }
        Self::new(DMatrix::from_row_slice(dim, dim, entries))
    }

    pub fn from_fn(dim: usize, f: impl FnMut(usize, usize) -> C64) -> Self {
        Self::from_raw(DMatrix::from_fn(dim, dim, f))
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_raw(DMatrix::identity(dim, dim))
    }

    pub fn zeros(dim: usize) -> Self {
        Self::from_raw(DMatrix::zeros(dim, dim))
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        Self::from_fn(diag.len(), |i, j| if i == j { C64::new(diag[i], 0.0) } else { ZERO })
    }

    /// Outer product `|v><v|`.
    pub fn outer(v: &[C64]) -> Self {
        Self::from_fn(v.len(), |i, j| v[i] * v[j].conj())
    }

    pub fn pauli_x() -> Self {
        Self::from_raw(DMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO]))
    }

    pub fn pauli_y() -> Self {
        Self::from_raw(DMatrix::from_row_slice(2, 2, &[ZERO, -I, I, ZERO]))
    }

    pub fn pauli_z() -> Self {
        Self::from_real_diagonal(&[1.0, -1.0])
    }

    /// `sigma_x`, `sigma_y`, `sigma_z` for `k = 0, 1, 2`.
    pub fn pauli(k: usize) -> Self {
        match k {
            0 => Self::pauli_x(),
            1 => Self::pauli_y(),
            2 => Self::pauli_z(),
            _ => panic!("Pauli index {k} out of range"),
        }
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn as_matrix(&self) -> &DMatrix<C64> {
        &self.0
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.0
    }

    /// Row-major copy of the entries.
    pub fn to_row_major(&self) -> Vec<C64> {
        let n = self.dim();
        let mut out = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                out.push(self.0[(i, j)]);
            }
        }
        out
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    pub fn trace(&self) -> C64 {
        self.0.trace()
    }

    pub fn scale(&self, s: f64) -> Self {
        Self(self.0.map(|z| z * s))
    }

    pub fn scale_complex(&self, s: C64) -> Self {
        Self(&self.0 * s)
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0, |m, z| m.max(z.norm()))
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim(), other.dim(), "dimension mismatch");
        self.0
            .iter()
            .zip(other.0.iter())
            .fold(0.0, |m, (a, b)| m.max((a - b).norm()))
    }

    /// `max |M - M^dag|`.
    pub fn hermiticity_residual(&self) -> f64 {
        let n = self.dim();
        let mut r = 0.0f64;
        for i in 0..n {
            for j in i..n {
                r = r.max((self.0[(i, j)] - self.0[(j, i)].conj()).norm());
            }
        }
        r
    }

    /// `max |U^dag U - I|`.
    pub fn unitarity_residual(&self) -> f64 {
        let g = self.0.adjoint() * &self.0;
        Self(g).max_abs_diff(&Self::identity(self.dim()))
    }

    /// `(M + M^dag) / 2`.
    pub fn hermitian_part(&self) -> Self {
        Self((&self.0 + self.0.adjoint()) * C64::new(0.5, 0.0))
    }

    /// `U M U^dag`.
    pub fn conjugate_by(&self, u: &ComplexMatrix) -> Self {
        Self(&u.0 * &self.0 * u.0.adjoint())
    }

    pub fn kron(&self, other: &Self) -> Self {
        tensor(self, other)
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;

    fn index(&self, idx: (usize, usize)) -> &C64 {
        &self.0[idx]
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim(), rhs.dim(), "dimension mismatch");
        ComplexMatrix(&self.0 * &rhs.0)
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim(), rhs.dim(), "dimension mismatch");
        ComplexMatrix(&self.0 + &rhs.0)
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim(), rhs.dim(), "dimension mismatch");
        ComplexMatrix(&self.0 - &rhs.0)
    }
}

/// `tr(A B)` without forming the product.
pub fn trace_product(a: &ComplexMatrix, b: &ComplexMatrix) -> C64 {
    assert_eq!(a.dim(), b.dim(), "dimension mismatch");
    let n = a.dim();
    let mut acc = ZERO;
    for i in 0..n {
        for j in 0..n {
            acc += a.0[(i, j)] * b.0[(j, i)];
        }
    }
    acc
}

/// Eigenpairs of a Hermitian matrix, eigenvalues ascending.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub values: Vec<f64>,
    /// Unitary whose columns are the eigenvectors, in the order of `values`.
    pub vectors: ComplexMatrix,
}

impl EigenDecomposition {
    /// `V f(diag(values)) V^dag`.
    pub fn map(&self, mut f: impl FnMut(f64) -> f64) -> ComplexMatrix {
        let v = &self.vectors.0;
        let n = v.nrows();
        let mut scaled = v.clone();
        for (k, &lambda) in self.values.iter().enumerate() {
            let s = f(lambda);
            for i in 0..n {
                scaled[(i, k)] *= s;
            }
        }
        ComplexMatrix(scaled * v.adjoint())
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.map(|x| x)
    }

    /// Column `k` of the eigenvector matrix.
    pub fn vector(&self, k: usize) -> Vec<C64> {
        self.vectors.0.column(k).iter().copied().collect()
    }
}

fn check_hermitian(m: &ComplexMatrix, tol: &Tolerances) -> Result<()> {
    let residual = m.hermiticity_residual();
    if residual > tol.hermiticity * m.max_abs().max(1.0) {
        return Err(Error::NotHermitian { residual });
    }
    Ok(())
}

/// Eigendecomposition of a Hermitian matrix. The input is symmetrized before
/// decomposition once it passes the hermiticity check.
pub fn hermitian_eig(m: &ComplexMatrix, tol: &Tolerances) -> Result<EigenDecomposition> {
    check_hermitian(m, tol)?;
    let eig = SymmetricEigen::new(m.hermitian_part().0);
    let n = m.dim();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = DMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    Ok(EigenDecomposition {
        values,
        vectors: ComplexMatrix(vectors),
    })
}

/// Principal square root of a PSD matrix.
pub fn psd_sqrt(m: &ComplexMatrix, tol: &Tolerances) -> Result<ComplexMatrix> {
    let eig = hermitian_eig(m, tol)?;
    psd_sqrt_from_eig(&eig, tol)
}

pub(crate) fn psd_sqrt_from_eig(eig: &EigenDecomposition, tol: &Tolerances) -> Result<ComplexMatrix> {
    let min = eig.values.first().copied().unwrap_or(0.0);
    if min < -tol.psd_clip {
        return Err(Error::NotPsd { min_eigenvalue: min });
    }
    // Eigenvalues this close to zero are rounding noise, and the square root
    // would amplify them to ~1e-8.
    let floor = SQRT_NOISE_FLOOR * eig.values.len() as f64 * eig.values.last().copied().unwrap_or(0.0).abs().max(1.0);
    Ok(eig.map(|x| if x <= floor { 0.0 } else { x.sqrt() }))
}

/// Per-dimension relative eigenvalue floor below which `psd_sqrt` treats an
/// eigenvalue as exactly zero.
pub const SQRT_NOISE_FLOOR: f64 = 8.0 * f64::EPSILON;

/// Kronecker product with A as the slow index.
pub fn tensor(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    ComplexMatrix(a.0.kronecker(&b.0))
}

/// Reduces a `(d_a * d_b)`-dimensional operator to the `keep` factor.
pub fn partial_trace(m: &ComplexMatrix, d_a: usize, d_b: usize, keep: Subsystem) -> Result<ComplexMatrix> {
    if d_a * d_b != m.dim() {
        return Err(Error::DimensionMismatch {
            expected: m.dim(),
            found: d_a * d_b,
        });
    }
    let out = match keep {
        Subsystem::A => DMatrix::from_fn(d_a, d_a, |a, a2| {
            (0..d_b).map(|b| m.0[(a * d_b + b, a2 * d_b + b)]).sum()
        }),
        Subsystem::B => DMatrix::from_fn(d_b, d_b, |b, b2| {
            (0..d_a).map(|a| m.0[(a * d_b + b, a * d_b + b2)]).sum()
        }),
    };
    Ok(ComplexMatrix(out))
}

/// `exp(-i t H)` for Hermitian `H`.
pub fn unitary_exp(h: &ComplexMatrix, t: f64, tol: &Tolerances) -> Result<ComplexMatrix> {
    let eig = hermitian_eig(h, tol)?;
    let v = &eig.vectors.0;
    let n = v.nrows();
    let mut scaled = v.clone();
    for (k, &lambda) in eig.values.iter().enumerate() {
        let phase = C64::new(0.0, -t * lambda).exp();
        for i in 0..n {
            scaled[(i, k)] *= phase;
        }
    }
    Ok(ComplexMatrix(scaled * v.adjoint()))
}

pub fn rng_from_seed(seed: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(seed)
}

/// Standard complex Gaussian, `E|z|^2 = 1`.
pub(crate) fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im) * core::f64::consts::FRAC_1_SQRT_2
}

/// Haar-random unitary drawn from `rng`.
///
/// QR of a complex Ginibre matrix, with the columns of Q rephased so that R
/// has a positive diagonal.
pub fn haar_unitary_with<R: Rng + ?Sized>(d: usize, rng: &mut R) -> ComplexMatrix {
    assert!(d >= 1, "dimension must be positive");
    let z = DMatrix::from_fn(d, d, |_, _| complex_normal(rng));
    let qr = QR::new(z);
    let r = qr.r();
    let mut q = qr.q();
    for k in 0..d {
        let rkk = r[(k, k)];
        let norm = rkk.norm();
        let phase = if norm > 0.0 { rkk / norm } else { ONE };
        for i in 0..d {
            q[(i, k)] *= phase;
        }
    }
    ComplexMatrix(q)
}

/// Haar-random unitary; deterministic in `seed`.
pub fn haar_unitary(d: usize, seed: u64) -> ComplexMatrix {
    haar_unitary_with(d, &mut rng_from_seed(seed))
}

/// GUE-distributed Hermitian matrix.
pub fn random_hermitian_with<R: Rng + ?Sized>(d: usize, rng: &mut R) -> ComplexMatrix {
    let g = ComplexMatrix(DMatrix::from_fn(d, d, |_, _| complex_normal(rng)));
    g.hermitian_part()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const TOL: Tolerances = Tolerances::DEFAULT;

    fn close(a: f64, b: f64, eps: f64) -> bool {
        (a - b).abs() <= eps
    }

    #[test]
    fn eig_identity_and_pauli() {
        let e = hermitian_eig(&ComplexMatrix::identity(3), &TOL).unwrap();
        assert_eq!(e.values.len(), 3);
        assert!(e.values.iter().all(|&v| close(v, 1.0, 1e-14)));

        let e = hermitian_eig(&ComplexMatrix::pauli_z(), &TOL).unwrap();
        assert!(close(e.values[0], -1.0, 1e-14) && close(e.values[1], 1.0, 1e-14));
        let e = hermitian_eig(&ComplexMatrix::pauli_y(), &TOL).unwrap();
        assert!(close(e.values[0], -1.0, 1e-14) && close(e.values[1], 1.0, 1e-14));
    }

    #[test]
    fn eig_rejects_non_hermitian() {
        let m = ComplexMatrix::from_row_major(2, &[ONE, ONE, ZERO, ONE]).unwrap();
        match hermitian_eig(&m, &TOL) {
            Err(Error::NotHermitian { residual }) => assert!(close(residual, 1.0, 1e-15)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn eig_reconstruction_random() {
        let mut rng = rng_from_seed(11);
        for d in [1, 2, 3, 5, 8, 17, 40] {
            let h = random_hermitian_with(d, &mut rng);
            let e = hermitian_eig(&h, &TOL).unwrap();
            let res = e.reconstruct().max_abs_diff(&h);
            assert!(res <= 1e-10 * h.max_abs(), "d={d} residual {res}");
            assert!(e.vectors.unitarity_residual() < 1e-12);
            assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
        }
    }

    #[test]
    fn sqrt_projector_and_diagonal() {
        let p = ComplexMatrix::outer(&[C64::new(0.6, 0.0), C64::new(0.0, 0.8)]);
        let r = psd_sqrt(&p, &TOL).unwrap();
        assert!(r.max_abs_diff(&p) < 1e-14);

        let r = psd_sqrt(&ComplexMatrix::from_real_diagonal(&[0.25, 0.75]), &TOL).unwrap();
        let want = ComplexMatrix::from_real_diagonal(&[0.5, 0.75f64.sqrt()]);
        assert!(r.max_abs_diff(&want) < 1e-15);
    }

    #[test]
    fn sqrt_clips_and_rejects() {
        let r = psd_sqrt(&ComplexMatrix::from_real_diagonal(&[1.0, -5e-11]), &TOL).unwrap();
        assert_eq!(r[(1, 1)], ZERO);
        assert!(matches!(
            psd_sqrt(&ComplexMatrix::from_real_diagonal(&[1.0, -1e-6]), &TOL),
            Err(Error::NotPsd { .. })
        ));
    }

    #[test]
    fn tensor_conventions() {
        let i2 = ComplexMatrix::identity(2);
        assert_eq!(tensor(&i2, &i2), ComplexMatrix::identity(4));
        let zi = tensor(&ComplexMatrix::pauli_z(), &i2);
        assert_eq!(zi, ComplexMatrix::from_real_diagonal(&[1.0, 1.0, -1.0, -1.0]));
    }

    #[test]
    fn haar_is_unitary_and_deterministic() {
        for d in [1, 2, 3, 16, 64] {
            let u = haar_unitary(d, 42);
            assert!(u.unitarity_residual() <= 1e-12, "d={d}");
            assert_eq!(u, haar_unitary(d, 42));
        }
        assert_ne!(haar_unitary(4, 1), haar_unitary(4, 2));
    }

    #[test]
    fn haar_eigenphases_uniform() {
        // Chi-square goodness of fit of pooled eigenphases over 16 bins.
        let bins = 16usize;
        let mut counts = [0usize; 16];
        let mut rng = rng_from_seed(2024);
        let d = 8;
        let samples = 500;
        for _ in 0..samples {
            let u = haar_unitary_with(d, &mut rng);
            let ev = u.as_matrix().eigenvalues().expect("Schur converges");
            for z in ev.iter() {
                let mut phase = z.arg();
                if phase < 0.0 {
                    phase += 2.0 * core::f64::consts::PI;
                }
                let k = ((phase / (2.0 * core::f64::consts::PI)) * bins as f64) as usize;
                counts[k.min(bins - 1)] += 1;
            }
        }
        let total = (d * samples) as f64;
        let expected = total / bins as f64;
        let chi2: f64 = counts.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
        // 15 degrees of freedom: the 99.9% quantile is 37.7.
        assert!(chi2 < 37.7, "chi2 = {chi2}, counts {counts:?}");
    }

    #[test]
    fn partial_trace_dimension_mismatch() {
        assert!(matches!(
            partial_trace(&ComplexMatrix::identity(4), 3, 2, Subsystem::A),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn unitary_exp_of_pauli() {
        let t = 0.3;
        let u = unitary_exp(&ComplexMatrix::pauli_z(), t, &TOL).unwrap();
        assert!((u[(0, 0)] - C64::new(0.0, -t).exp()).norm() < 1e-15);
        assert!((u[(1, 1)] - C64::new(0.0, t).exp()).norm() < 1e-15);
    }

    fn arb_matrix(d: usize) -> impl Strategy<Value = ComplexMatrix> {
        proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), d * d).prop_map(move |v| {
            let e: Vec<C64> = v.into_iter().map(|(a, b)| C64::new(a, b)).collect();
            ComplexMatrix::from_row_major(d, &e).unwrap()
        })
    }

    fn arb_density(d: usize) -> impl Strategy<Value = ComplexMatrix> {
        arb_matrix(d).prop_map(|g| {
            let m = &g * &g.adjoint();
            let t = m.trace().re;
            m.scale(1.0 / t)
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn trace_is_multiplicative(a in arb_matrix(2), b in arb_matrix(3)) {
            let lhs = tensor(&a, &b).trace();
            let rhs = a.trace() * b.trace();
            prop_assert!((lhs - rhs).norm() < 1e-12);
        }

        #[test]
        fn tensor_is_associative(a in arb_matrix(2), b in arb_matrix(2), c in arb_matrix(3)) {
            let l = tensor(&tensor(&a, &b), &c);
            let r = tensor(&a, &tensor(&b, &c));
            prop_assert!(l.max_abs_diff(&r) <= 1e-15);
        }

        #[test]
        fn partial_trace_of_product(ra in arb_density(2), rb in arb_density(3)) {
            let ab = tensor(&ra, &rb);
            let back_a = partial_trace(&ab, 2, 3, Subsystem::A).unwrap();
            let back_b = partial_trace(&ab, 2, 3, Subsystem::B).unwrap();
            prop_assert!(back_a.max_abs_diff(&ra) <= 1e-12);
            prop_assert!(back_b.max_abs_diff(&rb) <= 1e-12);
        }

        #[test]
        fn partial_trace_preserves_trace(rho in arb_density(6)) {
            for keep in [Subsystem::A, Subsystem::B] {
                let red = partial_trace(&rho, 2, 3, keep).unwrap();
                prop_assert!((red.trace().re - 1.0).abs() < 1e-12);
                prop_assert!(red.hermiticity_residual() < 1e-14);
            }
        }

        #[test]
        fn sqrt_squares_back_and_commutes(rho in arb_density(5)) {
            let r = psd_sqrt(&rho, &TOL).unwrap();
            prop_assert!((&r * &r).max_abs_diff(&rho) <= 1e-9);
            prop_assert!((&r * &rho).max_abs_diff(&(&rho * &r)) <= 1e-10);
            prop_assert!(r.hermiticity_residual() <= 1e-12);
        }
    }
}
