//! Validated density matrices and the state families used throughout.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::Deref;

use nalgebra::DMatrix;
use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::{
    self, complex_normal, hermitian_eig, partial_trace, rng_from_seed, tensor, ComplexMatrix, EigenDecomposition,
    Subsystem, C64, ZERO,
};
use crate::tol::Tolerances;
use crate::uncertainty::Spectrum;

/// Hermitian, unit-trace, positive semidefinite matrix with its
/// eigendecomposition and square root computed once at construction.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
    eig: EigenDecomposition,
    sqrt: ComplexMatrix,
    tol: Tolerances,
}

impl DensityMatrix {
    pub fn new(m: ComplexMatrix, tol: &Tolerances) -> Result<Self> {
        let eig = hermitian_eig(&m, tol)?;
        Self::validate(m.hermitian_part(), eig, tol)
    }

    fn validate(matrix: ComplexMatrix, eig: EigenDecomposition, tol: &Tolerances) -> Result<Self> {
        let trace = matrix.trace().re;
        if (trace - 1.0).abs() > tol.trace {
            return Err(Error::TraceNotOne { trace });
        }
        let sqrt = linalg::psd_sqrt_from_eig(&eig, tol)?;
        Ok(Self {
            matrix,
            eig,
            sqrt,
            tol: *tol,
        })
    }

    /// Re-validates under different tolerances.
    pub fn with_tolerances(self, tol: &Tolerances) -> Result<Self> {
        let residual = self.matrix.hermiticity_residual();
        if residual > tol.hermiticity * self.matrix.max_abs().max(1.0) {
            return Err(Error::NotHermitian { residual });
        }
        Self::validate(self.matrix, self.eig, tol)
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn eig(&self) -> &EigenDecomposition {
        &self.eig
    }

    /// Ascending eigenvalues.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eig.values
    }

    pub fn sqrt(&self) -> &ComplexMatrix {
        &self.sqrt
    }

    pub fn tolerances(&self) -> &Tolerances {
        &self.tol
    }

    /// `tr(rho^2)`.
    pub fn purity(&self) -> f64 {
        linalg::trace_product(&self.matrix, &self.matrix).re
    }

    /// `tr(rho A)`.
    pub fn expectation(&self, a: &ComplexMatrix) -> Result<C64> {
        check_dim(self.dim(), a.dim())?;
        Ok(linalg::trace_product(&self.matrix, a))
    }

    /// Dominant eigenvector; the state vector when the state is pure.
    pub fn principal_vector(&self) -> Vec<C64> {
        self.eig.vector(self.dim() - 1)
    }

    pub fn conjugate_by(&self, u: &ComplexMatrix) -> Result<Self> {
        check_dim(self.dim(), u.dim())?;
        Self::new(self.matrix.conjugate_by(u), &self.tol)
    }
}

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

/// Density matrix on `C^{d_a} (x) C^{d_b}`, A being the slow index.
#[derive(Debug, Clone)]
pub struct BipartiteState {
    state: DensityMatrix,
    d_a: usize,
    d_b: usize,
}

impl BipartiteState {
    pub fn new(state: DensityMatrix, d_a: usize, d_b: usize) -> Result<Self> {
        if d_a == 0 || d_b == 0 || d_a * d_b != state.dim() {
            return Err(Error::DimensionMismatch {
                expected: state.dim(),
                found: d_a * d_b,
            });
        }
        Ok(Self { state, d_a, d_b })
    }

    pub fn from_matrix(m: ComplexMatrix, d_a: usize, d_b: usize, tol: &Tolerances) -> Result<Self> {
        check_dim(m.dim(), d_a * d_b)?;
        Self::new(DensityMatrix::new(m, tol)?, d_a, d_b)
    }

    pub fn with_tolerances(self, tol: &Tolerances) -> Result<Self> {
        Ok(Self {
            state: self.state.with_tolerances(tol)?,
            ..self
        })
    }

    pub fn d_a(&self) -> usize {
        self.d_a
    }

    pub fn d_b(&self) -> usize {
        self.d_b
    }

    pub fn state(&self) -> &DensityMatrix {
        &self.state
    }

    pub fn into_state(self) -> DensityMatrix {
        self.state
    }

    /// Marginal on the `keep` factor.
    pub fn reduced(&self, keep: Subsystem) -> ComplexMatrix {
        partial_trace(self.state.matrix(), self.d_a, self.d_b, keep)
            .expect("bipartite dimensions are validated at construction")
    }

    /// `op (x) I_B` for an operator on A.
    pub fn lift_a(&self, op: &ComplexMatrix) -> Result<ComplexMatrix> {
        check_dim(self.d_a, op.dim())?;
        Ok(tensor(op, &ComplexMatrix::identity(self.d_b)))
    }

    /// `I_A (x) op` for an operator on B.
    pub fn lift_b(&self, op: &ComplexMatrix) -> Result<ComplexMatrix> {
        check_dim(self.d_b, op.dim())?;
        Ok(tensor(&ComplexMatrix::identity(self.d_a), op))
    }

    /// `(U_A (x) U_B) rho (U_A (x) U_B)^dag`.
    pub fn conjugate_local(&self, u_a: &ComplexMatrix, u_b: &ComplexMatrix) -> Result<Self> {
        check_dim(self.d_a, u_a.dim())?;
        check_dim(self.d_b, u_b.dim())?;
        let u = tensor(u_a, u_b);
        Self::new(self.state.conjugate_by(&u)?, self.d_a, self.d_b)
    }
}

impl Deref for BipartiteState {
    type Target = DensityMatrix;

    fn deref(&self) -> &DensityMatrix {
        &self.state
    }
}

fn normalized(amplitudes: &[C64]) -> Result<Vec<C64>> {
    let norm = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if amplitudes.is_empty() || norm == 0.0 {
        return Err(Error::ZeroVector);
    }
    if !norm.is_finite() {
        return Err(Error::NonFinite);
    }
    Ok(amplitudes.iter().map(|z| z / norm).collect())
}

/// `|psi><psi|` for the normalized `amplitudes`.
pub fn pure_state(amplitudes: &[C64], tol: &Tolerances) -> Result<DensityMatrix> {
    let psi = normalized(amplitudes)?;
    DensityMatrix::new(ComplexMatrix::outer(&psi), tol)
}

pub fn pure_bipartite(amplitudes: &[C64], d_a: usize, d_b: usize, tol: &Tolerances) -> Result<BipartiteState> {
    check_dim(d_a * d_b, amplitudes.len())?;
    BipartiteState::new(pure_state(amplitudes, tol)?, d_a, d_b)
}

fn phi_plus_vector() -> [C64; 4] {
    let h = C64::new(core::f64::consts::FRAC_1_SQRT_2, 0.0);
    [h, ZERO, ZERO, h]
}

/// `(|00> + |11>) / sqrt 2`.
pub fn bell_phi_plus() -> BipartiteState {
    pure_bipartite(&phi_plus_vector(), 2, 2, &Tolerances::DEFAULT).expect("Bell state is valid")
}

fn check_unit_interval(name: &'static str, value: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&value) {
        return Err(Error::OutOfRange {
            name,
            value,
            range: "[0, 1]",
        });
    }
    Ok(())
}

/// `p |phi+><phi+| + (1 - p) I / 4`.
pub fn werner(p: f64) -> Result<BipartiteState> {
    check_unit_interval("p", p)?;
    let bell = ComplexMatrix::outer(&phi_plus_vector());
    let m = &bell.scale(p) + &ComplexMatrix::identity(4).scale((1.0 - p) / 4.0);
    BipartiteState::from_matrix(m, 2, 2, &Tolerances::DEFAULT)
}

/// `sum_i p_i |i><i|_A (x) tau_i`, with `|i>` the computational basis of A.
pub fn classical_quantum(probs: &[f64], taus: &[DensityMatrix]) -> Result<BipartiteState> {
    let tol = Tolerances::DEFAULT;
    check_dim(probs.len(), taus.len())?;
    let d_a = probs.len();
    if d_a == 0 {
        return Err(Error::Empty);
    }
    let d_b = taus[0].dim();
    for tau in taus {
        check_dim(d_b, tau.dim())?;
    }
    for &p in probs {
        check_unit_interval("probability", p)?;
    }
    let total: f64 = probs.iter().sum();
    if (total - 1.0).abs() > tol.trace {
        return Err(Error::TraceNotOne { trace: total });
    }
    let mut m = ComplexMatrix::zeros(d_a * d_b);
    for (i, (&p, tau)) in probs.iter().zip(taus).enumerate() {
        let mut proj = vec![0.0; d_a];
        proj[i] = 1.0;
        let term = tensor(&ComplexMatrix::from_real_diagonal(&proj), tau.matrix()).scale(p);
        m = &m + &term;
    }
    BipartiteState::from_matrix(m, d_a, d_b, &tol)
}

/// Output of the one-clean-qubit protocol with ancilla polarization `mu` and
/// register unitary `u` on `n` qubits. The ancilla is subsystem A.
pub fn dqc1_output(n: u32, mu: f64, u: &ComplexMatrix) -> Result<BipartiteState> {
    const MAX_QUBITS: u32 = 20;
    let tol = Tolerances::DEFAULT;
    if n > MAX_QUBITS {
        return Err(Error::TooLarge {
            dim: 1 << n.min(62),
            max: 1 << MAX_QUBITS,
        });
    }
    check_unit_interval("mu", mu)?;
    let d = 1usize << n;
    check_dim(d, u.dim())?;
    let residual = u.unitarity_residual();
    if residual > tol.unitarity {
        return Err(Error::NotUnitary { residual });
    }
    let norm = 1.0 / (2 * d) as f64;
    let um = u.as_matrix();
    let m = DMatrix::from_fn(2 * d, 2 * d, |i, j| {
        let (a, b) = (i / d, i % d);
        let (a2, b2) = (j / d, j % d);
        match (a, a2) {
            (0, 1) => um[(b2, b)].conj() * (mu * norm),
            (1, 0) => um[(b, b2)] * (mu * norm),
            _ if b == b2 => C64::new(norm, 0.0),
            _ => ZERO,
        }
    });
    BipartiteState::from_matrix(ComplexMatrix::new(m)?, 2, d, &tol)
}

/// Dephased spin-`j` probe restricted to the span of `|j>, |-j>` on A and
/// `|0>, |1>` on B.
#[derive(Debug, Clone)]
pub struct SpinProbe {
    pub state: BipartiteState,
    pub j: f64,
    pub r: f64,
}

impl SpinProbe {
    /// Restricted `J_z = diag(j, -j)`; A's basis is `(|j>, |-j>)`.
    pub fn hamiltonian(&self) -> ComplexMatrix {
        ComplexMatrix::from_real_diagonal(&[self.j, -self.j])
    }

    /// `(-j, j)`.
    pub fn spectrum(&self) -> Spectrum {
        Spectrum::new(&[-self.j, self.j], &Tolerances::DEFAULT).expect("j > 0")
    }
}

pub(crate) fn check_spin(j: f64) -> Result<()> {
    let twice = 2.0 * j;
    if !j.is_finite() || j <= 0.0 || (twice - twice.round()).abs() > 1e-9 {
        return Err(Error::OutOfRange {
            name: "j",
            value: j,
            range: "positive half-integers",
        });
    }
    Ok(())
}

/// `1/2 [ |j,0><j,0| + |-j,1><-j,1| + r (|j,0><-j,1| + h.c.) ]`.
pub fn spin_probe(j: f64, r: f64) -> Result<SpinProbe> {
    check_spin(j)?;
    check_unit_interval("r", r)?;
    let mut diag = [0.0; 4];
    diag[0] = 0.5;
    diag[3] = 0.5;
    let mut m = ComplexMatrix::from_real_diagonal(&diag).into_matrix();
    m[(0, 3)] = C64::new(r / 2.0, 0.0);
    m[(3, 0)] = C64::new(r / 2.0, 0.0);
    let state = BipartiteState::from_matrix(ComplexMatrix::new(m)?, 2, 2, &Tolerances::DEFAULT)?;
    Ok(SpinProbe { state, j, r })
}

/// Normalized linear entropy `4/3 (1 - tr rho^2)` of a two-qubit state.
pub fn linear_entropy_two_qubit(rho: &DensityMatrix) -> Result<f64> {
    check_dim(4, rho.dim())?;
    Ok(4.0 / 3.0 * (1.0 - rho.purity()))
}

/// Random unit vector, uniform on the sphere.
pub fn random_pure_vector<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Vec<C64> {
    let v: Vec<C64> = (0..d).map(|_| complex_normal(rng)).collect();
    normalized(&v).expect("Gaussian vector is nonzero")
}

/// Random state `G G^dag / tr(G G^dag)` with `G` a `d x rank` Ginibre matrix.
pub fn random_density_with<R: Rng + ?Sized>(d: usize, rank: usize, rng: &mut R) -> DensityMatrix {
    let g = DMatrix::from_fn(d, rank.max(1), |_, _| complex_normal(rng));
    let m = &g * g.adjoint();
    let t = m.trace().re;
    DensityMatrix::new(ComplexMatrix::from_raw(m / C64::new(t, 0.0)), &Tolerances::DEFAULT)
        .expect("Ginibre state is valid")
}

/// Full-rank random state on `d_a x d_b`; deterministic in `seed`.
pub fn random_bipartite(d_a: usize, d_b: usize, seed: u64) -> BipartiteState {
    let d = d_a * d_b;
    let rho = random_density_with(d, d, &mut rng_from_seed(seed));
    BipartiteState::new(rho, d_a, d_b).expect("dimensions match")
}
