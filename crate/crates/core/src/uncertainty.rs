//! Variance, Wigner-Yanase skew information and local quantum uncertainty.
//!
//! For a local observable `K = K_A (x) I_B` with fixed nondegenerate spectrum
//! `L`, the LQU is the minimum of the skew information `I(rho, K)` over all
//! `K_A = V diag(L) V^dag`. When A is a qubit and `L = (-1, 1)` the minimum is
//! `1 - lambda_max(W)` with `W_ij = tr(sqrt(rho) s_i sqrt(rho) s_j)`, where
//! `s_i = sigma_i (x) I_B`; [`lqu_closed_form`] evaluates that. For any other
//! spectrum or a larger A, [`lqu_bruteforce`] samples Haar unitaries and then
//! refines the best one by coordinate descent.

use alloc::vec::Vec;

use nalgebra::{Matrix3, SymmetricEigen};

use crate::error::{Error, Result};
use crate::linalg::{
    haar_unitary_with, hermitian_eig, partial_trace, rng_from_seed, trace_product, unitary_exp, ComplexMatrix,
    Subsystem, C64, I, ONE, ZERO,
};
use crate::states::{check_dim, BipartiteState, DensityMatrix};
use crate::tol::Tolerances;

/// Strictly increasing list of eigenvalues.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum(Vec<f64>);

impl Spectrum {
    pub fn new(values: &[f64], tol: &Tolerances) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Empty);
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        let gap = values.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
        if gap <= tol.spectrum_gap {
            return Err(Error::DegenerateSpectrum { gap });
        }
        Ok(Self(values.to_vec()))
    }

    /// `(-1, 1)`, the spectrum of `n . sigma`.
    pub fn pauli() -> Self {
        Self(alloc::vec![-1.0, 1.0])
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn shifted(&self, c: f64) -> Self {
        Self(self.0.iter().map(|v| v + c).collect())
    }

    /// Scales by `b > 0`.
    pub fn scaled(&self, b: f64) -> Self {
        assert!(b > 0.0, "scale must be positive");
        Self(self.0.iter().map(|v| v * b).collect())
    }
}

/// Hermitian operator with its (possibly degenerate) ascending eigenvalues.
#[derive(Debug, Clone)]
pub struct Observable {
    matrix: ComplexMatrix,
    eigenvalues: Vec<f64>,
}

impl Observable {
    pub fn new(m: ComplexMatrix, tol: &Tolerances) -> Result<Self> {
        let eig = hermitian_eig(&m, tol)?;
        Ok(Self {
            matrix: m.hermitian_part(),
            eigenvalues: eig.values,
        })
    }

    /// `V diag(spectrum) V^dag`.
    pub fn from_spectrum(v: &ComplexMatrix, spectrum: &Spectrum) -> Result<Self> {
        check_dim(spectrum.len(), v.dim())?;
        let k = ComplexMatrix::from_real_diagonal(spectrum.values()).conjugate_by(v);
        Ok(Self {
            matrix: k.hermitian_part(),
            eigenvalues: spectrum.values().to_vec(),
        })
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// The spectrum as a [`Spectrum`]; fails when degenerate.
    pub fn spectrum(&self, tol: &Tolerances) -> Result<Spectrum> {
        Spectrum::new(&self.eigenvalues, tol)
    }
}

/// `n . sigma` for a unit vector `n`.
pub fn pauli_direction(n: [f64; 3]) -> ComplexMatrix {
    let mut k = ComplexMatrix::zeros(2);
    for (i, &c) in n.iter().enumerate() {
        k = &k + &ComplexMatrix::pauli(i).scale(c);
    }
    k
}

/// `tr(rho K^2) - tr(rho K)^2`.
pub fn variance(rho: &DensityMatrix, k: &Observable) -> Result<f64> {
    check_dim(rho.dim(), k.dim())?;
    Ok(variance_matrix(rho, k.matrix()))
}

fn variance_matrix(rho: &DensityMatrix, k: &ComplexMatrix) -> f64 {
    let mean = trace_product(rho.matrix(), k).re;
    let second = trace_product(&(rho.matrix() * k), k).re;
    (second - mean * mean).max(0.0)
}

/// `-1/2 tr([sqrt(rho), K]^2)`, evaluated as half the squared Frobenius norm
/// of the commutator.
pub fn skew_information(rho: &DensityMatrix, k: &Observable) -> Result<f64> {
    check_dim(rho.dim(), k.dim())?;
    Ok(skew_matrix(rho.sqrt(), k.matrix()))
}

pub(crate) fn skew_matrix(sqrt_rho: &ComplexMatrix, k: &ComplexMatrix) -> f64 {
    let sk = sqrt_rho * k;
    let ks = k * sqrt_rho;
    let n = k.dim();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            acc += (sk[(i, j)] - ks[(i, j)]).norm_sqr();
        }
    }
    0.5 * acc
}

/// Skew information of `k_a (x) I_B`.
pub fn local_skew_information(state: &BipartiteState, k_a: &ComplexMatrix) -> Result<f64> {
    Ok(skew_matrix(state.sqrt(), &state.lift_a(k_a)?))
}

/// Real symmetric 3x3 matrix whose top eigenvalue fixes the qubit LQU.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WMatrix(pub [[f64; 3]; 3]);

impl WMatrix {
    fn eig(&self) -> SymmetricEigen<f64, nalgebra::U3> {
        let m = Matrix3::from_fn(|i, j| self.0[i][j]);
        SymmetricEigen::new(m)
    }

    /// Eigenvalues, ascending.
    pub fn eigenvalues(&self) -> [f64; 3] {
        let e = self.eig();
        let mut v = [e.eigenvalues[0], e.eigenvalues[1], e.eigenvalues[2]];
        v.sort_by(f64::total_cmp);
        v
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.eigenvalues()[2]
    }

    /// Unit vector `n` maximizing `n^T W n`; `n . sigma` is a least-uncertain
    /// local observable.
    pub fn top_eigenvector(&self) -> [f64; 3] {
        let e = self.eig();
        let k = (0..3)
            .max_by(|&a, &b| e.eigenvalues[a].total_cmp(&e.eigenvalues[b]))
            .unwrap_or(0);
        let c = e.eigenvectors.column(k);
        [c[0], c[1], c[2]]
    }
}

/// `S (sigma_k (x) I_B)` without forming the Kronecker product.
fn right_mul_local_pauli(s: &ComplexMatrix, k: usize, d_b: usize) -> ComplexMatrix {
    let n = s.dim();
    let (mut out, m) = (ComplexMatrix::zeros(n).into_matrix(), s.as_matrix());
    // sigma_k[a][a'] for a, a' in {0, 1}
    let sigma: [[C64; 2]; 2] = match k {
        0 => [[ZERO, ONE], [ONE, ZERO]],
        1 => [[ZERO, -I], [I, ZERO]],
        _ => [[ONE, ZERO], [ZERO, -ONE]],
    };
    for r in 0..n {
        for a2 in 0..2 {
            for b in 0..d_b {
                let mut acc = ZERO;
                for (a, row) in sigma.iter().enumerate() {
                    if row[a2] != ZERO {
                        acc += m[(r, a * d_b + b)] * row[a2];
                    }
                }
                out[(r, a2 * d_b + b)] = acc;
            }
        }
    }
    ComplexMatrix::from_raw(out)
}

/// `W_ij = tr(sqrt(rho) s_i sqrt(rho) s_j)` with `s_i = sigma_i (x) I_B`.
pub fn w_matrix(state: &BipartiteState) -> Result<WMatrix> {
    if state.d_a() != 2 {
        return Err(Error::NotQubit { d_a: state.d_a() });
    }
    let tol = state.tolerances();
    let terms: Vec<ComplexMatrix> = (0..3)
        .map(|k| right_mul_local_pauli(state.sqrt(), k, state.d_b()))
        .collect();
    let mut raw = [[ZERO; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            raw[i][j] = trace_product(&terms[i], &terms[j]);
        }
    }
    let mut w = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let residue = raw[i][j].im.abs().max((raw[i][j] - raw[j][i]).norm());
            if residue > tol.w_imag {
                return Err(Error::ComplexResidue { residue });
            }
            w[i][j] = 0.5 * (raw[i][j].re + raw[j][i].re);
        }
    }
    Ok(WMatrix(w))
}

/// Qubit-A LQU `1 - lambda_max(W)` for observables with spectrum `(-1, 1)`.
pub fn lqu_closed_form(state: &BipartiteState) -> Result<f64> {
    let w = w_matrix(state)?;
    let u = 1.0 - w.max_eigenvalue();
    let clamp = state.tolerances().lqu_clamp;
    if !(-clamp..=1.0 + clamp).contains(&u) {
        return Err(Error::OutOfRange {
            name: "lqu",
            value: u,
            range: "[0, 1]",
        });
    }
    Ok(u.clamp(0.0, 1.0))
}

/// Qubit-A LQU for spectrum `(a, b)`: `((b - a) / 2)^2` times the
/// closed form, since shifts drop out of the commutator.
pub fn lqu_qubit(state: &BipartiteState, spectrum: &Spectrum) -> Result<f64> {
    check_dim(2, spectrum.len())?;
    let half_gap = 0.5 * (spectrum.values()[1] - spectrum.values()[0]);
    Ok(half_gap * half_gap * lqu_closed_form(state)?)
}

/// Settings for sampled minimization over a unitary group.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitarySearch {
    /// Number of Haar samples drawn before refinement.
    pub budget: usize,
    pub seed: u64,
    /// Initial rotation angle of the coordinate descent.
    pub initial_step: f64,
    /// Refinement stops once the step falls below this.
    pub min_step: f64,
    /// Number of sample chunks whose best member is refined.
    pub starts: usize,
    /// Every start is first refined down to this step.
    pub screen_step: f64,
    /// Number of screened starts refined down to `min_step`.
    pub finalists: usize,
    /// Hard cap on objective evaluations per refinement.
    pub max_refine_evals: usize,
}

impl UnitarySearch {
    pub fn new(budget: usize, seed: u64) -> Self {
        Self {
            budget,
            seed,
            initial_step: 0.1,
            min_step: 1e-8,
            starts: 32,
            screen_step: 1e-3,
            finalists: 4,
            max_refine_evals: 200_000,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SearchOutcome {
    pub value: f64,
    pub unitary: ComplexMatrix,
    pub evaluations: usize,
}

/// Basis of traceless Hermitian `d x d` matrices (generalized Gell-Mann).
pub fn su_generators(d: usize) -> Vec<ComplexMatrix> {
    let mut out = Vec::with_capacity(d * d - 1);
    for j in 0..d {
        for k in j + 1..d {
            let mut sym = ComplexMatrix::zeros(d).into_matrix();
            sym[(j, k)] = ONE;
            sym[(k, j)] = ONE;
            out.push(ComplexMatrix::from_raw(sym));
            let mut asym = ComplexMatrix::zeros(d).into_matrix();
            asym[(j, k)] = -I;
            asym[(k, j)] = I;
            out.push(ComplexMatrix::from_raw(asym));
        }
    }
    for l in 1..d {
        let norm = (2.0 / (l * (l + 1)) as f64).sqrt();
        let diag: Vec<f64> = (0..d)
            .map(|i| match i.cmp(&l) {
                core::cmp::Ordering::Less => norm,
                core::cmp::Ordering::Equal => -(l as f64) * norm,
                core::cmp::Ordering::Greater => 0.0,
            })
            .collect();
        out.push(ComplexMatrix::from_real_diagonal(&diag));
    }
    out
}

/// Minimizes `objective(V)` over `U(d)`.
///
/// Haar samples are split into `starts` chunks. The identity and the best
/// sample of each chunk are refined by coordinate descent along
/// `exp(-i s G)` for each generator `G` down to `screen_step`, and the
/// `finalists` lowest of those continue down to `min_step`. A move that
/// improves is repeated with doubled angle until it stops helping; `s`
/// halves after every sweep without improvement.
pub fn minimize_over_unitaries(
    d: usize,
    config: &UnitarySearch,
    mut objective: impl FnMut(&ComplexMatrix) -> f64,
) -> SearchOutcome {
    let mut rng = rng_from_seed(config.seed);
    let starts = config.starts.max(1);
    // The identity starts one descent; the samples are split into `starts`
    // consecutive chunks and the best of each chunk starts another. Taking
    // the overall best few instead tends to pick one basin several times.
    let id = ComplexMatrix::identity(d);
    let mut pool = alloc::vec![(objective(&id), id)];
    let mut evaluations = 1;
    let chunk = config.budget.div_ceil(starts).max(1);
    let mut drawn = 0;
    while drawn < config.budget {
        let mut local: Option<(f64, ComplexMatrix)> = None;
        for _ in 0..chunk.min(config.budget - drawn) {
            let u = haar_unitary_with(d, &mut rng);
            let v = objective(&u);
            evaluations += 1;
            drawn += 1;
            if local.as_ref().map_or(true, |(b, _)| v < *b) {
                local = Some((v, u));
            }
        }
        pool.extend(local);
    }
    if d >= 2 {
        let screen = config.screen_step.max(config.min_step);
        let mut screened: Vec<(f64, ComplexMatrix)> = pool
            .into_iter()
            .map(|(v, u)| {
                let (v, u, n) = refine(d, config, &mut objective, v, u, config.initial_step, screen);
                evaluations += n;
                (v, u)
            })
            .collect();
        // Stable sort: ties keep the earlier start.
        screened.sort_by(|a, b| a.0.total_cmp(&b.0));
        screened.truncate(config.finalists.max(1));
        pool = screened
            .into_iter()
            .map(|(v, u)| {
                let (v, u, n) = refine(d, config, &mut objective, v, u, screen, config.min_step);
                evaluations += n;
                (v, u)
            })
            .collect();
    }
    let mut best: Option<(f64, ComplexMatrix)> = None;
    for (v, u) in pool {
        if best.as_ref().map_or(true, |(b, _)| v < *b) {
            best = Some((v, u));
        }
    }
    let (value, unitary) = best.expect("pool holds the identity");
    SearchOutcome {
        value,
        unitary,
        evaluations,
    }
}

const IMPROVEMENT_FLOOR: f64 = 64.0 * f64::EPSILON;

fn refine(
    d: usize,
    config: &UnitarySearch,
    objective: &mut impl FnMut(&ComplexMatrix) -> f64,
    mut best: f64,
    mut best_u: ComplexMatrix,
    mut step: f64,
    min_step: f64,
) -> (f64, ComplexMatrix, usize) {
    let generators = su_generators(d);
    let tol = Tolerances::DEFAULT;
    let mut evals = 0usize;
    while step >= min_step && evals < config.max_refine_evals {
        let mut improved = false;
        for g in &generators {
            for s in [step, -step] {
                // Keep applying the move, doubling it, while it still helps.
                let mut mv = unitary_exp(g, s, &tol).expect("generator is Hermitian");
                let mut moved = false;
                loop {
                    let cand = &mv * &best_u;
                    let v = objective(&cand);
                    evals += 1;
                    // Changes at rounding level along flat directions are not progress.
                    if v >= best - IMPROVEMENT_FLOOR * best.abs().max(1.0) {
                        break;
                    }
                    best = v;
                    best_u = cand;
                    moved = true;
                    mv = &mv * &mv;
                }
                if moved {
                    improved = true;
                    break;
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    (best, best_u, evals)
}

/// Sampled LQU for an arbitrary nondegenerate spectrum on A. The result is
/// an upper bound on the true minimum that tightens with the budget.
pub fn lqu_bruteforce(state: &BipartiteState, spectrum: &Spectrum, budget: usize, seed: u64) -> Result<f64> {
    Ok(lqu_search(state, spectrum, &UnitarySearch::new(budget, seed))?.value)
}

/// [`lqu_bruteforce`] with full control over the search, returning the
/// minimizing unitary `V` (so `K_A = V diag(spectrum) V^dag`).
pub fn lqu_search(state: &BipartiteState, spectrum: &Spectrum, config: &UnitarySearch) -> Result<SearchOutcome> {
    check_dim(state.d_a(), spectrum.len())?;
    let id_b = ComplexMatrix::identity(state.d_b());
    let diag = ComplexMatrix::from_real_diagonal(spectrum.values());
    let sqrt = state.sqrt();
    Ok(minimize_over_unitaries(state.d_a(), config, |v| {
        let k = crate::linalg::tensor(&diag.conjugate_by(v), &id_b);
        skew_matrix(sqrt, &k)
    }))
}

/// Largest dimension accepted by [`min_variance_fixed_spectrum`].
pub const MAX_ENUMERATION_DIM: usize = 8;

fn next_permutation(p: &mut [usize]) -> bool {
    let n = p.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

/// Minimum variance over observables with spectrum `spectrum`, attained by
/// an observable commuting with `rho`. Enumerates every assignment of
/// spectrum values to the eigenvalues of `rho` (ascending order); the
/// returned permutation `perm` pairs `rho`'s `i`-th eigenvalue with
/// `spectrum[perm[i]]`. Ties keep the lexicographically first permutation.
pub fn min_variance_fixed_spectrum(rho: &DensityMatrix, spectrum: &Spectrum) -> Result<(f64, Vec<usize>)> {
    let n = rho.dim();
    if n > MAX_ENUMERATION_DIM {
        return Err(Error::TooLarge {
            dim: n,
            max: MAX_ENUMERATION_DIM,
        });
    }
    check_dim(n, spectrum.len())?;
    let p = rho.eigenvalues();
    let lambda = spectrum.values();
    let value = |perm: &[usize]| {
        let (mut m1, mut m2) = (0.0, 0.0);
        for (i, &k) in perm.iter().enumerate() {
            m1 += p[i] * lambda[k];
            m2 += p[i] * lambda[k] * lambda[k];
        }
        m2 - m1 * m1
    };
    let mut perm: Vec<usize> = (0..n).collect();
    let mut best = (value(&perm), perm.clone());
    while next_permutation(&mut perm) {
        let v = value(&perm);
        if v < best.0 {
            best = (v, perm.clone());
        }
    }
    Ok(best)
}

/// The observable realizing [`min_variance_fixed_spectrum`].
pub fn min_variance_observable(rho: &DensityMatrix, spectrum: &Spectrum, perm: &[usize]) -> Result<Observable> {
    check_dim(rho.dim(), perm.len())?;
    let assigned: Vec<f64> = perm.iter().map(|&k| spectrum.values()[k]).collect();
    let k = ComplexMatrix::from_real_diagonal(&assigned).conjugate_by(&rho.eig().vectors);
    Ok(Observable {
        matrix: k.hermitian_part(),
        eigenvalues: spectrum.values().to_vec(),
    })
}

/// Squared Hellinger distance `1/2 tr((sqrt(rho) - sqrt(chi))^2)`.
pub fn hellinger_sq(rho: &DensityMatrix, chi: &DensityMatrix) -> Result<f64> {
    check_dim(rho.dim(), chi.dim())?;
    let diff = rho.sqrt() - chi.sqrt();
    let frob: f64 = diff.as_matrix().iter().map(|z| z.norm_sqr()).sum();
    Ok(0.5 * frob)
}

/// `2 (1 - tr rho_A^2)` for a pure bipartite state.
pub fn linear_entanglement_entropy(psi: &BipartiteState) -> Result<f64> {
    let purity = psi.purity();
    if (purity - 1.0).abs() > psi.tolerances().purity {
        return Err(Error::NotPure { purity });
    }
    let rho_a = partial_trace(psi.matrix(), psi.d_a(), psi.d_b(), Subsystem::A)?;
    Ok(2.0 * (1.0 - trace_product(&rho_a, &rho_a).re))
}
