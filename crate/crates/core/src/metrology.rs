//! Phase estimation with bipartite probes.
//!
//! A phase `phi` is imprinted on A by `exp(-i phi H_A)`. The quantum Fisher
//! information `F` of the resulting family bounds the estimator variance by
//! `1 / (nu F)`, and the LQU of the probe (for the spectrum of `H_A`) bounds
//! `F` from below: `4 U <= 4 I(rho, H_A) <= F`.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::{tensor, unitary_exp, ComplexMatrix};
use crate::states::{check_dim, check_spin, BipartiteState, DensityMatrix};
use crate::uncertainty::{lqu_qubit, lqu_search, skew_information, Observable, Spectrum, UnitarySearch};

/// Slack allowed in the `4U <= 4I <= F` chain.
pub const CHAIN_TOLERANCE: f64 = 1e-8;

/// A probe, a local Hamiltonian on A and a phase.
#[derive(Debug, Clone)]
pub struct PhaseFamily {
    pub probe: BipartiteState,
    pub hamiltonian: Observable,
    pub phase: f64,
}

impl PhaseFamily {
    pub fn new(probe: BipartiteState, hamiltonian: Observable, phase: f64) -> Result<Self> {
        check_dim(probe.d_a(), hamiltonian.dim())?;
        Ok(Self {
            probe,
            hamiltonian,
            phase,
        })
    }

    /// `rho_phi`.
    pub fn evolved(&self) -> Result<BipartiteState> {
        evolve_phase(&self.probe, &self.hamiltonian, self.phase)
    }

    /// `H_A (x) I_B`.
    pub fn generator(&self) -> Observable {
        let lifted = tensor(self.hamiltonian.matrix(), &ComplexMatrix::identity(self.probe.d_b()));
        Observable::new(lifted, self.probe.tolerances()).expect("lift of a Hermitian matrix")
    }
}

/// `(e^{-i phi H_A} (x) I) rho (e^{i phi H_A} (x) I)`.
pub fn evolve_phase(probe: &BipartiteState, h_a: &Observable, phi: f64) -> Result<BipartiteState> {
    check_dim(probe.d_a(), h_a.dim())?;
    let u_a = unitary_exp(h_a.matrix(), phi, probe.tolerances())?;
    probe.conjugate_local(&u_a, &ComplexMatrix::identity(probe.d_b()))
}

/// Quantum Fisher information of `rho` under the unitary family generated by
/// `h`: `2 sum_{p_i + p_j > cutoff} (p_i - p_j)^2 / (p_i + p_j) |<i|H|j>|^2`.
pub fn qfi(rho: &DensityMatrix, h: &Observable) -> Result<f64> {
    check_dim(rho.dim(), h.dim())?;
    let cutoff = rho.tolerances().sld_cutoff;
    let eig = rho.eig();
    let v = &eig.vectors;
    // H in the eigenbasis of rho.
    let hv = &(&v.adjoint() * h.matrix()) * v;
    let p: Vec<f64> = eig.values.iter().map(|&x| x.max(0.0)).collect();
    let n = p.len();
    let mut f = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            let s = p[i] + p[j];
            if s > cutoff {
                let d = p[i] - p[j];
                f += 4.0 * d * d / s * hv[(i, j)].norm_sqr();
            }
        }
    }
    Ok(f)
}

/// Root fidelity `tr |sqrt(rho) sqrt(sigma)|`, the sum of the singular
/// values of `sqrt(rho) sqrt(sigma)`.
pub fn root_fidelity(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    check_dim(rho.dim(), sigma.dim())?;
    Ok(trace_norm(&(rho.sqrt() * sigma.sqrt())))
}

fn trace_norm(m: &ComplexMatrix) -> f64 {
    m.as_matrix().clone().singular_values().iter().sum()
}

/// `8 (1 - sqrt(Fid(rho, rho_delta))) / delta^2`, which tends to the QFI as
/// `delta -> 0`.
///
/// The Bures form `2 (1 - sqrt(Fid)) = min_W |sqrt(rho) - U sqrt(rho) W|_F^2`
/// is evaluated with the optimal `W` from the polar decomposition of
/// `sqrt(rho) U sqrt(rho)`. Summing squares of the small residual avoids the
/// cancellation in `1 - sqrt(Fid)`, and errors in `W` enter only at second
/// order.
pub fn qfi_finite_difference(rho: &BipartiteState, h_a: &Observable, delta: f64) -> Result<f64> {
    check_dim(rho.d_a(), h_a.dim())?;
    let u_a = unitary_exp(h_a.matrix(), delta, rho.tolerances())?;
    let u = tensor(&u_a, &ComplexMatrix::identity(rho.d_b()));
    let s = rho.sqrt().as_matrix();
    let us = u.as_matrix() * s;
    let svd = (s * &us).svd(true, true);
    let (x, y_adj) = (svd.u.expect("requested"), svd.v_t.expect("requested"));
    let w = y_adj.adjoint() * x.adjoint();
    let residual = s - us * w;
    Ok(4.0 * residual.norm_squared() / (delta * delta))
}

/// Richardson extrapolation of [`qfi_finite_difference`] to `delta -> 0`
/// over `levels` halvings of `delta0`. The difference quotient is even in
/// `delta`, so each level removes one power of `delta^2`.
pub fn qfi_extrapolated(rho: &BipartiteState, h_a: &Observable, delta0: f64, levels: usize) -> Result<f64> {
    if !(delta0.is_finite() && delta0 > 0.0) {
        return Err(Error::OutOfRange {
            name: "delta0",
            value: delta0,
            range: "(0, inf)",
        });
    }
    let levels = levels.max(1);
    let mut table = Vec::with_capacity(levels);
    let mut delta = delta0;
    for _ in 0..levels {
        table.push(qfi_finite_difference(rho, h_a, delta)?);
        delta *= 0.5;
    }
    let mut factor = 1.0;
    for _ in 1..levels {
        factor *= 4.0;
        for i in 0..table.len() - 1 {
            table[i] = (factor * table[i + 1] - table[i]) / (factor - 1.0);
        }
        table.pop();
    }
    Ok(table[0])
}

/// Fidelity-based QFI estimate with a step scaled to the spectral spread of
/// `h_a`: six Richardson levels from a phase spread of 0.4 rad.
pub fn qfi_fidelity_oracle(rho: &BipartiteState, h_a: &Observable) -> Result<f64> {
    let ev = h_a.eigenvalues();
    let spread = ev[ev.len() - 1] - ev[0];
    if spread <= 0.0 {
        return Ok(0.0);
    }
    qfi_extrapolated(rho, h_a, 0.4 / spread, 6)
}

/// The three sides of `4U <= 4I <= F` together with the Cramer-Rao variance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimationBound {
    /// `4 U_A` for the spectrum of `H_A`.
    pub lqu_bound: f64,
    /// `4 I(rho, H_A)`.
    pub skew_value: f64,
    pub qfi: f64,
    pub repetitions: u64,
    /// `1 / (nu F)`; infinite when `F = 0`.
    pub variance_bound: f64,
}

/// LQU for the spectrum `lambda` on A: the closed form (rescaled) when A is a
/// qubit, the sampled minimum otherwise.
pub fn lqu_for_spectrum(state: &BipartiteState, lambda: &Spectrum, search: &UnitarySearch) -> Result<f64> {
    if state.d_a() == 2 {
        lqu_qubit(state, lambda)
    } else {
        Ok(lqu_search(state, lambda, search)?.value)
    }
}

/// Evaluates the precision chain for `probe` under `H_A`, failing with
/// [`Error::ChainViolation`] if it does not hold within [`CHAIN_TOLERANCE`].
pub fn estimation_bound(
    probe: &BipartiteState,
    h_a: &Observable,
    repetitions: u64,
    search: &UnitarySearch,
) -> Result<EstimationBound> {
    check_dim(probe.d_a(), h_a.dim())?;
    if repetitions == 0 {
        return Err(Error::OutOfRange {
            name: "repetitions",
            value: 0.0,
            range: ">= 1",
        });
    }
    let lambda = h_a.spectrum(probe.tolerances())?;
    let family = PhaseFamily::new(probe.clone(), h_a.clone(), 0.0)?;
    let generator = family.generator();
    let skew = skew_information(probe, &generator)?;
    // H_A itself has spectrum lambda, so it is one of the minimization candidates.
    let lqu = lqu_for_spectrum(probe, &lambda, search)?.min(skew);
    let f = qfi(probe, &generator)?;
    let bound = EstimationBound {
        lqu_bound: 4.0 * lqu,
        skew_value: 4.0 * skew,
        qfi: f,
        repetitions,
        variance_bound: 1.0 / (repetitions as f64 * f),
    };
    if bound.lqu_bound > bound.skew_value + CHAIN_TOLERANCE || bound.skew_value > bound.qfi + CHAIN_TOLERANCE {
        return Err(Error::ChainViolation(format!(
            "4U = {:e}, 4I = {:e}, F = {:e}",
            bound.lqu_bound, bound.skew_value, bound.qfi
        )));
    }
    Ok(bound)
}

/// `j^2 (1 - sqrt(1 - r^2))`, the LQU of the dephased spin probe for the
/// spectrum `(-j, j)`.
pub fn spin_probe_lqu_formula(j: f64, r: f64) -> Result<f64> {
    check_spin(j)?;
    if !(0.0..=1.0).contains(&r) {
        return Err(Error::OutOfRange {
            name: "r",
            value: r,
            range: "[0, 1]",
        });
    }
    Ok(j * j * (1.0 - (1.0 - r * r).sqrt()))
}

/// Grid resolution of [`shot_noise_threshold`].
pub const THRESHOLD_GRID_STEPS: u32 = 100_000;

/// Smallest coherence `r` on a grid of spacing `1 / THRESHOLD_GRID_STEPS`
/// for which the guaranteed Fisher information `4 j^2 (1 - sqrt(1 - r^2))`
/// exceeds the shot-noise value `2 j`. `None` if no `r <= 1` does.
pub fn shot_noise_threshold(j: f64) -> Result<Option<f64>> {
    check_spin(j)?;
    let beats = |r: f64| 4.0 * j * j * (1.0 - (1.0 - r * r).sqrt()) > 2.0 * j;
    // The guaranteed QFI is increasing in r, so bisect over grid indices.
    let n = THRESHOLD_GRID_STEPS;
    let at = |k: u32| f64::from(k) / f64::from(n);
    if !beats(at(n)) {
        return Ok(None);
    }
    let (mut lo, mut hi) = (0u32, n);
    if beats(at(lo)) {
        return Ok(Some(0.0));
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if beats(at(mid)) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(Some(at(hi)))
}
