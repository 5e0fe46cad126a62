//! Kraus channels applied to one side of a bipartite state.

use alloc::string::String;
use alloc::vec::Vec;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg::{haar_unitary, ComplexMatrix, Subsystem, C64, ZERO};
use crate::states::{check_dim, pure_bipartite, BipartiteState};
use crate::tol::Tolerances;

/// Kraus operators `M_i` (each `dim_out x dim_in`) with
/// `sum_i M_i^dag M_i = I`.
#[derive(Debug, Clone)]
pub struct KrausChannel {
    operators: Vec<DMatrix<C64>>,
    label: String,
}

impl KrausChannel {
    pub fn new(operators: Vec<DMatrix<C64>>, label: impl Into<String>, tol: &Tolerances) -> Result<Self> {
        let first = operators.first().ok_or(Error::Empty)?;
        let (dim_out, dim_in) = first.shape();
        for m in &operators {
            if m.shape() != (dim_out, dim_in) {
                return Err(Error::DimensionMismatch {
                    expected: dim_out * dim_in,
                    found: m.nrows() * m.ncols(),
                });
            }
            if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                return Err(Error::NonFinite);
            }
        }
        let channel = Self {
            operators,
            label: label.into(),
        };
        let residual = channel.completeness_residual();
        if residual > tol.completeness {
            return Err(Error::Incomplete { residual });
        }
        Ok(channel)
    }

    pub fn identity(d: usize) -> Self {
        Self::unitary(&ComplexMatrix::identity(d), "identity")
    }

    /// Conjugation by a unitary; not validated beyond shape.
    pub fn unitary(u: &ComplexMatrix, label: impl Into<String>) -> Self {
        Self {
            operators: alloc::vec![u.as_matrix().clone()],
            label: label.into(),
        }
    }

    /// `rho -> tr(rho) I / d` via the `d^2` Weyl operators `X^a Z^b / d`.
    pub fn completely_depolarizing(d: usize) -> Self {
        let omega = |k: usize| C64::from_polar(1.0, 2.0 * core::f64::consts::PI * k as f64 / d as f64);
        let mut ops = Vec::with_capacity(d * d);
        for a in 0..d {
            for b in 0..d {
                // (X^a Z^b)|k> = omega^{bk} |k + a>
                let m = DMatrix::from_fn(d, d, |row, col| {
                    if row == (col + a) % d {
                        omega((b * col) % d) / d as f64
                    } else {
                        ZERO
                    }
                });
                ops.push(m);
            }
        }
        Self {
            operators: ops,
            label: "depolarizing".into(),
        }
    }

    pub fn operators(&self) -> &[DMatrix<C64>] {
        &self.operators
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn dim_in(&self) -> usize {
        self.operators[0].ncols()
    }

    pub fn dim_out(&self) -> usize {
        self.operators[0].nrows()
    }

    /// `max |sum_i M_i^dag M_i - I|`.
    pub fn completeness_residual(&self) -> f64 {
        let d = self.dim_in();
        let mut sum = DMatrix::<C64>::zeros(d, d);
        for m in &self.operators {
            sum += m.adjoint() * m;
        }
        sum -= DMatrix::identity(d, d);
        sum.iter().fold(0.0, |acc, z| acc.max(z.norm()))
    }
}

/// Channel with `kraus_rank` operators from the first `d` columns of a
/// Haar unitary on `d * kraus_rank` dimensions, cut into `d x d` blocks.
pub fn random_channel(d: usize, kraus_rank: usize, seed: u64) -> Result<KrausChannel> {
    if d == 0 || kraus_rank == 0 {
        return Err(Error::Empty);
    }
    let u = haar_unitary(d * kraus_rank, seed);
    let m = u.as_matrix();
    let ops = (0..kraus_rank)
        .map(|i| m.view((i * d, 0), (d, d)).into_owned())
        .collect();
    KrausChannel::new(
        ops,
        alloc::format!("haar(d={d}, rank={kraus_rank}, seed={seed})"),
        &Tolerances::DEFAULT,
    )
}

/// `M (x) I` or `I (x) M` for a possibly rectangular `M`.
fn lift(m: &DMatrix<C64>, side: Subsystem, other: usize) -> DMatrix<C64> {
    let id = DMatrix::<C64>::identity(other, other);
    match side {
        Subsystem::A => m.kronecker(&id),
        Subsystem::B => id.kronecker(m),
    }
}

/// `sum_i (M_i on side) rho (M_i on side)^dag`.
pub fn apply_local(rho: &BipartiteState, ch: &KrausChannel, side: Subsystem) -> Result<BipartiteState> {
    let (d_side, d_other) = match side {
        Subsystem::A => (rho.d_a(), rho.d_b()),
        Subsystem::B => (rho.d_b(), rho.d_a()),
    };
    check_dim(d_side, ch.dim_in())?;
    let residual = ch.completeness_residual();
    if residual > rho.tolerances().completeness {
        return Err(Error::Incomplete { residual });
    }
    let out_dim = ch.dim_out() * d_other;
    let mut out = DMatrix::<C64>::zeros(out_dim, out_dim);
    for m in ch.operators() {
        let k = lift(m, side, d_other);
        out += &k * rho.matrix().as_matrix() * k.adjoint();
    }
    let (d_a, d_b) = match side {
        Subsystem::A => (ch.dim_out(), rho.d_b()),
        Subsystem::B => (rho.d_a(), ch.dim_out()),
    };
    BipartiteState::from_matrix(ComplexMatrix::new(out)?, d_a, d_b, rho.tolerances())
}

/// Selective operation on A applied to a pure state: the outcomes
/// `sqrt(p_i) |phi_i> = (M_i (x) I)|psi>` with `p_i` above the outcome
/// cutoff, each renormalized.
pub fn selective_local_ops(psi: &BipartiteState, ch: &KrausChannel) -> Result<Vec<(f64, BipartiteState)>> {
    let tol = psi.tolerances();
    let purity = psi.purity();
    if (purity - 1.0).abs() > tol.purity {
        return Err(Error::NotPure { purity });
    }
    check_dim(psi.d_a(), ch.dim_in())?;
    let v = DMatrix::from_column_slice(psi.dim(), 1, &psi.principal_vector());
    let mut outcomes = Vec::new();
    for m in ch.operators() {
        let phi = lift(m, Subsystem::A, psi.d_b()) * &v;
        let p: f64 = phi.iter().map(|z| z.norm_sqr()).sum();
        if p < tol.outcome_cutoff {
            continue;
        }
        let amps: Vec<C64> = phi.iter().copied().collect();
        outcomes.push((p, pure_bipartite(&amps, ch.dim_out(), psi.d_b(), tol)?));
    }
    let total: f64 = outcomes.iter().map(|(p, _)| p).sum();
    if (total - 1.0).abs() > tol.completeness.max(tol.trace) {
        return Err(Error::TraceNotOne { trace: total });
    }
    Ok(outcomes)
}
