//! Local quantum uncertainty (LQU) and related information quantities for
//! finite-dimensional bipartite quantum states.
//!
//! The crate is `no_std` and only needs `alloc`. All matrices are dense and
//! complex. For a bipartite system the tensor index convention is fixed
//! throughout: subsystem A is the slow index, so row `i_a * d_b + i_b`
//! addresses `|i_a>|i_b>`.
//!
//! Module map:
//!
//! * [`linalg`]: complex matrices, Hermitian eigendecomposition, PSD square
//!   roots, Kronecker products, partial traces and Haar-random unitaries.
//! * [`states`]: validated density matrices and the named state families
//!   (Bell, Werner, classical-quantum, DQC1 output, dephased spin probe).
//! * [`uncertainty`]: variance, Wigner-Yanase skew information, the qubit
//!   closed-form LQU, the sampled LQU for arbitrary spectra, the
//!   permutation-minimized variance and the Hellinger distance.
//! * [`metrology`]: phase encoding, quantum Fisher information and the
//!   LQU <= skew <= QFI/4 precision chain.
//! * [`channels`]: Kraus channels acting locally on one subsystem.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod channels;
mod error;
pub mod linalg;
pub mod metrology;
pub mod states;
mod tol;
pub mod uncertainty;

pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, EigenDecomposition, Subsystem, C64};
pub use states::{BipartiteState, DensityMatrix};
pub use tol::Tolerances;
pub use uncertainty::{Observable, Spectrum, WMatrix};

/// Name of the pseudo-random generator behind every seeded routine.
pub const RNG_ALGORITHM: &str = "ChaCha20";
