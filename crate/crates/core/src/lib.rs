//! Exponential-phase random matrices built from `d·N` i.i.d. phases.
//!
//! Row `j` of the `N×N` matrix is `N^{-1/2} exp(2πi Σ_q ω_{j,q} k^q)` for
//! `k = 1..N`. The crate constructs the ensemble reproducibly, computes the
//! spectral quantities of the Gram matrix `XX*` (Stieltjes transform,
//! counting function, minor Green's functions), compares them with the
//! Marchenko–Pastur law, and provides exact combinatorics for the Vinogradov
//! type systems that govern the moments of the fluctuation term.
//!
//! Module map:
//!
//! - [`ensemble`]: phase tables, densities, the matrix itself.
//! - [`spectral`]: Gram matrix, eigendecomposition, Green's functions, exact
//!   resolvent identities.
//! - [`mp`]: Marchenko–Pastur and semicircle references, stability reports.
//! - [`fluctuations`]: fluctuation term, partial expectation and moments.
//! - [`diophantine`]: solution sets, bad sets, dichotomy, Newton–Girard.
//! - [`locallaw`]: parameter arithmetic, domain lattices and sweeps.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod diophantine;
pub mod ensemble;
pub mod error;
pub mod fluctuations;
pub mod locallaw;
pub mod mp;
pub mod spectral;

mod linalg;
mod phase;
mod rng;
mod summation;

pub use error::{Error, Result};

pub use ensemble::{DensitySpec, EnsembleParams, OmegaTable, PhaseMatrix};
pub use spectral::{GreenMatrix, MinorData, SpectralDecomposition, SpectralSource};

pub use faer::Mat;
pub use num_complex::Complex64 as C64;

pub use summation::pairwise_sum;

/// Run the dense kernels single-threaded so that results do not depend on
/// the machine's core count. Callers that want throughput parallelize over
/// independent draws instead.
pub fn pin_linear_algebra_to_one_thread() {
    faer::set_global_parallelism(faer::Par::Seq);
}
