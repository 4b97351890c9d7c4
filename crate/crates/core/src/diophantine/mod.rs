//! Exact combinatorics of the Vinogradov-type systems
//! `Σ_{α=1}^{2p} (k_α^q − l_α^q) = v_q`, `q = 1..d`, `k, l ∈ [N]`.
//!
//! Power sums are carried in checked 128-bit arithmetic; any overflow is an
//! error rather than a wrapped value.

mod bad;
mod convolution;
mod dichotomy;
mod enumerate;
mod io;
mod newton;
mod system;

pub use bad::{
    bad_set, bad_set_threshold, bound_calculators, g_r, compare_bad_sets, strata_counts, BoundConstants, BoundReport,
    StratumComparison,
};
pub use convolution::{convolution_distribution, count_lv_convolution, count_lv_convolution_u128, scaling_probe, ScalingProbe, ScalingRow};
pub use dichotomy::{dichotomy, DichotomyWitness, PairList};
pub use enumerate::{count_lv_mitm, enumerate_lv, SolutionSet, DEFAULT_STATE_CAP};
pub use io::{read_solutions, write_solutions, SolutionFlags, SolutionHeader};
pub use newton::{
    newton_girard, poly_from_elementary, poly_from_roots, power_sums, uniqueness_check, uniqueness_sweep, UniquenessOutcome,
    UniquenessSweep,
};
pub use system::VinogradovSystem;
