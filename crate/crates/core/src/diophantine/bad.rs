use serde::{Deserialize, Serialize};

use super::dichotomy::{dichotomy, PairList};
use super::enumerate::SolutionSet;
use crate::spectral::GreenMatrix;
use crate::{Error, Result};

fn check_dimension(solutions: &SolutionSet, g: &GreenMatrix) -> Result<()> {
    if (g.n() as u64) < solutions.system.n {
        return Err(Error::Dimension(format!(
            "Green's function has dimension {}, system needs {}",
            g.n(),
            solutions.system.n
        )));
    }
    Ok(())
}

/// Number of `α` with `|G_{k_α, l_α}| ≤ threshold` (indices are 1-based).
fn small_entries(tuple: &[u32], width: usize, g: &GreenMatrix, threshold: f64) -> usize {
    (0..width)
        .filter(|&a| g.g[(tuple[a] as usize - 1, tuple[width + a] as usize - 1)].norm() <= threshold)
        .count()
}

/// Solutions with exactly `r` entries `|G_{k_α,l_α}| ≤ threshold`.
pub fn bad_set_threshold(solutions: &SolutionSet, g: &GreenMatrix, threshold: f64, r: usize) -> Result<SolutionSet> {
    check_dimension(solutions, g)?;
    let w = solutions.system.width();
    Ok(solutions.filtered(|t| small_entries(t, w, g, threshold) == r))
}

/// `ℬ_v^{r,γ}` with the threshold `N^{−γ}`, `N` the range of the system.
pub fn bad_set(solutions: &SolutionSet, g: &GreenMatrix, gamma: f64, r: usize) -> Result<SolutionSet> {
    bad_set_threshold(solutions, g, (solutions.system.n as f64).powf(-gamma), r)
}

/// `|ℬ^{r,γ}|` for `r = 0..=2p`.
pub fn strata_counts(solutions: &SolutionSet, g: &GreenMatrix, gamma: f64) -> Result<Vec<usize>> {
    check_dimension(solutions, g)?;
    let w = solutions.system.width();
    let threshold = (solutions.system.n as f64).powf(-gamma);
    let mut counts = vec![0usize; w + 1];
    for t in solutions.iter() {
        counts[small_entries(t, w, g, threshold)] += 1;
    }
    Ok(counts)
}

/// Constants multiplying the cardinality bounds. `None` selects the
/// combinatorial defaults.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundConstants {
    pub thm: Option<f64>,
    pub casea: Option<f64>,
    pub caseb: Option<f64>,
}

fn binomial(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn factorial(n: u32) -> f64 {
    (1..=n).fold(1.0, |acc, i| acc * i as f64)
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundReport {
    pub n: f64,
    pub p: u32,
    pub d: u32,
    pub d0: u32,
    pub r: f64,
    pub gamma: f64,
    pub theta: f64,
    pub g_0: f64,
    pub g_r: f64,
    /// `N^{2d₀−2} N^r N^{(2p−r)(2γ+2θ)}`
    pub casea_core: f64,
    pub thm_bad_rhs: f64,
    /// `binom(2p,r) 2^{2p} (2d₀−2)^{2p}` times the core; zero (vacuous) for `d₀ ≤ 1`.
    pub casea_rhs: f64,
    pub caseb_rhs: f64,
    pub c_thm: f64,
    pub c_casea: f64,
    pub c_caseb: f64,
}

/// `g_r(N) = N^{2r} N^{(2p−d₀−r)(1+2γ+2θ)}`.
pub fn g_r(n: f64, p: u32, d0: u32, r: f64, gamma: f64, theta: f64) -> f64 {
    n.powf(2.0 * r) * n.powf((2.0 * p as f64 - d0 as f64 - r) * (1.0 + 2.0 * gamma + 2.0 * theta))
}

/// Evaluate the bad-set bounds at real `r` (integer `r` is needed only for
/// the binomial in the default constants, which is then taken at `⌊r⌋`).
pub fn bound_calculators(n: f64, p: u32, d: u32, r: f64, gamma: f64, theta: f64, consts: BoundConstants) -> BoundReport {
    let d0 = d / 2;
    let two_p = 2 * p;
    let r_int = r.floor().clamp(0.0, two_p as f64) as u32;
    let default_b = factorial(two_p) * binomial(two_p, r_int) * 2f64.powi(two_p as i32);
    let c_thm = consts.thm.unwrap_or(default_b);
    let c_casea = consts
        .casea
        .unwrap_or_else(|| binomial(two_p, r_int) * 2f64.powi(two_p as i32) * ((2 * d0) as f64 - 2.0).max(0.0).powi(two_p as i32));
    let c_caseb = consts.caseb.unwrap_or(default_b);
    let g0 = g_r(n, p, d0, 0.0, gamma, theta);
    let gr = g_r(n, p, d0, r, gamma, theta);
    let core = n.powf(2.0 * d0 as f64 - 2.0) * n.powf(r) * n.powf((two_p as f64 - r) * (2.0 * gamma + 2.0 * theta));
    BoundReport {
        n,
        p,
        d,
        d0,
        r,
        gamma,
        theta,
        g_0: g0,
        g_r: gr,
        casea_core: core,
        thm_bad_rhs: c_thm * (core + g0.max(gr)),
        casea_rhs: c_casea * core,
        caseb_rhs: c_caseb * g0.max(gr),
        c_thm,
        c_casea,
        c_caseb,
    }
}

/// One stratum `r` of an enumerated bad-set decomposition against the bounds.
#[derive(Clone, Debug, Serialize)]
pub struct StratumComparison {
    pub r: usize,
    pub size: usize,
    /// Members falling in case A / case B of the dichotomy with `s = d₀`;
    /// `None` when `d₀ = 0`.
    pub size_a: Option<usize>,
    pub size_b: Option<usize>,
    pub bounds: BoundReport,
    pub within_thm: bool,
    /// Only meaningful for `d₀ ≥ 2`.
    pub within_casea: Option<bool>,
    pub within_caseb: Option<bool>,
}

/// Enumerated strata against the cardinality bounds at `γ`, `θ`.
pub fn compare_bad_sets(
    solutions: &SolutionSet,
    g: &GreenMatrix,
    gamma: f64,
    theta: f64,
    consts: BoundConstants,
) -> Result<Vec<StratumComparison>> {
    check_dimension(solutions, g)?;
    let sys = &solutions.system;
    let w = sys.width();
    let d0 = (sys.d / 2) as usize;
    let threshold = (sys.n as f64).powf(-gamma);
    let mut sizes = vec![0usize; w + 1];
    let mut case_a = vec![0usize; w + 1];
    for (idx, t) in solutions.iter().enumerate() {
        let r = small_entries(t, w, g, threshold);
        sizes[r] += 1;
        if d0 >= 1 && solutions.off_diagonal {
            let pairs: Vec<(i64, i64)> = solutions.pairs(idx).into_iter().map(|(k, l)| (k as i64, l as i64)).collect();
            if dichotomy(&PairList::new(pairs)?, d0)?.is_case_a() {
                case_a[r] += 1;
            }
        }
    }
    let split = d0 >= 1 && solutions.off_diagonal;
    Ok((0..=w)
        .map(|r| {
            let bounds = bound_calculators(sys.n as f64, sys.p, sys.d, r as f64, gamma, theta, consts);
            let (size_a, size_b) = if split { (Some(case_a[r]), Some(sizes[r] - case_a[r])) } else { (None, None) };
            StratumComparison {
                r,
                size: sizes[r],
                size_a,
                size_b,
                within_thm: sizes[r] as f64 <= bounds.thm_bad_rhs,
                within_casea: if d0 >= 2 { size_a.map(|a| a as f64 <= bounds.casea_rhs) } else { None },
                within_caseb: size_b.map(|b| b as f64 <= bounds.caseb_rhs),
                bounds,
            }
        })
        .collect())
}
