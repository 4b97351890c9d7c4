use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ensemble::EnsembleParams;
use crate::mp::m_mp;
use crate::spectral::{draw_spectrum, stieltjes_mn};
use crate::{Error, Result};

/// `start, start − step, …` down to `end` (inclusive; the last step may be shorter).
pub fn eta_ladder(start: f64, end: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0) || !(end > 0.0) || start < end {
        return Err(Error::InvalidParameter("need start ≥ end > 0 and step > 0".into()));
    }
    let mut out = vec![start];
    let mut k = 1u64;
    loop {
        let eta = start - k as f64 * step;
        if eta <= end {
            if *out.last().expect("nonempty") > end {
                out.push(end);
            }
            break;
        }
        out.push(eta);
        k += 1;
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DescentOptions {
    /// `θ₀` in the persistence bound `c′ N^{−θ₀}/η`.
    pub theta0: f64,
    pub c_prime: f64,
    /// `θ` in the mean-value budget `|Δη| N^{2θ}`.
    pub theta: f64,
    /// Harness self-test: force a bound violation at this step.
    pub inject_violation: Option<usize>,
}

impl Default for DescentOptions {
    fn default() -> Self {
        Self { theta0: 0.0, c_prime: 1.0, theta: 0.0, inject_violation: None }
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct DescentRow {
    pub seed: u64,
    pub step: usize,
    pub e: f64,
    pub eta: f64,
    pub m_n: Complex64,
    pub m_mp: Complex64,
    pub err: f64,
    pub bound: f64,
    pub flag: bool,
    /// `|m_N(z_k) − m_N(z_{k−1})|`, zero at the first step.
    pub delta_m: f64,
    /// `|η_k − η_{k−1}| / min(η)²`
    pub lipschitz_budget: f64,
    pub lipschitz_ok: bool,
    /// `|η_k − η_{k−1}| N^{2θ}`
    pub mvt_budget: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct DescentTable {
    pub rows: Vec<DescentRow>,
    pub flags: usize,
    pub lipschitz_failures: usize,
}

/// Track `|m_N − m_MP|` along a non-increasing ladder of `η` at fixed `E`.
pub fn multiscale_descent(params: &EnsembleParams, e: f64, etas: &[f64], seeds: &[u64], opts: DescentOptions) -> Result<DescentTable> {
    if seeds.is_empty() || etas.is_empty() {
        return Err(Error::InvalidParameter("descent needs seeds and at least one η".into()));
    }
    if etas.iter().any(|&x| !(x > 0.0)) || etas.windows(2).any(|w| w[1] > w[0]) {
        return Err(Error::InvalidParameter("η ladder must be positive and non-increasing".into()));
    }
    let nf = params.n as f64;
    let per_seed: Vec<Vec<DescentRow>> = seeds
        .par_iter()
        .map(|&seed| {
            let p = EnsembleParams { seed, ..*params };
            let decomp = draw_spectrum(&p, false)?;
            let mut rows: Vec<DescentRow> = Vec::with_capacity(etas.len());
            for (step, &eta) in etas.iter().enumerate() {
                let z = Complex64::new(e, eta);
                let m_n = stieltjes_mn(&decomp, z)?;
                let m_ref = m_mp(z)?;
                let mut err = (m_n - m_ref).norm();
                let bound = opts.c_prime * nf.powf(-opts.theta0) / eta;
                if opts.inject_violation == Some(step) {
                    err += 10.0 * bound;
                }
                let (delta_m, lipschitz_budget, mvt_budget) = match rows.last() {
                    Some(prev) => {
                        let d_eta = (prev.eta - eta).abs();
                        ((m_n - prev.m_n).norm(), d_eta / (eta * eta), d_eta * nf.powf(2.0 * opts.theta))
                    }
                    None => (0.0, 0.0, 0.0),
                };
                rows.push(DescentRow {
                    seed,
                    step,
                    e,
                    eta,
                    m_n,
                    m_mp: m_ref,
                    err,
                    bound,
                    flag: err > bound,
                    delta_m,
                    lipschitz_budget,
                    lipschitz_ok: delta_m <= lipschitz_budget * (1.0 + 1e-12),
                    mvt_budget,
                });
            }
            Ok(rows)
        })
        .collect::<Result<_>>()?;
    let rows: Vec<DescentRow> = per_seed.into_iter().flatten().collect();
    Ok(DescentTable {
        flags: rows.iter().filter(|r| r.flag).count(),
        lipschitz_failures: rows.iter().filter(|r| !r.lipschitz_ok).count(),
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ladder_shape() {
        let l = eta_ladder(0.5, 0.05, 0.1).unwrap();
        assert_eq!(l.first(), Some(&0.5));
        assert_eq!(l.last(), Some(&0.05));
        assert!(l.windows(2).all(|w| w[1] < w[0] && w[0] - w[1] <= 0.1 + 1e-15));
        assert!(eta_ladder(0.1, 0.5, 0.1).is_err());
    }

    #[test]
    fn repeated_eta_gives_identical_errors() {
        let params = EnsembleParams::new(40, 3, 1);
        let t = multiscale_descent(&params, 2.0, &[0.3, 0.3], &[5], DescentOptions::default()).unwrap();
        assert_eq!(t.rows[0].err, t.rows[1].err);
        assert_eq!(t.rows[1].delta_m, 0.0);
    }

    #[test]
    fn injected_violation_flips_one_flag() {
        let params = EnsembleParams::new(40, 3, 1);
        let etas = eta_ladder(0.5, 0.1, 0.05).unwrap();
        let opts = DescentOptions { c_prime: 100.0, ..Default::default() };
        let clean = multiscale_descent(&params, 2.0, &etas, &[5], opts).unwrap();
        let dirty = multiscale_descent(&params, 2.0, &etas, &[5], DescentOptions { inject_violation: Some(3), ..opts }).unwrap();
        let flipped: Vec<usize> = (0..etas.len()).filter(|&k| clean.rows[k].flag != dirty.rows[k].flag).collect();
        assert_eq!(flipped, vec![3]);
        assert_eq!(clean.lipschitz_failures, 0);
    }
}
