use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::ensemble::EnsembleParams;
use crate::mp::{f_mp, m_mp};
use crate::spectral::{counting_function, draw_spectrum, stieltjes_mn, SpectralDecomposition};
use crate::{Error, Result};

/// One `(seed, z)` evaluation of a sweep.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct SweepRow {
    pub seed: u64,
    pub n: usize,
    pub d: usize,
    pub e: f64,
    pub eta: f64,
    pub m_n: Complex64,
    pub m_mp: Complex64,
    pub err: f64,
    /// `N^{−θ₀}/η`
    pub bound: f64,
    pub flag: bool,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct SeedSummary {
    pub seed: u64,
    /// `sup_z err·Im z`
    pub sup_scaled_err: f64,
    pub mean_err: f64,
    pub max_err: f64,
    pub flags: usize,
    /// Points with `Im m_N ≤ 0` or `Im[√z m_N] ≤ 0`.
    pub sign_violations: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
    pub seeds: Vec<SeedSummary>,
    /// Mean over seeds of `sup_scaled_err`.
    pub mean_sup_scaled_err: f64,
    pub max_sup_scaled_err: f64,
    /// Mean over seeds of the per-seed mean error.
    pub mean_err: f64,
    pub flags: usize,
    pub sign_violations: usize,
}

impl SweepResult {
    /// Recompute the summary maximum from the table.
    pub fn recomputed_max_scaled(&self) -> f64 {
        self.rows.iter().map(|r| r.err * r.eta).fold(0.0, f64::max)
    }
}

fn seed_rows(params: &EnsembleParams, decomp: &SpectralDecomposition, zs: &[Complex64], bound_exponent: f64) -> Result<(Vec<SweepRow>, SeedSummary)> {
    let nf = params.n as f64;
    let mut rows = Vec::with_capacity(zs.len());
    let mut sign_violations = 0;
    for &z in zs {
        let m_n = stieltjes_mn(decomp, z)?;
        let m_ref = m_mp(z)?;
        if !(m_n.im > 0.0) || !((z.sqrt() * m_n).im > 0.0) {
            sign_violations += 1;
        }
        let err = (m_n - m_ref).norm();
        let bound = nf.powf(-bound_exponent) / z.im;
        rows.push(SweepRow { seed: params.seed, n: params.n, d: params.d, e: z.re, eta: z.im, m_n, m_mp: m_ref, err, bound, flag: err > bound });
    }
    let count = rows.len().max(1) as f64;
    let summary = SeedSummary {
        seed: params.seed,
        sup_scaled_err: rows.iter().map(|r| r.err * r.eta).fold(0.0, f64::max),
        mean_err: rows.iter().map(|r| r.err).sum::<f64>() / count,
        max_err: rows.iter().map(|r| r.err).fold(0.0, f64::max),
        flags: rows.iter().filter(|r| r.flag).count(),
        sign_violations,
    };
    Ok((rows, summary))
}

/// `m_N` against `m_MP` at every `z`, one eigendecomposition per seed.
/// `bound_exponent` is the `θ₀` in the per-point bound `N^{−θ₀}/Im z`.
pub fn locallaw_sweep(params: &EnsembleParams, zs: &[Complex64], seeds: &[u64], bound_exponent: f64) -> Result<SweepResult> {
    if seeds.is_empty() {
        return Err(Error::InvalidParameter("seed list is empty".into()));
    }
    let per_seed: Vec<(Vec<SweepRow>, SeedSummary)> = seeds
        .par_iter()
        .map(|&seed| {
            let p = EnsembleParams { seed, ..*params };
            let decomp = draw_spectrum(&p, false)?;
            seed_rows(&p, &decomp, zs, bound_exponent)
        })
        .collect::<Result<_>>()?;
    let mut rows = Vec::new();
    let mut summaries = Vec::new();
    for (r, s) in per_seed {
        rows.extend(r);
        summaries.push(s);
    }
    let k = summaries.len() as f64;
    Ok(SweepResult {
        mean_sup_scaled_err: summaries.iter().map(|s| s.sup_scaled_err).sum::<f64>() / k,
        max_sup_scaled_err: summaries.iter().map(|s| s.sup_scaled_err).fold(0.0, f64::max),
        mean_err: summaries.iter().map(|s| s.mean_err).sum::<f64>() / k,
        flags: summaries.iter().map(|s| s.flags).sum(),
        sign_violations: summaries.iter().map(|s| s.sign_violations).sum(),
        seeds: summaries,
        rows,
    })
}

/// `max err·N·η` over rows: the constant of the tightest `c/(Nη)` envelope.
pub fn envelope_constant(rows: &[SweepRow]) -> f64 {
    rows.iter().map(|r| r.err * r.n as f64 * r.eta).fold(0.0, f64::max)
}

/// `count` evenly spaced energies strictly inside `(κ, 4 − κ)`.
pub fn bulk_energy_grid(kappa: f64, count: usize) -> Vec<f64> {
    (0..count).map(|a| kappa + (4.0 - 2.0 * kappa) * (a as f64 + 0.5) / count as f64).collect()
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct RigidityRow {
    pub e: f64,
    pub f_n: f64,
    pub f_mp: f64,
    pub gap: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct RigidityScan {
    pub rows: Vec<RigidityRow>,
    pub sup_gap: f64,
}

pub fn rigidity_scan(decomp: &SpectralDecomposition, energies: &[f64]) -> RigidityScan {
    let rows: Vec<RigidityRow> = energies
        .iter()
        .map(|&e| {
            let f_n = counting_function(decomp, e);
            let f_ref = f_mp(e);
            RigidityRow { e, f_n, f_mp: f_ref, gap: (f_n - f_ref).abs() }
        })
        .collect();
    let sup_gap = rows.iter().map(|r| r.gap).fold(0.0, f64::max);
    RigidityScan { rows, sup_gap }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct DelocRow {
    pub alpha: usize,
    pub eigenvalue: f64,
    /// `max_i |u_α(i)|²`
    pub max_weight: f64,
    pub argmax: usize,
    /// `max_i η Im[(H − z)^{-1}]_{ii}` at `z = λ_α + iη`, when evaluated.
    pub surrogate: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct DelocScan {
    pub kappa: f64,
    pub eta: f64,
    pub rows: Vec<DelocRow>,
    /// Maximum of `max_weight` over bulk eigenvectors.
    pub bulk_max: f64,
    /// Rows whose surrogate falls below the direct value.
    pub surrogate_failures: usize,
}

/// `max_i |u_α(i)|²` over eigenvectors with eigenvalue in `(κ, 4 − κ)`;
/// the resolvent surrogate is evaluated on `surrogate_count` evenly spaced
/// bulk eigenvectors.
pub fn deloc_scan(decomp: &SpectralDecomposition, kappa: f64, eta: f64, surrogate_count: usize) -> Result<DelocScan> {
    let u = decomp
        .eigenvectors()
        .ok_or_else(|| Error::InvalidParameter("delocalization scan needs eigenvectors".into()))?;
    if !(eta > 0.0) {
        return Err(Error::SpectralParameter { re: 0.0, im: eta });
    }
    let lambda = decomp.eigenvalues();
    let n = decomp.n();
    let bulk: Vec<usize> = (0..n).filter(|&a| lambda[a] > kappa && lambda[a] < 4.0 - kappa).collect();
    let picks: Vec<usize> = if surrogate_count == 0 || bulk.is_empty() {
        Vec::new()
    } else {
        let k = surrogate_count.min(bulk.len());
        (0..k).map(|j| bulk[j * bulk.len() / k]).collect()
    };
    // |u_β(i)|², shared by the surrogate evaluations
    let weights: Vec<f64> = if picks.is_empty() {
        Vec::new()
    } else {
        (0..n * n).map(|idx| u[(idx % n, idx / n)].norm_sqr()).collect()
    };
    let rows: Vec<DelocRow> = bulk
        .par_iter()
        .map(|&alpha| {
            let (mut best, mut argmax) = (0.0, 0);
            for i in 0..n {
                let w = u[(i, alpha)].norm_sqr();
                if w > best {
                    best = w;
                    argmax = i;
                }
            }
            let surrogate = picks.contains(&alpha).then(|| {
                let kernel: Vec<f64> = (0..n).map(|b| eta * eta / ((lambda[b] - lambda[alpha]).powi(2) + eta * eta)).collect();
                (0..n)
                    .map(|i| (0..n).map(|b| kernel[b] * weights[b * n + i]).sum::<f64>())
                    .fold(0.0, f64::max)
            });
            DelocRow { alpha, eigenvalue: lambda[alpha], max_weight: best, argmax, surrogate }
        })
        .collect();
    let bulk_max = rows.iter().map(|r| r.max_weight).fold(0.0, f64::max);
    let surrogate_failures = rows
        .iter()
        .filter(|r| r.surrogate.is_some_and(|s| s < r.max_weight * (1.0 - 1e-10)))
        .count();
    Ok(DelocScan { kappa, eta, rows, bulk_max, surrogate_failures })
}
