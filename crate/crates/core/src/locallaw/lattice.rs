use std::collections::HashMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::params::ThetaParams;
use crate::spectral::{stieltjes_mn, SpectralDecomposition};
use crate::{Error, Result};

/// Desk-scale overrides for [`domain_lattice`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LatticeOptions {
    /// Use this lattice exponent instead of `θ/2 + 3θ₀/2`.
    pub s_override: Option<f64>,
    /// Accept `θ` outside `(0, θ₀)`; the grid is then annotated as outside
    /// the legal window.
    pub allow_outside_window: bool,
    pub max_points: usize,
}

impl Default for LatticeOptions {
    fn default() -> Self {
        Self { s_override: None, allow_outside_window: false, max_points: 1_000_000 }
    }
}

/// `z = a·h + i(N^{−θ/4} + b·h)` with `h = N^{−s}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LatticePoint {
    pub a: i64,
    pub b: i64,
    pub z: Complex64,
}

#[derive(Clone, Debug, Serialize)]
pub struct DomainGrid {
    pub kappa: f64,
    pub c_kappa: f64,
    pub theta: f64,
    pub theta0: f64,
    pub n: u64,
    pub s: f64,
    pub spacing: f64,
    /// `N^{−θ/4}`
    pub initial_eta: f64,
    /// `0 < θ < θ₀` and `s` from the formula.
    pub legal_window: bool,
    pub points: Vec<LatticePoint>,
}

impl DomainGrid {
    pub fn contains(&self, z: Complex64) -> bool {
        let eta_min = (self.n as f64).powf(-self.theta);
        z.re > self.kappa && z.re < 4.0 - self.kappa && z.im > eta_min && z.im < self.c_kappa
    }

    /// Points on the initial-scale line `Im z = N^{−θ/4}`.
    pub fn initial_line(&self) -> impl Iterator<Item = &LatticePoint> {
        self.points.iter().filter(|p| p.b == 0)
    }

    /// Index pairs of horizontally or vertically adjacent points.
    pub fn neighbors(&self) -> Vec<(usize, usize)> {
        let index: HashMap<(i64, i64), usize> = self.points.iter().enumerate().map(|(i, p)| ((p.a, p.b), i)).collect();
        let mut out = Vec::new();
        for (i, p) in self.points.iter().enumerate() {
            for (da, db) in [(1, 0), (0, 1)] {
                if let Some(&j) = index.get(&(p.a + da, p.b + db)) {
                    out.push((i, j));
                }
            }
        }
        out
    }

    pub fn zs(&self) -> Vec<Complex64> {
        self.points.iter().map(|p| p.z).collect()
    }
}

/// The lattice `Re z ∈ N^{−s}ℤ`, `Im z ∈ N^{−θ/4} + N^{−s}ℤ`, restricted to
/// `Re z ∈ (κ, 4 − κ)`, `Im z ∈ (N^{−θ}, c_κ)`. Shifting the imaginary
/// lattice by `N^{−θ/4}` puts the initial-scale line on the lattice.
pub fn domain_lattice(tp: &ThetaParams, kappa: f64, c_kappa: f64, n: u64, theta: f64, opts: LatticeOptions) -> Result<DomainGrid> {
    if !(kappa > 0.0 && kappa < 1.0) || !(c_kappa > 0.0) || n == 0 {
        return Err(Error::InvalidParameter("need κ ∈ (0,1), c_κ > 0 and N ≥ 1".into()));
    }
    let theta0 = tp.theta0_f64();
    let in_window = theta > 0.0 && theta < theta0;
    if !in_window && !opts.allow_outside_window {
        return Err(Error::InvalidParameter(format!("θ = {theta} is outside (0, θ₀ = {theta0})")));
    }
    let s = opts.s_override.unwrap_or(theta / 2.0 + 1.5 * theta0);
    let nf = n as f64;
    let spacing = nf.powf(-s);
    if !(spacing.is_finite() && spacing > 0.0) || spacing < 64.0 * f64::EPSILON {
        return Err(Error::InvalidParameter(format!("lattice spacing N^-s = {spacing} is unusable")));
    }
    let initial_eta = nf.powf(-theta / 4.0);
    let eta_min = nf.powf(-theta);

    let a_lo = (kappa / spacing).floor() as i64;
    let a_hi = ((4.0 - kappa) / spacing).ceil() as i64;
    let b_lo = ((eta_min - initial_eta) / spacing).floor() as i64;
    let b_hi = ((c_kappa - initial_eta) / spacing).ceil() as i64;
    let estimate = (a_hi - a_lo + 1).max(0) as u128 * (b_hi - b_lo + 1).max(0) as u128;
    if estimate > opts.max_points as u128 * 4 + 64 {
        return Err(Error::BudgetExceeded { states: estimate, cap: opts.max_points as u128 });
    }
    let mut points = Vec::new();
    for b in b_lo..=b_hi {
        let eta = initial_eta + b as f64 * spacing;
        if !(eta > eta_min && eta < c_kappa) {
            continue;
        }
        for a in a_lo..=a_hi {
            let e = a as f64 * spacing;
            if e > kappa && e < 4.0 - kappa {
                points.push(LatticePoint { a, b, z: Complex64::new(e, eta) });
            }
        }
        if points.len() > opts.max_points {
            return Err(Error::BudgetExceeded { states: points.len() as u128, cap: opts.max_points as u128 });
        }
    }
    Ok(DomainGrid {
        kappa,
        c_kappa,
        theta,
        theta0,
        n,
        s,
        spacing,
        initial_eta,
        legal_window: in_window && opts.s_override.is_none(),
        points,
    })
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct ContinuityReport {
    pub pairs: usize,
    pub max_delta: f64,
    /// `√2·N^{2θ−s}`
    pub mvt_budget: f64,
    pub mvt_violations: usize,
    /// Pairs with `|Δm| > |z₁ − z₂|·(min Im)^{−2}`.
    pub lipschitz_violations: usize,
}

/// `m_N` at every pair of adjacent lattice points.
pub fn lattice_continuity(grid: &DomainGrid, decomp: &SpectralDecomposition) -> Result<ContinuityReport> {
    let m: Vec<Complex64> = grid.points.iter().map(|p| stieltjes_mn(decomp, p.z)).collect::<Result<_>>()?;
    let nf = grid.n as f64;
    let mvt_budget = 2f64.sqrt() * nf.powf(2.0 * grid.theta - grid.s);
    let mut rep = ContinuityReport { pairs: 0, max_delta: 0.0, mvt_budget, mvt_violations: 0, lipschitz_violations: 0 };
    for (i, j) in grid.neighbors() {
        let (z1, z2) = (grid.points[i].z, grid.points[j].z);
        let delta = (m[i] - m[j]).norm();
        let eta = z1.im.min(z2.im);
        rep.pairs += 1;
        rep.max_delta = rep.max_delta.max(delta);
        if delta > mvt_budget {
            rep.mvt_violations += 1;
        }
        if delta > (z1 - z2).norm() / (eta * eta) * (1.0 + 1e-12) {
            rep.lipschitz_violations += 1;
        }
    }
    Ok(rep)
}
