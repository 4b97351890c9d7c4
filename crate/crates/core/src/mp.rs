//! Marchenko–Pastur and semicircle reference quantities.
//!
//! `m_MP` is the Stieltjes transform of the Marchenko–Pastur law with ratio
//! one, the unique root of `z m² + z m + 1 = 0` with positive imaginary part.
//! The semicircle transform `m_sc` solves `m² + z m + 1 = 0`; the two are
//! related by `m_MP(z) = m_sc(√z)/√z`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::spectral::require_upper_half;
use crate::{Error, Result};

/// Density of the Marchenko–Pastur law on `(0, 4]`.
pub fn rho_mp(x: f64) -> f64 {
    if x <= 0.0 || x > 4.0 {
        return 0.0;
    }
    (x * (4.0 - x)).sqrt() / (2.0 * PI * x)
}

/// Both roots of `a m² + b m + c = 0` (`a ≠ 0`), computed without cancellation.
pub fn quadratic_roots(a: Complex64, b: Complex64, c: Complex64) -> (Complex64, Complex64) {
    let s = (b * b - 4.0 * a * c).sqrt();
    // pick the sign that avoids cancellation in b ± s
    let sign = if (b.conj() * s).re >= 0.0 { 1.0 } else { -1.0 };
    let q = -(b + s * sign) * 0.5;
    if q == Complex64::new(0.0, 0.0) {
        return (q, q);
    }
    (q / a, c / q)
}

fn upper_root(roots: (Complex64, Complex64)) -> Complex64 {
    if roots.0.im >= roots.1.im {
        roots.0
    } else {
        roots.1
    }
}

/// `m_MP(z)` for `Im z > 0`.
pub fn m_mp(z: Complex64) -> Result<Complex64> {
    require_upper_half(z)?;
    Ok(upper_root(quadratic_roots(z, z, Complex64::new(1.0, 0.0))))
}

/// `|z m² + z m + 1|`.
pub fn mp_quadratic_residual(m: Complex64, z: Complex64) -> f64 {
    (z * m * m + z * m + 1.0).norm()
}

/// `m_sc(z)` for `Im z > 0`.
pub fn m_sc(z: Complex64) -> Result<Complex64> {
    require_upper_half(z)?;
    let one = Complex64::new(1.0, 0.0);
    Ok(upper_root(quadratic_roots(one, z, one)))
}

/// `|m² + z m + 1|`.
pub fn sc_quadratic_residual(m: Complex64, z: Complex64) -> f64 {
    (m * m + z * m + 1.0).norm()
}

/// `√(r e^{iθ}) = √r e^{iθ/2}` for `θ ∈ (−π, π)`; undefined on the closed
/// negative real axis.
pub fn sqrt_branch(z: Complex64) -> Result<Complex64> {
    if z.im == 0.0 && z.re < 0.0 {
        return Err(Error::SpectralParameter { re: z.re, im: z.im });
    }
    let r = z.norm();
    let theta = z.im.atan2(z.re);
    Ok(Complex64::from_polar(r.sqrt(), theta / 2.0))
}

/// `F_MP(E) = ∫_{−∞}^E ρ_MP`. With `x = 4 sin² t` the integral becomes
/// `(2/π)(t + sin(2t)/2)`, `t = asin(√(E/4))`.
pub fn f_mp(e: f64) -> f64 {
    if e <= 0.0 {
        return 0.0;
    }
    if e >= 4.0 {
        return 1.0;
    }
    let t = (e / 4.0).sqrt().asin();
    (2.0 / PI) * (t + (2.0 * t).sin() / 2.0)
}

/// A spectral parameter together with the bulk domain it is meant to lie in:
/// `Re z ∈ (κ, 4 − κ)`, `Im z ∈ (η_min, c_κ)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralDomainPoint {
    pub z: Complex64,
    pub kappa: f64,
    pub c_kappa: f64,
    /// Lower edge `N^{-θ}` of the domain; zero when unconstrained.
    pub eta_min: f64,
}

impl SpectralDomainPoint {
    pub fn new(z: Complex64, kappa: f64, c_kappa: f64, eta_min: f64) -> Result<Self> {
        if !(kappa > 0.0 && kappa < 1.0) {
            return Err(Error::InvalidParameter(format!("kappa must lie in (0,1), got {kappa}")));
        }
        if !(c_kappa > 0.0) {
            return Err(Error::InvalidParameter(format!("c_kappa must be positive, got {c_kappa}")));
        }
        require_upper_half(z)?;
        Ok(Self { z, kappa, c_kappa, eta_min })
    }

    pub fn in_domain(&self) -> bool {
        let (e, eta) = (self.z.re, self.z.im);
        e > self.kappa && e < 4.0 - self.kappa && eta > self.eta_min && eta < self.c_kappa
    }
}

/// Outcome of the quadratic stability estimate for a candidate `m`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct StabilityReport {
    /// `|m + 1/(z + z m)|`
    pub delta: f64,
    pub dist_mp: f64,
    /// Distance to the spurious root `1/(z m_MP)`.
    pub dist_other: f64,
    /// `C δ/κ`
    pub bound: f64,
    /// `δ ≤ 1`
    pub hypothesis: bool,
    pub violation: bool,
}

impl StabilityReport {
    pub fn min_distance(&self) -> f64 {
        self.dist_mp.min(self.dist_other)
    }
}

/// Default for the unspecified constants of the stability estimates.
pub const DEFAULT_STABILITY_CONSTANT: f64 = 100.0;

pub fn stability_report(m: Complex64, point: &SpectralDomainPoint, c: f64) -> Result<StabilityReport> {
    let z = point.z;
    let mp = m_mp(z)?;
    let delta = (m + (z + z * m).inv()).norm();
    let dist_mp = (m - mp).norm();
    let dist_other = (m - (z * mp).inv()).norm();
    let bound = c * delta / point.kappa;
    let hypothesis = delta <= 1.0;
    let violation = hypothesis && dist_mp.min(dist_other) > bound;
    Ok(StabilityReport { delta, dist_mp, dist_other, bound, hypothesis, violation })
}

/// Semicircle counterpart: `δ = |m + 1/(w + m)|`, bound `C δ/√(κ + η + δ)`
/// with `κ = ||E| − 2|`, valid for `|E| ≤ 20`, `0 < η ≤ 10`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct ScStabilityReport {
    pub delta: f64,
    pub dist_sc: f64,
    pub dist_other: f64,
    pub bound: f64,
    pub hypothesis: bool,
    pub violation: bool,
}

pub fn stability_sc(m: Complex64, w: Complex64, c: f64) -> Result<ScStabilityReport> {
    let sc = m_sc(w)?;
    let delta = (m + (w + m).inv()).norm();
    let kappa = (w.re.abs() - 2.0).abs();
    let dist_sc = (m - sc).norm();
    let dist_other = (m - sc.inv()).norm();
    let bound = c * delta / (kappa + w.im + delta).sqrt();
    let hypothesis = delta <= 1.0 && w.re.abs() <= 20.0 && w.im > 0.0 && w.im <= 10.0;
    let violation = hypothesis && dist_sc.min(dist_other) > bound;
    Ok(ScStabilityReport { delta, dist_sc, dist_other, bound, hypothesis, violation })
}

/// `Im[z m_MP(z)]`, positive in the bulk for small enough `c_κ`.
pub fn imlb_check(point: &SpectralDomainPoint) -> Result<f64> {
    Ok((point.z * m_mp(point.z)?).im)
}

/// Rectangular grid `E_a × η_b` strictly inside the bulk domain.
pub fn bulk_grid(kappa: f64, c_kappa: f64, eta_min: f64, n_e: usize, n_eta: usize) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(n_e * n_eta);
    let lo = eta_min.max(0.0);
    for a in 0..n_e {
        let e = kappa + (4.0 - 2.0 * kappa) * (a as f64 + 0.5) / n_e as f64;
        for b in 0..n_eta {
            let eta = lo + (c_kappa - lo) * (b as f64 + 0.5) / n_eta as f64;
            out.push(Complex64::new(e, eta));
        }
    }
    out
}

/// Empirical constants `C_κ`, `C′_κ` with `1/C ≤ |m_MP| ≤ C` and
/// `1/C′ ≤ Im m_MP ≤ C′` over a grid.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct BulkConstants {
    pub min_abs: f64,
    pub max_abs: f64,
    pub min_im: f64,
    pub max_im: f64,
    pub c_kappa: f64,
    pub c_kappa_prime: f64,
    /// `min Im[z m_MP]` over the grid.
    pub min_imlb: f64,
}

impl BulkConstants {
    /// `κ/C′ − c_κ C`, the lower bound for `Im[z m_MP]`.
    pub fn imlb_lower_bound(&self, kappa: f64, c_kappa: f64) -> f64 {
        kappa / self.c_kappa_prime - c_kappa * self.c_kappa
    }
}

pub fn bulk_constants(points: &[Complex64]) -> Result<BulkConstants> {
    if points.is_empty() {
        return Err(Error::InvalidParameter("empty grid".into()));
    }
    let mut b = BulkConstants {
        min_abs: f64::INFINITY,
        max_abs: 0.0,
        min_im: f64::INFINITY,
        max_im: 0.0,
        c_kappa: 0.0,
        c_kappa_prime: 0.0,
        min_imlb: f64::INFINITY,
    };
    for &z in points {
        let m = m_mp(z)?;
        b.min_abs = b.min_abs.min(m.norm());
        b.max_abs = b.max_abs.max(m.norm());
        b.min_im = b.min_im.min(m.im);
        b.max_im = b.max_im.max(m.im);
        b.min_imlb = b.min_imlb.min((z * m).im);
    }
    b.c_kappa = b.max_abs.max(1.0 / b.min_abs);
    b.c_kappa_prime = b.max_im.max(1.0 / b.min_im);
    Ok(b)
}
