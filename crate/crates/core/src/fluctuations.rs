//! The fluctuation term of the Schur complement, its partial expectation over
//! the phases of one row, and Monte-Carlo moments.
//!
//! For the minor Green's function `G = G^{(i)}(z)` and row phases
//! `φ_k = Σ_q ω_{i,q} k^q`, the quadratic form of the removed row splits as
//! `r G r* = m^{(i)}(z) + F_i(z)` with
//! `F_i = (1/N) Σ_{k≠l} G_{kl} e[φ_k − φ_l]`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::ensemble::{build_matrix, char_coefficient, replica_range, sample_omegas, sample_row, DensitySpec, EnsembleParams};
use crate::phase::row_exponentials;
use crate::spectral::{self, eig_herm, green_minor, minor, require_upper_half, GreenMatrix, SpectralDecomposition, SpectralSource};
use crate::summation::{pairwise_sum, pairwise_sum_real};
use crate::{Error, Mat, Result};

/// Largest `2p` accepted by the Monte-Carlo moment estimator.
pub const MAX_MC_MOMENT: u32 = 8;

/// `F_i(z)` from the minor Green's function and the phases of row `i`.
pub fn fluctuation(g: &GreenMatrix, omegas_row: &[f64]) -> Complex64 {
    let n = g.n();
    let w = row_exponentials(omegas_row, n);
    off_diagonal_form(&g.g, &w) / n as f64
}

/// `Σ_{k≠l} G_{kl} w_k conj(w_l)`.
fn off_diagonal_form(g: &Mat<Complex64>, w: &[Complex64]) -> Complex64 {
    let n = w.len();
    let terms: Vec<Complex64> = (0..n)
        .map(|k| {
            let mut acc = Complex64::new(0.0, 0.0);
            for l in 0..n {
                if l != k {
                    acc += g[(k, l)] * w[l].conj();
                }
            }
            w[k] * acc
        })
        .collect();
    pairwise_sum(&terms)
}

/// Everything needed to resample row `i` with the minor held fixed: the
/// eigendecomposition of `(X^{(i)})* X^{(i)}` serves every replica.
#[derive(Clone, Debug)]
pub struct FluctuationContext {
    pub params: EnsembleParams,
    pub row: usize,
    pub minor_spectrum: SpectralDecomposition,
    minor: spectral::MinorData,
}

impl FluctuationContext {
    pub fn new(params: &EnsembleParams, row: usize) -> Result<Self> {
        let omegas = sample_omegas(params, 0, None)?;
        let x = build_matrix(params, &omegas)?;
        let mi = minor(&x, row)?;
        let minor_spectrum = eig_herm(&mi.gram_adjoint_first(), SpectralSource::MinorGram { removed: row })?;
        Ok(Self { params: *params, row, minor_spectrum, minor: mi })
    }

    pub fn n(&self) -> usize {
        self.params.n
    }

    /// `m_N^{(i)}(z)`.
    pub fn m_minor(&self, z: Complex64) -> Result<Complex64> {
        spectral::stieltjes_mn(&self.minor_spectrum, z)
    }

    pub fn green(&self, z: Complex64) -> Result<GreenMatrix> {
        green_minor(&self.minor, z)
    }

    /// Row-`i` phases at a replica stream.
    pub fn row_omegas(&self, replica: u64) -> Result<Vec<f64>> {
        sample_row(&self.params, self.row, replica)
    }

    /// `Σ_j |Σ_k r_k U_{kj}|² / (λ_j − z)` for the row `r = N^{-1/2} e[φ]`.
    pub fn quadratic_form(&self, omegas_row: &[f64], z: Complex64) -> Complex64 {
        let n = self.n();
        let w = row_exponentials(omegas_row, n);
        let u = self.minor_spectrum.eigenvectors().expect("minor spectrum carries eigenvectors");
        let lambda = self.minor_spectrum.eigenvalues();
        let terms: Vec<Complex64> = (0..n)
            .map(|j| {
                let mut proj = Complex64::new(0.0, 0.0);
                for k in 0..n {
                    proj += w[k] * u[(k, j)];
                }
                Complex64::new(proj.norm_sqr() / n as f64, 0.0) / (Complex64::new(lambda[j], 0.0) - z)
            })
            .collect();
        pairwise_sum(&terms)
    }
}

/// Mean and standard error of complex samples; `stderr` is `None` for fewer
/// than two samples.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct ComplexMean {
    pub mean: Complex64,
    pub stderr: Option<f64>,
    pub count: usize,
}

pub fn complex_mean(samples: &[Complex64]) -> ComplexMean {
    let count = samples.len();
    if count == 0 {
        return ComplexMean { mean: Complex64::new(f64::NAN, f64::NAN), stderr: None, count };
    }
    let mean = pairwise_sum(samples) / count as f64;
    let stderr = (count >= 2).then(|| {
        let dev: Vec<f64> = samples.iter().map(|s| (s - mean).norm_sqr()).collect();
        (pairwise_sum_real(&dev) / (count as f64 * (count as f64 - 1.0))).sqrt()
    });
    ComplexMean { mean, stderr, count }
}

#[derive(Clone, Debug, Serialize)]
pub struct PartialExpectation {
    pub row: usize,
    pub z: Complex64,
    pub mean: ComplexMean,
    /// `m_N^{(i)}(z)`, the exact row average for the uniform density.
    pub m_minor: Complex64,
    /// Exact row average of `F_i` for the density in use.
    pub bias: Complex64,
    /// `(1/N) Σ_{k≠l} |G_{kl}| f(v(k,l))` with `v_q = k^q − l^q`.
    pub envelope: f64,
    /// Set when the standard error is undefined.
    pub degenerate: bool,
}

impl PartialExpectation {
    /// `|mean − (m^{(i)} + bias)|` in standard errors.
    pub fn z_score(&self) -> Option<f64> {
        let target = self.m_minor + self.bias;
        self.mean.stderr.map(|s| (self.mean.mean - target).norm() / s)
    }
}

/// Average of the row-`i` quadratic form over replica streams
/// `start..start+replicas`, holding the minor fixed.
pub fn partial_expectation_mc(ctx: &FluctuationContext, z: Complex64, start: u64, replicas: u64) -> Result<PartialExpectation> {
    require_upper_half(z)?;
    if replicas == 0 {
        return Err(Error::InvalidParameter("at least one replica is required".into()));
    }
    let range = replica_range(start, replicas)?;
    let samples: Vec<Complex64> = range
        .collect::<Vec<_>>()
        .par_iter()
        .map(|&r| ctx.row_omegas(r).map(|w| ctx.quadratic_form(&w, z)))
        .collect::<Result<_>>()?;
    let g = ctx.green(z)?;
    let mean = complex_mean(&samples);
    Ok(PartialExpectation {
        row: ctx.row,
        z,
        degenerate: mean.stderr.is_none(),
        mean,
        m_minor: ctx.m_minor(z)?,
        bias: exact_row_mean(&ctx.params.density, &g, ctx.params.d),
        envelope: bias_envelope(&ctx.params.density, &g, ctx.params.d),
    })
}

/// `v_q = k^q − l^q` for `q = 1..d`, `None` on `i64` overflow.
fn power_differences(k: u64, l: u64, d: usize) -> Option<Vec<i64>> {
    let (mut pk, mut pl) = (1i128, 1i128);
    let mut out = Vec::with_capacity(d);
    for _ in 0..d {
        pk = pk.checked_mul(k as i128)?;
        pl = pl.checked_mul(l as i128)?;
        out.push(i64::try_from(pk - pl).ok()?);
    }
    Some(out)
}

/// `𝔼_i F_i = (1/N) Σ_{k≠l} G_{kl} Π_q ρ̂(k^q − l^q)` (indices `k, l = 1..N`).
pub fn exact_row_mean(density: &DensitySpec, g: &GreenMatrix, d: usize) -> Complex64 {
    let n = g.n();
    if density.amplitude() == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    let mut terms = Vec::new();
    for k in 0..n {
        for l in 0..n {
            if k == l {
                continue;
            }
            // the raised cosine has coefficients only at |a| ≤ 1, and
            // |k − l| ≥ 1 forces |k^q − l^q| ≥ 2 for q ≥ 2 unless d = 1
            let Some(v) = power_differences(k as u64 + 1, l as u64 + 1, d) else { continue };
            let mut coef = Complex64::new(1.0, 0.0);
            for &a in &v {
                coef *= char_coefficient(density, a).value;
                if coef == Complex64::new(0.0, 0.0) {
                    break;
                }
            }
            if coef != Complex64::new(0.0, 0.0) {
                terms.push(g.g[(k, l)] * coef);
            }
        }
    }
    pairwise_sum(&terms) / n as f64
}

/// `(1/N) Σ_{k≠l} |G_{kl}| f(v)` with `f` the weight function at `C′ = ‖ρ′‖_∞/(2π)`.
pub fn bias_envelope(density: &DensitySpec, g: &GreenMatrix, d: usize) -> f64 {
    let n = g.n();
    let c_prime = density.fourier_constant();
    let mut terms = Vec::with_capacity(n * n);
    for k in 0..n {
        for l in 0..n {
            if k == l {
                continue;
            }
            let f = match power_differences(k as u64 + 1, l as u64 + 1, d) {
                Some(v) => weight_f(&v, c_prime),
                None => 0.0,
            };
            terms.push(g.g[(k, l)].norm() * f);
        }
    }
    pairwise_sum_real(&terms) / n as f64
}

/// `f(v) = Π_q (1_{v_q=0} + C′/|v_q|·1_{v_q≠0})`.
pub fn weight_f(v: &[i64], c_prime: f64) -> f64 {
    v.iter()
        .map(|&x| if x == 0 { 1.0 } else { c_prime / (x.unsigned_abs() as f64) })
        .product()
}

/// `Σ_{|v_q| ≤ M} f(v)` over the box `[−M, M]^d`, which factorizes as
/// `(1 + 2C′ H_M)^d` with `H_M` the harmonic number, summed directly.
pub fn weight_f_sum(range: u64, d: usize, c_prime: f64) -> f64 {
    let mut h = 0.0;
    for m in (1..=range).rev() {
        h += 1.0 / m as f64;
    }
    (1.0 + 2.0 * c_prime * h).powi(d as i32)
}

#[derive(Clone, Debug, Serialize)]
pub struct MomentEstimate {
    pub p: u32,
    /// `|mean F^{2p}|`
    pub estimate: f64,
    pub stderr: Option<f64>,
    /// `mean |F|^{2p}`, for diagnostics.
    pub mean_abs: f64,
    /// `(N^{−1/36−ε}/Im z)^{2p}`
    pub reference_bound: f64,
    pub replicas: usize,
}

/// Moment statistics from explicit samples of `F_i`.
pub fn moment_from_samples(samples: &[Complex64], p: u32, n: usize, eta: f64, eps: f64) -> Result<MomentEstimate> {
    if p == 0 || 2 * p > MAX_MC_MOMENT {
        return Err(Error::InvalidParameter(format!("2p must lie in [2, {MAX_MC_MOMENT}], got {}", 2 * p)));
    }
    let powers: Vec<Complex64> = samples.iter().map(|f| f.powu(2 * p)).collect();
    let mean = complex_mean(&powers);
    let abs: Vec<f64> = samples.iter().map(|f| f.norm().powi(2 * p as i32)).collect();
    let bound = ((n as f64).powf(-1.0 / 36.0 - eps) / eta).powi(2 * p as i32);
    Ok(MomentEstimate {
        p,
        estimate: mean.mean.norm(),
        stderr: mean.stderr,
        mean_abs: pairwise_sum_real(&abs) / samples.len() as f64,
        reference_bound: bound,
        replicas: samples.len(),
    })
}

/// Samples of `F_i(z)` over replica streams of row `i`, minor fixed.
pub fn fluctuation_samples(ctx: &FluctuationContext, z: Complex64, start: u64, replicas: u64) -> Result<Vec<Complex64>> {
    require_upper_half(z)?;
    let g = ctx.green(z)?;
    replica_range(start, replicas)?
        .collect::<Vec<_>>()
        .par_iter()
        .map(|&r| ctx.row_omegas(r).map(|w| fluctuation(&g, &w)))
        .collect()
}

pub fn moment_mc(ctx: &FluctuationContext, z: Complex64, p: u32, start: u64, replicas: u64, eps: f64) -> Result<MomentEstimate> {
    if p == 0 || 2 * p > MAX_MC_MOMENT {
        return Err(Error::InvalidParameter(format!("2p must lie in [2, {MAX_MC_MOMENT}], got {}", 2 * p)));
    }
    let samples = fluctuation_samples(ctx, z, start, replicas)?;
    moment_from_samples(&samples, p, ctx.n(), z.im, eps)
}

/// Per-row terms of the resolvent expansion at one `z`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct RowTerms {
    pub row: usize,
    pub m_minor: Complex64,
    pub f: Complex64,
    /// `[(XX* − z)^{-1}]_{ii}`
    pub schur_lhs: Complex64,
    /// `−1/(z + z m^{(i)} + z F_i)`
    pub schur_rhs: Complex64,
    /// `|m^{(i)} − m_N|`, controlled by interlacing.
    pub interlacing_part: f64,
    /// `|F_i|`
    pub fluctuation_part: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct SelfConsistency {
    pub z: Complex64,
    pub m_n: Complex64,
    /// `−(1/(Nz)) Σ_i (1 + m^{(i)} + F_i)^{-1}`
    pub rhs: Complex64,
    pub residual: f64,
    pub rows: Vec<RowTerms>,
}

impl SelfConsistency {
    pub fn max_schur_defect(&self) -> f64 {
        self.rows.iter().map(|r| (r.schur_lhs - r.schur_rhs).norm()).fold(0.0, f64::max)
    }
}

/// Resolvent expansion over all rows of one draw: minor Green's functions,
/// fluctuation terms, Schur identities and the self-consistent equation.
pub fn self_consistency(params: &EnsembleParams, z: Complex64) -> Result<SelfConsistency> {
    require_upper_half(z)?;
    let omegas = sample_omegas(params, 0, None)?;
    let x = build_matrix(params, &omegas)?;
    let diag = spectral::full_resolvent_diagonal(&x, z)?;
    let n = x.n();
    let m_n = pairwise_sum(&diag) / n as f64;
    let rows: Vec<RowTerms> = (0..n)
        .into_par_iter()
        .map(|i| {
            let g = green_minor(&minor(&x, i)?, z)?;
            let m_minor = g.normalized_trace();
            let f = fluctuation(&g, omegas.row(i));
            Ok(RowTerms {
                row: i,
                m_minor,
                f,
                schur_lhs: diag[i],
                schur_rhs: -(z + z * m_minor + z * f).inv(),
                interlacing_part: (m_minor - m_n).norm(),
                fluctuation_part: f.norm(),
            })
        })
        .collect::<Result<_>>()?;
    let inv: Vec<Complex64> = rows.iter().map(|r| (1.0 + r.m_minor + r.f).inv()).collect();
    let rhs = -pairwise_sum(&inv) / (n as f64 * z);
    Ok(SelfConsistency { z, m_n, rhs, residual: (m_n - rhs).norm(), rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::green_of_operator;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn diagonal_green_has_no_fluctuation() {
        let g = green_of_operator(&Mat::identity(5, 5), 0, c(0.3, 0.7)).unwrap();
        assert_eq!(fluctuation(&g, &[0.123, 0.77]), c(0.0, 0.0));
    }

    #[test]
    fn two_by_two_hand_expansion() {
        let a = Mat::from_fn(2, 2, |r, k| if r == k { c(0.6, 0.0) } else if r == 0 { c(0.2, 0.3) } else { c(0.2, -0.3) });
        let g = green_of_operator(&a, 0, c(1.1, 0.4)).unwrap();
        let omegas = [0.31, 0.07];
        let f = fluctuation(&g, &omegas);
        // φ_1 − φ_2 = Σ_q (1 − 2^q) ω_q
        let phi = (1.0 - 2.0) * omegas[0] + (1.0 - 4.0) * omegas[1];
        let e = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * phi);
        let hand = (g.g[(0, 1)] * e + g.g[(1, 0)] * e.conj()) / 2.0;
        assert!((f - hand).norm() < 1e-12);
    }

    #[test]
    fn quadratic_form_splits_into_trace_and_fluctuation() {
        let params = EnsembleParams::new(30, 2, 4);
        let ctx = FluctuationContext::new(&params, 5).unwrap();
        let z = c(1.8, 0.3);
        let g = ctx.green(z).unwrap();
        for r in [0, 3, 9] {
            let w = ctx.row_omegas(r).unwrap();
            let q = ctx.quadratic_form(&w, z);
            let split = ctx.m_minor(z).unwrap() + fluctuation(&g, &w);
            assert!((q - split).norm() < 1e-10);
        }
    }

    #[test]
    fn single_replica_is_flagged() {
        let params = EnsembleParams::new(10, 2, 1);
        let ctx = FluctuationContext::new(&params, 0).unwrap();
        let pe = partial_expectation_mc(&ctx, c(2.0, 0.5), 1, 1).unwrap();
        assert!(pe.degenerate && pe.mean.stderr.is_none());
        assert!(partial_expectation_mc(&ctx, c(2.0, 0.5), 1, 0).is_err());
    }

    #[test]
    fn uniform_partial_expectation_is_unbiased() {
        let params = EnsembleParams::new(30, 2, 11);
        let ctx = FluctuationContext::new(&params, 7).unwrap();
        let pe = partial_expectation_mc(&ctx, c(2.0, 0.5), 1, 4000).unwrap();
        assert_eq!(pe.bias, c(0.0, 0.0));
        assert!(pe.z_score().unwrap() <= 5.0);
    }

    #[test]
    fn raised_cosine_bias_only_for_linear_phase() {
        let params = EnsembleParams::new(12, 1, 2).with_density(DensitySpec::RaisedCosine { a: 0.8 });
        let ctx = FluctuationContext::new(&params, 3).unwrap();
        let g = ctx.green(c(1.0, 0.5)).unwrap();
        let bias = exact_row_mean(&params.density, &g, 1);
        let mut hand = c(0.0, 0.0);
        for k in 0..12 {
            for l in 0..12 {
                if (k as i64 - l as i64).abs() == 1 {
                    hand += g.g[(k, l)] * 0.4;
                }
            }
        }
        assert!((bias - hand / 12.0).norm() < 1e-14);
        assert!(bias.norm() <= bias_envelope(&params.density, &g, 1));
        assert_eq!(exact_row_mean(&params.density, &g, 2), c(0.0, 0.0));
    }

    #[test]
    fn weight_function_values() {
        assert_eq!(weight_f(&[0, 0], 1.0), 1.0);
        assert_eq!(weight_f(&[2], 1.0), 0.5);
        assert_eq!(weight_f(&[-2], 1.0), 0.5);
        assert!((weight_f(&[3, -4], 2.0) - (2.0 / 3.0) * 0.5).abs() < 1e-15);
        let brute: f64 = (-10i64..=10).flat_map(|a| (-10i64..=10).map(move |b| weight_f(&[a, b], 0.3))).sum();
        assert!((weight_f_sum(10, 2, 0.3) - brute).abs() < 1e-12);
    }

    #[test]
    fn constant_samples_give_exact_power() {
        let cst = c(0.3, -0.2);
        let samples = vec![cst; 64];
        let m = moment_from_samples(&samples, 2, 10, 0.5, 0.0).unwrap();
        assert!((m.estimate - cst.powu(4).norm()).abs() < 1e-16);
        assert!(m.stderr.unwrap() < 1e-15);
        assert!(moment_from_samples(&samples, 5, 10, 0.5, 0.0).is_err());
    }

    #[test]
    fn schur_and_self_consistency_on_a_draw() {
        let params = EnsembleParams::new(25, 2, 6);
        let sc = self_consistency(&params, c(1.0, 0.5)).unwrap();
        assert!(sc.max_schur_defect() <= 1e-8);
        assert!(sc.residual <= 1e-8);
    }

    #[test]
    fn one_by_one_schur_algebra() {
        let params = EnsembleParams::new(1, 1, 0);
        let z = c(0.4, 0.9);
        let sc = self_consistency(&params, z).unwrap();
        let row = sc.rows[0];
        assert!((row.m_minor + z.inv()).norm() < 1e-15);
        assert_eq!(row.f, c(0.0, 0.0));
        assert!((row.schur_lhs - (1.0 - z).inv()).norm() < 1e-15);
        assert!((row.schur_rhs - row.schur_lhs).norm() < 1e-15);
    }
}
