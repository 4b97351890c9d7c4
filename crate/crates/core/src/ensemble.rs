//! Reproducible phase tables and the exponential-phase matrix.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

use crate::phase::{self, pow_mod_2_128};
use crate::rng::CounterRng;
use crate::{Error, Mat, Result};

/// Density of the phase variables on the unit torus.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DensitySpec {
    #[default]
    Uniform,
    /// `ρ(ω) = 1 + a·cos(2πω)` with `0 ≤ a < 1`.
    RaisedCosine { a: f64 },
}

impl DensitySpec {
    pub fn validate(&self) -> Result<()> {
        match *self {
            DensitySpec::Uniform => Ok(()),
            DensitySpec::RaisedCosine { a } if (0.0..1.0).contains(&a) => Ok(()),
            DensitySpec::RaisedCosine { a } => Err(Error::SignedDensity(a)),
        }
    }

    pub fn amplitude(&self) -> f64 {
        match *self {
            DensitySpec::Uniform => 0.0,
            DensitySpec::RaisedCosine { a } => a,
        }
    }

    pub fn pdf(&self, x: f64) -> f64 {
        1.0 + self.amplitude() * (TAU * x).cos()
    }

    pub fn cdf(&self, x: f64) -> f64 {
        x + self.amplitude() / TAU * (TAU * x).sin()
    }

    /// `‖ρ′‖_∞ = 2πa`.
    pub fn derivative_sup(&self) -> f64 {
        TAU * self.amplitude()
    }

    /// Constant `C′ = ‖ρ′‖_∞ / (2π)` in `|ρ̂(a)| ≤ C′/|a|` (one integration by parts).
    pub fn fourier_constant(&self) -> f64 {
        self.derivative_sup() / TAU
    }

    /// Inverse CDF. Newton steps safeguarded by a bisection bracket.
    pub fn quantile(&self, u: f64) -> f64 {
        let a = self.amplitude();
        if a == 0.0 {
            return u;
        }
        const TOL: f64 = 1e-12;
        let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
        let mut x = u;
        for _ in 0..200 {
            let f = self.cdf(x) - u;
            if f == 0.0 {
                break;
            }
            if f > 0.0 {
                hi = x;
            } else {
                lo = x;
            }
            let df = self.pdf(x);
            let mut next = x - f / df;
            if !(next > lo && next < hi) {
                next = 0.5 * (lo + hi);
            }
            let step = (next - x).abs();
            x = next;
            if step <= TOL || hi - lo <= TOL {
                break;
            }
        }
        if x >= 1.0 {
            1.0 - f64::EPSILON / 2.0
        } else {
            x.max(0.0)
        }
    }
}

/// Full description of one matrix draw.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleParams {
    pub n: usize,
    pub d: usize,
    #[serde(default)]
    pub density: DensitySpec,
    pub seed: u64,
}

impl EnsembleParams {
    pub fn new(n: usize, d: usize, seed: u64) -> Self {
        Self { n, d, density: DensitySpec::Uniform, seed }
    }

    pub fn with_density(mut self, density: DensitySpec) -> Self {
        self.density = density;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.d == 0 {
            return Err(Error::InvalidParameter(format!(
                "N and d must be positive (N={}, d={})",
                self.n, self.d
            )));
        }
        self.density.validate()?;
        CounterRng::check_indices(self.n, self.d)
    }
}

/// Phases `ω_{j,q}`, stored row-major (`j` rows, `q` columns, both 0-based).
#[derive(Clone, Debug, PartialEq)]
pub struct OmegaTable {
    n: usize,
    d: usize,
    values: Vec<f64>,
    pub replica: u64,
    pub resampled_row: Option<usize>,
}

impl OmegaTable {
    /// Table from explicit values, `values[j*d + q]`.
    pub fn from_values(n: usize, d: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != n * d {
            return Err(Error::Dimension(format!("expected {} phases, got {}", n * d, values.len())));
        }
        if let Some(bad) = values.iter().find(|w| !(0.0..1.0).contains(*w)) {
            return Err(Error::InvalidParameter(format!("phase {bad} outside [0, 1)")));
        }
        Ok(Self { n, d, values, replica: 0, resampled_row: None })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn row(&self, j: usize) -> &[f64] {
        &self.values[j * self.d..(j + 1) * self.d]
    }

    pub fn get(&self, j: usize, q: usize) -> f64 {
        self.values[j * self.d + q]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

fn draw(rng: &CounterRng, density: &DensitySpec, j: usize, q: usize, replica: u64) -> f64 {
    density.quantile(rng.uniform(j as u32, q as u32, replica))
}

/// Phases of a single row `j` at stream `replica`.
pub fn sample_row(params: &EnsembleParams, j: usize, replica: u64) -> Result<Vec<f64>> {
    params.validate()?;
    if j >= params.n {
        return Err(Error::InvalidParameter(format!("row {j} out of range for N={}", params.n)));
    }
    let rng = CounterRng::new(params.seed);
    Ok((0..params.d).map(|q| draw(&rng, &params.density, j, q, replica)).collect())
}

/// Sample the phase table. With `row_override = Some(i)` only row `i` is
/// drawn from stream `replica`; every other row comes from stream 0.
pub fn sample_omegas(params: &EnsembleParams, replica: u64, row_override: Option<usize>) -> Result<OmegaTable> {
    params.validate()?;
    if let Some(i) = row_override {
        if i >= params.n {
            return Err(Error::InvalidParameter(format!("row {i} out of range for N={}", params.n)));
        }
    }
    let rng = CounterRng::new(params.seed);
    let mut values = Vec::with_capacity(params.n * params.d);
    for j in 0..params.n {
        let stream = match row_override {
            Some(i) if i != j => 0,
            _ => replica,
        };
        for q in 0..params.d {
            values.push(draw(&rng, &params.density, j, q, stream));
        }
    }
    Ok(OmegaTable { n: params.n, d: params.d, values, replica, resampled_row: row_override })
}

/// Replica stream indices `start..start+count`, rejecting `u64` overflow.
pub fn replica_range(start: u64, count: u64) -> Result<std::ops::Range<u64>> {
    match start.checked_add(count) {
        Some(end) => Ok(start..end),
        None => Err(Error::ReplicaOverflow { start, count }),
    }
}

/// `X_{jk} = N^{-1/2} e[Σ_q ω_{j,q} k^q]`, `k = 1..N`.
#[derive(Clone, Debug)]
pub struct PhaseMatrix {
    pub matrix: Mat<Complex64>,
}

impl PhaseMatrix {
    pub fn n(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn row(&self, j: usize) -> Vec<Complex64> {
        (0..self.matrix.ncols()).map(|k| self.matrix[(j, k)]).collect()
    }

    /// `max_j |Σ_k |X_{jk}|² − 1|`.
    pub fn row_norm_defect(&self) -> f64 {
        (0..self.matrix.nrows())
            .map(|j| {
                let s: f64 = (0..self.matrix.ncols()).map(|k| self.matrix[(j, k)].norm_sqr()).sum();
                (s - 1.0).abs()
            })
            .fold(0.0, f64::max)
    }
}

/// Build the matrix for a phase table. Row phases are reduced exactly modulo 1
/// before exponentiation (see [`crate::phase`]), so there is no large-argument
/// trigonometric error even when `N^d ≫ 2^53`.
pub fn build_matrix(params: &EnsembleParams, omegas: &OmegaTable) -> Result<PhaseMatrix> {
    params.validate()?;
    if omegas.n() != params.n || omegas.d() != params.d {
        return Err(Error::Dimension(format!(
            "phase table is {}x{}, parameters ask for {}x{}",
            omegas.n(),
            omegas.d(),
            params.n,
            params.d
        )));
    }
    let n = params.n;
    let d = params.d;
    let scale = 1.0 / (n as f64).sqrt();
    // k^q mod 2^128, shared across rows
    let powers: Vec<u128> = (1..=n as u64)
        .flat_map(|k| (1..=d as u32).map(move |q| pow_mod_2_128(k, q)))
        .collect();
    let mut matrix = Mat::<Complex64>::zeros(n, n);
    for j in 0..n {
        let row = omegas.row(j);
        for k in 0..n {
            let mut acc = 0.0;
            for (q, &w) in row.iter().enumerate() {
                acc += phase_term(w, powers[k * d + q], k as u64 + 1, q as u32 + 1);
            }
            matrix[(j, k)] = phase::unit_phase(acc - acc.floor()) * scale;
        }
    }
    Ok(PhaseMatrix { matrix })
}

#[inline]
fn phase_term(w: f64, k_mod: u128, k: u64, q: u32) -> f64 {
    if w >= 2f64.powi(-75) || w == 0.0 {
        // exponent ≤ 128: the precomputed residue is all that is needed
        crate::phase::frac_omega_pow_mod(w, k_mod)
    } else {
        crate::phase::frac_omega_pow(w, k, q)
    }
}

/// Characteristic coefficient `ρ̂(a) = ∫₀¹ e[aω] ρ(ω) dω` with its decay witness.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CharCoefficient {
    pub value: Complex64,
    /// `1_{a=0} + C′/|a|·1_{a≠0}` with `C′ = ‖ρ′‖_∞/(2π)`.
    pub bound: f64,
    pub c_prime: f64,
}

/// Closed form: uniform mass sits at `a = 0`; the raised cosine adds `a/2` at `|a| = 1`.
pub fn char_coefficient(density: &DensitySpec, a: i64) -> CharCoefficient {
    let c_prime = density.fourier_constant();
    let value = match a {
        0 => 1.0,
        1 | -1 => density.amplitude() / 2.0,
        _ => 0.0,
    };
    let bound = if a == 0 { 1.0 } else { c_prime / (a.unsigned_abs() as f64) };
    CharCoefficient { value: Complex64::new(value, 0.0), bound, c_prime }
}

/// Periodic trapezoid rule for `ρ̂(a)` on `points` nodes; exact for
/// trigonometric densities once `points > |a| + 1`.
pub fn char_coefficient_quadrature(density: &DensitySpec, a: i64, points: usize) -> Complex64 {
    let h = 1.0 / points as f64;
    let mut acc = Complex64::new(0.0, 0.0);
    for m in 0..points {
        let w = m as f64 * h;
        let frac = (a as f64 * w).rem_euclid(1.0);
        acc += phase::unit_phase(frac) * density.pdf(w);
    }
    acc * h
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_signed_density() {
        assert!(DensitySpec::RaisedCosine { a: 1.0 }.validate().is_err());
        assert!(DensitySpec::RaisedCosine { a: -0.1 }.validate().is_err());
        assert!(DensitySpec::RaisedCosine { a: 0.99 }.validate().is_ok());
        let p = EnsembleParams::new(4, 2, 1).with_density(DensitySpec::RaisedCosine { a: 1.5 });
        assert!(matches!(sample_omegas(&p, 0, None), Err(Error::SignedDensity(_))));
    }

    #[test]
    fn rejects_zero_dimensions_and_replica_overflow() {
        assert!(EnsembleParams::new(0, 1, 0).validate().is_err());
        assert!(EnsembleParams::new(1, 0, 0).validate().is_err());
        assert!(replica_range(u64::MAX - 1, 5).is_err());
        assert_eq!(replica_range(3, 2).unwrap(), 3..5);
    }

    #[test]
    fn raised_cosine_density_is_normalized() {
        let rho = DensitySpec::RaisedCosine { a: 0.7 };
        // midpoint rule is exact for this trigonometric polynomial
        let m = 4096;
        let total: f64 = (0..m).map(|k| rho.pdf((k as f64 + 0.5) / m as f64)).sum::<f64>() / m as f64;
        assert!((total - 1.0).abs() < 1e-12);
        assert!((0..m).all(|k| rho.pdf(k as f64 / m as f64) >= 0.0));
        assert!((rho.derivative_sup() - TAU * 0.7).abs() < 1e-15);
    }

    #[test]
    fn quantile_inverts_cdf() {
        let rho = DensitySpec::RaisedCosine { a: 0.9 };
        for k in 0..1000 {
            let u = k as f64 / 1000.0;
            let x = rho.quantile(u);
            assert!((rho.cdf(x) - u).abs() < 1e-12, "u={u}");
            assert!((0.0..1.0).contains(&x));
        }
    }

    #[test]
    fn zero_amplitude_matches_uniform_stream() {
        let p = EnsembleParams::new(6, 3, 42);
        let q = p.with_density(DensitySpec::RaisedCosine { a: 0.0 });
        let a = sample_omegas(&p, 0, None).unwrap();
        let b = sample_omegas(&q, 0, None).unwrap();
        assert_eq!(a.values(), b.values());
    }

    #[test]
    fn resampling_a_row_leaves_others_bitwise_equal() {
        let p = EnsembleParams::new(8, 3, 5);
        let base = sample_omegas(&p, 0, None).unwrap();
        let alt = sample_omegas(&p, 17, Some(4)).unwrap();
        for j in 0..8 {
            if j == 4 {
                assert_ne!(base.row(j), alt.row(j));
            } else {
                assert_eq!(base.row(j), alt.row(j));
            }
        }
        assert_eq!(alt.row(4), sample_row(&p, 4, 17).unwrap().as_slice());
    }

    #[test]
    fn one_by_one_zero_phase() {
        let p = EnsembleParams::new(1, 1, 0);
        let om = OmegaTable::from_values(1, 1, vec![0.0]).unwrap();
        let x = build_matrix(&p, &om).unwrap();
        assert_eq!(x.matrix[(0, 0)], Complex64::new(1.0, 0.0));
    }

    #[test]
    fn two_by_two_half_phases() {
        let p = EnsembleParams::new(2, 1, 0);
        let om = OmegaTable::from_values(2, 1, vec![0.5, 0.5]).unwrap();
        let x = build_matrix(&p, &om).unwrap();
        let s = 1.0 / 2f64.sqrt();
        for j in 0..2 {
            assert!((x.matrix[(j, 0)] - Complex64::new(-s, 0.0)).norm() < 1e-15);
            assert!((x.matrix[(j, 1)] - Complex64::new(s, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn entries_have_exact_modulus_and_unit_rows() {
        let p = EnsembleParams::new(64, 5, 11);
        let om = sample_omegas(&p, 0, None).unwrap();
        let x = build_matrix(&p, &om).unwrap();
        let target = 1.0 / 8.0;
        for j in 0..64 {
            for k in 0..64 {
                assert!((x.matrix[(j, k)].norm() - target).abs() <= 1e-14 * target);
            }
        }
        assert!(x.row_norm_defect() <= 1e-12);
    }

    #[test]
    fn char_coefficient_examples() {
        let u = DensitySpec::Uniform;
        assert_eq!(char_coefficient(&u, 3).value, Complex64::new(0.0, 0.0));
        assert_eq!(char_coefficient(&u, 0).value, Complex64::new(1.0, 0.0));
        let rc = DensitySpec::RaisedCosine { a: 0.5 };
        assert_eq!(char_coefficient(&rc, 0).value.re, 1.0);
        assert!((char_coefficient(&rc, 1).value.re - 0.25).abs() < 1e-15);
        for a in -20..=20 {
            let q = char_coefficient_quadrature(&rc, a, 64);
            assert!((q - char_coefficient(&rc, a).value).norm() < 1e-13, "a={a}");
        }
    }

    #[test]
    fn char_coefficient_decay_bound() {
        for rho in [DensitySpec::Uniform, DensitySpec::RaisedCosine { a: 0.3 }, DensitySpec::RaisedCosine { a: 0.95 }] {
            for a in -10_000i64..=10_000 {
                let c = char_coefficient(&rho, a);
                assert!(c.value.norm() <= c.bound + 1e-15, "{rho:?} a={a}");
            }
        }
    }
}
