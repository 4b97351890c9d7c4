//! Experiment configuration. Every block has defaults, so an empty file is a
//! valid configuration; unknown keys are rejected everywhere.

use std::path::{Path, PathBuf};

use phaselaw::locallaw::LatticeOptions;
use phaselaw::{DensitySpec, EnsembleParams};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    pub seeds: Vec<u64>,
    /// Worker threads for the per-seed pool; 0 uses every core.
    pub parallel: usize,
    pub ensemble: EnsembleBlock,
    pub grid: GridBlock,
    pub spectrum: SpectrumBlock,
    pub rigidity: RigidityBlock,
    pub deloc: DelocBlock,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub descent: Option<DescentBlock>,
    pub moments: MomentsBlock,
    pub diophantine: DioBlock,
    pub exponents: ExponentsBlock,
    pub verify: VerifyBlock,
    pub tolerances: Tolerances,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            out: None,
            seeds: vec![1],
            parallel: 0,
            ensemble: EnsembleBlock::default(),
            grid: GridBlock::default(),
            spectrum: SpectrumBlock::default(),
            rigidity: RigidityBlock::default(),
            deloc: DelocBlock::default(),
            descent: None,
            moments: MomentsBlock::default(),
            diophantine: DioBlock::default(),
            exponents: ExponentsBlock::default(),
            verify: VerifyBlock::default(),
            tolerances: Tolerances::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EnsembleBlock {
    pub n: usize,
    pub d: usize,
    pub density: DensitySpec,
}

impl Default for EnsembleBlock {
    fn default() -> Self {
        Self { n: 200, d: 3, density: DensitySpec::Uniform }
    }
}

/// Spectral parameters for `locallaw`. Explicit `energies × etas` take
/// precedence over a lattice, which takes precedence over the bulk grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridBlock {
    pub kappa: f64,
    pub c_kappa: f64,
    pub eta_min: f64,
    pub n_e: usize,
    pub n_eta: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub energies: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub etas: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lattice: Option<LatticeBlock>,
    /// Exponent `θ₀` in the per-point bound `N^{−θ₀}/η`; defaults to the
    /// value for the ensemble's `d` (zero when that is not positive).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bound_exponent: Option<f64>,
}

impl Default for GridBlock {
    fn default() -> Self {
        Self { kappa: 0.5, c_kappa: 1.0, eta_min: 0.05, n_e: 16, n_eta: 4, energies: None, etas: None, lattice: None, bound_exponent: None }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LatticeBlock {
    /// `θ`; must lie in `(0, θ₀)` unless `allow_outside_window`.
    pub theta: f64,
    /// `d` used for `θ₀`; defaults to the ensemble's `d`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta_d: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s_override: Option<f64>,
    pub allow_outside_window: bool,
    pub max_points: usize,
}

impl Default for LatticeBlock {
    fn default() -> Self {
        let o = LatticeOptions::default();
        Self { theta: 0.0, theta_d: None, s_override: o.s_override, allow_outside_window: o.allow_outside_window, max_points: o.max_points }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpectrumBlock {
    /// Energies for the `F_N` table, evenly spaced in `(0, 4)`.
    pub n_energies: usize,
    /// `η` of the `m_N` curve.
    pub eta: f64,
    pub n_curve: usize,
}

impl Default for SpectrumBlock {
    fn default() -> Self {
        Self { n_energies: 64, eta: 0.1, n_curve: 64 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RigidityBlock {
    pub kappa: f64,
    pub n_energies: usize,
    /// Rows with `|F_N − F_MP| > c·N^{−θ}` are flagged.
    pub c: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
}

impl Default for RigidityBlock {
    fn default() -> Self {
        Self { kappa: 0.5, n_energies: 64, c: 1.0, theta: None }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DelocBlock {
    pub kappa: f64,
    pub eta: f64,
    pub surrogate_count: usize,
    /// Rows with `max_i |u_α(i)|² > c·N^{−θ}` are flagged.
    pub c: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
}

impl Default for DelocBlock {
    fn default() -> Self {
        Self { kappa: 0.5, eta: 0.05, surrogate_count: 16, c: 1.0, theta: None }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DescentBlock {
    pub e: f64,
    pub eta_start: f64,
    pub eta_end: f64,
    pub step: f64,
    pub c_prime: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta0: Option<f64>,
    pub theta: f64,
}

impl Default for DescentBlock {
    fn default() -> Self {
        Self { e: 2.0, eta_start: 0.5, eta_end: 0.05, step: 0.05, c_prime: 1.0, theta0: None, theta: 0.0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MomentsBlock {
    /// 0-based row whose phases are resampled.
    pub row: usize,
    /// Spectral parameters as `[E, η]`.
    pub z: Vec<[f64; 2]>,
    pub p: Vec<u32>,
    pub replicas: Vec<u64>,
    /// First replica stream; stream 0 is the base draw.
    pub start: u64,
    pub eps: f64,
}

impl Default for MomentsBlock {
    fn default() -> Self {
        Self { row: 0, z: vec![[2.0, 0.2]], p: vec![1, 2], replicas: vec![1000], start: 1, eps: 0.0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DioBlock {
    pub n: u64,
    pub d: u32,
    pub p: u32,
    /// Right-hand side; `None` is the homogeneous system.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub v: Option<Vec<i64>>,
    pub off_diagonal: bool,
    pub cap: u64,
    /// Write the explicit solution list (otherwise only counts).
    pub enumerate: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub strata: Option<StrataBlock>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scaling: Option<ScalingBlock>,
}

impl Default for DioBlock {
    fn default() -> Self {
        Self { n: 6, d: 2, p: 1, v: None, off_diagonal: true, cap: 100_000_000, enumerate: true, strata: None, scaling: None }
    }
}

/// Bad-set stratification against the minor Green's function of one draw
/// of size `N` (the system's range), at the first configured seed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StrataBlock {
    pub gamma: f64,
    pub theta: f64,
    pub z: [f64; 2],
    pub row: usize,
}

impl Default for StrataBlock {
    fn default() -> Self {
        Self { gamma: 0.3, theta: 0.0, z: [2.0, 0.1], row: 0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScalingBlock {
    pub ns: Vec<u64>,
}

impl Default for ScalingBlock {
    fn default() -> Self {
        Self { ns: vec![4, 6, 8, 12, 16] }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExponentsBlock {
    pub d_min: u32,
    pub d_max: u32,
    /// `θ′` as an exact fraction `"a/b"`; the choice value when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta_prime: Option<String>,
}

impl Default for ExponentsBlock {
    fn default() -> Self {
        Self { d_min: 18, d_max: 60, theta_prime: None }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifyBlock {
    pub n: usize,
    pub d: usize,
    pub draws: usize,
    pub rect_matrices: usize,
    pub schur_triples: usize,
    /// `(n, max_entry)` uniqueness sweeps.
    pub uniqueness: Vec<[u32; 2]>,
    pub dichotomy_lists: usize,
    pub newton_multisets: usize,
    /// `(N, d, p)` of the enumerate/convolution/read-back check.
    pub dio: [u32; 3],
}

impl Default for VerifyBlock {
    fn default() -> Self {
        Self {
            n: 60,
            d: 3,
            draws: 4,
            rect_matrices: 100,
            schur_triples: 50,
            uniqueness: vec![[1, 5], [2, 6]],
            dichotomy_lists: 10_000,
            newton_multisets: 1000,
            dio: [5, 2, 2],
        }
    }
}

/// Gates of the exact checks in `verify`. Each can be overridden by
/// `PHASELAW_TOL_<NAME>` in the environment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    pub ward: f64,
    pub operator: f64,
    pub schur: f64,
    pub interlacing: f64,
    pub self_consistency: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { ward: 1e-8, operator: 1e-10, schur: 1e-8, interlacing: 1e-9, self_consistency: 1e-9 }
    }
}

impl Tolerances {
    fn apply_env(&mut self) -> Result<(), CliError> {
        for (name, slot) in [
            ("WARD", &mut self.ward),
            ("OPERATOR", &mut self.operator),
            ("SCHUR", &mut self.schur),
            ("INTERLACING", &mut self.interlacing),
            ("SELF_CONSISTENCY", &mut self.self_consistency),
        ] {
            let key = format!("PHASELAW_TOL_{name}");
            if let Ok(v) = std::env::var(&key) {
                *slot = v.parse().map_err(|_| CliError::Usage(format!("{key}={v} is not a number")))?;
            }
        }
        Ok(())
    }
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Usage(format!("invalid configuration: {e}")))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration serializes")
    }

    /// Canonical JSON used for the manifest's configuration hash.
    pub fn canonical_json(&self) -> String {
        serde_json::to_string(self).expect("configuration serializes")
    }

    pub fn apply_env(&mut self) -> Result<(), CliError> {
        self.tolerances.apply_env()
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.seeds.is_empty() {
            return Err(CliError::Usage("seed list is empty".into()));
        }
        self.params(0).validate().map_err(|e| CliError::Usage(e.to_string()))?;
        Ok(())
    }

    pub fn params(&self, seed: u64) -> EnsembleParams {
        EnsembleParams::new(self.ensemble.n, self.ensemble.d, seed).with_density(self.ensemble.density)
    }
}

/// `"1,2,7..10"`: comma-separated seeds and half-open ranges.
pub fn parse_seeds(text: &str) -> Result<Vec<u64>, CliError> {
    let mut out = Vec::new();
    for part in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let bad = || CliError::Usage(format!("bad seed entry '{part}'"));
        if let Some((a, b)) = part.split_once("..") {
            let a: u64 = a.trim().parse().map_err(|_| bad())?;
            let b: u64 = b.trim().parse().map_err(|_| bad())?;
            out.extend(a..b);
        } else {
            out.push(part.parse().map_err(|_| bad())?);
        }
    }
    Ok(out)
}
