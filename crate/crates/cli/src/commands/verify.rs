//! Exact-identity suite. Each check reports its worst residual against a
//! tolerance; exact combinatorial checks use a tolerance of zero.

use num_bigint::BigInt;
use num_rational::BigRational;
use phaselaw::diophantine::{
    count_lv_convolution_u128, count_lv_mitm, dichotomy, enumerate_lv, newton_girard, poly_from_elementary, poly_from_roots, power_sums,
    read_solutions, strata_counts, uniqueness_sweep, write_solutions, PairList, VinogradovSystem, DEFAULT_STATE_CAP,
};
use phaselaw::ensemble::{build_matrix, sample_omegas};
use phaselaw::fluctuations::{fluctuation, self_consistency, FluctuationContext};
use phaselaw::locallaw::{beta_bookkeeping, choice_inputs, exponent_report, theta_params};
use phaselaw::spectral::{check_operator_identity, green_minor, interlacing_check, minor, schur_diag, INTERLACING_CONSTANT};
use phaselaw::{EnsembleParams, Mat, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{CommandOutput, Fault};
use crate::config::ExperimentConfig;
use crate::error::CliError;
use crate::output::Outputs;

#[derive(Clone, Debug, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub residual: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub passed: bool,
    pub checks: Vec<CheckResult>,
}

fn check(name: &str, residual: f64, tolerance: f64, detail: String) -> CheckResult {
    CheckResult { name: name.to_string(), residual, tolerance, passed: residual <= tolerance, detail }
}

/// Spectral parameters used for the resolvent checks: bulk, near the soft
/// edge, small `η`, and outside the support.
const ZS: [(f64, f64); 4] = [(2.0, 0.1), (0.3, 0.02), (3.7, 0.5), (5.0, 0.05)];

fn draw(config: &ExperimentConfig, k: usize) -> Result<(EnsembleParams, phaselaw::OmegaTable, phaselaw::PhaseMatrix), CliError> {
    let vc = &config.verify;
    let params = EnsembleParams::new(vc.n, vc.d, config.seeds[0].wrapping_add(k as u64)).with_density(config.ensemble.density);
    let omegas = sample_omegas(&params, 0, None)?;
    let x = build_matrix(&params, &omegas)?;
    Ok((params, omegas, x))
}

fn max(xs: impl IntoIterator<Item = f64>) -> f64 {
    xs.into_iter().fold(0.0, f64::max)
}

fn ward(config: &ExperimentConfig, fault: Option<Fault>) -> Result<CheckResult, CliError> {
    let vc = &config.verify;
    let worst: Vec<f64> = (0..vc.draws)
        .into_par_iter()
        .map(|k| {
            let (params, _, _) = draw(config, k)?;
            let ctx = FluctuationContext::new(&params, k % vc.n)?;
            let mut w = 0.0_f64;
            for &(e, eta) in &ZS {
                let mut g = ctx.green(C64::new(e, eta))?;
                if fault == Some(Fault::Ward) {
                    g.g[(0, 0)] += C64::new(0.5, 0.0);
                }
                w = w.max(g.ward_row_defect()).max(g.ward_column_defect());
            }
            Ok(w)
        })
        .collect::<Result<_, CliError>>()?;
    let detail = format!("{} draws x {} z, N={}", vc.draws, ZS.len(), vc.n);
    Ok(check("ward", max(worst), config.tolerances.ward, detail))
}

fn operator(config: &ExperimentConfig, rng: &mut ChaCha8Rng) -> Result<CheckResult, CliError> {
    let count = config.verify.rect_matrices;
    let mut worst = 0.0_f64;
    for _ in 0..count {
        let (m, n) = (rng.random_range(1..25), rng.random_range(1..25));
        let a = Mat::from_fn(m, n, |_, _| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
        let z = C64::new(rng.random_range(-1.0..6.0), rng.random_range(0.05..2.0));
        worst = worst.max(check_operator_identity(&a, z)?);
    }
    Ok(check("operator_identity", worst, config.tolerances.operator, format!("{count} random rectangular matrices")))
}

fn schur(config: &ExperimentConfig, rng: &mut ChaCha8Rng) -> Result<CheckResult, CliError> {
    let vc = &config.verify;
    let triples: Vec<(usize, usize, C64)> = (0..vc.schur_triples)
        .map(|t| (t % vc.draws.max(1), rng.random_range(0..vc.n), C64::new(rng.random_range(0.3..3.7), rng.random_range(0.01..1.0))))
        .collect();
    let defects: Vec<f64> = triples
        .par_iter()
        .map(|&(k, i, z)| {
            let (_, omegas, x) = draw(config, k)?;
            let g = green_minor(&minor(&x, i)?, z)?;
            let s = schur_diag(&x, i, z, fluctuation(&g, omegas.row(i)), g.normalized_trace())?;
            Ok(s.defect() / s.lhs.norm())
        })
        .collect::<Result<_, CliError>>()?;
    Ok(check("schur", max(defects), config.tolerances.schur, format!("{} (draw, row, z) triples", triples.len())))
}

fn interlacing(config: &ExperimentConfig) -> Result<CheckResult, CliError> {
    let vc = &config.verify;
    let reports: Vec<(usize, f64)> = (0..vc.draws)
        .into_par_iter()
        .map(|k| {
            let (_, _, x) = draw(config, k)?;
            let r = interlacing_check(&x, (7 * k) % vc.n, C64::new(2.0, 0.1), INTERLACING_CONSTANT)?;
            Ok((r.violations, r.worst_violation))
        })
        .collect::<Result<_, CliError>>()?;
    let violations: usize = reports.iter().map(|r| r.0).sum();
    let worst = max(reports.iter().map(|r| r.1));
    let mut c = check("interlacing", worst, config.tolerances.interlacing, format!("{violations} violations over {} draws", vc.draws));
    c.passed &= violations == 0;
    Ok(c)
}

fn self_consistent(config: &ExperimentConfig) -> Result<CheckResult, CliError> {
    let vc = &config.verify;
    let mut worst = 0.0_f64;
    for k in 0..vc.draws.min(2) {
        let (params, _, _) = draw(config, k)?;
        for &(e, eta) in &ZS[..2] {
            let sc = self_consistency(&params, C64::new(e, eta))?;
            worst = worst.max(sc.residual / sc.m_n.norm()).max(sc.max_schur_defect() / sc.m_n.norm());
        }
    }
    Ok(check("self_consistency", worst, config.tolerances.self_consistency, "relative residual of the exact self-consistent equation".into()))
}

fn exact(name: &str, failures: u64, detail: String) -> CheckResult {
    check(name, failures as f64, 0.0, detail)
}

fn newton(config: &ExperimentConfig, rng: &mut ChaCha8Rng) -> Result<CheckResult, CliError> {
    let count = config.verify.newton_multisets;
    let mut failures = 0;
    for _ in 0..count {
        let len = rng.random_range(1..=10);
        let roots: Vec<i64> = (0..len).map(|_| rng.random_range(-50..=50)).collect();
        let e = newton_girard(&power_sums(&roots, len))?;
        let rebuilt = poly_from_elementary(&e);
        let direct: Vec<BigRational> = poly_from_roots(&roots).into_iter().map(BigRational::from_integer).collect();
        failures += (rebuilt != direct) as u64;
    }
    Ok(exact("newton_girard", failures, format!("{count} random integer multisets")))
}

fn uniqueness(config: &ExperimentConfig) -> Result<Vec<CheckResult>, CliError> {
    config
        .verify
        .uniqueness
        .iter()
        .map(|&[n, m]| {
            let s = uniqueness_sweep(n as usize, m as i64)?;
            let detail = format!("{} hypothesis pairs, {} certificate mismatches", s.hypothesis_pairs, s.certificate_mismatches);
            Ok(exact(&format!("uniqueness_n{n}_max{m}"), s.counterexamples + s.certificate_mismatches, detail))
        })
        .collect()
}

fn dichotomy_fuzz(config: &ExperimentConfig, rng: &mut ChaCha8Rng) -> CheckResult {
    let count = config.verify.dichotomy_lists;
    let (mut failures, mut case_a) = (0u64, 0u64);
    for _ in 0..count {
        let len = rng.random_range(0..=12);
        let range = rng.random_range(2..=12i64);
        let pairs: Vec<(i64, i64)> = (0..len)
            .map(|_| {
                let k = rng.random_range(1..=range);
                let mut l = rng.random_range(1..range);
                if l >= k {
                    l += 1;
                }
                (k, l)
            })
            .collect();
        let list = PairList::new(pairs).expect("pairs are off-diagonal");
        let s = rng.random_range(1..=4);
        match dichotomy(&list, s) {
            Ok(w) => {
                case_a += w.is_case_a() as u64;
                failures += w.validate(&list, s).is_err() as u64;
            }
            Err(_) => failures += 1,
        }
    }
    exact("dichotomy", failures, format!("{count} random pair lists, {case_a} in case A"))
}

fn diophantine(config: &ExperimentConfig) -> Result<Vec<CheckResult>, CliError> {
    let [n, d, p] = config.verify.dio;
    let sys = VinogradovSystem::homogeneous(n as u64, d, p)?;
    let full = enumerate_lv(&sys, false, DEFAULT_STATE_CAP)?;
    let conv = count_lv_convolution_u128(&sys)?;
    let mitm = count_lv_mitm(&sys, false, DEFAULT_STATE_CAP)?;
    let counts_ok = full.len() as u128 == conv && mitm == conv;
    let mut bytes = Vec::new();
    write_solutions(&full, &mut bytes)?;
    let back = read_solutions(bytes.as_slice())?;
    let round_trip_failures = back.violations() as u64 + (back.sorted_tuples() != full.sorted_tuples()) as u64;

    let params = EnsembleParams::new(n as usize, config.verify.d, config.seeds[0]);
    let g = FluctuationContext::new(&params, 0)?.green(C64::new(2.0, 0.1))?;
    let strata = strata_counts(&full, &g, 0.3)?;
    let total: usize = strata.iter().sum();
    Ok(vec![
        exact(
            "dio_counts",
            (!counts_ok) as u64,
            format!("N={n} d={d} p={p}: enumerated {}, convolution {conv}, meet-in-the-middle {mitm}", full.len()),
        ),
        exact("dio_read_back", round_trip_failures, format!("{} records re-verified", back.len())),
        exact("dio_strata", (total != full.len()) as u64, format!("strata {strata:?} sum to {total}")),
    ])
}

fn parameters() -> Result<CheckResult, CliError> {
    let mut failures = 0u64;
    let rat = |a: i64, b: i64| BigRational::new(BigInt::from(a), BigInt::from(b));
    failures += (theta_params(18)?.theta0 != rat(1, 756)) as u64;
    failures += (theta_params(32)?.theta0 != rat(1, 81)) as u64;
    for d in 18..=60 {
        failures += !exponent_report(&choice_inputs(d))?.verdict() as u64;
    }
    failures += !beta_bookkeeping().verified() as u64;
    Ok(exact("parameters", failures, "theta0(18), theta0(32), exponent margins for d in [18, 60], beta0 bookkeeping".into()))
}

pub fn run(config: &ExperimentConfig, fault: Option<Fault>) -> Result<CommandOutput, CliError> {
    let vc = &config.verify;
    if vc.n == 0 || vc.d == 0 || vc.draws == 0 {
        return Err(CliError::Usage("verify: n, d and draws must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seeds[0]);
    let mut checks = vec![ward(config, fault)?, operator(config, &mut rng)?, schur(config, &mut rng)?, interlacing(config)?, self_consistent(config)?];
    checks.push(newton(config, &mut rng)?);
    checks.extend(uniqueness(config)?);
    checks.push(dichotomy_fuzz(config, &mut rng));
    checks.extend(diophantine(config)?);
    checks.push(parameters()?);

    let report: Vec<String> = checks
        .iter()
        .map(|c| {
            format!(
                "{} {} residual={:e} tol={:e} ({})",
                if c.passed { "PASS" } else { "FAIL" },
                c.name,
                c.residual,
                c.tolerance,
                c.detail
            )
        })
        .collect();
    let failed: Vec<&str> = checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
    let failure = (!failed.is_empty()).then(|| format!("exact checks failed: {}", failed.join(", ")));
    let mut outputs = Outputs::default();
    outputs.json("verify.json", &VerifyReport { passed: failure.is_none(), checks });
    Ok(CommandOutput { outputs, report, failure })
}
