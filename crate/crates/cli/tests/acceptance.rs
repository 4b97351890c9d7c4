//! Acceptance gate. Each criterion prints one PASS/FAIL line with the
//! measured quantities; the process fails if any criterion fails.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fs;
use std::process::Command;
use std::time::Instant;

use num_bigint::BigInt;
use num_rational::BigRational;
use phaselaw::diophantine::{
    count_lv_convolution_u128, count_lv_mitm, dichotomy, enumerate_lv, newton_girard, poly_from_elementary, poly_from_roots, power_sums,
    strata_counts, uniqueness_sweep, PairList, VinogradovSystem, DEFAULT_STATE_CAP,
};
use phaselaw::ensemble::{build_matrix, sample_omegas};
use phaselaw::fluctuations::{fluctuation, partial_expectation_mc, FluctuationContext};
use phaselaw::locallaw::{beta_bookkeeping, bulk_energy_grid, choice_inputs, deloc_scan, exponent_report, rigidity_scan, theta_params};
use phaselaw::mp::{bulk_grid, m_mp, m_sc, mp_quadratic_residual, rho_mp, sqrt_branch};
use phaselaw::spectral::{check_operator_identity, draw_spectrum, green_minor, interlacing_check, minor, schur_diag, stieltjes_mn, INTERLACING_CONSTANT};
use phaselaw::{EnsembleParams, Mat, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

type Criterion = (&'static str, fn() -> Verdict);

struct Verdict {
    passed: bool,
    detail: String,
}

fn verdict(passed: bool, detail: String) -> Verdict {
    Verdict { passed, detail }
}

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn criterion_1() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    // Ward, relative, on minors of draws up to N = 200
    let mut ward = 0.0_f64;
    for (k, &n) in [10usize, 50, 120, 200].iter().enumerate() {
        let ctx = FluctuationContext::new(&EnsembleParams::new(n, 3, k as u64), n / 3).unwrap();
        for z in [c(2.0, 0.1), c(0.3, 0.01), c(3.9, 0.5), c(6.0, 0.05)] {
            let g = ctx.green(z).unwrap();
            ward = ward.max(g.ward_row_defect()).max(g.ward_column_defect());
        }
    }
    let mut operator = 0.0_f64;
    for _ in 0..100 {
        let (m, n) = (rng.random_range(1..40), rng.random_range(1..40));
        let a = Mat::from_fn(m, n, |_, _| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
        let z = c(rng.random_range(-1.0..6.0), rng.random_range(0.05..2.0));
        operator = operator.max(check_operator_identity(&a, z).unwrap());
    }
    let triples: Vec<(usize, u64, usize, C64)> = (0..50)
        .map(|t| {
            let n = rng.random_range(2..=200);
            (n, t as u64, rng.random_range(0..n), c(rng.random_range(0.3..3.7), rng.random_range(0.01..1.0)))
        })
        .collect();
    let schur = triples
        .par_iter()
        .map(|&(n, seed, i, z)| {
            let params = EnsembleParams::new(n, 3, seed);
            let omegas = sample_omegas(&params, 0, None).unwrap();
            let x = build_matrix(&params, &omegas).unwrap();
            let g = green_minor(&minor(&x, i).unwrap(), z).unwrap();
            let s = schur_diag(&x, i, z, fluctuation(&g, omegas.row(i)), g.normalized_trace()).unwrap();
            s.defect() / s.lhs.norm()
        })
        .reduce(|| 0.0, f64::max);
    let mut violations = 0;
    for (seed, &n) in [2usize, 17, 64, 150, 200].iter().enumerate() {
        let params = EnsembleParams::new(n, 3, seed as u64);
        let x = build_matrix(&params, &sample_omegas(&params, 0, None).unwrap()).unwrap();
        violations += interlacing_check(&x, n / 2, c(2.0, 0.05), INTERLACING_CONSTANT).unwrap().violations;
    }
    verdict(
        ward <= 1e-8 && operator <= 1e-10 && schur <= 1e-8 && violations == 0,
        format!("ward {ward:.2e} ≤ 1e-8, operator {operator:.2e} ≤ 1e-10, schur {schur:.2e} ≤ 1e-8, interlacing violations {violations}"),
    )
}

/// Tanh-sinh over `[a, b]`; the integrand gets the distances to both ends.
fn tanh_sinh(a: f64, b: f64, level: i32, f: impl Fn(f64, f64, f64) -> C64) -> C64 {
    let h = 2f64.powi(-level);
    let half = 0.5 * (b - a);
    let mut sum = c(0.0, 0.0);
    let kmax = (4.5 / h) as i64;
    for k in -kmax..=kmax {
        let u = FRAC_PI_2 * (k as f64 * h).sinh();
        let w = FRAC_PI_2 * (k as f64 * h).cosh() / u.cosh().powi(2);
        let da = 2.0 * half / (1.0 + (-2.0 * u).exp());
        let db = 2.0 * half / (1.0 + (2.0 * u).exp());
        if da > 0.0 && db > 0.0 && w.is_finite() && w > 0.0 {
            sum += f(a + da, da, db) * w;
        }
    }
    sum * half * h
}

fn density(da: f64, db: f64) -> f64 {
    (db / da).sqrt() / (2.0 * PI)
}

fn m_quadrature(z: C64) -> C64 {
    let g = |x: f64| (c(x, 0.0) - z).inv();
    if z.re <= 0.0 || z.re >= 4.0 {
        return tanh_sinh(0.0, 4.0, 9, |x, da, db| g(x) * density(da, db));
    }
    let e = z.re;
    tanh_sinh(0.0, e, 10, |x, da, _| g(x) * density(da, 4.0 - x)) + tanh_sinh(e, 4.0, 10, |x, _, db| g(x) * density(x, db))
}

fn criterion_2() -> Verdict {
    let grid = bulk_grid(0.1, 2.0, 0.01, 40, 25);
    let residual = grid.iter().map(|&z| mp_quadratic_residual(m_mp(z).unwrap(), z)).fold(0.0, f64::max);
    let probes: Vec<C64> = grid.iter().step_by(37).copied().chain([c(-1.0, 0.3), c(5.0, 0.1), c(2.0, 0.05)]).collect();
    let quad = probes.iter().map(|&z| (m_mp(z).unwrap() - m_quadrature(z)).norm()).fold(0.0, f64::max);
    let sc = grid
        .iter()
        .map(|&z| {
            let w = sqrt_branch(z).unwrap();
            (m_mp(z).unwrap() - m_sc(w).unwrap() / w).norm()
        })
        .fold(0.0, f64::max);
    let mass = (tanh_sinh(0.0, 4.0, 7, |_, da, db| c(density(da, db), 0.0)).re - 1.0).abs();
    let edge = (rho_mp(2.0) - 1.0 / (2.0 * PI)).abs();
    verdict(
        grid.len() == 1000 && residual <= 1e-12 && quad <= 1e-8 && sc <= 1e-10 && mass <= 1e-10 && edge <= 1e-12,
        format!(
            "quadratic residual {residual:.2e} on {} points, quadrature {quad:.2e}, semicircle {sc:.2e}, mass {mass:.2e}, ρ(2) {edge:.2e}",
            grid.len()
        ),
    )
}

fn criterion_3() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut systems = Vec::new();
    for n in 1..=12u64 {
        for d in 1..=3u32 {
            for p in 1..=2u32 {
                let w = 2 * p as usize;
                for j in 0..50 {
                    // half the right-hand sides come from a random tuple, so they are attained
                    let tuple: Vec<(i128, i128)> = (0..w).map(|_| (rng.random_range(1..=n) as i128, rng.random_range(1..=n) as i128)).collect();
                    let v: Vec<i128> = (1..=d)
                        .map(|q| {
                            if j % 2 == 0 {
                                tuple.iter().map(|&(k, l)| k.pow(q) - l.pow(q)).sum()
                            } else {
                                let b = w as i128 * ((n as i128).pow(q) - 1);
                                rng.random_range(-b..=b)
                            }
                        })
                        .collect();
                    systems.push(VinogradovSystem::new(n, d, p, v).unwrap());
                }
            }
        }
    }
    let (mismatches, empty): (usize, usize) = systems
        .par_iter()
        .map(|sys| {
            let conv = count_lv_convolution_u128(sys).unwrap();
            let mitm = count_lv_mitm(sys, false, DEFAULT_STATE_CAP).unwrap();
            let listed = if conv <= 200_000 { enumerate_lv(sys, false, DEFAULT_STATE_CAP).unwrap().len() as u128 } else { mitm };
            ((conv != mitm || conv != listed) as usize, (conv == 0) as usize)
        })
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
    let l2 = enumerate_lv(&VinogradovSystem::homogeneous(2, 1, 1).unwrap(), true, DEFAULT_STATE_CAP).unwrap().len();

    let mut partition_failures = 0;
    for (n, d, p, off) in [(6u64, 2u32, 1u32, true), (5, 2, 2, false), (7, 3, 1, true), (4, 1, 2, true)] {
        let set = enumerate_lv(&VinogradovSystem::homogeneous(n, d, p).unwrap(), off, DEFAULT_STATE_CAP).unwrap();
        let g = FluctuationContext::new(&EnsembleParams::new(n as usize, 3, 7), 0).unwrap().green(c(2.0, 0.1)).unwrap();
        for gamma in [0.0, 0.3, 1.0, 3.0] {
            partition_failures += (strata_counts(&set, &g, gamma).unwrap().iter().sum::<usize>() != set.len()) as usize;
        }
    }
    verdict(
        mismatches == 0 && l2 == 2 && partition_failures == 0,
        format!(
            "{} systems ({empty} with no solutions), {mismatches} count mismatches; |L_0^2| = {l2} at N=2, d=1; strata partition failures {partition_failures}",
            systems.len()
        ),
    )
}

fn criterion_4() -> Verdict {
    let s1 = uniqueness_sweep(1, 5).unwrap();
    let s2 = uniqueness_sweep(2, 6).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut round_trip_failures = 0;
    for _ in 0..1000 {
        let len = rng.random_range(1..=12);
        let roots: Vec<i64> = (0..len).map(|_| rng.random_range(-100..=100)).collect();
        let rebuilt = poly_from_elementary(&newton_girard(&power_sums(&roots, len)).unwrap());
        let direct: Vec<BigRational> = poly_from_roots(&roots).into_iter().map(BigRational::from_integer).collect();
        round_trip_failures += (rebuilt != direct) as usize;
    }
    let counter = s1.counterexamples + s2.counterexamples;
    verdict(
        counter == 0 && round_trip_failures == 0,
        format!(
            "counterexamples {counter} over {} + {} hypothesis pairs (n=1 ≤5, n=2 ≤6); Newton–Girard round-trip failures {round_trip_failures}/1000",
            s1.hypothesis_pairs, s2.hypothesis_pairs
        ),
    )
}

fn criterion_5() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (mut failures, mut case_a) = (0, 0);
    for _ in 0..10_000 {
        let len = rng.random_range(0..=16);
        let range = rng.random_range(2..=20i64);
        let pairs: Vec<(i64, i64)> = (0..len)
            .map(|_| {
                let k = rng.random_range(1..=range);
                let l = rng.random_range(1..range);
                (k, if l >= k { l + 1 } else { l })
            })
            .collect();
        let list = PairList::new(pairs).unwrap();
        let s = rng.random_range(1..=5);
        match dichotomy(&list, s) {
            Ok(w) => {
                case_a += w.is_case_a() as usize;
                failures += w.validate(&list, s).is_err() as usize;
            }
            Err(_) => failures += 1,
        }
    }
    verdict(failures == 0, format!("10000 pair lists, {failures} invalid witnesses ({case_a} case A, {} case B)", 10_000 - case_a))
}

fn criterion_6() -> Verdict {
    let rat = |a: i64, b: i64| BigRational::new(BigInt::from(a), BigInt::from(b));
    let t18 = theta_params(18).unwrap().theta0;
    let t32 = theta_params(32).unwrap().theta0;
    let failing: Vec<u32> = (18..=60).filter(|&d| !exponent_report(&choice_inputs(d)).unwrap().verdict()).collect();
    let bb = beta_bookkeeping();
    verdict(
        t18 == rat(1, 756) && t32 == rat(1, 81) && failing.is_empty() && bb.verified(),
        format!(
            "θ₀(18) = {t18}, θ₀(32) = {t32}, margins negative for d in [18, 60] except {failing:?}, 2s+1−β₀ = θ−θ₀ identity {} and negative {}",
            bb.identity_holds, bb.union_negative
        ),
    )
}

fn strictly_decreasing(xs: &[f64]) -> bool {
    xs.windows(2).all(|w| w[1] < w[0])
}

fn criterion_7() -> Verdict {
    let ns = [250usize, 500, 1000, 2000];
    let z = c(2.0, 0.2);
    let energies = bulk_energy_grid(0.5, 64);
    let (mut err, mut gap, mut weight) = (Vec::new(), Vec::new(), Vec::new());
    for &n in &ns {
        let per_seed: Vec<(f64, f64, f64)> = (1..=10u64)
            .into_par_iter()
            .map(|seed| {
                let decomp = draw_spectrum(&EnsembleParams::new(n, 3, seed), true).unwrap();
                let e = (stieltjes_mn(&decomp, z).unwrap() - m_mp(z).unwrap()).norm();
                let g = rigidity_scan(&decomp, &energies).sup_gap;
                let w = deloc_scan(&decomp, 0.5, 0.05, 0).unwrap().bulk_max;
                (e, g, w)
            })
            .collect();
        err.push(per_seed.iter().map(|r| r.0).sum::<f64>() / 10.0);
        gap.push(per_seed.iter().map(|r| r.1).sum::<f64>() / 10.0);
        weight.push(per_seed.iter().map(|r| r.2).sum::<f64>() / 10.0);
    }
    let ctx = FluctuationContext::new(&EnsembleParams::new(250, 3, 1), 0).unwrap();
    let pe = partial_expectation_mc(&ctx, z, 1, 20_000).unwrap();
    let score = pe.z_score().unwrap_or(f64::INFINITY);
    let fmt = |xs: &[f64]| xs.iter().map(|x| format!("{x:.3e}")).collect::<Vec<_>>().join(" > ");
    verdict(
        strictly_decreasing(&err) && strictly_decreasing(&gap) && strictly_decreasing(&weight) && score <= 5.0,
        format!(
            "N = {ns:?}: mean |m_N − m_MP| {}; sup gap {}; bulk max weight {}; partial expectation {score:.2} stderr from m_N^(i)",
            fmt(&err),
            fmt(&gap),
            fmt(&weight)
        ),
    )
}

fn criterion_8() -> Verdict {
    let tmp = tempfile::TempDir::new().unwrap();
    let config = tmp.path().join("config.toml");
    fs::write(
        &config,
        "seeds = [1, 2]\n[ensemble]\nn = 60\nd = 3\n[moments]\nreplicas = [200]\n[diophantine]\nn = 5\np = 1\n[diophantine.strata]\n[descent]\n",
    )
    .unwrap();
    let commands = ["spectrum", "locallaw", "rigidity", "deloc", "moments", "dio", "exponents", "verify"];
    let mut differing = Vec::new();
    let mut files = 0;
    for cmd in commands {
        let run = |tag: &str| {
            let out = tmp.path().join(format!("{cmd}-{tag}"));
            let status = Command::new(env!("CARGO_BIN_EXE_phaselaw"))
                .args([cmd, "--config", config.to_str().unwrap(), "--out", out.to_str().unwrap()])
                .env("SOURCE_DATE_EPOCH", "0")
                .output()
                .unwrap()
                .status;
            assert!(status.success(), "{cmd} exited with {status}");
            out
        };
        let (a, b) = (run("a"), run("b"));
        let mut names: Vec<String> = fs::read_dir(&a).unwrap().map(|e| e.unwrap().file_name().to_string_lossy().into_owned()).collect();
        names.sort();
        for name in names {
            files += 1;
            if fs::read(a.join(&name)).unwrap() != fs::read(b.join(&name)).unwrap() {
                differing.push(format!("{cmd}/{name}"));
            }
        }
    }
    verdict(differing.is_empty(), format!("{} commands, {files} files compared, differing: {differing:?}", commands.len()))
}

fn main() {
    phaselaw::pin_linear_algebra_to_one_thread();
    let criteria: [Criterion; 8] = [
        ("exact identities", criterion_1),
        ("MP reference", criterion_2),
        ("diophantine oracle equivalence", criterion_3),
        ("Newton–Girard and uniqueness", criterion_4),
        ("dichotomy totality", criterion_5),
        ("parameter arithmetic", criterion_6),
        ("statistical trends", criterion_7),
        ("determinism", criterion_8),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let v = run();
        failed += !v.passed as usize;
        println!(
            "{} criterion {} ({name}): {} [{:.1}s]",
            if v.passed { "PASS" } else { "FAIL" },
            k + 1,
            v.detail,
            start.elapsed().as_secs_f64()
        );
    }
    if failed > 0 {
        eprintln!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
