use phaselaw::locallaw::{
    bulk_energy_grid, deloc_scan, domain_lattice, envelope_constant, eta_ladder, lattice_continuity, locallaw_sweep,
    multiscale_descent, rigidity_scan, theta_params, ContinuityReport, DescentOptions, LatticeOptions,
};
use phaselaw::mp::bulk_grid;
use phaselaw::spectral::draw_spectrum;
use phaselaw::C64;
use serde::Serialize;

use super::{default_theta0, per_seed};
use crate::config::ExperimentConfig;
use crate::error::CliError;
use crate::output::{f, opt_f, Outputs, Table};

#[derive(Serialize)]
struct LatticeSummary {
    theta: f64,
    theta0: f64,
    s: f64,
    spacing: f64,
    initial_eta: f64,
    legal_window: bool,
    continuity: Vec<(u64, ContinuityReport)>,
}

#[derive(Serialize)]
struct DescentSummary {
    steps: usize,
    flags: usize,
    lipschitz_failures: usize,
}

#[derive(Serialize)]
struct LocallawSummary {
    n: usize,
    d: usize,
    seeds: Vec<u64>,
    points: usize,
    bound_exponent: f64,
    mean_sup_scaled_err: f64,
    max_sup_scaled_err: f64,
    mean_err: f64,
    envelope_constant: f64,
    flags: usize,
    sign_violations: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    lattice: Option<LatticeSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    descent: Option<DescentSummary>,
}

fn b(x: bool) -> String {
    x.to_string()
}

pub fn locallaw(config: &ExperimentConfig) -> Result<Outputs, CliError> {
    let g = &config.grid;
    let params = config.params(config.seeds[0]);
    let n = config.ensemble.n;
    let mut lattice = None;
    let zs: Vec<C64> = match (&g.energies, &g.etas, &g.lattice) {
        (Some(es), Some(etas), _) => es.iter().flat_map(|&e| etas.iter().map(move |&eta| C64::new(e, eta))).collect(),
        (None, None, Some(lb)) => {
            let d = lb.theta_d.unwrap_or(config.ensemble.d as u32);
            let tp = theta_params(d)?;
            let opts = LatticeOptions { s_override: lb.s_override, allow_outside_window: lb.allow_outside_window, max_points: lb.max_points };
            let grid = domain_lattice(&tp, g.kappa, g.c_kappa, n as u64, lb.theta, opts)?;
            let zs = grid.zs();
            lattice = Some(grid);
            zs
        }
        (None, None, None) => bulk_grid(g.kappa, g.c_kappa, g.eta_min, g.n_e, g.n_eta),
        _ => return Err(CliError::Usage("grid: give both energies and etas, or a lattice, or neither".into())),
    };
    if zs.is_empty() {
        return Err(CliError::Usage("grid has no points".into()));
    }
    let bound_exponent = g.bound_exponent.unwrap_or_else(|| default_theta0(config.ensemble.d));
    let sweep = locallaw_sweep(&params, &zs, &config.seeds, bound_exponent)?;

    let lattice_summary = match lattice {
        Some(grid) => {
            let continuity = per_seed(&config.seeds, |seed| {
                let decomp = draw_spectrum(&config.params(seed), false)?;
                Ok((seed, lattice_continuity(&grid, &decomp)?))
            })?;
            Some(LatticeSummary {
                theta: grid.theta,
                theta0: grid.theta0,
                s: grid.s,
                spacing: grid.spacing,
                initial_eta: grid.initial_eta,
                legal_window: grid.legal_window,
                continuity,
            })
        }
        None => None,
    };

    let mut out = Outputs::default();
    let mut descent_summary = None;
    if let Some(db) = &config.descent {
        let etas = eta_ladder(db.eta_start, db.eta_end, db.step)?;
        let opts = DescentOptions {
            theta0: db.theta0.unwrap_or(bound_exponent),
            c_prime: db.c_prime,
            theta: db.theta,
            inject_violation: None,
        };
        let table = multiscale_descent(&params, db.e, &etas, &config.seeds, opts)?;
        let mut t = Table::new(&[
            "seed", "step", "e", "eta", "m_n_re", "m_n_im", "m_mp_re", "m_mp_im", "err", "bound", "flag", "delta_m", "lipschitz_budget",
            "lipschitz_ok", "mvt_budget",
        ]);
        for r in &table.rows {
            t.row([
                r.seed.to_string(),
                r.step.to_string(),
                f(r.e),
                f(r.eta),
                f(r.m_n.re),
                f(r.m_n.im),
                f(r.m_mp.re),
                f(r.m_mp.im),
                f(r.err),
                f(r.bound),
                b(r.flag),
                f(r.delta_m),
                f(r.lipschitz_budget),
                b(r.lipschitz_ok),
                f(r.mvt_budget),
            ]);
        }
        out.table("descent.csv", t);
        descent_summary = Some(DescentSummary { steps: etas.len(), flags: table.flags, lipschitz_failures: table.lipschitz_failures });
    }

    let mut rows = Table::new(&["seed", "n", "d", "e", "eta", "m_n_re", "m_n_im", "m_mp_re", "m_mp_im", "err", "bound", "flag"]);
    for r in &sweep.rows {
        rows.row([
            r.seed.to_string(),
            r.n.to_string(),
            r.d.to_string(),
            f(r.e),
            f(r.eta),
            f(r.m_n.re),
            f(r.m_n.im),
            f(r.m_mp.re),
            f(r.m_mp.im),
            f(r.err),
            f(r.bound),
            b(r.flag),
        ]);
    }
    let mut seeds = Table::new(&["seed", "sup_scaled_err", "mean_err", "max_err", "flags", "sign_violations"]);
    for s in &sweep.seeds {
        seeds.row([s.seed.to_string(), f(s.sup_scaled_err), f(s.mean_err), f(s.max_err), s.flags.to_string(), s.sign_violations.to_string()]);
    }
    out.table("locallaw.csv", rows);
    out.table("seeds.csv", seeds);
    out.json(
        "summary.json",
        &LocallawSummary {
            n,
            d: config.ensemble.d,
            seeds: config.seeds.clone(),
            points: zs.len(),
            bound_exponent,
            mean_sup_scaled_err: sweep.mean_sup_scaled_err,
            max_sup_scaled_err: sweep.max_sup_scaled_err,
            mean_err: sweep.mean_err,
            envelope_constant: envelope_constant(&sweep.rows),
            flags: sweep.flags,
            sign_violations: sweep.sign_violations,
            lattice: lattice_summary,
            descent: descent_summary,
        },
    );
    Ok(out)
}

#[derive(Serialize)]
struct ScanSummary {
    n: usize,
    d: usize,
    seeds: Vec<u64>,
    theta: f64,
    threshold: f64,
    /// Mean over seeds of the per-seed statistic (sup gap or bulk max weight).
    mean_stat: f64,
    max_stat: f64,
    flags: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    surrogate_failures: Option<usize>,
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

pub fn rigidity(config: &ExperimentConfig) -> Result<Outputs, CliError> {
    let rc = &config.rigidity;
    let n = config.ensemble.n;
    let theta = rc.theta.unwrap_or_else(|| default_theta0(config.ensemble.d) / 2.0);
    let threshold = rc.c * (n as f64).powf(-theta);
    let energies = bulk_energy_grid(rc.kappa, rc.n_energies);
    let scans = per_seed(&config.seeds, |seed| {
        let decomp = draw_spectrum(&config.params(seed), false)?;
        Ok((seed, rigidity_scan(&decomp, &energies)))
    })?;
    let mut rows = Table::new(&["seed", "e", "f_n", "f_mp", "gap", "flag"]);
    let mut seeds = Table::new(&["seed", "sup_gap", "flags"]);
    let (mut sups, mut flags) = (Vec::new(), 0);
    for (seed, scan) in &scans {
        let mut seed_flags = 0;
        for r in &scan.rows {
            let flag = r.gap > threshold;
            seed_flags += flag as usize;
            rows.row([seed.to_string(), f(r.e), f(r.f_n), f(r.f_mp), f(r.gap), b(flag)]);
        }
        seeds.row([seed.to_string(), f(scan.sup_gap), seed_flags.to_string()]);
        sups.push(scan.sup_gap);
        flags += seed_flags;
    }
    let mut out = Outputs::default();
    out.table("rigidity.csv", rows);
    out.table("seeds.csv", seeds);
    out.json(
        "summary.json",
        &ScanSummary {
            n,
            d: config.ensemble.d,
            seeds: config.seeds.clone(),
            theta,
            threshold,
            mean_stat: mean(&sups),
            max_stat: sups.iter().copied().fold(0.0, f64::max),
            flags,
            surrogate_failures: None,
        },
    );
    Ok(out)
}

pub fn deloc(config: &ExperimentConfig) -> Result<Outputs, CliError> {
    let dc = &config.deloc;
    let n = config.ensemble.n;
    let theta = dc.theta.unwrap_or_else(|| default_theta0(config.ensemble.d));
    let threshold = dc.c * (n as f64).powf(-theta);
    let scans = per_seed(&config.seeds, |seed| {
        let decomp = draw_spectrum(&config.params(seed), true)?;
        Ok((seed, deloc_scan(&decomp, dc.kappa, dc.eta, dc.surrogate_count)?))
    })?;
    let mut rows = Table::new(&["seed", "alpha", "eigenvalue", "max_weight", "argmax", "surrogate", "flag"]);
    let mut seeds = Table::new(&["seed", "bulk_count", "bulk_max", "flags", "surrogate_failures"]);
    let (mut maxima, mut flags, mut failures) = (Vec::new(), 0, 0);
    for (seed, scan) in &scans {
        let mut seed_flags = 0;
        for r in &scan.rows {
            let flag = r.max_weight > threshold;
            seed_flags += flag as usize;
            rows.row([seed.to_string(), r.alpha.to_string(), f(r.eigenvalue), f(r.max_weight), r.argmax.to_string(), opt_f(r.surrogate), b(flag)]);
        }
        seeds.row([seed.to_string(), scan.rows.len().to_string(), f(scan.bulk_max), seed_flags.to_string(), scan.surrogate_failures.to_string()]);
        maxima.push(scan.bulk_max);
        flags += seed_flags;
        failures += scan.surrogate_failures;
    }
    let mut out = Outputs::default();
    out.table("deloc.csv", rows);
    out.table("seeds.csv", seeds);
    out.json(
        "summary.json",
        &ScanSummary {
            n,
            d: config.ensemble.d,
            seeds: config.seeds.clone(),
            theta,
            threshold,
            mean_stat: mean(&maxima),
            max_stat: maxima.iter().copied().fold(0.0, f64::max),
            flags,
            surrogate_failures: Some(failures),
        },
    );
    Ok(out)
}
