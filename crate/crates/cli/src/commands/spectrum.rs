use phaselaw::mp::{f_mp, m_mp};
use phaselaw::spectral::{counting_function, draw_spectrum, stieltjes_mn};
use phaselaw::C64;
use serde::Serialize;

use super::per_seed;
use crate::config::ExperimentConfig;
use crate::error::CliError;
use crate::output::{f, Outputs, Table};

#[derive(Serialize)]
struct SeedStats {
    seed: u64,
    min_eigenvalue: f64,
    max_eigenvalue: f64,
    mean_eigenvalue: f64,
}

#[derive(Serialize)]
struct Summary {
    n: usize,
    d: usize,
    seeds: Vec<SeedStats>,
}

/// Evenly spaced energies strictly inside `(0, 4)`.
pub(crate) fn energies(count: usize) -> Vec<f64> {
    (0..count).map(|a| 4.0 * (a as f64 + 0.5) / count as f64).collect()
}

pub fn run(config: &ExperimentConfig) -> Result<Outputs, CliError> {
    let sc = &config.spectrum;
    if sc.eta.is_nan() || sc.eta <= 0.0 {
        return Err(CliError::Usage("spectrum.eta must be positive".into()));
    }
    let es = energies(sc.n_energies);
    let curve: Vec<C64> = energies(sc.n_curve).into_iter().map(|e| C64::new(e, sc.eta)).collect();
    let refs: Vec<C64> = curve.iter().map(|&z| m_mp(z)).collect::<Result<_, _>>()?;
    let draws = per_seed(&config.seeds, |seed| {
        let decomp = draw_spectrum(&config.params(seed), false)?;
        let m: Vec<C64> = curve.iter().map(|&z| stieltjes_mn(&decomp, z)).collect::<Result<_, _>>()?;
        Ok((seed, decomp, m))
    })?;

    let mut eig = Table::new(&["seed", "index", "eigenvalue"]);
    let mut count = Table::new(&["seed", "e", "f_n", "f_mp"]);
    let mut stj = Table::new(&["seed", "e", "eta", "m_n_re", "m_n_im", "m_mp_re", "m_mp_im"]);
    let mut stats = Vec::new();
    for (seed, decomp, m) in &draws {
        let lam = decomp.eigenvalues();
        for (i, &l) in lam.iter().enumerate() {
            eig.row([seed.to_string(), i.to_string(), f(l)]);
        }
        for &e in &es {
            count.row([seed.to_string(), f(e), f(counting_function(decomp, e)), f(f_mp(e))]);
        }
        for ((z, mn), mr) in curve.iter().zip(m).zip(&refs) {
            stj.row([seed.to_string(), f(z.re), f(z.im), f(mn.re), f(mn.im), f(mr.re), f(mr.im)]);
        }
        stats.push(SeedStats {
            seed: *seed,
            min_eigenvalue: lam[0],
            max_eigenvalue: lam[lam.len() - 1],
            mean_eigenvalue: lam.iter().sum::<f64>() / lam.len() as f64,
        });
    }
    let mut out = Outputs::default();
    out.table("eigenvalues.csv", eig);
    out.table("counting.csv", count);
    out.table("stieltjes.csv", stj);
    out.json("summary.json", &Summary { n: config.ensemble.n, d: config.ensemble.d, seeds: stats });
    Ok(out)
}
