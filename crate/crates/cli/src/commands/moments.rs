use phaselaw::fluctuations::{fluctuation_samples, moment_from_samples, partial_expectation_mc, FluctuationContext, MAX_MC_MOMENT};
use phaselaw::C64;
use serde::Serialize;

use super::per_seed;
use crate::config::ExperimentConfig;
use crate::error::CliError;
use crate::output::{f, opt_f, Outputs, Table};

#[derive(Serialize)]
struct Summary {
    n: usize,
    d: usize,
    row: usize,
    seeds: Vec<u64>,
    start: u64,
    estimates: usize,
    /// Partial-expectation rows more than five standard errors from the exact average.
    partial_outliers: usize,
}

pub fn run(config: &ExperimentConfig) -> Result<Outputs, CliError> {
    let mc = &config.moments;
    if mc.z.is_empty() || mc.p.is_empty() || mc.replicas.is_empty() {
        return Err(CliError::Usage("moments: z, p and replicas must be nonempty".into()));
    }
    if let Some(p) = mc.p.iter().find(|&&p| p == 0 || 2 * p > MAX_MC_MOMENT) {
        return Err(CliError::Usage(format!("moments: p = {p} outside [1, {}]", MAX_MC_MOMENT / 2)));
    }
    if mc.replicas.contains(&0) {
        return Err(CliError::Usage("moments: replica counts must be positive".into()));
    }
    if mc.row >= config.ensemble.n {
        return Err(CliError::Usage(format!("moments: row {} out of range for N={}", mc.row, config.ensemble.n)));
    }
    let zs: Vec<C64> = mc.z.iter().map(|&[e, eta]| C64::new(e, eta)).collect();
    let n = config.ensemble.n;

    let per = per_seed(&config.seeds, |seed| {
        let ctx = FluctuationContext::new(&config.params(seed), mc.row)?;
        let mut moments = Vec::new();
        let mut partial = Vec::new();
        for &z in &zs {
            for &reps in &mc.replicas {
                let samples = fluctuation_samples(&ctx, z, mc.start, reps)?;
                for &p in &mc.p {
                    moments.push((z, reps, moment_from_samples(&samples, p, n, z.im, mc.eps)?));
                }
                partial.push((z, reps, partial_expectation_mc(&ctx, z, mc.start, reps)?));
            }
        }
        Ok((seed, moments, partial))
    })?;

    let mut mt = Table::new(&["seed", "row", "e", "eta", "replicas", "p", "estimate", "stderr", "mean_abs", "bound"]);
    let mut pt = Table::new(&[
        "seed", "row", "e", "eta", "replicas", "mean_re", "mean_im", "stderr", "m_minor_re", "m_minor_im", "bias_re", "bias_im", "envelope",
        "z_score",
    ]);
    let (mut estimates, mut outliers) = (0, 0);
    for (seed, moments, partial) in &per {
        for (z, reps, m) in moments {
            mt.row([
                seed.to_string(),
                mc.row.to_string(),
                f(z.re),
                f(z.im),
                reps.to_string(),
                m.p.to_string(),
                f(m.estimate),
                opt_f(m.stderr),
                f(m.mean_abs),
                f(m.reference_bound),
            ]);
            estimates += 1;
        }
        for (z, reps, pe) in partial {
            let score = pe.z_score();
            outliers += score.is_some_and(|s| s > 5.0) as usize;
            pt.row([
                seed.to_string(),
                mc.row.to_string(),
                f(z.re),
                f(z.im),
                reps.to_string(),
                f(pe.mean.mean.re),
                f(pe.mean.mean.im),
                opt_f(pe.mean.stderr),
                f(pe.m_minor.re),
                f(pe.m_minor.im),
                f(pe.bias.re),
                f(pe.bias.im),
                f(pe.envelope),
                opt_f(score),
            ]);
        }
    }
    let mut out = Outputs::default();
    out.table("moments.csv", mt);
    out.table("partial.csv", pt);
    out.json(
        "summary.json",
        &Summary {
            n,
            d: config.ensemble.d,
            row: mc.row,
            seeds: config.seeds.clone(),
            start: mc.start,
            estimates,
            partial_outliers: outliers,
        },
    );
    Ok(out)
}
