use phaselaw::diophantine::{
    compare_bad_sets, count_lv_convolution, count_lv_mitm, enumerate_lv, scaling_probe, write_solutions, BoundConstants, ScalingProbe,
    VinogradovSystem,
};
use phaselaw::fluctuations::FluctuationContext;
use phaselaw::C64;
use serde::Serialize;

use crate::config::ExperimentConfig;
use crate::error::CliError;
use crate::output::{f, Outputs, Table};

#[derive(Serialize)]
struct Counts {
    #[serde(rename = "N")]
    n: u64,
    d: u32,
    p: u32,
    v: Vec<String>,
    off_diagonal: bool,
    /// Size of the written solution list, when enumerated.
    enumerated: Option<usize>,
    /// Meet-in-the-middle count under the same off-diagonal flag.
    mitm: String,
    /// Convolution count of the full solution set (diagonal pairs allowed).
    convolution_full: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    strata_total: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    scaling: Option<ScalingProbe>,
}

pub fn run(config: &ExperimentConfig) -> Result<Outputs, CliError> {
    let dc = &config.diophantine;
    let v: Vec<i128> = match &dc.v {
        Some(v) => v.iter().map(|&x| x as i128).collect(),
        None => vec![0; dc.d as usize],
    };
    let sys = VinogradovSystem::new(dc.n, dc.d, dc.p, v)?;
    let cap = dc.cap as u128;
    let mitm = count_lv_mitm(&sys, dc.off_diagonal, cap)?;
    let full = count_lv_convolution(&sys)?;

    let mut out = Outputs::default();
    let mut enumerated = None;
    let mut strata_total = None;
    if dc.enumerate || dc.strata.is_some() {
        let set = enumerate_lv(&sys, dc.off_diagonal, cap)?;
        if set.len() as u128 != mitm {
            return Err(CliError::Infra(format!("enumeration found {} solutions, meet-in-the-middle count is {mitm}", set.len())));
        }
        if let Some(sb) = &dc.strata {
            let n = usize::try_from(dc.n).map_err(|_| CliError::Usage("N too large for a Green's function".into()))?;
            if sb.row >= n {
                return Err(CliError::Usage(format!("strata.row {} out of range for N={n}", sb.row)));
            }
            let params = phaselaw::EnsembleParams::new(n, config.ensemble.d, config.seeds[0]).with_density(config.ensemble.density);
            let ctx = FluctuationContext::new(&params, sb.row)?;
            let g = ctx.green(C64::new(sb.z[0], sb.z[1]))?;
            let strata = compare_bad_sets(&set, &g, sb.gamma, sb.theta, BoundConstants::default())?;
            let mut t = Table::new(&["r", "size", "size_a", "size_b", "thm_bad_rhs", "casea_rhs", "caseb_rhs", "within_thm"]);
            let opt = |x: Option<usize>| x.map(|v| v.to_string()).unwrap_or_default();
            for s in &strata {
                t.row([
                    s.r.to_string(),
                    s.size.to_string(),
                    opt(s.size_a),
                    opt(s.size_b),
                    f(s.bounds.thm_bad_rhs),
                    f(s.bounds.casea_rhs),
                    f(s.bounds.caseb_rhs),
                    s.within_thm.to_string(),
                ]);
            }
            out.table("strata.csv", t);
            strata_total = Some(strata.iter().map(|s| s.size).sum());
        }
        if dc.enumerate {
            let mut bytes = Vec::new();
            write_solutions(&set, &mut bytes)?;
            out.bytes("solutions.txt", bytes);
            enumerated = Some(set.len());
        }
    }
    let scaling = match &dc.scaling {
        Some(sb) => Some(scaling_probe(dc.d, dc.p, &sb.ns)?),
        None => None,
    };
    out.json(
        "counts.json",
        &Counts {
            n: dc.n,
            d: dc.d,
            p: dc.p,
            v: sys.v.iter().map(|x| x.to_string()).collect(),
            off_diagonal: dc.off_diagonal,
            enumerated,
            mitm: mitm.to_string(),
            convolution_full: full.to_string(),
            strata_total,
            scaling,
        },
    );
    Ok(out)
}
