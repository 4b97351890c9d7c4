use num_rational::BigRational;
use phaselaw::locallaw::{beta_bookkeeping, choice_inputs, exponent_report, exponent_report_general, theta_params, AffineForm, ExponentReport};
use serde::Serialize;

use crate::config::ExperimentConfig;
use crate::error::CliError;
use crate::output::{f, Outputs, Table};

#[derive(Serialize)]
struct Form {
    theta: String,
    theta0: String,
    constant: String,
}

impl From<&AffineForm> for Form {
    fn from(a: &AffineForm) -> Self {
        Self { theta: a.theta.to_string(), theta0: a.theta0.to_string(), constant: a.constant.to_string() }
    }
}

#[derive(Serialize)]
struct Bookkeeping {
    s: Form,
    beta0: Form,
    union_exponent: Form,
    spacing_margin: Form,
    identity_holds: bool,
    union_negative: bool,
    spacing_positive: bool,
}

#[derive(Serialize)]
struct Summary {
    d_min: u32,
    d_max: u32,
    theta_prime: String,
    /// Every simplified-form report has a positive margin.
    all_simplified_verdicts: Option<bool>,
    all_general_verdicts: bool,
    failing_simplified: Vec<u32>,
    failing_general: Vec<u32>,
    beta_bookkeeping: Bookkeeping,
}

fn push(t: &mut Table, r: &ExponentReport) {
    let [x1, x2, x3, m] = r.values();
    t.row([
        r.inputs.d.to_string(),
        r.inputs.p.to_string(),
        r.d0.to_string(),
        if r.general { "general" } else { "simplified" }.to_string(),
        r.inputs.theta_prime.to_string(),
        r.inputs.r.to_string(),
        r.x1.to_string(),
        r.x2.to_string(),
        r.x3.to_string(),
        r.margin.to_string(),
        f(x1),
        f(x2),
        f(x3),
        f(m),
        r.verdict().to_string(),
    ]);
}

pub fn run(config: &ExperimentConfig) -> Result<Outputs, CliError> {
    let ec = &config.exponents;
    if ec.d_min == 0 || ec.d_min > ec.d_max {
        return Err(CliError::Usage("exponents: need 1 ≤ d_min ≤ d_max".into()));
    }
    let theta_prime: Option<BigRational> = match &ec.theta_prime {
        Some(s) => Some(s.trim().parse().map_err(|_| CliError::Usage(format!("exponents: theta_prime '{s}' is not a fraction")))?),
        None => None,
    };

    let mut theta = Table::new(&["d", "p", "theta0", "theta0_value", "beta0", "beta0_value", "positive"]);
    let mut reports = Table::new(&[
        "d", "p", "d0", "form", "theta_prime", "r", "x1", "x2", "x3", "margin", "x1_value", "x2_value", "x3_value", "margin_value", "verdict",
    ]);
    let (mut simplified_ok, mut any_simplified) = (true, false);
    let (mut failing_simplified, mut failing_general) = (Vec::new(), Vec::new());
    for d in ec.d_min..=ec.d_max {
        let tp = theta_params(d)?;
        theta.row([
            d.to_string(),
            tp.p.to_string(),
            tp.theta0.to_string(),
            f(tp.theta0_f64()),
            tp.beta0.to_string(),
            f(tp.beta0_f64()),
            tp.positive().to_string(),
        ]);
        let mut inputs = choice_inputs(d);
        if let Some(t) = &theta_prime {
            inputs.theta_prime = t.clone();
        }
        // the simplified form needs θ′ ≤ 1/3
        if let Ok(r) = exponent_report(&inputs) {
            any_simplified = true;
            if !r.verdict() {
                simplified_ok = false;
                failing_simplified.push(d);
            }
            push(&mut reports, &r);
        }
        let g = exponent_report_general(&inputs);
        if !g.verdict() {
            failing_general.push(d);
        }
        push(&mut reports, &g);
    }
    let bb = beta_bookkeeping();
    let mut out = Outputs::default();
    out.table("theta.csv", theta);
    out.table("exponents.csv", reports);
    out.json(
        "summary.json",
        &Summary {
            d_min: ec.d_min,
            d_max: ec.d_max,
            theta_prime: theta_prime.unwrap_or_else(|| choice_inputs(ec.d_min).theta_prime).to_string(),
            all_simplified_verdicts: any_simplified.then_some(simplified_ok),
            all_general_verdicts: failing_general.is_empty(),
            failing_simplified,
            failing_general,
            beta_bookkeeping: Bookkeeping {
                s: (&bb.s).into(),
                beta0: (&bb.beta0).into(),
                union_exponent: (&bb.union_exponent).into(),
                spacing_margin: (&bb.spacing_margin).into(),
                identity_holds: bb.identity_holds,
                union_negative: bb.union_negative,
                spacing_positive: bb.spacing_positive,
            },
        },
    );
    Ok(out)
}
