use std::collections::HashMap;

use num_bigint::BigUint;
use serde::Serialize;

use super::enumerate::DEFAULT_STATE_CAP;
use super::system::{checked_add, power_vector, VinogradovSystem};
use crate::{Error, Result};

/// Distribution of `Σ_{α=1}^{m} (k_α, k_α², …, k_α^d)` over `[N]^m`: the
/// `m`-fold convolution of the single-index distribution. Each convolution
/// step costs `|support|·N` updates; a step above `cap` is refused.
pub fn convolution_distribution(n: u64, d: u32, m: usize, cap: u128) -> Result<HashMap<Vec<i128>, u128>> {
    // the largest partial sum is m·N^d; checking it up front bounds every key
    let top = power_vector(n, d)?;
    top.iter()
        .try_for_each(|&x| x.checked_mul(m.max(1) as i128).map(|_| ()))
        .ok_or_else(|| Error::Overflow(format!("{m}·{n}^{d} exceeds 128 bits")))?;
    let mut dist: HashMap<Vec<i128>, u128> = HashMap::new();
    dist.insert(vec![0; d as usize], 1);
    if m == 0 {
        return Ok(dist);
    }
    if n as u128 > cap {
        return Err(Error::BudgetExceeded { states: n as u128, cap });
    }
    let single: Vec<Vec<i128>> = (1..=n).map(|k| power_vector(k, d)).collect::<Result<_>>()?;
    for _ in 0..m {
        let work = dist.len() as u128 * n as u128;
        if work > cap {
            return Err(Error::BudgetExceeded { states: work, cap });
        }
        let mut next: HashMap<Vec<i128>, u128> = HashMap::with_capacity(dist.len() * 2);
        for (key, &c) in &dist {
            for s in &single {
                let sum = key.iter().zip(s).map(|(a, b)| checked_add(*a, *b)).collect::<Result<Vec<_>>>()?;
                let slot = next.entry(sum).or_default();
                *slot = slot.checked_add(c).ok_or_else(|| Error::Overflow("convolution count exceeds 128 bits".into()))?;
            }
        }
        dist = next;
    }
    Ok(dist)
}

/// `|ℒ̃_v|` (no off-diagonal constraint) as `Σ_s P(s + v) P(s)` with `P` the
/// `2p`-fold convolution.
pub fn count_lv_convolution_u128(sys: &VinogradovSystem) -> Result<u128> {
    sys.validate()?;
    if sys.trivially_empty() {
        return Ok(0);
    }
    let dist = convolution_distribution(sys.n, sys.d, sys.width(), DEFAULT_STATE_CAP)?;
    count_from_distribution(&dist, &sys.v)
}

fn count_from_distribution(dist: &HashMap<Vec<i128>, u128>, v: &[i128]) -> Result<u128> {
    let mut keys: Vec<&Vec<i128>> = dist.keys().collect();
    keys.sort();
    let mut total: u128 = 0;
    for s in keys {
        let shifted = s.iter().zip(v).map(|(a, b)| checked_add(*a, *b)).collect::<Result<Vec<_>>>()?;
        if let Some(&c) = dist.get(&shifted) {
            total = c
                .checked_mul(dist[s])
                .and_then(|x| total.checked_add(x))
                .ok_or_else(|| Error::Overflow("solution count exceeds 128 bits".into()))?;
        }
    }
    Ok(total)
}

pub fn count_lv_convolution(sys: &VinogradovSystem) -> Result<BigUint> {
    count_lv_convolution_u128(sys).map(BigUint::from)
}

#[derive(Clone, Debug, Serialize)]
pub struct ScalingRow {
    pub n: u64,
    pub count: u128,
}

/// Growth of `|ℒ̃_0^{2p}|` in `N` against the exponents `2p` and
/// `4p − d(d+1)/2`.
#[derive(Clone, Debug, Serialize)]
pub struct ScalingProbe {
    pub d: u32,
    pub p: u32,
    pub rows: Vec<ScalingRow>,
    /// Least-squares slope of `log count` against `log N`.
    pub slope: f64,
    /// `4p < d(d+1)`: the diagonal term `N^{2p}` dominates.
    pub diagonal_regime: bool,
    pub diagonal_exponent: f64,
    pub off_diagonal_exponent: f64,
    /// `max` of the two exponents.
    pub expected_exponent: f64,
}

pub fn scaling_probe(d: u32, p: u32, ns: &[u64]) -> Result<ScalingProbe> {
    if ns.len() < 2 {
        return Err(Error::InvalidParameter("scaling probe needs at least two values of N".into()));
    }
    let mut rows = Vec::with_capacity(ns.len());
    for &n in ns {
        let sys = VinogradovSystem::homogeneous(n, d, p)?;
        rows.push(ScalingRow { n, count: count_lv_convolution_u128(&sys)? });
    }
    let xs: Vec<f64> = rows.iter().map(|r| (r.n as f64).ln()).collect();
    let ys: Vec<f64> = rows.iter().map(|r| (r.count as f64).ln()).collect();
    let slope = least_squares_slope(&xs, &ys);
    let two_p = 2.0 * p as f64;
    let off = 4.0 * p as f64 - (d * (d + 1)) as f64 / 2.0;
    Ok(ScalingProbe {
        d,
        p,
        rows,
        slope,
        diagonal_regime: 4 * p < d * (d + 1),
        diagonal_exponent: two_p,
        off_diagonal_exponent: off,
        expected_exponent: two_p.max(off),
    })
}

pub(crate) fn least_squares_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}
