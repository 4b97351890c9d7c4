use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::{Error, Result};

/// Elementary symmetric polynomials from power sums:
/// `e_k = (1/k) Σ_{j=1}^k (−1)^{j−1} e_{k−j} p_j`, `e_0 = 1`.
pub fn newton_girard(power_sums: &[BigRational]) -> Result<Vec<BigRational>> {
    if power_sums.is_empty() {
        return Err(Error::InvalidParameter("at least one power sum is required".into()));
    }
    let mut e: Vec<BigRational> = vec![BigRational::one()];
    for k in 1..=power_sums.len() {
        let mut acc = BigRational::zero();
        for j in 1..=k {
            let term = &e[k - j] * &power_sums[j - 1];
            if j % 2 == 1 {
                acc += term;
            } else {
                acc -= term;
            }
        }
        e.push(acc / BigRational::from_integer(BigInt::from(k)));
    }
    e.remove(0);
    Ok(e)
}

/// `p_q = Σ_i a_i^q` for `q = 1..m`.
pub fn power_sums(values: &[i64], m: usize) -> Vec<BigRational> {
    (1..=m as u32)
        .map(|q| {
            let s: BigInt = values.iter().map(|&a| BigInt::from(a).pow(q)).sum();
            BigRational::from_integer(s)
        })
        .collect()
}

/// Monic coefficients `[1, c_1, …, c_m]` (highest degree first) of
/// `x^m − e_1 x^{m−1} + e_2 x^{m−2} − …`.
pub fn poly_from_elementary(e: &[BigRational]) -> Vec<BigRational> {
    let mut out = vec![BigRational::one()];
    for (k, ek) in e.iter().enumerate() {
        out.push(if k % 2 == 0 { -ek.clone() } else { ek.clone() });
    }
    out
}

/// Coefficients of `Π (x − a_i)`, highest degree first.
pub fn poly_from_roots(roots: &[i64]) -> Vec<BigInt> {
    let mut coef = vec![BigInt::one()];
    for &a in roots {
        let mut next = vec![BigInt::zero(); coef.len() + 1];
        for (i, c) in coef.iter().enumerate() {
            next[i] += c;
            next[i + 1] -= c * BigInt::from(a);
        }
        coef = next;
    }
    coef
}

#[derive(Clone, Debug, Serialize)]
pub struct UniquenessOutcome {
    /// Disjointness within each list and equal signed power sums for `q ≤ 2n`.
    pub hypotheses: bool,
    /// `{i} = {i'}` and `{j} = {j'}` as multisets.
    pub conclusion: bool,
    /// Coefficients of `Π(x − i′_α)(x − j_α)` and `Π(x − i_α)(x − j′_α)` rebuilt from power sums.
    pub certificate: Option<(Vec<String>, Vec<String>)>,
    pub polynomials_equal: bool,
}

impl UniquenessOutcome {
    pub fn counterexample(&self) -> bool {
        self.hypotheses && !self.conclusion
    }
}

fn disjoint(p: &[(i64, i64)]) -> bool {
    p.iter().all(|&(_, j)| p.iter().all(|&(i, _)| i != j))
}

fn signed_power_sums(p: &[(i64, i64)], m: usize) -> Vec<BigInt> {
    (1..=m as u32)
        .map(|q| p.iter().map(|&(i, j)| BigInt::from(j).pow(q) - BigInt::from(i).pow(q)).sum())
        .collect()
}

fn sorted(mut v: Vec<i64>) -> Vec<i64> {
    v.sort_unstable();
    v
}

/// Check the two hypotheses for pair lists `(i_α, j_α)` and `(i′_α, j′_α)` of
/// equal length `n`, rebuild both root polynomials from power sums up to
/// order `2n` and compare the conclusion multisets.
pub fn uniqueness_check(p1: &[(i64, i64)], p2: &[(i64, i64)]) -> Result<UniquenessOutcome> {
    if p1.len() != p2.len() || p1.is_empty() {
        return Err(Error::InvalidParameter("pair lists must be nonempty and of equal length".into()));
    }
    let m = 2 * p1.len();
    let hypotheses = disjoint(p1) && disjoint(p2) && signed_power_sums(p1, m) == signed_power_sums(p2, m);
    let i1: Vec<i64> = p1.iter().map(|x| x.0).collect();
    let j1: Vec<i64> = p1.iter().map(|x| x.1).collect();
    let i2: Vec<i64> = p2.iter().map(|x| x.0).collect();
    let j2: Vec<i64> = p2.iter().map(|x| x.1).collect();
    let conclusion = sorted(i1.clone()) == sorted(i2.clone()) && sorted(j1.clone()) == sorted(j2.clone());

    let left: Vec<i64> = i2.iter().chain(&j1).copied().collect();
    let right: Vec<i64> = i1.iter().chain(&j2).copied().collect();
    let pl = poly_from_elementary(&newton_girard(&power_sums(&left, m))?);
    let pr = poly_from_elementary(&newton_girard(&power_sums(&right, m))?);
    let polynomials_equal = pl == pr;
    let fmt = |p: &[BigRational]| p.iter().map(|c| c.to_string()).collect::<Vec<_>>();
    Ok(UniquenessOutcome {
        hypotheses,
        conclusion,
        certificate: Some((fmt(&pl), fmt(&pr))),
        polynomials_equal,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct UniquenessSweep {
    pub n: usize,
    pub max_entry: i64,
    /// Pair lists with entries in `[1, max_entry]`.
    pub lists: u64,
    /// Ordered `(P1, P2)` combinations examined, `lists²`.
    pub combinations: u128,
    /// Combinations meeting both hypotheses.
    pub hypothesis_pairs: u64,
    pub counterexamples: u64,
    /// Hypothesis-satisfying combinations whose rebuilt polynomials differ.
    pub certificate_mismatches: u64,
}

/// Every ordered pair of length-`n` pair lists with entries in
/// `[1, max_entry]`. Lists are grouped by their signed power sums, so each
/// group contains exactly the partners that satisfy the power-sum
/// hypothesis; disjointness is checked per list.
pub fn uniqueness_sweep(n: usize, max_entry: i64) -> Result<UniquenessSweep> {
    if n == 0 || max_entry < 1 {
        return Err(Error::InvalidParameter("n and max_entry must be positive".into()));
    }
    let m = 2 * n;
    let entries = (max_entry as u64).pow(2 * n as u32);
    let mut groups: HashMap<Vec<BigInt>, Vec<Vec<(i64, i64)>>> = HashMap::new();
    for code in 0..entries {
        let mut c = code;
        let mut list = Vec::with_capacity(n);
        for _ in 0..n {
            let i = (c % max_entry as u64) as i64 + 1;
            c /= max_entry as u64;
            let j = (c % max_entry as u64) as i64 + 1;
            c /= max_entry as u64;
            list.push((i, j));
        }
        if disjoint(&list) {
            groups.entry(signed_power_sums(&list, m)).or_default().push(list);
        }
    }
    let mut sweep = UniquenessSweep {
        n,
        max_entry,
        lists: entries,
        combinations: (entries as u128) * (entries as u128),
        hypothesis_pairs: 0,
        counterexamples: 0,
        certificate_mismatches: 0,
    };
    let mut keys: Vec<&Vec<BigInt>> = groups.keys().collect();
    keys.sort();
    for key in keys {
        let group = &groups[key];
        for a in group {
            for b in group {
                let out = uniqueness_check(a, b)?;
                debug_assert!(out.hypotheses);
                sweep.hypothesis_pairs += 1;
                if out.counterexample() {
                    sweep.counterexamples += 1;
                }
                if !out.polynomials_equal {
                    sweep.certificate_mismatches += 1;
                }
            }
        }
    }
    Ok(sweep)
}
