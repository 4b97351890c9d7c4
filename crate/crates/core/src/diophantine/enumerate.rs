use std::collections::HashMap;

use rayon::prelude::*;
use serde::Serialize;

use super::system::{checked_add, checked_sub, VinogradovSystem};
use crate::{Error, Result};

/// Default cap on meet-in-the-middle half states.
pub const DEFAULT_STATE_CAP: u128 = 1_000_000_000;

/// Explicit solutions `(k_1..k_{2p}, l_1..l_{2p})` of a system, stored flat.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SolutionSet {
    pub system: VinogradovSystem,
    pub off_diagonal: bool,
    data: Vec<u32>,
}

impl SolutionSet {
    pub fn empty(system: VinogradovSystem, off_diagonal: bool) -> Self {
        Self { system, off_diagonal, data: Vec::new() }
    }

    fn stride(&self) -> usize {
        2 * self.system.width()
    }

    pub fn len(&self) -> usize {
        self.data.len() / self.stride()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    /// `k_1..k_{2p}, l_1..l_{2p}` of solution `idx`.
    pub fn tuple(&self, idx: usize) -> &[u32] {
        let s = self.stride();
        &self.data[idx * s..(idx + 1) * s]
    }

    pub fn iter(&self) -> impl Iterator<Item = &[u32]> {
        self.data.chunks_exact(self.stride())
    }

    /// `(k_α, l_α)` pairs of a stored tuple.
    pub fn pairs(&self, idx: usize) -> Vec<(u32, u32)> {
        let t = self.tuple(idx);
        let w = self.system.width();
        (0..w).map(|a| (t[a], t[w + a])).collect()
    }

    /// Verify `tuple` and append it.
    pub fn push(&mut self, tuple: &[u32]) -> Result<()> {
        self.verify(tuple)?;
        self.data.extend_from_slice(tuple);
        Ok(())
    }

    pub fn verify(&self, tuple: &[u32]) -> Result<()> {
        let w = self.system.width();
        if tuple.len() != 2 * w {
            return Err(Error::InvalidSolution(format!("tuple has length {}, expected {}", tuple.len(), 2 * w)));
        }
        let k: Vec<u64> = tuple[..w].iter().map(|&x| x as u64).collect();
        let l: Vec<u64> = tuple[w..].iter().map(|&x| x as u64).collect();
        if !self.system.satisfied_by(&k, &l)? {
            return Err(Error::InvalidSolution(format!("{tuple:?} does not solve the system")));
        }
        if self.off_diagonal && k.iter().zip(&l).any(|(a, b)| a == b) {
            return Err(Error::InvalidSolution(format!("{tuple:?} has k_α = l_α")));
        }
        Ok(())
    }

    /// Re-verify every stored tuple; returns the number of failures.
    pub fn violations(&self) -> usize {
        self.iter().filter(|t| self.verify(t).is_err()).count()
    }

    /// Keep tuples for which `keep` holds.
    pub(crate) fn filtered(&self, mut keep: impl FnMut(&[u32]) -> bool) -> SolutionSet {
        let mut data = Vec::new();
        for t in self.iter() {
            if keep(t) {
                data.extend_from_slice(t);
            }
        }
        SolutionSet { system: self.system.clone(), off_diagonal: self.off_diagonal, data }
    }

    /// Tuples sorted lexicographically, for set comparisons.
    pub fn sorted_tuples(&self) -> Vec<Vec<u32>> {
        let mut v: Vec<Vec<u32>> = self.iter().map(|t| t.to_vec()).collect();
        v.sort();
        v
    }
}

/// The `p` pairs of one half, each pair contributing `k^q − l^q`.
struct HalfSpace {
    pairs: Vec<(u32, u32)>,
    diffs: Vec<Vec<i128>>,
    p: usize,
    d: usize,
}

impl HalfSpace {
    fn new(sys: &VinogradovSystem, off_diagonal: bool, cap: u128) -> Result<Self> {
        let n = sys.n;
        if n > u32::MAX as u64 {
            return Err(Error::InvalidParameter(format!("N = {n} is too large to enumerate")));
        }
        let p = sys.p as usize;
        let pair_count = if off_diagonal { n as u128 * (n as u128 - 1) } else { n as u128 * n as u128 };
        let states = pair_count.checked_pow(p as u32).unwrap_or(u128::MAX);
        if states > cap {
            return Err(Error::BudgetExceeded { states, cap });
        }
        let mut pairs = Vec::new();
        let mut diffs = Vec::new();
        for k in 1..=n {
            let pk = sys.powers(k)?;
            for l in 1..=n {
                if off_diagonal && k == l {
                    continue;
                }
                let pl = sys.powers(l)?;
                let diff = pk.iter().zip(&pl).map(|(a, b)| checked_sub(*a, *b)).collect::<Result<Vec<_>>>()?;
                pairs.push((k as u32, l as u32));
                diffs.push(diff);
            }
        }
        Ok(Self { pairs, diffs, p, d: sys.d as usize })
    }

    fn states(&self) -> u64 {
        (self.pairs.len() as u64).pow(self.p as u32)
    }

    /// Pair indices of a state, most significant first.
    fn digits(&self, mut state: u64, out: &mut [usize]) {
        let m = self.pairs.len() as u64;
        for slot in out.iter_mut().rev() {
            *slot = (state % m) as usize;
            state /= m;
        }
    }

    fn key(&self, state: u64, scratch: &mut [usize]) -> Result<Vec<i128>> {
        self.digits(state, scratch);
        let mut key = vec![0i128; self.d];
        for &j in scratch.iter() {
            for (slot, &x) in key.iter_mut().zip(&self.diffs[j]) {
                *slot = checked_add(*slot, x)?;
            }
        }
        Ok(key)
    }

    /// States whose first pair has `k = k1`: a contiguous index range.
    fn shard(&self, k1: u32) -> std::ops::Range<u64> {
        let per_first = (self.pairs.len() as u64).pow(self.p as u32 - 1);
        let lo = self.pairs.partition_point(|&(k, _)| k < k1) as u64;
        let hi = self.pairs.partition_point(|&(k, _)| k <= k1) as u64;
        lo * per_first..hi * per_first
    }
}

fn key_difference(v: &[i128], key: &[i128]) -> Result<Vec<i128>> {
    v.iter().zip(key).map(|(a, b)| checked_sub(*a, *b)).collect()
}

/// All solutions, by meet in the middle on the power-sum vectors of the
/// first `p` and last `p` pairs. Shards by `k_1` run in parallel and are
/// concatenated in order, so the output order is deterministic.
pub fn enumerate_lv(sys: &VinogradovSystem, off_diagonal: bool, cap: u128) -> Result<SolutionSet> {
    sys.validate()?;
    let mut out = SolutionSet::empty(sys.clone(), off_diagonal);
    if sys.trivially_empty() {
        return Ok(out);
    }
    let half = HalfSpace::new(sys, off_diagonal, cap)?;
    if half.pairs.is_empty() {
        return Ok(out);
    }
    let mut by_key: HashMap<Vec<i128>, Vec<u64>> = HashMap::new();
    let mut scratch = vec![0usize; half.p];
    for s in 0..half.states() {
        by_key.entry(half.key(s, &mut scratch)?).or_default().push(s);
    }
    let w = sys.width();
    let shards: Vec<Vec<u32>> = (1..=sys.n as u32)
        .into_par_iter()
        .map(|k1| {
            let mut local = Vec::new();
            let mut da = vec![0usize; half.p];
            let mut db = vec![0usize; half.p];
            for a in half.shard(k1) {
                let key = half.key(a, &mut da)?;
                let want = key_difference(&sys.v, &key)?;
                let Some(partners) = by_key.get(&want) else { continue };
                for &b in partners {
                    half.digits(b, &mut db);
                    let start = local.len();
                    local.resize(start + 2 * w, 0);
                    for (slot, &j) in da.iter().chain(db.iter()).enumerate() {
                        let (k, l) = half.pairs[j];
                        local[start + slot] = k;
                        local[start + w + slot] = l;
                    }
                }
            }
            Ok(local)
        })
        .collect::<Result<_>>()?;
    for shard in shards {
        for t in shard.chunks_exact(2 * w) {
            out.push(t)?;
        }
    }
    Ok(out)
}

/// `|ℒ_v|` without materializing the tuples: `Σ_a c(a)·c(v − a)` over the
/// half-sum distribution `c`.
pub fn count_lv_mitm(sys: &VinogradovSystem, off_diagonal: bool, cap: u128) -> Result<u128> {
    sys.validate()?;
    if sys.trivially_empty() {
        return Ok(0);
    }
    let half = HalfSpace::new(sys, off_diagonal, cap)?;
    if half.pairs.is_empty() {
        return Ok(0);
    }
    let mut counts: HashMap<Vec<i128>, u128> = HashMap::new();
    let mut scratch = vec![0usize; half.p];
    for s in 0..half.states() {
        *counts.entry(half.key(s, &mut scratch)?).or_default() += 1;
    }
    let mut keys: Vec<&Vec<i128>> = counts.keys().collect();
    keys.sort();
    let mut total: u128 = 0;
    for key in keys {
        let want = key_difference(&sys.v, key)?;
        if let Some(&c) = counts.get(&want) {
            total = counts[key]
                .checked_mul(c)
                .and_then(|x| total.checked_add(x))
                .ok_or_else(|| Error::Overflow("solution count exceeds 128 bits".into()))?;
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_point_range_has_no_off_diagonal_solutions() {
        let sys = VinogradovSystem::homogeneous(1, 1, 1).unwrap();
        assert!(enumerate_lv(&sys, true, DEFAULT_STATE_CAP).unwrap().is_empty());
        assert_eq!(count_lv_mitm(&sys, true, DEFAULT_STATE_CAP).unwrap(), 0);
    }

    #[test]
    fn two_point_examples() {
        let sys = VinogradovSystem::homogeneous(2, 1, 1).unwrap();
        let set = enumerate_lv(&sys, true, DEFAULT_STATE_CAP).unwrap();
        assert_eq!(set.sorted_tuples(), vec![vec![1, 2, 2, 1], vec![2, 1, 1, 2]]);
        let sys = VinogradovSystem::new(2, 1, 1, vec![1]).unwrap();
        assert!(enumerate_lv(&sys, true, DEFAULT_STATE_CAP).unwrap().is_empty());
        let sys = VinogradovSystem::homogeneous(2, 1, 1).unwrap();
        assert_eq!(enumerate_lv(&sys, false, DEFAULT_STATE_CAP).unwrap().len(), 6);
    }

    #[test]
    fn budget_refusal_reports_state_count() {
        let sys = VinogradovSystem::homogeneous(10, 2, 2).unwrap();
        match enumerate_lv(&sys, false, 1000) {
            Err(Error::BudgetExceeded { states, cap }) => {
                assert_eq!(states, 10_000);
                assert_eq!(cap, 1000);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn stored_tuples_reverify() {
        let sys = VinogradovSystem::new(5, 2, 2, vec![3, 15]).unwrap();
        let set = enumerate_lv(&sys, true, DEFAULT_STATE_CAP).unwrap();
        assert!(!set.is_empty());
        assert_eq!(set.violations(), 0);
        assert_eq!(set.len() as u128, count_lv_mitm(&sys, true, DEFAULT_STATE_CAP).unwrap());
        let mut bad = SolutionSet::empty(sys, true);
        assert!(bad.push(&[1, 1, 1, 1, 1, 1, 1, 1]).is_err());
    }
}
