use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Off-diagonal integer pairs `(k_α, l_α)`, `k_α ≠ l_α`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairList {
    pairs: Vec<(i64, i64)>,
}

impl PairList {
    pub fn new(pairs: Vec<(i64, i64)>) -> Result<Self> {
        if let Some(&(k, l)) = pairs.iter().find(|(k, l)| k == l) {
            return Err(Error::InvalidParameter(format!("pair ({k}, {l}) is diagonal")));
        }
        Ok(Self { pairs })
    }

    pub fn pairs(&self) -> &[(i64, i64)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

/// Either a small set `nu` meeting every pair (case A) or `s` pair indices
/// (0-based) whose `k`-set and `l`-set are disjoint (case B).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum DichotomyWitness {
    A { nu: BTreeSet<i64> },
    B { indices: Vec<usize> },
}

impl DichotomyWitness {
    pub fn validate(&self, pairs: &PairList, s: usize) -> Result<()> {
        match self {
            DichotomyWitness::A { nu } => {
                if nu.len() > 2 * s - 2 {
                    return Err(Error::InvalidSolution(format!("cover has {} elements, limit {}", nu.len(), 2 * s - 2)));
                }
                if let Some(&(k, l)) = pairs.pairs.iter().find(|(k, l)| !nu.contains(k) && !nu.contains(l)) {
                    return Err(Error::InvalidSolution(format!("pair ({k}, {l}) is not covered")));
                }
            }
            DichotomyWitness::B { indices } => {
                let distinct: BTreeSet<usize> = indices.iter().copied().collect();
                if indices.len() != s || distinct.len() != s || indices.iter().any(|&a| a >= pairs.len()) {
                    return Err(Error::InvalidSolution(format!("need {s} distinct pair indices, got {indices:?}")));
                }
                let ks: BTreeSet<i64> = indices.iter().map(|&a| pairs.pairs[a].0).collect();
                if indices.iter().any(|&a| ks.contains(&pairs.pairs[a].1)) {
                    return Err(Error::InvalidSolution("k-set and l-set intersect".into()));
                }
            }
        }
        Ok(())
    }

    pub fn is_case_a(&self) -> bool {
        matches!(self, DichotomyWitness::A { .. })
    }
}

/// Grow a disjoint family one pair at a time, taking the first admissible
/// index; when none is admissible the `k`'s and `l`'s collected so far cover
/// every pair. The witness is validated before it is returned.
pub fn dichotomy(pairs: &PairList, s: usize) -> Result<DichotomyWitness> {
    if s == 0 {
        return Err(Error::InvalidParameter("s must be at least 1".into()));
    }
    let mut chosen: Vec<usize> = Vec::with_capacity(s);
    let mut ks: BTreeSet<i64> = BTreeSet::new();
    let mut ls: BTreeSet<i64> = BTreeSet::new();
    let witness = loop {
        if chosen.len() == s {
            break DichotomyWitness::B { indices: chosen };
        }
        let next = (0..pairs.len()).find(|a| {
            let (k, l) = pairs.pairs[*a];
            !chosen.contains(a) && !ls.contains(&k) && !ks.contains(&l) && k != l
        });
        match next {
            Some(a) => {
                let (k, l) = pairs.pairs[a];
                ks.insert(k);
                ls.insert(l);
                chosen.push(a);
            }
            None => {
                let nu = ks.union(&ls).copied().collect();
                break DichotomyWitness::A { nu };
            }
        }
    };
    witness.validate(pairs, s)?;
    Ok(witness)
}
