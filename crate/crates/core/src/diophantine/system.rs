use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// `Σ_{α=1}^{2p} (k_α^q − l_α^q) = v_q` for `q = 1..d` with `k_α, l_α ∈ [1, N]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VinogradovSystem {
    pub n: u64,
    pub d: u32,
    pub p: u32,
    pub v: Vec<i128>,
}

impl VinogradovSystem {
    pub fn new(n: u64, d: u32, p: u32, v: Vec<i128>) -> Result<Self> {
        let sys = Self { n, d, p, v };
        sys.validate()?;
        Ok(sys)
    }

    /// The homogeneous system `v = 0`.
    pub fn homogeneous(n: u64, d: u32, p: u32) -> Result<Self> {
        Self::new(n, d, p, vec![0; d as usize])
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.d == 0 || self.p == 0 {
            return Err(Error::InvalidParameter("N, d and p must be at least 1".into()));
        }
        if self.v.len() != self.d as usize {
            return Err(Error::Dimension(format!("v has length {}, expected d = {}", self.v.len(), self.d)));
        }
        Ok(())
    }

    /// Tuple length `2p` on each side.
    pub fn width(&self) -> usize {
        2 * self.p as usize
    }

    /// `k^q` for `q = 1..d`.
    pub fn powers(&self, k: u64) -> Result<Vec<i128>> {
        power_vector(k, self.d)
    }

    /// True when some `|v_q| > 2p·(N^q − 1)`, so no tuple can solve the system.
    pub fn trivially_empty(&self) -> bool {
        let width = self.width() as i128;
        let mut pow: Option<i128> = Some(1);
        for &vq in &self.v {
            pow = pow.and_then(|x| x.checked_mul(self.n as i128));
            match pow.and_then(|x| (x - 1).checked_mul(width)) {
                Some(lim) if vq.checked_abs().is_none_or(|a| a > lim) => return true,
                _ => {}
            }
        }
        false
    }

    /// `Σ_α (k_α^q − l_α^q) − v_q == 0` for all `q`, in checked arithmetic.
    pub fn satisfied_by(&self, k: &[u64], l: &[u64]) -> Result<bool> {
        if k.len() != self.width() || l.len() != self.width() {
            return Err(Error::Dimension(format!("tuples must have length {}", self.width())));
        }
        if k.iter().chain(l).any(|&x| x == 0 || x > self.n) {
            return Ok(false);
        }
        let mut acc = vec![0i128; self.d as usize];
        for (&a, &b) in k.iter().zip(l) {
            let pa = self.powers(a)?;
            let pb = self.powers(b)?;
            for q in 0..acc.len() {
                acc[q] = checked_add(acc[q], checked_sub(pa[q], pb[q])?)?;
            }
        }
        Ok(acc == self.v)
    }
}

pub(crate) fn power_vector(k: u64, d: u32) -> Result<Vec<i128>> {
    let mut out = Vec::with_capacity(d as usize);
    let mut acc: i128 = 1;
    for q in 1..=d {
        acc = acc
            .checked_mul(k as i128)
            .ok_or_else(|| Error::Overflow(format!("{k}^{q} exceeds 128 bits")))?;
        out.push(acc);
    }
    Ok(out)
}

#[inline]
pub(crate) fn checked_add(a: i128, b: i128) -> Result<i128> {
    a.checked_add(b).ok_or_else(|| Error::Overflow("power sum exceeds 128 bits".into()))
}

#[inline]
pub(crate) fn checked_sub(a: i128, b: i128) -> Result<i128> {
    a.checked_sub(b).ok_or_else(|| Error::Overflow("power sum exceeds 128 bits".into()))
}
