use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::{Error, Result};

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn to_f64(x: &BigRational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// `p = ⌊17d/16⌋`, `θ₀ = (p/18 − 1)/(2p + 4)`, `β₀ = 4θ₀ + 1`, exactly.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ThetaParams {
    pub d: u32,
    pub p: u32,
    pub theta0: BigRational,
    pub beta0: BigRational,
}

impl ThetaParams {
    /// `θ₀ > 0`, i.e. the spectral domain is nonempty.
    pub fn positive(&self) -> bool {
        self.theta0.is_positive()
    }

    pub fn theta0_f64(&self) -> f64 {
        to_f64(&self.theta0)
    }

    pub fn beta0_f64(&self) -> f64 {
        to_f64(&self.beta0)
    }
}

impl Serialize for ThetaParams {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("ThetaParams", 7)?;
        st.serialize_field("d", &self.d)?;
        st.serialize_field("p", &self.p)?;
        st.serialize_field("theta0", &self.theta0.to_string())?;
        st.serialize_field("theta0_value", &self.theta0_f64())?;
        st.serialize_field("beta0", &self.beta0.to_string())?;
        st.serialize_field("beta0_value", &self.beta0_f64())?;
        st.serialize_field("positive", &self.positive())?;
        st.end()
    }
}

pub fn theta_params(d: u32) -> Result<ThetaParams> {
    if d == 0 {
        return Err(Error::InvalidParameter("d must be at least 1".into()));
    }
    let p = 17 * d / 16;
    let theta0 = (rat(p as i64, 18) - BigRational::one()) / BigRational::from_integer(BigInt::from(2 * p as i64 + 4));
    let beta0 = &theta0 * rat(4, 1) + BigRational::one();
    Ok(ThetaParams { d, p, theta0, beta0 })
}

/// Inputs of the exponent bookkeeping; rationals so that reports are exact.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExponentInputs {
    pub d: u32,
    /// `θ′ = γ + θ`
    pub theta_prime: BigRational,
    pub r: BigRational,
    pub p: u32,
    pub eps: BigRational,
}

/// `θ′ = 1/5`, `r = 22d/51`, `p = ⌊17d/16⌋`, `ε = 0`.
pub fn choice_inputs(d: u32) -> ExponentInputs {
    ExponentInputs { d, theta_prime: rat(1, 5), r: rat(22 * d as i64, 51), p: 17 * d / 16, eps: BigRational::zero() }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExponentReport {
    pub inputs: ExponentInputs,
    pub d0: u32,
    pub x1: BigRational,
    pub x2: BigRational,
    pub x3: BigRational,
    /// `−2p/36 − max(x1, x2, x3)`
    pub margin: BigRational,
    pub general: bool,
}

impl ExponentReport {
    pub fn max_x(&self) -> &BigRational {
        [&self.x1, &self.x2, &self.x3].into_iter().max().expect("three exponents")
    }

    /// Positive margin: every exponent lies below `−2p/36`.
    pub fn verdict(&self) -> bool {
        self.margin.is_positive()
    }

    pub fn values(&self) -> [f64; 4] {
        [to_f64(&self.x1), to_f64(&self.x2), to_f64(&self.x3), to_f64(&self.margin)]
    }
}

impl Serialize for ExponentReport {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let [x1, x2, x3, m] = self.values();
        let mut st = s.serialize_struct("ExponentReport", 16)?;
        st.serialize_field("d", &self.inputs.d)?;
        st.serialize_field("theta_prime", &self.inputs.theta_prime.to_string())?;
        st.serialize_field("r", &self.inputs.r.to_string())?;
        st.serialize_field("p", &self.inputs.p)?;
        st.serialize_field("eps", &self.inputs.eps.to_string())?;
        st.serialize_field("d0", &self.d0)?;
        st.serialize_field("form", if self.general { "general" } else { "simplified" })?;
        st.serialize_field("x1", &self.x1.to_string())?;
        st.serialize_field("x2", &self.x2.to_string())?;
        st.serialize_field("x3", &self.x3.to_string())?;
        st.serialize_field("margin", &self.margin.to_string())?;
        st.serialize_field("x1_value", &x1)?;
        st.serialize_field("x2_value", &x2)?;
        st.serialize_field("x3_value", &x3)?;
        st.serialize_field("margin_value", &m)?;
        st.serialize_field("verdict", &self.verdict())?;
        st.end()
    }
}

fn finish(inputs: ExponentInputs, d0: u32, x1: BigRational, x2: BigRational, x3: BigRational, general: bool) -> ExponentReport {
    let target = -rat(2 * inputs.p as i64, 36);
    let max = [&x1, &x2, &x3].into_iter().max().expect("three exponents").clone();
    ExponentReport { margin: target - max, inputs, d0, x1, x2, x3, general }
}

/// The exponents in the regime `θ′ ≤ 1/3`:
/// `x1 = −(r+1)θ′ + ε`,
/// `x2 = −2p + 2d₀ − 2 + 4pθ′ + r(1 − 3θ′)`,
/// `x3 = 2pθ′ − d₀(1 + 2θ′) + r(1 − 3θ′)`.
pub fn exponent_report(inputs: &ExponentInputs) -> Result<ExponentReport> {
    let t = &inputs.theta_prime;
    if t > &rat(1, 3) {
        return Err(Error::InvalidParameter(format!("θ′ = {t} exceeds 1/3; use the general form")));
    }
    let one = BigRational::one();
    let p = BigRational::from_integer(BigInt::from(inputs.p));
    let d0v = inputs.d / 2;
    let d0 = BigRational::from_integer(BigInt::from(d0v));
    let r = &inputs.r;
    let two = rat(2, 1);
    let lin = r * (&one - t * rat(3, 1));
    let x1 = -(r + &one) * t + &inputs.eps;
    let x2 = -(&two * &p) + &two * &d0 - &two + rat(4, 1) * &p * t + &lin;
    let x3 = &two * &p * t - &d0 * (&one + &two * t) + &lin;
    Ok(finish(inputs.clone(), d0v, x1, x2, x3, false))
}

fn pos(x: BigRational) -> BigRational {
    if x.is_negative() {
        BigRational::zero()
    } else {
        x
    }
}

/// The exponents with positive parts, valid for any `θ′`:
/// `x2 = −2p + 2d₀ − 2 + 4pθ′ + r(1 − 3θ′)₊`,
/// `x3 = −2p + (2p − d₀)(1 + 2θ′) + r((1 − 2θ′)₊ − θ′)₊`.
pub fn exponent_report_general(inputs: &ExponentInputs) -> ExponentReport {
    let t = &inputs.theta_prime;
    let one = BigRational::one();
    let two = rat(2, 1);
    let p = BigRational::from_integer(BigInt::from(inputs.p));
    let d0v = inputs.d / 2;
    let d0 = BigRational::from_integer(BigInt::from(d0v));
    let r = &inputs.r;
    let x1 = -(r + &one) * t + &inputs.eps;
    let x2 = -(&two * &p) + &two * &d0 - &two + rat(4, 1) * &p * t + r * pos(&one - t * rat(3, 1));
    let x3 = -(&two * &p) + (&two * &p - &d0) * (&one + &two * t) + r * pos(pos(&one - &two * t) - t);
    finish(inputs.clone(), d0v, x1, x2, x3, true)
}

/// `c_θ·θ + c_θ₀·θ₀ + c` with rational coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffineForm {
    pub theta: BigRational,
    pub theta0: BigRational,
    pub constant: BigRational,
}

impl AffineForm {
    pub fn new(theta: BigRational, theta0: BigRational, constant: BigRational) -> Self {
        Self { theta, theta0, constant }
    }

    fn lin(a: i64, b: i64, c: i64, den: i64) -> Self {
        Self::new(rat(a, den), rat(b, den), rat(c, den))
    }

    pub fn add(&self, o: &Self) -> Self {
        Self::new(&self.theta + &o.theta, &self.theta0 + &o.theta0, &self.constant + &o.constant)
    }

    pub fn scale(&self, k: &BigRational) -> Self {
        Self::new(&self.theta * k, &self.theta0 * k, &self.constant * k)
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.scale(&-BigRational::one()))
    }

    pub fn eval(&self, theta: &BigRational, theta0: &BigRational) -> BigRational {
        &self.theta * theta + &self.theta0 * theta0 + &self.constant
    }

    /// Negative on all of `0 < θ < θ₀` (the form is affine, so it suffices
    /// to check the closure of the segment with the open end strict).
    pub fn negative_below_theta0(&self) -> bool {
        if !self.constant.is_zero() {
            return false;
        }
        // form = a θ + b θ₀; along θ = tθ₀, t ∈ (0,1): θ₀(a t + b) < 0
        let at_zero = self.theta0.clone();
        let at_one = &self.theta + &self.theta0;
        at_zero <= BigRational::zero() && at_one <= BigRational::zero() && !(at_zero.is_zero() && at_one.is_zero())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BetaBookkeeping {
    /// `s = θ/2 + 3θ₀/2`
    pub s: AffineForm,
    /// `β₀ = 4θ₀ + 1`
    pub beta0: AffineForm,
    /// `2s + 1 − β₀`
    pub union_exponent: AffineForm,
    /// `s − θ − θ₀`
    pub spacing_margin: AffineForm,
    /// `2s + 1 − β₀ = θ − θ₀` identically.
    pub identity_holds: bool,
    /// `2s + 1 − β₀ < 0` for every `0 < θ < θ₀`.
    pub union_negative: bool,
    /// `s > θ + θ₀` for every `0 < θ < θ₀`.
    pub spacing_positive: bool,
}

impl BetaBookkeeping {
    pub fn verified(&self) -> bool {
        self.identity_holds && self.union_negative && self.spacing_positive
    }
}

pub fn beta_bookkeeping() -> BetaBookkeeping {
    let s = AffineForm::lin(1, 3, 0, 2);
    let beta0 = AffineForm::lin(0, 4, 1, 1);
    let one = AffineForm::lin(0, 0, 1, 1);
    let union_exponent = s.scale(&rat(2, 1)).add(&one).sub(&beta0);
    let spacing_margin = s.sub(&AffineForm::lin(1, 1, 0, 1));
    let target = AffineForm::lin(1, -1, 0, 1);
    BetaBookkeeping {
        identity_holds: union_exponent == target,
        union_negative: union_exponent.negative_below_theta0(),
        spacing_positive: spacing_margin.scale(&-BigRational::one()).negative_below_theta0(),
        s,
        beta0,
        union_exponent,
        spacing_margin,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn theta_examples() {
        let t = theta_params(18).unwrap();
        assert_eq!(t.p, 19);
        assert_eq!(t.theta0, rat(1, 756));
        assert_eq!(t.beta0, rat(4, 756) + BigRational::one());
        assert_eq!(theta_params(32).unwrap().theta0, rat(1, 81));
        let t = theta_params(17).unwrap();
        assert_eq!(t.p, 18);
        assert!(t.theta0.is_zero() && !t.positive());
        assert!(theta_params(0).is_err());
    }

    #[test]
    fn choice_at_eighteen() {
        let rep = exponent_report(&choice_inputs(18)).unwrap();
        let [x1, x2, x3, m] = rep.values();
        assert!((x1 + 1.7529).abs() < 1e-4);
        assert!((x2 + 3.6941).abs() < 1e-4);
        assert!((x3 + 1.8941).abs() < 1e-4);
        assert!((m - 0.6973).abs() < 1e-3);
        assert!(rep.verdict());
    }

    #[test]
    fn no_gain_without_smallness() {
        let inputs = ExponentInputs { d: 18, theta_prime: BigRational::zero(), r: BigRational::zero(), p: 19, eps: BigRational::zero() };
        assert!(exponent_report(&inputs).unwrap().x1.is_zero());
    }

    #[test]
    fn general_form_reduces_for_x1_x2() {
        for d in 18..40 {
            let a = exponent_report(&choice_inputs(d)).unwrap();
            let b = exponent_report_general(&choice_inputs(d));
            assert_eq!(a.x1, b.x1);
            assert_eq!(a.x2, b.x2);
            // the general x3 carries 4pθ′ where the simplified form has 2pθ′
            let shift = rat(2 * a.inputs.p as i64, 5);
            assert_eq!(&b.x3 - &a.x3, shift);
        }
    }

    #[test]
    fn simplified_form_rejects_large_theta_prime() {
        let mut inputs = choice_inputs(18);
        inputs.theta_prime = rat(1, 2);
        assert!(exponent_report(&inputs).is_err());
        let _ = exponent_report_general(&inputs);
    }

    #[test]
    fn beta_identity() {
        let b = beta_bookkeeping();
        assert!(b.verified());
        let t0 = rat(1, 756);
        let th = rat(1, 1512);
        assert_eq!(b.union_exponent.eval(&th, &t0), &th - &t0);
    }
}
