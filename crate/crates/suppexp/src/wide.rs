//! Extended-range floating scalar: value = m · 2^e with f64 mantissa and i64
//! binary exponent.
//!
//! Log-coordinate probing has to reach positions like ln x = -1e4000, far past
//! anything f64 can hold, while still doing ordinary arithmetic (affine maps,
//! log-sum-exp) on such values. `Wide` keeps ~15 significant digits at any
//! magnitude up to 2^(i64::MAX/4).

use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::fmt;

const EXP_CAP: i64 = i64::MAX / 4;

/// Mantissa normalized to |m| in [1, 2), or m = 0 for zero.
/// `NEG_INF`/`INF` are encoded with infinite mantissa; NaN is never produced.
#[derive(Clone, Copy, Debug)]
pub struct Wide {
    m: f64,
    e: i64,
}

impl Wide {
    pub const ZERO: Wide = Wide { m: 0.0, e: 0 };
    pub const INF: Wide = Wide { m: f64::INFINITY, e: 0 };
    pub const NEG_INF: Wide = Wide { m: f64::NEG_INFINITY, e: 0 };

    pub fn from_f64(v: f64) -> Wide {
        if v == 0.0 {
            return Wide::ZERO;
        }
        if v.is_infinite() {
            return if v > 0.0 { Wide::INF } else { Wide::NEG_INF };
        }
        debug_assert!(!v.is_nan());
        let e = v.abs().log2().floor() as i64;
        let m = v * crate::rat::exp2_i64(-e);
        Wide { m, e }.renorm()
    }

    pub fn from_mant_exp(m: f64, e: i64) -> Wide {
        if m == 0.0 {
            return Wide::ZERO;
        }
        if m.is_infinite() {
            return if m > 0.0 { Wide::INF } else { Wide::NEG_INF };
        }
        let sh = m.abs().log2().floor() as i64;
        Wide {
            m: m * crate::rat::exp2_i64(-sh),
            e: e.saturating_add(sh),
        }
        .renorm()
    }

    fn renorm(self) -> Wide {
        if self.m == 0.0 {
            return Wide::ZERO;
        }
        if self.e > EXP_CAP {
            return if self.m > 0.0 { Wide::INF } else { Wide::NEG_INF };
        }
        if self.e < -EXP_CAP {
            return Wide::ZERO;
        }
        self
    }

    pub fn is_zero(&self) -> bool {
        self.m == 0.0
    }
    pub fn is_finite(&self) -> bool {
        self.m.is_finite()
    }
    pub fn is_neg_inf(&self) -> bool {
        self.m == f64::NEG_INFINITY
    }
    pub fn is_pos_inf(&self) -> bool {
        self.m == f64::INFINITY
    }
    pub fn is_negative(&self) -> bool {
        self.m < 0.0
    }

    pub fn to_f64(&self) -> f64 {
        if !self.m.is_finite() {
            return self.m;
        }
        self.m * crate::rat::exp2_i64(self.e)
    }

    pub fn neg(&self) -> Wide {
        Wide { m: -self.m, e: self.e }
    }

    pub fn abs(&self) -> Wide {
        Wide { m: self.m.abs(), e: self.e }
    }

    pub fn mul(&self, other: &Wide) -> Wide {
        if self.is_zero() || other.is_zero() {
            // 0 * inf does not occur in our call sites; define it as 0.
            return Wide::ZERO;
        }
        if !self.m.is_finite() || !other.m.is_finite() {
            let sign = self.m.signum() * other.m.signum();
            return if sign > 0.0 { Wide::INF } else { Wide::NEG_INF };
        }
        Wide::from_mant_exp(self.m * other.m, self.e.saturating_add(other.e))
    }

    pub fn mul_f64(&self, k: f64) -> Wide {
        self.mul(&Wide::from_f64(k))
    }

    pub fn div(&self, other: &Wide) -> Wide {
        debug_assert!(!other.is_zero());
        if !other.m.is_finite() {
            return Wide::ZERO;
        }
        if !self.m.is_finite() || self.is_zero() {
            return *self;
        }
        Wide::from_mant_exp(self.m / other.m, self.e.saturating_sub(other.e))
    }

    pub fn add(&self, other: &Wide) -> Wide {
        if self.is_zero() {
            return *other;
        }
        if other.is_zero() {
            return *self;
        }
        if !self.m.is_finite() {
            debug_assert!(
                other.m.is_finite() || other.m == self.m,
                "inf - inf in Wide::add"
            );
            return *self;
        }
        if !other.m.is_finite() {
            return *other;
        }
        let (hi, lo) = if self.e >= other.e { (self, other) } else { (other, self) };
        let d = hi.e - lo.e;
        if d > 120 {
            return *hi;
        }
        let m = hi.m + lo.m * crate::rat::exp2_i64(-d);
        Wide::from_mant_exp(m, hi.e)
    }

    pub fn sub(&self, other: &Wide) -> Wide {
        self.add(&other.neg())
    }

    /// self - other as f64, saturating to ±inf when the gap exceeds f64 range.
    pub fn sub_f64(&self, other: &Wide) -> f64 {
        self.sub(other).to_f64()
    }

    pub fn cmp_wide(&self, other: &Wide) -> Ordering {
        let sa = sign3(self.m);
        let sb = sign3(other.m);
        if sa != sb {
            return sa.cmp(&sb);
        }
        if sa == 0 {
            return Ordering::Equal;
        }
        if !self.m.is_finite() || !other.m.is_finite() {
            let fa = self.m.is_finite() as i32;
            let fb = other.m.is_finite() as i32;
            // equal infinities compare equal; a finite value is below +inf, above -inf
            return if sa > 0 { fb.cmp(&fa) } else { fa.cmp(&fb) };
        }
        let mag = match self.e.cmp(&other.e) {
            Ordering::Equal => self.m.abs().partial_cmp(&other.m.abs()).unwrap(),
            o => o,
        };
        if sa > 0 {
            mag
        } else {
            mag.reverse()
        }
    }

    pub fn min(&self, other: &Wide) -> Wide {
        if self.cmp_wide(other) == Ordering::Greater {
            *other
        } else {
            *self
        }
    }

    pub fn max(&self, other: &Wide) -> Wide {
        if self.cmp_wide(other) == Ordering::Less {
            *other
        } else {
            *self
        }
    }

    /// ln of a (positive) Wide value; the result always fits in f64.
    pub fn ln(&self) -> f64 {
        debug_assert!(self.m > 0.0);
        if self.m.is_infinite() {
            return f64::INFINITY;
        }
        self.m.ln() + self.e as f64 * std::f64::consts::LN_2
    }

    /// e^self as a Wide, saturating to INF/ZERO outside representable range.
    pub fn exp(&self) -> Wide {
        if self.is_neg_inf() {
            return Wide::ZERO;
        }
        if self.is_pos_inf() {
            return Wide::INF;
        }
        let bexp = self.mul_f64(std::f64::consts::LOG2_E); // self / ln 2
        let b = bexp.to_f64();
        if b.abs() < 1e15 {
            let ip = b.floor();
            let frac = b - ip;
            Wide::from_mant_exp(frac.exp2(), ip as i64)
        } else if b > EXP_CAP as f64 {
            Wide::INF
        } else if b < -(EXP_CAP as f64) {
            Wide::ZERO
        } else {
            Wide::from_mant_exp(1.0, b as i64)
        }
    }

    pub fn from_rat(r: &crate::rat::Rat) -> Wide {
        use num_traits::{Signed, Zero};
        if r.is_zero() {
            return Wide::ZERO;
        }
        let (mn, en) = crate::rat::big_to_mant_exp(&r.numer().abs());
        let (md, ed) = crate::rat::big_to_mant_exp(r.denom());
        let sign = if r.numer().is_negative() { -1.0 } else { 1.0 };
        Wide::from_mant_exp(sign * mn / md, en - ed)
    }

    /// Scientific-notation string, e.g. "-2.3199e+4162". Round-trips through
    /// `parse` at ~12 significant digits.
    pub fn to_sci_string(&self) -> String {
        if self.is_zero() {
            return "0".into();
        }
        if self.is_pos_inf() {
            return "inf".into();
        }
        if self.is_neg_inf() {
            return "-inf".into();
        }
        let log10 = self.m.abs().log10() + self.e as f64 * std::f64::consts::LOG10_2;
        let mut e10 = log10.floor();
        let mut mant = 10f64.powf(log10 - e10) * self.m.signum();
        if mant.abs() >= 10.0 {
            mant /= 10.0;
            e10 += 1.0;
        }
        format!("{:.12}e{}{}", mant, if e10 >= 0.0 { "+" } else { "" }, e10 as i64)
    }

    pub fn parse(s: &str) -> Result<Wide, String> {
        let t = s.trim();
        match t {
            "0" => return Ok(Wide::ZERO),
            "inf" => return Ok(Wide::INF),
            "-inf" => return Ok(Wide::NEG_INF),
            _ => {}
        }
        let (mant_s, exp_s) = match t.split_once(['e', 'E']) {
            Some(p) => p,
            None => {
                let v: f64 = t.parse().map_err(|e| format!("bad wide literal {t:?}: {e}"))?;
                return Ok(Wide::from_f64(v));
            }
        };
        let mant: f64 = mant_s
            .parse()
            .map_err(|e| format!("bad mantissa {mant_s:?}: {e}"))?;
        let e10: f64 = exp_s
            .parse()
            .map_err(|e| format!("bad exponent {exp_s:?}: {e}"))?;
        let log2 = e10 * std::f64::consts::LOG2_10;
        if log2.abs() > EXP_CAP as f64 {
            return Ok(if mant >= 0.0 { Wide::INF } else { Wide::NEG_INF });
        }
        let ip = log2.floor();
        let frac = log2 - ip;
        Ok(Wide::from_mant_exp(mant * frac.exp2(), ip as i64))
    }
}

fn sign3(m: f64) -> i32 {
    if m > 0.0 {
        1
    } else if m < 0.0 {
        -1
    } else {
        0
    }
}

impl fmt::Display for Wide {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_sci_string())
    }
}

impl PartialEq for Wide {
    fn eq(&self, other: &Self) -> bool {
        self.cmp_wide(other) == Ordering::Equal
    }
}

impl Serialize for Wide {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_sci_string())
    }
}

impl<'de> Deserialize<'de> for Wide {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Wide::parse(&s).map_err(serde::de::Error::custom)
    }
}

/// Stable log-sum-exp over ln-values given as Wide: returns ln(Σ e^{a_i}).
pub fn log_sum_exp(terms: &[Wide]) -> Wide {
    let mut mx = Wide::NEG_INF;
    for t in terms {
        mx = mx.max(t);
    }
    if mx.is_neg_inf() {
        return Wide::NEG_INF;
    }
    if mx.is_pos_inf() {
        return Wide::INF;
    }
    let mut sum = 0.0f64;
    for t in terms {
        if t.is_neg_inf() {
            continue;
        }
        let d = t.sub_f64(&mx); // ≤ 0
        if d > -745.0 {
            sum += d.exp();
        }
    }
    // sum ≥ 1 since the max contributes e^0
    mx.add(&Wide::from_f64(sum.ln()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
    }

    #[test]
    fn matches_f64_in_range() {
        let vals = [0.0, 1.0, -1.0, 3.5, -1e300, 2.2e-308, 123.456, -0.003, 1e18];
        for &a in &vals {
            for &b in &vals {
                let wa = Wide::from_f64(a);
                let wb = Wide::from_f64(b);
                assert!(close(wa.add(&wb).to_f64(), a + b, 1e-12), "{a}+{b}");
                if b != 0.0 {
                    assert!(close(wa.div(&wb).to_f64(), a / b, 1e-12), "{a}/{b}");
                }
                assert!(
                    close(wa.mul(&wb).to_f64(), a * b, 1e-12) || (a * b).is_infinite(),
                    "{a}*{b}"
                );
                assert_eq!(wa.cmp_wide(&wb), a.partial_cmp(&b).unwrap(), "cmp {a} {b}");
            }
        }
    }

    #[test]
    fn extreme_magnitudes() {
        // t = -10^4162 as used by deep probe positions
        let t = Wide::from_f64(-1.0).mul(&pow10(4162));
        let p = Wide::from_mant_exp(1.0, -13824); // 2^-13824
        let prod = t.mul(&p);
        let expect = 4162.0 * std::f64::consts::LN_10 - 13824.0 * std::f64::consts::LN_2;
        assert!(close(prod.abs().ln(), expect, 1e-9));
        assert!(prod.is_negative());
    }

    fn pow10(k: i64) -> Wide {
        let log2 = k as f64 * std::f64::consts::LOG2_10;
        let ip = log2.floor();
        Wide::from_mant_exp((log2 - ip).exp2(), ip as i64)
    }

    #[test]
    fn lse_basic() {
        // ln(e^-50 + e^-100) = -50 + ln(1 + e^-50)
        let r = log_sum_exp(&[Wide::from_f64(-50.0), Wide::from_f64(-100.0)]);
        assert!(close(r.to_f64(), -50.0 + (1.0 + (-50.0f64).exp()).ln(), 1e-14));
        // widely separated Wide magnitudes: the max wins outright
        let a = Wide::from_f64(-1e300).mul(&Wide::from_f64(1e5));
        let b = Wide::from_f64(-3.0);
        let r = log_sum_exp(&[a, b]);
        assert!(close(r.to_f64(), -3.0, 1e-12));
    }

    #[test]
    fn sci_string_roundtrip() {
        for w in [
            Wide::from_f64(-12345.678),
            Wide::from_mant_exp(1.5, 20000),
            Wide::from_mant_exp(-1.25, -400000),
            Wide::ZERO,
        ] {
            let s = w.to_sci_string();
            let back = Wide::parse(&s).unwrap();
            if w.is_zero() {
                assert!(back.is_zero());
            } else {
                let rel = back.div(&w).to_f64();
                assert!((rel - 1.0).abs() < 1e-9, "{s} -> {rel}");
            }
        }
    }

    #[test]
    fn exp_and_ln() {
        for v in [0.5, -3.0, 700.0, -700.0, 2000.0, -2000.0, 1e6, -1e6] {
            let w = Wide::from_f64(v).exp();
            assert!(close(w.ln(), v, 1e-12), "exp/ln at {v}");
        }
    }

    #[test]
    fn from_rat_huge() {
        let r = crate::rat::rat_pow2(-20000);
        let w = Wide::from_rat(&r);
        assert!(close(w.ln(), -20000.0 * std::f64::consts::LN_2, 1e-12));
    }
}
