//! Exact rational scalars and the extended value `[0, ∞]` used across the crate.

use num_bigint::{BigInt, Sign};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::fmt;
use std::str::FromStr;

pub type Rat = BigRational;

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// 2^k as an exact rational, k may be negative.
pub fn rat_pow2(k: i64) -> Rat {
    if k >= 0 {
        Rat::from_integer(BigInt::one() << (k as usize))
    } else {
        Rat::new(BigInt::one(), BigInt::one() << ((-k) as usize))
    }
}

/// Parse "3", "-3/4", "1.5" style rationals (decimal point allowed for convenience).
pub fn parse_rat(s: &str) -> Result<Rat, String> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n = BigInt::from_str(n.trim()).map_err(|e| format!("bad numerator {n:?}: {e}"))?;
        let d = BigInt::from_str(d.trim()).map_err(|e| format!("bad denominator {d:?}: {e}"))?;
        if d.is_zero() {
            return Err("zero denominator".into());
        }
        return Ok(Rat::new(n, d));
    }
    if let Some((i, f)) = s.split_once('.') {
        let neg = i.starts_with('-');
        let i_part = BigInt::from_str(if i.is_empty() || i == "-" { "0" } else { i })
            .map_err(|e| format!("bad integer part {i:?}: {e}"))?;
        let f_digits = f.trim();
        let f_part = if f_digits.is_empty() {
            BigInt::zero()
        } else {
            BigInt::from_str(f_digits).map_err(|e| format!("bad fraction part {f:?}: {e}"))?
        };
        let den = BigInt::from(10u32).pow(f_digits.len() as u32);
        let mag = i_part.abs() * &den + f_part;
        let v = Rat::new(mag, den);
        return Ok(if neg { -v } else { v });
    }
    let n = BigInt::from_str(s).map_err(|e| format!("bad rational {s:?}: {e}"))?;
    Ok(Rat::from_integer(n))
}

pub fn rat_to_string(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Accurate f64 conversion that survives numerators/denominators with
/// thousands of bits (plain `to_f64` returns inf/0 there).
pub fn rat_to_f64(r: &Rat) -> f64 {
    if r.is_zero() {
        return 0.0;
    }
    let (sn, num) = split_abs(r.numer());
    let (_, den) = split_abs(r.denom());
    let (mn, en) = big_to_mant_exp(&num);
    let (md, ed) = big_to_mant_exp(&den);
    let v = mn / md * exp2_i64(en - ed);
    if sn == Sign::Minus {
        -v
    } else {
        v
    }
}

fn split_abs(b: &BigInt) -> (Sign, BigInt) {
    (b.sign(), b.abs())
}

/// Returns (m, e) with value ≈ m · 2^e and m in [1, 2).
pub fn big_to_mant_exp(b: &BigInt) -> (f64, i64) {
    debug_assert!(!b.is_negative());
    let bits = b.bits() as i64;
    if bits == 0 {
        return (0.0, 0);
    }
    if bits <= 63 {
        let v = b.to_u64().unwrap() as f64;
        let e = v.log2().floor() as i64;
        return (v * exp2_i64(-e), e);
    }
    let shift = bits - 63;
    let top = (b >> (shift as usize)).to_u64().unwrap() as f64;
    let e = top.log2().floor() as i64;
    (top * exp2_i64(-e), e + shift)
}

/// 2^k as f64 without overflow panics for |k| beyond f64 range (saturates).
pub fn exp2_i64(k: i64) -> f64 {
    if k > 1100 {
        f64::INFINITY
    } else if k < -1100 {
        0.0
    } else {
        (k as f64).exp2()
    }
}

/// Natural log of a positive rational, accurate even for huge bit-lengths.
pub fn rat_ln(r: &Rat) -> f64 {
    debug_assert!(r.is_positive());
    let (mn, en) = big_to_mant_exp(r.numer());
    let (md, ed) = big_to_mant_exp(r.denom());
    (mn.ln() - md.ln()) + (en - ed) as f64 * std::f64::consts::LN_2
}

/// Exact r^p for rational exponent p, when the result is rational.
/// Integer exponents always succeed; fractional ones only for perfect powers.
pub fn rat_pow_exact(base: &Rat, p: &Rat) -> Option<Rat> {
    if base.is_zero() {
        return if p.is_positive() { Some(Rat::zero()) } else { None };
    }
    if p.is_zero() {
        return Some(Rat::one());
    }
    let pn = p.numer().to_i64()?;
    let pd = p.denom().to_u32()?;
    let rooted = if pd == 1 {
        base.clone()
    } else {
        let num = nth_root_exact(base.numer(), pd)?;
        let den = nth_root_exact(base.denom(), pd)?;
        Rat::new(num, den)
    };
    let mag = rooted.pow(pn.unsigned_abs().min(u32::MAX as u64) as i32);
    Some(if pn < 0 { mag.recip() } else { mag })
}

fn nth_root_exact(b: &BigInt, n: u32) -> Option<BigInt> {
    if b.is_negative() {
        return None;
    }
    let r = b.nth_root(n);
    if &r.pow(n) == b {
        Some(r)
    } else {
        None
    }
}

/// A value in `[0, ∞]` with exact rational finite part.
#[derive(Clone, Debug, PartialEq)]
pub enum XRat {
    Finite(Rat),
    Inf,
}

impl XRat {
    pub fn zero() -> Self {
        XRat::Finite(Rat::zero())
    }
    pub fn is_zero(&self) -> bool {
        matches!(self, XRat::Finite(r) if r.is_zero())
    }
    pub fn is_inf(&self) -> bool {
        matches!(self, XRat::Inf)
    }
    pub fn to_f64(&self) -> f64 {
        match self {
            XRat::Finite(r) => rat_to_f64(r),
            XRat::Inf => f64::INFINITY,
        }
    }
    pub fn as_finite(&self) -> Option<&Rat> {
        match self {
            XRat::Finite(r) => Some(r),
            XRat::Inf => None,
        }
    }
    pub fn add(&self, other: &XRat) -> XRat {
        match (self, other) {
            (XRat::Finite(a), XRat::Finite(b)) => XRat::Finite(a + b),
            _ => XRat::Inf,
        }
    }
    pub fn scale(&self, k: &Rat) -> XRat {
        match self {
            XRat::Finite(r) => XRat::Finite(r * k),
            XRat::Inf => XRat::Inf,
        }
    }
    pub fn min(&self, other: &XRat) -> XRat {
        match (self, other) {
            (XRat::Finite(a), XRat::Finite(b)) => XRat::Finite(a.clone().min(b.clone())),
            (XRat::Finite(a), XRat::Inf) => XRat::Finite(a.clone()),
            (XRat::Inf, x) => x.clone(),
        }
    }
    pub fn max(&self, other: &XRat) -> XRat {
        match (self, other) {
            (XRat::Finite(a), XRat::Finite(b)) => XRat::Finite(a.clone().max(b.clone())),
            _ => XRat::Inf,
        }
    }
}

impl PartialOrd for XRat {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        use std::cmp::Ordering::*;
        Some(match (self, other) {
            (XRat::Finite(a), XRat::Finite(b)) => a.cmp(b),
            (XRat::Finite(_), XRat::Inf) => Less,
            (XRat::Inf, XRat::Finite(_)) => Greater,
            (XRat::Inf, XRat::Inf) => Equal,
        })
    }
}

impl fmt::Display for XRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            XRat::Finite(r) => write!(f, "{}", rat_to_string(r)),
            XRat::Inf => write!(f, "inf"),
        }
    }
}

pub fn parse_xrat(s: &str) -> Result<XRat, String> {
    let t = s.trim();
    if t == "inf" || t == "+inf" || t == "Inf" || t == "infinity" {
        Ok(XRat::Inf)
    } else {
        parse_rat(t).map(XRat::Finite)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_roundtrip() {
        assert_eq!(parse_rat("3/4").unwrap(), rat(3, 4));
        assert_eq!(parse_rat("-5").unwrap(), rat_int(-5));
        assert_eq!(parse_rat("1.25").unwrap(), rat(5, 4));
        assert_eq!(parse_xrat("inf").unwrap(), XRat::Inf);
    }

    #[test]
    fn huge_rational_to_f64() {
        // 2^-5000 has no f64 representation but its log must survive.
        let tiny = rat_pow2(-5000);
        assert_eq!(rat_to_f64(&tiny), 0.0);
        let l = rat_ln(&tiny);
        assert!((l - (-5000.0 * std::f64::consts::LN_2)).abs() < 1e-6 * 5000.0);
    }

    #[test]
    fn ln_accuracy_moderate() {
        let r = rat(355, 113);
        assert!((rat_ln(&r) - (355.0f64 / 113.0).ln()).abs() < 1e-12);
    }

    #[test]
    fn exact_pow() {
        assert_eq!(rat_pow_exact(&rat_int(4), &rat(1, 2)), Some(rat_int(2)));
        assert_eq!(rat_pow_exact(&rat_int(2), &rat(1, 2)), None);
        assert_eq!(rat_pow_exact(&rat(9, 4), &rat(3, 2)), Some(rat(27, 8)));
        assert_eq!(rat_pow_exact(&rat(1, 8), &rat(-2, 3)), Some(rat_int(4)));
    }
}
