//! Asymptotic germs at the endpoints 0 and ∞, with the exact propagation
//! rules used by containment verdicts.

use crate::rat::{rat_to_f64, rat_to_string, Rat};
use serde::{Deserialize, Serialize};

/// Coefficients stay exact rationals as long as the algebra allows; fractional
/// powers of non-perfect powers degrade to floats while the exponent stays
/// exact.
#[derive(Clone, Debug, PartialEq)]
pub enum Coeff {
    Exact(Rat),
    Approx(f64),
}

impl Coeff {
    pub fn to_f64(&self) -> f64 {
        match self {
            Coeff::Exact(r) => rat_to_f64(r),
            Coeff::Approx(v) => *v,
        }
    }
    pub fn as_exact(&self) -> Option<&Rat> {
        match self {
            Coeff::Exact(r) => Some(r),
            Coeff::Approx(_) => None,
        }
    }
    pub fn mul(&self, other: &Coeff) -> Coeff {
        match (self, other) {
            (Coeff::Exact(a), Coeff::Exact(b)) => Coeff::Exact(a * b),
            _ => Coeff::Approx(self.to_f64() * other.to_f64()),
        }
    }
    pub fn add(&self, other: &Coeff) -> Coeff {
        match (self, other) {
            (Coeff::Exact(a), Coeff::Exact(b)) => Coeff::Exact(a + b),
            _ => Coeff::Approx(self.to_f64() + other.to_f64()),
        }
    }
    /// self^p, exact when possible.
    pub fn pow(&self, p: &Rat) -> Coeff {
        if let Coeff::Exact(r) = self {
            if let Some(v) = crate::rat::rat_pow_exact(r, p) {
                return Coeff::Exact(v);
            }
        }
        Coeff::Approx(self.to_f64().powf(rat_to_f64(p)))
    }
    pub fn ln(&self) -> f64 {
        match self {
            Coeff::Exact(r) => crate::rat::rat_ln(r),
            Coeff::Approx(v) => v.ln(),
        }
    }
}

impl Serialize for Coeff {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Coeff::Exact(r) => s.serialize_str(&rat_to_string(r)),
            Coeff::Approx(v) => s.serialize_str(&format!("~{v:e}")),
        }
    }
}

impl<'de> Deserialize<'de> for Coeff {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        if let Some(rest) = s.strip_prefix('~') {
            rest.parse::<f64>().map(Coeff::Approx).map_err(serde::de::Error::custom)
        } else {
            crate::rat::parse_rat(&s).map(Coeff::Exact).map_err(serde::de::Error::custom)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Endpoint {
    AtZero,
    AtInfinity,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GermKind {
    /// Identically zero near the endpoint.
    Zero,
    /// Finite positive limit c.
    PositiveLimit { c: Coeff },
    /// ~ c·x^p with p > 0 (at zero this means the function vanishes).
    PowerLike { c: Coeff, p: Rat },
    /// No exact rule applies; carries (ln x, ln f) probe samples.
    SlowlyVaryingNumeric { samples: Vec<(f64, f64)> },
    /// The value is ∞ arbitrarily close to the endpoint.
    InfiniteAtEndpoint,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Germ {
    pub kind: GermKind,
    pub endpoint: Endpoint,
}

impl Germ {
    pub fn new(kind: GermKind, endpoint: Endpoint) -> Germ {
        Germ { kind, endpoint }
    }

    pub fn is_exact(&self) -> bool {
        !matches!(self.kind, GermKind::SlowlyVaryingNumeric { .. })
    }

    /// The function tends to 0 at the endpoint.
    pub fn limit_is_zero(&self) -> Option<bool> {
        match &self.kind {
            GermKind::Zero => Some(true),
            GermKind::PowerLike { .. } => Some(self.endpoint == Endpoint::AtZero),
            GermKind::PositiveLimit { .. } | GermKind::InfiniteAtEndpoint => Some(false),
            GermKind::SlowlyVaryingNumeric { .. } => None,
        }
    }

    /// lim f(x)/x > 0 at infinity (the linear-growth test of containment
    /// condition (1)). None when the germ cannot decide.
    pub fn linear_growth_at_inf(&self) -> Option<bool> {
        debug_assert_eq!(self.endpoint, Endpoint::AtInfinity);
        match &self.kind {
            GermKind::PowerLike { p, .. } => Some(p >= &Rat::from_integer(1.into())),
            GermKind::Zero | GermKind::PositiveLimit { .. } => Some(false),
            GermKind::InfiniteAtEndpoint => None,
            GermKind::SlowlyVaryingNumeric { .. } => None,
        }
    }

    /// Predicted ln f at ln x = t; None when the germ has no closed form.
    pub fn predicted_ln(&self, t: f64) -> Option<f64> {
        match &self.kind {
            GermKind::Zero => Some(f64::NEG_INFINITY),
            GermKind::PositiveLimit { c } => Some(c.ln()),
            GermKind::PowerLike { c, p } => Some(c.ln() + rat_to_f64(p) * t),
            _ => None,
        }
    }

    /// Ordering of two germs by eventual size near the shared endpoint:
    /// Less means self is eventually below other.
    pub fn cmp_near(&self, other: &Germ) -> Option<std::cmp::Ordering> {
        use std::cmp::Ordering::*;
        debug_assert_eq!(self.endpoint, other.endpoint);
        let rank = |k: &GermKind| -> Option<i32> {
            Some(match k {
                GermKind::Zero => 0,
                GermKind::PowerLike { .. } => {
                    if self.endpoint == Endpoint::AtZero {
                        1
                    } else {
                        3
                    }
                }
                GermKind::PositiveLimit { .. } => 2,
                GermKind::InfiniteAtEndpoint => 4,
                GermKind::SlowlyVaryingNumeric { .. } => return None,
            })
        };
        let (ra, rb) = (rank(&self.kind)?, rank(&other.kind)?);
        if ra != rb {
            return Some(ra.cmp(&rb));
        }
        match (&self.kind, &other.kind) {
            (GermKind::PowerLike { c: ca, p: pa }, GermKind::PowerLike { c: cb, p: pb }) => {
                if pa != pb {
                    // at zero a larger exponent vanishes faster (is smaller);
                    // at infinity a larger exponent grows faster (is bigger)
                    let ord = pa.cmp(pb);
                    Some(if self.endpoint == Endpoint::AtZero { ord.reverse() } else { ord })
                } else {
                    match (ca.as_exact(), cb.as_exact()) {
                        (Some(a), Some(b)) => Some(a.cmp(b)),
                        _ => {
                            let (a, b) = (ca.to_f64(), cb.to_f64());
                            if a == b {
                                Some(Equal)
                            } else {
                                a.partial_cmp(&b)
                            }
                        }
                    }
                }
            }
            (GermKind::PositiveLimit { c: ca }, GermKind::PositiveLimit { c: cb }) => {
                match (ca.as_exact(), cb.as_exact()) {
                    (Some(a), Some(b)) => Some(a.cmp(b)),
                    _ => ca.to_f64().partial_cmp(&cb.to_f64()),
                }
            }
            _ => Some(Equal),
        }
    }
}

/// Germ of f at the endpoint, composed.
pub fn compose_germs(outer0: &Germ, outer_inf: &Germ, inner: &Germ, value_of_outer_at: &dyn Fn(f64) -> f64) -> GermKind {
    // inner's behavior decides which end of outer matters
    match &inner.kind {
        GermKind::Zero => GermKind::Zero,
        GermKind::PowerLike { c: ci, p: pi } => {
            let toward_zero = inner.endpoint == Endpoint::AtZero;
            let outer = if toward_zero { outer0 } else { outer_inf };
            match &outer.kind {
                GermKind::Zero => GermKind::Zero,
                GermKind::PowerLike { c: co, p: po } => GermKind::PowerLike {
                    c: co.mul(&ci.pow(po)),
                    p: po * pi,
                },
                GermKind::PositiveLimit { c } => GermKind::PositiveLimit { c: c.clone() },
                GermKind::InfiniteAtEndpoint => GermKind::InfiniteAtEndpoint,
                GermKind::SlowlyVaryingNumeric { .. } => {
                    GermKind::SlowlyVaryingNumeric { samples: vec![] }
                }
            }
        }
        GermKind::PositiveLimit { c } => {
            let v = value_of_outer_at(c.to_f64());
            if v == 0.0 {
                GermKind::Zero
            } else if v.is_infinite() {
                GermKind::InfiniteAtEndpoint
            } else {
                GermKind::PositiveLimit { c: Coeff::Approx(v) }
            }
        }
        GermKind::InfiniteAtEndpoint => match &outer_inf.kind {
            GermKind::PositiveLimit { c } => GermKind::PositiveLimit { c: c.clone() },
            GermKind::Zero => GermKind::Zero,
            _ => GermKind::InfiniteAtEndpoint,
        },
        GermKind::SlowlyVaryingNumeric { .. } => GermKind::SlowlyVaryingNumeric { samples: vec![] },
    }
}

/// Sum rule: at zero the smallest exponent dominates, at infinity the largest.
pub fn sum_germs(endpoint: Endpoint, parts: &[&GermKind]) -> GermKind {
    let mut acc: Option<GermKind> = None;
    for k in parts {
        if matches!(k, GermKind::SlowlyVaryingNumeric { .. }) {
            return GermKind::SlowlyVaryingNumeric { samples: vec![] };
        }
        if matches!(k, GermKind::InfiniteAtEndpoint) {
            return GermKind::InfiniteAtEndpoint;
        }
        acc = Some(match (acc, *k) {
            (None, k) => k.clone(),
            (Some(GermKind::Zero), k) => k.clone(),
            (Some(a), GermKind::Zero) => a,
            (Some(GermKind::PositiveLimit { c: ca }), GermKind::PositiveLimit { c: cb }) => {
                GermKind::PositiveLimit { c: ca.add(cb) }
            }
            (Some(GermKind::PositiveLimit { c: ca }), GermKind::PowerLike { c: cb, p }) => {
                match endpoint {
                    // a positive limit dominates a vanishing power at zero
                    Endpoint::AtZero => GermKind::PositiveLimit { c: ca },
                    Endpoint::AtInfinity => GermKind::PowerLike { c: cb.clone(), p: p.clone() },
                }
            }
            (Some(GermKind::PowerLike { c: ca, p: pa }), GermKind::PositiveLimit { c: cb }) => {
                match endpoint {
                    Endpoint::AtZero => GermKind::PositiveLimit { c: cb.clone() },
                    Endpoint::AtInfinity => GermKind::PowerLike { c: ca, p: pa },
                }
            }
            (Some(GermKind::PowerLike { c: ca, p: pa }), GermKind::PowerLike { c: cb, p: pb }) => {
                if &pa == pb {
                    GermKind::PowerLike { c: ca.add(cb), p: pa }
                } else {
                    let keep_a = match endpoint {
                        Endpoint::AtZero => pa < *pb,
                        Endpoint::AtInfinity => pa > *pb,
                    };
                    if keep_a {
                        GermKind::PowerLike { c: ca, p: pa }
                    } else {
                        GermKind::PowerLike { c: cb.clone(), p: pb.clone() }
                    }
                }
            }
            (Some(a), _) => a,
        });
    }
    acc.unwrap_or(GermKind::Zero)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{rat, rat_int};

    fn pl(c: i64, pn: i64, pd: i64, ep: Endpoint) -> Germ {
        Germ::new(
            GermKind::PowerLike { c: Coeff::Exact(rat_int(c)), p: rat(pn, pd) },
            ep,
        )
    }

    #[test]
    fn sum_rule_at_zero_smaller_exponent_wins() {
        let a = pl(1, 1, 2, Endpoint::AtZero);
        let b = pl(7, 1, 1, Endpoint::AtZero);
        let s = sum_germs(Endpoint::AtZero, &[&a.kind, &b.kind]);
        assert_eq!(
            s,
            GermKind::PowerLike { c: Coeff::Exact(rat_int(1)), p: rat(1, 2) }
        );
        // equal exponents add coefficients
        let c = pl(1, 1, 2, Endpoint::AtZero);
        let s = sum_germs(Endpoint::AtZero, &[&a.kind, &c.kind]);
        assert_eq!(
            s,
            GermKind::PowerLike { c: Coeff::Exact(rat_int(2)), p: rat(1, 2) }
        );
    }

    #[test]
    fn near_zero_ordering() {
        let small = pl(1, 1, 1, Endpoint::AtZero); // x
        let big = pl(1, 1, 2, Endpoint::AtZero); // sqrt x
        assert_eq!(small.cmp_near(&big), Some(std::cmp::Ordering::Less));
        let lim = Germ::new(
            GermKind::PositiveLimit { c: Coeff::Exact(rat_int(1)) },
            Endpoint::AtZero,
        );
        assert_eq!(big.cmp_near(&lim), Some(std::cmp::Ordering::Less));
    }

    #[test]
    fn inf_ordering_prefers_larger_exponent() {
        let lin = pl(1, 1, 1, Endpoint::AtInfinity);
        let sq = pl(1, 1, 2, Endpoint::AtInfinity);
        assert_eq!(sq.cmp_near(&lin), Some(std::cmp::Ordering::Less));
        assert_eq!(lin.linear_growth_at_inf(), Some(true));
        assert_eq!(sq.linear_growth_at_inf(), Some(false));
    }
}
