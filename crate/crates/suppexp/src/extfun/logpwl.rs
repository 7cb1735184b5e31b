//! Piecewise-affine functions whose coefficients are stored in log scale.
//!
//! The zig-zag constructions place breakpoints at positions like
//! ln x = -1e10 with segment slopes around e^(1e9); neither the positions nor
//! the coefficients fit in f64, let alone in exact rationals of tractable
//! size. Pieces here are y = s·x + b with ln s and ln b kept as [`Wide`].

use crate::wide::{log_sum_exp, Wide};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct LogSeg {
    /// Right end of the segment's x-range, as ln x.
    pub ln_x_hi: Wide,
    /// ln of the slope.
    pub ln_slope: Wide,
    /// ln of the y-intercept; NEG_INF for a line through the origin.
    pub ln_b: Wide,
}

impl LogSeg {
    pub fn value_ln(&self, t: Wide) -> Wide {
        log_sum_exp(&[self.ln_slope.add(&t), self.ln_b])
    }
}

/// Constant `exp(cap_ln_y)` for ln x ≥ cap_ln_x, then affine pieces downward.
/// `segs` are ordered by strictly decreasing `ln_x_hi`, the first starting at
/// the cap; the last piece extends to x = 0.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct LogPwl {
    pub cap_ln_x: Wide,
    pub cap_ln_y: Wide,
    pub segs: Vec<LogSeg>,
    /// Probe positions (ln x) where this function's distinguishing behavior
    /// lives; containment queries fold these into their schedules.
    #[serde(default)]
    pub hints: Vec<Wide>,
}

impl LogPwl {
    pub fn validate(&self) -> Result<(), String> {
        if self.segs.is_empty() {
            return Err("log_pwl needs at least one segment".into());
        }
        if self.segs[0].ln_x_hi != self.cap_ln_x {
            return Err("first segment must start at the cap".into());
        }
        for w in self.segs.windows(2) {
            if w[1].ln_x_hi.cmp_wide(&w[0].ln_x_hi) != std::cmp::Ordering::Less {
                return Err("segments must have strictly decreasing ln_x_hi".into());
            }
        }
        Ok(())
    }

    /// Segment slopes must strictly increase toward 0 for the function to be
    /// increasing and concave; exact on the stored representation.
    pub fn slopes_strictly_increase_down(&self) -> bool {
        self.segs
            .windows(2)
            .all(|w| w[1].ln_slope.cmp_wide(&w[0].ln_slope) == std::cmp::Ordering::Greater)
    }

    /// Last piece passes through the origin (so f(0+) → 0).
    pub fn vanishes_at_zero(&self) -> bool {
        self.segs.last().map(|s| s.ln_b.is_neg_inf()).unwrap_or(false)
    }

    pub fn loglog_eval(&self, t: Wide) -> Wide {
        if t.cmp_wide(&self.cap_ln_x) != std::cmp::Ordering::Less {
            return self.cap_ln_y;
        }
        let mut idx = 0;
        for (i, s) in self.segs.iter().enumerate() {
            if t.cmp_wide(&s.ln_x_hi) != std::cmp::Ordering::Greater {
                idx = i;
            } else {
                break;
            }
        }
        self.segs[idx].value_ln(t)
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        if x == 0.0 {
            return 0.0;
        }
        if x.is_infinite() {
            return self.cap_ln_y.exp().to_f64();
        }
        self.loglog_eval(Wide::from_f64(x.ln())).exp().to_f64()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_piece_eval() {
        // cap 1 at x >= 1/2; then y = 2x on (0, 1/2]
        let g = LogPwl {
            cap_ln_x: Wide::from_f64(0.5f64.ln()),
            cap_ln_y: Wide::from_f64(0.0),
            segs: vec![LogSeg {
                ln_x_hi: Wide::from_f64(0.5f64.ln()),
                ln_slope: Wide::from_f64(2f64.ln()),
                ln_b: Wide::NEG_INF,
            }],
            hints: vec![],
        };
        g.validate().unwrap();
        assert!((g.eval_f64(0.25) - 0.5).abs() < 1e-12);
        assert!((g.eval_f64(3.0) - 1.0).abs() < 1e-12);
        assert!(g.vanishes_at_zero());
        // deep zero in log coordinates
        let ll = g.loglog_eval(Wide::from_f64(-1e8)).to_f64();
        assert!((ll - (2f64.ln() - 1e8)).abs() < 1.0);
    }
}
