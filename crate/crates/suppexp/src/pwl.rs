//! Exact piecewise-linear functions over rational breakpoints.
//!
//! Values may be signed here (the concave conjugate passes through negative
//! territory); the nonnegativity of admitted functions is enforced at the
//! expression layer.

use crate::rat::{rat_ln, Rat, XRat};
use crate::wide::{log_sum_exp, Wide};
use num_traits::{One, Signed, Zero};

/// Behavior on `[last breakpoint, ∞)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Tail {
    /// Constant at the last breakpoint value.
    Const,
    /// Extend the final segment's slope forever (value at ∞ is +∞).
    Linear,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Pwl {
    /// Breakpoints with strictly increasing x, first x = 0.
    pts: Vec<(Rat, Rat)>,
    tail: Tail,
}

impl Pwl {
    pub fn new(pts: Vec<(Rat, Rat)>, tail: Tail) -> Result<Pwl, String> {
        if pts.is_empty() {
            return Err("pwl needs at least one breakpoint".into());
        }
        if !pts[0].0.is_zero() {
            return Err("pwl must start at x = 0".into());
        }
        for w in pts.windows(2) {
            if w[0].0 >= w[1].0 {
                return Err("pwl breakpoints must have strictly increasing x".into());
            }
        }
        if tail == Tail::Linear && pts.len() < 2 {
            return Err("linear tail needs a final segment".into());
        }
        Ok(Pwl { pts, tail })
    }

    pub fn constant(c: Rat) -> Pwl {
        Pwl { pts: vec![(Rat::zero(), c)], tail: Tail::Const }
    }

    /// f(x) = x.
    pub fn identity() -> Pwl {
        Pwl {
            pts: vec![(Rat::zero(), Rat::zero()), (Rat::one(), Rat::one())],
            tail: Tail::Linear,
        }
    }

    /// min(x, 1), the truncated identity.
    pub fn truncated_identity() -> Pwl {
        Pwl {
            pts: vec![(Rat::zero(), Rat::zero()), (Rat::one(), Rat::one())],
            tail: Tail::Const,
        }
    }

    pub fn points(&self) -> &[(Rat, Rat)] {
        &self.pts
    }
    pub fn tail(&self) -> Tail {
        self.tail
    }

    pub fn last(&self) -> &(Rat, Rat) {
        self.pts.last().unwrap()
    }

    pub fn at_inf(&self) -> XRat {
        match self.tail {
            Tail::Const => XRat::Finite(self.last().1.clone()),
            Tail::Linear => {
                if self.tail_slope().is_zero() {
                    XRat::Finite(self.last().1.clone())
                } else {
                    XRat::Inf
                }
            }
        }
    }

    pub fn tail_slope(&self) -> Rat {
        match self.tail {
            Tail::Const => Rat::zero(),
            Tail::Linear => {
                let n = self.pts.len();
                let (x0, y0) = &self.pts[n - 2];
                let (x1, y1) = &self.pts[n - 1];
                (y1 - y0) / (x1 - x0)
            }
        }
    }

    /// Slope of each interior segment, in order. Empty for a single point.
    pub fn slopes(&self) -> Vec<Rat> {
        self.pts
            .windows(2)
            .map(|w| (&w[1].1 - &w[0].1) / (&w[1].0 - &w[0].0))
            .collect()
    }

    /// Index of the segment containing x (x strictly below last breakpoint).
    fn seg_index(&self, x: &Rat) -> usize {
        debug_assert!(x >= &self.pts[0].0);
        match self.pts.binary_search_by(|p| p.0.cmp(x)) {
            Ok(i) => i.min(self.pts.len() - 2),
            Err(i) => i - 1,
        }
    }

    pub fn eval(&self, x: &Rat) -> Rat {
        debug_assert!(!x.is_negative());
        let (lx, ly) = self.last();
        if x >= lx {
            return match self.tail {
                Tail::Const => ly.clone(),
                Tail::Linear => ly + self.tail_slope() * (x - lx),
            };
        }
        if self.pts.len() == 1 {
            return ly.clone();
        }
        let i = self.seg_index(x);
        let (x0, y0) = &self.pts[i];
        let (x1, y1) = &self.pts[i + 1];
        y0 + (y1 - y0) / (x1 - x0) * (x - x0)
    }

    pub fn eval_xrat(&self, x: &XRat) -> XRat {
        match x {
            XRat::Finite(r) => XRat::Finite(self.eval(r)),
            XRat::Inf => self.at_inf(),
        }
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        if x.is_infinite() {
            return self.at_inf().to_f64();
        }
        // segments located by f64 comparison; exactness callers use eval()
        let ptsf: Vec<(f64, f64)> = self
            .pts
            .iter()
            .map(|(a, b)| (crate::rat::rat_to_f64(a), crate::rat::rat_to_f64(b)))
            .collect();
        let (lx, ly) = *ptsf.last().unwrap();
        if x >= lx {
            return match self.tail {
                Tail::Const => ly,
                Tail::Linear => ly + crate::rat::rat_to_f64(&self.tail_slope()) * (x - lx),
            };
        }
        let mut i = 0;
        while i + 2 < ptsf.len() && ptsf[i + 1].0 <= x {
            i += 1;
        }
        let (x0, y0) = ptsf[i];
        let (x1, y1) = ptsf[i + 1];
        y0 + (y1 - y0) / (x1 - x0) * (x - x0)
    }

    /// ln f(e^t). Requires nonnegative values. Near zero this uses the first
    /// segment's closed form, so it never underflows.
    pub fn loglog_eval(&self, t: Wide) -> Wide {
        let seg_ln = |x0: &Rat, y0: &Rat, x1: &Rat, y1: &Rat, t: Wide| -> Wide {
            // y = s·x + b on the segment
            let s = (y1 - y0) / (x1 - x0);
            let b = y0 - &s * x0;
            debug_assert!(!s.is_negative() || !b.is_negative());
            let ln_of = |r: &Rat| -> Wide {
                if r.is_zero() {
                    Wide::NEG_INF
                } else {
                    Wide::from_f64(rat_ln(r))
                }
            };
            if s.is_negative() || b.is_negative() {
                // signed internals: evaluate directly (only used by tests)
                let x = t.exp().to_f64();
                let v = crate::rat::rat_to_f64(&s) * x + crate::rat::rat_to_f64(&b);
                return if v <= 0.0 { Wide::NEG_INF } else { Wide::from_f64(v.ln()) };
            }
            let term_sx = if s.is_zero() { Wide::NEG_INF } else { ln_of(&s).add(&t) };
            log_sum_exp(&[term_sx, ln_of(&b)])
        };
        let (lx, ly) = self.last();
        let ln_last_x = if lx.is_zero() { Wide::NEG_INF } else { Wide::from_f64(rat_ln(lx)) };
        if t.cmp_wide(&ln_last_x) != std::cmp::Ordering::Less || self.pts.len() == 1 {
            return match self.tail {
                Tail::Const => {
                    if ly.is_zero() {
                        Wide::NEG_INF
                    } else {
                        Wide::from_f64(rat_ln(ly))
                    }
                }
                Tail::Linear => {
                    let n = self.pts.len();
                    seg_ln(&self.pts[n - 2].0, &self.pts[n - 2].1, lx, ly, t)
                }
            };
        }
        // find segment by comparing t against ln of breakpoints
        let mut i = 0;
        for k in 1..self.pts.len() - 1 {
            let lnxk = if self.pts[k].0.is_zero() {
                Wide::NEG_INF
            } else {
                Wide::from_f64(rat_ln(&self.pts[k].0))
            };
            if t.cmp_wide(&lnxk) != std::cmp::Ordering::Less {
                i = k;
            } else {
                break;
            }
        }
        seg_ln(&self.pts[i].0, &self.pts[i].1, &self.pts[i + 1].0, &self.pts[i + 1].1, t)
    }

    pub fn is_increasing(&self) -> bool {
        self.slopes().iter().all(|s| !s.is_negative())
    }

    pub fn min_value(&self) -> Rat {
        let mut m = self.pts[0].1.clone();
        for (_, y) in &self.pts {
            if y < &m {
                m = y.clone();
            }
        }
        m
    }

    /// First x where weak concavity (slopes non-increasing) fails.
    pub fn concavity_fails_at(&self) -> Option<Rat> {
        let slopes = self.slopes();
        for i in 1..slopes.len() {
            if slopes[i] > slopes[i - 1] {
                return Some(self.pts[i].0.clone());
            }
        }
        if self.tail == Tail::Linear && !slopes.is_empty() {
            // tail continues the final slope; nothing to check
        }
        None
    }

    /// First x where "f(x)/x decreasing" fails. For a segment y = s·x + b the
    /// ratio is monotone in the sign of b, so ISOD holds iff every extended
    /// intercept is ≥ 0 (and f is increasing).
    pub fn slope_to_origin_fails_at(&self) -> Option<Rat> {
        for w in self.pts.windows(2) {
            let (x0, y0) = &w[0];
            let (x1, y1) = &w[1];
            let s = (y1 - y0) / (x1 - x0);
            if s.is_negative() {
                return Some(x1.clone());
            }
            let b = y0 - &s * x0;
            if b.is_negative() {
                return Some(x1.clone());
            }
        }
        None
    }

    pub fn scale(&self, k: &Rat) -> Pwl {
        Pwl {
            pts: self.pts.iter().map(|(x, y)| (x.clone(), y * k)).collect(),
            tail: self.tail,
        }
    }

    /// Drop interior breakpoints that do not change the slope.
    pub fn simplify(mut self) -> Pwl {
        if self.pts.len() < 3 {
            return self;
        }
        let mut out: Vec<(Rat, Rat)> = Vec::with_capacity(self.pts.len());
        out.push(self.pts[0].clone());
        for i in 1..self.pts.len() - 1 {
            let (x0, y0) = out.last().unwrap().clone();
            let (x1, y1) = self.pts[i].clone();
            let (x2, y2) = self.pts[i + 1].clone();
            let lhs = (&y1 - &y0) * (&x2 - &x1);
            let rhs = (&y2 - &y1) * (&x1 - &x0);
            if lhs != rhs {
                out.push((x1, y1));
            }
        }
        out.push(self.pts.last().unwrap().clone());
        self.pts = out;
        self
    }

    fn tail_line(&self) -> (Rat, Rat) {
        // (slope, value at last x)
        (self.tail_slope(), self.last().1.clone())
    }

    /// Pointwise combination by sweeping merged breakpoints; `pick` receives
    /// the two values and returns the output value. Crossings are inserted for
    /// min/max so the result is exactly piecewise linear.
    fn combine(&self, other: &Pwl, op: CombineOp) -> Pwl {
        let mut xs: Vec<Rat> = self
            .pts
            .iter()
            .map(|p| p.0.clone())
            .chain(other.pts.iter().map(|p| p.0.clone()))
            .collect();
        xs.sort();
        xs.dedup();

        if matches!(op, CombineOp::Min | CombineOp::Max) {
            // insert crossings interior to merged segments
            let mut extra = Vec::new();
            for w in xs.windows(2) {
                let (u, v) = (&w[0], &w[1]);
                let du = self.eval(u) - other.eval(u);
                let dv = self.eval(v) - other.eval(v);
                if du.is_positive() && dv.is_negative() || du.is_negative() && dv.is_positive() {
                    // linear difference: root at u + (v-u)·du/(du-dv)
                    let root = u + (v - u) * &du / (&du - &dv);
                    extra.push(root);
                }
            }
            xs.extend(extra);
            xs.sort();
            xs.dedup();
        }

        let apply = |a: Rat, b: Rat| -> Rat {
            match op {
                CombineOp::Min => a.min(b),
                CombineOp::Max => a.max(b),
                CombineOp::Sum => a + b,
            }
        };

        let mut pts: Vec<(Rat, Rat)> = xs
            .iter()
            .map(|x| (x.clone(), apply(self.eval(x), other.eval(x))))
            .collect();

        // tails: both are affine past the last merged breakpoint
        let last_x = pts.last().unwrap().0.clone();
        let (sa, ya) = (self.tail_slope_at(&last_x), self.eval(&last_x));
        let (sb, yb) = (other.tail_slope_at(&last_x), other.eval(&last_x));
        let tail = match op {
            CombineOp::Sum => {
                let s = &sa + &sb;
                if s.is_zero() {
                    Tail::Const
                } else {
                    let step = Rat::one();
                    let x1 = &last_x + &step;
                    pts.push((x1, &ya + &yb + s));
                    Tail::Linear
                }
            }
            CombineOp::Min | CombineOp::Max => {
                let want_min = matches!(op, CombineOp::Min);
                // difference d(x) = (ya-yb) + (sa-sb)(x-last): one possible crossing
                let d0 = &ya - &yb;
                let ds = &sa - &sb;
                let mut chosen = if d0.is_zero() {
                    if (ds.is_negative() && want_min) || (ds.is_positive() && !want_min) {
                        0
                    } else {
                        1
                    }
                } else if (d0.is_negative() && want_min) || (d0.is_positive() && !want_min) {
                    0
                } else {
                    1
                };
                // does the loser overtake?
                if !ds.is_zero() && !d0.is_zero() {
                    let cross = -&d0 / &ds;
                    if cross.is_positive() {
                        // crossing at last_x + cross
                        let xc = &last_x + &cross;
                        let yc = self.eval(&xc);
                        pts.push((xc, yc));
                        chosen = if (ds.is_negative() && want_min) || (ds.is_positive() && !want_min)
                        {
                            0
                        } else {
                            1
                        };
                    }
                }
                let (s, y_end, x_end) = {
                    let x_end = pts.last().unwrap().0.clone();
                    if chosen == 0 {
                        (sa.clone(), self.eval(&x_end), x_end)
                    } else {
                        (sb.clone(), other.eval(&x_end), x_end)
                    }
                };
                if s.is_zero() {
                    Tail::Const
                } else {
                    pts.push((&x_end + Rat::one(), y_end + s));
                    Tail::Linear
                }
            }
        };
        let mut pts_dedup: Vec<(Rat, Rat)> = Vec::with_capacity(pts.len());
        for p in pts {
            if pts_dedup.last().map(|q: &(Rat, Rat)| q.0 == p.0) != Some(true) {
                pts_dedup.push(p);
            }
        }
        Pwl { pts: pts_dedup, tail }.simplify()
    }

    /// Slope in effect just after x (tail slope if x is beyond the last point).
    fn tail_slope_at(&self, x: &Rat) -> Rat {
        let (lx, _) = self.last();
        if x >= lx {
            self.tail_slope()
        } else {
            let i = self.seg_index(x);
            let (x0, y0) = &self.pts[i];
            let (x1, y1) = &self.pts[i + 1];
            (y1 - y0) / (x1 - x0)
        }
    }

    pub fn min_with(&self, other: &Pwl) -> Pwl {
        self.combine(other, CombineOp::Min)
    }
    pub fn max_with(&self, other: &Pwl) -> Pwl {
        self.combine(other, CombineOp::Max)
    }
    pub fn add_with(&self, other: &Pwl) -> Pwl {
        self.combine(other, CombineOp::Sum)
    }

    /// outer ∘ inner for increasing nonnegative inner.
    pub fn compose_with(&self, inner: &Pwl) -> Pwl {
        debug_assert!(inner.is_increasing());
        let mut xs: Vec<Rat> = inner.pts.iter().map(|p| p.0.clone()).collect();
        // preimages of outer breakpoints under inner
        for (u, _) in &self.pts {
            if let Some(x) = inner.preimage(u) {
                xs.push(x);
            }
        }
        xs.sort();
        xs.dedup();
        let mut pts: Vec<(Rat, Rat)> = xs
            .iter()
            .map(|x| (x.clone(), self.eval(&inner.eval(x))))
            .collect();
        // tail: past the last x, inner is affine with slope si
        let last_x = pts.last().unwrap().0.clone();
        let si = inner.tail_slope_at(&last_x);
        let tail = if si.is_zero() {
            Tail::Const
        } else {
            // inner climbs linearly; outer past its own last breakpoint is affine
            let so = self.tail_slope();
            // region where inner(x) exceeds outer's last breakpoint
            let outer_last_x = self.last().0.clone();
            let iv = inner.eval(&last_x);
            if iv < outer_last_x {
                let xc = inner.preimage(&outer_last_x).unwrap_or_else(|| last_x.clone());
                if xc > last_x {
                    pts.push((xc.clone(), self.eval(&inner.eval(&xc))));
                }
            }
            if so.is_zero() {
                Tail::Const
            } else {
                let xe = &pts.last().unwrap().0 + Rat::one();
                pts.push((xe.clone(), self.eval(&inner.eval(&xe))));
                Tail::Linear
            }
        };
        let mut pts_dedup: Vec<(Rat, Rat)> = Vec::with_capacity(pts.len());
        for p in pts {
            if pts_dedup.last().map(|q: &(Rat, Rat)| q.0 == p.0) != Some(true) {
                pts_dedup.push(p);
            }
        }
        Pwl { pts: pts_dedup, tail }.simplify()
    }

    /// Smallest x with f(x) = y, for increasing f; None if y is never reached.
    pub fn preimage(&self, y: &Rat) -> Option<Rat> {
        if y <= &self.pts[0].1 {
            return Some(self.pts[0].0.clone());
        }
        for w in self.pts.windows(2) {
            let (x0, y0) = &w[0];
            let (x1, y1) = &w[1];
            if y <= y1 && y > y0 {
                if y1 == y0 {
                    continue;
                }
                return Some(x0 + (x1 - x0) * (y - y0) / (y1 - y0));
            }
        }
        let (lx, ly) = self.last();
        let s = self.tail_slope();
        if y > ly {
            if s.is_zero() {
                return None;
            }
            return Some(lx + (y - ly) / s);
        }
        Some(lx.clone())
    }

    /// Largest ISOD minorant  x · inf_{0 < t ≤ x} f(t)/t, exact.
    /// Requires f increasing with f(0) = 0.
    pub fn isod_envelope(&self) -> Pwl {
        debug_assert!(self.pts[0].1.is_zero());
        let mut out: Vec<(Rat, Rat)> = vec![(Rat::zero(), Rat::zero())];
        let mut m: Option<Rat> = None; // running inf of f(t)/t
        let push = |out: &mut Vec<(Rat, Rat)>, x: Rat, y: Rat| {
            if out.last().map(|q| q.0 == x) != Some(true) {
                out.push((x, y));
            }
        };
        for w in self.pts.windows(2) {
            let (x0, y0) = &w[0];
            let (x1, y1) = &w[1];
            let s = (y1 - y0) / (x1 - x0);
            let b = y0 - &s * x0;
            // envelope on (x0, x1]: x·min(m, inf_{t≤x} ratio)
            // ratio on the segment is monotone: decreasing iff b ≥ 0
            let r1 = y1 / x1;
            match (&mut m, b.is_negative()) {
                (None, _) => {
                    // first segment from 0: ratio is s + b/x; with y0 = 0, x0 = 0
                    // b = 0 so the ratio is the constant s
                    m = Some(r1.clone().min(s.clone()));
                    push(&mut out, x1.clone(), self_min_line(&s, &b, &r1, x1));
                }
                (Some(mv), false) => {
                    // ratio decreasing on segment: envelope = min(m·x, f(x))
                    // crossing where m·x = s·x + b  =>  x = b/(m-s) when m > s
                    if &*mv > &s {
                        let xc = &b / (&*mv - &s);
                        if &xc > x0 && &xc < x1 {
                            let yc = &*mv * &xc;
                            push(&mut out, xc, yc);
                        }
                    }
                    let end = (&*mv * x1).min(y1.clone());
                    push(&mut out, x1.clone(), end);
                    if &r1 < mv {
                        *mv = r1;
                    }
                }
                (Some(mv), true) => {
                    // ratio increasing on segment: inf stays at the left value
                    let r0 = if x0.is_zero() { s.clone() } else { y0 / x0 };
                    if &r0 < mv {
                        *mv = r0;
                    }
                    push(&mut out, x1.clone(), &*mv * x1);
                }
            }
        }
        let m = m.unwrap_or_else(Rat::zero);
        // tail
        let (lx, ly) = self.last();
        match self.tail {
            Tail::Const => {
                // envelope tail: min(m·x, C) -> breakpoint where m·x hits C
                if m.is_positive() && ly.is_positive() {
                    let xc = ly / &m;
                    if &xc > lx {
                        push(&mut out, xc, ly.clone());
                    }
                    Pwl { pts: out, tail: Tail::Const }.simplify()
                } else {
                    Pwl { pts: out, tail: Tail::Const }.simplify()
                }
            }
            Tail::Linear => {
                let s = self.tail_slope();
                let b = ly - &s * lx;
                if b.is_negative() {
                    // ratio increases to s from below; inf stays at ratio(lx)
                    let r = if lx.is_zero() { s } else { ly / lx };
                    let m2 = m.min(r);
                    let xe = lx + Rat::one();
                    push(&mut out, xe.clone(), &m2 * &xe);
                    Pwl { pts: out, tail: Tail::Linear }.simplify()
                } else {
                    // ratio decreases towards s: envelope = min(m·x, f(x)) forever
                    if m > s {
                        let xc = &b / (&m - &s);
                        if &xc > lx {
                            push(&mut out, xc.clone(), &m * &xc);
                        }
                    }
                    let xe = &out.last().unwrap().0 + Rat::one();
                    let fe = self.eval(&xe);
                    let me = &m * &xe;
                    push(&mut out, xe, fe.min(me));
                    Pwl { pts: out, tail: Tail::Linear }.simplify()
                }
            }
        }
    }
}

fn self_min_line(s: &Rat, b: &Rat, r1: &Rat, x1: &Rat) -> Rat {
    // value of min(envelope candidates) at x1 for the first segment
    let f1 = s * x1 + b;
    let m1 = r1 * x1;
    f1.min(m1)
}

#[derive(Clone, Copy)]
enum CombineOp {
    Min,
    Max,
    Sum,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{rat, rat_int};

    fn p(points: &[(i64, i64, i64, i64)], tail: Tail) -> Pwl {
        Pwl::new(
            points.iter().map(|&(a, b, c, d)| (rat(a, b), rat(c, d))).collect(),
            tail,
        )
        .unwrap()
    }

    #[test]
    fn eval_and_tails() {
        let f = Pwl::truncated_identity();
        assert_eq!(f.eval(&rat(1, 2)), rat(1, 2));
        assert_eq!(f.eval(&rat_int(5)), rat_int(1));
        assert_eq!(f.at_inf(), XRat::Finite(rat_int(1)));
        let id = Pwl::identity();
        assert_eq!(id.eval(&rat_int(7)), rat_int(7));
        assert_eq!(id.at_inf(), XRat::Inf);
    }

    #[test]
    fn min_max_sum() {
        let id = Pwl::identity();
        let half = id.scale(&rat(1, 2));
        let one = Pwl::constant(rat_int(1));
        let f = half.min_with(&one); // min(x/2, 1)
        assert_eq!(f.eval(&rat_int(1)), rat(1, 2));
        assert_eq!(f.eval(&rat_int(2)), rat_int(1));
        assert_eq!(f.eval(&rat_int(100)), rat_int(1));
        assert_eq!(f.at_inf(), XRat::Finite(rat_int(1)));

        let g = id.max_with(&one); // max(x, 1)
        assert_eq!(g.eval(&rat(1, 2)), rat_int(1));
        assert_eq!(g.eval(&rat_int(3)), rat_int(3));

        let s = f.add_with(&g);
        assert_eq!(s.eval(&rat(1, 2)), rat(1, 4) + rat_int(1));
        assert_eq!(s.eval(&rat_int(4)), rat_int(1) + rat_int(4));
    }

    #[test]
    fn compose() {
        let id = Pwl::identity();
        let tr = Pwl::truncated_identity();
        let c = tr.compose_with(&id.scale(&rat_int(2))); // min(2x, 1)
        assert_eq!(c.eval(&rat(1, 4)), rat(1, 2));
        assert_eq!(c.eval(&rat_int(1)), rat_int(1));
        let c2 = id.scale(&rat_int(2)).compose_with(&tr); // 2·min(x,1)
        assert_eq!(c2.eval(&rat(1, 2)), rat_int(1));
        assert_eq!(c2.eval(&rat_int(9)), rat_int(2));
    }

    #[test]
    fn isod_and_icod_checks() {
        // chords of sqrt on {0, 1/4, 1} then slope-1 tail: ISOD but not ICOD
        let f = p(&[(0, 1, 0, 1), (1, 4, 1, 2), (1, 1, 1, 1)], Tail::Linear);
        assert!(f.slope_to_origin_fails_at().is_none());
        assert_eq!(f.concavity_fails_at(), Some(rat_int(1)));
    }

    #[test]
    fn envelope_examples() {
        // f through (0,0),(1,2),(2,5): envelope pulls (2,5) down to (2,4)
        let f = p(&[(0, 1, 0, 1), (1, 1, 2, 1), (2, 1, 5, 1)], Tail::Const);
        let e = f.isod_envelope();
        assert_eq!(e.eval(&rat_int(2)), rat_int(4));
        assert_eq!(e.eval(&rat_int(1)), rat_int(2));
        assert!(e.slope_to_origin_fails_at().is_none());

        // f through (0,0),(1,2),(2,5/2): already ISOD, unchanged
        let f = p(&[(0, 1, 0, 1), (1, 1, 2, 1), (2, 1, 5, 2)], Tail::Const);
        let e = f.isod_envelope();
        assert_eq!(e.eval(&rat_int(2)), rat(5, 2));
        assert_eq!(e.eval(&rat(1, 2)), rat_int(1));

        // identity is its own envelope
        let id = Pwl::identity();
        let e = id.isod_envelope();
        for x in [rat(1, 3), rat_int(2), rat_int(10)] {
            assert_eq!(e.eval(&x), x);
        }
    }

    #[test]
    fn envelope_is_idempotent_and_below() {
        let f = p(
            &[(0, 1, 0, 1), (1, 2, 3, 1), (1, 1, 7, 2), (3, 1, 9, 2), (4, 1, 8, 1)],
            Tail::Const,
        );
        let e = f.isod_envelope();
        let ee = e.isod_envelope();
        for k in 0..60 {
            let x = rat(k, 7);
            assert!(e.eval(&x) <= f.eval(&x), "envelope above f at {x}");
            assert_eq!(e.eval(&x), ee.eval(&x), "not idempotent at {x}");
        }
        assert!(e.slope_to_origin_fails_at().is_none());
    }

    #[test]
    fn loglog_matches_eval() {
        let f = p(&[(0, 1, 0, 1), (1, 2, 3, 1), (2, 1, 4, 1)], Tail::Const);
        for &x in &[1e-25, 1e-3, 0.4, 1.7, 50.0] {
            let direct = f.eval_f64(x).ln();
            let ll = f.loglog_eval(Wide::from_f64(x.ln())).to_f64();
            assert!((direct - ll).abs() < 1e-9, "x={x}: {direct} vs {ll}");
        }
        // deep zero: value = 6x on first segment => ln f = ln 6 + t
        let t = Wide::from_f64(-9000.0);
        let ll = f.loglog_eval(t).to_f64();
        assert!((ll - (6f64.ln() - 9000.0)).abs() < 1e-9);
    }

    #[test]
    fn preimage_basic() {
        let f = Pwl::truncated_identity();
        assert_eq!(f.preimage(&rat(1, 2)), Some(rat(1, 2)));
        assert_eq!(f.preimage(&rat_int(2)), None);
        let id = Pwl::identity();
        assert_eq!(id.preimage(&rat_int(40)), Some(rat_int(40)));
    }
}
