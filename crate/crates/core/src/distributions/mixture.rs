use super::Univariate;
use crate::numeric::{bisect_increasing, log_add};

/// Two-component finite mixture `w·F₁ + (1 - w)·F₂`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mixture<C> {
    pub first: C,
    pub second: C,
    /// Weight of `first`, in `[0, 1]`.
    pub weight: f64,
}

impl<C: Univariate> Mixture<C> {
    pub fn new(first: C, second: C, weight: f64) -> Self {
        Mixture { first, second, weight }
    }

    /// Bracket from the component quantiles: the mixture crosses `p`
    /// between the smaller and larger component crossing.
    fn solve(&self, lo: f64, hi: f64, g: impl Fn(f64) -> f64) -> f64 {
        let (lo, hi) = if lo <= hi { (lo, hi) } else { (hi, lo) };
        if g(lo) >= 0.0 {
            return lo;
        }
        if g(hi) < 0.0 {
            return hi;
        }
        bisect_increasing(g, lo, hi)
    }
}

impl<C: Univariate> Univariate for Mixture<C> {
    fn ln_pdf(&self, x: f64) -> f64 {
        let a = if self.weight > 0.0 {
            self.weight.ln() + self.first.ln_pdf(x)
        } else {
            f64::NEG_INFINITY
        };
        let b = if self.weight < 1.0 {
            (-self.weight).ln_1p() + self.second.ln_pdf(x)
        } else {
            f64::NEG_INFINITY
        };
        log_add(a, b)
    }

    fn cdf(&self, x: f64) -> f64 {
        self.weight * self.first.cdf(x) + (1.0 - self.weight) * self.second.cdf(x)
    }

    fn sf(&self, x: f64) -> f64 {
        self.weight * self.first.sf(x) + (1.0 - self.weight) * self.second.sf(x)
    }

    fn quantile(&self, p: f64) -> f64 {
        if p > 0.5 {
            return self.isf(1.0 - p);
        }
        let lo = self.first.quantile(p);
        let hi = self.second.quantile(p);
        self.solve(lo, hi, |x| self.cdf(x) - p)
    }

    fn isf(&self, q: f64) -> f64 {
        let lo = self.first.isf(q);
        let hi = self.second.isf(q);
        self.solve(lo, hi, |x| q - self.sf(x))
    }

    fn support(&self) -> (f64, f64) {
        let (a0, a1) = self.first.support();
        let (b0, b1) = self.second.support();
        match (self.weight > 0.0, self.weight < 1.0) {
            (true, true) => (a0.min(b0), a1.max(b1)),
            (true, false) => (a0, a1),
            _ => (b0, b1),
        }
    }
}
