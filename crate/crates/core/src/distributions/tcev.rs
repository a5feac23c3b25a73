use super::Univariate;
use crate::numeric::{bisect_increasing, log_sum_exp};

/// Two-component extreme value distribution,
/// `F(x) = exp(-Λ₁ e^{-x/θ₁} - Λ₂ e^{-x/θ₂})`.
///
/// Equivalent to the maximum of two independent Gumbel variates with
/// locations `θᵢ ln Λᵢ` and scales `θᵢ`. A component with `Λ = 0` is absent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tcev {
    pub lambda1: f64,
    pub theta1: f64,
    pub lambda2: f64,
    pub theta2: f64,
}

impl Tcev {
    pub fn new(lambda1: f64, theta1: f64, lambda2: f64, theta2: f64) -> Self {
        Tcev {
            lambda1,
            theta1,
            lambda2,
            theta2,
        }
    }

    fn active(&self) -> impl Iterator<Item = (f64, f64)> + Clone {
        [(self.lambda1, self.theta1), (self.lambda2, self.theta2)]
            .into_iter()
            .filter(|(l, _)| *l > 0.0)
    }

    /// Cumulative hazard `H(x) = Σ Λᵢ e^{-x/θᵢ}`, so `F = e^{-H}`.
    fn hazard(&self, x: f64) -> f64 {
        self.active().map(|(l, t)| l * (-x / t).exp()).sum()
    }

    /// Solves `H(x) = target` for `target > 0`.
    fn invert_hazard(&self, target: f64) -> f64 {
        let m = self.active().count() as f64;
        let ln_target = target.ln();
        // H is a sum of decreasing terms. Where the largest single-term
        // crossing sits, H >= target; once every term is below target/m, H <= target.
        let lo = self
            .active()
            .map(|(l, t)| t * (l.ln() - ln_target))
            .fold(f64::NEG_INFINITY, f64::max);
        let hi = self
            .active()
            .map(|(l, t)| t * (l.ln() + m.ln() - ln_target))
            .fold(f64::NEG_INFINITY, f64::max);
        if hi <= lo {
            return lo;
        }
        // increasing in x: target - H(x)
        bisect_increasing(|x| target - self.hazard(x), lo, hi)
    }
}

impl Univariate for Tcev {
    fn ln_pdf(&self, x: f64) -> f64 {
        let h = self.hazard(x);
        if !h.is_finite() {
            return f64::NEG_INFINITY;
        }
        let ln_rate = log_sum_exp(self.active().map(|(l, t)| l.ln() - t.ln() - x / t));
        ln_rate - h
    }

    fn cdf(&self, x: f64) -> f64 {
        (-self.hazard(x)).exp()
    }

    fn sf(&self, x: f64) -> f64 {
        -(-self.hazard(x)).exp_m1()
    }

    fn quantile(&self, p: f64) -> f64 {
        self.invert_hazard(-p.ln())
    }

    fn isf(&self, q: f64) -> f64 {
        self.invert_hazard(-(-q).ln_1p())
    }

    fn support(&self) -> (f64, f64) {
        (f64::NEG_INFINITY, f64::INFINITY)
    }
}
