use super::Univariate;

/// Shapes smaller than this in magnitude use the exact Gumbel expressions.
pub const GUMBEL_SHAPE_EPS: f64 = 1e-12;

/// Generalized extreme value distribution with location, scale and shape.
///
/// Uses the sign convention where a positive shape gives a heavy
/// (Fréchet-type) upper tail bounded below at `loc - scale / shape`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gev {
    pub loc: f64,
    pub scale: f64,
    pub shape: f64,
}

impl Gev {
    pub fn new(loc: f64, scale: f64, shape: f64) -> Self {
        Gev { loc, scale, shape }
    }

    fn is_gumbel(&self) -> bool {
        self.shape.abs() < GUMBEL_SHAPE_EPS
    }

    /// `ln t(x)`, or `None` outside the support. `Some(+inf)` / `Some(-inf)`
    /// never occur for finite `x` inside the support.
    fn ln_t(&self, x: f64) -> Option<f64> {
        let z = (x - self.loc) / self.scale;
        if self.is_gumbel() {
            return Some(-z);
        }
        let s = self.shape * z;
        if s <= -1.0 {
            return None;
        }
        Some(-s.ln_1p() / self.shape)
    }

    /// Which side of the support `x` falls off: `true` when below it.
    fn below_support(&self, _x: f64) -> bool {
        self.shape > 0.0
    }

    fn x_from_ln_t(&self, ln_t: f64) -> f64 {
        if self.is_gumbel() {
            self.loc - self.scale * ln_t
        } else {
            self.loc + self.scale * (-self.shape * ln_t).exp_m1() / self.shape
        }
    }
}

impl Univariate for Gev {
    fn ln_pdf(&self, x: f64) -> f64 {
        match self.ln_t(x) {
            None => f64::NEG_INFINITY,
            Some(ln_t) => {
                let t = ln_t.exp();
                -self.scale.ln() + (self.shape + 1.0) * ln_t - t
            }
        }
    }

    fn cdf(&self, x: f64) -> f64 {
        match self.ln_t(x) {
            None => {
                if self.below_support(x) {
                    0.0
                } else {
                    1.0
                }
            }
            Some(ln_t) => (-ln_t.exp()).exp(),
        }
    }

    fn sf(&self, x: f64) -> f64 {
        match self.ln_t(x) {
            None => {
                if self.below_support(x) {
                    1.0
                } else {
                    0.0
                }
            }
            Some(ln_t) => -(-ln_t.exp()).exp_m1(),
        }
    }

    fn quantile(&self, p: f64) -> f64 {
        // F = exp(-t)  =>  t = -ln p
        self.x_from_ln_t((-p.ln()).ln())
    }

    fn isf(&self, q: f64) -> f64 {
        // 1 - F = q  =>  t = -ln(1 - q)
        self.x_from_ln_t((-(-q).ln_1p()).ln())
    }

    fn support(&self) -> (f64, f64) {
        if self.is_gumbel() {
            (f64::NEG_INFINITY, f64::INFINITY)
        } else if self.shape > 0.0 {
            (self.loc - self.scale / self.shape, f64::INFINITY)
        } else {
            (f64::NEG_INFINITY, self.loc - self.scale / self.shape)
        }
    }
}
