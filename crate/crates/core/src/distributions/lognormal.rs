use std::f64::consts::{PI, SQRT_2};

use statrs::function::erf::{erfc, erfc_inv};

use super::Univariate;

/// Two-parameter log-normal with log-mean `mu` and log-standard-deviation `sigma`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogNormal {
    pub mu: f64,
    pub sigma: f64,
}

impl LogNormal {
    pub fn new(mu: f64, sigma: f64) -> Self {
        LogNormal { mu, sigma }
    }

    fn z(&self, x: f64) -> f64 {
        (x.ln() - self.mu) / self.sigma
    }
}

impl Univariate for LogNormal {
    fn ln_pdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return f64::NEG_INFINITY;
        }
        let z = self.z(x);
        -x.ln() - self.sigma.ln() - 0.5 * (2.0 * PI).ln() - 0.5 * z * z
    }

    fn cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        0.5 * erfc(-self.z(x) / SQRT_2)
    }

    fn sf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 1.0;
        }
        0.5 * erfc(self.z(x) / SQRT_2)
    }

    fn quantile(&self, p: f64) -> f64 {
        let z = -SQRT_2 * erfc_inv(2.0 * p);
        (self.mu + self.sigma * z).exp()
    }

    fn isf(&self, q: f64) -> f64 {
        let z = SQRT_2 * erfc_inv(2.0 * q);
        (self.mu + self.sigma * z).exp()
    }

    fn support(&self) -> (f64, f64) {
        (0.0, f64::INFINITY)
    }
}
