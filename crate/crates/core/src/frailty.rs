//! Unit-mean frailty laws.
//!
//! Both laws are parameterized after the identifiability restriction
//! `E[W] = 1`: the inverse Gaussian keeps a single variance parameter `eta`,
//! and the generalized Lindley is a two-component mixture of unit-mean gamma
//! laws with shapes `1/eta` and `1/epsilon`, mixed with weight
//! `eta / (eta + epsilon)` on the first.

use rand::Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};

/// Operations shared by every frailty law. The `log_*` transform methods
/// assume `s >= 0` and do no validation; they sit in the likelihood loop.
pub trait FrailtyLaw {
    fn density(&self, w: f64) -> Result<f64>;

    /// `ln E[exp(-s W)]`.
    fn log_laplace(&self, s: f64) -> f64;

    /// `ln(-L'(s))`, which enters the density of an observed failure.
    fn log_neg_laplace_deriv(&self, s: f64) -> f64;

    fn variance(&self) -> f64;

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64;

    fn laplace(&self, s: f64) -> Result<f64> {
        if !(s >= 0.0) {
            return Err(Error::domain(format!(
                "Laplace argument must be non-negative, got {s}"
            )));
        }
        Ok(self.log_laplace(s).exp())
    }
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::domain(format!(
            "{name} must be positive and finite, got {v}"
        )))
    }
}

fn check_frailty_value(w: f64) -> Result<()> {
    if w > 0.0 && w.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("frailty value must be positive, got {w}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IgFrailty {
    /// Frailty variance.
    pub eta: f64,
}

impl IgFrailty {
    pub fn new(eta: f64) -> Result<Self> {
        check_positive("inverse Gaussian eta", eta)?;
        Ok(IgFrailty { eta })
    }
}

impl FrailtyLaw for IgFrailty {
    fn density(&self, w: f64) -> Result<f64> {
        check_frailty_value(w)?;
        let eta = self.eta;
        let log_d = -0.5 * (2.0 * std::f64::consts::PI * eta).ln() - 1.5 * w.ln()
            - (w - 1.0).powi(2) / (2.0 * w * eta);
        Ok(log_d.exp())
    }

    fn log_laplace(&self, s: f64) -> f64 {
        // (1 - sqrt(1 + 2 eta s)) / eta, rationalized
        -2.0 * s / (1.0 + (1.0 + 2.0 * self.eta * s).sqrt())
    }

    fn log_neg_laplace_deriv(&self, s: f64) -> f64 {
        -0.5 * (2.0 * self.eta * s).ln_1p() + self.log_laplace(s)
    }

    fn variance(&self) -> f64 {
        self.eta
    }

    /// Transformation with multiple roots: a chi-square(1) draw is mapped to
    /// the smaller root of the inverse Gaussian quadratic, and the larger
    /// root `1/x` is chosen with probability `x / (1 + x)`.
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let shape = 1.0 / self.eta;
        let v: f64 = rng.sample(StandardNormal);
        let y = v * v;
        let root = y + (y * y + 4.0 * shape * y).sqrt();
        let x = if root > 0.0 {
            4.0 * shape * y / (root * root)
        } else {
            1.0
        };
        let u: f64 = rng.random();
        if u <= 1.0 / (1.0 + x) {
            x
        } else {
            1.0 / x
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GlFrailty {
    pub eta: f64,
    pub epsilon: f64,
}

impl GlFrailty {
    pub fn new(eta: f64, epsilon: f64) -> Result<Self> {
        check_positive("generalized Lindley eta", eta)?;
        check_positive("generalized Lindley epsilon", epsilon)?;
        Ok(GlFrailty { eta, epsilon })
    }

    /// Weight of the `eta` component.
    pub fn mixing_proportion(&self) -> f64 {
        self.eta / (self.eta + self.epsilon)
    }
}

/// Log density of the unit-mean gamma law with variance `v`
/// (shape `1/v`, scale `v`).
fn unit_mean_gamma_ln_pdf(w: f64, v: f64) -> f64 {
    let shape = 1.0 / v;
    (shape - 1.0) * w.ln() - w / v - ln_gamma(shape) - shape * v.ln()
}

fn log_sum_exp(a: f64, b: f64) -> f64 {
    let m = a.max(b);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + ((a - m).exp() + (b - m).exp()).ln()
}

impl FrailtyLaw for GlFrailty {
    fn density(&self, w: f64) -> Result<f64> {
        check_frailty_value(w)?;
        let p = self.mixing_proportion();
        Ok(p * unit_mean_gamma_ln_pdf(w, self.eta).exp()
            + (1.0 - p) * unit_mean_gamma_ln_pdf(w, self.epsilon).exp())
    }

    fn log_laplace(&self, s: f64) -> f64 {
        let (e, x) = (self.eta, self.epsilon);
        log_sum_exp(
            e.ln() - (s * e).ln_1p() / e,
            x.ln() - (s * x).ln_1p() / x,
        ) - (e + x).ln()
    }

    fn log_neg_laplace_deriv(&self, s: f64) -> f64 {
        let (e, x) = (self.eta, self.epsilon);
        log_sum_exp(
            e.ln() - (1.0 / e + 1.0) * (s * e).ln_1p(),
            x.ln() - (1.0 / x + 1.0) * (s * x).ln_1p(),
        ) - (e + x).ln()
    }

    /// Mixture of two unit-mean components: the variance is the weighted
    /// average of the component variances, `(eta^2 + epsilon^2) / (eta + epsilon)`.
    fn variance(&self) -> f64 {
        let (e, x) = (self.eta, self.epsilon);
        (e * e + x * x) / (e + x)
    }

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let u: f64 = rng.random();
        let v = if u < self.mixing_proportion() {
            self.eta
        } else {
            self.epsilon
        };
        // parameters were validated at construction
        Gamma::new(1.0 / v, v)
            .expect("valid gamma parameters")
            .sample(rng)
    }
}

/// A frailty law together with its parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "law", rename_all = "snake_case")]
pub enum Frailty {
    InverseGaussian(IgFrailty),
    GeneralizedLindley(GlFrailty),
}

impl Frailty {
    pub fn num_params(&self) -> usize {
        match self {
            Frailty::InverseGaussian(_) => 1,
            Frailty::GeneralizedLindley(_) => 2,
        }
    }
}

impl From<IgFrailty> for Frailty {
    fn from(f: IgFrailty) -> Self {
        Frailty::InverseGaussian(f)
    }
}

impl From<GlFrailty> for Frailty {
    fn from(f: GlFrailty) -> Self {
        Frailty::GeneralizedLindley(f)
    }
}

macro_rules! dispatch {
    ($self:ident, $f:ident => $e:expr) => {
        match $self {
            Frailty::InverseGaussian($f) => $e,
            Frailty::GeneralizedLindley($f) => $e,
        }
    };
}

impl FrailtyLaw for Frailty {
    fn density(&self, w: f64) -> Result<f64> {
        dispatch!(self, f => f.density(w))
    }

    fn log_laplace(&self, s: f64) -> f64 {
        dispatch!(self, f => f.log_laplace(s))
    }

    fn log_neg_laplace_deriv(&self, s: f64) -> f64 {
        dispatch!(self, f => f.log_neg_laplace_deriv(s))
    }

    fn variance(&self) -> f64 {
        dispatch!(self, f => f.variance())
    }

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        dispatch!(self, f => f.sample(rng))
    }
}

/// Variance of the frailty law; equals `eta` for the inverse Gaussian.
pub fn frailty_variance(f: &Frailty) -> f64 {
    f.variance()
}
