use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::frailty::Frailty;
use crate::models::ModelParams;

/// Prior on a single positive parameter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "law", rename_all = "snake_case")]
pub enum ScalarPrior {
    Gamma { shape: f64, rate: f64 },
    Uniform { lower: f64, upper: f64 },
}

impl ScalarPrior {
    pub const VAGUE_GAMMA: ScalarPrior = ScalarPrior::Gamma {
        shape: 1e-4,
        rate: 1e-4,
    };

    pub fn validate(&self) -> Result<()> {
        match *self {
            ScalarPrior::Gamma { shape, rate } => {
                if !(shape > 0.0 && rate > 0.0 && shape.is_finite() && rate.is_finite()) {
                    return Err(Error::config(format!(
                        "gamma prior needs positive finite shape and rate, got ({shape}, {rate})"
                    )));
                }
            }
            ScalarPrior::Uniform { lower, upper } => {
                if !(lower.is_finite() && upper.is_finite() && lower < upper) {
                    return Err(Error::config(format!(
                        "uniform prior needs finite bounds lower < upper, got ({lower}, {upper})"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn ln_pdf(&self, x: f64) -> f64 {
        match *self {
            ScalarPrior::Gamma { shape, rate } => {
                if !(x > 0.0) {
                    return f64::NEG_INFINITY;
                }
                shape * rate.ln() - ln_gamma(shape) + (shape - 1.0) * x.ln() - rate * x
            }
            ScalarPrior::Uniform { lower, upper } => {
                if x > lower && x < upper {
                    -(upper - lower).ln()
                } else {
                    f64::NEG_INFINITY
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormalPrior {
    pub mean: f64,
    pub variance: f64,
}

impl NormalPrior {
    pub fn ln_pdf(&self, x: f64) -> f64 {
        let d = x - self.mean;
        -0.5 * (2.0 * std::f64::consts::PI * self.variance).ln() - d * d / (2.0 * self.variance)
    }
}

/// Independent priors for every model parameter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PriorConfig {
    pub zeta: ScalarPrior,
    pub delta: ScalarPrior,
    pub xi: ScalarPrior,
    /// Shared by `eta` and, for the generalized Lindley law, `epsilon`.
    pub frailty: ScalarPrior,
    pub beta: NormalPrior,
}

impl Default for PriorConfig {
    fn default() -> Self {
        PriorConfig {
            zeta: ScalarPrior::VAGUE_GAMMA,
            delta: ScalarPrior::VAGUE_GAMMA,
            xi: ScalarPrior::VAGUE_GAMMA,
            frailty: ScalarPrior::VAGUE_GAMMA,
            beta: NormalPrior {
                mean: 0.0,
                variance: 1000.0,
            },
        }
    }
}

impl PriorConfig {
    /// Flat uniform priors on the three baseline parameters; the alternative
    /// vague prior set.
    pub fn uniform_baseline(lower: f64, upper: f64) -> Self {
        let u = ScalarPrior::Uniform { lower, upper };
        PriorConfig {
            zeta: u,
            delta: u,
            xi: u,
            ..PriorConfig::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        for p in [self.zeta, self.delta, self.xi, self.frailty] {
            p.validate()?;
        }
        let b = self.beta;
        if !(b.mean.is_finite() && b.variance.is_finite() && b.variance > 0.0) {
            return Err(Error::config(format!(
                "normal prior needs finite mean and positive variance, got ({}, {})",
                b.mean, b.variance
            )));
        }
        Ok(())
    }
}

pub fn log_prior(params: &ModelParams, cfg: &PriorConfig) -> f64 {
    let b = &params.baseline;
    let mut lp = cfg.zeta.ln_pdf(b.zeta) + cfg.delta.ln_pdf(b.delta) + cfg.xi.ln_pdf(b.xi);
    lp += match params.frailty {
        Frailty::InverseGaussian(f) => cfg.frailty.ln_pdf(f.eta),
        Frailty::GeneralizedLindley(f) => cfg.frailty.ln_pdf(f.eta) + cfg.frailty.ln_pdf(f.epsilon),
    };
    lp + params.beta.iter().map(|&x| cfg.beta.ln_pdf(x)).sum::<f64>()
}
