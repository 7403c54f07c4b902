//! Unconditional (frailty-marginalized) survival models and their censored
//! log-likelihood.
//!
//! Conditional on frailty `w` and covariates `K`, the hazard is
//! `w * phi0(z) * exp(K' beta)`. Integrating the frailty out gives the
//! unconditional survival `L_W(Phi0(z) * rho)`, where `L_W` is the frailty
//! Laplace transform and `rho = exp(K' beta)`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::baseline::GwParams;
use crate::error::{Error, Result};
use crate::frailty::{Frailty, FrailtyLaw, GlFrailty, IgFrailty};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ModelKind {
    /// Inverse Gaussian frailty, generalized Weibull baseline.
    #[serde(rename = "ig-gw")]
    IgGw,
    /// Generalized Lindley frailty, generalized Weibull baseline.
    #[serde(rename = "gl-gw")]
    GlGw,
}

impl ModelKind {
    pub const ALL: [ModelKind; 2] = [ModelKind::IgGw, ModelKind::GlGw];

    pub fn label(self) -> &'static str {
        match self {
            ModelKind::IgGw => "IG-GW",
            ModelKind::GlGw => "GL-GW",
        }
    }

    pub fn num_frailty_params(self) -> usize {
        match self {
            ModelKind::IgGw => 1,
            ModelKind::GlGw => 2,
        }
    }

    /// Total number of free parameters for `m` covariates.
    pub fn num_params(self, m: usize) -> usize {
        3 + self.num_frailty_params() + m
    }

    /// Names of the flattened parameter vector, in sampler order.
    pub fn param_names(self, m: usize) -> Vec<String> {
        let mut names: Vec<String> = ["zeta", "delta", "xi", "eta"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        if self == ModelKind::GlGw {
            names.push("epsilon".into());
        }
        names.extend((1..=m).map(|i| format!("beta{i}")));
        names
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "ig-gw" | "iggw" => Ok(ModelKind::IgGw),
            "gl-gw" | "glgw" => Ok(ModelKind::GlGw),
            _ => Err(Error::config(format!(
                "unknown model {s:?}, expected ig-gw or gl-gw"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurvivalRecord {
    /// Observed time: the failure time when `event` is set, otherwise the
    /// censoring time.
    pub time: f64,
    pub event: bool,
    pub covariates: Vec<f64>,
}

impl SurvivalRecord {
    pub fn new(time: f64, event: bool, covariates: Vec<f64>) -> Result<Self> {
        if !(time.is_finite() && time > 0.0) {
            return Err(Error::domain(format!(
                "survival time must be positive and finite, got {time}"
            )));
        }
        if let Some(bad) = covariates.iter().find(|c| !c.is_finite()) {
            return Err(Error::domain(format!("non-finite covariate {bad}")));
        }
        Ok(SurvivalRecord {
            time,
            event,
            covariates,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub baseline: GwParams,
    pub frailty: Frailty,
    pub beta: Vec<f64>,
}

impl ModelParams {
    pub fn kind(&self) -> ModelKind {
        match self.frailty {
            Frailty::InverseGaussian(_) => ModelKind::IgGw,
            Frailty::GeneralizedLindley(_) => ModelKind::GlGw,
        }
    }

    /// Flattened vector in the order of [`ModelKind::param_names`].
    pub fn to_vec(&self) -> Vec<f64> {
        let b = &self.baseline;
        let mut v = vec![b.zeta, b.delta, b.xi];
        match self.frailty {
            Frailty::InverseGaussian(f) => v.push(f.eta),
            Frailty::GeneralizedLindley(f) => v.extend([f.eta, f.epsilon]),
        }
        v.extend_from_slice(&self.beta);
        v
    }

    pub fn from_slice(kind: ModelKind, v: &[f64]) -> Result<Self> {
        let nf = kind.num_frailty_params();
        if v.len() < 3 + nf {
            return Err(Error::Dimension {
                expected: 3 + nf,
                got: v.len(),
            });
        }
        let baseline = GwParams::new(v[0], v[1], v[2])?;
        let frailty = match kind {
            ModelKind::IgGw => IgFrailty::new(v[3])?.into(),
            ModelKind::GlGw => GlFrailty::new(v[3], v[4])?.into(),
        };
        let beta = v[3 + nf..].to_vec();
        if let Some(b) = beta.iter().find(|b| !b.is_finite()) {
            return Err(Error::domain(format!("regression coefficient {b} is not finite")));
        }
        Ok(ModelParams {
            baseline,
            frailty,
            beta,
        })
    }

    fn check_kind(&self, kind: ModelKind) -> Result<()> {
        if self.kind() == kind {
            Ok(())
        } else {
            Err(Error::config(format!(
                "{kind} model given {} parameters",
                self.kind()
            )))
        }
    }
}

/// `rho = exp(K' beta)`.
pub fn linear_predictor(covariates: &[f64], beta: &[f64]) -> Result<f64> {
    Ok(log_linear_predictor(covariates, beta)?.exp())
}

fn log_linear_predictor(covariates: &[f64], beta: &[f64]) -> Result<f64> {
    if covariates.len() != beta.len() {
        return Err(Error::Dimension {
            expected: beta.len(),
            got: covariates.len(),
        });
    }
    Ok(covariates.iter().zip(beta).map(|(k, b)| k * b).sum())
}

fn check_rho(rho: f64) -> Result<()> {
    if rho > 0.0 && rho.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!(
            "covariate multiplier must be positive, got {rho}"
        )))
    }
}

pub fn unconditional_survival(
    kind: ModelKind,
    z: f64,
    params: &ModelParams,
    rho: f64,
) -> Result<f64> {
    params.check_kind(kind)?;
    check_rho(rho)?;
    let cum = crate::baseline::gw_cum_hazard(z, &params.baseline)?;
    Ok(params.frailty.log_laplace(cum * rho).exp())
}

/// `-d/dz` of [`unconditional_survival`].
pub fn unconditional_density(
    kind: ModelKind,
    z: f64,
    params: &ModelParams,
    rho: f64,
) -> Result<f64> {
    params.check_kind(kind)?;
    check_rho(rho)?;
    if !(z > 0.0) {
        return Err(Error::domain(format!(
            "density requires a positive time, got {z}"
        )));
    }
    Ok(event_log_density(&params.baseline, &params.frailty, z, rho.ln())?.exp())
}

fn event_log_density(b: &GwParams, f: &Frailty, z: f64, log_rho: f64) -> Result<f64> {
    let (log_surv, log_hazard) = b.log_survival_and_hazard(z)?;
    let s = -log_surv * log_rho.exp();
    Ok(log_rho + log_hazard + f.log_neg_laplace_deriv(s))
}

fn record_contribution(params: &ModelParams, rec: &SurvivalRecord) -> Result<f64> {
    let log_rho = log_linear_predictor(&rec.covariates, &params.beta)?;
    let term = if rec.event {
        event_log_density(&params.baseline, &params.frailty, rec.time, log_rho)?
    } else {
        let cum = crate::baseline::gw_cum_hazard(rec.time, &params.baseline)?;
        params.frailty.log_laplace(cum * log_rho.exp())
    };
    Ok(if term.is_nan() { f64::NEG_INFINITY } else { term })
}

fn unpack(kind: ModelKind, v: &[f64]) -> Option<(GwParams, Frailty)> {
    let nf = kind.num_frailty_params();
    if v[..3 + nf].iter().any(|x| !(*x > 0.0 && x.is_finite())) {
        return None;
    }
    let baseline = GwParams {
        zeta: v[0],
        delta: v[1],
        xi: v[2],
    };
    let frailty: Frailty = match kind {
        ModelKind::IgGw => IgFrailty { eta: v[3] }.into(),
        ModelKind::GlGw => GlFrailty {
            eta: v[3],
            epsilon: v[4],
        }
        .into(),
    };
    Some((baseline, frailty))
}

/// `(Phi0(z), ln phi0(z))` of one record; the log hazard is only needed
/// (and only computed) for events.
fn baseline_terms(b: &GwParams, rec: &SurvivalRecord) -> (f64, f64) {
    if rec.event {
        match b.log_survival_and_hazard(rec.time) {
            Ok((log_surv, log_h)) => (-log_surv, log_h),
            Err(_) => (f64::NAN, f64::NAN),
        }
    } else {
        (b.cum_hazard_unchecked(rec.time), 0.0)
    }
}

fn sum_contributions(
    data: &[SurvivalRecord],
    frailty: &Frailty,
    beta: &[f64],
    mut terms: impl FnMut(usize, &SurvivalRecord) -> (f64, f64),
) -> f64 {
    let mut total = 0.0;
    for (i, rec) in data.iter().enumerate() {
        let log_rho: f64 = rec.covariates.iter().zip(beta).map(|(k, b)| k * b).sum();
        let (cum, log_h) = terms(i, rec);
        let s = cum * log_rho.exp();
        let term = if rec.event {
            log_rho + log_h + frailty.log_neg_laplace_deriv(s)
        } else {
            frailty.log_laplace(s)
        };
        if term.is_nan() || term == f64::NEG_INFINITY {
            return f64::NEG_INFINITY;
        }
        total += term;
    }
    total
}

/// Log-likelihood straight from a flattened parameter vector, without
/// validation or allocation. `-inf` for parameters outside the support.
pub(crate) fn log_likelihood_slice(kind: ModelKind, data: &[SurvivalRecord], v: &[f64]) -> f64 {
    let Some((baseline, frailty)) = unpack(kind, v) else {
        return f64::NEG_INFINITY;
    };
    let beta = &v[3 + kind.num_frailty_params()..];
    sum_contributions(data, &frailty, beta, |_, rec| baseline_terms(&baseline, rec))
}

/// Baseline terms of every record for the two most recently used baseline
/// parameter sets. A single-site sampler changes the baseline in at most
/// three of its coordinates, so most evaluations reuse a slot.
#[derive(Debug, Default)]
pub struct BaselineCache {
    keys: [Option<[u64; 3]>; 2],
    terms: [Vec<(f64, f64)>; 2],
    victim: usize,
}

impl BaselineCache {
    fn slot(&mut self, b: &GwParams, data: &[SurvivalRecord]) -> usize {
        let key = [b.zeta.to_bits(), b.delta.to_bits(), b.xi.to_bits()];
        if let Some(i) = self.keys.iter().position(|k| *k == Some(key)) {
            self.victim = 1 - i;
            return i;
        }
        let i = self.victim;
        self.victim = 1 - i;
        self.keys[i] = Some(key);
        let terms = &mut self.terms[i];
        terms.clear();
        terms.extend(data.iter().map(|r| baseline_terms(b, r)));
        i
    }
}

/// [`log_likelihood_slice`] reusing baseline terms from `cache`, which must
/// only ever be used with this `data`. Bit-identical to the uncached value.
pub(crate) fn log_likelihood_cached(
    kind: ModelKind,
    data: &[SurvivalRecord],
    v: &[f64],
    cache: &mut BaselineCache,
) -> f64 {
    let Some((baseline, frailty)) = unpack(kind, v) else {
        return f64::NEG_INFINITY;
    };
    let beta = &v[3 + kind.num_frailty_params()..];
    let slot = cache.slot(&baseline, data);
    let terms = &cache.terms[slot];
    sum_contributions(data, &frailty, beta, |i, _| terms[i])
}

/// Censored log-likelihood: log densities for observed failures plus log
/// survivals for censored records. Returns `-inf` rather than an error when
/// a term underflows, so samplers can treat it as a rejection.
pub fn log_likelihood(
    kind: ModelKind,
    data: &[SurvivalRecord],
    params: &ModelParams,
) -> Result<f64> {
    params.check_kind(kind)?;
    if data.is_empty() {
        return Err(Error::data(None, "log-likelihood of an empty dataset"));
    }
    let mut total = 0.0;
    for rec in data {
        total += record_contribution(params, rec)?;
        if total == f64::NEG_INFINITY {
            break;
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn ig(zeta: f64, delta: f64, xi: f64, eta: f64, beta: Vec<f64>) -> ModelParams {
        ModelParams {
            baseline: GwParams::new(zeta, delta, xi).unwrap(),
            frailty: IgFrailty::new(eta).unwrap().into(),
            beta,
        }
    }

    fn gl(zeta: f64, delta: f64, xi: f64, eta: f64, eps: f64, beta: Vec<f64>) -> ModelParams {
        ModelParams {
            baseline: GwParams::new(zeta, delta, xi).unwrap(),
            frailty: GlFrailty::new(eta, eps).unwrap().into(),
            beta,
        }
    }

    #[test]
    fn linear_predictor_values() {
        assert_eq!(linear_predictor(&[3.0, -1.0], &[0.0, 0.0]).unwrap(), 1.0);
        assert_relative_eq!(
            linear_predictor(&[1.0], &[2.74224]).unwrap(),
            15.5217,
            epsilon = 1e-4
        );
        assert_eq!(linear_predictor(&[1.0, 2.0], &[0.5, -0.25]).unwrap(), 1.0);
        assert!(matches!(
            linear_predictor(&[1.0], &[1.0, 2.0]),
            Err(Error::Dimension { .. })
        ));
    }

    #[test]
    fn survival_reference_values() {
        let p = ig(1.0, 1.0, 1.0, 0.5, vec![]);
        assert_eq!(unconditional_survival(ModelKind::IgGw, 0.0, &p, 1.0).unwrap(), 1.0);
        let expected = ((1.0 - 3f64.sqrt()) / 0.5).exp();
        assert_relative_eq!(
            unconditional_survival(ModelKind::IgGw, 2.0, &p, 1.0).unwrap(),
            expected,
            max_relative = 1e-14
        );
        assert_relative_eq!(expected, 0.2312857, epsilon = 1e-7);
        let q = gl(1.0, 1.0, 1.0, 1.0, 1.0, vec![]);
        assert_relative_eq!(
            unconditional_survival(ModelKind::GlGw, 1.0, &q, 1.0).unwrap(),
            0.5,
            max_relative = 1e-14
        );
    }

    #[test]
    fn lomax_density_reduction() {
        let q = gl(1.0, 1.0, 1.0, 1.0, 1.0, vec![]);
        assert_relative_eq!(
            unconditional_density(ModelKind::GlGw, 1.0, &q, 1.0).unwrap(),
            0.25,
            max_relative = 1e-13
        );
        assert!(unconditional_density(ModelKind::GlGw, 0.0, &q, 1.0).is_err());
    }

    #[test]
    fn kind_mismatch_is_rejected() {
        let p = ig(1.0, 1.0, 1.0, 0.5, vec![]);
        assert!(unconditional_survival(ModelKind::GlGw, 1.0, &p, 1.0).is_err());
    }

    #[test]
    fn likelihood_branches() {
        let p = ig(2.0, 0.7, 1.5, 1.2, vec![0.3]);
        let censored = vec![
            SurvivalRecord::new(0.5, false, vec![1.0]).unwrap(),
            SurvivalRecord::new(1.5, false, vec![0.0]).unwrap(),
        ];
        let expected: f64 = censored
            .iter()
            .map(|r| {
                let rho = linear_predictor(&r.covariates, &p.beta).unwrap();
                unconditional_survival(ModelKind::IgGw, r.time, &p, rho).unwrap().ln()
            })
            .sum();
        assert_relative_eq!(
            log_likelihood(ModelKind::IgGw, &censored, &p).unwrap(),
            expected,
            max_relative = 1e-13
        );

        let one = vec![SurvivalRecord::new(0.8, true, vec![1.0]).unwrap()];
        let rho = 0.3f64.exp();
        assert_relative_eq!(
            log_likelihood(ModelKind::IgGw, &one, &p).unwrap(),
            unconditional_density(ModelKind::IgGw, 0.8, &p, rho).unwrap().ln(),
            max_relative = 1e-13
        );
        assert!(log_likelihood(ModelKind::IgGw, &[], &p).is_err());
    }

    #[test]
    fn underflow_is_negative_infinity() {
        let p = ig(2.0, 5.0, 3.0, 0.01, vec![]);
        // far beyond the support: density underflows
        let data = vec![SurvivalRecord::new(1e5, true, vec![]).unwrap()];
        let ll = log_likelihood(ModelKind::IgGw, &data, &p).unwrap();
        assert!(ll == f64::NEG_INFINITY || ll < -1e6);
        assert!(!ll.is_nan());
    }

    #[test]
    fn flat_vector_round_trip() {
        let p = gl(2.0, 0.9, 1.5, 3.8, 1.1, vec![-0.07, 0.4]);
        let v = p.to_vec();
        assert_eq!(v.len(), ModelKind::GlGw.num_params(2));
        assert_eq!(ModelParams::from_slice(ModelKind::GlGw, &v).unwrap(), p);
        assert_eq!(
            ModelKind::GlGw.param_names(2),
            ["zeta", "delta", "xi", "eta", "epsilon", "beta1", "beta2"]
        );
        assert_eq!("IG-GW".parse::<ModelKind>().unwrap(), ModelKind::IgGw);
    }
}
