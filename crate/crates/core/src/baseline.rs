//! Generalized (exponentiated) Weibull baseline distribution.
//!
//! Survival is `S(z) = 1 - (1 - exp(-delta z^xi))^zeta`. Every quantity is
//! evaluated on the log scale so that both tails stay accurate: the survival
//! close to one for small `z`, and the cumulative hazard for `z` large enough
//! that the survival itself underflows.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Below this value of `zeta * exp(-delta z^xi)` the cumulative hazard uses
/// its two-term asymptotic expansion; the neglected terms are O(x^2).
const ASYMPTOTIC_TAIL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GwParams {
    /// Exponentiation (shape) parameter.
    pub zeta: f64,
    /// Scale-rate parameter.
    pub delta: f64,
    /// Power parameter.
    pub xi: f64,
}

impl GwParams {
    pub fn new(zeta: f64, delta: f64, xi: f64) -> Result<Self> {
        let p = GwParams { zeta, delta, xi };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("zeta", self.zeta), ("delta", self.delta), ("xi", self.xi)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::domain(format!(
                    "generalized Weibull {name} must be positive and finite, got {v}"
                )));
            }
        }
        Ok(())
    }

    /// Log survival and log hazard at `z`, sharing the intermediate terms.
    /// The hazard is `+inf` at `z = 0` when `zeta * xi < 1`.
    pub fn log_survival_and_hazard(&self, z: f64) -> Result<(f64, f64)> {
        check_time(z)?;
        let log_surv = -self.cum_hazard_unchecked(z);
        if z == 0.0 {
            return Ok((0.0, self.log_hazard_at_origin()));
        }
        let u = self.delta * z.powf(self.xi);
        let log_a = log_one_minus_exp_neg(u);
        let log_h = (self.xi * self.zeta * self.delta).ln() + (self.xi - 1.0) * z.ln() - u
            + (self.zeta - 1.0) * log_a
            - log_surv;
        Ok((log_surv, log_h))
    }

    fn log_hazard_at_origin(&self) -> f64 {
        // Near the origin the hazard behaves like xi zeta delta^zeta z^(xi zeta - 1).
        let order = self.xi * self.zeta;
        if order < 1.0 {
            f64::INFINITY
        } else if order == 1.0 {
            self.zeta * self.delta.ln()
        } else {
            f64::NEG_INFINITY
        }
    }

    pub(crate) fn cum_hazard_unchecked(&self, z: f64) -> f64 {
        if z == 0.0 {
            return 0.0;
        }
        let u = self.delta * z.powf(self.xi);
        let x = (-u).exp();
        if self.zeta * x < ASYMPTOTIC_TAIL {
            // S = zeta x (1 + x (1 - zeta) / 2 + O(x^2))
            return u - self.zeta.ln() - 0.5 * x * (1.0 - self.zeta);
        }
        // log of (1 - e^{-u})^zeta
        let log_pow = self.zeta * log_one_minus_exp_neg(u);
        let pow = log_pow.exp();
        if pow < 0.5 {
            -(-pow).ln_1p()
        } else {
            -(-log_pow.exp_m1()).ln()
        }
    }
}

/// `ln(1 - e^{-u})` for `u > 0`.
fn log_one_minus_exp_neg(u: f64) -> f64 {
    if u > std::f64::consts::LN_2 {
        (-(-u).exp()).ln_1p()
    } else {
        (-(-u).exp_m1()).ln()
    }
}

fn check_time(z: f64) -> Result<()> {
    if z.is_finite() && z >= 0.0 {
        Ok(())
    } else {
        Err(Error::domain(format!(
            "time must be non-negative and finite, got {z}"
        )))
    }
}

pub fn gw_survival(z: f64, p: &GwParams) -> Result<f64> {
    check_time(z)?;
    if z == 0.0 {
        return Ok(1.0);
    }
    let u = p.delta * z.powf(p.xi);
    let log_pow = p.zeta * log_one_minus_exp_neg(u);
    Ok(-log_pow.exp_m1())
}

/// Cumulative hazard `-ln S(z)`. May be `+inf` only if `delta z^xi` itself
/// overflows.
pub fn gw_cum_hazard(z: f64, p: &GwParams) -> Result<f64> {
    check_time(z)?;
    Ok(p.cum_hazard_unchecked(z))
}

/// Hazard rate, the exact derivative of [`gw_cum_hazard`].
pub fn gw_hazard(z: f64, p: &GwParams) -> Result<f64> {
    let (_, log_h) = p.log_survival_and_hazard(z)?;
    Ok(log_h.exp())
}

/// Inverse of the cumulative hazard: the time `z` with `gw_cum_hazard(z) = target`.
pub fn gw_quantile_from_cumhazard(target: f64, p: &GwParams) -> Result<f64> {
    if target.is_nan() || target < 0.0 {
        return Err(Error::domain(format!(
            "cumulative hazard target must be non-negative, got {target}"
        )));
    }
    if target == 0.0 {
        return Ok(0.0);
    }
    if target == f64::INFINITY {
        return Ok(f64::INFINITY);
    }
    let x = (-target).exp();
    // u = delta z^xi solves (1 - e^{-u})^zeta = 1 - e^{-target}
    let u = if x < ASYMPTOTIC_TAIL {
        target + p.zeta.ln() - 0.5 * x * (1.0 - 1.0 / p.zeta)
    } else {
        let log_a = log_one_minus_exp_neg(target) / p.zeta;
        let a = log_a.exp();
        if a < 0.5 {
            -(-a).ln_1p()
        } else {
            -(-log_a.exp_m1()).ln()
        }
    };
    Ok((u / p.delta).powf(1.0 / p.xi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn gw(zeta: f64, delta: f64, xi: f64) -> GwParams {
        GwParams::new(zeta, delta, xi).unwrap()
    }

    #[test]
    fn survival_reference_values() {
        assert_eq!(gw_survival(0.0, &gw(3.0, 0.2, 0.7)).unwrap(), 1.0);
        assert_relative_eq!(
            gw_survival(1.0, &gw(1.0, 1.0, 1.0)).unwrap(),
            (-1.0f64).exp(),
            max_relative = 1e-15
        );
        // 1 - (1 - e^{-1})^2 evaluated by hand
        let oracle = 1.0 - (1.0 - (-1.0f64).exp()).powi(2);
        assert_relative_eq!(gw_survival(2.0, &gw(2.0, 0.5, 1.0)).unwrap(), oracle, max_relative = 1e-14);
        assert_relative_eq!(oracle, 0.6004236, epsilon = 1e-7);
    }

    #[test]
    fn cum_hazard_reference_values() {
        assert_eq!(gw_cum_hazard(0.0, &gw(2.0, 0.5, 1.0)).unwrap(), 0.0);
        assert_relative_eq!(gw_cum_hazard(2.0, &gw(1.0, 1.0, 1.0)).unwrap(), 2.0, max_relative = 1e-14);
        let oracle = -(1.0 - (1.0 - (-1.0f64).exp()).powi(2)).ln();
        assert_relative_eq!(gw_cum_hazard(2.0, &gw(2.0, 0.5, 1.0)).unwrap(), oracle, max_relative = 1e-14);
        assert_relative_eq!(oracle, 0.5101199, epsilon = 1e-7);
    }

    #[test]
    fn hazard_reductions() {
        for z in [0.1, 1.0, 7.5] {
            assert_relative_eq!(gw_hazard(z, &gw(1.0, 1.0, 1.0)).unwrap(), 1.0, max_relative = 1e-12);
        }
        assert_relative_eq!(gw_hazard(3.0, &gw(1.0, 0.5, 2.0)).unwrap(), 3.0, max_relative = 1e-12);
    }

    #[test]
    fn hazard_matches_finite_difference() {
        let p = gw(2.0, 0.5, 1.0);
        let h = 1e-6;
        let fd = (gw_cum_hazard(2.0 + h, &p).unwrap() - gw_cum_hazard(2.0 - h, &p).unwrap()) / (2.0 * h);
        assert_relative_eq!(gw_hazard(2.0, &p).unwrap(), fd, max_relative = 1e-6);
    }

    #[test]
    fn hazard_at_origin() {
        assert_eq!(gw_hazard(0.0, &gw(1.0, 1.0, 0.5)).unwrap(), f64::INFINITY);
        assert_eq!(gw_hazard(0.0, &gw(2.0, 1.0, 1.5)).unwrap(), 0.0);
        assert_relative_eq!(gw_hazard(0.0, &gw(1.0, 0.7, 1.0)).unwrap(), 0.7, max_relative = 1e-14);
    }

    #[test]
    fn quantile_reference_values() {
        let p = gw(1.0, 1.0, 1.0);
        assert_eq!(gw_quantile_from_cumhazard(0.0, &p).unwrap(), 0.0);
        assert_relative_eq!(gw_quantile_from_cumhazard(2.0, &p).unwrap(), 2.0, max_relative = 1e-14);
        assert_eq!(gw_quantile_from_cumhazard(f64::INFINITY, &p).unwrap(), f64::INFINITY);
    }

    #[test]
    fn rejects_bad_input() {
        let p = gw(1.0, 1.0, 1.0);
        assert!(gw_survival(-1.0, &p).is_err());
        assert!(gw_survival(f64::NAN, &p).is_err());
        assert!(gw_cum_hazard(f64::INFINITY, &p).is_err());
        assert!(gw_quantile_from_cumhazard(-0.5, &p).is_err());
        assert!(GwParams::new(0.0, 1.0, 1.0).is_err());
        assert!(GwParams::new(1.0, f64::INFINITY, 1.0).is_err());
    }

    #[test]
    fn far_tail_stays_finite() {
        let p = gw(2.5, 1.0, 2.0);
        let z = 40.0; // delta z^xi = 1600, survival underflows
        assert_eq!(gw_survival(z, &p).unwrap(), 0.0);
        let ch = gw_cum_hazard(z, &p).unwrap();
        assert_relative_eq!(ch, 1600.0 - 2.5f64.ln(), max_relative = 1e-14);
        let back = gw_quantile_from_cumhazard(ch, &p).unwrap();
        assert_relative_eq!(back, z, max_relative = 1e-12);
        assert!(gw_hazard(z, &p).unwrap().is_finite());
    }
}
