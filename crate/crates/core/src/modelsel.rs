//! Model selection and goodness of fit: information criteria, the
//! Kaplan-Meier curve and a Kolmogorov-Smirnov comparison between the
//! fitted population survival curve and the Kaplan-Meier estimate.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::baseline::gw_cum_hazard;
use crate::error::{Error, Result};
use crate::frailty::FrailtyLaw;
use crate::models::{linear_predictor, ModelKind, ModelParams, SurvivalRecord};

/// Minimum number of observed events for [`ks_gof`].
pub const KS_MIN_EVENTS: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InfoCriteria {
    pub aic: f64,
    pub bic: f64,
    /// Undefined when `n <= k + 1`.
    pub aicc: Option<f64>,
    pub hqic: f64,
    pub k: usize,
    pub n: usize,
    pub loglik: f64,
}

pub fn info_criteria(loglik: f64, k: usize, n: usize) -> Result<InfoCriteria> {
    if n == 0 {
        return Err(Error::domain("information criteria need n >= 1"));
    }
    let (kf, nf) = (k as f64, n as f64);
    let aic = 2.0 * kf - 2.0 * loglik;
    let aicc = (n > k + 1).then(|| aic + 2.0 * kf * (kf + 1.0) / (nf - kf - 1.0));
    // ln ln n is negative for n < 3 (and -inf at n = 1); penalty of zero
    // parameters is zero regardless.
    let hq_penalty = if k == 0 { 0.0 } else { 2.0 * kf * nf.ln().ln() };
    Ok(InfoCriteria {
        aic,
        bic: kf * nf.ln() - 2.0 * loglik,
        aicc,
        hqic: hq_penalty - 2.0 * loglik,
        k,
        n,
        loglik,
    })
}

/// A named row of the model comparison table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriteriaRow {
    pub model: String,
    pub criteria: InfoCriteria,
}

fn fmt3(v: f64) -> String {
    format!("{v:.3}")
}

/// Comparison table with columns Model, AIC, BIC, AICc, HQIC, followed by
/// the `k`, `n` and `loglik` they were computed from.
pub fn write_comparison_csv<W: Write>(rows: &[CriteriaRow], w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["Model", "AIC", "BIC", "AICc", "HQIC", "k", "n", "loglik"])?;
    for r in rows {
        let c = &r.criteria;
        out.write_record([
            r.model.clone(),
            fmt3(c.aic),
            fmt3(c.bic),
            c.aicc.map(fmt3).unwrap_or_default(),
            fmt3(c.hqic),
            c.k.to_string(),
            c.n.to_string(),
            c.loglik.to_string(),
        ])?;
    }
    out.flush().map_err(|e| Error::io("comparison csv", e))?;
    Ok(())
}

/// Reads rows written by [`write_comparison_csv`], recomputing the criteria
/// from the `k`, `n` and `loglik` columns.
pub fn read_comparison_csv<R: std::io::Read>(r: R) -> Result<Vec<CriteriaRow>> {
    let mut rdr = csv::Reader::from_reader(r);
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    let col = |name: &str| {
        header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::data(None, format!("criteria table has no {name:?} column")))
    };
    let (model, k, n, ll) = (col("Model")?, col("k")?, col("n")?, col("loglik")?);
    let mut rows = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let bad = |what: &str| Error::data(Some(i + 1), format!("cannot parse {what}"));
        let k: usize = rec[k].trim().parse().map_err(|_| bad("k"))?;
        let n: usize = rec[n].trim().parse().map_err(|_| bad("n"))?;
        let ll: f64 = rec[ll].trim().parse().map_err(|_| bad("loglik"))?;
        rows.push(CriteriaRow {
            model: rec[model].to_string(),
            criteria: info_criteria(ll, k, n)?,
        });
    }
    Ok(rows)
}

/// Right-continuous Kaplan-Meier step function. `survival[i]` holds on
/// `[event_times[i], event_times[i + 1])`; the curve is 1 before the first
/// event time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KmCurve {
    pub event_times: Vec<f64>,
    pub survival: Vec<f64>,
}

impl KmCurve {
    pub fn at(&self, t: f64) -> f64 {
        match self.event_times.partition_point(|&e| e <= t) {
            0 => 1.0,
            i => self.survival[i - 1],
        }
    }
}

pub fn kaplan_meier(data: &[SurvivalRecord]) -> KmCurve {
    let mut order: Vec<&SurvivalRecord> = data.iter().collect();
    order.sort_by(|a, b| a.time.total_cmp(&b.time));
    let mut at_risk = order.len();
    let mut s = 1.0;
    let mut curve = KmCurve {
        event_times: Vec::new(),
        survival: Vec::new(),
    };
    let mut i = 0;
    while i < order.len() {
        let t = order[i].time;
        let (mut deaths, mut leaving) = (0usize, 0usize);
        while i < order.len() && order[i].time == t {
            deaths += usize::from(order[i].event);
            leaving += 1;
            i += 1;
        }
        if deaths > 0 {
            s *= 1.0 - deaths as f64 / at_risk as f64;
            curve.event_times.push(t);
            curve.survival.push(s);
        }
        at_risk -= leaving;
    }
    curve
}

/// Asymptotic Kolmogorov tail probability `P(K > lambda)`.
pub fn kolmogorov_sf(lambda: f64) -> f64 {
    if lambda <= 0.0 {
        return 1.0;
    }
    if lambda < 0.2 {
        // the alternating series converges slowly here; the complementary
        // theta-function form gives 1 - O(exp(-pi^2 / (8 lambda^2)))
        let x = -std::f64::consts::PI.powi(2) / (8.0 * lambda * lambda);
        let cdf = (2.0 * std::f64::consts::PI).sqrt() / lambda
            * (1..=5)
                .map(|k| ((2 * k - 1) as f64).powi(2) * x)
                .map(f64::exp)
                .sum::<f64>();
        return (1.0 - cdf).clamp(0.0, 1.0);
    }
    let mut sum = 0.0;
    for k in 1..=100 {
        let kf = k as f64;
        let term = (-2.0 * kf * kf * lambda * lambda).exp();
        sum += if k % 2 == 1 { term } else { -term };
        if term < 1e-17 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// p-value for statistic `d` with effective sample size `n`, kept in (0, 1].
pub fn ks_p_value(d: f64, n: usize) -> f64 {
    kolmogorov_sf((n as f64).sqrt() * d).max(f64::MIN_POSITIVE)
}

/// One-sample K-S test of `samples` against a continuous CDF.
pub fn ks_one_sample(samples: &[f64], cdf: impl Fn(f64) -> f64) -> (f64, f64) {
    let mut x = samples.to_vec();
    x.sort_by(f64::total_cmp);
    let n = x.len() as f64;
    let d = x
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            let f = cdf(v);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max);
    (d, ks_p_value(d, x.len()))
}

/// Largest absolute gap between the Kaplan-Meier values and `model`
/// (the model survival evaluated at the same event times).
pub fn ks_statistic(km: &KmCurve, model: &[f64]) -> Result<f64> {
    if model.len() != km.survival.len() {
        return Err(Error::Dimension {
            expected: km.survival.len(),
            got: model.len(),
        });
    }
    Ok(km
        .survival
        .iter()
        .zip(model)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max))
}

/// Population survival curve: the per-record unconditional survival at `t`
/// averaged over the sample's covariate profiles.
pub fn population_survival(
    kind: ModelKind,
    data: &[SurvivalRecord],
    params: &ModelParams,
    t: f64,
) -> Result<f64> {
    if params.kind() != kind {
        return Err(Error::config(format!(
            "{kind} curve requested with {} parameters",
            params.kind()
        )));
    }
    let cum = gw_cum_hazard(t, &params.baseline)?;
    let mut total = 0.0;
    for rec in data {
        let rho = linear_predictor(&rec.covariates, &params.beta)?;
        total += params.frailty.log_laplace(cum * rho).exp();
    }
    Ok(total / data.len() as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KsResult {
    pub statistic: f64,
    pub p_value: f64,
    /// Effective sample size used for the p-value (number of events).
    pub n_events: usize,
}

/// K-S goodness of fit of the fitted population survival curve against the
/// Kaplan-Meier curve. The p-value treats the event count as the sample
/// size, which is only approximate under censoring.
pub fn ks_gof(kind: ModelKind, data: &[SurvivalRecord], params: &ModelParams) -> Result<KsResult> {
    let n_events = data.iter().filter(|r| r.event).count();
    if n_events < KS_MIN_EVENTS {
        return Err(Error::data(
            None,
            format!("K-S test needs at least {KS_MIN_EVENTS} events, got {n_events}"),
        ));
    }
    let km = kaplan_meier(data);
    let model = km
        .event_times
        .iter()
        .map(|&t| population_survival(kind, data, params, t))
        .collect::<Result<Vec<_>>>()?;
    let d = ks_statistic(&km, &model)?;
    Ok(KsResult {
        statistic: d,
        p_value: ks_p_value(d, n_events),
        n_events,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlotRow {
    pub time: f64,
    pub km: f64,
    pub model: f64,
}

/// Kaplan-Meier and model survival side by side on the distinct event times.
pub fn plot_data(kind: ModelKind, data: &[SurvivalRecord], params: &ModelParams) -> Result<Vec<PlotRow>> {
    let km = kaplan_meier(data);
    km.event_times
        .iter()
        .zip(&km.survival)
        .map(|(&time, &s)| {
            Ok(PlotRow {
                time,
                km: s,
                model: population_survival(kind, data, params, time)?,
            })
        })
        .collect()
}

pub fn write_plot_csv<W: Write>(rows: &[PlotRow], w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["time", "km_survival", "model_survival"])?;
    for r in rows {
        out.write_record([r.time.to_string(), r.km.to_string(), r.model.to_string()])?;
    }
    out.flush().map_err(|e| Error::io("plot csv", e))?;
    Ok(())
}
