//! Posterior summaries and convergence diagnostics.

use std::io::Write;

use serde::Serialize;
use statrs::function::erf::erfc;

use crate::bayes::Chain;
use crate::error::{Error, Result};
use crate::frailty::{frailty_variance, GlFrailty};
use crate::models::ModelKind;

/// Minimum series length accepted by [`geweke`].
pub const GEWEKE_MIN_LEN: usize = 100;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParamSummary {
    pub name: String,
    pub mean: f64,
    /// Posterior standard deviation.
    pub se: f64,
    /// 2.5% posterior quantile.
    pub lcl: f64,
    /// 97.5% posterior quantile.
    pub ucl: f64,
    pub geweke_z: Option<f64>,
    pub geweke_p: Option<f64>,
    pub gelman_rubin: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PosteriorSummary {
    /// One entry per chain column, in column order.
    pub params: Vec<ParamSummary>,
    /// Functions of the parameters: the frailty variance, when the chain
    /// knows its model.
    pub derived: Vec<ParamSummary>,
}

impl PosteriorSummary {
    pub fn get(&self, name: &str) -> Option<&ParamSummary> {
        self.params.iter().chain(&self.derived).find(|p| p.name == name)
    }

    /// Table layout: Parameter, Estimate, s.e., L.C.L., U.C.L., Geweke test,
    /// p-value, Gelman-Rubin. Absent diagnostics are left empty.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record([
            "Parameter",
            "Estimate",
            "s.e.",
            "L.C.L.",
            "U.C.L.",
            "Geweke test",
            "p-value",
            "Gelman-Rubin",
        ])?;
        let opt = |v: Option<f64>| v.map(|x| format!("{x:.5}")).unwrap_or_default();
        for p in self.params.iter().chain(&self.derived) {
            out.write_record([
                p.name.clone(),
                format!("{:.5}", p.mean),
                format!("{:.5}", p.se),
                format!("{:.5}", p.lcl),
                format!("{:.5}", p.ucl),
                opt(p.geweke_z),
                opt(p.geweke_p),
                opt(p.gelman_rubin),
            ])?;
        }
        out.flush().map_err(|e| Error::io("summary csv", e))?;
        Ok(())
    }
}

pub fn mean(x: &[f64]) -> f64 {
    x.iter().sum::<f64>() / x.len() as f64
}

/// Sample variance with the `n - 1` denominator; zero for a single value.
pub fn sample_variance(x: &[f64]) -> f64 {
    if x.len() < 2 {
        return 0.0;
    }
    let m = mean(x);
    x.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (x.len() - 1) as f64
}

/// Quantile by linear interpolation between order statistics
/// (`h = (n - 1) q`). `sorted` must be ascending and non-empty.
pub fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Mean, standard deviation and 95% equal-tailed interval of one series.
pub fn summarize_series(x: &[f64]) -> Result<(f64, f64, f64, f64)> {
    if x.is_empty() {
        return Err(Error::Diagnostics("cannot summarize an empty chain".into()));
    }
    let mut sorted = x.to_vec();
    sorted.sort_by(f64::total_cmp);
    Ok((
        mean(x),
        sample_variance(x).sqrt(),
        quantile_sorted(&sorted, 0.025),
        quantile_sorted(&sorted, 0.975),
    ))
}

/// Default Geweke segments: first 10% against last 50%.
pub const GEWEKE_FRACTIONS: (f64, f64) = (0.1, 0.5);

/// Per-parameter summary of one chain. Geweke diagnostics are filled in
/// when the chain is long enough.
pub fn summarize(chain: &Chain) -> Result<PosteriorSummary> {
    summarize_with(chain, GEWEKE_FRACTIONS.0, GEWEKE_FRACTIONS.1)
}

/// [`summarize`] with explicit Geweke segment fractions.
pub fn summarize_with(chain: &Chain, frac_a: f64, frac_b: f64) -> Result<PosteriorSummary> {
    if chain.is_empty() {
        return Err(Error::Diagnostics("cannot summarize an empty chain".into()));
    }
    let series = |name: &str, col: Vec<f64>| -> Result<ParamSummary> {
        let (mean, se, lcl, ucl) = summarize_series(&col)?;
        let (geweke_z, geweke_p) = match geweke(&col, frac_a, frac_b) {
            Ok((z, p)) => (Some(z), Some(p)),
            Err(_) => (None, None),
        };
        Ok(ParamSummary {
            name: name.to_string(),
            mean,
            se,
            lcl,
            ucl,
            geweke_z,
            geweke_p,
            gelman_rubin: None,
        })
    };
    let params = chain
        .names
        .iter()
        .enumerate()
        .map(|(j, name)| series(name, chain.column(j)))
        .collect::<Result<Vec<_>>>()?;
    let derived = match frailty_variance_series(chain) {
        Some(v) => vec![series(FRAILTY_VARIANCE, v)?],
        None => Vec::new(),
    };
    Ok(PosteriorSummary { params, derived })
}

/// Name of the derived frailty-variance row in summaries.
pub const FRAILTY_VARIANCE: &str = "frailty_variance";

/// Per-draw frailty variance, when the chain's model is known.
fn frailty_variance_series(chain: &Chain) -> Option<Vec<f64>> {
    let kind = chain.kind?;
    let eta = chain.column(3);
    Some(match kind {
        ModelKind::IgGw => eta,
        ModelKind::GlGw => eta
            .iter()
            .zip(chain.column(4))
            .map(|(&eta, epsilon)| frailty_variance(&GlFrailty { eta, epsilon }.into()))
            .collect(),
    })
}

/// Summary of the first chain with Gelman-Rubin statistics computed across
/// all of them.
pub fn summarize_chains(chains: &[Chain]) -> Result<PosteriorSummary> {
    summarize_chains_with(chains, GEWEKE_FRACTIONS.0, GEWEKE_FRACTIONS.1)
}

/// [`summarize_chains`] with explicit Geweke segment fractions.
pub fn summarize_chains_with(chains: &[Chain], frac_a: f64, frac_b: f64) -> Result<PosteriorSummary> {
    let first = chains
        .first()
        .ok_or_else(|| Error::Diagnostics("no chains to summarize".into()))?;
    let mut summary = summarize_with(first, frac_a, frac_b)?;
    if chains.len() >= 2 {
        for (j, p) in summary.params.iter_mut().enumerate() {
            if chains.iter().any(|c| c.names.get(j) != Some(&p.name)) {
                return Err(Error::Diagnostics(format!(
                    "chains disagree on parameter column {j}"
                )));
            }
            let cols: Vec<Vec<f64>> = chains.iter().map(|c| c.column(j)).collect();
            p.gelman_rubin = gelman_rubin(&cols).ok();
        }
        if let Some(d) = summary.derived.first_mut() {
            let cols: Option<Vec<Vec<f64>>> = chains.iter().map(frailty_variance_series).collect();
            d.gelman_rubin = cols.and_then(|c| gelman_rubin(&c).ok());
        }
    }
    Ok(summary)
}

/// Variance of a segment mean times its length: the spectral density at
/// zero, estimated by batch means with `ceil(sqrt(n))` batches.
fn spectral_density_at_zero(x: &[f64]) -> f64 {
    let n = x.len();
    let batches = (n as f64).sqrt().ceil() as usize;
    let size = n / batches;
    if size == 0 {
        return 0.0;
    }
    let means: Vec<f64> = (0..batches)
        .map(|b| mean(&x[b * size..(b + 1) * size]))
        .collect();
    size as f64 * sample_variance(&means)
}

/// Two-sided normal tail probability `2 (1 - Phi(|z|))`.
pub fn two_sided_normal_p(z: f64) -> f64 {
    erfc(z.abs() / std::f64::consts::SQRT_2)
}

/// Geweke test comparing the mean of the first `frac_a` of the series with
/// the mean of the last `frac_b`. Returns `(z, p)`; a zero-variance series
/// gives `(0, 1)`.
pub fn geweke(series: &[f64], frac_a: f64, frac_b: f64) -> Result<(f64, f64)> {
    let n = series.len();
    if n < GEWEKE_MIN_LEN {
        return Err(Error::Diagnostics(format!(
            "Geweke test needs at least {GEWEKE_MIN_LEN} draws, got {n}"
        )));
    }
    if !(frac_a > 0.0 && frac_b > 0.0 && frac_a + frac_b <= 1.0) {
        return Err(Error::Diagnostics(format!(
            "Geweke fractions must be positive and sum to at most 1, got {frac_a} and {frac_b}"
        )));
    }
    let na = ((n as f64) * frac_a).floor() as usize;
    let nb = ((n as f64) * frac_b).floor() as usize;
    let a = &series[..na];
    let b = &series[n - nb..];
    let var = spectral_density_at_zero(a) / na as f64 + spectral_density_at_zero(b) / nb as f64;
    let diff = mean(a) - mean(b);
    if var <= 0.0 || !var.is_finite() {
        return Ok(if diff == 0.0 {
            (0.0, 1.0)
        } else {
            (diff.signum() * f64::INFINITY, f64::MIN_POSITIVE)
        });
    }
    let z = diff / var.sqrt();
    Ok((z, two_sided_normal_p(z).max(f64::MIN_POSITIVE)))
}

/// Potential scale reduction factor across chains, truncated to the
/// shortest chain. No correction forces the value above one.
pub fn gelman_rubin(chains: &[Vec<f64>]) -> Result<f64> {
    if chains.len() < 2 {
        return Err(Error::Diagnostics(
            "Gelman-Rubin needs at least two chains".into(),
        ));
    }
    let n = chains.iter().map(Vec::len).min().unwrap_or(0);
    if n < 10 {
        return Err(Error::Diagnostics(format!(
            "Gelman-Rubin needs at least 10 draws per chain, got {n}"
        )));
    }
    let means: Vec<f64> = chains.iter().map(|c| mean(&c[..n])).collect();
    let w = mean(
        &chains
            .iter()
            .map(|c| sample_variance(&c[..n]))
            .collect::<Vec<_>>(),
    );
    let nf = n as f64;
    let b = nf * sample_variance(&means);
    if w == 0.0 {
        return Ok(if b == 0.0 { 1.0 } else { f64::INFINITY });
    }
    Ok((((nf - 1.0) / nf * w + b / nf) / w).sqrt())
}
