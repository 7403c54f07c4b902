mod common;

use common::Law;
use frailfit::baseline::GwParams;
use frailfit::bayes::sampler::sample;
use frailfit::bayes::{LogTarget, McmcConfig};
use frailfit::frailty::{FrailtyLaw, GlFrailty, IgFrailty};
use frailfit::models::{ModelKind, ModelParams};
use frailfit::modelsel::{kaplan_meier, ks_one_sample};
use frailfit::simulate::{generate_with_frailties, CovariateLaw, SimConfig};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{ContinuousCDF, Gamma, Normal};

fn ig_cdf(w: f64, eta: f64) -> f64 {
    let n = Normal::standard();
    let lam = 1.0 / eta;
    let r = (lam / w).sqrt();
    n.cdf(r * (w - 1.0)) + (2.0 * lam).exp() * n.cdf(-r * (w + 1.0))
}

#[test]
fn inverse_gaussian_draws_follow_the_law() {
    for (eta, seed) in [(0.3, 1), (1.5, 2), (14.8, 3)] {
        let f = IgFrailty::new(eta).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let draws: Vec<f64> = (0..20_000).map(|_| f.sample(&mut rng)).collect();
        let (_, p) = ks_one_sample(&draws, |w| ig_cdf(w, eta));
        assert!(p > 0.001, "eta {eta}: K-S p {p}");
    }
}

#[test]
fn generalized_lindley_draws_follow_the_law() {
    for (eta, eps, seed) in [(0.5, 0.3, 4), (3.85, 1.17, 5), (2.0, 6.0, 6)] {
        let f = GlFrailty::new(eta, eps).unwrap();
        let ga = Gamma::new(1.0 / eta, 1.0 / eta).unwrap();
        let gb = Gamma::new(1.0 / eps, 1.0 / eps).unwrap();
        let p = eta / (eta + eps);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let draws: Vec<f64> = (0..20_000).map(|_| f.sample(&mut rng)).collect();
        let (_, pv) = ks_one_sample(&draws, |w| p * ga.cdf(w) + (1.0 - p) * gb.cdf(w));
        assert!(pv > 0.001, "({eta}, {eps}): K-S p {pv}");
    }
}

#[test]
fn simulated_marginal_matches_population_survival() {
    let cases = [
        (ModelKind::IgGw, IgFrailty::new(0.8).unwrap().into(), Law::Ig { eta: 0.8 }),
        (
            ModelKind::GlGw,
            GlFrailty::new(3.85, 1.17).unwrap().into(),
            Law::Gl { eta: 3.85, epsilon: 1.17 },
        ),
    ];
    let (zeta, delta, xi, beta, prob) = (2.0, 0.7, 1.5, 0.5, 0.6);
    for (kind, frailty, law) in cases {
        let cfg = SimConfig {
            kind,
            n: 20_000,
            true_params: ModelParams {
                baseline: GwParams::new(zeta, delta, xi).unwrap(),
                frailty,
                beta: vec![beta],
            },
            covariate_law: CovariateLaw::Bernoulli { p: prob },
            censoring_rate: 0.2,
            seed: 17,
        };
        let sim = generate_with_frailties(&cfg).unwrap();
        let mean_w = sim.frailties.iter().sum::<f64>() / sim.frailties.len() as f64;
        assert!((mean_w - 1.0).abs() < 0.1, "{kind}: mean frailty {mean_w}");
        let km = kaplan_meier(&sim.records);
        // the product-limit tail is noise once few subjects remain at risk
        let gap = km
            .event_times
            .iter()
            .zip(&km.survival)
            .filter(|(&t, _)| sim.records.iter().filter(|r| r.time >= t).count() >= 1000)
            .map(|(&t, &s)| {
                let cum = common::gw_cum_hazard(t, zeta, delta, xi);
                let pop = prob * law.laplace(cum * f64::exp(beta)) + (1.0 - prob) * law.laplace(cum);
                (s - pop).abs()
            })
            .fold(0.0, f64::max);
        assert!(gap < 0.02, "{kind}: sup gap {gap}");
    }
}

struct GammaTarget;

impl LogTarget for GammaTarget {
    type Cache = ();

    fn dim(&self) -> usize {
        1
    }

    fn log_density(&self, x: &[f64]) -> f64 {
        if x[0] <= 0.0 {
            return f64::NEG_INFINITY;
        }
        2.0 * x[0].ln() - x[0]
    }

    fn is_positive(&self, _: usize) -> bool {
        true
    }
}

#[test]
fn sampler_targets_gamma_three() {
    let cfg = McmcConfig {
        iterations: 1_001_000,
        burn_in: 1_000,
        thin: 1,
        chains: 1,
        ..McmcConfig::default()
    };
    let trace = sample(&GammaTarget, &cfg, &[1.0], 99, 0, None).unwrap();
    let exact = Gamma::new(3.0, 1.0).unwrap();
    let edges: Vec<f64> = (0..=24).map(|i| i as f64 * 0.5).collect();
    let mut counts = vec![0usize; edges.len()];
    for d in &trace.draws {
        let bin = edges.partition_point(|&e| e <= d[0]).min(edges.len()) - 1;
        counts[bin] += 1;
    }
    let n = trace.draws.len() as f64;
    let tv: f64 = (0..edges.len())
        .map(|i| {
            let hi = edges.get(i + 1).map_or(1.0, |&e| exact.cdf(e));
            let p = hi - exact.cdf(edges[i]);
            (counts[i] as f64 / n - p).abs()
        })
        .sum::<f64>()
        / 2.0;
    assert!(tv < 0.02, "total variation {tv}");
    assert!((0.10..=0.60).contains(&trace.acceptance_rates[0]));
}

struct Normal3;

impl LogTarget for Normal3 {
    type Cache = ();

    fn dim(&self) -> usize {
        3
    }

    fn log_density(&self, x: &[f64]) -> f64 {
        -0.5 * (x[0] * x[0] + x[1] * x[1] / 4.0 + x[2] * x[2] / 0.01)
    }

    fn is_positive(&self, _: usize) -> bool {
        false
    }
}

#[test]
fn adaptation_brings_acceptance_into_band() {
    let cfg = McmcConfig {
        iterations: 20_000,
        burn_in: 5_000,
        thin: 1,
        chains: 1,
        step_sizes: Some(vec![50.0, 1e-4, 3.0]),
        ..McmcConfig::default()
    };
    let trace = sample(&Normal3, &cfg, &[0.0; 3], 8, 0, None).unwrap();
    for r in &trace.acceptance_rates {
        assert!((0.10..=0.60).contains(r), "rates {:?}", trace.acceptance_rates);
    }
    let again = sample(&Normal3, &cfg, &[0.0; 3], 8, 0, None).unwrap();
    assert_eq!(again, trace);
}
