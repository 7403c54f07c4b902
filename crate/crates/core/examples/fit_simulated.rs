//! Simulates IG-GW data, fits it and sets the posterior against the truth.
//!
//! `cargo run --release --example fit_simulated`

use frailfit::prelude::*;

fn main() -> frailfit::Result<()> {
    let truth = ModelParams {
        baseline: GwParams::new(2.0, 0.7, 1.5)?,
        frailty: IgFrailty::new(0.8)?.into(),
        beta: vec![0.5],
    };
    let data = simulate::generate(&SimConfig {
        kind: ModelKind::IgGw,
        n: 1000,
        true_params: truth.clone(),
        covariate_law: CovariateLaw::Normal { mean: 0.0, sd: 1.0 },
        censoring_rate: 0.1,
        seed: 3,
    })?;
    let cfg = McmcConfig {
        iterations: 10_000,
        burn_in: 3_000,
        thin: 5,
        chains: 2,
        seed: 4,
        ..McmcConfig::default()
    };
    let priors = PriorConfig {
        frailty: ScalarPrior::Gamma { shape: 1.0, rate: 0.1 },
        ..PriorConfig::default()
    };
    let chains = bayes::run_fit(ModelKind::IgGw, &data, &cfg, &priors)?;
    let summary = diagnostics::summarize_chains(&chains)?;
    println!("{:>8} {:>8} {:>8} {:>18}", "param", "truth", "mean", "95% interval");
    for (p, t) in summary.params.iter().zip(truth.to_vec()) {
        println!("{:>8} {t:>8.3} {:>8.3}   [{:.3}, {:.3}]", p.name, p.mean, p.lcl, p.ucl);
    }
    println!("acceptance rates, chain 1: {:.2?}", chains[0].acceptance_rates);
    Ok(())
}
