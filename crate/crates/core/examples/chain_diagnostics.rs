//! Geweke and Gelman-Rubin diagnostics of a short and a long run on the
//! same data: the short run starts far from the posterior and has not
//! settled.
//!
//! `cargo run --release --example chain_diagnostics`

use frailfit::prelude::*;

fn main() -> frailfit::Result<()> {
    let truth = ModelParams {
        baseline: GwParams::new(2.0, 0.7, 1.5)?,
        frailty: IgFrailty::new(0.8)?.into(),
        beta: vec![0.5],
    };
    let data = simulate::generate(&SimConfig {
        kind: ModelKind::IgGw,
        n: 300,
        true_params: truth,
        covariate_law: CovariateLaw::default(),
        censoring_rate: 0.15,
        seed: 8,
    })?;
    let far = ModelParams {
        baseline: GwParams::new(20.0, 0.05, 0.3)?,
        frailty: IgFrailty::new(5.0)?.into(),
        beta: vec![-2.0],
    };
    let priors = PriorConfig {
        frailty: ScalarPrior::Gamma { shape: 1.0, rate: 0.1 },
        ..PriorConfig::default()
    };
    for (label, iterations) in [("short", 1_200), ("long", 30_000)] {
        let cfg = McmcConfig {
            iterations,
            burn_in: iterations / 6,
            thin: 1,
            chains: 2,
            seed: 12,
            ..McmcConfig::default()
        };
        let chains = bayes::run_fit_with(ModelKind::IgGw, &data, &cfg, &priors, Some(&far), None)?;
        let s = diagnostics::summarize_chains(&chains)?;
        println!("{label} run ({iterations} iterations)");
        for p in &s.params {
            println!(
                "  {:>6}: mean {:>8.3}  Geweke z {:>7.2}  PSRF {:>6.3}",
                p.name,
                p.mean,
                p.geweke_z.unwrap_or(f64::NAN),
                p.gelman_rubin.unwrap_or(f64::NAN)
            );
        }
    }
    Ok(())
}
