//! Generates a censored IG-GW dataset and writes it as CSV.
//!
//! `cargo run --example simulate_dataset [out.csv]`

use frailfit::prelude::*;

fn main() -> frailfit::Result<()> {
    let cfg = SimConfig {
        kind: ModelKind::IgGw,
        n: 500,
        true_params: ModelParams {
            baseline: GwParams::new(2.0, 0.7, 1.5)?,
            frailty: IgFrailty::new(0.8)?.into(),
            beta: vec![0.5, -0.3],
        },
        covariate_law: CovariateLaw::Bernoulli { p: 0.6 },
        censoring_rate: 0.15,
        seed: 2024,
    };
    let sim = simulate::generate_with_frailties(&cfg)?;
    let data = Dataset::new(sim.records, vec!["x1".into(), "x2".into()], "simulated")?;
    let mean_w = sim.frailties.iter().sum::<f64>() / sim.frailties.len() as f64;
    println!(
        "{} records, {} events, mean latent frailty {mean_w:.3}",
        data.len(),
        data.num_events()
    );
    match std::env::args().nth(1) {
        Some(path) => {
            data.save(path.as_ref())?;
            println!("wrote {path}");
        }
        None => data.write_csv(std::io::stdout().lock())?,
    }
    Ok(())
}
