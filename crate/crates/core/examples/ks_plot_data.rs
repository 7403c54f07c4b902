//! Kolmogorov-Smirnov fit of a model curve against the Kaplan-Meier curve,
//! plus the table behind a survival plot.
//!
//! `cargo run --release --example ks_plot_data [plot.csv]`

use frailfit::prelude::*;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let truth = ModelParams {
        baseline: GwParams::new(2.0, 0.7, 1.5)?,
        frailty: IgFrailty::new(0.8)?.into(),
        beta: vec![0.5],
    };
    let data = simulate::generate(&SimConfig {
        kind: ModelKind::IgGw,
        n: 400,
        true_params: truth.clone(),
        covariate_law: CovariateLaw::default(),
        censoring_rate: 0.15,
        seed: 21,
    })?;
    let wrong = ModelParams {
        baseline: GwParams::new(1.0, 1.5, 1.0)?,
        ..truth.clone()
    };
    for (label, p) in [("true parameters", &truth), ("misspecified baseline", &wrong)] {
        let ks = modelsel::ks_gof(ModelKind::IgGw, &data, p)?;
        println!("{label}: D {:.4}, p {:.4} ({} events)", ks.statistic, ks.p_value, ks.n_events);
    }
    let rows = modelsel::plot_data(ModelKind::IgGw, &data, &truth)?;
    match std::env::args().nth(1) {
        Some(path) => {
            let f = std::fs::File::create(&path)?;
            modelsel::write_plot_csv(&rows, f)?;
            println!("wrote {} rows to {path}", rows.len());
        }
        None => modelsel::write_plot_csv(&rows[..10.min(rows.len())], std::io::stdout().lock())?,
    }
    Ok(())
}
