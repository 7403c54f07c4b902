//! Fits both models to the bladder recurrence data and compares them.
//!
//! Run `python scripts/fetch_datasets.py` first, then
//! `cargo run --release --example bladder_compare [path/to/bladder1.csv]`.

use std::path::PathBuf;

use frailfit::io::{load_dataset, DataFormat};
use frailfit::prelude::*;

fn main() -> frailfit::Result<()> {
    let path = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("data/bladder1.csv"));
    let (data, report) = load_dataset(&path, &DataFormat::Bladder1, &CsvSchema::default())?;
    println!(
        "{} records kept of {} ({} events)",
        report.rows_kept,
        report.rows_read,
        data.num_events()
    );

    let cfg = McmcConfig {
        iterations: 20_000,
        burn_in: 5_000,
        thin: 15,
        chains: 2,
        seed: 11,
        ..McmcConfig::default()
    };
    let mut rows = Vec::new();
    for kind in ModelKind::ALL {
        let start = std::time::Instant::now();
        let chains = bayes::run_fit(kind, &data.records, &cfg, &PriorConfig::default())?;
        let summary = diagnostics::summarize_chains(&chains)?;
        let mean = chains[0].posterior_mean_params()?;
        let loglik = frailfit::models::log_likelihood(kind, &data.records, &mean)?;
        let k = kind.num_params(data.covariate_names.len());
        let criteria = modelsel::info_criteria(loglik, k, data.len())?;
        let ks = modelsel::ks_gof(kind, &data.records, &mean)?;
        println!("\n{kind} ({:.1?})", start.elapsed());
        summary.write_csv(std::io::stdout())?;
        println!("K-S D = {:.4}, p = {:.4}", ks.statistic, ks.p_value);
        rows.push(modelsel::CriteriaRow {
            model: kind.to_string(),
            criteria,
        });
    }
    println!();
    modelsel::write_comparison_csv(&rows, std::io::stdout())?;
    Ok(())
}
