//! Drives the same pipeline as the command-line tool from TOML configs:
//! simulate a dataset, fit it and compare both models.
//!
//! `cargo run --release --example config_pipeline [out_dir]`

use std::path::{Path, PathBuf};

use frailfit::config::{Config, Overrides};
use frailfit::bayes::{PriorConfig, ScalarPrior};
use frailfit::models::ModelKind;
use frailfit::pipeline;

fn main() -> frailfit::Result<()> {
    let out = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(|| PathBuf::from("out/pipeline"));
    let here = Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/configs");
    let sim_cfg = Config::load(&here.join("simulate_ig.toml"))?;
    let (data, manifest) = pipeline::cmd_simulate(&sim_cfg, &out.join("sim"))?;
    println!("simulated {} records; data sha256 {}", data.len(), manifest.outputs[0].sha256);

    let frailty_prior = PriorConfig {
        frailty: ScalarPrior::Gamma { shape: 1.0, rate: 0.1 },
        ..PriorConfig::default()
    };
    let mut fits = Vec::new();
    for kind in ModelKind::ALL {
        let mut cfg = Config::default().resolved(&Overrides {
            seed: Some(5),
            model: Some(kind),
            iterations: Some(20_000),
            burn_in: Some(5_000),
            thin: Some(5),
        });
        cfg.priors = frailty_prior;
        let dir = out.join(kind.to_string());
        let report = pipeline::cmd_fit_dataset(&cfg, data.clone(), &dir, false)?;
        println!("{kind}: AIC {:.2}, K-S p {:.3}", report.criteria.criteria.aic, report.ks.p_value);
        fits.push(dir);
    }
    let (rows, _) = pipeline::cmd_compare(&fits, &out.join("compare"))?;
    let best = rows
        .iter()
        .min_by(|a, b| a.criteria.aic.total_cmp(&b.criteria.aic))
        .expect("two fits");
    println!("lowest AIC: {}", best.model);
    pipeline::verify_manifest(&out.join("compare"))?;
    Ok(())
}
