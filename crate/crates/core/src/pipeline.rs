//! End-to-end commands behind the `frailfit` binary. Every command writes
//! only into its output directory and finishes with a `manifest.json`
//! listing the files it produced together with their SHA-256 digests.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::bayes::{self, Chain, Progress};
use crate::config::Config;
use crate::diagnostics::{self, PosteriorSummary};
use crate::error::{Error, Result};
use crate::io::{load_dataset, Dataset};
use crate::models::{log_likelihood, ModelKind};
use crate::modelsel::{self, CriteriaRow, KsResult};
use crate::simulate;

pub const MANIFEST_FILE: &str = "manifest.json";
pub const SUMMARY_FILE: &str = "summary.csv";
pub const CRITERIA_FILE: &str = "criteria.csv";
pub const KS_FILE: &str = "ks.csv";
pub const PLOT_FILE: &str = "plot.csv";
pub const DATA_FILE: &str = "data.csv";
pub const COMPARISON_FILE: &str = "comparison.csv";

pub fn chain_file(index: usize) -> String {
    format!("chain_{}.csv", index + 1)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputFile {
    pub name: String,
    pub sha256: String,
    pub bytes: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub config_sha256: String,
    pub seed: Option<u64>,
    /// Seconds since the Unix epoch.
    pub started: u64,
    pub finished: u64,
    pub version: String,
    pub inputs: Vec<String>,
    pub outputs: Vec<OutputFile>,
}

fn unix_now() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

/// The only way commands write files: plain file names inside one
/// directory, each recorded for the manifest.
struct OutDir {
    root: PathBuf,
    written: Vec<OutputFile>,
}

impl OutDir {
    fn create(root: &Path) -> Result<Self> {
        fs::create_dir_all(root).map_err(|e| Error::io(root, e))?;
        Ok(OutDir {
            root: root.to_path_buf(),
            written: Vec::new(),
        })
    }

    fn write(&mut self, name: &str, bytes: &[u8]) -> Result<()> {
        let plain = Path::new(name)
            .file_name()
            .is_some_and(|f| f == name)
            && name != "..";
        if !plain {
            return Err(Error::config(format!("refusing to write {name:?} outside the output directory")));
        }
        let path = self.root.join(name);
        fs::write(&path, bytes).map_err(|e| Error::io(&path, e))?;
        self.written.push(OutputFile {
            name: name.to_string(),
            sha256: sha256_hex(bytes),
            bytes: bytes.len() as u64,
        });
        Ok(())
    }

    fn write_with(&mut self, name: &str, f: impl FnOnce(&mut Vec<u8>) -> Result<()>) -> Result<()> {
        let mut buf = Vec::new();
        f(&mut buf)?;
        self.write(name, &buf)
    }

    fn finish(mut self, mut manifest: RunManifest) -> Result<RunManifest> {
        manifest.outputs = std::mem::take(&mut self.written);
        manifest.finished = unix_now();
        let json = serde_json::to_vec_pretty(&manifest)?;
        let path = self.root.join(MANIFEST_FILE);
        fs::write(&path, json).map_err(|e| Error::io(&path, e))?;
        Ok(manifest)
    }
}

fn manifest(command: &str, cfg: Option<&Config>, inputs: Vec<String>) -> Result<RunManifest> {
    let config_sha256 = match cfg {
        Some(c) => sha256_hex(c.to_json()?.as_bytes()),
        None => String::new(),
    };
    Ok(RunManifest {
        command: command.to_string(),
        config_sha256,
        seed: cfg.map(Config::seed),
        started: unix_now(),
        finished: 0,
        version: env!("CARGO_PKG_VERSION").to_string(),
        inputs,
        outputs: Vec::new(),
    })
}

/// Prints sampler progress to stderr.
pub fn stderr_progress(p: &Progress<'_>) {
    let rates: Vec<String> = p
        .acceptance_rates
        .iter()
        .map(|r| if r.is_nan() { "-".into() } else { format!("{r:.2}") })
        .collect();
    eprintln!(
        "chain {}: iteration {}/{} acceptance [{}]",
        p.chain + 1,
        p.iteration,
        p.total,
        rates.join(" ")
    );
}

/// Everything `fit` computes, besides what it writes.
#[derive(Debug, Clone)]
pub struct FitReport {
    pub kind: ModelKind,
    pub dataset: Dataset,
    pub chains: Vec<Chain>,
    pub summary: PosteriorSummary,
    pub criteria: CriteriaRow,
    pub ks: KsResult,
    pub manifest: RunManifest,
}

fn load_config_data(cfg: &Config) -> Result<Dataset> {
    let d = cfg
        .data
        .as_ref()
        .ok_or_else(|| Error::config("missing [data] section"))?;
    Ok(load_dataset(&d.path, &d.format, &d.schema)?.0)
}

fn write_ks_csv(ks: &KsResult, model: &str, w: &mut Vec<u8>) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["Model", "D", "p-value", "n_events", "note"])?;
    out.write_record([
        model.to_string(),
        format!("{:.5}", ks.statistic),
        format!("{:.5}", ks.p_value),
        ks.n_events.to_string(),
        "asymptotic Kolmogorov p-value; approximate under censoring".into(),
    ])?;
    out.flush().map_err(|e| Error::io(KS_FILE, e))?;
    Ok(())
}

/// Fits the configured model to the configured dataset. Writes one CSV per
/// chain, the posterior summary, information criteria, the K-S result and
/// the Kaplan-Meier/model plot table.
pub fn cmd_fit(cfg: &Config, out: &Path, progress: bool) -> Result<FitReport> {
    cfg.validate()?;
    let dataset = load_config_data(cfg)?;
    cmd_fit_dataset(cfg, dataset, out, progress)
}

/// [`cmd_fit`] on an already loaded dataset.
pub fn cmd_fit_dataset(cfg: &Config, dataset: Dataset, out: &Path, progress: bool) -> Result<FitReport> {
    cfg.validate()?;
    let mut manifest = manifest("fit", Some(cfg), vec![dataset.source.clone()])?;
    let kind = cfg.model.kind;
    let init = cfg.model.init.as_ref().map(|p| p.to_params(kind)).transpose()?;
    let observer: &(dyn Fn(&Progress<'_>) + Sync) = &stderr_progress;
    let chains = bayes::run_fit_with(
        kind,
        &dataset.records,
        &cfg.mcmc,
        &cfg.priors,
        init.as_ref(),
        progress.then_some(observer),
    )?;

    let summary = diagnostics::summarize_chains_with(
        &chains,
        cfg.diagnose.geweke_first,
        cfg.diagnose.geweke_last,
    )?;
    let estimate = chains[0].posterior_mean_params()?;
    let loglik = log_likelihood(kind, &dataset.records, &estimate)?;
    let k = kind.num_params(dataset.covariate_names.len());
    let criteria = CriteriaRow {
        model: kind.to_string(),
        criteria: modelsel::info_criteria(loglik, k, dataset.len())?,
    };
    let ks = modelsel::ks_gof(kind, &dataset.records, &estimate)?;
    let plot = modelsel::plot_data(kind, &dataset.records, &estimate)?;

    let mut dir = OutDir::create(out)?;
    for (i, c) in chains.iter().enumerate() {
        dir.write_with(&chain_file(i), |w| c.write_csv(w))?;
    }
    dir.write_with(SUMMARY_FILE, |w| summary.write_csv(w))?;
    dir.write_with(CRITERIA_FILE, |w| {
        modelsel::write_comparison_csv(std::slice::from_ref(&criteria), w)
    })?;
    dir.write_with(KS_FILE, |w| write_ks_csv(&ks, &criteria.model, w))?;
    dir.write_with(PLOT_FILE, |w| modelsel::write_plot_csv(&plot, w))?;
    manifest = dir.finish(manifest)?;

    Ok(FitReport {
        kind,
        dataset,
        chains,
        summary,
        criteria,
        ks,
        manifest,
    })
}

/// Generates a dataset from the `[simulate]` section and writes it as
/// `data.csv` with covariates named `x1, x2, ...`.
pub fn cmd_simulate(cfg: &Config, out: &Path) -> Result<(Dataset, RunManifest)> {
    cfg.validate()?;
    let sim = cfg.sim_config()?;
    let manifest = manifest("simulate", Some(cfg), Vec::new())?;
    let records = simulate::generate(&sim)?;
    let names = (1..=sim.true_params.beta.len()).map(|i| format!("x{i}")).collect();
    let dataset = Dataset::new(records, names, format!("simulated {} (seed {})", sim.kind, sim.seed))?;
    let mut dir = OutDir::create(out)?;
    dir.write_with(DATA_FILE, |w| dataset.write_csv(w))?;
    let manifest = dir.finish(manifest)?;
    Ok((dataset, manifest))
}

fn read_chain(path: &Path) -> Result<Chain> {
    let f = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    Chain::read_csv(f)
}

/// Summarizes chain CSVs written by `fit`; Gelman-Rubin statistics need at
/// least two of them.
pub fn cmd_diagnose(chain_paths: &[PathBuf], cfg: &Config, out: &Path) -> Result<(PosteriorSummary, RunManifest)> {
    if chain_paths.is_empty() {
        return Err(Error::config("diagnose needs at least one chain file"));
    }
    cfg.validate()?;
    let inputs = chain_paths.iter().map(|p| p.display().to_string()).collect();
    let manifest = manifest("diagnose", Some(cfg), inputs)?;
    let chains = chain_paths
        .iter()
        .map(|p| read_chain(p))
        .collect::<Result<Vec<_>>>()?;
    let summary =
        diagnostics::summarize_chains_with(&chains, cfg.diagnose.geweke_first, cfg.diagnose.geweke_last)?;
    let mut dir = OutDir::create(out)?;
    dir.write_with(SUMMARY_FILE, |w| summary.write_csv(w))?;
    let manifest = dir.finish(manifest)?;
    Ok((summary, manifest))
}

/// Collects the criteria of two or more fits into one table. Each input is
/// a `fit` output directory or a criteria CSV.
pub fn cmd_compare(fits: &[PathBuf], out: &Path) -> Result<(Vec<CriteriaRow>, RunManifest)> {
    if fits.len() < 2 {
        return Err(Error::config("compare needs at least two fits"));
    }
    let inputs = fits.iter().map(|p| p.display().to_string()).collect();
    let manifest = manifest("compare", None, inputs)?;
    let mut rows = Vec::new();
    for p in fits {
        let file = if p.is_dir() { p.join(CRITERIA_FILE) } else { p.clone() };
        let f = fs::File::open(&file).map_err(|e| Error::io(&file, e))?;
        rows.extend(modelsel::read_comparison_csv(f)?);
    }
    let mut dir = OutDir::create(out)?;
    dir.write_with(COMPARISON_FILE, |w| modelsel::write_comparison_csv(&rows, w))?;
    let manifest = dir.finish(manifest)?;
    Ok((rows, manifest))
}

/// Recomputes the digest of every output listed in a manifest.
pub fn verify_manifest(dir: &Path) -> Result<()> {
    let path = dir.join(MANIFEST_FILE);
    let text = fs::read(&path).map_err(|e| Error::io(&path, e))?;
    let m: RunManifest = serde_json::from_slice(&text)?;
    for f in &m.outputs {
        let p = dir.join(&f.name);
        let bytes = fs::read(&p).map_err(|e| Error::io(&p, e))?;
        if sha256_hex(&bytes) != f.sha256 {
            return Err(Error::Diagnostics(format!("checksum mismatch for {}", f.name)));
        }
    }
    Ok(())
}
