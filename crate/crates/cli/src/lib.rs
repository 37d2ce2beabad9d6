//! Config-driven runner: parse and validate a study, compute it, then emit
//! CSV tables and a manifest.

pub mod config;
pub mod error;
pub mod output;
pub mod scenarios;
pub mod studies;

use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use serde::Serialize;

pub use config::{parse, RunConfig, Study};
pub use error::CliError;
use output::{Artifact, OutputDir, MANIFEST_FILE};
use studies::AdequacyEntry;

/// Environment variable that overrides the configured output directory.
pub const OUT_DIR_ENV: &str = "CATASTROPHE_OUT_DIR";

#[derive(Debug, Clone, Serialize)]
pub struct Timings {
    pub started_unix_seconds: f64,
    pub compute_seconds: f64,
    pub write_seconds: f64,
    pub total_seconds: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub library_version: &'static str,
    pub format_version: i64,
    pub subcommand: &'static str,
    pub scenario: Option<String>,
    pub rng_seed: u64,
    pub config: RunConfig,
    pub config_text: String,
    pub artifacts: Vec<Artifact>,
    pub timings: Timings,
    pub adequacy: Vec<AdequacyEntry>,
    pub summary: serde_json::Value,
}

/// Picks the output directory: explicit flag, then environment, then config.
pub fn resolve_output_dir(flag: Option<&Path>, env: Option<PathBuf>, cfg: &RunConfig) -> Result<PathBuf, CliError> {
    flag.map(Path::to_path_buf)
        .or(env)
        .or_else(|| cfg.output_dir.clone())
        .ok_or_else(|| CliError::Validation {
            field: "run.output_dir".into(),
            reason: format!("no output directory; set it in the config, via {OUT_DIR_ENV}, or with --out"),
        })
}

/// Runs a parsed configuration and writes every artifact into `dir`.
pub fn execute(cfg: &RunConfig, config_text: &str, dir: &Path, scenario: Option<&str>) -> Result<RunManifest, CliError> {
    let started = Instant::now();
    let started_unix_seconds = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs_f64())
        .unwrap_or(0.0);

    let outcome = studies::execute(&cfg.study)?;
    let rendered = outcome
        .tables
        .iter()
        .map(|t| Ok((t.file.clone(), t.render()?)))
        .collect::<Result<Vec<_>, CliError>>()?;
    let compute_seconds = started.elapsed().as_secs_f64();

    let mut out = OutputDir::open(dir)?;
    let artifacts = rendered
        .iter()
        .map(|(name, bytes)| out.place(name, bytes))
        .collect::<Result<Vec<_>, _>>()?;
    let total = started.elapsed().as_secs_f64();
    let manifest = RunManifest {
        tool: "catastrophe",
        library_version: catastrophe_core::VERSION,
        format_version: cfg.format_version,
        subcommand: cfg.study.name(),
        scenario: scenario.map(str::to_string),
        rng_seed: cfg.rng_seed,
        config: cfg.clone(),
        config_text: config_text.to_string(),
        artifacts,
        timings: Timings {
            started_unix_seconds,
            compute_seconds,
            write_seconds: total - compute_seconds,
            total_seconds: total,
        },
        adequacy: outcome.adequacy,
        summary: outcome.summary,
    };
    let json = serde_json::to_vec_pretty(&manifest)
        .map_err(|e| CliError::Io(format!("manifest: {e}")))?;
    out.place(MANIFEST_FILE, &json)?;
    out.commit();
    Ok(manifest)
}
