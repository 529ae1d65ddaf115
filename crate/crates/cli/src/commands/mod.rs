//! Subcommand implementations.

pub mod decode;
pub mod eval;
pub mod gtmaps;
pub mod synth;

use std::path::Path;

use lseval_core::metrics::MetricConfig;

use crate::error::{CliError, CliResult};

/// Worker count: `--jobs`, else `LSEVAL_JOBS`, else all available cores.
pub fn resolve_jobs(flag: Option<usize>) -> usize {
    flag.or_else(|| {
        std::env::var("LSEVAL_JOBS")
            .ok()
            .and_then(|v| v.parse().ok())
    })
    .filter(|n| *n > 0)
    .unwrap_or_else(|| {
        std::thread::available_parallelism()
            .map(|n| n.get())
            .unwrap_or(1)
    })
}

/// Builds a rayon pool with the resolved worker count and runs `f` in it.
/// Results are worker-count independent by construction, so the pool size
/// only affects wall time.
pub fn with_pool<T: Send>(jobs: usize, f: impl FnOnce() -> T + Send) -> CliResult<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| CliError::parse("<jobs>", e.to_string()))?;
    Ok(pool.install(f))
}

/// Metric config: defaults, overridden wholesale by `--config` JSON when
/// given. Unknown keys are rejected; missing keys keep their defaults.
pub fn load_metric_config(path: Option<&Path>) -> CliResult<MetricConfig> {
    let Some(path) = path else {
        return Ok(MetricConfig::default());
    };
    let text = std::fs::read_to_string(path).map_err(|e| CliError::parse(path, e.to_string()))?;
    let mut de = serde_json::Deserializer::from_str(&text);
    let cfg: MetricConfig = serde_path_to_error(&mut de, path)?;
    cfg.validate()
        .map_err(|e| CliError::parse(path, e.to_string()))?;
    Ok(cfg)
}

fn serde_path_to_error(
    de: &mut serde_json::Deserializer<serde_json::de::StrRead<'_>>,
    path: &Path,
) -> CliResult<MetricConfig> {
    serde::Deserialize::deserialize(de).map_err(|e| CliError::parse(path, e.to_string()))
}
