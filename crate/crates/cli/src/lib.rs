//! Experiment runner for perclab: strict configs, seeded execution,
//! JSON summaries and CSV data files carrying replay provenance.

pub mod config;
pub mod error;
pub mod experiments;
pub mod registry;

use std::path::Path;

use serde_json::{json, Value as Json};

use config::ExperimentConfig;
use error::CliError;
use experiments::Status;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
pub const ARTIFACT: &str = "perclab";

pub struct Execution {
    pub summary: Json,
    pub csv: Option<String>,
    pub status: Status,
}

/// Runs the experiment on a pool of the configured size. Nothing is written.
pub fn execute(cfg: &ExperimentConfig) -> Result<Execution, CliError> {
    let threads = cfg.thread_count()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::Io(format!("cannot start worker pool: {e}")))?;
    let outcome = pool.install(|| experiments::run(cfg))?;
    let hash = cfg.hash();
    let summary = json!({
        "artifact": ARTIFACT,
        "version": VERSION,
        "experiment": cfg.def.name,
        "config_hash": hash,
        "seed": cfg.seed,
        "spec": cfg.spec.as_ref().map(|s| s.to_string()),
        "params": cfg.params_json(),
        "status": outcome.status.label(),
        "results": outcome.results,
        "outputs": { "csv": cfg.csv.as_ref().map(|p| p.display().to_string()) },
    });
    let csv = outcome.csv.map(|body| {
        format!(
            "# {ARTIFACT} version={VERSION} config_sha256={hash} seed={} experiment={}\n{body}",
            cfg.seed, cfg.def.name
        )
    });
    Ok(Execution {
        summary,
        csv,
        status: outcome.status,
    })
}

/// `run`: executes, writes the CSV (if configured) and the summary, and
/// returns the exit code for the run status.
pub fn run(config_path: &Path, overrides: &[String], stdout: &mut impl std::io::Write) -> Result<i32, CliError> {
    let cfg = config::load(config_path, overrides)?;
    let exec = execute(&cfg)?;
    if let (Some(path), Some(body)) = (&cfg.csv, &exec.csv) {
        std::fs::write(path, body).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    }
    let text = format!("{}\n", serde_json::to_string_pretty(&exec.summary).expect("json"));
    if let Some(path) = &cfg.summary {
        std::fs::write(path, &text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    }
    stdout.write_all(text.as_bytes())?;
    Ok(exec.status.exit_code())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReplayReport {
    pub matches: bool,
    pub diagnostics: Vec<String>,
}

/// Re-runs `config` and compares the statistics with a stored summary.
pub fn replay_check(summary_path: &Path, config_path: &Path, overrides: &[String]) -> Result<ReplayReport, CliError> {
    let text = std::fs::read_to_string(summary_path)
        .map_err(|e| CliError::Io(format!("{}: {e}", summary_path.display())))?;
    let stored: Json =
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!("summary is not JSON: {e}")))?;
    let version = stored.get("version").and_then(Json::as_str).unwrap_or("<missing>");
    if version != VERSION {
        return Err(CliError::VersionMismatch {
            summary: version.to_string(),
            running: VERSION.to_string(),
        });
    }
    let cfg = config::load(config_path, overrides)?;
    let fresh = execute(&cfg)?.summary;
    let mut diagnostics = Vec::new();
    let field = |v: &Json, k: &str| v.get(k).cloned().unwrap_or(Json::Null);
    let replicas = |v: &Json| v.get("params").and_then(|p| p.get("replicas")).cloned();
    if replicas(&stored) != replicas(&fresh) {
        diagnostics.push(format!(
            "replica count differs: summary {}, config {}",
            replicas(&stored).unwrap_or(Json::Null),
            replicas(&fresh).unwrap_or(Json::Null)
        ));
    }
    for key in ["experiment", "seed", "config_hash", "spec", "params", "status", "results"] {
        let (a, b) = (field(&stored, key), field(&fresh, key));
        if a != b {
            diagnostics.push(format!("{key} differs: summary {a}, replay {b}"));
        }
    }
    Ok(ReplayReport {
        matches: diagnostics.is_empty(),
        diagnostics,
    })
}
