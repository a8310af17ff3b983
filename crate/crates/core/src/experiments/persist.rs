//! Running a configuration file and writing its CSV and metadata sidecar.
//!
//! Rows go to `<output>.partial` and are flushed as each scan point
//! finishes; the file is renamed into place only after the run completes.
//! Wall time lives in the sidecar so the CSV stays byte-identical across
//! reruns with the same seed.

use std::fs::{self, File};
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use serde_json::json;
use sha2::{Digest, Sha256};

use super::config::{Criterion, ExperimentConfig, ExperimentKind};
use super::{
    concentration_experiment, gue_approx_experiment, monotonicity_experiment, point_stream,
    spectral_experiment, threshold_scan_with, ScanPlan,
};
use crate::error::{Error, Result};
use crate::separability::PSD_TOLERANCE;

pub const SEED_ENV: &str = "ENTANGLAB_SEED";
pub const THREADS_ENV: &str = "ENTANGLAB_THREADS";

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

/// Caps the global rayon pool at `ENTANGLAB_THREADS` workers if set.
/// Returns the cap that was applied.
pub fn configure_threads_from_env() -> Result<Option<usize>> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(None);
    };
    let n: usize = raw.trim().parse().ok().filter(|&n| n >= 1).ok_or_else(|| {
        Error::input(format!(
            "{THREADS_ENV} must be a positive integer, got '{raw}'"
        ))
    })?;
    // a second call in the same process keeps the existing pool
    let _ = rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global();
    Ok(Some(n))
}

fn seed_from_env() -> Result<Option<u64>> {
    match std::env::var(SEED_ENV) {
        Ok(raw) => raw.trim().parse().map(Some).map_err(|_| {
            Error::input(format!(
                "{SEED_ENV} must be an unsigned 64-bit integer, got '{raw}'"
            ))
        }),
        Err(_) => Ok(None),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunSummary {
    pub csv_path: PathBuf,
    pub sidecar_path: PathBuf,
    pub rows: usize,
    pub master_seed: u64,
    pub details: serde_json::Value,
}

struct CsvSink {
    partial: PathBuf,
    target: PathBuf,
    writer: csv::Writer<File>,
    rows: usize,
}

impl CsvSink {
    fn create(target: &Path, header: &[&str]) -> Result<Self> {
        if let Some(parent) = target.parent().filter(|p| !p.as_os_str().is_empty()) {
            fs::create_dir_all(parent)?;
        }
        let mut name = target.as_os_str().to_owned();
        name.push(".partial");
        let partial = PathBuf::from(name);
        let mut writer = csv::Writer::from_writer(File::create(&partial)?);
        writer.write_record(header).map_err(csv_err)?;
        Ok(Self {
            partial,
            target: target.to_path_buf(),
            writer,
            rows: 0,
        })
    }

    fn row(&mut self, fields: &[String]) -> Result<()> {
        self.writer.write_record(fields).map_err(csv_err)?;
        self.writer.flush()?;
        self.rows += 1;
        Ok(())
    }

    fn finish(mut self) -> Result<usize> {
        self.writer.flush()?;
        drop(self.writer);
        fs::rename(&self.partial, &self.target)?;
        Ok(self.rows)
    }
}

fn csv_err(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Io(std::io::Error::other(format!("{other:?}"))),
    }
}

fn f(x: f64) -> String {
    format!("{x}")
}

/// Sidecar path for a CSV output: the same path with a `.json` extension.
pub fn sidecar_path(csv: &Path) -> PathBuf {
    csv.with_extension("json")
}

/// Parses, validates and executes a configuration file.
pub fn run_config(path: &Path) -> Result<RunSummary> {
    let raw = fs::read_to_string(path)?;
    let cfg = ExperimentConfig::from_json_str(&raw)?;
    let (seed, seed_source) = match seed_from_env()? {
        Some(s) => (s, "env"),
        None => (cfg.master_seed, "config"),
    };
    let started = Instant::now();
    let (rows, details) = execute(&cfg, seed)?;
    let sidecar = sidecar_path(&cfg.output);
    let meta = json!({
        "experiment": cfg.experiment,
        "master_seed": seed,
        "seed_source": seed_source,
        "config_path": path,
        "config_sha256": sha256_hex(raw.as_bytes()),
        "version": env!("CARGO_PKG_VERSION"),
        "wall_time_seconds": started.elapsed().as_secs_f64(),
        "csv": cfg.output,
        "rows": rows,
        "summary": details,
    });
    fs::write(&sidecar, serde_json::to_string_pretty(&meta)? + "\n")?;
    Ok(RunSummary {
        csv_path: cfg.output.clone(),
        sidecar_path: sidecar,
        rows,
        master_seed: seed,
        details,
    })
}

fn execute(cfg: &ExperimentConfig, seed: u64) -> Result<(usize, serde_json::Value)> {
    let s_list = cfg.s_list();
    match cfg.experiment {
        ExperimentKind::ThresholdScan => {
            let criterion = cfg.criterion.unwrap_or(Criterion::Ppt);
            let mut plan = ScanPlan::new(cfg.product_dims()?, s_list, cfg.trials, criterion, seed)?;
            plan.psd_tolerance = cfg.tolerance.psd.unwrap_or(PSD_TOLERANCE);
            let header = [
                "s",
                "trials",
                "successes",
                criterion.probability_label(),
                "ci_low",
                "ci_high",
            ];
            let mut sink = CsvSink::create(&cfg.output, &header)?;
            let result = threshold_scan_with(&plan, |r| {
                sink.row(&[
                    r.s.to_string(),
                    r.trials.to_string(),
                    r.successes.to_string(),
                    f(r.p_hat),
                    f(r.ci_low),
                    f(r.ci_high),
                ])
            })?;
            let rows = sink.finish()?;
            Ok((
                rows,
                json!({
                    "dims": result.dims,
                    "criterion": result.criterion,
                    "crossing": result.crossing,
                    "monotone_within_2sigma": result.monotone_within_2sigma,
                    "bound_entanglement_window": result.bound_entanglement_window,
                }),
            ))
        }
        ExperimentKind::Spectral => {
            let kind = cfg.ensemble.expect("validated");
            let n = cfg.product_dims()?.total();
            let header = [
                "trial",
                "n",
                "s",
                "ensemble",
                "dinf",
                "alpha",
                "beta",
                "lambda_max",
                "lambda_min",
            ];
            let mut sink = CsvSink::create(&cfg.output, &header)?;
            let points: Vec<Option<usize>> = if s_list.is_empty() {
                vec![None]
            } else {
                s_list.iter().copied().map(Some).collect()
            };
            for s in points {
                let stream = point_stream(seed, s.unwrap_or(0));
                for r in spectral_experiment(kind, n, s, cfg.trials, stream)? {
                    sink.row(&[
                        r.trial.to_string(),
                        r.n.to_string(),
                        r.s.map(|s| s.to_string()).unwrap_or_default(),
                        r.ensemble.to_string(),
                        f(r.dinf),
                        f(r.alpha),
                        f(r.beta),
                        f(r.lambda_max),
                        f(r.lambda_min),
                    ])?;
                }
            }
            let rows = sink.finish()?;
            Ok((rows, json!({ "ensemble": kind, "n": n })))
        }
        ExperimentKind::Concentration => {
            let body = cfg.body.expect("validated");
            let dims = cfg.product_dims()?;
            let header = [
                "s_base",
                "s",
                "trials",
                "mean",
                "median",
                "std",
                "stderr",
                "std_ratio",
            ];
            let mut sink = CsvSink::create(&cfg.output, &header)?;
            let mut ratios = Vec::new();
            for &s in &s_list {
                let c =
                    concentration_experiment(&dims, s, body, cfg.trials, point_stream(seed, s))?;
                for g in [c.at_s, c.at_4s] {
                    sink.row(&[
                        s.to_string(),
                        g.s.to_string(),
                        g.trials.to_string(),
                        f(g.mean),
                        f(g.median),
                        f(g.std),
                        f(g.stderr),
                        f(c.std_ratio),
                    ])?;
                }
                ratios.push(json!({ "s": s, "std_ratio": c.std_ratio }));
            }
            let rows = sink.finish()?;
            Ok((rows, json!({ "body": body, "std_ratios": ratios })))
        }
        ExperimentKind::GueApprox => {
            let body = cfg.body.expect("validated");
            let dims = cfg.product_dims()?;
            let header = [
                "n",
                "s",
                "body",
                "trials",
                "ratio",
                "ratio_se",
                "state_gauge_mean",
                "gue_gauge_mean",
            ];
            let mut sink = CsvSink::create(&cfg.output, &header)?;
            for &s in &s_list {
                let r = gue_approx_experiment(&dims, s, body, cfg.trials, point_stream(seed, s))?;
                sink.row(&[
                    r.n.to_string(),
                    r.s.to_string(),
                    r.body.to_string(),
                    cfg.trials.to_string(),
                    f(r.ratio),
                    f(r.ratio_se),
                    f(r.state_gauge.mean),
                    f(r.gue_gauge.mean),
                ])?;
            }
            let rows = sink.finish()?;
            Ok((rows, json!({ "body": body, "n": dims.total() })))
        }
        ExperimentKind::Monotonicity => {
            let (d1, d2) = (cfg.dims[0], cfg.dims[1]);
            let header = [
                "coupling",
                "s",
                "d_large",
                "s_large",
                "d_small",
                "s_small",
                "trials",
                "p_larger",
                "p_smaller",
                "violations",
                "holds",
                "direct_larger",
                "direct_smaller",
            ];
            let mut sink = CsvSink::create(&cfg.output, &header)?;
            let mut all_hold = true;
            for &s in &s_list {
                let m = monotonicity_experiment(d1, d2, s, cfg.trials, point_stream(seed, s))?;
                for (name, c) in [
                    ("projection", m.projection),
                    ("partial_trace", m.partial_trace),
                ] {
                    all_hold &= c.holds;
                    sink.row(&[
                        name.to_string(),
                        s.to_string(),
                        c.d_large.to_string(),
                        c.s_large.to_string(),
                        c.d_small.to_string(),
                        c.s_small.to_string(),
                        c.trials.to_string(),
                        f(c.p_larger),
                        f(c.p_smaller),
                        c.violations.to_string(),
                        c.holds.to_string(),
                        f(c.direct_larger),
                        f(c.direct_smaller),
                    ])?;
                }
            }
            let rows = sink.finish()?;
            Ok((rows, json!({ "d1": d1, "d2": d2, "all_hold": all_hold })))
        }
    }
}
