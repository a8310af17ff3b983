//! JSON experiment configuration.
//!
//! Unknown keys are rejected. Syntax errors carry serde's line number;
//! validation errors point at the line of the offending key.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use super::{check_body_dims, criterion_exact_allowed, GaugeBody};
use crate::ensembles::EnsembleKind;
use crate::error::{Error, Result};
use crate::linalg::ProductDims;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    ThresholdScan,
    Spectral,
    Concentration,
    GueApprox,
    Monotonicity,
}

/// Membership test used by threshold scans.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Criterion {
    /// Exact separability; 2×2 and 2×3 only.
    Exact,
    Ppt,
}

impl Criterion {
    pub fn probability_label(self) -> &'static str {
        match self {
            Criterion::Exact => "p_hat",
            Criterion::Ppt => "ppt_probability",
        }
    }
}

impl std::str::FromStr for Criterion {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(Self::Exact),
            "ppt" => Ok(Self::Ppt),
            other => Err(Error::input(format!(
                "unknown criterion '{other}' (expected exact or ppt)"
            ))),
        }
    }
}

/// Environment dimensions, either listed or as an inclusive range.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SValues {
    List(Vec<usize>),
    Range(SRange),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SRange {
    pub start: usize,
    pub stop: usize,
    pub step: usize,
}

impl SValues {
    pub fn values(&self) -> Vec<usize> {
        match self {
            SValues::List(v) => v.clone(),
            SValues::Range(r) if r.step > 0 => (r.start..=r.stop).step_by(r.step).collect(),
            SValues::Range(_) => Vec::new(),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceOverrides {
    /// λ_min threshold for the PPT test (default −1e-11).
    pub psd: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    /// Tensor factors. Monotonicity runs read them as (d1, d2) local dimensions.
    pub dims: Vec<usize>,
    #[serde(default)]
    pub s_values: Option<SValues>,
    pub trials: usize,
    pub master_seed: u64,
    #[serde(default)]
    pub criterion: Option<Criterion>,
    #[serde(default)]
    pub ensemble: Option<EnsembleKind>,
    #[serde(default)]
    pub body: Option<GaugeBody>,
    #[serde(default)]
    pub tolerance: ToleranceOverrides,
    pub output: PathBuf,
}

/// 1-based line of the first occurrence of `"key"` in the raw text.
fn line_of(raw: &str, key: &str) -> Option<usize> {
    let needle = format!("\"{key}\"");
    raw.find(&needle)
        .map(|pos| raw[..pos].matches('\n').count() + 1)
}

impl ExperimentConfig {
    /// Parses and validates a configuration.
    pub fn from_json_str(raw: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(raw).map_err(|e| Error::Config {
            line: Some(e.line()),
            message: e.to_string(),
        })?;
        cfg.validate_with_source(raw)?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        self.validate_with_source("")
    }

    fn validate_with_source(&self, raw: &str) -> Result<()> {
        let fail = |key: &str, message: String| Error::Config {
            line: line_of(raw, key),
            message,
        };
        if self.trials == 0 {
            return Err(fail("trials", "trials must be at least 1".into()));
        }
        if self.dims.is_empty() || self.dims.iter().any(|&d| d < 2) {
            return Err(fail(
                "dims",
                format!(
                    "dims must be non-empty with every factor >= 2, got {:?}",
                    self.dims
                ),
            ));
        }
        if let Some(sv) = &self.s_values {
            if let SValues::Range(r) = sv {
                if r.step == 0 || r.start > r.stop {
                    return Err(fail(
                        "s_values",
                        "range needs step >= 1 and start <= stop".into(),
                    ));
                }
            }
            let v = sv.values();
            if v.is_empty() || v.contains(&0) {
                return Err(fail(
                    "s_values",
                    "s values must be non-empty and positive".into(),
                ));
            }
        }
        if let Some(tol) = self.tolerance.psd {
            if !tol.is_finite() || tol > 0.0 {
                return Err(fail("psd", "psd tolerance must be finite and <= 0".into()));
            }
        }
        let need_s = |what: &str| -> Result<()> {
            if self.s_values.is_none() {
                return Err(fail("experiment", format!("{what} needs s_values")));
            }
            Ok(())
        };
        let bipartite = || -> Result<ProductDims> {
            if self.dims.len() != 2 {
                return Err(fail(
                    "dims",
                    format!("expected two factors, got {:?}", self.dims),
                ));
            }
            ProductDims::new(&self.dims)
        };
        let unused = |key: &str, present: bool| -> Result<()> {
            if present {
                return Err(fail(key, format!("'{key}' is not used by this experiment")));
            }
            Ok(())
        };
        match self.experiment {
            ExperimentKind::ThresholdScan => {
                need_s("threshold_scan")?;
                let dims = bipartite()?;
                let crit = self.criterion.ok_or_else(|| {
                    fail(
                        "experiment",
                        "threshold_scan needs a criterion (exact or ppt)".into(),
                    )
                })?;
                if crit == Criterion::Exact && !criterion_exact_allowed(&dims) {
                    return Err(fail(
                        "criterion",
                        format!("criterion exact is only available for dims 2x2 and 2x3, got {:?}; use ppt", self.dims),
                    ));
                }
                unused("ensemble", self.ensemble.is_some())?;
                unused("body", self.body.is_some())?;
            }
            ExperimentKind::Spectral => {
                let kind = self
                    .ensemble
                    .ok_or_else(|| fail("experiment", "spectral needs an ensemble".into()))?;
                match kind {
                    EnsembleKind::Ginibre => {
                        return Err(fail(
                            "ensemble",
                            "ginibre matrices have no real spectrum".into(),
                        ))
                    }
                    EnsembleKind::Induced => need_s("spectral with the induced ensemble")?,
                    _ => unused("s_values", self.s_values.is_some())?,
                }
                unused("criterion", self.criterion.is_some())?;
                unused("body", self.body.is_some())?;
            }
            ExperimentKind::Concentration | ExperimentKind::GueApprox => {
                need_s("this experiment")?;
                let body = self.body.ok_or_else(|| {
                    fail(
                        "experiment",
                        "a gauge body (d0, ppt0, hs, s0) is required".into(),
                    )
                })?;
                let dims = ProductDims::new(&self.dims)?;
                check_body_dims(body, &dims).map_err(|e| fail("body", e.to_string()))?;
                unused("criterion", self.criterion.is_some())?;
                unused("ensemble", self.ensemble.is_some())?;
            }
            ExperimentKind::Monotonicity => {
                need_s("monotonicity")?;
                if self.dims.len() != 2 || self.dims[0] > self.dims[1] {
                    return Err(fail(
                        "dims",
                        "monotonicity needs dims [d1, d2] with 2 <= d1 <= d2".into(),
                    ));
                }
                unused("criterion", self.criterion.is_some())?;
                unused("ensemble", self.ensemble.is_some())?;
                unused("body", self.body.is_some())?;
            }
        }
        Ok(())
    }

    pub fn s_list(&self) -> Vec<usize> {
        let mut v = self
            .s_values
            .as_ref()
            .map(SValues::values)
            .unwrap_or_default();
        v.sort_unstable();
        v.dedup();
        v
    }

    pub fn product_dims(&self) -> Result<ProductDims> {
        ProductDims::new(&self.dims)
    }
}
