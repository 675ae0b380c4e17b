//! Run configuration files.
//!
//! ```json
//! {"polygon": [[0,0],[1,0],[1,1],[0,1]], "points": [["1/2", 0.5]], "scale": 64}
//! ```
//!
//! `"scales": [64, 128]` replaces `"scale"` for sweeps. Optional keys:
//! `strip_halfwidth`, `probe_step` (both in units of `1/N`), `ceiling`,
//! `palette`, `jobs`.

use std::path::Path;

use serde::Deserialize;
use thiserror::Error;

use crate::analysis::SweepOptions;
use crate::lattice::{LatticeError, LatticePoint, LatticePolygon, PerturbationConfig, PlanePoint};
use crate::rational::{NumOrString, ParseRationalError, Rational};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed config: {0}")]
    Json(#[from] serde_json::Error),
    #[error("bad number in {field}: {source}")]
    Number { field: String, source: ParseRationalError },
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error("give exactly one of \"scale\" and \"scales\"")]
    ScaleKey,
    #[error("scales must be positive and strictly increasing, got {0:?}")]
    BadScales(Vec<i64>),
    #[error("this command takes a single scale, config has {0}")]
    NotSingleScale(usize),
    #[error("{0}")]
    Invalid(String),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    polygon: Vec<[i64; 2]>,
    points: Vec<[NumOrString; 2]>,
    scale: Option<i64>,
    scales: Option<Vec<i64>>,
    strip_halfwidth: Option<f64>,
    probe_step: Option<NumOrString>,
    ceiling: Option<u64>,
    palette: Option<String>,
    jobs: Option<usize>,
}

/// A validated configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub polygon: LatticePolygon,
    pub points: PerturbationConfig,
    pub scales: Vec<i64>,
    pub strip_halfwidth: Option<f64>,
    pub probe_step: Option<Rational>,
    pub ceiling: Option<u64>,
    pub palette: Option<String>,
    pub jobs: Option<usize>,
}

fn number(v: &NumOrString, field: impl Into<String>) -> Result<Rational, ConfigError> {
    v.to_rational().map_err(|source| ConfigError::Number { field: field.into(), source })
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let raw: RawConfig = serde_json::from_str(text)?;
        let polygon = LatticePolygon::new(raw.polygon.iter().map(|&[x, y]| LatticePoint::new(x, y)).collect())?;
        let points = raw
            .points
            .iter()
            .enumerate()
            .map(|(i, [x, y])| Ok(PlanePoint::new(number(x, format!("points[{i}]"))?, number(y, format!("points[{i}]"))?)))
            .collect::<Result<Vec<_>, ConfigError>>()?;
        let points = PerturbationConfig::new(points, &polygon)?;
        let scales = match (raw.scale, raw.scales) {
            (Some(n), None) => vec![n],
            (None, Some(v)) => v,
            _ => return Err(ConfigError::ScaleKey),
        };
        if scales.is_empty() || scales[0] < 1 || scales.windows(2).any(|w| w[0] >= w[1]) {
            return Err(ConfigError::BadScales(scales));
        }
        if let Some(h) = raw.strip_halfwidth {
            if !(h.is_finite() && h > 0.0) {
                return Err(ConfigError::Invalid(format!("strip_halfwidth must be positive, got {h}")));
            }
        }
        let probe_step = raw.probe_step.as_ref().map(|v| number(v, "probe_step")).transpose()?;
        if probe_step.is_some_and(|s| s <= Rational::from_integer(0)) {
            return Err(ConfigError::Invalid("probe_step must be positive".into()));
        }
        Ok(Self {
            polygon,
            points,
            scales,
            strip_halfwidth: raw.strip_halfwidth,
            probe_step,
            ceiling: raw.ceiling,
            palette: raw.palette,
            jobs: raw.jobs,
        })
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn single_scale(&self) -> Result<i64, ConfigError> {
        match self.scales.as_slice() {
            [n] => Ok(*n),
            s => Err(ConfigError::NotSingleScale(s.len())),
        }
    }

    /// Sweep options with the config's overrides applied.
    pub fn sweep_options(&self) -> SweepOptions {
        let mut o = SweepOptions::default();
        if let Some(h) = self.strip_halfwidth {
            o.strip_halfwidth = h;
        }
        if let Some(s) = self.probe_step {
            o.probe_step = s;
        }
        if let Some(c) = self.ceiling {
            o.ceiling = c;
        }
        if let Some(j) = self.jobs {
            o.jobs = j;
        }
        o
    }
}
