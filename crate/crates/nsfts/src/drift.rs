//! Seeded generators for synthetic concept-drift series and a CSV loader for
//! user-supplied data.
//!
//! Generation is bit-for-bit reproducible from the parameters alone. The random
//! stream is pinned to a documented algorithm (see [`DeterministicRng`])
//! rather than a library generator, so the same spec produces the same bytes
//! on any platform and can be reimplemented elsewhere.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// SplitMix64 stream with Box-Muller Gaussian draws.
///
/// State update per draw: `state += 0x9E3779B97F4A7C15`, then the returned
/// word is `z = state; z ^= z >> 30; z *= 0xBF58476D1CE4E5B9; z ^= z >> 27;
/// z *= 0x94D049BB133111EB; z ^= z >> 31` (all wrapping).
///
/// Uniform doubles take the top 53 bits: `(word >> 11) * 2^-53`, giving
/// values in `[0, 1)`. Gaussian draws use the Box-Muller transform on a pair
/// of uniforms `u1, u2`: with `r = sqrt(-2 ln(1 - u1))` and
/// `theta = 2 pi u2`, the pair yields `r cos(theta)` and `r sin(theta)`; the
/// second value is cached and returned on the next call.
#[derive(Debug, Clone)]
pub struct DeterministicRng {
    state: u64,
    cached: Option<f64>,
}

impl DeterministicRng {
    pub fn new(seed: u64) -> Self {
        Self {
            state: seed,
            cached: None,
        }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform draw in `[0, 1)`.
    pub fn next_uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Standard normal draw.
    pub fn next_gaussian(&mut self) -> f64 {
        if let Some(z) = self.cached.take() {
            return z;
        }
        let u1 = self.next_uniform();
        let u2 = self.next_uniform();
        let r = (-2.0 * (1.0 - u1).ln()).sqrt();
        let theta = 2.0 * std::f64::consts::PI * u2;
        self.cached = Some(r * theta.sin());
        r * theta.cos()
    }
}

/// The eight synthetic drift shapes: a stationary baseline, a transient
/// blip, and sudden or incremental changes of mean, variance, or both.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DriftKind {
    Stationary,
    StationaryBlip,
    SuddenVariance,
    SuddenMean,
    SuddenMeanVariance,
    IncrementalMean,
    IncrementalVariance,
    IncrementalMeanVariance,
}

impl DriftKind {
    pub const ALL: [DriftKind; 8] = [
        DriftKind::Stationary,
        DriftKind::StationaryBlip,
        DriftKind::SuddenVariance,
        DriftKind::SuddenMean,
        DriftKind::SuddenMeanVariance,
        DriftKind::IncrementalMean,
        DriftKind::IncrementalVariance,
        DriftKind::IncrementalMeanVariance,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            DriftKind::Stationary => "stationary",
            DriftKind::StationaryBlip => "stationary-blip",
            DriftKind::SuddenVariance => "sudden-variance",
            DriftKind::SuddenMean => "sudden-mean",
            DriftKind::SuddenMeanVariance => "sudden-mean-variance",
            DriftKind::IncrementalMean => "incremental-mean",
            DriftKind::IncrementalVariance => "incremental-variance",
            DriftKind::IncrementalMeanVariance => "incremental-mean-variance",
        }
    }

    fn shifts_mean(&self) -> bool {
        matches!(
            self,
            DriftKind::SuddenMean
                | DriftKind::SuddenMeanVariance
                | DriftKind::IncrementalMean
                | DriftKind::IncrementalMeanVariance
        )
    }

    fn scales_stdev(&self) -> bool {
        matches!(
            self,
            DriftKind::SuddenVariance
                | DriftKind::SuddenMeanVariance
                | DriftKind::IncrementalVariance
                | DriftKind::IncrementalMeanVariance
        )
    }

    fn is_incremental(&self) -> bool {
        matches!(
            self,
            DriftKind::IncrementalMean
                | DriftKind::IncrementalVariance
                | DriftKind::IncrementalMeanVariance
        )
    }

    /// Default drift magnitude: mean shifts are expressed in units of the
    /// base standard deviation, variance drifts as a multiplier on it.
    pub fn default_magnitude(&self) -> f64 {
        if self.scales_stdev() {
            5.0
        } else if self.shifts_mean() {
            10.0
        } else {
            0.0
        }
    }

    fn valid_names() -> String {
        Self::ALL
            .iter()
            .map(|k| k.name())
            .collect::<Vec<_>>()
            .join(", ")
    }
}

impl fmt::Display for DriftKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DriftKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .iter()
            .find(|k| k.name() == s)
            .copied()
            .ok_or_else(|| Error::UnknownDriftKind(s.to_string(), Self::valid_names()))
    }
}

/// Full description of one synthetic series. Equal specs generate identical
/// series bit for bit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DriftSpec {
    pub kind: DriftKind,
    pub length: usize,
    pub seed: u64,
    pub base_mean: f64,
    pub base_stdev: f64,
    /// Mean shifts in units of `base_stdev`; variance drifts as a multiplier
    /// on it. Kinds that change both apply the same figure to each.
    pub drift_magnitude: f64,
    /// Fraction of the series length at which the drift begins.
    pub drift_onset: f64,
}

impl DriftSpec {
    pub fn new(kind: DriftKind, length: usize, seed: u64) -> Self {
        Self {
            kind,
            length,
            seed,
            base_mean: 10.0,
            base_stdev: 1.0,
            drift_magnitude: kind.default_magnitude(),
            drift_onset: 0.5,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.length < 100 {
            return Err(Error::InvalidDriftSpec(format!(
                "length {} below the 100-point minimum",
                self.length
            )));
        }
        if !self.base_mean.is_finite() {
            return Err(Error::InvalidDriftSpec(format!(
                "base mean {} is not finite",
                self.base_mean
            )));
        }
        if !self.base_stdev.is_finite() || self.base_stdev <= 0.0 {
            return Err(Error::InvalidDriftSpec(format!(
                "base stdev {} must be finite and positive",
                self.base_stdev
            )));
        }
        if !self.drift_magnitude.is_finite() {
            return Err(Error::InvalidDriftSpec(format!(
                "drift magnitude {} is not finite",
                self.drift_magnitude
            )));
        }
        if self.kind.scales_stdev() && self.drift_magnitude <= 0.0 {
            return Err(Error::InvalidDriftSpec(format!(
                "variance drift needs a positive multiplier, got {}",
                self.drift_magnitude
            )));
        }
        if !(0.0..1.0).contains(&self.drift_onset) {
            return Err(Error::InvalidDriftSpec(format!(
                "drift onset {} outside [0, 1)",
                self.drift_onset
            )));
        }
        Ok(())
    }

    fn onset_index(&self) -> usize {
        (self.drift_onset * self.length as f64).floor() as usize
    }

    /// Mean and standard deviation in effect at step `t`.
    fn schedule(&self, t: usize) -> (f64, f64) {
        let onset = self.onset_index();
        let progress = if t < onset {
            0.0
        } else if self.kind.is_incremental() {
            let span = (self.length - 1).saturating_sub(onset);
            if span == 0 {
                1.0
            } else {
                (t - onset) as f64 / span as f64
            }
        } else {
            1.0
        };
        let mean = if self.kind.shifts_mean() {
            self.base_mean + progress * self.drift_magnitude * self.base_stdev
        } else {
            self.base_mean
        };
        let stdev = if self.kind.scales_stdev() {
            self.base_stdev * (1.0 + progress * (self.drift_magnitude - 1.0))
        } else {
            self.base_stdev
        };
        (mean, stdev)
    }
}

/// Where a dataset's values came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Provenance {
    Synthetic(DriftSpec),
    File(PathBuf),
}

/// A named series ready for evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub name: String,
    pub values: Vec<f64>,
    pub provenance: Provenance,
}

/// Generate a synthetic series: Gaussian noise around the declared mean/stdev
/// schedule, plus a single ten-sigma spike at the onset for the blip kind.
pub fn generate(spec: &DriftSpec) -> Result<Dataset> {
    spec.validate()?;
    let mut rng = DeterministicRng::new(spec.seed);
    let onset = spec.onset_index();
    let values = (0..spec.length)
        .map(|t| {
            let (mean, stdev) = spec.schedule(t);
            let mut v = mean + stdev * rng.next_gaussian();
            if spec.kind == DriftKind::StationaryBlip && t == onset {
                v += 10.0 * spec.base_stdev;
            }
            v
        })
        .collect();
    Ok(Dataset {
        name: spec.kind.name().to_string(),
        values,
        provenance: Provenance::Synthetic(*spec),
    })
}

/// Which CSV column holds the values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ColumnSelector {
    Index(usize),
    Name(String),
}

impl Default for ColumnSelector {
    fn default() -> Self {
        ColumnSelector::Index(0)
    }
}

/// Load a series from a comma-separated UTF-8 file, in row order, with no
/// resampling or imputation. Blank rows and non-numeric cells are rejected
/// with the offending line number; column selection by name requires a
/// header row.
pub fn load_csv(path: &Path, column: &ColumnSelector, has_header: bool) -> Result<Dataset> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::FileRead {
        path: path.to_path_buf(),
        source,
    })?;
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            return Err(Error::BlankRow {
                path: path.to_path_buf(),
                line: i as u64 + 1,
            });
        }
    }
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(has_header)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let index = match column {
        ColumnSelector::Index(i) => *i,
        ColumnSelector::Name(name) => {
            if !has_header {
                return Err(Error::HeaderRequired {
                    path: path.to_path_buf(),
                });
            }
            let headers = reader.headers().map_err(|source| Error::Csv {
                path: path.to_path_buf(),
                source,
            })?;
            headers
                .iter()
                .position(|h| h == name)
                .ok_or_else(|| Error::MissingColumn {
                    path: path.to_path_buf(),
                    name: name.clone(),
                })?
        }
    };
    let mut values = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|source| Error::Csv {
            path: path.to_path_buf(),
            source,
        })?;
        let line = record
            .position()
            .map(|p| p.line())
            .unwrap_or(values.len() as u64 + 1);
        let cell = record.get(index).ok_or_else(|| Error::ColumnOutOfRange {
            path: path.to_path_buf(),
            line,
            index,
            width: record.len(),
        })?;
        let value: f64 = cell.parse().map_err(|_| Error::BadCell {
            path: path.to_path_buf(),
            line,
            value: cell.to_string(),
        })?;
        if !value.is_finite() {
            return Err(Error::BadCell {
                path: path.to_path_buf(),
                line,
                value: cell.to_string(),
            });
        }
        values.push(value);
    }
    if values.is_empty() {
        return Err(Error::EmptyDataset {
            path: path.to_path_buf(),
        });
    }
    Ok(Dataset {
        name: path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "dataset".to_string()),
        values,
        provenance: Provenance::File(path.to_path_buf()),
    })
}
