//! Benchmark manifests: a versioned TOML file declaring datasets, methods
//! and shared defaults, resolved into a concrete evaluation plan.
//!
//! ```toml
//! version = 1
//! output = "bench_out"
//!
//! [defaults]
//! sets = 35
//! residual_window = 10
//! memory_window = 100
//! refresh_interval = 10
//! ensemble_size = 2
//! split = 0.75
//! padding = 0.2
//! seed = 1
//!
//! [[datasets]]
//! name = "incremental_mean"
//! kind = "incremental-mean"
//! length = 1000
//! seed = 106
//!
//! [[datasets]]
//! name = "sp500"
//! file = "data/sp500.csv"
//! column = "close"
//! has_header = true
//!
//! [[methods]]
//! name = "nsfts"
//! ```

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::drift::{generate, load_csv, ColumnSelector, Dataset, DriftKind, DriftSpec};
use crate::error::{Error, Result};
use crate::eval::{Method, MethodConfig};
use crate::fts::FtsParams;
use crate::metamodels::RetrainPolicy;
use crate::partition::UniverseMode;

pub const MANIFEST_VERSION: u32 = 1;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    pub version: u32,
    /// Output directory, relative to the manifest location unless absolute.
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub defaults: Defaults,
    pub datasets: Vec<DatasetEntry>,
    pub methods: Vec<MethodEntry>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Defaults {
    /// Number of fuzzy sets (k).
    pub sets: usize,
    /// Residual window length (w).
    pub residual_window: usize,
    /// Retraining memory window (W).
    pub memory_window: usize,
    /// Retraining refresh interval (R).
    pub refresh_interval: usize,
    /// Ensemble member capacity (M).
    pub ensemble_size: usize,
    /// Train fraction.
    pub split: f64,
    /// Universe padding fraction.
    pub padding: f64,
    /// Base seed; synthetic datasets without their own seed derive one from
    /// this plus their position.
    pub seed: Option<u64>,
}

impl Default for Defaults {
    fn default() -> Self {
        Self {
            sets: 35,
            residual_window: 10,
            memory_window: 100,
            refresh_interval: 10,
            ensemble_size: 2,
            split: 0.75,
            padding: 0.2,
            seed: None,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetEntry {
    pub name: String,
    // Synthetic fields.
    pub kind: Option<String>,
    pub length: Option<usize>,
    pub seed: Option<u64>,
    pub mean: Option<f64>,
    pub stdev: Option<f64>,
    pub magnitude: Option<f64>,
    pub onset: Option<f64>,
    // File fields.
    pub file: Option<PathBuf>,
    pub column: Option<ColumnSelector>,
    pub has_header: Option<bool>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MethodEntry {
    pub name: String,
    pub sets: Option<usize>,
    pub residual_window: Option<usize>,
    pub memory_window: Option<usize>,
    pub refresh_interval: Option<usize>,
    pub ensemble_size: Option<usize>,
    pub split: Option<f64>,
    pub padding: Option<f64>,
}

/// Global switches applied on top of the manifest, mirroring the CLI flags.
#[derive(Debug, Clone, Copy, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub no_normalize: bool,
    pub sigma_squared: bool,
    pub paper_exact_universe: bool,
}

/// One method ready to run, with its evaluation split.
#[derive(Debug, Clone)]
pub struct PlannedMethod {
    pub method: Method,
    pub config: MethodConfig,
    pub split: f64,
}

/// A fully materialized benchmark: datasets loaded or generated, methods
/// resolved, output directory fixed.
#[derive(Debug)]
pub struct BenchPlan {
    pub datasets: Vec<Dataset>,
    pub methods: Vec<PlannedMethod>,
    pub output: PathBuf,
    /// Seed recorded per dataset for report metadata.
    pub dataset_seeds: Vec<u64>,
}

impl Manifest {
    /// Parse a manifest file without touching the datasets it references.
    pub fn load(path: &Path) -> Result<Manifest> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::FileRead {
            path: path.to_path_buf(),
            source,
        })?;
        let manifest: Manifest = toml::from_str(&text)?;
        if manifest.version != MANIFEST_VERSION {
            return Err(Error::ManifestVersion {
                found: manifest.version,
                supported: MANIFEST_VERSION,
            });
        }
        Ok(manifest)
    }

    /// Validate and materialize the manifest into a runnable plan. Every
    /// dataset is generated or loaded here, before any cell runs, so a
    /// missing file fails the whole run up front.
    pub fn resolve(&self, base_dir: &Path, overrides: &Overrides) -> Result<BenchPlan> {
        self.validate()?;
        let seed_base = overrides.seed.or(self.defaults.seed);
        let mut datasets = Vec::with_capacity(self.datasets.len());
        let mut dataset_seeds = Vec::with_capacity(self.datasets.len());
        for (index, entry) in self.datasets.iter().enumerate() {
            let (dataset, seed) = entry.materialize(index, base_dir, seed_base)?;
            datasets.push(dataset);
            dataset_seeds.push(seed);
        }
        let methods = self
            .methods
            .iter()
            .map(|entry| entry.resolve(&self.defaults, overrides))
            .collect::<Result<Vec<_>>>()?;
        let output = match &self.output {
            Some(p) if p.is_absolute() => p.clone(),
            Some(p) => base_dir.join(p),
            None => base_dir.join("bench_out"),
        };
        Ok(BenchPlan {
            datasets,
            methods,
            output,
            dataset_seeds,
        })
    }

    fn validate(&self) -> Result<()> {
        if self.datasets.is_empty() {
            return Err(Error::InvalidManifest("no datasets declared".into()));
        }
        if self.methods.is_empty() {
            return Err(Error::InvalidManifest("no methods declared".into()));
        }
        let mut names = std::collections::BTreeSet::new();
        for entry in &self.datasets {
            if entry.name.is_empty()
                || !entry
                    .name
                    .chars()
                    .all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-' || c == '.')
            {
                return Err(Error::InvalidManifest(format!(
                    "dataset name '{}' must be nonempty and use only [A-Za-z0-9_.-]",
                    entry.name
                )));
            }
            if !names.insert(&entry.name) {
                return Err(Error::InvalidManifest(format!(
                    "duplicate dataset name '{}'",
                    entry.name
                )));
            }
            match (&entry.kind, &entry.file) {
                (Some(_), Some(_)) => {
                    return Err(Error::InvalidManifest(format!(
                        "dataset '{}' declares both a kind and a file",
                        entry.name
                    )))
                }
                (None, None) => {
                    return Err(Error::InvalidManifest(format!(
                        "dataset '{}' declares neither a kind nor a file",
                        entry.name
                    )))
                }
                _ => {}
            }
            if let Some(kind) = &entry.kind {
                kind.parse::<DriftKind>()?;
            }
        }
        let mut method_names = std::collections::BTreeSet::new();
        for entry in &self.methods {
            entry.name.parse::<Method>()?;
            if !method_names.insert(&entry.name) {
                return Err(Error::InvalidManifest(format!(
                    "duplicate method '{}'",
                    entry.name
                )));
            }
        }
        for entry in &self.datasets {
            if entry.kind.is_some() && entry.seed.is_none() && self.defaults.seed.is_none() {
                return Err(Error::InvalidManifest(format!(
                    "synthetic dataset '{}' has no seed and no default seed is set; \
                     runs must be reproducible",
                    entry.name
                )));
            }
        }
        Ok(())
    }
}

impl DatasetEntry {
    fn materialize(
        &self,
        index: usize,
        base_dir: &Path,
        seed_base: Option<u64>,
    ) -> Result<(Dataset, u64)> {
        if let Some(kind) = &self.kind {
            let kind: DriftKind = kind.parse()?;
            let seed = self
                .seed
                .or_else(|| seed_base.map(|s| s.wrapping_add(index as u64)))
                .expect("validated: seed present");
            let mut spec = DriftSpec::new(kind, self.length.unwrap_or(1000), seed);
            if let Some(mean) = self.mean {
                spec.base_mean = mean;
            }
            if let Some(stdev) = self.stdev {
                spec.base_stdev = stdev;
            }
            if let Some(magnitude) = self.magnitude {
                spec.drift_magnitude = magnitude;
            }
            if let Some(onset) = self.onset {
                spec.drift_onset = onset;
            }
            let mut dataset = generate(&spec)?;
            dataset.name = self.name.clone();
            Ok((dataset, seed))
        } else {
            let file = self.file.as_ref().expect("validated: file present");
            let path = if file.is_absolute() {
                file.clone()
            } else {
                base_dir.join(file)
            };
            let column = self.column.clone().unwrap_or_default();
            let mut dataset = load_csv(&path, &column, self.has_header.unwrap_or(false))?;
            dataset.name = self.name.clone();
            Ok((dataset, self.seed.or(seed_base).unwrap_or(0)))
        }
    }
}

impl MethodEntry {
    fn resolve(&self, defaults: &Defaults, overrides: &Overrides) -> Result<PlannedMethod> {
        let method: Method = self.name.parse()?;
        let fts = FtsParams {
            set_count: self.sets.unwrap_or(defaults.sets),
            padding: self.padding.unwrap_or(defaults.padding),
            universe_mode: if overrides.paper_exact_universe {
                UniverseMode::PaperExact
            } else {
                UniverseMode::RangePad
            },
            normalize: !overrides.no_normalize,
        };
        let config = MethodConfig {
            method,
            fts,
            residual_window: self.residual_window.unwrap_or(defaults.residual_window),
            sigma_squared: overrides.sigma_squared,
            policy: RetrainPolicy {
                memory_window: self.memory_window.unwrap_or(defaults.memory_window),
                refresh_interval: self.refresh_interval.unwrap_or(defaults.refresh_interval),
            },
            ensemble_size: self.ensemble_size.unwrap_or(defaults.ensemble_size),
        };
        Ok(PlannedMethod {
            method,
            config,
            split: self.split.unwrap_or(defaults.split),
        })
    }
}
