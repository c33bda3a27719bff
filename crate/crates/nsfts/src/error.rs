use std::path::PathBuf;

use thiserror::Error;

/// Errors returned by this crate.
#[derive(Debug, Error)]
pub enum Error {
    /// Triangle parameters must satisfy lower <= center <= upper and be finite.
    #[error(
        "invalid triangle: need finite lower <= center <= upper, got ({lower}, {center}, {upper})"
    )]
    InvalidTriangle { lower: f64, center: f64, upper: f64 },

    /// Perturbation parameters must be finite and the widening non-negative.
    #[error("invalid perturbation: displacement {displacement}, widening {widening} (widening must be finite and >= 0)")]
    InvalidPerturbation { displacement: f64, widening: f64 },

    /// An operation received an empty series.
    #[error("series is empty")]
    EmptySeries,

    /// A series was shorter than an operation requires.
    #[error("series too short: {len} observations, need at least {min}")]
    SeriesTooShort { len: usize, min: usize },

    /// A non-finite value where a finite one is required.
    #[error("non-finite {what}: {value}")]
    NonFinite { what: &'static str, value: f64 },

    /// Universe bounds collapsed or inverted.
    #[error("degenerate universe bounds [{lower}, {upper}]")]
    DegenerateUniverse { lower: f64, upper: f64 },

    /// Padding fractions must be finite and non-negative.
    #[error("invalid padding fraction {0}: must be finite and >= 0")]
    InvalidPadding(f64),

    /// Literal bound scaling only works when every value is positive.
    #[error(
        "paper-exact universe mode scales each bound by its own magnitude and requires \
         min > 0; got min = {0} (use range-pad mode for series that touch or cross zero)"
    )]
    PositiveDataRequired(f64),

    /// Grid partitioning needs at least three sets.
    #[error("too few fuzzy sets: {0}, need at least 3")]
    TooFewSets(usize),

    /// Residual windows need room for at least two values.
    #[error("residual window capacity {0} too small, need at least 2")]
    WindowTooSmall(usize),

    /// Statistics over an empty residual window are undefined.
    #[error("residual window is empty")]
    EmptyWindow,

    /// The model has no stored forecast to compute a residual against.
    #[error("model has not produced a forecast yet")]
    ModelNotReady,

    /// Retrain policies need a usable window and interval.
    #[error("invalid retrain policy: memory window {window}, refresh interval {interval}")]
    InvalidPolicy { window: usize, interval: usize },

    /// Ensembles need at least one member slot.
    #[error("ensemble capacity must be at least 1")]
    EmptyEnsemble,

    /// Metric inputs must pair up one-to-one.
    #[error("length mismatch: {left} actual vs {right} predicted values")]
    LengthMismatch { left: usize, right: usize },

    /// Percentage errors are undefined when every target is zero.
    #[error("all targets are zero; percentage error is undefined")]
    AllZeroTargets,

    /// A ratio metric hit a zero denominator.
    #[error("zero denominator in {0}")]
    ZeroDenominator(&'static str),

    /// Train/test splits must leave enough data on both sides.
    #[error("invalid split {split} for {len} observations: {reason}")]
    InvalidSplit {
        split: f64,
        len: usize,
        reason: &'static str,
    },

    /// Synthetic series parameters failed validation.
    #[error("invalid drift spec: {0}")]
    InvalidDriftSpec(String),

    /// An unrecognized drift kind name.
    #[error("unknown drift kind '{0}'; valid kinds: {1}")]
    UnknownDriftKind(String, String),

    /// An unrecognized method name.
    #[error("unknown method '{0}'; valid methods: nsfts, time-variant, incremental-ensemble, static-fts")]
    UnknownMethod(String),

    /// File access failed.
    #[error("cannot read {path}: {source}")]
    FileRead {
        path: PathBuf,
        source: std::io::Error,
    },

    /// File write failed.
    #[error("cannot write {path}: {source}")]
    FileWrite {
        path: PathBuf,
        source: std::io::Error,
    },

    /// A CSV input contained a blank row.
    #[error("blank row at line {line} in {path}")]
    BlankRow { path: PathBuf, line: u64 },

    /// A CSV cell did not parse as a finite number.
    #[error("line {line} in {path}: cannot parse '{value}' as a finite number")]
    BadCell {
        path: PathBuf,
        line: u64,
        value: String,
    },

    /// The requested column name is not in the header.
    #[error("column '{name}' not found in header of {path}")]
    MissingColumn { path: PathBuf, name: String },

    /// The requested column index is beyond a row's width.
    #[error("line {line} in {path}: column index {index} out of range (row has {width} fields)")]
    ColumnOutOfRange {
        path: PathBuf,
        line: u64,
        index: usize,
        width: usize,
    },

    /// Selecting a column by name requires a header row.
    #[error("column selected by name but file declared headerless: {path}")]
    HeaderRequired { path: PathBuf },

    /// A CSV file produced no values.
    #[error("no values parsed from {path}")]
    EmptyDataset { path: PathBuf },

    /// Low-level CSV parse failure.
    #[error("csv error in {path}: {source}")]
    Csv { path: PathBuf, source: csv::Error },

    /// Checkpoint envelope had the wrong format tag.
    #[error("not a model checkpoint: expected format '{expected}', found '{found}'")]
    CheckpointFormat { expected: String, found: String },

    /// Checkpoint version is unsupported.
    #[error("unsupported checkpoint version {found}; this build reads version {supported}")]
    CheckpointVersion { found: u32, supported: u32 },

    /// Checkpoint content failed structural validation.
    #[error("corrupt checkpoint: {0}")]
    CorruptCheckpoint(String),

    /// JSON (de)serialization failure.
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    /// Manifest parse failure.
    #[error("manifest parse error: {0}")]
    ManifestParse(#[from] toml::de::Error),

    /// Manifest semantic validation failure.
    #[error("invalid manifest: {0}")]
    InvalidManifest(String),

    /// Manifest version is unsupported.
    #[error("unsupported manifest version {found}; this build reads version {supported}")]
    ManifestVersion { found: u32, supported: u32 },
}

pub type Result<T> = std::result::Result<T, Error>;
