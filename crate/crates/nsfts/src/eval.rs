//! Point-forecast accuracy metrics and the rolling out-of-sample evaluation
//! loop.
//!
//! Evaluation trains a method on the head of a series and streams the rest
//! through its online loop, pairing each forecast with the value it
//! predicted. Warm-up placeholders (meta-model forecasts emitted before a
//! first model exists) are excluded from scoring and counted as skipped;
//! fallback forecasts are real model outputs under distribution shift and
//! are scored like any other.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fts::{FtsModel, FtsParams};
use crate::metamodels::{run_incremental_ensemble, run_time_variant, RetrainPolicy, StepForecast};
use crate::nsfts::{NsftsModel, NsftsParams, PerturbationSpread};

/// Root mean squared error.
pub fn rmse(actual: &[f64], predicted: &[f64]) -> Result<f64> {
    check_lengths(actual, predicted)?;
    let n = actual.len() as f64;
    let sum: f64 = actual
        .iter()
        .zip(predicted)
        .map(|(y, f)| (y - f) * (y - f))
        .sum();
    Ok((sum / n).sqrt())
}

/// Mean absolute percentage error and how many zero targets were excluded.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mape {
    /// Percent scale: a perfect forecast scores 0, a 10% average miss 10.
    pub percent: f64,
    pub excluded_zero_targets: usize,
}

/// Mean absolute percentage error, reported in percent. Zero targets are
/// excluded from the mean and counted; a series of only zero targets is an
/// error.
pub fn mape(actual: &[f64], predicted: &[f64]) -> Result<Mape> {
    let (fraction, excluded) = mape_fraction(actual, predicted)?;
    Ok(Mape {
        percent: fraction * 100.0,
        excluded_zero_targets: excluded,
    })
}

/// The literal fraction-scale variant of [`mape`].
pub fn mape_fraction(actual: &[f64], predicted: &[f64]) -> Result<(f64, usize)> {
    check_lengths(actual, predicted)?;
    let mut sum = 0.0;
    let mut count = 0usize;
    for (y, f) in actual.iter().zip(predicted) {
        if *y == 0.0 {
            continue;
        }
        sum += ((y - f) / y).abs();
        count += 1;
    }
    if count == 0 {
        return Err(Error::AllZeroTargets);
    }
    Ok((sum / count as f64, actual.len() - count))
}

/// Bounded accuracy ratio: the root of the squared-error sum over the sum of
/// the root energies of both series. Zero for perfect forecasts, one when
/// the forecasts carry no shared structure with the targets.
pub fn theil_u1(actual: &[f64], predicted: &[f64]) -> Result<f64> {
    check_lengths(actual, predicted)?;
    let sq_err: f64 = actual
        .iter()
        .zip(predicted)
        .map(|(y, f)| (y - f) * (y - f))
        .sum();
    let energy_actual: f64 = actual.iter().map(|y| y * y).sum();
    let energy_predicted: f64 = predicted.iter().map(|f| f * f).sum();
    let denominator = energy_actual.sqrt() + energy_predicted.sqrt();
    if denominator == 0.0 {
        return Err(Error::ZeroDenominator("bounded accuracy ratio"));
    }
    Ok(sq_err.sqrt() / denominator)
}

/// Naive-relative accuracy ratio: model RMSE over the RMSE of the
/// persistence forecast on the same targets. One means parity with carrying
/// the last value forward; below one beats it.
pub fn theil_u2(actual: &[f64], predicted: &[f64]) -> Result<f64> {
    check_lengths(actual, predicted)?;
    if actual.len() < 2 {
        return Err(Error::SeriesTooShort {
            len: actual.len(),
            min: 2,
        });
    }
    let targets = &actual[1..];
    let model = rmse(targets, &predicted[1..])?;
    let naive = rmse(targets, &actual[..actual.len() - 1])?;
    if naive == 0.0 {
        return Err(Error::ZeroDenominator("persistence forecast error"));
    }
    Ok(model / naive)
}

fn check_lengths(actual: &[f64], predicted: &[f64]) -> Result<()> {
    if actual.len() != predicted.len() {
        return Err(Error::LengthMismatch {
            left: actual.len(),
            right: predicted.len(),
        });
    }
    if actual.is_empty() {
        return Err(Error::EmptySeries);
    }
    Ok(())
}

/// The forecasting methods the harness can evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Nsfts,
    TimeVariant,
    IncrementalEnsemble,
    StaticFts,
}

impl Method {
    pub const ALL: [Method; 4] = [
        Method::Nsfts,
        Method::TimeVariant,
        Method::IncrementalEnsemble,
        Method::StaticFts,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Method::Nsfts => "nsfts",
            Method::TimeVariant => "time-variant",
            Method::IncrementalEnsemble => "incremental-ensemble",
            Method::StaticFts => "static-fts",
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .iter()
            .find(|m| m.name() == s)
            .copied()
            .ok_or_else(|| Error::UnknownMethod(s.to_string()))
    }
}

/// Everything a method needs to run one evaluation cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodConfig {
    pub method: Method,
    pub fts: FtsParams,
    /// Residual window length (adaptive model only).
    pub residual_window: usize,
    /// Use residual variance instead of standard deviation (adaptive model
    /// only).
    pub sigma_squared: bool,
    /// Retrain schedule (meta-models only).
    pub policy: RetrainPolicy,
    /// Member capacity (ensemble only).
    pub ensemble_size: usize,
}

impl MethodConfig {
    pub fn new(method: Method) -> Self {
        Self {
            method,
            fts: FtsParams::default(),
            residual_window: 10,
            sigma_squared: false,
            policy: RetrainPolicy::default(),
            ensemble_size: 2,
        }
    }
}

/// Accuracy metrics over the scored out-of-sample pairs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub rmse: f64,
    /// Percent scale.
    pub mape_pct: f64,
    pub u1: f64,
    pub u2: f64,
    /// Scored pairs.
    pub n: usize,
    /// Warm-up pairs excluded from scoring; `n + skipped` covers every
    /// forecastable point.
    pub skipped: usize,
}

/// One scored step of a streamed evaluation, for trace output.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRow {
    /// Index of the target in the full series.
    pub t: usize,
    pub actual: f64,
    pub predicted: f64,
    pub residual: f64,
    /// The observation the forecast was made from, i.e. the persistence
    /// prediction for this target.
    pub previous: f64,
    pub fallback: bool,
    pub warmup: bool,
    /// Perturbation extremes after adapting on this observation; present for
    /// the adaptive model only.
    pub spread: Option<PerturbationSpread>,
}

/// Full outcome of one method-on-dataset evaluation.
#[derive(Debug, Clone)]
pub struct Evaluation {
    pub report: MetricReport,
    pub trace: Vec<TraceRow>,
    pub fallback_count: usize,
    pub retrain_count: usize,
}

/// Train on the first `split` fraction of the series and score one-step
/// forecasts over the remainder.
pub fn evaluate(values: &[f64], config: &MethodConfig, split: f64) -> Result<Evaluation> {
    if !(split > 0.0 && split < 1.0) {
        return Err(Error::InvalidSplit {
            split,
            len: values.len(),
            reason: "split must lie strictly between 0 and 1",
        });
    }
    let train_len = (values.len() as f64 * split).floor() as usize;
    if train_len < 2 {
        return Err(Error::InvalidSplit {
            split,
            len: values.len(),
            reason: "training side has fewer than 2 observations",
        });
    }
    if values.len() - train_len < 2 {
        return Err(Error::InvalidSplit {
            split,
            len: values.len(),
            reason: "test side has fewer than 2 observations",
        });
    }
    let (trace, retrain_count) = match config.method {
        Method::Nsfts => trace_nsfts(values, train_len, config)?,
        Method::StaticFts => trace_static(values, train_len, config)?,
        Method::TimeVariant => {
            let run = run_time_variant(values, &config.policy, &config.fts)?;
            (
                trace_from_stream(values, train_len, &run.forecasts),
                run.retrain_count,
            )
        }
        Method::IncrementalEnsemble => {
            let run = run_incremental_ensemble(
                values,
                &config.policy,
                config.ensemble_size,
                &config.fts,
            )?;
            (
                trace_from_stream(values, train_len, &run.forecasts),
                run.retrain_count,
            )
        }
    };
    let report = score(&trace)?;
    let fallback_count = trace.iter().filter(|r| r.fallback && !r.warmup).count();
    Ok(Evaluation {
        report,
        trace,
        fallback_count,
        retrain_count,
    })
}

fn trace_nsfts(
    values: &[f64],
    train_len: usize,
    config: &MethodConfig,
) -> Result<(Vec<TraceRow>, usize)> {
    let params = NsftsParams {
        fts: config.fts,
        residual_window: config.residual_window,
        sigma_squared: config.sigma_squared,
    };
    let (train, test) = values.split_at(train_len);
    let mut model = NsftsModel::train(train, &params)?;
    let mut pending = model.last_forecast().ok_or(Error::ModelNotReady)?;
    let mut trace = Vec::with_capacity(test.len());
    for (offset, &observed) in test.iter().enumerate() {
        let t = train_len + offset;
        let predicted = pending;
        model.adapt(observed)?;
        trace.push(TraceRow {
            t,
            actual: observed,
            predicted: predicted.value,
            residual: observed - predicted.value,
            previous: values[t - 1],
            fallback: predicted.fallback,
            warmup: false,
            spread: Some(model.perturbation_spread()),
        });
        pending = model.forecast(observed);
    }
    Ok((trace, 0))
}

fn trace_static(
    values: &[f64],
    train_len: usize,
    config: &MethodConfig,
) -> Result<(Vec<TraceRow>, usize)> {
    let model = FtsModel::train(&values[..train_len], &config.fts)?;
    let trace = (train_len..values.len())
        .map(|t| {
            let f = model.forecast(values[t - 1]);
            TraceRow {
                t,
                actual: values[t],
                predicted: f.value,
                residual: values[t] - f.value,
                previous: values[t - 1],
                fallback: f.fallback,
                warmup: false,
                spread: None,
            }
        })
        .collect();
    Ok((trace, 0))
}

fn trace_from_stream(
    values: &[f64],
    train_len: usize,
    forecasts: &[StepForecast],
) -> Vec<TraceRow> {
    (train_len..values.len())
        .map(|t| {
            let f = forecasts[t - 1];
            TraceRow {
                t,
                actual: values[t],
                predicted: f.value,
                residual: values[t] - f.value,
                previous: values[t - 1],
                fallback: f.fallback,
                warmup: f.warmup,
                spread: None,
            }
        })
        .collect()
}

/// Metrics over the scored rows of a trace. The naive reference for the
/// relative ratio predicts each target by its predecessor in the full
/// series, so warm-up exclusions cannot distort it.
fn score(trace: &[TraceRow]) -> Result<MetricReport> {
    let scored: Vec<&TraceRow> = trace.iter().filter(|r| !r.warmup).collect();
    if scored.is_empty() {
        return Err(Error::EmptySeries);
    }
    let actual: Vec<f64> = scored.iter().map(|r| r.actual).collect();
    let predicted: Vec<f64> = scored.iter().map(|r| r.predicted).collect();
    let naive: Vec<f64> = scored.iter().map(|r| r.previous).collect();
    let model_rmse = rmse(&actual, &predicted)?;
    let naive_rmse = rmse(&actual, &naive)?;
    if naive_rmse == 0.0 {
        return Err(Error::ZeroDenominator("persistence forecast error"));
    }
    Ok(MetricReport {
        rmse: model_rmse,
        mape_pct: mape(&actual, &predicted)?.percent,
        u1: theil_u1(&actual, &predicted)?,
        u2: model_rmse / naive_rmse,
        n: scored.len(),
        skipped: trace.len() - scored.len(),
    })
}
