//! Residual-driven adaptation of the fuzzy sets and perturbed forecasting.
//!
//! The model trains once. From then on each new observation updates a FIFO
//! window of forecast residuals, and the window statistics plus the
//! observation's displacement outside the universe are turned into fresh
//! per-set perturbations. The rule base never changes; only the membership
//! functions move.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fts::{Forecast, FtsModel, FtsParams};
use crate::fuzzy::Perturbation;
use crate::partition::Universe;

/// FIFO buffer of the last `capacity` forecast residuals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualWindow {
    capacity: usize,
    values: VecDeque<f64>,
}

impl ResidualWindow {
    pub fn new(capacity: usize) -> Result<Self> {
        if capacity < 2 {
            return Err(Error::WindowTooSmall(capacity));
        }
        Ok(Self {
            capacity,
            values: VecDeque::with_capacity(capacity),
        })
    }

    /// Append a residual, evicting the oldest value once full.
    pub fn push(&mut self, residual: f64) {
        if self.values.len() == self.capacity {
            self.values.pop_front();
        }
        self.values.push_back(residual);
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = f64> + '_ {
        self.values.iter().copied()
    }

    /// Mean and population standard deviation of the window.
    pub fn stats(&self) -> Result<ResidualStats> {
        if self.values.is_empty() {
            return Err(Error::EmptyWindow);
        }
        let (front, back) = self.values.as_slices();
        let n = self.values.len() as f64;
        let mut sum = 0.0;
        for &v in front {
            sum += v;
        }
        for &v in back {
            sum += v;
        }
        let mean = sum / n;
        let mut squares = 0.0;
        for &v in front {
            let d = v - mean;
            squares += d * d;
        }
        for &v in back {
            let d = v - mean;
            squares += d * d;
        }
        Ok(ResidualStats {
            mean,
            std_dev: (squares / n).sqrt(),
        })
    }

    fn validate(&self) -> Result<()> {
        if self.capacity < 2 {
            return Err(Error::WindowTooSmall(self.capacity));
        }
        if self.values.len() > self.capacity {
            return Err(Error::CorruptCheckpoint(
                "residual window holds more values than its capacity".into(),
            ));
        }
        for &v in &self.values {
            if !v.is_finite() {
                return Err(Error::NonFinite {
                    what: "stored residual",
                    value: v,
                });
            }
        }
        Ok(())
    }
}

/// Mean and population standard deviation of a residual window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResidualStats {
    pub mean: f64,
    pub std_dev: f64,
}

impl ResidualStats {
    pub fn variance(&self) -> f64 {
        self.std_dev * self.std_dev
    }
}

/// How far an observation fell outside the universe, and the derived
/// displacement range. `range` is negative for undershoot and positive for
/// overshoot; at most one of `below`/`above` is nonzero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Displacements {
    pub below: f64,
    pub above: f64,
    pub range: f64,
    pub midpoint: f64,
}

/// Displacements of `value` relative to the universe bounds.
pub fn displacements(value: f64, universe: &Universe) -> Displacements {
    let below = (universe.lower() - value).max(0.0);
    let above = (value - universe.upper()).max(0.0);
    let range = above - below;
    Displacements {
        below,
        above,
        range,
        midpoint: range / 2.0,
    }
}

/// Per-set displacement: the shared residual bias plus two linear fans, one
/// spreading the out-of-universe range across the sets and one spreading the
/// residual dispersion symmetrically about the middle of the family.
pub fn set_displacements(
    mean: f64,
    spread: f64,
    disp: &Displacements,
    set_count: usize,
) -> Vec<f64> {
    let last = (set_count - 1) as f64;
    (0..set_count)
        .map(|i| {
            let i = i as f64;
            mean + (i * disp.range / last - disp.midpoint) + (i * 2.0 * spread / last - spread)
        })
        .collect()
}

/// Per-set widening from the gap between neighboring displacements, which
/// keeps adjacent perturbed sets connected. Edge sets use the one-sided gap.
pub fn set_widenings(displacements: &[f64]) -> Vec<f64> {
    let last = displacements.len() - 1;
    (0..=last)
        .map(|i| {
            let before = displacements[i.saturating_sub(1)];
            let after = displacements[(i + 1).min(last)];
            (before - after).abs()
        })
        .collect()
}

/// Extremes of the current perturbation state, for trace output.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerturbationSpread {
    pub displacement_min: f64,
    pub displacement_max: f64,
    pub widening_max: f64,
}

/// Training parameters for the adaptive model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NsftsParams {
    pub fts: FtsParams,
    /// Residual window length.
    pub residual_window: usize,
    /// Feed the residual variance instead of the standard deviation into the
    /// displacement fan. Off by default so every term stays in series units.
    pub sigma_squared: bool,
}

impl Default for NsftsParams {
    fn default() -> Self {
        Self {
            fts: FtsParams::default(),
            residual_window: 10,
            sigma_squared: false,
        }
    }
}

const CHECKPOINT_FORMAT: &str = "nsfts-model";
const CHECKPOINT_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct CheckpointEnvelope<M> {
    format: String,
    version: u32,
    model: M,
}

/// The adaptive model: a trained time-invariant core, the residual window
/// and the last issued forecast.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NsftsModel {
    core: FtsModel,
    residuals: ResidualWindow,
    last_forecast: Option<Forecast>,
    sigma_squared: bool,
}

impl NsftsModel {
    /// Train the core model on the full series, seed the residual window by
    /// replaying one-step forecasts over the last `residual_window` points,
    /// and store the forecast from the final training point so the first
    /// online residual is well defined.
    pub fn train(values: &[f64], params: &NsftsParams) -> Result<Self> {
        let w = params.residual_window;
        if w < 2 {
            return Err(Error::WindowTooSmall(w));
        }
        if values.len() <= w {
            return Err(Error::SeriesTooShort {
                len: values.len(),
                min: w + 1,
            });
        }
        let core = FtsModel::train(values, &params.fts)?;
        let mut residuals = ResidualWindow::new(w)?;
        for t in values.len() - w..values.len() {
            let predicted = core.forecast(values[t - 1]).value;
            residuals.push(values[t] - predicted);
        }
        let last_forecast = Some(core.forecast(values[values.len() - 1]));
        Ok(Self {
            core,
            residuals,
            last_forecast,
            sigma_squared: params.sigma_squared,
        })
    }

    pub fn core(&self) -> &FtsModel {
        &self.core
    }

    pub fn residuals(&self) -> &ResidualWindow {
        &self.residuals
    }

    pub fn last_forecast(&self) -> Option<Forecast> {
        self.last_forecast
    }

    pub fn universe(&self) -> &Universe {
        self.core.partition().universe()
    }

    /// Extremes of the per-set perturbations currently in effect.
    pub fn perturbation_spread(&self) -> PerturbationSpread {
        let mut spread = PerturbationSpread {
            displacement_min: f64::INFINITY,
            displacement_max: f64::NEG_INFINITY,
            widening_max: 0.0,
        };
        for set in self.core.partition().sets() {
            let p = set.perturbation();
            spread.displacement_min = spread.displacement_min.min(p.displacement());
            spread.displacement_max = spread.displacement_max.max(p.displacement());
            spread.widening_max = spread.widening_max.max(p.widening());
        }
        spread
    }

    /// Fold one observation into the model: push its residual against the
    /// last forecast, recompute the window statistics and the observation's
    /// displacement outside the universe, and overwrite every set's
    /// perturbation with the freshly derived values. Perturbations are
    /// absolute offsets from the trained triangles, not increments.
    pub fn adapt(&mut self, observed: f64) -> Result<()> {
        if !observed.is_finite() {
            return Err(Error::NonFinite {
                what: "observation",
                value: observed,
            });
        }
        let last = self.last_forecast.ok_or(Error::ModelNotReady)?;
        self.residuals.push(observed - last.value);
        let stats = self.residuals.stats()?;
        let spread = if self.sigma_squared {
            stats.variance()
        } else {
            stats.std_dev
        };
        let disp = displacements(observed, self.universe());
        let k = self.core.partition().set_count();
        // The displacement fan is linear in the set index, so it folds into
        // a base plus a per-index slope; the widening is the two-index gap,
        // halved at the edges.
        let slope = (disp.range + 2.0 * spread) / (k - 1) as f64;
        let base = stats.mean - disp.midpoint - spread;
        let edge_widening = slope.abs();
        let inner_widening = 2.0 * edge_widening;
        let sets = self.core.partition_mut().sets_mut();
        for (i, set) in sets.iter_mut().enumerate() {
            let widening = if i == 0 || i + 1 == k {
                edge_widening
            } else {
                inner_widening
            };
            let pert = Perturbation::new(base + i as f64 * slope, widening)?;
            set.set_perturbation(pert);
        }
        Ok(())
    }

    /// One-step forecast from the perturbed sets; the result is retained so
    /// the next observation's residual can be computed.
    pub fn forecast(&mut self, input: f64) -> Forecast {
        let forecast = self.core.forecast_perturbed(input);
        self.last_forecast = Some(forecast);
        forecast
    }

    /// Adapt on an observation, then forecast the next value from it.
    pub fn step(&mut self, observed: f64) -> Result<Forecast> {
        self.adapt(observed)?;
        Ok(self.forecast(observed))
    }

    /// Stream a series through the model. `forecasts[t]` predicts
    /// `values[t + 1]`.
    pub fn run_online(&mut self, values: &[f64]) -> Result<Vec<Forecast>> {
        values.iter().map(|&y| self.step(y)).collect()
    }

    /// Serialize the complete model state to versioned JSON.
    pub fn to_checkpoint(&self) -> Result<String> {
        let envelope = CheckpointEnvelope {
            format: CHECKPOINT_FORMAT.to_string(),
            version: CHECKPOINT_VERSION,
            model: self,
        };
        Ok(serde_json::to_string_pretty(&envelope)?)
    }

    /// Restore a model from checkpoint JSON, rejecting unknown formats and
    /// versions and validating structural invariants.
    pub fn from_checkpoint(text: &str) -> Result<Self> {
        let envelope: CheckpointEnvelope<serde_json::Value> = serde_json::from_str(text)?;
        if envelope.format != CHECKPOINT_FORMAT {
            return Err(Error::CheckpointFormat {
                expected: CHECKPOINT_FORMAT.into(),
                found: envelope.format,
            });
        }
        if envelope.version != CHECKPOINT_VERSION {
            return Err(Error::CheckpointVersion {
                found: envelope.version,
                supported: CHECKPOINT_VERSION,
            });
        }
        let model: NsftsModel = serde_json::from_value(envelope.model)?;
        model.validate()?;
        Ok(model)
    }

    fn validate(&self) -> Result<()> {
        self.core.validate()?;
        self.residuals.validate()?;
        if let Some(f) = &self.last_forecast {
            if !f.value.is_finite() {
                return Err(Error::NonFinite {
                    what: "stored forecast",
                    value: f.value,
                });
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partition::UniverseMode;
    use proptest::prelude::*;

    fn universe(lower: f64, upper: f64) -> Universe {
        Universe::new(lower, upper).unwrap()
    }

    fn midpoint_params(k: usize, w: usize) -> NsftsParams {
        NsftsParams {
            fts: FtsParams {
                set_count: k,
                padding: 0.0,
                universe_mode: UniverseMode::RangePad,
                normalize: true,
            },
            residual_window: w,
            sigma_squared: false,
        }
    }

    #[test]
    fn window_evicts_oldest_first() {
        let mut w = ResidualWindow::new(3).unwrap();
        for v in [1.0, 2.0, 3.0, 4.0, 5.0] {
            w.push(v);
        }
        assert_eq!(w.iter().collect::<Vec<_>>(), vec![3.0, 4.0, 5.0]);
    }

    #[test]
    fn window_capacity_must_hold_two() {
        assert!(matches!(
            ResidualWindow::new(1),
            Err(Error::WindowTooSmall(1))
        ));
    }

    #[test]
    fn stats_of_zeros() {
        let mut w = ResidualWindow::new(3).unwrap();
        for _ in 0..3 {
            w.push(0.0);
        }
        let s = w.stats().unwrap();
        assert_eq!((s.mean, s.std_dev), (0.0, 0.0));
    }

    #[test]
    fn stats_use_population_standard_deviation() {
        let mut w = ResidualWindow::new(2).unwrap();
        w.push(1.0);
        w.push(3.0);
        let s = w.stats().unwrap();
        assert_eq!((s.mean, s.std_dev), (2.0, 1.0));
    }

    #[test]
    fn stats_of_alternating_residuals() {
        let mut w = ResidualWindow::new(4).unwrap();
        for v in [-1.0, 1.0, -1.0, 1.0] {
            w.push(v);
        }
        let s = w.stats().unwrap();
        assert_eq!((s.mean, s.std_dev), (0.0, 1.0));
    }

    #[test]
    fn empty_window_stats_error() {
        let w = ResidualWindow::new(3).unwrap();
        assert!(matches!(w.stats(), Err(Error::EmptyWindow)));
    }

    #[test]
    fn displacement_inside_universe_is_zero() {
        let d = displacements(5.0, &universe(0.0, 10.0));
        assert_eq!(
            (d.below, d.above, d.range, d.midpoint),
            (0.0, 0.0, 0.0, 0.0)
        );
    }

    #[test]
    fn displacement_above_universe() {
        let d = displacements(12.0, &universe(0.0, 10.0));
        assert_eq!(
            (d.below, d.above, d.range, d.midpoint),
            (0.0, 2.0, 2.0, 1.0)
        );
    }

    #[test]
    fn displacement_below_universe_is_negative_range() {
        let d = displacements(-3.0, &universe(0.0, 10.0));
        assert_eq!(
            (d.below, d.above, d.range, d.midpoint),
            (3.0, 0.0, -3.0, -1.5)
        );
    }

    #[test]
    fn pure_bias_moves_every_set_equally() {
        let d = displacements(5.0, &universe(0.0, 10.0));
        assert_eq!(set_displacements(0.5, 0.0, &d, 3), vec![0.5, 0.5, 0.5]);
    }

    #[test]
    fn dispersion_fans_out_symmetrically() {
        let d = displacements(5.0, &universe(0.0, 10.0));
        assert_eq!(set_displacements(0.0, 1.0, &d, 3), vec![-1.0, 0.0, 1.0]);
    }

    #[test]
    fn overshoot_fans_out_across_the_range() {
        let d = displacements(12.0, &universe(0.0, 10.0));
        assert_eq!(set_displacements(0.0, 0.0, &d, 3), vec![-1.0, 0.0, 1.0]);
    }

    #[test]
    fn biased_window_offsets_the_fan_by_its_mean() {
        let mut w = ResidualWindow::new(3).unwrap();
        for v in [0.0, 0.0, 1.5] {
            w.push(v);
        }
        let stats = w.stats().unwrap();
        let sigma = 0.5f64.sqrt();
        assert!((stats.mean - 0.5).abs() < 1e-15);
        assert!((stats.std_dev - sigma).abs() < 1e-15);
        let d = displacements(5.0, &universe(0.0, 10.0));
        let deltas = set_displacements(stats.mean, stats.std_dev, &d, 3);
        assert!((deltas[0] - (0.5 - sigma)).abs() < 1e-15);
        assert!((deltas[1] - 0.5).abs() < 1e-15);
        assert!((deltas[2] - (0.5 + sigma)).abs() < 1e-15);
    }

    #[test]
    fn widening_of_a_uniform_shift_is_zero() {
        assert_eq!(set_widenings(&[0.5, 0.5, 0.5]), vec![0.0, 0.0, 0.0]);
    }

    #[test]
    fn widening_uses_neighbor_gaps() {
        assert_eq!(set_widenings(&[-1.0, 0.0, 1.0]), vec![1.0, 2.0, 1.0]);
    }

    #[test]
    fn widening_one_sided_at_the_edges() {
        assert_eq!(set_widenings(&[0.0, 0.0, 3.0]), vec![0.0, 3.0, 3.0]);
    }

    #[test]
    fn train_on_midpoint_series_seeds_zero_residuals() {
        let values = [0.0, 2.0, 4.0, 6.0, 8.0, 10.0, 0.0, 2.0, 4.0, 6.0];
        let m = NsftsModel::train(&values, &midpoint_params(6, 3)).unwrap();
        assert_eq!(m.residuals().len(), 3);
        assert!(m.residuals().iter().all(|r| r.abs() < 1e-12));
        assert!(m.last_forecast().is_some());
    }

    #[test]
    fn seeded_residuals_match_a_forecast_replay() {
        let values: Vec<f64> = (0..40)
            .map(|i| (i as f64 * 0.7).sin() * 4.0 + 10.0)
            .collect();
        let params = midpoint_params(9, 5);
        let m = NsftsModel::train(&values, &params).unwrap();
        let core = FtsModel::train(&values, &params.fts).unwrap();
        let expected: Vec<f64> = (values.len() - 5..values.len())
            .map(|t| values[t] - core.forecast(values[t - 1]).value)
            .collect();
        let seeded: Vec<f64> = m.residuals().iter().collect();
        assert_eq!(seeded, expected);
    }

    #[test]
    fn train_rejects_series_not_longer_than_window() {
        let err = NsftsModel::train(&[1.0, 2.0, 3.0], &midpoint_params(3, 3)).unwrap_err();
        assert!(matches!(err, Error::SeriesTooShort { len: 3, min: 4 }));
    }

    #[test]
    fn zero_drift_leaves_perturbations_at_identity() {
        let values = [0.0, 2.0, 4.0, 6.0, 8.0, 10.0, 0.0, 2.0, 4.0, 6.0];
        let mut m = NsftsModel::train(&values, &midpoint_params(6, 3)).unwrap();
        // Feed exactly what the model predicts, staying inside the universe.
        let next = m.last_forecast().unwrap().value;
        m.adapt(next).unwrap();
        for set in m.core().partition().sets() {
            assert!(set.perturbation().is_identity());
        }
    }

    #[test]
    fn adapt_rejects_non_finite_observations() {
        let values = [0.0, 2.0, 4.0, 6.0, 8.0, 10.0];
        let mut m = NsftsModel::train(&values, &midpoint_params(6, 2)).unwrap();
        assert!(m.adapt(f64::NAN).is_err());
        assert!(m.adapt(f64::INFINITY).is_err());
    }

    #[test]
    fn adapt_overwrites_rather_than_accumulates() {
        let values = [0.0, 2.0, 4.0, 6.0, 8.0, 10.0, 0.0, 2.0, 4.0, 6.0];
        let mut m = NsftsModel::train(&values, &midpoint_params(6, 3)).unwrap();
        // A biased observation perturbs the sets.
        let predicted = m.last_forecast().unwrap().value;
        m.adapt(predicted + 1.5).unwrap();
        assert!(m.perturbation_spread().displacement_max > 0.0);
        // Three zero residuals flush the bias out of the window; the
        // perturbations are recomputed from scratch, so they return to
        // identity exactly instead of keeping the old displacement.
        for _ in 0..3 {
            let predicted = m.last_forecast().unwrap().value;
            m.adapt(predicted).unwrap();
        }
        for set in m.core().partition().sets() {
            assert!(set.perturbation().is_identity());
        }
    }

    #[test]
    fn uniform_bias_shifts_every_midpoint_by_the_mean() {
        let values = [0.0, 2.0, 4.0, 6.0, 8.0, 10.0, 0.0, 2.0, 4.0, 6.0];
        let mut m = NsftsModel::train(&values, &midpoint_params(6, 3)).unwrap();
        // Hold the stored forecast fixed so each observation lands exactly
        // 0.5 above it, filling the window with constant bias and no spread.
        for _ in 0..3 {
            let predicted = m.last_forecast().unwrap().value;
            m.adapt(predicted + 0.5).unwrap();
            m.last_forecast = Some(Forecast {
                value: predicted,
                fallback: false,
            });
        }
        let stats = m.residuals().stats().unwrap();
        assert!((stats.mean - 0.5).abs() < 1e-12 && stats.std_dev < 1e-12);
        for set in m.core().partition().sets() {
            assert!((set.perturbation().displacement() - 0.5).abs() < 1e-12);
            assert!(set.perturbation().widening().abs() < 1e-12);
            assert!((set.midpoint() - set.base_midpoint() - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn identity_perturbations_forecast_like_the_static_core() {
        let values: Vec<f64> = (0..60)
            .map(|i| (i as f64 * 0.31).sin() * 5.0 + 12.0)
            .collect();
        let params = midpoint_params(11, 4);
        let mut m = NsftsModel::train(&values, &params).unwrap();
        let core = FtsModel::train(&values, &params.fts).unwrap();
        for x in [-3.0, 7.0, 9.5, 12.0, 14.2, 30.0] {
            assert_eq!(m.forecast(x), core.forecast(x));
        }
    }

    #[test]
    fn perturbed_self_rule_returns_perturbed_midpoint() {
        // Midpoints land on 0, 2, 4 with a self-rule on set 2; displacing
        // every set by 3 must make the forecast at the displaced midpoint
        // return that midpoint.
        let values = [0.0, 2.0, 4.0, 4.0, 4.0];
        let mut m = NsftsModel::train(&values, &midpoint_params(3, 2)).unwrap();
        let k = m.core().partition().set_count();
        let deltas = vec![3.0; k];
        let widenings = set_widenings(&deltas);
        for (set, (&d, &w)) in m
            .core
            .partition_mut()
            .sets_mut()
            .iter_mut()
            .zip(deltas.iter().zip(&widenings))
        {
            set.set_perturbation(Perturbation::new(d, w).unwrap());
        }
        let idx = m.core().partition().dominant_set(4.0, false);
        let perturbed_mid = m.core().partition().sets()[idx].midpoint();
        let f = m.forecast(perturbed_mid);
        assert!(!f.fallback);
        assert!((f.value - perturbed_mid).abs() < 1e-12);
    }

    #[test]
    fn run_online_is_empty_on_empty_input() {
        let values = [0.0, 2.0, 4.0, 6.0, 8.0, 10.0];
        let mut m = NsftsModel::train(&values, &midpoint_params(6, 2)).unwrap();
        assert!(m.run_online(&[]).unwrap().is_empty());
    }

    #[test]
    fn rulebase_is_untouched_by_adaptation() {
        let values: Vec<f64> = (0..80)
            .map(|i| (i as f64 * 0.5).sin() * 3.0 + 8.0)
            .collect();
        let mut m = NsftsModel::train(&values, &midpoint_params(9, 5)).unwrap();
        let before = serde_json::to_string(m.core().rules()).unwrap();
        // Drift hard enough to leave the universe.
        let drift: Vec<f64> = (0..200).map(|i| 8.0 + i as f64 * 0.3).collect();
        m.run_online(&drift).unwrap();
        let after = serde_json::to_string(m.core().rules()).unwrap();
        assert_eq!(before, after);
        assert!(m.perturbation_spread().displacement_max > 1.0);
    }

    #[test]
    fn checkpoint_round_trips_exactly() {
        let values: Vec<f64> = (0..60)
            .map(|i| (i as f64 * 0.23).cos() * 4.0 + 9.0)
            .collect();
        let mut m = NsftsModel::train(&values, &midpoint_params(7, 4)).unwrap();
        m.run_online(&[9.0, 9.5, 10.0, 11.0, 12.5]).unwrap();
        let text = m.to_checkpoint().unwrap();
        let restored = NsftsModel::from_checkpoint(&text).unwrap();
        assert_eq!(m, restored);
    }

    #[test]
    fn checkpoint_version_mismatch_is_rejected() {
        let values = [0.0, 2.0, 4.0, 6.0, 8.0, 10.0];
        let m = NsftsModel::train(&values, &midpoint_params(6, 2)).unwrap();
        let text = m
            .to_checkpoint()
            .unwrap()
            .replace("\"version\": 1", "\"version\": 99");
        match NsftsModel::from_checkpoint(&text) {
            Err(Error::CheckpointVersion {
                found: 99,
                supported: 1,
            }) => {}
            other => panic!("expected version rejection, got {other:?}"),
        }
    }

    #[test]
    fn checkpoint_format_mismatch_is_rejected() {
        let text = r#"{"format":"something-else","version":1,"model":{}}"#;
        assert!(matches!(
            NsftsModel::from_checkpoint(text),
            Err(Error::CheckpointFormat { .. })
        ));
    }

    proptest! {
        #[test]
        fn window_fifo_holds_the_last_w(
            capacity in 2usize..12,
            values in proptest::collection::vec(-100.0..100.0f64, 0..60),
        ) {
            let mut w = ResidualWindow::new(capacity).unwrap();
            for &v in &values {
                w.push(v);
            }
            let tail: Vec<f64> = values
                .iter()
                .copied()
                .skip(values.len().saturating_sub(capacity))
                .collect();
            prop_assert_eq!(w.iter().collect::<Vec<_>>(), tail);
        }

        #[test]
        fn displacement_fan_is_antisymmetric_and_widening_symmetric(
            sigma in 0.0..10.0f64,
            k in 3usize..40,
        ) {
            let d = displacements(5.0, &universe(0.0, 10.0));
            let deltas = set_displacements(0.0, sigma, &d, k);
            let rhos = set_widenings(&deltas);
            for i in 0..k {
                prop_assert!((deltas[i] + deltas[k - 1 - i]).abs() < 1e-9);
                prop_assert!((rhos[i] - rhos[k - 1 - i]).abs() < 1e-9);
            }
        }
    }
}
