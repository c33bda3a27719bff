//! Competitor training policies that wrap the time-invariant model: periodic
//! retraining on a sliding window, and a FIFO ensemble of such models.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fts::{FtsModel, FtsParams};

/// Sliding-window retraining schedule: rebuild the model from the last
/// `memory_window` observations every `refresh_interval` steps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RetrainPolicy {
    pub memory_window: usize,
    pub refresh_interval: usize,
}

impl Default for RetrainPolicy {
    fn default() -> Self {
        Self {
            memory_window: 100,
            refresh_interval: 10,
        }
    }
}

impl RetrainPolicy {
    pub fn validate(&self) -> Result<()> {
        if self.memory_window < 2 || self.refresh_interval < 1 {
            return Err(Error::InvalidPolicy {
                window: self.memory_window,
                interval: self.refresh_interval,
            });
        }
        Ok(())
    }

    /// Number of retrains a stream of `len` observations triggers.
    pub fn retrain_count(&self, len: usize) -> usize {
        if len < self.memory_window {
            0
        } else {
            (len - self.memory_window) / self.refresh_interval + 1
        }
    }
}

/// One streamed forecast. `warmup` marks placeholder predictions emitted
/// before the first model exists; those are the last observed value and are
/// excluded from scoring downstream.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepForecast {
    pub value: f64,
    pub fallback: bool,
    pub warmup: bool,
}

/// Result of streaming a series through the sliding-window policy.
#[derive(Debug)]
pub struct TimeVariantRun {
    /// `forecasts[t]` predicts `values[t + 1]`.
    pub forecasts: Vec<StepForecast>,
    pub retrain_count: usize,
    /// The model in effect after the final observation.
    pub model: Option<FtsModel>,
}

/// Stream a series through periodic retraining. The model is rebuilt from
/// scratch at each scheduled instant; between retrains the current model
/// forecasts unchanged, and before the first training instant the last
/// observation is emitted as a flagged warm-up placeholder.
pub fn run_time_variant(
    values: &[f64],
    policy: &RetrainPolicy,
    params: &FtsParams,
) -> Result<TimeVariantRun> {
    policy.validate()?;
    if values.len() <= policy.memory_window {
        return Err(Error::SeriesTooShort {
            len: values.len(),
            min: policy.memory_window + 1,
        });
    }
    let mut model: Option<FtsModel> = None;
    let mut retrain_count = 0;
    let mut forecasts = Vec::with_capacity(values.len());
    for (t, &y) in values.iter().enumerate() {
        let seen = t + 1;
        if seen >= policy.memory_window
            && (seen - policy.memory_window).is_multiple_of(policy.refresh_interval)
        {
            let window = &values[seen - policy.memory_window..seen];
            model = Some(FtsModel::train(window, params)?);
            retrain_count += 1;
        }
        forecasts.push(match &model {
            Some(m) => {
                let f = m.forecast(y);
                StepForecast {
                    value: f.value,
                    fallback: f.fallback,
                    warmup: false,
                }
            }
            None => StepForecast {
                value: y,
                fallback: false,
                warmup: true,
            },
        });
    }
    Ok(TimeVariantRun {
        forecasts,
        retrain_count,
        model,
    })
}

/// Result of streaming a series through the FIFO ensemble.
#[derive(Debug)]
pub struct EnsembleRun {
    /// `forecasts[t]` predicts `values[t + 1]`.
    pub forecasts: Vec<StepForecast>,
    pub retrain_count: usize,
    /// Members alive after the final observation, oldest first.
    pub members: Vec<FtsModel>,
}

/// Stream a series through the incremental ensemble: the same retrain
/// schedule as [`run_time_variant`], but each retrain appends a new member
/// and evicts the oldest once `capacity` is reached. Forecasts are the
/// unweighted mean of the member forecasts, each member applying its own
/// no-rule fallback.
pub fn run_incremental_ensemble(
    values: &[f64],
    policy: &RetrainPolicy,
    capacity: usize,
    params: &FtsParams,
) -> Result<EnsembleRun> {
    policy.validate()?;
    if capacity == 0 {
        return Err(Error::EmptyEnsemble);
    }
    if values.len() <= policy.memory_window {
        return Err(Error::SeriesTooShort {
            len: values.len(),
            min: policy.memory_window + 1,
        });
    }
    let mut members: VecDeque<FtsModel> = VecDeque::with_capacity(capacity);
    let mut retrain_count = 0;
    let mut forecasts = Vec::with_capacity(values.len());
    for (t, &y) in values.iter().enumerate() {
        let seen = t + 1;
        if seen >= policy.memory_window
            && (seen - policy.memory_window).is_multiple_of(policy.refresh_interval)
        {
            let window = &values[seen - policy.memory_window..seen];
            if members.len() == capacity {
                members.pop_front();
            }
            members.push_back(FtsModel::train(window, params)?);
            retrain_count += 1;
        }
        forecasts.push(if members.is_empty() {
            StepForecast {
                value: y,
                fallback: false,
                warmup: true,
            }
        } else {
            let mut sum = 0.0;
            let mut all_fallback = true;
            for member in &members {
                let f = member.forecast(y);
                sum += f.value;
                all_fallback &= f.fallback;
            }
            StepForecast {
                value: sum / members.len() as f64,
                fallback: all_fallback,
                warmup: false,
            }
        });
    }
    Ok(EnsembleRun {
        forecasts,
        retrain_count,
        members: members.into(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partition::UniverseMode;

    fn params(k: usize) -> FtsParams {
        FtsParams {
            set_count: k,
            padding: 0.0,
            universe_mode: UniverseMode::RangePad,
            normalize: true,
        }
    }

    fn sine(len: usize) -> Vec<f64> {
        (0..len)
            .map(|i| (i as f64 * 0.4).sin() * 5.0 + 10.0)
            .collect()
    }

    #[test]
    fn retrain_count_follows_the_schedule() {
        let policy = RetrainPolicy {
            memory_window: 100,
            refresh_interval: 10,
        };
        let values = sine(437);
        let run = run_time_variant(&values, &policy, &params(9)).unwrap();
        assert_eq!(run.retrain_count, (437 - 100) / 10 + 1);
        assert_eq!(run.retrain_count, policy.retrain_count(values.len()));
        assert_eq!(run.forecasts.len(), values.len());
    }

    #[test]
    fn refresh_equal_to_length_trains_once() {
        let values = sine(200);
        let policy = RetrainPolicy {
            memory_window: 50,
            refresh_interval: 200,
        };
        let run = run_time_variant(&values, &policy, &params(9)).unwrap();
        assert_eq!(run.retrain_count, 1);
        // Equivalent to a static model trained on the first 50 points.
        let static_model = FtsModel::train(&values[..50], &params(9)).unwrap();
        for (t, f) in run.forecasts.iter().enumerate().skip(49) {
            assert_eq!(f.value, static_model.forecast(values[t]).value);
        }
    }

    #[test]
    fn warmup_forecasts_echo_the_last_observation() {
        let values = sine(120);
        let policy = RetrainPolicy {
            memory_window: 100,
            refresh_interval: 10,
        };
        let run = run_time_variant(&values, &policy, &params(9)).unwrap();
        for (f, &y) in run.forecasts.iter().zip(&values).take(99) {
            assert!(f.warmup);
            assert_eq!(f.value, y);
        }
        assert!(!run.forecasts[99].warmup);
    }

    #[test]
    fn periodic_midpoint_series_forecasts_exactly_after_warmup() {
        // Sawtooth over the exact midpoints of a 5-set grid on [0, 8]; every
        // precedent has a unique consequent, so rule forecasts are exact.
        let cycle = [0.0, 2.0, 4.0, 6.0, 8.0];
        let values: Vec<f64> = cycle.iter().cycle().take(160).copied().collect();
        let policy = RetrainPolicy {
            memory_window: 15,
            refresh_interval: 5,
        };
        let run = run_time_variant(&values, &policy, &params(5)).unwrap();
        for t in 15..values.len() - 1 {
            assert!(!run.forecasts[t].warmup);
            assert!(
                (run.forecasts[t].value - values[t + 1]).abs() < 1e-9,
                "t={t}: {} vs {}",
                run.forecasts[t].value,
                values[t + 1]
            );
        }
    }

    #[test]
    fn series_not_longer_than_window_is_rejected() {
        let policy = RetrainPolicy {
            memory_window: 100,
            refresh_interval: 10,
        };
        assert!(matches!(
            run_time_variant(&sine(100), &policy, &params(9)),
            Err(Error::SeriesTooShort { len: 100, min: 101 })
        ));
    }

    #[test]
    fn single_member_ensemble_matches_time_variant() {
        let values = sine(300);
        let policy = RetrainPolicy {
            memory_window: 60,
            refresh_interval: 15,
        };
        let tv = run_time_variant(&values, &policy, &params(9)).unwrap();
        let ens = run_incremental_ensemble(&values, &policy, 1, &params(9)).unwrap();
        assert_eq!(tv.retrain_count, ens.retrain_count);
        for (a, b) in tv.forecasts.iter().zip(&ens.forecasts) {
            assert_eq!(a.value, b.value);
            assert_eq!(a.warmup, b.warmup);
        }
    }

    #[test]
    fn ensemble_membership_never_exceeds_capacity() {
        let values = sine(400);
        let policy = RetrainPolicy {
            memory_window: 50,
            refresh_interval: 10,
        };
        let run = run_incremental_ensemble(&values, &policy, 3, &params(9)).unwrap();
        assert!(run.retrain_count > 3);
        assert_eq!(run.members.len(), 3);
    }

    #[test]
    fn ensemble_mean_combines_member_forecasts() {
        // Two members trained on different halves of a step change disagree;
        // the combined forecast must be their unweighted mean.
        let mut values = vec![5.0; 60];
        values.extend(vec![15.0; 60]);
        let policy = RetrainPolicy {
            memory_window: 50,
            refresh_interval: 60,
        };
        let padded = FtsParams {
            padding: 0.2,
            ..params(5)
        };
        let run = run_incremental_ensemble(&values, &policy, 2, &padded).unwrap();
        assert_eq!(run.members.len(), 2);
        let last_x = *values.last().unwrap();
        let a = run.members[0].forecast(last_x).value;
        let b = run.members[1].forecast(last_x).value;
        assert_ne!(a, b);
        assert_eq!(run.forecasts.last().unwrap().value, (a + b) / 2.0);
    }

    #[test]
    fn stale_patterns_vanish_from_the_retrained_rulebase() {
        // Alternating jumps only occur in the first stretch of the stream;
        // the final model, trained on the most recent window, retains only
        // the self-rule of the constant tail.
        let mut values: Vec<f64> = [0.0, 8.0].repeat(30);
        values.extend(vec![4.0; 100]);
        let policy = RetrainPolicy {
            memory_window: 40,
            refresh_interval: 10,
        };
        let padded = FtsParams {
            padding: 0.2,
            ..params(5)
        };
        let run = run_time_variant(&values, &policy, &padded).unwrap();
        let model = run.model.unwrap();
        assert_eq!(model.rules().rule_count(), 1);
        let tail_set = model.partition().dominant_set(4.0, false);
        assert_eq!(model.rules().consequents(tail_set), Some(&[tail_set][..]));
    }
}
