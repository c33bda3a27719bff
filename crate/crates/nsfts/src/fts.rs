//! Conventional first-order fuzzy time series: rule induction from fuzzified
//! data and static forecasting over the trained sets.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::partition::{universe_from_data, Partition, UniverseMode};

/// First-order rules grouped by precedent: each entry maps a precedent set
/// index to the distinct consequent set indices observed after it, in first
/// insertion order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RuleBase {
    set_count: usize,
    rules: BTreeMap<usize, Vec<usize>>,
}

impl RuleBase {
    pub fn from_patterns(
        set_count: usize,
        patterns: impl IntoIterator<Item = (usize, usize)>,
    ) -> Self {
        let mut rules: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (lhs, rhs) in patterns {
            let entry = rules.entry(lhs).or_default();
            if !entry.contains(&rhs) {
                entry.push(rhs);
            }
        }
        Self { set_count, rules }
    }

    pub fn set_count(&self) -> usize {
        self.set_count
    }

    pub fn rule_count(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    pub fn contains(&self, precedent: usize) -> bool {
        self.rules.contains_key(&precedent)
    }

    pub fn consequents(&self, precedent: usize) -> Option<&[usize]> {
        self.rules.get(&precedent).map(Vec::as_slice)
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &[usize])> {
        self.rules.iter().map(|(&lhs, rhs)| (lhs, rhs.as_slice()))
    }

    pub(crate) fn validate(&self) -> Result<()> {
        for (lhs, rhs) in &self.rules {
            let in_range = *lhs < self.set_count && rhs.iter().all(|&r| r < self.set_count);
            if rhs.is_empty() || !in_range {
                return Err(Error::CorruptCheckpoint(format!(
                    "rule {lhs} has out-of-range or empty consequents"
                )));
            }
        }
        Ok(())
    }
}

/// First-order temporal patterns `(precedent, consequent)` from consecutive
/// observations, taking the dominant base set of each value. Series with
/// fewer than two points yield no patterns.
pub fn extract_patterns(values: &[f64], partition: &Partition) -> Vec<(usize, usize)> {
    values
        .windows(2)
        .map(|pair| {
            (
                partition.dominant_set(pair[0], false),
                partition.dominant_set(pair[1], false),
            )
        })
        .collect()
}

/// A crisp forecast plus whether it came from the no-rule fallback
/// (nearest-midpoint) instead of rule matching.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Forecast {
    pub value: f64,
    pub fallback: bool,
}

/// Training parameters shared by every model in this crate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FtsParams {
    /// Number of fuzzy sets in the partition.
    pub set_count: usize,
    /// Universe padding fraction.
    pub padding: f64,
    /// How data bounds become universe bounds.
    pub universe_mode: UniverseMode,
    /// Divide defuzzified sums by the total activation. Disabling this
    /// reproduces the raw weighted sum, which is only meaningful while the
    /// matched memberships sum to one.
    pub normalize: bool,
}

impl Default for FtsParams {
    fn default() -> Self {
        Self {
            set_count: 35,
            padding: 0.2,
            universe_mode: UniverseMode::RangePad,
            normalize: true,
        }
    }
}

/// A trained time-invariant model: partition plus rule base.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FtsModel {
    partition: Partition,
    rules: RuleBase,
    normalize: bool,
}

impl FtsModel {
    /// Train on a series: estimate the universe, build the grid partition,
    /// extract temporal patterns and group them into rules.
    pub fn train(values: &[f64], params: &FtsParams) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::SeriesTooShort {
                len: values.len(),
                min: 2,
            });
        }
        let universe = universe_from_data(values, params.padding, params.universe_mode)?;
        let partition = Partition::grid(universe, params.set_count)?;
        let patterns = extract_patterns(values, &partition);
        let rules = RuleBase::from_patterns(params.set_count, patterns);
        Ok(Self {
            partition,
            rules,
            normalize: params.normalize,
        })
    }

    pub fn partition(&self) -> &Partition {
        &self.partition
    }

    pub(crate) fn partition_mut(&mut self) -> &mut Partition {
        &mut self.partition
    }

    pub fn rules(&self) -> &RuleBase {
        &self.rules
    }

    pub fn normalize(&self) -> bool {
        self.normalize
    }

    /// One-step forecast from the trained, unperturbed sets.
    pub fn forecast(&self, x: f64) -> Forecast {
        let memberships = self.partition.fuzzify(x, false);
        let sets = self.partition.sets();
        defuzzify(
            &memberships,
            &self.rules,
            |i| sets[i].base_midpoint(),
            self.normalize,
            || self.partition.nearest_set(x, false),
        )
    }

    /// One-step forecast from the live perturbed sets, with consequent
    /// midpoints taken at their displaced positions.
    pub(crate) fn forecast_perturbed(&self, x: f64) -> Forecast {
        let memberships = self.partition.fuzzify(x, true);
        let sets = self.partition.sets();
        defuzzify(
            &memberships,
            &self.rules,
            |i| sets[i].midpoint(),
            self.normalize,
            || self.partition.nearest_set(x, true),
        )
    }

    pub(crate) fn validate(&self) -> Result<()> {
        self.partition.validate()?;
        self.rules.validate()?;
        if self.rules.set_count() != self.partition.set_count() {
            return Err(Error::CorruptCheckpoint(
                "rule base and partition disagree on set count".into(),
            ));
        }
        Ok(())
    }
}

/// Activation-weighted combination of the matched rules' consequent
/// midpoints. Falls back to the nearest midpoint when no positive-membership
/// set has a rule.
fn defuzzify(
    memberships: &[f64],
    rules: &RuleBase,
    midpoint: impl Fn(usize) -> f64,
    normalize: bool,
    nearest: impl FnOnce() -> usize,
) -> Forecast {
    let mut weighted = 0.0;
    let mut total = 0.0;
    let mut matched = false;
    for (i, &mu) in memberships.iter().enumerate() {
        if mu <= 0.0 {
            continue;
        }
        let Some(rhs) = rules.consequents(i) else {
            continue;
        };
        let mean: f64 = rhs.iter().map(|&a| midpoint(a)).sum::<f64>() / rhs.len() as f64;
        weighted += mu * mean;
        total += mu;
        matched = true;
    }
    if !matched {
        return Forecast {
            value: midpoint(nearest()),
            fallback: true,
        };
    }
    Forecast {
        value: if normalize {
            weighted / total
        } else {
            weighted
        },
        fallback: false,
    }
}
