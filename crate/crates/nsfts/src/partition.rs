//! Universe-of-discourse estimation and grid partitioning into overlapping
//! triangular sets.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fuzzy::{FuzzySet, Triangle};

/// The bounded interval the fuzzy sets are defined on.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Universe {
    lower: f64,
    upper: f64,
}

impl Universe {
    pub fn new(lower: f64, upper: f64) -> Result<Self> {
        if !lower.is_finite() || !upper.is_finite() || lower >= upper {
            return Err(Error::DegenerateUniverse { lower, upper });
        }
        Ok(Self { lower, upper })
    }

    pub fn lower(&self) -> f64 {
        self.lower
    }

    pub fn upper(&self) -> f64 {
        self.upper
    }

    pub fn span(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.lower && x <= self.upper
    }
}

/// How data bounds are extrapolated into universe bounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum UniverseMode {
    /// Pad both bounds by `padding` times the data range. Works for any
    /// finite data, including negative and constant series.
    #[default]
    RangePad,
    /// Scale each bound by its own magnitude: `min - min*padding` and
    /// `max + max*padding`. Only valid for strictly positive data; with
    /// `min <= 0` the lower bound would move the wrong way.
    PaperExact,
}

/// Estimate universe bounds from training data.
///
/// In `RangePad` mode a constant series is widened by
/// `padding * max(|value|, 1)` on each side so a usable interval always
/// exists when `padding > 0`.
pub fn universe_from_data(values: &[f64], padding: f64, mode: UniverseMode) -> Result<Universe> {
    if values.is_empty() {
        return Err(Error::EmptySeries);
    }
    if !padding.is_finite() || padding < 0.0 {
        return Err(Error::InvalidPadding(padding));
    }
    let mut min = f64::INFINITY;
    let mut max = f64::NEG_INFINITY;
    for &v in values {
        if !v.is_finite() {
            return Err(Error::NonFinite {
                what: "series value",
                value: v,
            });
        }
        min = min.min(v);
        max = max.max(v);
    }
    match mode {
        UniverseMode::RangePad => {
            let range = max - min;
            let pad = if range > 0.0 {
                padding * range
            } else {
                padding * max.abs().max(1.0)
            };
            Universe::new(min - pad, max + pad)
        }
        UniverseMode::PaperExact => {
            if min <= 0.0 {
                return Err(Error::PositiveDataRequired(min));
            }
            Universe::new(min - min * padding, max + max * padding)
        }
    }
}

/// An ordered family of overlapping triangular sets on a uniform grid of
/// midpoints. Interior sets span from the previous midpoint to the next one;
/// the two boundary sets mirror one grid step outward so the family covers
/// the whole universe with total membership one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Partition {
    universe: Universe,
    sets: Vec<FuzzySet>,
}

impl Partition {
    pub fn grid(universe: Universe, set_count: usize) -> Result<Self> {
        if set_count < 3 {
            return Err(Error::TooFewSets(set_count));
        }
        let step = universe.span() / (set_count - 1) as f64;
        let midpoint = |i: isize| universe.lower() + i as f64 * step;
        let sets = (0..set_count)
            .map(|i| {
                let i = i as isize;
                let base = Triangle::new(midpoint(i - 1), midpoint(i), midpoint(i + 1))?;
                Ok(FuzzySet::new(i as usize, base))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { universe, sets })
    }

    pub fn universe(&self) -> &Universe {
        &self.universe
    }

    pub fn set_count(&self) -> usize {
        self.sets.len()
    }

    pub fn sets(&self) -> &[FuzzySet] {
        &self.sets
    }

    pub(crate) fn sets_mut(&mut self) -> &mut [FuzzySet] {
        &mut self.sets
    }

    /// Grid spacing between adjacent midpoints.
    pub fn step(&self) -> f64 {
        self.universe.span() / (self.set_count() - 1) as f64
    }

    /// Membership grades of `x` across all sets, using either the live
    /// perturbed triangles or the trained base triangles.
    pub fn fuzzify(&self, x: f64, perturbed: bool) -> Vec<f64> {
        self.sets
            .iter()
            .map(|s| {
                if perturbed {
                    s.membership(x)
                } else {
                    s.base_membership(x)
                }
            })
            .collect()
    }

    /// Index of the set with the highest membership grade; ties break toward
    /// the lower index.
    pub fn dominant_set(&self, x: f64, perturbed: bool) -> usize {
        let mut best = 0;
        let mut best_mu = f64::NEG_INFINITY;
        for (i, set) in self.sets.iter().enumerate() {
            let mu = if perturbed {
                set.membership(x)
            } else {
                set.base_membership(x)
            };
            if mu > best_mu {
                best = i;
                best_mu = mu;
            }
        }
        best
    }

    /// Index of the set whose (perturbed or base) midpoint is closest to `x`;
    /// ties break toward the lower index.
    pub fn nearest_set(&self, x: f64, perturbed: bool) -> usize {
        let mut best = 0;
        let mut best_dist = f64::INFINITY;
        for (i, set) in self.sets.iter().enumerate() {
            let mid = if perturbed {
                set.midpoint()
            } else {
                set.base_midpoint()
            };
            let dist = (x - mid).abs();
            if dist < best_dist {
                best = i;
                best_dist = dist;
            }
        }
        best
    }

    pub(crate) fn validate(&self) -> Result<()> {
        if self.sets.len() < 3 {
            return Err(Error::TooFewSets(self.sets.len()));
        }
        let mut prev = f64::NEG_INFINITY;
        for (i, set) in self.sets.iter().enumerate() {
            set.validate()?;
            if set.index() != i || set.base_midpoint() <= prev {
                return Err(Error::CorruptCheckpoint(format!(
                    "partition set {i} out of order"
                )));
            }
            prev = set.base_midpoint();
        }
        Ok(())
    }
}
