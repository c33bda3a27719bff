//! Triangular membership functions and the perturbation that displaces and
//! widens them.
//!
//! A [`FuzzySet`] keeps its training-time [`Triangle`] untouched and carries a
//! live [`Perturbation`] on the side, so adaptation can overwrite the
//! perturbation at any time without losing the trained geometry.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Triangular membership function parameters: lower basis, midpoint, upper
/// basis, all in series units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Triangle {
    lower: f64,
    center: f64,
    upper: f64,
}

impl Triangle {
    pub fn new(lower: f64, center: f64, upper: f64) -> Result<Self> {
        let finite = lower.is_finite() && center.is_finite() && upper.is_finite();
        if !finite || lower > center || center > upper {
            return Err(Error::InvalidTriangle {
                lower,
                center,
                upper,
            });
        }
        Ok(Self {
            lower,
            center,
            upper,
        })
    }

    pub fn lower(&self) -> f64 {
        self.lower
    }

    pub fn center(&self) -> f64 {
        self.center
    }

    pub fn upper(&self) -> f64 {
        self.upper
    }

    /// Support width `upper - lower`.
    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    /// Membership grade of `x` in [0, 1]: zero outside the support, rising
    /// linearly on the left branch and falling on the right. A zero-width
    /// branch collapses to a crisp 1.0 at the coincident point.
    pub fn membership(&self, x: f64) -> f64 {
        if !x.is_finite() || x < self.lower || x > self.upper {
            0.0
        } else if x <= self.center {
            if self.center == self.lower {
                1.0
            } else {
                (x - self.lower) / (self.center - self.lower)
            }
        } else {
            // center < x <= upper, which forces upper > center.
            (self.upper - x) / (self.upper - self.center)
        }
    }

    /// The triangle after displacing all three parameters and widening the
    /// support symmetrically about the new center.
    pub fn perturbed(&self, pert: &Perturbation) -> Triangle {
        let half = pert.widening / 2.0;
        Triangle {
            lower: (self.lower + pert.displacement) - half,
            center: self.center + pert.displacement,
            upper: (self.upper + pert.displacement) + half,
        }
    }

    pub(crate) fn validate(&self) -> Result<()> {
        Triangle::new(self.lower, self.center, self.upper).map(|_| ())
    }
}

/// Displacement and widening applied to a triangle. The identity perturbation
/// leaves the triangle untouched; the widening is never negative.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Perturbation {
    displacement: f64,
    widening: f64,
}

impl Perturbation {
    pub const IDENTITY: Perturbation = Perturbation {
        displacement: 0.0,
        widening: 0.0,
    };

    pub fn new(displacement: f64, widening: f64) -> Result<Self> {
        if !displacement.is_finite() || !widening.is_finite() || widening < 0.0 {
            return Err(Error::InvalidPerturbation {
                displacement,
                widening,
            });
        }
        Ok(Self {
            displacement,
            widening,
        })
    }

    pub fn displacement(&self) -> f64 {
        self.displacement
    }

    pub fn widening(&self) -> f64 {
        self.widening
    }

    pub fn is_identity(&self) -> bool {
        self.displacement == 0.0 && self.widening == 0.0
    }

    pub(crate) fn validate(&self) -> Result<()> {
        Perturbation::new(self.displacement, self.widening).map(|_| ())
    }
}

impl Default for Perturbation {
    fn default() -> Self {
        Self::IDENTITY
    }
}

/// One fuzzy set of a partition: its position in the ordered family, its
/// trained triangle and its current perturbation state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FuzzySet {
    index: usize,
    base: Triangle,
    perturbation: Perturbation,
}

impl FuzzySet {
    pub fn new(index: usize, base: Triangle) -> Self {
        Self {
            index,
            base,
            perturbation: Perturbation::IDENTITY,
        }
    }

    pub fn index(&self) -> usize {
        self.index
    }

    pub fn base(&self) -> &Triangle {
        &self.base
    }

    pub fn perturbation(&self) -> &Perturbation {
        &self.perturbation
    }

    pub fn set_perturbation(&mut self, perturbation: Perturbation) {
        self.perturbation = perturbation;
    }

    /// The triangle currently in effect.
    pub fn effective(&self) -> Triangle {
        self.base.perturbed(&self.perturbation)
    }

    /// Membership of `x` under the current perturbation.
    pub fn membership(&self, x: f64) -> f64 {
        self.effective().membership(x)
    }

    /// Membership of `x` under the trained, unperturbed triangle.
    pub fn base_membership(&self, x: f64) -> f64 {
        self.base.membership(x)
    }

    /// Midpoint currently in effect (trained center plus displacement).
    pub fn midpoint(&self) -> f64 {
        self.base.center + self.perturbation.displacement
    }

    /// Trained midpoint.
    pub fn base_midpoint(&self) -> f64 {
        self.base.center
    }

    pub(crate) fn validate(&self) -> Result<()> {
        self.base.validate()?;
        self.perturbation.validate()
    }
}
