//! Value types shared by the transform, pooling and CLI layers.

use std::f64::consts::FRAC_PI_2;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};

/// One study: `events` successes out of `size` subjects.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct StudyRecord {
    pub study_id: String,
    pub events: u64,
    pub size: u64,
}

impl StudyRecord {
    pub fn new(study_id: impl Into<String>, events: u64, size: u64) -> Result<Self> {
        let study_id = study_id.into();
        if size < 1 {
            return Err(Error::Validation(format!(
                "study {study_id}: size must be at least 1"
            )));
        }
        if events > size {
            return Err(Error::Validation(format!(
                "study {study_id}: events ({events}) exceed size ({size})"
            )));
        }
        Ok(Self {
            study_id,
            events,
            size,
        })
    }

    /// Observed proportion `events / size`.
    pub fn proportion(&self) -> f64 {
        self.events as f64 / self.size as f64
    }
}

/// A value on the transformed (angular) scale, in radians within `[0, π/2]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
#[serde(transparent)]
pub struct Theta(f64);

impl Theta {
    pub fn new(radians: f64) -> Result<Self> {
        if !radians.is_finite() {
            return Err(Error::domain(format!(
                "theta must be finite, got {radians}"
            )));
        }
        if !(0.0..=FRAC_PI_2).contains(&radians) {
            return Err(Error::domain(format!(
                "theta must lie in [0, pi/2], got {radians}"
            )));
        }
        Ok(Theta(radians))
    }

    #[inline]
    pub fn radians(self) -> f64 {
        self.0
    }
}

impl fmt::Display for Theta {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0, f)
    }
}

/// The image `[θ(0), θ(1)]` of the forward transform for a given sample size.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DomainInterval {
    pub lower: f64,
    pub upper: f64,
}

impl DomainInterval {
    pub fn contains(&self, theta: f64) -> bool {
        self.lower <= theta && theta <= self.upper
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }
}

/// Sample size used by the inverse transform. Real valued, since the
/// harmonic mean of unequal study sizes is generally not an integer.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
#[serde(transparent)]
pub struct EffectiveSampleSize(f64);

impl EffectiveSampleSize {
    pub fn new(value: f64) -> Result<Self> {
        if !(value.is_finite() && value > 0.0) {
            return Err(Error::domain(format!(
                "sample size must be positive and finite, got {value}"
            )));
        }
        Ok(EffectiveSampleSize(value))
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }
}

/// Target maximum percent error, strictly between 0 and 1/2.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct AccuracyLevel(f64);

impl AccuracyLevel {
    pub fn new(epsilon: f64) -> Result<Self> {
        if !(epsilon.is_finite() && epsilon > 0.0 && epsilon < 0.5) {
            return Err(Error::domain(format!(
                "accuracy level must lie in (0, 1/2), got {epsilon}"
            )));
        }
        Ok(AccuracyLevel(epsilon))
    }

    #[inline]
    pub fn epsilon(self) -> f64 {
        self.0
    }
}
