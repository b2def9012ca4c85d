//! Failure/repair parameters and the availability values derived from them.
//!
//! Unavailability, not availability, is the stored quantity. The deployments
//! modelled here run so close to availability 1.0 that the complement is the
//! only representation that keeps usable relative precision; a ten-server
//! OR policy sits around 1e-13 unavailable, far below the resolution of
//! `1.0 - a` in f64.

use std::fmt;

use crate::Error;

/// Hours in the default reporting year.
pub const HOURS_PER_YEAR: f64 = 8760.0;

/// Mean time to failure and mean time to repair, in hours.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FailureRepairPair {
    mttf_hours: f64,
    mttr_hours: f64,
}

impl FailureRepairPair {
    /// Builds a pair from positive, finite durations.
    pub fn new(mttf_hours: f64, mttr_hours: f64) -> Result<Self, Error> {
        for (label, value) in [("mttf_hours", mttf_hours), ("mttr_hours", mttr_hours)] {
            if !value.is_finite() || value <= 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "{label} must be a positive finite number of hours, got {value}"
                )));
            }
        }
        Ok(Self {
            mttf_hours,
            mttr_hours,
        })
    }

    pub fn mttf_hours(self) -> f64 {
        self.mttf_hours
    }

    pub fn mttr_hours(self) -> f64 {
        self.mttr_hours
    }

    /// Copy with the failure side replaced.
    pub fn with_mttf(self, mttf_hours: f64) -> Result<Self, Error> {
        Self::new(mttf_hours, self.mttr_hours)
    }

    /// Copy with the repair side replaced.
    pub fn with_mttr(self, mttr_hours: f64) -> Result<Self, Error> {
        Self::new(self.mttf_hours, mttr_hours)
    }

    /// Failure rate in 1/hour.
    pub fn failure_rate(self) -> f64 {
        1.0 / self.mttf_hours
    }

    /// Repair rate in 1/hour.
    pub fn repair_rate(self) -> f64 {
        1.0 / self.mttr_hours
    }

    pub fn availability(self) -> AvailabilityValue {
        availability_of(self)
    }
}

/// Steady-state availability, stored as its complement.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct AvailabilityValue {
    unavailability: f64,
}

impl AvailabilityValue {
    /// Wraps an unavailability in `[0, 1]`.
    pub fn from_unavailability(unavailability: f64) -> Result<Self, Error> {
        if !(0.0..=1.0).contains(&unavailability) {
            return Err(Error::InvalidParameter(format!(
                "unavailability must lie in [0, 1], got {unavailability}"
            )));
        }
        Ok(Self { unavailability })
    }

    /// Wraps an availability in `[0, 1]`.
    ///
    /// Entering through this side costs precision near 1.0; prefer
    /// [`from_unavailability`](Self::from_unavailability) when the
    /// complement is already known.
    pub fn from_availability(availability: f64) -> Result<Self, Error> {
        if !(0.0..=1.0).contains(&availability) {
            return Err(Error::InvalidParameter(format!(
                "availability must lie in [0, 1], got {availability}"
            )));
        }
        Ok(Self {
            unavailability: 1.0 - availability,
        })
    }

    /// Wraps the result of a float combination, absorbing rounding that
    /// lands a hair outside `[0, 1]`.
    pub(crate) fn saturating(unavailability: f64) -> Self {
        Self {
            unavailability: unavailability.clamp(0.0, 1.0),
        }
    }

    pub fn unavailability(self) -> f64 {
        self.unavailability
    }

    pub fn availability(self) -> f64 {
        1.0 - self.unavailability
    }

    /// Availability as a percentage.
    pub fn percent(self) -> f64 {
        100.0 * (1.0 - self.unavailability)
    }

    /// Number of nines, `-log10(unavailability)`; infinite when the value
    /// is exactly 1.0 available.
    pub fn nines(self) -> f64 {
        -self.unavailability.log10()
    }

    /// Expected downtime over a reporting period of the given length.
    pub fn downtime_hours(self, period_hours: f64) -> f64 {
        self.unavailability * period_hours
    }
}

/// Steady-state availability of a single repairable component,
/// `mttr / (mttf + mttr)` unavailable.
pub fn availability_of(pair: FailureRepairPair) -> AvailabilityValue {
    let u = pair.mttr_hours / (pair.mttf_hours + pair.mttr_hours);
    AvailabilityValue::saturating(u)
}

/// Folds per-unit unavailabilities into the unavailability of their series
/// arrangement: `U <- U + u - U*u`.
///
/// The recurrence stays in complement space the whole way, so a series of
/// components each around 1e-4 unavailable keeps full relative precision
/// instead of collapsing into `1 - 0.9997...`.
pub fn complement_accumulate(unavailabilities: impl IntoIterator<Item = f64>) -> f64 {
    let mut acc = 0.0_f64;
    for u in unavailabilities {
        acc = acc + u - acc * u;
    }
    acc
}

/// Identifier for a component slot in a server model.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ComponentId(String);

impl ComponentId {
    /// Builds an identifier from a non-blank name.
    pub fn new(name: impl Into<String>) -> Result<Self, Error> {
        let name = name.into();
        if name.trim().is_empty() {
            return Err(Error::InvalidParameter(
                "component id must not be blank".into(),
            ));
        }
        Ok(Self(name))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for ComponentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}
