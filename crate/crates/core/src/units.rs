//! Physical constants and unit handling.
//!
//! Everything inside the crate is SI. Quantities read from configuration
//! files carry an explicit unit suffix and are converted on access.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub const EPSILON_0: f64 = 8.8541878128e-12;
pub const HBAR: f64 = 1.054571817e-34;
pub const ELEMENTARY_CHARGE: f64 = 1.602176634e-19;
pub const ATOMIC_MASS_UNIT: f64 = 1.66053906660e-27;
pub const STANDARD_GRAVITY: f64 = 9.80665;

pub const EV: f64 = ELEMENTARY_CHARGE;
pub const NEV: f64 = 1e-9 * EV;
pub const UEV: f64 = 1e-6 * EV;
pub const UM: f64 = 1e-6;
pub const NM: f64 = 1e-9;
pub const PICOCOULOMB: f64 = 1e-12;
pub const KHZ: f64 = 1e3;

/// Physical dimension expected from a configured quantity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dimension {
    Energy,
    Length,
    InverseLength,
    Charge,
    LinearChargeDensity,
    Mass,
    Volume,
    /// Angular rate in rad/s. Frequency units (Hz, MHz) are multiplied by 2π.
    AngularRate,
    Angle,
    NumberDensity,
    Area,
    /// Van der Waals C3 coefficient, J·m³.
    EnergyVolume,
    Dimensionless,
}

impl Dimension {
    fn factor(self, unit: &str) -> Option<f64> {
        use std::f64::consts::PI;
        use Dimension::*;
        let f = match (self, unit) {
            (Energy, "J") => 1.0,
            (Energy, "eV") => EV,
            (Energy, "meV") => 1e-3 * EV,
            (Energy, "ueV") => UEV,
            (Energy, "neV") => NEV,
            (Energy, "peV") => 1e-12 * EV,

            (Length, "m") => 1.0,
            (Length, "cm") => 1e-2,
            (Length, "mm") => 1e-3,
            (Length, "um") => UM,
            (Length, "nm") => NM,

            (InverseLength, "per_m") => 1.0,
            (InverseLength, "per_mm") => 1e3,
            (InverseLength, "per_um") => 1e6,
            (InverseLength, "per_nm") => 1e9,

            (Charge, "C") => 1.0,
            (Charge, "pC") => PICOCOULOMB,
            (Charge, "e") => ELEMENTARY_CHARGE,

            (LinearChargeDensity, "C_per_m") => 1.0,
            (LinearChargeDensity, "pC_per_m") => PICOCOULOMB,
            (LinearChargeDensity, "pC_per_cm") => PICOCOULOMB / 1e-2,
            (LinearChargeDensity, "pC_per_mm") => PICOCOULOMB / 1e-3,
            (LinearChargeDensity, "pC_per_um") => PICOCOULOMB / UM,
            (LinearChargeDensity, "e_per_um") => ELEMENTARY_CHARGE / UM,

            (Mass, "kg") => 1.0,
            (Mass, "u") => ATOMIC_MASS_UNIT,

            (Volume, "m3") => 1.0,
            (Volume, "cm3") => 1e-6,
            (Volume, "A3") => 1e-30,

            (AngularRate, "rad_per_s") => 1.0,
            (AngularRate, "Hz") => 2.0 * PI,
            (AngularRate, "kHz") => 2.0 * PI * 1e3,
            (AngularRate, "MHz") => 2.0 * PI * 1e6,

            (Angle, "rad") => 1.0,
            (Angle, "deg") => PI / 180.0,

            (NumberDensity, "per_m3") => 1.0,
            (NumberDensity, "per_cm3") => 1e6,

            (Area, "m2") => 1.0,
            (Area, "um2") => UM * UM,
            (Area, "mm2") => 1e-6,

            (EnergyVolume, "J_m3") => 1.0,
            (EnergyVolume, "neV_um3") => NEV * UM * UM * UM,
            (EnergyVolume, "eV_nm3") => EV * NM * NM * NM,

            (Dimensionless, "" | "1" | "linewidths") => 1.0,
            _ => return None,
        };
        Some(f)
    }
}

/// A number with a unit suffix, written as `"<value> <unit>"` in config files.
///
/// The textual unit is preserved so that a parsed config serializes back to
/// the same text.
#[derive(Debug, Clone, PartialEq)]
pub struct Quantity {
    pub value: f64,
    pub unit: String,
}

impl Quantity {
    pub fn new(value: f64, unit: impl Into<String>) -> Self {
        Self { value, unit: unit.into() }
    }

    /// Converts to SI for the given dimension.
    pub fn si(&self, dim: Dimension) -> Result<f64> {
        let factor = dim.factor(&self.unit).ok_or_else(|| {
            Error::Config(format!("unit `{}` is not valid for a {dim:?} quantity", self.unit))
        })?;
        if !self.value.is_finite() {
            return Err(Error::Config(format!("non-finite value in `{self}`")));
        }
        Ok(self.value * factor)
    }
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.unit.is_empty() {
            write!(f, "{}", self.value)
        } else {
            write!(f, "{} {}", self.value, self.unit)
        }
    }
}

impl FromStr for Quantity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut parts = s.split_whitespace();
        let value = parts
            .next()
            .ok_or_else(|| Error::Config("empty quantity".into()))?;
        let value: f64 = value
            .parse()
            .map_err(|_| Error::Config(format!("cannot parse number in `{s}`")))?;
        let unit = parts.next().unwrap_or("").to_string();
        if parts.next().is_some() {
            return Err(Error::Config(format!("trailing text in quantity `{s}`")));
        }
        Ok(Self { value, unit })
    }
}

impl Serialize for Quantity {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Quantity {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_converts() {
        let q: Quantity = "1.5 ueV".parse().unwrap();
        assert_eq!(q.si(Dimension::Energy).unwrap(), 1.5 * UEV);
        let q: Quantity = "0.33 pC_per_cm".parse().unwrap();
        assert!((q.si(Dimension::LinearChargeDensity).unwrap() - 33e-12).abs() < 1e-24);
    }

    #[test]
    fn rejects_wrong_dimension() {
        let q: Quantity = "1 um".parse().unwrap();
        assert!(matches!(q.si(Dimension::Energy), Err(Error::Config(_))));
        assert!("1 um extra".parse::<Quantity>().is_err());
        assert!("abc um".parse::<Quantity>().is_err());
    }

    #[test]
    fn display_round_trips() {
        for s in ["0.1 um", "1e-30 m3", "141 e", "1000"] {
            let q: Quantity = s.parse().unwrap();
            assert_eq!(q.to_string().parse::<Quantity>().unwrap(), q);
        }
    }
}
