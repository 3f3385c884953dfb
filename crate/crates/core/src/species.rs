//! Atomic species and the constants registry.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::units::{Dimension, Quantity};

/// Environment variable naming a TOML file whose `[species.*]` entries
/// override or extend the built-in registry.
pub const CONSTANTS_ENV: &str = "SURFTRAP_CONSTANTS";

const BUILTIN_CONSTANTS: &str = include_str!("../data/constants.toml");

/// An atom as seen by the trap: inertia, induced-dipole response and the
/// optical transition used for Lamb-Dicke and scattering estimates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AtomSpecies {
    pub name: String,
    /// kg
    pub mass: f64,
    /// m³
    pub polarizability_volume: f64,
    /// m
    pub transition_wavelength: f64,
    /// Γ in rad/s
    pub natural_linewidth: f64,
}

impl AtomSpecies {
    pub fn new(
        name: impl Into<String>,
        mass: f64,
        polarizability_volume: f64,
        transition_wavelength: f64,
        natural_linewidth: f64,
    ) -> Result<Self> {
        let atom = Self {
            name: name.into(),
            mass,
            polarizability_volume,
            transition_wavelength,
            natural_linewidth,
        };
        atom.validate()?;
        Ok(atom)
    }

    pub fn validate(&self) -> Result<()> {
        for (label, v) in [
            ("mass", self.mass),
            ("polarizability_volume", self.polarizability_volume),
            ("transition_wavelength", self.transition_wavelength),
            ("natural_linewidth", self.natural_linewidth),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "{} must be positive, got {v}",
                    label
                )));
            }
        }
        Ok(())
    }

    /// Optical wavenumber 2π/λ of the transition.
    pub fn wavenumber(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.transition_wavelength
    }

    pub fn lithium() -> Self {
        ConstantsRegistry::builtin().species("Li").expect("built-in Li")
    }

    pub fn rubidium() -> Self {
        ConstantsRegistry::builtin().species("Rb").expect("built-in Rb")
    }
}

/// One species entry as written in a constants file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpeciesEntry {
    pub mass: Quantity,
    pub polarizability_volume: Quantity,
    pub transition_wavelength: Quantity,
    pub linewidth: Quantity,
}

impl SpeciesEntry {
    pub fn resolve(&self, name: &str) -> Result<AtomSpecies> {
        AtomSpecies::new(
            name,
            self.mass.si(Dimension::Mass)?,
            self.polarizability_volume.si(Dimension::Volume)?,
            self.transition_wavelength.si(Dimension::Length)?,
            self.linewidth.si(Dimension::AngularRate)?,
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstantsRegistry {
    pub species: BTreeMap<String, SpeciesEntry>,
}

impl ConstantsRegistry {
    pub fn builtin() -> Self {
        toml::from_str(BUILTIN_CONSTANTS).expect("embedded constants file is valid")
    }

    /// Built-in registry merged with the file named by [`CONSTANTS_ENV`], if set.
    pub fn from_env() -> Result<Self> {
        let mut registry = Self::builtin();
        if let Some(path) = std::env::var_os(CONSTANTS_ENV) {
            registry.merge(Self::load(Path::new(&path))?);
        }
        Ok(registry)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| match crate::config::toml_error(&text, &e) {
            Error::Config(m) => Error::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn merge(&mut self, other: Self) {
        self.species.extend(other.species);
    }

    pub fn species(&self, name: &str) -> Result<AtomSpecies> {
        self.species
            .get(name)
            .ok_or_else(|| Error::Config(format!("unknown species `{name}`")))?
            .resolve(name)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("registry serializes")
    }
}
