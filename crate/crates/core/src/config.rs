//! Experiment descriptions in TOML with explicit units on every quantity.
//!
//! ```toml
//! [atom]
//! species = "Li"
//!
//! [mirror]
//! kind = "evanescent"
//! barrier_height = "1 ueV"
//! decay_length = "0.1 um"
//! detuning = "1000 linewidths"
//!
//! [layout.wire]
//! linear_density = "0.33 pC_per_cm"
//!
//! [analysis.report]
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::ChargeElement;
use crate::geometry::{self, Layout, PlaneSpec};
use crate::potential::{MirrorKind, MirrorSpec, PotentialStack};
use crate::species::{AtomSpecies, ConstantsRegistry, SpeciesEntry};
use crate::trap::SearchBox;
use crate::units::{Dimension, Quantity};
use crate::Vec3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub atom: AtomConfig,
    pub mirror: MirrorConfig,
    pub layout: LayoutConfig,
    #[serde(default, skip_serializing_if = "Extras::is_default")]
    pub extras: Extras,
    pub analysis: Analysis,
}

/// Either a registry species or a full custom entry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtomConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub species: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub custom: Option<CustomAtom>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CustomAtom {
    pub name: String,
    pub mass: Quantity,
    pub polarizability_volume: Quantity,
    pub transition_wavelength: Quantity,
    pub linewidth: Quantity,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MirrorConfig {
    pub kind: MirrorKind,
    pub barrier_height: Quantity,
    /// 1/κ; give this or `decay_constant`
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub decay_length: Option<Quantity>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub decay_constant: Option<Quantity>,
    /// Evanescent mirrors only, e.g. `"1000 linewidths"`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detuning: Option<Quantity>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum LayoutConfig {
    /// Infinite line along `a` through the origin, or a centred segment
    /// when `length` is given.
    Wire {
        linear_density: Quantity,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        length: Option<Quantity>,
    },
    /// Point charge at the origin.
    Dot { charge: Quantity },
    YSplitter {
        linear_density: Quantity,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        stem: Option<Quantity>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        half_angle: Option<Quantity>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        arms: Option<Quantity>,
    },
    DotArray {
        charge: Quantity,
        pitch: Quantity,
        count_t: usize,
        count_a: usize,
    },
    Elements(Vec<ElementConfig>),
}

pub const DEFAULT_Y_STEM: &str = "100 um";
pub const DEFAULT_Y_HALF_ANGLE: &str = "10 deg";
pub const DEFAULT_Y_ARMS: &str = "100 um";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ElementConfig {
    Line {
        foot_point: [Quantity; 3],
        direction: [f64; 3],
        linear_density: Quantity,
    },
    Segment {
        end_a: [Quantity; 3],
        end_b: [Quantity; 3],
        linear_density: Quantity,
    },
    Point { position: [Quantity; 3], charge: Quantity },
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Extras {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vdw_c3: Option<Quantity>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub gravity: bool,
}

impl Extras {
    fn is_default(&self) -> bool {
        *self == Self::default()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Analysis {
    Report(ReportOptions),
    Spectrum(SpectrumOptions),
    Contour(ContourOptions),
    Tables(TablesOptions),
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReportOptions {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub search_box: Option<BoxConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoxConfig {
    pub n: [Quantity; 2],
    pub t: [Quantity; 2],
    pub a: [Quantity; 2],
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumOptions {
    pub n_states: usize,
    /// Angular quantum number for dots.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub angular_m: Option<i32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridConfig>,
    /// Boundary-to-peak amplitude limit; 0 disables the check.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub leak_tolerance: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub write_states: Option<bool>,
    /// Also solve a 1D oscillator and compare with (n + ½)ħω.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub harmonic_self_test: Option<bool>,
}

/// Grid overrides. Unset fields are derived from the harmonic ground-state
/// sizes at the minimum.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_range: Option<[Quantity; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_points: Option<usize>,
    /// Half width in `t` for wires, largest ρ for dots.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub second_extent: Option<Quantity>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub second_points: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_points: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContourOptions {
    pub origin: [Quantity; 3],
    pub axis_u: [f64; 3],
    pub axis_v: [f64; 3],
    pub extent: [Quantity; 2],
    pub resolution: [usize; 2],
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TablesOptions {
    /// Apply the per-table charge calibration; on by default.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub calibrate: Option<bool>,
}

/// Converts a TOML error into a config error with line and column.
pub(crate) fn toml_error(text: &str, err: &toml::de::Error) -> Error {
    match err.span() {
        Some(span) => {
            let before = &text[..span.start.min(text.len())];
            let line = before.matches('\n').count() + 1;
            let column = before.len() - before.rfind('\n').map_or(0, |i| i + 1) + 1;
            Error::Config(format!("line {line}, column {column}: {}", err.message().trim()))
        }
        None => Error::Config(err.message().trim().to_string()),
    }
}

fn vec3(q: &[Quantity; 3]) -> Result<Vec3> {
    Ok(Vec3::new(q[0].si(Dimension::Length)?, q[1].si(Dimension::Length)?, q[2].si(Dimension::Length)?))
}

fn parse_default(s: &str) -> Quantity {
    s.parse().expect("default quantity is valid")
}

/// A config with all quantities converted to SI and the physics assembled.
#[derive(Debug, Clone, PartialEq)]
pub struct Resolved {
    pub atom: AtomSpecies,
    pub stack: PotentialStack,
    pub layout: Layout,
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| toml_error(text, &e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| match e {
            Error::Config(m) => Error::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn resolve_atom(&self, registry: &ConstantsRegistry) -> Result<AtomSpecies> {
        match (&self.atom.species, &self.atom.custom) {
            (Some(name), None) => registry.species(name),
            (None, Some(c)) => SpeciesEntry {
                mass: c.mass.clone(),
                polarizability_volume: c.polarizability_volume.clone(),
                transition_wavelength: c.transition_wavelength.clone(),
                linewidth: c.linewidth.clone(),
            }
            .resolve(&c.name),
            _ => Err(Error::Config("[atom] needs exactly one of `species` or `custom`".into())),
        }
    }

    pub fn resolve_mirror(&self) -> Result<MirrorSpec> {
        self.mirror.resolve()
    }

    pub fn resolve_layout(&self) -> Result<Layout> {
        let layout = match &self.layout {
            LayoutConfig::Wire { linear_density, length } => {
                let lambda = linear_density.si(Dimension::LinearChargeDensity)?;
                match length {
                    Some(l) => geometry::build_straight_wire(l.si(Dimension::Length)?, lambda)?,
                    None => Layout::new(vec![ChargeElement::infinite_line(
                        Vec3::zeros(),
                        Vec3::new(0.0, 0.0, 1.0),
                        lambda,
                    )?]),
                }
            }
            LayoutConfig::Dot { charge } => {
                Layout::new(vec![ChargeElement::point(Vec3::zeros(), charge.si(Dimension::Charge)?)?])
            }
            LayoutConfig::YSplitter { linear_density, stem, half_angle, arms } => {
                let or = |q: &Option<Quantity>, d: &str| q.clone().unwrap_or_else(|| parse_default(d));
                geometry::build_y_splitter(
                    or(stem, DEFAULT_Y_STEM).si(Dimension::Length)?,
                    or(half_angle, DEFAULT_Y_HALF_ANGLE).si(Dimension::Angle)?,
                    or(arms, DEFAULT_Y_ARMS).si(Dimension::Length)?,
                    linear_density.si(Dimension::LinearChargeDensity)?,
                )?
            }
            LayoutConfig::DotArray { charge, pitch, count_t, count_a } => geometry::build_dot_array(
                pitch.si(Dimension::Length)?,
                *count_t,
                *count_a,
                charge.si(Dimension::Charge)?,
            )?,
            LayoutConfig::Elements(list) => {
                let elements = list
                    .iter()
                    .map(|e| match e {
                        ElementConfig::Line { foot_point, direction, linear_density } => ChargeElement::infinite_line(
                            vec3(foot_point)?,
                            Vec3::from(*direction),
                            linear_density.si(Dimension::LinearChargeDensity)?,
                        ),
                        ElementConfig::Segment { end_a, end_b, linear_density } => ChargeElement::segment(
                            vec3(end_a)?,
                            vec3(end_b)?,
                            linear_density.si(Dimension::LinearChargeDensity)?,
                        ),
                        ElementConfig::Point { position, charge } => {
                            ChargeElement::point(vec3(position)?, charge.si(Dimension::Charge)?)
                        }
                    })
                    .collect::<Result<Vec<_>>>()?;
                Layout::new(elements)
            }
        };
        layout.validate().map_err(|e| Error::Config(e.to_string()))?;
        Ok(layout)
    }

    pub fn resolve(&self, registry: &ConstantsRegistry) -> Result<Resolved> {
        let atom = self.resolve_atom(registry)?;
        let mirror = self.resolve_mirror()?;
        let layout = self.resolve_layout()?;
        let mut stack = PotentialStack::new(mirror, layout.elements.clone())
            .map_err(|e| Error::Config(e.to_string()))?
            .with_gravity(self.extras.gravity);
        if let Some(c3) = &self.extras.vdw_c3 {
            stack = stack.with_vdw(c3.si(Dimension::EnergyVolume)?).map_err(|e| Error::Config(e.to_string()))?;
        }
        Ok(Resolved { atom, stack, layout })
    }
}

impl MirrorConfig {
    pub fn resolve(&self) -> Result<MirrorSpec> {
        let m = self;
        let kappa = match (&m.decay_length, &m.decay_constant) {
            (Some(l), None) => 1.0 / l.si(Dimension::Length)?,
            (None, Some(k)) => k.si(Dimension::InverseLength)?,
            _ => return Err(Error::Config("[mirror] needs exactly one of `decay_length` or `decay_constant`".into())),
        };
        let u0 = m.barrier_height.si(Dimension::Energy)?;
        let spec = match m.kind {
            MirrorKind::Evanescent => {
                let d = m
                    .detuning
                    .as_ref()
                    .ok_or_else(|| Error::Config("evanescent mirror needs `detuning`".into()))?;
                MirrorSpec::evanescent(u0, kappa, d.si(Dimension::Dimensionless)?)
            }
            MirrorKind::Magnetic => {
                if m.detuning.is_some() {
                    return Err(Error::Config("magnetic mirror takes no `detuning`".into()));
                }
                MirrorSpec::magnetic(u0, kappa)
            }
        };
        spec.map_err(|e| Error::Config(e.to_string()))
    }
}

impl BoxConfig {
    pub fn resolve(&self) -> Result<SearchBox> {
        let pair = |p: &[Quantity; 2]| -> Result<(f64, f64)> { Ok((p[0].si(Dimension::Length)?, p[1].si(Dimension::Length)?)) };
        let (n, t, a) = (pair(&self.n)?, pair(&self.t)?, pair(&self.a)?);
        SearchBox::new(Vec3::new(n.0, t.0, a.0), Vec3::new(n.1, t.1, a.1)).map_err(|e| Error::Config(e.to_string()))
    }
}

impl ContourOptions {
    pub fn resolve(&self) -> Result<PlaneSpec> {
        PlaneSpec::new(
            vec3(&self.origin)?,
            Vec3::from(self.axis_u),
            Vec3::from(self.axis_v),
            (self.extent[0].si(Dimension::Length)?, self.extent[1].si(Dimension::Length)?),
            (self.resolution[0], self.resolution[1]),
        )
        .map_err(|e| Error::Config(e.to_string()))
    }
}
