//! Mirror, induced-dipole and surface potentials and their superposition.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{electric_field, ChargeElement};
use crate::species::AtomSpecies;
use crate::units::{EPSILON_0, STANDARD_GRAVITY};
use crate::Vec3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MirrorKind {
    Evanescent,
    Magnetic,
}

/// Exponential atom mirror `U0 exp(-κ n)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MirrorSpec {
    pub kind: MirrorKind,
    /// U0, J
    pub barrier_height: f64,
    /// κ, 1/m
    pub decay_constant: f64,
    /// Δ/Γ, evanescent mirrors only
    pub detuning_in_linewidths: Option<f64>,
}

impl MirrorSpec {
    pub fn evanescent(barrier_height: f64, decay_constant: f64, detuning_in_linewidths: f64) -> Result<Self> {
        let m = Self {
            kind: MirrorKind::Evanescent,
            barrier_height,
            decay_constant,
            detuning_in_linewidths: Some(detuning_in_linewidths),
        };
        m.validate()?;
        Ok(m)
    }

    pub fn magnetic(barrier_height: f64, decay_constant: f64) -> Result<Self> {
        let m = Self {
            kind: MirrorKind::Magnetic,
            barrier_height,
            decay_constant,
            detuning_in_linewidths: None,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.barrier_height.is_finite() && self.barrier_height > 0.0) {
            return Err(Error::InvalidParameter("mirror barrier height must be positive".into()));
        }
        if !(self.decay_constant.is_finite() && self.decay_constant > 0.0) {
            return Err(Error::InvalidParameter("mirror decay constant must be positive".into()));
        }
        match (self.kind, self.detuning_in_linewidths) {
            (MirrorKind::Evanescent, Some(d)) if d.is_finite() && d > 0.0 => Ok(()),
            (MirrorKind::Evanescent, _) => Err(Error::InvalidParameter(
                "evanescent mirror needs a positive detuning".into(),
            )),
            (MirrorKind::Magnetic, None) => Ok(()),
            (MirrorKind::Magnetic, Some(_)) => Err(Error::InvalidParameter(
                "magnetic mirror takes no detuning".into(),
            )),
        }
    }

    pub fn decay_length(&self) -> f64 {
        1.0 / self.decay_constant
    }
}

/// Mirror repulsion at height `n` above the surface.
pub fn mirror_potential(mirror: &MirrorSpec, n: f64) -> Result<f64> {
    if !(n >= 0.0) {
        return Err(Error::Domain(format!("height {n} m is below the mirror surface")));
    }
    Ok(mirror.barrier_height * (-mirror.decay_constant * n).exp())
}

/// Induced-dipole energy `-2π ε0 α |E|²` for a polarizability volume α.
pub fn polarization_energy(atom: &AtomSpecies, field: &Vec3) -> Result<f64> {
    if !field.iter().all(|c| c.is_finite()) {
        return Err(Error::InvalidParameter("non-finite electric field".into()));
    }
    Ok(-2.0 * PI * EPSILON_0 * atom.polarizability_volume * field.norm_squared())
}

/// Wire attraction in the printed closed form `-(1/2πε0) α q² / (2ρ²)`.
///
/// This is half of what the composed route
/// (`polarization_energy` of the infinite-line field) gives;
/// [`WIRE_COMPOSED_TO_CLOSED_FORM`] is the ratio.
pub fn wire_potential_closed_form(atom: &AtomSpecies, linear_density: f64, rho: f64) -> Result<f64> {
    if !(rho > 0.0) {
        return Err(Error::Domain(format!("wire distance must be positive, got {rho}")));
    }
    Ok(-atom.polarizability_volume * linear_density * linear_density / (4.0 * PI * EPSILON_0 * rho * rho))
}

/// Composed-route wire energy divided by [`wire_potential_closed_form`].
pub const WIRE_COMPOSED_TO_CLOSED_FORM: f64 = 2.0;

/// Point-charge attraction `-(1/8πε0) α Q² / r⁴`.
pub fn dot_potential_closed_form(atom: &AtomSpecies, charge: f64, r: f64) -> Result<f64> {
    if !(r > 0.0) {
        return Err(Error::Domain(format!("distance must be positive, got {r}")));
    }
    let r2 = r * r;
    Ok(-atom.polarizability_volume * charge * charge / (8.0 * PI * EPSILON_0 * r2 * r2))
}

/// Nonretarded surface attraction `-C3/n³`.
pub fn vdw_potential(c3: f64, n: f64) -> Result<f64> {
    if !(n > 0.0) {
        return Err(Error::Domain(format!("height must be positive, got {n}")));
    }
    Ok(-c3 / (n * n * n))
}

/// Mirror plus electrodes plus optional surface terms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PotentialStack {
    pub mirror: MirrorSpec,
    pub charges: Vec<ChargeElement>,
    /// C3 in J·m³
    pub vdw_coefficient: Option<f64>,
    /// Adds m g n when set.
    pub gravity: bool,
}

impl PotentialStack {
    pub fn new(mirror: MirrorSpec, charges: Vec<ChargeElement>) -> Result<Self> {
        let stack = Self {
            mirror,
            charges,
            vdw_coefficient: None,
            gravity: false,
        };
        stack.validate()?;
        Ok(stack)
    }

    pub fn with_vdw(mut self, c3: f64) -> Result<Self> {
        if !(c3.is_finite() && c3 >= 0.0) {
            return Err(Error::InvalidParameter("C3 must be non-negative".into()));
        }
        self.vdw_coefficient = Some(c3);
        Ok(self)
    }

    pub fn with_gravity(mut self, on: bool) -> Self {
        self.gravity = on;
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.mirror.validate()?;
        for el in &self.charges {
            el.validate()?;
            if el.max_height() > 0.0 {
                return Err(Error::InvalidParameter(
                    "charge elements must lie on or below the surface plane".into(),
                ));
            }
        }
        Ok(())
    }

    /// Same geometry with every charge multiplied by `scale`.
    pub fn scaled_charges(&self, scale: f64) -> Self {
        let mut out = self.clone();
        for el in &mut out.charges {
            match el {
                ChargeElement::InfiniteLine { linear_density, .. }
                | ChargeElement::FiniteSegment { linear_density, .. } => *linear_density *= scale,
                ChargeElement::PointCharge { charge, .. } => *charge *= scale,
            }
        }
        out
    }

    pub fn total_potential(&self, atom: &AtomSpecies, r: &Vec3) -> Result<f64> {
        total_potential(self, atom, r)
    }
}

/// Total potential energy at `r` (strictly above the surface).
pub fn total_potential(stack: &PotentialStack, atom: &AtomSpecies, r: &Vec3) -> Result<f64> {
    let n = r[0];
    if !(n > 0.0) {
        return Err(Error::Domain(format!("height {n} m is not above the surface")));
    }
    let mut u = mirror_potential(&stack.mirror, n)?;
    if !stack.charges.is_empty() {
        u += polarization_energy(atom, &electric_field(&stack.charges, r)?)?;
    }
    if let Some(c3) = stack.vdw_coefficient {
        u += vdw_potential(c3, n)?;
    }
    if stack.gravity {
        u += atom.mass * STANDARD_GRAVITY * n;
    }
    Ok(u)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::{NEV, UEV, UM};
    use approx::assert_relative_eq;

    fn ev_mirror() -> MirrorSpec {
        MirrorSpec::evanescent(1.0 * UEV, 10.0 / UM, 1000.0).unwrap()
    }

    #[test]
    fn mirror_values() {
        let m = ev_mirror();
        assert_eq!(mirror_potential(&m, 0.0).unwrap(), 1.0 * UEV);
        assert_relative_eq!(mirror_potential(&m, 2f64.ln() / m.decay_constant).unwrap(), 0.5 * UEV, max_relative = 1e-14);
        let mag = MirrorSpec::magnetic(6.4 * UEV, 1.0 / (1.5 * UM)).unwrap();
        // 7.2 um * (1/1.5 um) = 4.8
        let expected = 6.4 * UEV * (-4.8f64).exp();
        assert_relative_eq!(mirror_potential(&mag, 7.2 * UM).unwrap(), expected, max_relative = 1e-13);
        assert!(matches!(mirror_potential(&m, -1e-9), Err(Error::Domain(_))));
    }

    #[test]
    fn mirror_validation() {
        assert!(MirrorSpec::evanescent(1.0, 1.0, 0.0).is_err());
        assert!(MirrorSpec::magnetic(-1.0, 1.0).is_err());
        let mut m = MirrorSpec::magnetic(1.0, 1.0).unwrap();
        m.detuning_in_linewidths = Some(3.0);
        assert!(m.validate().is_err());
    }

    #[test]
    fn polarization_energy_li() {
        let li = AtomSpecies::lithium();
        assert_eq!(polarization_energy(&li, &Vec3::zeros()).unwrap(), 0.0);
        // -2 pi * 8.8541878128e-12 * 24.3e-30 * 1e12, computed by hand:
        // 2 pi eps0 = 5.5632651e-11; * 24.3e-30 = 1.35187e-39; * 1e12 = 1.35187e-27 J
        let e = polarization_energy(&li, &Vec3::new(1e6, 0.0, 0.0)).unwrap();
        assert_relative_eq!(e, -1.351873e-27, max_relative = 1e-6);
        let e2 = polarization_energy(&li, &Vec3::new(2e6, 0.0, 0.0)).unwrap();
        assert_relative_eq!(e2, 4.0 * e, max_relative = 1e-15);
        assert!(polarization_energy(&li, &Vec3::new(f64::NAN, 0.0, 0.0)).is_err());
    }

    #[test]
    fn closed_forms() {
        let li = AtomSpecies::lithium();
        let u1 = wire_potential_closed_form(&li, 1e-12, 1e-6).unwrap();
        let u2 = wire_potential_closed_form(&li, 1e-12, 2e-6).unwrap();
        assert!(u1 < 0.0);
        assert_relative_eq!(u2, u1 / 4.0, max_relative = 1e-15);
        assert!(wire_potential_closed_form(&li, 1e-12, 0.0).is_err());

        let d1 = dot_potential_closed_form(&li, 1e-17, 1e-6).unwrap();
        assert_relative_eq!(dot_potential_closed_form(&li, 1e-17, 2e-6).unwrap(), d1 / 16.0, max_relative = 1e-15);
        assert_relative_eq!(dot_potential_closed_form(&li, 2e-17, 1e-6).unwrap(), 4.0 * d1, max_relative = 1e-15);
        assert!(dot_potential_closed_form(&li, 1e-17, -1.0).is_err());
    }

    #[test]
    fn vdw() {
        assert_eq!(vdw_potential(0.0, 1e-7).unwrap(), 0.0);
        let u = vdw_potential(1e-49, 1e-7).unwrap();
        assert_relative_eq!(vdw_potential(1e-49, 2e-7).unwrap(), u / 8.0, max_relative = 1e-15);
        assert!(vdw_potential(1e-49, 0.0).is_err());
    }

    #[test]
    fn empty_stack_is_mirror() {
        let li = AtomSpecies::lithium();
        let stack = PotentialStack::new(ev_mirror(), vec![]).unwrap();
        let r = Vec3::new(0.3 * UM, 1.0 * UM, -2.0 * UM);
        assert_eq!(stack.total_potential(&li, &r).unwrap(), mirror_potential(&stack.mirror, 0.3 * UM).unwrap());
        assert!(matches!(stack.total_potential(&li, &Vec3::zeros()), Err(Error::Domain(_))));
    }

    #[test]
    fn far_field_vanishes_from_below() {
        let li = AtomSpecies::lithium();
        let line = ChargeElement::infinite_line(Vec3::zeros(), Vec3::z(), 0.3e-12).unwrap();
        let stack = PotentialStack::new(ev_mirror(), vec![line]).unwrap();
        let u = stack.total_potential(&li, &Vec3::new(50.0 * UM, 50.0 * UM, 0.0)).unwrap();
        assert!(u < 0.0 && u.abs() < 1e-3 * NEV);
    }

    #[test]
    fn single_minimum_above_wire() {
        // Table-1-like: 0.33 pC/m-scale wire over the evanescent mirror
        let li = AtomSpecies::lithium();
        let line = ChargeElement::infinite_line(Vec3::zeros(), Vec3::z(), 0.31e-12).unwrap();
        let stack = PotentialStack::new(ev_mirror(), vec![line]).unwrap();
        let kappa = stack.mirror.decay_constant;
        let samples: Vec<f64> = (1..=10_000)
            .map(|i| {
                let n = 20.0 / kappa * i as f64 / 10_000.0;
                stack.total_potential(&li, &Vec3::new(n, 0.0, 0.0)).unwrap()
            })
            .collect();
        let minima = samples
            .windows(3)
            .filter(|w| w[1] < w[0] && w[1] < w[2])
            .count();
        assert_eq!(minima, 1);
    }

    #[test]
    fn charges_above_surface_rejected() {
        let p = ChargeElement::point(Vec3::new(1e-7, 0.0, 0.0), 1e-17).unwrap();
        assert!(PotentialStack::new(ev_mirror(), vec![p]).is_err());
    }
}
