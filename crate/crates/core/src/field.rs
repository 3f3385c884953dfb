//! Electrostatic fields of line, segment and point charges.
//!
//! Positions use the surface frame `[n, t, a]`: `n` is the height above the
//! mirror plane, `t` the in-surface transverse coordinate and `a` the
//! in-surface axial coordinate.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::units::EPSILON_0;
use crate::Vec3;

/// Closer than this to a charge element, the field is treated as singular.
pub const SINGULAR_RADIUS: f64 = 1e-15;

const UNIT_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ChargeElement {
    /// Infinite straight line through `foot_point` along the unit vector `direction`.
    InfiniteLine {
        foot_point: Vec3,
        direction: Vec3,
        /// C/m
        linear_density: f64,
    },
    /// Uniformly charged straight segment.
    FiniteSegment {
        end_a: Vec3,
        end_b: Vec3,
        /// C/m
        linear_density: f64,
    },
    PointCharge {
        position: Vec3,
        /// C
        charge: f64,
    },
}

impl ChargeElement {
    pub fn infinite_line(foot_point: Vec3, direction: Vec3, linear_density: f64) -> Result<Self> {
        let norm = direction.norm();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::InvalidParameter("line direction must be non-zero".into()));
        }
        let el = Self::InfiniteLine {
            foot_point,
            direction: direction / norm,
            linear_density,
        };
        el.validate()?;
        Ok(el)
    }

    pub fn segment(end_a: Vec3, end_b: Vec3, linear_density: f64) -> Result<Self> {
        let el = Self::FiniteSegment { end_a, end_b, linear_density };
        el.validate()?;
        Ok(el)
    }

    pub fn point(position: Vec3, charge: f64) -> Result<Self> {
        let el = Self::PointCharge { position, charge };
        el.validate()?;
        Ok(el)
    }

    pub fn validate(&self) -> Result<()> {
        let finite = |v: &Vec3| v.iter().all(|c| c.is_finite());
        match self {
            Self::InfiniteLine { foot_point, direction, linear_density } => {
                if !finite(foot_point) || !finite(direction) || !linear_density.is_finite() {
                    return Err(Error::InvalidParameter("non-finite line parameters".into()));
                }
                if (direction.norm() - 1.0).abs() > UNIT_TOLERANCE {
                    return Err(Error::InvalidParameter("line direction must be a unit vector".into()));
                }
            }
            Self::FiniteSegment { end_a, end_b, linear_density } => {
                if !finite(end_a) || !finite(end_b) || !linear_density.is_finite() {
                    return Err(Error::InvalidParameter("non-finite segment parameters".into()));
                }
                if (end_b - end_a).norm() <= 0.0 {
                    return Err(Error::InvalidParameter("segment has zero length".into()));
                }
            }
            Self::PointCharge { position, charge } => {
                if !finite(position) || !charge.is_finite() {
                    return Err(Error::InvalidParameter("non-finite point charge".into()));
                }
            }
        }
        Ok(())
    }

    /// Largest surface-normal coordinate touched by the element.
    pub fn max_height(&self) -> f64 {
        match self {
            Self::InfiniteLine { foot_point, direction, .. } => {
                if direction[0] != 0.0 {
                    f64::INFINITY
                } else {
                    foot_point[0]
                }
            }
            Self::FiniteSegment { end_a, end_b, .. } => end_a[0].max(end_b[0]),
            Self::PointCharge { position, .. } => position[0],
        }
    }

    /// Total charge; infinite lines report `None`.
    pub fn total_charge(&self) -> Option<f64> {
        match self {
            Self::InfiniteLine { .. } => None,
            Self::FiniteSegment { end_a, end_b, linear_density } => {
                Some(linear_density * (end_b - end_a).norm())
            }
            Self::PointCharge { charge, .. } => Some(*charge),
        }
    }

    /// Field of this element alone at `r`, V/m.
    pub fn field_at(&self, r: &Vec3) -> Result<Vec3> {
        match self {
            Self::InfiniteLine { foot_point, direction, linear_density } => {
                let d = r - foot_point;
                let perp = d - direction * d.dot(direction);
                let rho2 = perp.norm_squared();
                if rho2 <= SINGULAR_RADIUS * SINGULAR_RADIUS {
                    return Err(singular(r));
                }
                Ok(perp * (linear_density / (2.0 * PI * EPSILON_0 * rho2)))
            }
            Self::FiniteSegment { end_a, end_b, linear_density } => {
                segment_field(end_a, end_b, *linear_density, r)
            }
            Self::PointCharge { position, charge } => {
                let d = r - position;
                let r2 = d.norm_squared();
                if r2 <= SINGULAR_RADIUS * SINGULAR_RADIUS {
                    return Err(singular(r));
                }
                Ok(d * (charge / (4.0 * PI * EPSILON_0 * r2 * r2.sqrt())))
            }
        }
    }
}

fn singular(r: &Vec3) -> Error {
    Error::Singularity(format!("[{:.6e}, {:.6e}, {:.6e}] m", r[0], r[1], r[2]))
}

/// Closed-form field of a uniformly charged segment.
///
/// With `w1`, `w2` the axial offsets of the ends measured from the foot of
/// the perpendicular through `r`, the perpendicular part is
/// `(w2/r2 - w1/r1)/ρ` and the axial part `1/r2 - 1/r1`. Both are rewritten
/// to avoid cancellation when the ends lie on the same side of the foot.
fn segment_field(a: &Vec3, b: &Vec3, density: f64, r: &Vec3) -> Result<Vec3> {
    let axis = b - a;
    let length = axis.norm();
    let u = axis / length;
    let d = r - a;
    let z = d.dot(&u);
    let perp = d - u * z;
    let rho2 = perp.norm_squared();
    let w1 = -z;
    let w2 = length - z;
    let r1 = d.norm();
    let r2 = (r - b).norm();
    if r1 <= SINGULAR_RADIUS || r2 <= SINGULAR_RADIUS {
        return Err(singular(r));
    }

    let same_side = w1 * w2 > 0.0;
    let perp_factor = if same_side {
        length * (w1 + w2) / (w2 * r1 + w1 * r2)
    } else {
        if rho2 <= SINGULAR_RADIUS * SINGULAR_RADIUS {
            return Err(singular(r));
        }
        (w2 * r1 - w1 * r2) / rho2
    };
    // r1 - r2 = (r1² - r2²)/(r1 + r2) and r1² - r2² = -L (w1 + w2)
    let axial = -length * (w1 + w2) / (r1 + r2);

    let k = density / (4.0 * PI * EPSILON_0 * r1 * r2);
    Ok((perp * perp_factor + u * axial) * k)
}

/// Superposed field of all `charges` at `r`, V/m.
pub fn electric_field(charges: &[ChargeElement], r: &Vec3) -> Result<Vec3> {
    charges
        .iter()
        .try_fold(Vec3::zeros(), |acc, el| Ok(acc + el.field_at(r)?))
}
