//! Electrode layouts and sampling of the total potential on planes.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::ChargeElement;
use crate::potential::PotentialStack;
use crate::species::AtomSpecies;
use crate::units::NEV;
use crate::Vec3;

/// Distance within which chained segment ends count as connected.
pub const JUNCTION_TOLERANCE: f64 = 1e-9;

/// Charge elements on the surface plus named reference points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Layout {
    pub elements: Vec<ChargeElement>,
    pub anchors: BTreeMap<String, Vec3>,
}

impl Layout {
    pub fn new(elements: Vec<ChargeElement>) -> Self {
        Self { elements, anchors: BTreeMap::new() }
    }

    pub fn anchor(&self, name: &str) -> Option<Vec3> {
        self.anchors.get(name).copied()
    }

    /// Checks that every element lies on the surface and that every anchor
    /// is the endpoint of at least one segment when the layout has segments.
    pub fn validate(&self) -> Result<()> {
        for el in &self.elements {
            el.validate()?;
            if el.max_height().abs() > JUNCTION_TOLERANCE {
                return Err(Error::InvalidParameter("layout elements must lie on the surface plane".into()));
            }
        }
        let ends: Vec<Vec3> = self
            .elements
            .iter()
            .filter_map(|e| match e {
                ChargeElement::FiniteSegment { end_a, end_b, .. } => Some([*end_a, *end_b]),
                _ => None,
            })
            .flatten()
            .collect();
        if !ends.is_empty() {
            for (name, p) in &self.anchors {
                if !ends.iter().any(|e| (e - p).norm() <= JUNCTION_TOLERANCE) {
                    return Err(Error::InvalidParameter(format!("anchor `{name}` is not on a segment end")));
                }
            }
        }
        Ok(())
    }

    /// Sum of all element charges, `None` if an infinite line is present.
    pub fn total_charge(&self) -> Option<f64> {
        self.elements.iter().map(ChargeElement::total_charge).sum()
    }

    /// Splits every finite segment into two equal halves.
    pub fn refined(&self) -> Self {
        let elements = self
            .elements
            .iter()
            .flat_map(|e| match e {
                ChargeElement::FiniteSegment { end_a, end_b, linear_density } => {
                    let mid = (end_a + end_b) / 2.0;
                    vec![
                        ChargeElement::FiniteSegment { end_a: *end_a, end_b: mid, linear_density: *linear_density },
                        ChargeElement::FiniteSegment { end_a: mid, end_b: *end_b, linear_density: *linear_density },
                    ]
                }
                other => vec![other.clone()],
            })
            .collect();
        Self { elements, anchors: self.anchors.clone() }
    }
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} must be positive, got {v}")))
    }
}

/// A single segment of length `length` along `a`, centred on the origin.
pub fn build_straight_wire(length: f64, linear_density: f64) -> Result<Layout> {
    positive("wire length", length)?;
    let a = Vec3::new(0.0, 0.0, -0.5 * length);
    let b = Vec3::new(0.0, 0.0, 0.5 * length);
    let mut layout = Layout::new(vec![ChargeElement::segment(a, b, linear_density)?]);
    layout.anchors.insert("end_a".into(), a);
    layout.anchors.insert("end_b".into(), b);
    Ok(layout)
}

/// Y-shaped splitter: a stem along `a` ending at the junction (the origin),
/// then two arms leaving at `±half_angle` from the stem axis in the surface
/// plane.
pub fn build_y_splitter(stem: f64, half_angle: f64, arms: f64, linear_density: f64) -> Result<Layout> {
    positive("stem length", stem)?;
    positive("arm length", arms)?;
    if !(half_angle > 0.0 && half_angle < FRAC_PI_2) {
        return Err(Error::Domain(format!("half angle must lie in (0, π/2), got {half_angle}")));
    }
    let junction = Vec3::zeros();
    let stem_end = Vec3::new(0.0, 0.0, -stem);
    let (s, c) = half_angle.sin_cos();
    let arm_plus = Vec3::new(0.0, arms * s, arms * c);
    let arm_minus = Vec3::new(0.0, -arms * s, arms * c);
    let mut layout = Layout::new(vec![
        ChargeElement::segment(stem_end, junction, linear_density)?,
        ChargeElement::segment(junction, arm_plus, linear_density)?,
        ChargeElement::segment(junction, arm_minus, linear_density)?,
    ]);
    layout.anchors.insert("stem_end".into(), stem_end);
    layout.anchors.insert("junction".into(), junction);
    layout.anchors.insert("arm_plus".into(), arm_plus);
    layout.anchors.insert("arm_minus".into(), arm_minus);
    Ok(layout)
}

/// Square `count_t × count_a` array of equal point charges with spacing
/// `pitch`, centred on the origin.
pub fn build_dot_array(pitch: f64, count_t: usize, count_a: usize, charge: f64) -> Result<Layout> {
    positive("pitch", pitch)?;
    if count_t == 0 || count_a == 0 {
        return Err(Error::InvalidParameter("dot array needs at least one dot per row".into()));
    }
    let offset = |k: usize, count: usize| (k as f64 - 0.5 * (count - 1) as f64) * pitch;
    let mut layout = Layout::new(Vec::with_capacity(count_t * count_a));
    for i in 0..count_t {
        for j in 0..count_a {
            let p = Vec3::new(0.0, offset(i, count_t), offset(j, count_a));
            layout.elements.push(ChargeElement::point(p, charge)?);
            layout.anchors.insert(format!("dot_{i}_{j}"), p);
        }
    }
    Ok(layout)
}

/// Rectangular sampling window spanned by two orthonormal axes.
///
/// `resolution` counts intervals, so an axis carries `resolution + 1`
/// samples from the origin to the far edge. Doubling the resolution keeps
/// every old sample point exactly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlaneSpec {
    pub origin: Vec3,
    pub axis_u: Vec3,
    pub axis_v: Vec3,
    /// m along `axis_u`, `axis_v`
    pub extent: (f64, f64),
    pub resolution: (usize, usize),
}

impl PlaneSpec {
    pub fn new(origin: Vec3, axis_u: Vec3, axis_v: Vec3, extent: (f64, f64), resolution: (usize, usize)) -> Result<Self> {
        let p = Self { origin, axis_u, axis_v, extent, resolution };
        p.validate()?;
        Ok(p)
    }

    /// The `(t, n)` cross section at axial position `a`, centred on `t = 0`.
    pub fn cross_section(a: f64, n_range: (f64, f64), half_width: f64, resolution: (usize, usize)) -> Result<Self> {
        Self::new(
            Vec3::new(n_range.0, -half_width, a),
            Vec3::new(0.0, 1.0, 0.0),
            Vec3::new(1.0, 0.0, 0.0),
            (2.0 * half_width, n_range.1 - n_range.0),
            resolution,
        )
    }

    pub fn validate(&self) -> Result<()> {
        let unit = |v: &Vec3| (v.norm() - 1.0).abs() <= 1e-12;
        if !unit(&self.axis_u) || !unit(&self.axis_v) || self.axis_u.dot(&self.axis_v).abs() > 1e-12 {
            return Err(Error::InvalidParameter("plane axes must be orthonormal".into()));
        }
        let (eu, ev) = self.extent;
        if !(eu.is_finite() && ev.is_finite() && eu > 0.0 && ev > 0.0) {
            return Err(Error::InvalidParameter("plane has zero area".into()));
        }
        if self.resolution.0 == 0 || self.resolution.1 == 0 {
            return Err(Error::InvalidParameter("plane resolution must be at least one interval".into()));
        }
        if !self.origin.iter().all(|x| x.is_finite()) {
            return Err(Error::InvalidParameter("plane origin must be finite".into()));
        }
        Ok(())
    }

    /// Samples per axis.
    pub fn shape(&self) -> (usize, usize) {
        (self.resolution.0 + 1, self.resolution.1 + 1)
    }

    /// In-plane coordinates of sample `(iu, iv)`.
    pub fn coords(&self, iu: usize, iv: usize) -> (f64, f64) {
        (
            self.extent.0 * (iu as f64 / self.resolution.0 as f64),
            self.extent.1 * (iv as f64 / self.resolution.1 as f64),
        )
    }

    pub fn point(&self, iu: usize, iv: usize) -> Vec3 {
        let (u, v) = self.coords(iu, iv);
        self.origin + self.axis_u * u + self.axis_v * v
    }
}

/// Potential samples on a plane, row-major with `u` running fastest.
/// `None` marks masked samples: below or on the surface, or singular.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlaneSample {
    pub plane: PlaneSpec,
    pub values: Vec<Option<f64>>,
}

pub fn sample_plane(stack: &PotentialStack, atom: &AtomSpecies, plane: &PlaneSpec) -> Result<PlaneSample> {
    plane.validate()?;
    let (nu, nv) = plane.shape();
    let mut values = Vec::with_capacity(nu * nv);
    for iv in 0..nv {
        for iu in 0..nu {
            values.push(sample_point(stack, atom, &plane.point(iu, iv))?);
        }
    }
    Ok(PlaneSample { plane: plane.clone(), values })
}

fn sample_point(stack: &PotentialStack, atom: &AtomSpecies, p: &Vec3) -> Result<Option<f64>> {
    if p[0] <= 0.0 {
        return Ok(None);
    }
    match stack.total_potential(atom, p) {
        Ok(u) => Ok(Some(u)),
        Err(Error::Singularity(_)) => Ok(None),
        Err(e) => Err(e),
    }
}

/// Potential along `origin + s·direction` for `points` evenly spaced `s` in
/// `[0, length]`.
pub fn sample_line(
    stack: &PotentialStack,
    atom: &AtomSpecies,
    origin: &Vec3,
    direction: &Vec3,
    length: f64,
    points: usize,
) -> Result<Vec<(f64, Option<f64>)>> {
    positive("line length", length)?;
    if points < 2 {
        return Err(Error::InvalidParameter("a line cut needs at least two points".into()));
    }
    let d = direction
        .try_normalize(0.0)
        .ok_or_else(|| Error::InvalidParameter("line direction must be non-zero".into()))?;
    (0..points)
        .map(|k| {
            let s = length * (k as f64 / (points - 1) as f64);
            Ok((s, sample_point(stack, atom, &(origin + d * s))?))
        })
        .collect()
}

impl PlaneSample {
    fn at(&self, iu: usize, iv: usize) -> Option<f64> {
        self.values[iv * self.plane.shape().0 + iu]
    }

    pub fn masked_count(&self) -> usize {
        self.values.iter().filter(|v| v.is_none()).count()
    }

    pub fn min(&self) -> Option<f64> {
        self.values.iter().flatten().copied().reduce(f64::min)
    }

    pub fn max(&self) -> Option<f64> {
        self.values.iter().flatten().copied().reduce(f64::max)
    }

    /// Index `(iu, iv)` of the lowest unmasked sample; ties go to the first
    /// in row-major order.
    pub fn argmin(&self) -> Option<(usize, usize)> {
        let nu = self.plane.shape().0;
        let mut best: Option<(usize, f64)> = None;
        for (k, v) in self.values.iter().enumerate() {
            if let Some(v) = v {
                if best.is_none_or(|(_, b)| *v < b) {
                    best = Some((k, *v));
                }
            }
        }
        best.map(|(k, _)| (k % nu, k / nu))
    }

    /// Interior samples strictly below all eight unmasked neighbours.
    pub fn local_minima(&self) -> Vec<(usize, usize)> {
        let (nu, nv) = self.plane.shape();
        let mut out = Vec::new();
        for iv in 1..nv.saturating_sub(1) {
            for iu in 1..nu.saturating_sub(1) {
                let Some(c) = self.at(iu, iv) else { continue };
                let lower = (0..3).all(|dv| {
                    (0..3).all(|du| {
                        (du == 1 && dv == 1) || self.at(iu + du - 1, iv + dv - 1).is_none_or(|x| c < x)
                    })
                });
                if lower {
                    out.push((iu, iv));
                }
            }
        }
        out
    }

    /// CSV export: `#` metadata lines, one row of values in neV per `v`
    /// line, `nan` for masked samples, then a `# mask` block with 1 for
    /// masked samples.
    pub fn to_csv(&self, provenance: &str) -> String {
        let p = &self.plane;
        let (nu, nv) = p.shape();
        let mut s = String::new();
        for line in provenance.lines() {
            let _ = writeln!(s, "# {line}");
        }
        let v3 = |v: &Vec3| format!("{:e} {:e} {:e}", v[0], v[1], v[2]);
        let _ = writeln!(s, "# axes u = [{}] v = [{}]", v3(&p.axis_u), v3(&p.axis_v));
        let _ = writeln!(s, "# origin [{}] m", v3(&p.origin));
        let _ = writeln!(s, "# extent {:e} {:e} m", p.extent.0, p.extent.1);
        let _ = writeln!(s, "# resolution {} {}", p.resolution.0, p.resolution.1);
        let _ = writeln!(s, "# values neV, rows along v, masked = nan");
        for iv in 0..nv {
            let row: Vec<String> = (0..nu)
                .map(|iu| self.at(iu, iv).map_or("nan".to_string(), |x| format!("{:e}", x / NEV)))
                .collect();
            let _ = writeln!(s, "{}", row.join(","));
        }
        let _ = writeln!(s, "# mask");
        for iv in 0..nv {
            let row: Vec<&str> = (0..nu).map(|iu| if self.at(iu, iv).is_some() { "0" } else { "1" }).collect();
            let _ = writeln!(s, "{}", row.join(","));
        }
        s
    }

    /// JSON export with the same payload as [`Self::to_csv`]; masked values
    /// are `null`.
    pub fn to_json(&self, provenance: serde_json::Value) -> serde_json::Value {
        let p = &self.plane;
        let (nu, nv) = p.shape();
        let values: Vec<Vec<Option<f64>>> =
            (0..nv).map(|iv| (0..nu).map(|iu| self.at(iu, iv).map(|x| x / NEV)).collect()).collect();
        let mask: Vec<Vec<bool>> = (0..nv).map(|iv| (0..nu).map(|iu| self.at(iu, iv).is_none()).collect()).collect();
        serde_json::json!({
            "provenance": provenance,
            "axes": { "u": p.axis_u.as_slice(), "v": p.axis_v.as_slice() },
            "origin": p.origin.as_slice(),
            "extent": [p.extent.0, p.extent.1],
            "resolution": [p.resolution.0, p.resolution.1],
            "unit": "neV",
            "values": values,
            "mask": mask,
        })
    }
}
