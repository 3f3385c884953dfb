//! Bound states on finite-difference grids.
//!
//! One-dimensional problems use a three-point Laplacian with hard walls and
//! are solved exactly by Sturm bisection. Two-dimensional cross sections
//! (wire in `(n, t)`, axially symmetric dot in `(n, ρ)`) use a five-point
//! operator and shift-invert Lanczos on a banded Cholesky factor.

pub mod band;
pub mod lanczos;
pub mod tridiag;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::ChargeElement;
use crate::potential::PotentialStack;
use crate::species::AtomSpecies;
use crate::units::{HBAR, NEV};
use std::fmt::Write as _;
use crate::Vec3;

use lanczos::{lowest_eigenpairs, GridOperator};
use tridiag::SymTridiagonal;

/// Default cap on the number of unknowns in a 2D grid.
pub const DEFAULT_MAX_POINTS: usize = 512 * 512;

/// Escape threshold: a state is bound when its energy is below this.
pub const ESCAPE_THRESHOLD: f64 = 0.0;

const LANCZOS_SEED: u64 = 0x5eed_0f_a70b;

/// Uniform grid of `points` interior nodes strictly between `lo` and `hi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid1D {
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
}

impl Grid1D {
    pub fn new(lo: f64, hi: f64, points: usize) -> Result<Self> {
        let g = Self { lo, hi, points };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lo.is_finite() && self.hi.is_finite() && self.lo < self.hi) {
            return Err(Error::InvalidParameter(format!("grid needs lo < hi, got [{}, {}]", self.lo, self.hi)));
        }
        if self.points < 16 {
            return Err(Error::InvalidParameter(format!("grid needs at least 16 points, got {}", self.points)));
        }
        Ok(())
    }

    /// Node spacing; the walls sit one spacing outside the first and last node.
    pub fn spacing(&self) -> f64 {
        (self.hi - self.lo) / (self.points + 1) as f64
    }

    pub fn node(&self, i: usize) -> f64 {
        self.lo + (i + 1) as f64 * self.spacing()
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.points).map(|i| self.node(i)).collect()
    }

    fn widened(&self, factor: f64) -> Self {
        let pad = 0.5 * (factor - 1.0) * (self.hi - self.lo);
        Self {
            lo: self.lo - pad,
            hi: self.hi + pad,
            points: (self.points as f64 * factor).ceil() as usize,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid2D {
    pub axis_n: Grid1D,
    /// Transverse axis for wires; radial axis ρ for dots.
    pub axis_t: Grid1D,
}

impl Grid2D {
    pub fn new(axis_n: Grid1D, axis_t: Grid1D) -> Result<Self> {
        let g = Self { axis_n, axis_t };
        g.validate(DEFAULT_MAX_POINTS)?;
        Ok(g)
    }

    pub fn validate(&self, max_points: usize) -> Result<()> {
        self.axis_n.validate()?;
        self.axis_t.validate()?;
        if self.total_points() > max_points {
            return Err(Error::InvalidParameter(format!(
                "grid has {} points, cap is {max_points}",
                self.total_points()
            )));
        }
        Ok(())
    }

    pub fn total_points(&self) -> usize {
        self.axis_n.points * self.axis_t.points
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolveOptions {
    /// Largest allowed |ψ| on the boundary layer relative to max |ψ|;
    /// `None` disables the check (hard walls that are part of the physics).
    pub leak_tolerance: Option<f64>,
    pub max_points: usize,
    /// Keep the eigenvectors in the result.
    pub keep_states: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            leak_tolerance: Some(1e-6),
            max_points: DEFAULT_MAX_POINTS,
            keep_states: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GridKind {
    Line,
    WireCrossSection,
    /// `(n, ρ)` half plane for angular quantum number `m`.
    Axisymmetric { angular_m: i32 },
}

/// Bound-state spectrum on a grid.
///
/// `states[k]` holds the k-th eigenvector in row-major order (`n` slow,
/// second axis fast) scaled so that `Σ ψ² ΔA = 1`, with `ΔA` the cell
/// length or area. For axisymmetric grids the samples are the reduced
/// amplitude `sqrt(ρ)·ψ`, so `ψ` itself is normalized over `ρ dρ dn`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub kind: GridKind,
    /// J, ascending
    pub energies: Vec<f64>,
    pub bound_count: usize,
    pub axis_n: Grid1D,
    pub axis_t: Option<Grid1D>,
    pub states: Option<Vec<Vec<f64>>>,
    /// rms widths `(σ_n, σ_t)` of the ground state from second moments, m
    pub ground_widths: Option<(f64, f64)>,
}

impl Spectrum {
    pub fn cell_measure(&self) -> f64 {
        let second = match (self.kind, self.axis_t) {
            (GridKind::Axisymmetric { .. }, Some(g)) => radial_spacing(&g),
            (_, Some(g)) => g.spacing(),
            (_, None) => 1.0,
        };
        self.axis_n.spacing() * second
    }

    /// Coordinates of the nodes along the second axis (ρ for dots).
    pub fn second_axis_nodes(&self) -> Vec<f64> {
        match (self.kind, self.axis_t) {
            (GridKind::Axisymmetric { .. }, Some(g)) => (0..g.points).map(|j| radial_node(&g, j)).collect(),
            (_, Some(g)) => g.nodes(),
            (_, None) => vec![],
        }
    }

    pub fn norm(&self, k: usize) -> Option<f64> {
        let s = self.states.as_ref()?.get(k)?;
        Some((s.iter().map(|v| v * v).sum::<f64>() * self.cell_measure()).sqrt())
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.axis_n.points, self.axis_t.map_or(1, |g| g.points))
    }

    /// Energies in neV with grid metadata; wavefunctions are left to
    /// [`Self::state_csv`].
    pub fn to_json(&self, provenance: serde_json::Value) -> serde_json::Value {
        let energies: Vec<f64> = self.energies.iter().map(|e| e / NEV).collect();
        serde_json::json!({
            "provenance": provenance,
            "kind": self.kind,
            "unit": "neV",
            "energies": energies,
            "bound_count": self.bound_count,
            "axis_n": self.axis_n,
            "axis_t": self.axis_t,
            "ground_widths_m": self.ground_widths,
        })
    }

    /// CSV of state `k`: `#` metadata lines, then one row per `n` node with
    /// the amplitude at each second-axis node.
    pub fn state_csv(&self, k: usize, provenance: &str) -> Option<String> {
        let state = self.states.as_ref()?.get(k)?;
        let (n1, n2) = self.shape();
        let mut s = String::new();
        for line in provenance.lines() {
            let _ = writeln!(s, "# {line}");
        }
        let _ = writeln!(s, "# state {k} energy {:e} neV kind {:?}", self.energies[k] / NEV, self.kind);
        let _ = writeln!(
            s,
            "# axis_n lo {:e} hi {:e} points {} (walls one spacing outside the nodes)",
            self.axis_n.lo, self.axis_n.hi, self.axis_n.points
        );
        if let Some(g) = self.axis_t {
            let _ = writeln!(s, "# axis_2 lo {:e} hi {:e} points {}", g.lo, g.hi, g.points);
        }
        let second: Vec<String> = self.second_axis_nodes().iter().map(|x| format!("{x:e}")).collect();
        let _ = writeln!(s, "n_m\\x_m,{}", if second.is_empty() { "psi".to_string() } else { second.join(",") });
        for i in 0..n1 {
            let row: Vec<String> = state[i * n2..(i + 1) * n2].iter().map(|x| format!("{x:e}")).collect();
            let _ = writeln!(s, "{:e},{}", self.axis_n.node(i), row.join(","));
        }
        Some(s)
    }
}

fn count_bound(energies: &[f64]) -> usize {
    energies.iter().filter(|&&e| e < ESCAPE_THRESHOLD).count()
}

/// Lowest `n_states` levels of `−(ħ²/2m) d²/dx² + V` with hard walls.
pub fn solve_1d(potential_samples: &[f64], mass: f64, grid: &Grid1D, n_states: usize, options: &SolveOptions) -> Result<Spectrum> {
    grid.validate()?;
    if potential_samples.len() != grid.points {
        return Err(Error::InvalidParameter(format!(
            "{} potential samples for {} grid points",
            potential_samples.len(),
            grid.points
        )));
    }
    if !(mass > 0.0) {
        return Err(Error::InvalidParameter("mass must be positive".into()));
    }
    if n_states > grid.points {
        return Err(Error::InvalidParameter("more states requested than grid points".into()));
    }
    let h = grid.spacing();
    let c = HBAR * HBAR / (2.0 * mass * h * h);
    let t = SymTridiagonal::new(
        potential_samples.iter().map(|v| v + 2.0 * c).collect(),
        vec![-c; grid.points - 1],
    );
    let mut energies = Vec::with_capacity(n_states);
    let mut states = Vec::with_capacity(n_states);
    for k in 0..n_states {
        let e = t.eigenvalue(k);
        let mut v = t.eigenvector(e);
        // sign convention: first significant lobe positive
        let peak = v.iter().map(|x| x.abs()).fold(0.0, f64::max);
        if let Some(first) = v.iter().find(|x| x.abs() > 1e-3 * peak) {
            if *first < 0.0 {
                v.iter_mut().for_each(|x| *x = -*x);
            }
        }
        let scale = 1.0 / h.sqrt();
        v.iter_mut().for_each(|x| *x *= scale);
        energies.push(e);
        states.push(v);
    }
    if let Some(tol) = options.leak_tolerance {
        for s in &states {
            let peak = s.iter().map(|x| x.abs()).fold(0.0, f64::max);
            let edge = s[0].abs().max(s[s.len() - 1].abs()) / peak;
            if edge > tol {
                let w = grid.widened(1.5);
                return Err(Error::GridLeak {
                    amplitude: edge,
                    suggested: format!("[{:.4e}, {:.4e}] m with {} points", w.lo, w.hi, w.points),
                });
            }
        }
    }
    Ok(Spectrum {
        kind: GridKind::Line,
        bound_count: count_bound(&energies),
        energies,
        axis_n: *grid,
        axis_t: None,
        states: options.keep_states.then_some(states),
        ground_widths: None,
    })
}

/// Number of sign changes in a 1D eigenvector, ignoring the numerically
/// silent tails.
pub fn node_count(state: &[f64]) -> usize {
    let peak = state.iter().map(|x| x.abs()).fold(0.0, f64::max);
    let significant: Vec<f64> = state.iter().copied().filter(|x| x.abs() > 1e-8 * peak).collect();
    significant.windows(2).filter(|w| w[0].signum() != w[1].signum()).count()
}

/// Potential floor: the value half a cell above the foot of the first
/// electrode, so samples next to a wire stay finite.
fn potential_floor(stack: &PotentialStack, atom: &AtomSpecies, half_cell: f64) -> Option<f64> {
    let foot = match stack.charges.first()? {
        ChargeElement::InfiniteLine { foot_point, .. } => *foot_point,
        ChargeElement::FiniteSegment { end_a, end_b, .. } => (end_a + end_b) / 2.0,
        ChargeElement::PointCharge { position, .. } => *position,
    };
    let p = Vec3::new(foot[0].max(0.0) + half_cell, foot[1], foot[2]);
    stack.total_potential(atom, &p).ok()
}

fn sampled_potential(stack: &PotentialStack, atom: &AtomSpecies, p: &Vec3, floor: Option<f64>) -> Result<f64> {
    match (stack.total_potential(atom, p), floor) {
        (Ok(u), Some(f)) => Ok(u.max(f)),
        (Ok(u), None) => Ok(u),
        (Err(Error::Singularity(_)), Some(f)) => Ok(f),
        (Err(e), _) => Err(e),
    }
}

fn leak_amplitude(state: &[f64], n1: usize, n2: usize) -> f64 {
    let peak = state.iter().map(|x| x.abs()).fold(0.0, f64::max);
    let mut edge: f64 = 0.0;
    for i in 0..n1 {
        for j in 0..n2 {
            if i == 0 || j == 0 || i + 1 == n1 || j + 1 == n2 {
                edge = edge.max(state[i * n2 + j].abs());
            }
        }
    }
    edge / peak
}

fn leak_amplitude_radial(state: &[f64], n1: usize, n2: usize) -> f64 {
    // the ρ = 0 edge is a regular axis, not a wall
    let peak = state.iter().map(|x| x.abs()).fold(0.0, f64::max);
    let mut edge: f64 = 0.0;
    for i in 0..n1 {
        for j in 0..n2 {
            if i == 0 || i + 1 == n1 || j + 1 == n2 {
                edge = edge.max(state[i * n2 + j].abs());
            }
        }
    }
    edge / peak
}

fn second_moments(state: &[f64], grid: &Grid2D, radial: bool) -> (f64, f64) {
    let (n1, n2) = (grid.axis_n.points, grid.axis_t.points);
    let (mut w, mut mn, mut mt, mut mnn, mut mtt) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for i in 0..n1 {
        let n = grid.axis_n.node(i);
        for j in 0..n2 {
            let t = if radial { radial_node(&grid.axis_t, j) } else { grid.axis_t.node(j) };
            let p = state[i * n2 + j].powi(2);
            w += p;
            mn += p * n;
            mt += p * t;
            mnn += p * n * n;
            mtt += p * t * t;
        }
    }
    let (mn, mt) = (mn / w, mt / w);
    let var_n = mnn / w - mn * mn;
    // for a radial grid, the in-plane width per Cartesian axis is <ρ²>/2
    let var_t = if radial { 0.5 * mtt / w } else { mtt / w - mt * mt };
    (var_n.max(0.0).sqrt(), var_t.max(0.0).sqrt())
}

fn finish_2d(
    kind: GridKind,
    op: &GridOperator,
    grid: &Grid2D,
    n_states: usize,
    options: &SolveOptions,
    radial: bool,
) -> Result<Spectrum> {
    let (n1, n2) = (grid.axis_n.points, grid.axis_t.points);
    let (energies, vecs) = lowest_eigenpairs(op, n_states, LANCZOS_SEED)?;
    let measure = grid.axis_n.spacing() * if radial { radial_spacing(&grid.axis_t) } else { grid.axis_t.spacing() };
    let states: Vec<Vec<f64>> = vecs
        .iter()
        .map(|v| {
            let mut s = op.to_grid_order(v);
            let peak = s.iter().copied().fold(0.0f64, |a, x| if x.abs() > a.abs() { x } else { a });
            let scale = peak.signum() / measure.sqrt();
            s.iter_mut().for_each(|x| *x *= scale);
            s
        })
        .collect();
    if let Some(tol) = options.leak_tolerance {
        for s in &states {
            let edge = if radial { leak_amplitude_radial(s, n1, n2) } else { leak_amplitude(s, n1, n2) };
            if edge > tol {
                let wn = grid.axis_n.widened(1.5);
                let wt = grid.axis_t.widened(1.5);
                return Err(Error::GridLeak {
                    amplitude: edge,
                    suggested: format!(
                        "n [{:.4e}, {:.4e}] m, second axis [{:.4e}, {:.4e}] m",
                        wn.lo.max(grid.axis_n.lo),
                        wn.hi,
                        if radial { 0.0 } else { wt.lo },
                        wt.hi
                    ),
                });
            }
        }
    }
    let ground_widths = states.first().map(|s| second_moments(s, grid, radial));
    Ok(Spectrum {
        kind,
        bound_count: count_bound(&energies),
        energies,
        axis_n: grid.axis_n,
        axis_t: Some(grid.axis_t),
        states: options.keep_states.then_some(states),
        ground_widths,
    })
}

/// Transverse bound states of a guide that is translation invariant along `a`.
pub fn solve_wire_cross_section(
    stack: &PotentialStack,
    atom: &AtomSpecies,
    grid: &Grid2D,
    n_states: usize,
    options: &SolveOptions,
) -> Result<Spectrum> {
    grid.validate(options.max_points)?;
    if grid.axis_n.lo < 0.0 {
        return Err(Error::Domain("wire grid extends below the surface".into()));
    }
    let along_a = |d: &Vec3| d[0] == 0.0 && d[1] == 0.0;
    if stack.charges.is_empty()
        || !stack.charges.iter().all(|c| matches!(c, ChargeElement::InfiniteLine { direction, .. } if along_a(direction)))
    {
        return Err(Error::InvalidParameter(
            "wire cross sections need infinite lines along the a axis".into(),
        ));
    }
    let (n1, n2) = (grid.axis_n.points, grid.axis_t.points);
    let floor = potential_floor(stack, atom, 0.5 * grid.axis_n.spacing());
    let mut v = vec![0.0; n1 * n2];
    for i in 0..n1 {
        for j in 0..n2 {
            let p = Vec3::new(grid.axis_n.node(i), grid.axis_t.node(j), 0.0);
            v[i * n2 + j] = sampled_potential(stack, atom, &p, floor)?;
        }
    }
    let cn = HBAR * HBAR / (2.0 * atom.mass * grid.axis_n.spacing().powi(2));
    let ct = HBAR * HBAR / (2.0 * atom.mass * grid.axis_t.spacing().powi(2));
    let op = GridOperator::new(n1, n2, |i, j| v[i * n2 + j] + 2.0 * cn + 2.0 * ct, |_, _| -cn, |_, _| -ct);
    finish_2d(GridKind::WireCrossSection, &op, grid, n_states, options, false)
}

fn radial_spacing(axis: &Grid1D) -> f64 {
    (axis.hi - axis.lo) / axis.points as f64
}

/// Cell-centred radial node `ρ_j = (j + ½) Δρ`.
fn radial_node(axis: &Grid1D, j: usize) -> f64 {
    axis.lo + (j as f64 + 0.5) * radial_spacing(axis)
}

/// Bound states of an axially symmetric dot with angular quantum number `angular_m`.
///
/// `grid.axis_t` is the radial axis and must start at ρ = 0, where the
/// regular boundary condition applies; radial nodes are cell-centred so
/// ρ = 0 is never sampled.
pub fn solve_dot(
    stack: &PotentialStack,
    atom: &AtomSpecies,
    grid: &Grid2D,
    angular_m: i32,
    n_states: usize,
    options: &SolveOptions,
) -> Result<Spectrum> {
    grid.validate(options.max_points)?;
    if grid.axis_t.lo < 0.0 {
        return Err(Error::Domain("radial axis cannot start at negative ρ".into()));
    }
    if grid.axis_t.lo != 0.0 {
        return Err(Error::InvalidParameter("radial axis must start on the symmetry axis".into()));
    }
    if grid.axis_n.lo < 0.0 {
        return Err(Error::Domain("dot grid extends below the surface".into()));
    }
    let on_axis = |p: &Vec3| p[1] == 0.0 && p[2] == 0.0;
    if stack.charges.is_empty()
        || !stack.charges.iter().all(|c| matches!(c, ChargeElement::PointCharge { position, .. } if on_axis(position)))
    {
        return Err(Error::InvalidParameter(
            "dot solver needs point charges on the n axis".into(),
        ));
    }
    let (n1, n2) = (grid.axis_n.points, grid.axis_t.points);
    let hr = radial_spacing(&grid.axis_t);
    let floor = potential_floor(stack, atom, 0.5 * grid.axis_n.spacing().min(hr));
    let mut v = vec![0.0; n1 * n2];
    for i in 0..n1 {
        for j in 0..n2 {
            let p = Vec3::new(grid.axis_n.node(i), radial_node(&grid.axis_t, j), 0.0);
            v[i * n2 + j] = sampled_potential(stack, atom, &p, floor)?;
        }
    }
    let k = HBAR * HBAR / (2.0 * atom.mass);
    let cn = k / grid.axis_n.spacing().powi(2);
    let cr = k / (hr * hr);
    let rho = |j: usize| (j as f64 + 0.5) * hr;
    let face = |j: usize| (j as f64 + 1.0) * hr; // ρ_{j+½}
    let m2 = (angular_m as f64).powi(2);
    let op = GridOperator::new(
        n1,
        n2,
        |i, j| {
            let inner = if j == 0 { 0.0 } else { face(j - 1) };
            let radial = cr * (face(j) + inner) / rho(j);
            v[i * n2 + j] + 2.0 * cn + radial + k * m2 / rho(j).powi(2)
        },
        |_, _| -cn,
        |_, j| -cr * face(j) / (rho(j) * rho(j + 1)).sqrt(),
    );
    finish_2d(GridKind::Axisymmetric { angular_m }, &op, grid, n_states, options, true)
}

/// Least-squares fit of `|E_k| = A c^k` over the upper half of the bound levels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum SpacingLaw {
    Fit {
        ratio: f64,
        rms_log_residual: f64,
        states_used: usize,
    },
    NotApplicable {
        bound_count: usize,
    },
}

pub const SPACING_LAW_MIN_STATES: usize = 6;

pub fn spacing_law_check(spectrum: &Spectrum) -> SpacingLaw {
    let bound: Vec<f64> = spectrum.energies.iter().copied().filter(|&e| e < ESCAPE_THRESHOLD).collect();
    if bound.len() < SPACING_LAW_MIN_STATES {
        return SpacingLaw::NotApplicable { bound_count: bound.len() };
    }
    let start = bound.len() / 2;
    let pts: Vec<(f64, f64)> = bound[start..]
        .iter()
        .enumerate()
        .map(|(k, e)| ((start + k) as f64, e.abs().ln()))
        .collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let rms = (pts.iter().map(|p| (p.1 - my - slope * (p.0 - mx)).powi(2)).sum::<f64>() / n).sqrt();
    SpacingLaw::Fit {
        ratio: slope.exp(),
        rms_log_residual: rms,
        states_used: pts.len(),
    }
}
