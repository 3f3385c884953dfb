//! Minimum search, harmonic analysis and trap figures of merit.

use std::f64::consts::PI;
use std::fmt::Write as _;

use nalgebra::{Matrix3, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::optimize::nelder_mead;
use crate::potential::{mirror_potential, MirrorKind, MirrorSpec, PotentialStack};
use crate::quad::integrate;
use crate::species::AtomSpecies;
use crate::units::{HBAR, KHZ, NEV, UM};
use crate::Vec3;

/// Seeds per axis for the multi-start minimum search.
const SEEDS_PER_AXIS: usize = 5;
/// Curvatures below this fraction of the stiffest one mark a free axis.
const FREE_AXIS_FRACTION: f64 = 1e-6;
const ESCAPE_RAYS: usize = 64;

/// Axis-aligned region strictly above the surface.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchBox {
    pub lo: Vec3,
    pub hi: Vec3,
}

impl SearchBox {
    pub fn new(lo: Vec3, hi: Vec3) -> Result<Self> {
        if !(lo[0] > 0.0) {
            return Err(Error::Domain("search box must lie strictly above the surface".into()));
        }
        if (0..3).any(|k| !(hi[k] > lo[k])) {
            return Err(Error::InvalidParameter("search box must have positive extent".into()));
        }
        Ok(Self { lo, hi })
    }

    /// Box scaled to the mirror decay length: heights 0.05/κ to 60/κ,
    /// ±30/κ in both in-surface directions.
    pub fn for_mirror(mirror: &MirrorSpec) -> Self {
        let l = mirror.decay_length();
        Self {
            lo: Vec3::new(0.05 * l, -30.0 * l, -30.0 * l),
            hi: Vec3::new(60.0 * l, 30.0 * l, 30.0 * l),
        }
    }

    pub fn extent(&self) -> Vec3 {
        self.hi - self.lo
    }

    fn to_physical(&self, x: &[f64; 3]) -> Vec3 {
        Vec3::new(
            self.lo[0] + x[0] * (self.hi[0] - self.lo[0]),
            self.lo[1] + x[1] * (self.hi[1] - self.lo[1]),
            self.lo[2] + x[2] * (self.hi[2] - self.lo[2]),
        )
    }

    fn contains(&self, r: &Vec3) -> bool {
        (0..3).all(|k| r[k] >= self.lo[k] && r[k] <= self.hi[k])
    }
}

/// Central-difference gradient.
pub fn gradient<F: Fn(&Vec3) -> Result<f64>>(f: &F, r: &Vec3, step: f64) -> Result<Vec3> {
    let mut g = Vec3::zeros();
    for i in 0..3 {
        let mut p = *r;
        let mut m = *r;
        p[i] += step;
        m[i] -= step;
        g[i] = (f(&p)? - f(&m)?) / (2.0 * step);
    }
    Ok(g)
}

fn hessian_at_step<F: Fn(&Vec3) -> Result<f64>>(f: &F, r: &Vec3, h: f64) -> Result<Matrix3<f64>> {
    let f0 = f(r)?;
    let shifted = |i: usize, si: f64, j: usize, sj: f64| {
        let mut p = *r;
        p[i] += si;
        p[j] += sj;
        f(&p)
    };
    let mut out = Matrix3::zeros();
    for i in 0..3 {
        let fp = shifted(i, h, i, 0.0)?;
        let fm = shifted(i, -h, i, 0.0)?;
        out[(i, i)] = (fp - 2.0 * f0 + fm) / (h * h);
        for j in (i + 1)..3 {
            let v = (shifted(i, h, j, h)? - shifted(i, h, j, -h)? - shifted(i, -h, j, h)? + shifted(i, -h, j, -h)?)
                / (4.0 * h * h);
            out[(i, j)] = v;
            out[(j, i)] = v;
        }
    }
    Ok(out)
}

/// Finite-difference Hessian of an arbitrary potential.
///
/// Starts at `step` and halves it until the matrix changes by less than
/// 1e-6 (relative, Frobenius norm) between successive halvings.
pub fn hessian_of<F: Fn(&Vec3) -> Result<f64>>(f: &F, r: &Vec3, step: f64) -> Result<Matrix3<f64>> {
    if !(step > 0.0) {
        return Err(Error::InvalidParameter("Hessian step must be positive".into()));
    }
    let mut h = step;
    let mut prev = hessian_at_step(f, r, h)?;
    let mut best: Option<(f64, Matrix3<f64>)> = None;
    for _ in 0..20 {
        h *= 0.5;
        let next = hessian_at_step(f, r, h)?;
        let scale = next.norm().max(prev.norm());
        let change = if scale > 0.0 { (next - prev).norm() / scale } else { 0.0 };
        if change < 1e-6 {
            return check_diagonal(next);
        }
        if best.map_or(true, |(c, _)| change < c) {
            best = Some((change, next));
        }
        prev = next;
    }
    // roundoff took over before the tolerance was met
    match best {
        Some((change, m)) if change < 1e-4 => check_diagonal(m),
        _ => Err(Error::Numerics("Hessian finite differences did not converge".into())),
    }
}

fn check_diagonal(h: Matrix3<f64>) -> Result<Matrix3<f64>> {
    let scale = h.abs().max();
    for i in 0..3 {
        if h[(i, i)] < -FREE_AXIS_FRACTION * scale {
            return Err(Error::NotAMinimum(format!(
                "negative curvature {:.3e} J/m² along axis {i}",
                h[(i, i)]
            )));
        }
    }
    Ok(h)
}

/// Hessian of the total potential at `r`.
pub fn hessian(stack: &PotentialStack, atom: &AtomSpecies, r: &Vec3, step: f64) -> Result<Matrix3<f64>> {
    hessian_of(&|p: &Vec3| stack.total_potential(atom, p), r, step)
}

/// Newton iterations on FD derivatives, restricted to the confined subspace.
/// Returns `None` if the iteration leaves the box or meets negative curvature.
fn polish<F: Fn(&Vec3) -> Result<f64>>(f: &F, start: Vec3, bounds: &SearchBox) -> Option<Vec3> {
    let mut r = start;
    for _ in 0..60 {
        let h = 1e-4 * r[0];
        let g = gradient(f, &r, h).ok()?;
        let hess = hessian_at_step(f, &r, h).ok()?;
        let eig = SymmetricEigen::new(hess);
        let kmax = eig.eigenvalues.max();
        if !(kmax > 0.0) {
            return None;
        }
        let mut step = Vec3::zeros();
        for i in 0..3 {
            let k = eig.eigenvalues[i];
            let v = eig.eigenvectors.column(i).into_owned();
            if k < -1e-3 * kmax {
                return None;
            }
            if k > FREE_AXIS_FRACTION * kmax {
                step -= v * (v.dot(&g) / k);
            }
        }
        r += step;
        if !bounds.contains(&r) {
            return None;
        }
        if step.norm() < 1e-13 * r[0] {
            return Some(r);
        }
    }
    None
}

/// Local minimizer of the total potential inside `search_box`.
///
/// A fixed 5×5×5 grid of seeds is refined by Nelder-Mead and then by
/// Newton steps; candidates that run into the box boundary are discarded.
/// The survivor with the lowest energy (ties broken lexicographically on
/// position) is returned.
pub fn find_minimum(stack: &PotentialStack, atom: &AtomSpecies, search_box: &SearchBox) -> Result<Vec3> {
    SearchBox::new(search_box.lo, search_box.hi)?;
    let f = |p: &Vec3| stack.total_potential(atom, p);
    let energy_scale = stack.mirror.barrier_height;
    let objective = |x: &[f64; 3]| {
        if x.iter().any(|c| !(0.0..=1.0).contains(c)) {
            return f64::INFINITY;
        }
        f(&search_box.to_physical(x)).map_or(f64::INFINITY, |u| u / energy_scale)
    };

    let mut candidates: Vec<(f64, Vec3)> = Vec::new();
    for i in 0..SEEDS_PER_AXIS {
        for j in 0..SEEDS_PER_AXIS {
            for k in 0..SEEDS_PER_AXIS {
                let c = |m: usize| (m as f64 + 0.5) / SEEDS_PER_AXIS as f64;
                let seed = [c(i), c(j), c(k)];
                let (x, _) = nelder_mead(&objective, seed, 0.05, 1e-7, 4000);
                let r = search_box.to_physical(&x);
                if let Some(p) = polish(&f, r, search_box) {
                    if let Ok(u) = f(&p) {
                        candidates.push((u, p));
                    }
                }
            }
        }
    }
    candidates
        .into_iter()
        .min_by(|a, b| {
            a.0.total_cmp(&b.0)
                .then(a.1[0].total_cmp(&b.1[0]))
                .then(a.1[1].total_cmp(&b.1[1]))
                .then(a.1[2].total_cmp(&b.1[2]))
        })
        .map(|(_, p)| p)
        .ok_or(Error::NoTrap)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AxisLabel {
    N,
    T,
    A,
}

/// One principal axis of the Hessian at the minimum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrincipalAxis {
    pub label: AxisLabel,
    pub direction: Vec3,
    /// J/m²
    pub curvature: f64,
    /// ν = ω/2π in Hz; `None` on a free (unconfined) axis.
    pub frequency: Option<f64>,
    /// rms ground-state width sqrt(ħ/2mω), m
    pub ground_size: Option<f64>,
    /// (2π/λ)·σ
    pub lamb_dicke: Option<f64>,
}

/// Harmonic analysis of a Hessian for a particle of `mass`.
///
/// Principal axes are labelled by their dominant frame component: the axis
/// closest to the surface normal is `n`, the one closest to `t` among the
/// rest is `t`, the remaining one `a`.
pub fn harmonic_axes(hess: &Matrix3<f64>, mass: f64, wavenumber: f64) -> Result<Vec<PrincipalAxis>> {
    let eig = SymmetricEigen::new(*hess);
    let kmax = eig.eigenvalues.max();
    if !(kmax > 0.0) {
        return Err(Error::NotAMinimum("no confining direction".into()));
    }
    let mut remaining: Vec<usize> = (0..3).collect();
    let mut axes = Vec::with_capacity(3);
    for (label, comp) in [(AxisLabel::N, 0), (AxisLabel::T, 1), (AxisLabel::A, 2)] {
        let pos = remaining
            .iter()
            .enumerate()
            .max_by(|x, y| {
                eig.eigenvectors[(comp, *x.1)]
                    .abs()
                    .total_cmp(&eig.eigenvectors[(comp, *y.1)].abs())
            })
            .map(|(p, _)| p)
            .expect("axes remain");
        let idx = remaining.remove(pos);
        let k = eig.eigenvalues[idx];
        let mut v = eig.eigenvectors.column(idx).into_owned();
        if v[comp] < 0.0 {
            v = -v;
        }
        if k < -FREE_AXIS_FRACTION * kmax {
            return Err(Error::NotAMinimum(format!("negative curvature {k:.3e} J/m²")));
        }
        let (frequency, ground_size, lamb_dicke) = if k > FREE_AXIS_FRACTION * kmax {
            let omega = (k / mass).sqrt();
            let sigma = (HBAR / (2.0 * mass * omega)).sqrt();
            (Some(omega / (2.0 * PI)), Some(sigma), Some(wavenumber * sigma))
        } else {
            (None, None, None)
        };
        axes.push(PrincipalAxis {
            label,
            direction: v,
            curvature: k,
            frequency,
            ground_size,
            lamb_dicke,
        });
    }
    Ok(axes)
}

/// Tunneling estimate through the mirror barrier below the minimum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tunneling {
    /// ∫ sqrt(2m(U-E0))/ħ ds between the turning points
    pub action: f64,
    /// ν_n, Hz
    pub attempt_frequency: f64,
    /// Barrier top along the path, J
    pub barrier_top: f64,
    /// Height of the barrier top, m
    pub barrier_position: f64,
    /// log10 of the lifetime in seconds (the lifetime itself often overflows f64)
    pub log10_lifetime: f64,
}

impl Tunneling {
    pub fn lifetime(&self) -> f64 {
        10f64.powf(self.log10_lifetime)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrapReport {
    pub min_position: Vec3,
    pub potential_at_min: f64,
    /// Lowest escape barrier, J
    pub escape_threshold: f64,
    /// U(min) − threshold, J; negative for a bound configuration
    pub depth: f64,
    pub distance_to_surface: f64,
    /// Principal axes in `n, t, a` order.
    pub axes: Vec<PrincipalAxis>,
    /// Photon scattering rate, Hz; evanescent mirrors only.
    pub scattering_rate: Option<f64>,
    pub tunneling: Option<Tunneling>,
}

impl TrapReport {
    pub fn axis(&self, label: AxisLabel) -> &PrincipalAxis {
        self.axes.iter().find(|a| a.label == label).expect("all three axes present")
    }

    pub fn frequency(&self, label: AxisLabel) -> Option<f64> {
        self.axis(label).frequency
    }

    pub fn ground_size(&self, label: AxisLabel) -> Option<f64> {
        self.axis(label).ground_size
    }

    pub fn tunneling_lifetime(&self) -> Option<f64> {
        self.tunneling.as_ref().map(Tunneling::lifetime)
    }

    /// Column header of [`Self::table_row`].
    pub fn table_header() -> String {
        format!(
            "{:>12} {:>12} {:>12} {:>10} {:>10} {:>10} {:>10} {:>12}",
            "charge", "depth[neV]", "dist[um]", "nu_n[kHz]", "nu_t[kHz]", "sig_n[um]", "sig_t[um]", "scat[kHz]"
        )
    }

    /// Aligned row in the printed column order.
    pub fn table_row(&self, charge_label: &str) -> String {
        let opt = |v: Option<f64>, scale: f64| v.map_or("-".to_string(), |x| format!("{:.4}", x / scale));
        format!(
            "{:>12} {:>12.4} {:>12.4} {:>10} {:>10} {:>10} {:>10} {:>12}",
            charge_label,
            self.depth / NEV,
            self.distance_to_surface / UM,
            opt(self.frequency(AxisLabel::N), KHZ),
            opt(self.frequency(AxisLabel::T), KHZ),
            opt(self.ground_size(AxisLabel::N), UM),
            opt(self.ground_size(AxisLabel::T), UM),
            opt(self.scattering_rate, KHZ),
        )
    }

    pub fn to_text(&self, charge_label: &str) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{}", Self::table_header());
        let _ = writeln!(s, "{}", self.table_row(charge_label));
        for ax in &self.axes {
            let _ = writeln!(
                s,
                "axis {:?}: curvature {:.6e} J/m^2, lamb-dicke {}",
                ax.label,
                ax.curvature,
                ax.lamb_dicke.map_or("-".into(), |x| format!("{x:.4}"))
            );
        }
        if let Some(t) = &self.tunneling {
            let _ = writeln!(s, "tunneling: action {:.4}, log10(lifetime/s) {:.3}", t.action, t.log10_lifetime);
        }
        s
    }
}

/// Harmonic frequencies, ground-state sizes and Lamb-Dicke parameters at
/// `min_position`, with the Hessian step starting at 1e-3 × height.
pub fn harmonic_report(stack: &PotentialStack, atom: &AtomSpecies, min_position: &Vec3) -> Result<Vec<PrincipalAxis>> {
    let hess = hessian(stack, atom, min_position, 1e-3 * min_position[0])?;
    harmonic_axes(&hess, atom.mass, atom.wavenumber())
}

/// Ray directions used for the escape scan. Free axes are projected out.
fn escape_directions(free: &[Vec3]) -> Vec<Vec3> {
    let project = |v: Vec3| {
        let mut w = v;
        for f in free {
            w -= f * f.dot(&w);
        }
        let n = w.norm();
        (n > 1e-6).then(|| w / n)
    };
    let mut dirs = Vec::new();
    let golden = PI * (3.0 - 5f64.sqrt());
    for i in 0..ESCAPE_RAYS {
        let v = if free.is_empty() {
            // Fibonacci points on the upper hemisphere
            let z = (i as f64 + 0.5) / ESCAPE_RAYS as f64;
            let r = (1.0 - z * z).sqrt();
            let phi = golden * i as f64;
            Vec3::new(z, r * phi.cos(), r * phi.sin())
        } else {
            let theta = PI * i as f64 / (ESCAPE_RAYS - 1) as f64;
            // half circle in the plane orthogonal to the free axes
            let e1 = project(Vec3::x()).unwrap_or_else(Vec3::y);
            let e2 = project(e1.cross(&free[0])).unwrap_or_else(Vec3::z);
            let e2 = if e2[1] < 0.0 { -e2 } else { e2 };
            e1 * theta.sin() + e2 * theta.cos()
        };
        dirs.extend(project(v));
    }
    for axis in [Vec3::x(), Vec3::y(), -Vec3::y(), Vec3::z(), -Vec3::z()] {
        dirs.extend(project(axis));
    }
    dirs.retain(|d| d[0] >= -1e-12);
    dirs
}

/// Depth relative to the lowest escape barrier.
///
/// Each ray from the minimum is marched out to 10⁴ heights (log-spaced);
/// its barrier is the largest potential met on the way, or the asymptotic
/// zero when the stack has no gravity term. Returns `(depth, threshold)`.
pub fn trap_depth(stack: &PotentialStack, atom: &AtomSpecies, min_position: &Vec3) -> Result<(f64, f64)> {
    let u_min = stack.total_potential(atom, min_position)?;
    let axes = harmonic_report(stack, atom, min_position)?;
    let free: Vec<Vec3> = axes.iter().filter(|a| a.frequency.is_none()).map(|a| a.direction).collect();
    let scale = min_position[0];
    let mut threshold = f64::INFINITY;
    for dir in escape_directions(&free) {
        let mut barrier = if stack.gravity { f64::NEG_INFINITY } else { 0.0 };
        for s in 0..=400 {
            let dist = scale * 10f64.powf(-3.0 + 7.0 * s as f64 / 400.0);
            let p = min_position + dir * dist;
            if let Ok(u) = stack.total_potential(atom, &p) {
                barrier = barrier.max(u);
            }
        }
        threshold = threshold.min(barrier);
    }
    Ok((u_min - threshold, threshold))
}

/// Photon scattering rate `U_m(n) Γ / (ħ Δ)` at the minimum.
pub fn scattering_rate(mirror: &MirrorSpec, atom: &AtomSpecies, min_position: &Vec3) -> Result<f64> {
    if mirror.kind != MirrorKind::Evanescent {
        return Err(Error::UnsupportedMirror);
    }
    let detuning = mirror.detuning_in_linewidths.ok_or(Error::UnsupportedMirror)? * atom.natural_linewidth;
    let u = mirror_potential(mirror, min_position[0])?;
    Ok(u * atom.natural_linewidth / (HBAR * detuning))
}

fn bisect<F: Fn(f64) -> f64>(g: F, mut lo: f64, mut hi: f64) -> f64 {
    // assumes sign change between lo and hi
    let glo = g(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if (g(mid) > 0.0) == (glo > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
        if (hi - lo).abs() <= 1e-15 * hi.abs().max(lo.abs()) {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// WKB tunneling lifetime toward the surface along −n.
///
/// The zero-point energy `E0 = U(min) + ħω_n/2` sets the turning points;
/// the rate is `ν_n exp(−2S)` with `S` the barrier action.
pub fn wkb_lifetime(stack: &PotentialStack, atom: &AtomSpecies, min_position: &Vec3) -> Result<Tunneling> {
    let axes = harmonic_report(stack, atom, min_position)?;
    let axis_n = axes.iter().find(|a| a.label == AxisLabel::N).expect("n axis");
    let nu = axis_n
        .frequency
        .ok_or_else(|| Error::NotAMinimum("no confinement normal to the surface".into()))?;
    let u_min = stack.total_potential(atom, min_position)?;
    let e0 = u_min + 0.5 * HBAR * 2.0 * PI * nu;
    let n_min = min_position[0];
    let at = |n: f64| {
        let mut p = *min_position;
        p[0] = n;
        stack.total_potential(atom, &p)
    };

    // scan from the minimum down toward the surface
    let samples = 4000;
    let mut heights = Vec::with_capacity(samples);
    for i in 0..samples {
        let frac = 1.0 - i as f64 / samples as f64;
        heights.push(n_min * frac);
    }
    let mut top = (n_min, u_min);
    let mut last_valid = n_min;
    for &n in &heights {
        match at(n) {
            Ok(u) => {
                last_valid = n;
                if u > top.1 {
                    top = (n, u);
                }
            }
            Err(_) => break,
        }
    }
    if top.1 <= e0 {
        return Err(Error::ImmediateLoss);
    }
    let excess = |n: f64| at(n).map(|u| u - e0).unwrap_or(f64::NEG_INFINITY);
    let inner = bisect(excess, top.0, n_min);
    let outer = if excess(last_valid) > 0.0 {
        last_valid
    } else {
        bisect(excess, last_valid, top.0)
    };
    let m = atom.mass;
    let integrand = |n: f64| {
        let d = excess(n);
        if d > 0.0 {
            (2.0 * m * d).sqrt() / HBAR
        } else {
            0.0
        }
    };
    let action = integrate(integrand, outer, inner, 1e-6, 5000)?;
    let log10_lifetime = (2.0 * action) / std::f64::consts::LN_10 - nu.log10();
    Ok(Tunneling {
        action,
        attempt_frequency: nu,
        barrier_top: top.1,
        barrier_position: top.0,
        log10_lifetime,
    })
}

/// Expected number of atoms captured: density × cross section × length.
pub fn loading_estimate(density: f64, cross_section: f64, length: f64) -> Result<f64> {
    if [density, cross_section, length].iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
        return Err(Error::InvalidParameter("loading inputs must be finite and non-negative".into()));
    }
    Ok(density * cross_section * length)
}

/// Full characterization: minimum, depth, harmonic axes, scattering and tunneling.
pub fn analyze(stack: &PotentialStack, atom: &AtomSpecies, search_box: &SearchBox) -> Result<TrapReport> {
    let min_position = find_minimum(stack, atom, search_box)?;
    report_at(stack, atom, &min_position)
}

/// Characterization at a known minimum.
pub fn report_at(stack: &PotentialStack, atom: &AtomSpecies, min_position: &Vec3) -> Result<TrapReport> {
    let potential_at_min = stack.total_potential(atom, min_position)?;
    let axes = harmonic_report(stack, atom, min_position)?;
    let (depth, escape_threshold) = trap_depth(stack, atom, min_position)?;
    let scattering_rate = match stack.mirror.kind {
        MirrorKind::Evanescent => Some(scattering_rate(&stack.mirror, atom, min_position)?),
        MirrorKind::Magnetic => None,
    };
    let tunneling = match wkb_lifetime(stack, atom, min_position) {
        Ok(t) => Some(t),
        Err(Error::ImmediateLoss) => None,
        Err(e) => return Err(e),
    };
    Ok(TrapReport {
        min_position: *min_position,
        potential_at_min,
        escape_threshold,
        depth,
        distance_to_surface: min_position[0],
        axes,
        scattering_rate,
        tunneling,
    })
}
