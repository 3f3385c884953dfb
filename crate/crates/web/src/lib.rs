//! Browser bindings for the interactive demo page in `www/`.
//!
//! Every function takes the demo parameters as a JSON string
//! (`{"atom": "Li", "mirror": "evanescent", "layout": "wire", "charge": 0.33}`)
//! and returns JSON. `charge` is read in pC per cm for wires and in
//! elementary charges for dots.

use serde_json::{json, Value};
use surftrap::geometry::{sample_line, sample_plane, PlaneSpec};
use surftrap::trap::{self, AxisLabel, SearchBox, TrapReport};
use surftrap::units::{ELEMENTARY_CHARGE, KHZ, NEV, UEV, UM};
use surftrap::{AtomSpecies, ChargeElement, ConstantsRegistry, MirrorSpec, PotentialStack, Vec3};
use wasm_bindgen::prelude::*;

struct Demo {
    atom: AtomSpecies,
    stack: PotentialStack,
}

fn field<'a>(v: &'a Value, key: &str) -> Result<&'a Value, String> {
    v.get(key).ok_or_else(|| format!("missing `{key}`"))
}

fn parse(params: &str) -> Result<Demo, String> {
    let v: Value = serde_json::from_str(params).map_err(|e| e.to_string())?;
    let name = field(&v, "atom")?.as_str().ok_or("`atom` must be a string")?;
    let atom = ConstantsRegistry::builtin().species(name).map_err(|e| e.to_string())?;
    let mirror = match field(&v, "mirror")?.as_str() {
        Some("evanescent") => MirrorSpec::evanescent(1.0 * UEV, 1.0 / (0.1 * UM), 1000.0),
        Some("magnetic") => MirrorSpec::magnetic(6.4 * UEV, 1.0 / (1.5 * UM)),
        _ => return Err("`mirror` must be \"evanescent\" or \"magnetic\"".into()),
    }
    .map_err(|e| e.to_string())?;
    let charge = field(&v, "charge")?.as_f64().ok_or("`charge` must be a number")?;
    let element = match field(&v, "layout")?.as_str() {
        Some("wire") => ChargeElement::infinite_line(Vec3::zeros(), Vec3::z(), charge * 1e-10),
        Some("dot") => ChargeElement::point(Vec3::zeros(), charge * ELEMENTARY_CHARGE),
        _ => return Err("`layout` must be \"wire\" or \"dot\"".into()),
    }
    .map_err(|e| e.to_string())?;
    let stack = PotentialStack::new(mirror, vec![element]).map_err(|e| e.to_string())?;
    Ok(Demo { atom, stack })
}

fn analyze(demo: &Demo) -> Result<TrapReport, String> {
    trap::analyze(&demo.stack, &demo.atom, &SearchBox::for_mirror(&demo.stack.mirror)).map_err(|e| e.to_string())
}

/// Lower edge of the plot windows: just inside the mirror barrier, so the
/// collapse region at the surface does not swamp the colour scale.
fn window_floor(r: &TrapReport) -> f64 {
    r.tunneling.as_ref().map_or(0.2 * r.distance_to_surface, |t| 0.8 * t.barrier_position)
}

/// Trap figures in display units.
pub fn report_json(params: &str) -> Result<String, String> {
    let demo = parse(params)?;
    let r = analyze(&demo)?;
    let scale = |v: Option<f64>, unit: f64| v.map(|x| x / unit);
    Ok(json!({
        "depth_neV": r.depth / NEV,
        "distance_um": r.distance_to_surface / UM,
        "nu_n_kHz": scale(r.frequency(AxisLabel::N), KHZ),
        "nu_t_kHz": scale(r.frequency(AxisLabel::T), KHZ),
        "sigma_n_um": scale(r.ground_size(AxisLabel::N), UM),
        "sigma_t_um": scale(r.ground_size(AxisLabel::T), UM),
        "scattering_kHz": scale(r.scattering_rate, KHZ),
        "log10_lifetime_s": r.tunneling.as_ref().map(|t| t.log10_lifetime),
    })
    .to_string())
}

/// Potential in the `(t, n)` plane around the minimum, values in neV with
/// `null` for masked samples. `size` sets the window in units of the
/// distance to the surface; the window starts just inside the barrier.
pub fn cross_section_json(params: &str, size: f64, resolution: usize) -> Result<String, String> {
    let demo = parse(params)?;
    let r = analyze(&demo)?;
    let d = r.distance_to_surface;
    let n_lo = window_floor(&r);
    let plane = PlaneSpec::cross_section(0.0, (n_lo, n_lo + size * d), 0.5 * size * d, (resolution, resolution))
        .map_err(|e| e.to_string())?;
    let sample = sample_plane(&demo.stack, &demo.atom, &plane).map_err(|e| e.to_string())?;
    let values: Vec<Option<f64>> = sample.values.iter().map(|v| v.map(|x| x / NEV)).collect();
    Ok(json!({
        "columns": resolution + 1,
        "rows": resolution + 1,
        "t_range_um": [-0.5 * size * d / UM, 0.5 * size * d / UM],
        "n_range_um": [n_lo / UM, (n_lo + size * d) / UM],
        "min_neV": r.depth / NEV,
        "values": values,
    })
    .to_string())
}

/// Potential along `n` above the charge, in neV.
pub fn line_cut_json(params: &str, size: f64, points: usize) -> Result<String, String> {
    let demo = parse(params)?;
    let r = analyze(&demo)?;
    let d = r.distance_to_surface;
    let origin = Vec3::new(window_floor(&r), 0.0, 0.0);
    let cut = sample_line(&demo.stack, &demo.atom, &origin, &Vec3::x(), size * d, points).map_err(|e| e.to_string())?;
    let n: Vec<f64> = cut.iter().map(|(s, _)| (origin[0] + s) / UM).collect();
    let u: Vec<Option<f64>> = cut.iter().map(|(_, v)| v.map(|x| x / NEV)).collect();
    Ok(json!({ "n_um": n, "u_neV": u, "min_n_um": d / UM, "min_neV": r.depth / NEV }).to_string())
}

#[wasm_bindgen]
pub fn trap_report(params: &str) -> Result<String, JsValue> {
    report_json(params).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn cross_section(params: &str, size: f64, resolution: usize) -> Result<String, JsValue> {
    cross_section_json(params, size, resolution).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn line_cut(params: &str, size: f64, points: usize) -> Result<String, JsValue> {
    line_cut_json(params, size, points).map_err(|e| JsValue::from_str(&e))
}
