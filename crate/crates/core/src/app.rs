//! Config-driven runs behind the command-line tool.
//!
//! Every run is a pure function of the config and the constants registry
//! and returns the text for standard output plus named output files, so
//! identical inputs give identical bytes.

use std::fmt::Write as _;

use serde_json::json;

use crate::config::{Analysis, ContourOptions, ExperimentConfig, Resolved, SpectrumOptions, TablesOptions};
use crate::eigen::{self, Grid1D, Grid2D, SolveOptions, SpacingLaw, Spectrum};
use crate::error::{Error, Result};
use crate::field::ChargeElement;
use crate::geometry::sample_plane;
use crate::species::ConstantsRegistry;
use crate::tables;
use crate::trap::{self, AxisLabel, SearchBox, TrapReport};
use crate::units::{HBAR, NEV, UM};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_NO_TRAP: i32 = 2;
pub const EXIT_NUMERICS: i32 = 3;
pub const EXIT_IO: i32 = 4;

/// Grid extent in harmonic ground-state sizes when a spectrum grid is not
/// configured.
pub const DEFAULT_GRID_SIZES: f64 = 20.0;
pub const DEFAULT_GRID_POINTS: usize = 160;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Text,
    Json,
}

/// Result of a run: text for standard output and files keyed by name.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Output {
    pub stdout: String,
    pub files: Vec<(String, Vec<u8>)>,
}

pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Config(_) | Error::InvalidParameter(_) | Error::Domain(_) | Error::UnsupportedMirror => EXIT_CONFIG,
        Error::NoTrap | Error::NotAMinimum(_) | Error::ImmediateLoss => EXIT_NO_TRAP,
        Error::Numerics(_) | Error::GridLeak { .. } | Error::Singularity(_) => EXIT_NUMERICS,
        Error::Io(_) => EXIT_IO,
    }
}

const CONVENTIONS: &[&str] = &[
    "frame: n normal to the mirror, t in the surface across the wire, a along the wire",
    "polarization energy: -2 pi eps0 alpha |E|^2, alpha a polarizability volume",
    "frequencies: nu = omega / 2 pi",
    "ground-state size: sigma = sqrt(hbar / (2 m omega)), the rms width",
    "scattering rate: U_mirror(n_min) Gamma / (hbar Delta)",
    "depth: U(min) minus the lowest escape barrier; 0 J at infinity",
];

/// Provenance block: tool version, conventions, resolved config and the
/// full constants registry.
pub fn provenance(config: &ExperimentConfig, registry: &ConstantsRegistry, charge_note: &str) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "surftrap {}", env!("CARGO_PKG_VERSION"));
    for c in CONVENTIONS {
        let _ = writeln!(s, "convention: {c}");
    }
    let _ = writeln!(s, "charges: {charge_note}");
    let _ = writeln!(s, "[config]");
    s.push_str(&config.to_toml());
    let _ = writeln!(s, "[constants]");
    s.push_str(&registry.to_toml());
    s
}

fn commented(block: &str) -> String {
    block.lines().map(|l| format!("# {l}\n")).collect()
}

fn provenance_json(config: &ExperimentConfig, registry: &ConstantsRegistry, charge_note: &str) -> serde_json::Value {
    json!({
        "tool": format!("surftrap {}", env!("CARGO_PKG_VERSION")),
        "conventions": CONVENTIONS,
        "charges": charge_note,
        "config": config.to_toml(),
        "constants": registry.to_toml(),
    })
}

fn pretty(v: &serde_json::Value) -> Vec<u8> {
    let mut bytes = serde_json::to_vec_pretty(v).expect("json value serializes");
    bytes.push(b'\n');
    bytes
}

const AS_CONFIGURED: &str = "used as configured, no calibration";

/// Runs the analysis named in the config.
pub fn run(config: &ExperimentConfig, registry: &ConstantsRegistry, format: Format) -> Result<Output> {
    match &config.analysis {
        Analysis::Report(_) => run_report(config, registry, format),
        Analysis::Tables(opts) => run_tables(config, opts, registry, format),
        Analysis::Spectrum(opts) => run_spectrum(config, opts, registry, format),
        Analysis::Contour(opts) => run_contour(config, opts, registry, format),
    }
}

fn analyze(config: &ExperimentConfig, resolved: &Resolved) -> Result<TrapReport> {
    let search_box = match &config.analysis {
        Analysis::Report(r) => r.search_box.as_ref().map(|b| b.resolve()).transpose()?,
        _ => None,
    };
    let search_box = search_box.unwrap_or_else(|| SearchBox::for_mirror(&resolved.stack.mirror));
    trap::analyze(&resolved.stack, &resolved.atom, &search_box)
}

fn charge_label(config: &ExperimentConfig) -> String {
    use crate::config::LayoutConfig::*;
    match &config.layout {
        Wire { linear_density, .. } | YSplitter { linear_density, .. } => linear_density.to_string(),
        Dot { charge } | DotArray { charge, .. } => charge.to_string(),
        Elements(e) => format!("{} elements", e.len()),
    }
}

pub fn run_report(config: &ExperimentConfig, registry: &ConstantsRegistry, format: Format) -> Result<Output> {
    let resolved = config.resolve(registry)?;
    let report = analyze(config, &resolved)?;
    let prov = provenance(config, registry, AS_CONFIGURED);
    let doc = json!({
        "provenance": provenance_json(config, registry, AS_CONFIGURED),
        "atom": resolved.atom,
        "report": report,
    });
    let json_bytes = pretty(&doc);
    let stdout = match format {
        Format::Text => {
            let mut s = commented(&prov);
            s.push_str(&report.to_text(&charge_label(config)));
            for ax in &report.axes {
                let _ = writeln!(
                    s,
                    "axis {:?} direction [{:.6}, {:.6}, {:.6}]",
                    ax.label, ax.direction[0], ax.direction[1], ax.direction[2]
                );
            }
            if let Some(t) = &report.tunneling {
                let _ = writeln!(s, "barrier top {:.4} neV at n = {:.4} um", t.barrier_top / NEV, t.barrier_position / UM);
            }
            s
        }
        Format::Json => String::from_utf8(json_bytes.clone()).expect("json is utf-8"),
    };
    Ok(Output { stdout, files: vec![("report.json".into(), json_bytes)] })
}

pub fn run_tables(
    config: &ExperimentConfig,
    opts: &TablesOptions,
    registry: &ConstantsRegistry,
    format: Format,
) -> Result<Output> {
    let calibrated = opts.calibrate.unwrap_or(true);
    let run = tables::reproduce(registry, calibrated)?;
    let note = if calibrated {
        "tables: one charge scale per table, fitted to the calibration row distance"
    } else {
        "tables: printed charges used unscaled"
    };
    let doc = json!({
        "provenance": provenance_json(config, registry, note),
        "tables": run,
    });
    let json_bytes = pretty(&doc);
    let stdout = match format {
        Format::Text => {
            let mut s = commented(&provenance(config, registry, note));
            s.push_str(&run.to_text());
            s
        }
        Format::Json => String::from_utf8(json_bytes.clone()).expect("json is utf-8"),
    };
    Ok(Output { stdout, files: vec![("tables.json".into(), json_bytes)] })
}

enum SpectrumKind {
    Wire,
    Dot,
}

fn spectrum_kind(resolved: &Resolved) -> Result<SpectrumKind> {
    let charges = &resolved.stack.charges;
    if charges.is_empty() {
        return Err(Error::Config("spectrum needs at least one charge".into()));
    }
    if charges.iter().all(|c| matches!(c, ChargeElement::InfiniteLine { direction, .. } if direction[0] == 0.0 && direction[1] == 0.0)) {
        return Ok(SpectrumKind::Wire);
    }
    if charges.iter().all(|c| matches!(c, ChargeElement::PointCharge { position, .. } if position[1] == 0.0 && position[2] == 0.0)) {
        return Ok(SpectrumKind::Dot);
    }
    Err(Error::Config(
        "spectrum needs infinite wires along a or point charges on the n axis".into(),
    ))
}

/// Grid for a spectrum run; unset values come from the harmonic report.
pub fn spectrum_grid(opts: &SpectrumOptions, report: &TrapReport, dot: bool) -> Result<Grid2D> {
    use crate::units::Dimension::Length;
    let g = opts.grid.clone().unwrap_or_default();
    let n_min = report.distance_to_surface;
    let sigma_n = report.ground_size(AxisLabel::N).unwrap_or(n_min);
    let sigma_t = report.ground_size(AxisLabel::T).unwrap_or(n_min);
    let (n_lo, n_hi) = match &g.n_range {
        Some([lo, hi]) => (lo.si(Length)?, hi.si(Length)?),
        None => {
            let lo = report.tunneling.as_ref().map_or(0.5 * n_min, |t| t.barrier_position);
            (lo, n_min + DEFAULT_GRID_SIZES * sigma_n)
        }
    };
    let extent = match &g.second_extent {
        Some(q) => q.si(Length)?,
        None => DEFAULT_GRID_SIZES * sigma_t,
    };
    let n_points = g.n_points.unwrap_or(DEFAULT_GRID_POINTS);
    let second_points = g.second_points.unwrap_or(DEFAULT_GRID_POINTS);
    let second = if dot {
        Grid1D::new(0.0, extent, second_points)
    } else {
        Grid1D::new(-extent, extent, second_points)
    };
    let grid = Grid2D { axis_n: Grid1D::new(n_lo, n_hi, n_points)?, axis_t: second? };
    grid.validate(g.max_points.unwrap_or(eigen::DEFAULT_MAX_POINTS))?;
    Ok(grid)
}

fn harmonic_self_test(report: &TrapReport, mass: f64) -> Result<String> {
    let omega = 2.0 * std::f64::consts::PI * report.frequency(AxisLabel::N).ok_or_else(|| Error::Numerics("no n frequency".into()))?;
    let len = (HBAR / (mass * omega)).sqrt();
    let grid = Grid1D::new(-10.0 * len, 10.0 * len, 2000)?;
    let v: Vec<f64> = grid.nodes().iter().map(|x| 0.5 * mass * omega * omega * x * x).collect();
    let s = eigen::solve_1d(&v, mass, &grid, 5, &SolveOptions { keep_states: false, ..Default::default() })?;
    let mut out = String::new();
    let _ = writeln!(out, "harmonic self-test at omega_n, 2000 points");
    let _ = writeln!(out, "{:>3} {:>14} {:>14} {:>12}", "k", "exact[neV]", "grid[neV]", "rel.err");
    for (k, e) in s.energies.iter().enumerate() {
        let exact = (k as f64 + 0.5) * HBAR * omega;
        let _ = writeln!(out, "{k:>3} {:>14.6} {:>14.6} {:>12.3e}", exact / NEV, e / NEV, e / exact - 1.0);
    }
    Ok(out)
}

pub fn solve_spectrum(resolved: &Resolved, opts: &SpectrumOptions, report: &TrapReport) -> Result<Spectrum> {
    let kind = spectrum_kind(resolved)?;
    let grid = spectrum_grid(opts, report, matches!(kind, SpectrumKind::Dot))?;
    let solve = SolveOptions {
        leak_tolerance: match opts.leak_tolerance {
            Some(t) if t <= 0.0 => None,
            Some(t) => Some(t),
            None => SolveOptions::default().leak_tolerance,
        },
        max_points: opts.grid.as_ref().and_then(|g| g.max_points).unwrap_or(eigen::DEFAULT_MAX_POINTS),
        keep_states: opts.write_states.unwrap_or(false),
    };
    match kind {
        SpectrumKind::Wire => eigen::solve_wire_cross_section(&resolved.stack, &resolved.atom, &grid, opts.n_states, &solve),
        SpectrumKind::Dot => eigen::solve_dot(
            &resolved.stack,
            &resolved.atom,
            &grid,
            opts.angular_m.unwrap_or(0),
            opts.n_states,
            &solve,
        ),
    }
}

pub fn run_spectrum(
    config: &ExperimentConfig,
    opts: &SpectrumOptions,
    registry: &ConstantsRegistry,
    format: Format,
) -> Result<Output> {
    let resolved = config.resolve(registry)?;
    let report = analyze(config, &resolved)?;
    let spectrum = solve_spectrum(&resolved, opts, &report)?;
    let law = eigen::spacing_law_check(&spectrum);
    let prov = provenance(config, registry, AS_CONFIGURED);
    let mut doc = spectrum.to_json(provenance_json(config, registry, AS_CONFIGURED));
    doc["spacing_law"] = serde_json::to_value(&law).expect("spacing law serializes");
    let json_bytes = pretty(&doc);
    let mut files = vec![("spectrum.json".to_string(), json_bytes.clone())];
    for k in 0..spectrum.energies.len() {
        if let Some(csv) = spectrum.state_csv(k, &prov) {
            files.push((format!("state_{k:03}.csv"), csv.into_bytes()));
        }
    }
    let stdout = match format {
        Format::Text => {
            let mut s = commented(&prov);
            let _ = writeln!(s, "bound_count {}", spectrum.bound_count);
            for (k, e) in spectrum.energies.iter().enumerate() {
                let _ = writeln!(s, "E[{k}] = {:.6} neV", e / NEV);
            }
            match law {
                SpacingLaw::Fit { ratio, rms_log_residual, states_used } => {
                    let _ = writeln!(
                        s,
                        "spacing law: |E_k| ~ c^k with c = {ratio:.4}, rms log residual {rms_log_residual:.4} over {states_used} states"
                    );
                }
                SpacingLaw::NotApplicable { bound_count } => {
                    let _ = writeln!(s, "spacing law: not applicable with {bound_count} bound states");
                }
            }
            if opts.harmonic_self_test.unwrap_or(false) {
                s.push_str(&harmonic_self_test(&report, resolved.atom.mass)?);
            }
            s
        }
        Format::Json => String::from_utf8(json_bytes).expect("json is utf-8"),
    };
    Ok(Output { stdout, files })
}

pub fn run_contour(
    config: &ExperimentConfig,
    opts: &ContourOptions,
    registry: &ConstantsRegistry,
    format: Format,
) -> Result<Output> {
    let resolved = config.resolve(registry)?;
    let plane = opts.resolve()?;
    let sample = sample_plane(&resolved.stack, &resolved.atom, &plane)?;
    let prov = provenance(config, registry, AS_CONFIGURED);
    let file = match format {
        Format::Text => ("contour.csv".to_string(), sample.to_csv(&prov).into_bytes()),
        Format::Json => ("contour.json".to_string(), pretty(&sample.to_json(provenance_json(config, registry, AS_CONFIGURED)))),
    };
    let mut s = String::new();
    match (sample.min(), sample.max(), sample.argmin()) {
        (Some(lo), Some(hi), Some((iu, iv))) => {
            let p = plane.point(iu, iv);
            let _ = writeln!(
                s,
                "min {:.6} neV at [{:.4}, {:.4}, {:.4}] um, max {:.6} neV, {} local minima, {} masked",
                lo / NEV,
                p[0] / UM,
                p[1] / UM,
                p[2] / UM,
                hi / NEV,
                sample.local_minima().len(),
                sample.masked_count()
            );
        }
        _ => {
            let _ = writeln!(s, "all {} samples masked", sample.masked_count());
        }
    }
    Ok(Output { stdout: s, files: vec![file] })
}

#[cfg(test)]
mod tests {
    use super::*;

    const WIRE: &str = r#"
[atom]
species = "Li"

[mirror]
kind = "evanescent"
barrier_height = "1 ueV"
decay_length = "0.1 um"
detuning = "1000 linewidths"

[layout.wire]
linear_density = "0.33 pC_per_cm"

[analysis.report]
"#;

    #[test]
    fn report_contains_provenance_and_row() {
        let c = ExperimentConfig::parse(WIRE).unwrap();
        let out = run(&c, &ConstantsRegistry::builtin(), Format::Text).unwrap();
        assert!(out.stdout.contains("# convention: ground-state size"));
        assert!(out.stdout.contains("polarizability_volume = \"24.3 A3\""));
        assert!(out.stdout.contains("0.33 pC_per_cm"));
        assert_eq!(out.files[0].0, "report.json");
    }

    #[test]
    fn mirror_only_is_no_trap() {
        let t = WIRE.replace(
            "[layout.wire]\nlinear_density = \"0.33 pC_per_cm\"",
            "[layout.wire]\nlinear_density = \"0 pC_per_cm\"",
        );
        let c = ExperimentConfig::parse(&t).unwrap();
        let err = run(&c, &ConstantsRegistry::builtin(), Format::Text).unwrap_err();
        assert_eq!(exit_code(&err), EXIT_NO_TRAP);
        assert!(err.to_string().contains("no interior minimum"));
    }

    #[test]
    fn zero_states_give_an_empty_spectrum() {
        let t = WIRE.replace("[analysis.report]", "[analysis.spectrum]\nn_states = 0");
        let c = ExperimentConfig::parse(&t).unwrap();
        let out = run(&c, &ConstantsRegistry::builtin(), Format::Json).unwrap();
        let v: serde_json::Value = serde_json::from_str(&out.stdout).unwrap();
        assert_eq!(v["energies"].as_array().unwrap().len(), 0);
        assert_eq!(v["bound_count"], 0);
    }

    #[test]
    fn zero_area_plane_is_a_config_error() {
        let t = WIRE.replace(
            "[analysis.report]",
            "[analysis.contour]\norigin = [\"0.3 um\", \"-1 um\", \"0 um\"]\naxis_u = [0.0, 1.0, 0.0]\naxis_v = [1.0, 0.0, 0.0]\nextent = [\"0 um\", \"1 um\"]\nresolution = [10, 10]",
        );
        let c = ExperimentConfig::parse(&t).unwrap();
        let err = run(&c, &ConstantsRegistry::builtin(), Format::Text).unwrap_err();
        assert_eq!(exit_code(&err), EXIT_CONFIG);
    }
}
