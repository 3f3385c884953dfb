use serde_json::Value;
use surftrap_web::{cross_section_json, line_cut_json, report_json};

fn parse(s: String) -> Value {
    serde_json::from_str(&s).unwrap()
}

#[test]
fn every_preset_combination_reports_a_trap() {
    for atom in ["Li", "Rb"] {
        for (layout, charge) in [("wire", "1.05"), ("dot", "10000")] {
            let p = format!(r#"{{"atom": "{atom}", "mirror": "magnetic", "layout": "{layout}", "charge": {charge}}}"#);
            let v = parse(report_json(&p).unwrap());
            assert!(v["depth_neV"].as_f64().unwrap() < 0.0, "{p}");
            assert!(v["scattering_kHz"].is_null());
        }
    }
}

#[test]
fn plot_windows_share_the_trap_minimum() {
    let p = r#"{"atom": "Li", "mirror": "evanescent", "layout": "dot", "charge": 141}"#;
    let plane = parse(cross_section_json(p, 3.0, 40).unwrap());
    let cut = parse(line_cut_json(p, 3.0, 100).unwrap());
    assert_eq!(plane["min_neV"], cut["min_neV"]);
    assert_eq!(plane["n_range_um"][0], cut["n_um"][0]);
}
