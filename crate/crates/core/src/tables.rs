//! Side-by-side reproduction of the published wire and dot tables.
//!
//! The printed cells ship as an embedded data file. Charges are calibrated
//! with one scale factor per table, chosen so that the computed distance of
//! the calibration row equals the printed one.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::config::{toml_error, MirrorConfig};
use crate::error::{Error, Result};
use crate::field::ChargeElement;
use crate::potential::PotentialStack;
use crate::species::{AtomSpecies, ConstantsRegistry};
use crate::trap::{self, AxisLabel, SearchBox, TrapReport};
use crate::units::{Dimension, Quantity, KHZ, NEV, UM};
use crate::Vec3;

const PUBLISHED_TABLES: &str = include_str!("../data/published_tables.toml");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TableLayout {
    Wire,
    Dot,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableMeta {
    pub id: u32,
    pub layout: TableLayout,
    /// Column header as printed.
    pub charge_header: String,
    /// Unit the printed charge is read in.
    pub charge_unit: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PublishedRow {
    pub table: u32,
    pub atom: String,
    pub mirror: String,
    pub charge: String,
    pub depth: String,
    pub distance: String,
    pub freq_n: String,
    pub freq_t: String,
    pub size_n: String,
    pub size_t: String,
    pub scattering: String,
    #[serde(default)]
    pub calibration: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PublishedTables {
    pub mirrors: BTreeMap<String, MirrorConfig>,
    pub tables: Vec<TableMeta>,
    pub rows: Vec<PublishedRow>,
}

/// Compared quantities in the printed column order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Column {
    Depth,
    Distance,
    FreqN,
    FreqT,
    SizeN,
    SizeT,
    Scattering,
}

impl Column {
    pub const ALL: [Column; 7] = [
        Column::Depth,
        Column::Distance,
        Column::FreqN,
        Column::FreqT,
        Column::SizeN,
        Column::SizeT,
        Column::Scattering,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Column::Depth => "depth [neV]",
            Column::Distance => "distance [um]",
            Column::FreqN => "nu_n [kHz]",
            Column::FreqT => "nu_t [kHz]",
            Column::SizeN => "sigma_n [um]",
            Column::SizeT => "sigma_t [um]",
            Column::Scattering => "scat. [kHz]",
        }
    }

    /// SI value of one printed unit.
    fn unit(self) -> f64 {
        match self {
            Column::Depth => NEV,
            Column::Distance | Column::SizeN | Column::SizeT => UM,
            Column::FreqN | Column::FreqT | Column::Scattering => KHZ,
        }
    }
}

pub fn published_tables() -> PublishedTables {
    toml::from_str(PUBLISHED_TABLES)
        .map_err(|e| toml_error(PUBLISHED_TABLES, &e))
        .expect("embedded table data is valid")
}

impl PublishedRow {
    pub fn cell(&self, col: Column) -> &str {
        match col {
            Column::Depth => &self.depth,
            Column::Distance => &self.distance,
            Column::FreqN => &self.freq_n,
            Column::FreqT => &self.freq_t,
            Column::SizeN => &self.size_n,
            Column::SizeT => &self.size_t,
            Column::Scattering => &self.scattering,
        }
    }

    /// Printed value in SI units, `None` for an empty cell.
    pub fn published_value(&self, col: Column) -> Option<f64> {
        self.cell(col).trim().parse::<f64>().ok().map(|v| v * col.unit())
    }
}

impl PublishedTables {
    pub fn table(&self, id: u32) -> Result<&TableMeta> {
        self.tables
            .iter()
            .find(|t| t.id == id)
            .ok_or_else(|| Error::Config(format!("no table {id} in the table data")))
    }

    pub fn rows_of(&self, id: u32) -> impl Iterator<Item = &PublishedRow> {
        self.rows.iter().filter(move |r| r.table == id)
    }

    /// Printed charge of `row` in SI units.
    pub fn charge(&self, row: &PublishedRow) -> Result<f64> {
        let meta = self.table(row.table)?;
        let q = Quantity::new(
            row.charge.trim().parse().map_err(|_| Error::Config(format!("bad charge cell `{}`", row.charge)))?,
            meta.charge_unit.clone(),
        );
        let dim = match meta.layout {
            TableLayout::Wire => Dimension::LinearChargeDensity,
            TableLayout::Dot => Dimension::Charge,
        };
        q.si(dim)
    }

    /// Potential stack of `row` with its charge multiplied by `scale`.
    pub fn stack(&self, row: &PublishedRow, scale: f64) -> Result<PotentialStack> {
        let meta = self.table(row.table)?;
        let mirror = self
            .mirrors
            .get(&row.mirror)
            .ok_or_else(|| Error::Config(format!("unknown mirror `{}`", row.mirror)))?;
        let q = scale * self.charge(row)?;
        let element = match meta.layout {
            TableLayout::Wire => ChargeElement::infinite_line(Vec3::zeros(), Vec3::new(0.0, 0.0, 1.0), q)?,
            TableLayout::Dot => ChargeElement::point(Vec3::zeros(), q)?,
        };
        PotentialStack::new(mirror.resolve()?, vec![element])
    }
}

fn distance(tables: &PublishedTables, row: &PublishedRow, atom: &AtomSpecies, scale: f64) -> Result<f64> {
    let stack = tables.stack(row, scale)?;
    let min = trap::find_minimum(&stack, atom, &SearchBox::for_mirror(&stack.mirror))?;
    Ok(min[0])
}

/// Charge scale for table `id` that puts the calibration row's minimum at
/// the printed distance.
pub fn calibrate(tables: &PublishedTables, id: u32, registry: &ConstantsRegistry) -> Result<f64> {
    let row = tables
        .rows_of(id)
        .find(|r| r.calibration)
        .ok_or_else(|| Error::Config(format!("table {id} has no calibration row")))?;
    let atom = registry.species(&row.atom)?;
    let target = row
        .published_value(Column::Distance)
        .ok_or_else(|| Error::Config("calibration row has no distance".into()))?;
    // distance falls with charge; a failed search below the bracket midpoint
    // means the trap moved out of the box, above it that it collapsed
    let (mut lo, mut hi) = (0.1f64.ln(), 10f64.ln());
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        let too_far = match distance(tables, row, &atom, mid.exp()) {
            Ok(d) => d > target,
            Err(Error::NoTrap) => mid < 0.0,
            Err(e) => return Err(e),
        };
        if too_far {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let scale = (0.5 * (lo + hi)).exp();
    if !(0.11..9.0).contains(&scale) {
        return Err(Error::Numerics(format!("calibration of table {id} left its bracket (scale {scale})")));
    }
    Ok(scale)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RowResult {
    pub row: PublishedRow,
    /// Charge actually used, SI
    pub charge: f64,
    pub report: std::result::Result<TrapReport, String>,
}

impl RowResult {
    pub fn computed(&self, col: Column) -> Option<f64> {
        let r = self.report.as_ref().ok()?;
        match col {
            Column::Depth => Some(r.depth),
            Column::Distance => Some(r.distance_to_surface),
            Column::FreqN => r.frequency(AxisLabel::N),
            Column::FreqT => r.frequency(AxisLabel::T),
            Column::SizeN => r.ground_size(AxisLabel::N),
            Column::SizeT => r.ground_size(AxisLabel::T),
            Column::Scattering => r.scattering_rate,
        }
    }

    /// computed / printed, when both exist.
    pub fn ratio(&self, col: Column) -> Option<f64> {
        Some(self.computed(col)? / self.row.published_value(col)?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TablesRun {
    /// Charge scale per table id; 1 when uncalibrated.
    pub scales: BTreeMap<u32, f64>,
    pub rows: Vec<RowResult>,
}

/// Computes every row of both tables.
pub fn reproduce(registry: &ConstantsRegistry, calibrated: bool) -> Result<TablesRun> {
    let tables = published_tables();
    let mut scales = BTreeMap::new();
    for meta in &tables.tables {
        let s = if calibrated { calibrate(&tables, meta.id, registry)? } else { 1.0 };
        scales.insert(meta.id, s);
    }
    let mut rows = Vec::with_capacity(tables.rows.len());
    for row in &tables.rows {
        let scale = scales[&row.table];
        let atom = registry.species(&row.atom)?;
        let stack = tables.stack(row, scale)?;
        let report = trap::analyze(&stack, &atom, &SearchBox::for_mirror(&stack.mirror)).map_err(|e| e.to_string());
        rows.push(RowResult { row: row.clone(), charge: scale * tables.charge(row)?, report });
    }
    Ok(TablesRun { scales, rows })
}

impl TablesRun {
    pub fn to_text(&self) -> String {
        let tables = published_tables();
        let mut s = String::new();
        for meta in &tables.tables {
            let scale = self.scales.get(&meta.id).copied().unwrap_or(1.0);
            let _ = writeln!(
                s,
                "table {} ({:?}, printed charge [{}] read as {}), charge scale {:.6}",
                meta.id, meta.layout, meta.charge_header, meta.charge_unit, scale
            );
            for r in self.rows.iter().filter(|r| r.row.table == meta.id) {
                let _ = writeln!(
                    s,
                    "\n{} {} mirror, charge {} -> {:.6}{}",
                    r.row.atom,
                    r.row.mirror,
                    r.row.charge,
                    scale * r.row.charge.parse::<f64>().unwrap_or(f64::NAN),
                    if r.row.calibration { " (calibration row)" } else { "" }
                );
                if let Err(e) = &r.report {
                    let _ = writeln!(s, "  failed: {e}");
                    continue;
                }
                let _ = writeln!(s, "  {:<14} {:>10} {:>12} {:>8}", "column", "printed", "computed", "ratio");
                for col in Column::ALL {
                    let computed = r.computed(col).map_or("-".to_string(), |v| format!("{:.4}", v / col.unit()));
                    let ratio = r.ratio(col).map_or("-".to_string(), |v| format!("{v:.3}"));
                    let _ = writeln!(s, "  {:<14} {:>10} {:>12} {:>8}", col.label(), r.row.cell(col), computed, ratio);
                }
            }
            let _ = writeln!(s);
        }
        s
    }
}
