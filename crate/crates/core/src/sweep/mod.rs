//! Frequency and decoherence sweeps behind the command-line front end:
//! configuration, sweep execution and result emission.

mod config;
mod emit;
mod presets;
mod run;

use std::path::PathBuf;

use serde::Serialize;

use crate::model::{DriveProtocol, Frame, NetworkSpec};
use crate::router::RouterSpec;

pub use config::{parse_config, KNOWN_KEYS};
pub use emit::{
    emit_results, fmt_num, line_plot_svg, parse_csv, render_csv, render_svg, write_all, CsvRow, Curve, Format, CSV_HEADER,
};
pub use presets::{preset, preset_text, PRESET_NAMES};
pub use run::{run_decoherence_sweep, run_evolve, run_frequency_sweep, EvolveResult, SweepPoint};

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scenario {
    CouplingDrive,
    FieldDrive,
    Router,
    ResonanceTable,
    Multipartite,
}

impl Scenario {
    pub const ALL: [(&'static str, Scenario); 5] = [
        ("coupling-drive", Scenario::CouplingDrive),
        ("field-drive", Scenario::FieldDrive),
        ("router", Scenario::Router),
        ("resonance-table", Scenario::ResonanceTable),
        ("multipartite", Scenario::Multipartite),
    ];

    pub fn name(self) -> &'static str {
        Scenario::ALL.iter().find(|(_, s)| *s == self).map(|(n, _)| *n).unwrap()
    }

    pub fn is_drive(self) -> bool {
        matches!(self, Scenario::CouplingDrive | Scenario::FieldDrive)
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AxisKind {
    OmegaD,
    Lambda,
}

impl AxisKind {
    pub fn name(self) -> &'static str {
        match self {
            AxisKind::OmegaD => "omega_d",
            AxisKind::Lambda => "lambda",
        }
    }
}

/// The single swept parameter and its strictly increasing grid.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepAxis {
    pub kind: AxisKind,
    pub values: Vec<f64>,
}

/// Parameter that labels separate curves of one sweep.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "parameter", content = "values", rename_all = "snake_case")]
pub enum Series {
    Single,
    Gamma(Vec<f64>),
    Lambda(Vec<f64>),
}

/// Unit in which dephasing rates are given.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RateUnit {
    Absolute,
    /// Multiples of the coupling scale `max(J₀, J₁)`.
    Coupling,
}

#[derive(Copy, Clone, Debug, PartialEq, Serialize)]
pub struct Integration {
    pub samples: usize,
    pub steps_per_period: f64,
    pub frame: Frame,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OutputSpec {
    pub dir: PathBuf,
    pub formats: Vec<Format>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepConfig {
    pub scenario: Scenario,
    /// Network with the first series value of `γ` when γ is the series.
    pub network: NetworkSpec,
    pub drive: DriveProtocol,
    pub axis: SweepAxis,
    pub series: Series,
    /// Dephasing rate when it is neither swept nor a series.
    pub lambda: f64,
    pub lambda_unit: RateUnit,
    /// Site pair whose concurrence is tracked.
    pub pair: (usize, usize),
    pub integration: Integration,
    pub output: OutputSpec,
    pub seed: u64,
    pub router: Option<RouterSpec>,
    pub multipartite: Option<Multipartite>,
    pub max_order: u32,
    /// Free-form provenance notes echoed into the manifest.
    pub notes: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Multipartite {
    pub amplitudes: Vec<f64>,
    pub labels: Vec<String>,
}

impl SweepConfig {
    /// Absolute dephasing rate for a value given in the configured unit.
    pub fn absolute_rate(&self, value: f64) -> f64 {
        match self.lambda_unit {
            RateUnit::Absolute => value,
            RateUnit::Coupling => value * self.drive.coupling_scale(),
        }
    }
}

/// One curve of a sweep.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SeriesResult {
    pub label: String,
    pub gamma: f64,
    /// Dephasing rate in the configured unit.
    pub lambda: f64,
    pub points: Vec<SweepPoint>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Metadata {
    pub code_version: String,
    pub scenario: Scenario,
    pub axis: AxisKind,
    pub config: SweepConfig,
    pub step_size_bound: f64,
    pub window: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepResult {
    pub axis: AxisKind,
    pub series: Vec<SeriesResult>,
    pub metadata: Metadata,
}

impl SweepResult {
    pub fn row_count(&self) -> usize {
        self.series.iter().map(|s| s.points.len()).sum()
    }

    /// The curve for a given anisotropy or dephasing label.
    pub fn series_by_label(&self, label: &str) -> Option<&SeriesResult> {
        self.series.iter().find(|s| s.label == label)
    }
}
