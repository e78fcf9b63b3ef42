//! Run configuration: a declarative TOML file plus flag overrides.
//!
//! Flags win over file values; file values win over the built-in defaults,
//! which reproduce the standard grids and batch sizes used by the
//! acceptance suite. Unknown fields anywhere in the file are rejected.

use std::path::PathBuf;

use anyhow::{Context, Result};
use serde::Deserialize;

use bellcheck::error::Error as CoreError;
use bellcheck::exponent::Exponent;
use bellcheck::grid::{GridSpec, Spacing};
use bellcheck::report::ToleranceProfile;
use bellcheck::semigroup::{BatteryConfig, FunctionSpec};

/// Invalid user input. Distinguished from mathematical failures so `main`
/// can map it to exit code 2.
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
pub struct ConfigError(pub String);

fn bad(msg: impl Into<String>) -> anyhow::Error {
    ConfigError(msg.into()).into()
}

/// The file half of the configuration. Every field is optional; the
/// resolved `RunConfig` fills the gaps with defaults.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub p_list: Option<Vec<f64>>,
    pub grid: Option<String>,
    pub seed: Option<u64>,
    pub samples: Option<u64>,
    pub steps: Option<usize>,
    pub dims: Option<Vec<usize>>,
    pub out: Option<PathBuf>,
    pub format: Option<String>,
    pub tolerance_profile: Option<String>,
    pub leaves: Option<usize>,
    pub leaf_samples: Option<usize>,
    pub semigroup: Option<SemigroupSection>,
}

/// Overrides for the heat-semigroup battery, plus optional custom cases.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SemigroupSection {
    pub half_width: Option<f64>,
    pub grid_points: Option<usize>,
    pub t_min: Option<f64>,
    pub t_max: Option<f64>,
    pub points_per_decade: Option<usize>,
    /// Named function shapes referenced by `cases`.
    #[serde(default)]
    pub functions: Vec<FunctionSpec>,
    /// Custom (f, g, p) combinations; empty means the standard battery.
    #[serde(default)]
    pub cases: Vec<CaseRef>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CaseRef {
    pub name: String,
    pub f: String,
    pub g: String,
    pub p: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

/// A fully resolved run: defaults ← file ← flags, validated.
pub struct RunConfig {
    pub p_list: Vec<Exponent>,
    pub grid: GridSpec,
    pub seed: u64,
    /// `None` means each command applies its own default count.
    pub samples: Option<u64>,
    pub steps: usize,
    pub dims: Vec<usize>,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub tolerance_name: &'static str,
    pub tolerance: ToleranceProfile,
    pub leaves: usize,
    pub leaf_samples: usize,
    pub battery: BatteryConfig,
    pub custom_functions: Vec<FunctionSpec>,
    pub custom_cases: Vec<(String, String, String, f64)>,
}

/// Flag values as collected by clap; `None` means "not given".
#[derive(Debug, Default)]
pub struct Overrides {
    pub p: Vec<f64>,
    pub grid: Option<String>,
    pub seed: Option<u64>,
    pub samples: Option<u64>,
    pub out: Option<PathBuf>,
    pub format: Option<String>,
    pub tolerance_profile: Option<String>,
    pub config: Option<PathBuf>,
}

/// The exponent list exercised by the full verification sweep.
pub const VERIFY_P_LIST: [f64; 11] = [1.1, 1.25, 1.5, 1.75, 1.9, 2.0, 2.1, 2.5, 3.0, 4.0, 8.0];

/// Exponents for simulation and foliation runs (both regimes plus p = 2).
pub const SIM_P_LIST: [f64; 3] = [1.5, 2.0, 3.0];

pub fn resolve(cmd: &str, flags: &Overrides) -> Result<RunConfig> {
    let file: FileConfig = match &flags.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading config file {}", path.display()))
                .map_err(|e| bad(format!("{e:#}")))?;
            toml::from_str(&text).map_err(|e| bad(format!("config file: {e}")))?
        }
        None => FileConfig::default(),
    };

    let raw_p: Vec<f64> = if !flags.p.is_empty() {
        flags.p.clone()
    } else if let Some(list) = file.p_list.clone() {
        list
    } else if cmd == "verify" {
        VERIFY_P_LIST.to_vec()
    } else {
        SIM_P_LIST.to_vec()
    };
    if raw_p.is_empty() {
        return Err(bad("p list is empty"));
    }
    let p_list = raw_p
        .iter()
        .map(|&p| Exponent::new(p))
        .collect::<Result<Vec<_>, CoreError>>()
        .map_err(|e| bad(format!("--p: {e}")))?;

    let grid_text = flags.grid.clone().or(file.grid);
    let grid = match grid_text {
        Some(text) => parse_grid(&text)?,
        None => GridSpec::standard(),
    };

    let format = match flags.format.clone().or(file.format).as_deref() {
        None | Some("json") => Format::Json,
        Some("csv") => Format::Csv,
        Some(other) => return Err(bad(format!("unknown format {other:?} (json or csv)"))),
    };

    let (tolerance_name, tolerance) = match flags
        .tolerance_profile
        .clone()
        .or(file.tolerance_profile)
        .as_deref()
    {
        None | Some("standard") => ("standard", ToleranceProfile::standard()),
        Some("strict") => ("strict", ToleranceProfile::strict()),
        Some("relaxed") => ("relaxed", ToleranceProfile::relaxed()),
        Some(other) => {
            return Err(bad(format!(
                "unknown tolerance profile {other:?} (standard, strict, relaxed)"
            )))
        }
    };

    let dims = file.dims.unwrap_or_else(|| vec![1, 2, 3]);
    if dims.is_empty() || dims.iter().any(|&d| d == 0 || d > 8) {
        return Err(bad("dims must be nonempty with entries in 1..=8"));
    }

    let sg = file.semigroup.unwrap_or_default();
    let defaults = BatteryConfig::default();
    let battery = BatteryConfig {
        half_width: sg.half_width.unwrap_or(defaults.half_width),
        grid_points: sg.grid_points.unwrap_or(defaults.grid_points),
        t_min: sg.t_min.unwrap_or(defaults.t_min),
        t_max: sg.t_max.unwrap_or(defaults.t_max),
        points_per_decade: sg.points_per_decade.unwrap_or(defaults.points_per_decade),
    };
    for case in &sg.cases {
        for name in [&case.f, &case.g] {
            if !sg.functions.iter().any(|f| &f.name == name) {
                return Err(bad(format!(
                    "case {:?} references undefined function {name:?}",
                    case.name
                )));
            }
        }
        Exponent::new(case.p).map_err(|e| bad(format!("case {:?}: {e}", case.name)))?;
    }

    Ok(RunConfig {
        p_list,
        grid,
        seed: flags.seed.or(file.seed).unwrap_or(0),
        samples: flags.samples.or(file.samples),
        steps: file.steps.unwrap_or(50),
        dims,
        out: flags.out.clone().or(file.out),
        format,
        tolerance_name,
        tolerance,
        leaves: file.leaves.unwrap_or(20),
        leaf_samples: file.leaf_samples.unwrap_or(20),
        battery,
        custom_functions: sg.functions,
        custom_cases: sg
            .cases
            .into_iter()
            .map(|c| (c.name, c.f, c.g, c.p))
            .collect(),
    })
}

/// Grid syntax: `N:log:lo,hi` or `NxN:log:lo,hi` (square grids only),
/// spacing `log` or `linear`, range applied to both axes.
pub fn parse_grid(text: &str) -> Result<GridSpec> {
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() != 3 {
        return Err(bad(format!(
            "grid {text:?} should look like 64x64:log:1e-3,1e3"
        )));
    }
    let dims: Vec<&str> = parts[0].split('x').collect();
    let n: usize = dims[0]
        .parse()
        .map_err(|_| bad(format!("grid size {:?} is not a number", dims[0])))?;
    match dims.len() {
        1 => {}
        2 => {
            let m: usize = dims[1]
                .parse()
                .map_err(|_| bad(format!("grid size {:?} is not a number", dims[1])))?;
            if m != n {
                return Err(bad(format!(
                    "grids are square; got {n}x{m}"
                )));
            }
        }
        _ => return Err(bad(format!("grid size {:?} is malformed", parts[0]))),
    }
    let spacing = match parts[1] {
        "log" => Spacing::Log,
        "linear" => Spacing::Linear,
        other => return Err(bad(format!("unknown spacing {other:?} (log or linear)"))),
    };
    let range: Vec<&str> = parts[2].split(',').collect();
    if range.len() != 2 {
        return Err(bad(format!("grid range {:?} should be lo,hi", parts[2])));
    }
    let lo: f64 = range[0]
        .parse()
        .map_err(|_| bad(format!("grid bound {:?} is not a number", range[0])))?;
    let hi: f64 = range[1]
        .parse()
        .map_err(|_| bad(format!("grid bound {:?} is not a number", range[1])))?;
    GridSpec::new((lo, hi), (lo, hi), n, spacing).map_err(|e| bad(e.to_string()))
}
