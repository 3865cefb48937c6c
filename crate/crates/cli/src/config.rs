//! Run configuration: JSON file, `--set` overrides, defaults.
//!
//! Precedence is flags > file > defaults. A parsed configuration
//! re-serializes identically (all defaults materialized), which keeps runs
//! reproducible from the echoed copy in the summary.

use serde::{Deserialize, Serialize};

use landau_core::model::{FourierMode, PotentialSpec};
use landau_core::qll::SolverOptions;
use landau_core::manybody::GroundStateOptions;
use landau_core::{Grid, Result, TorusConfig};

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct TorusSection {
    pub length: f64,
    pub degeneracy: usize,
    pub hbar: f64,
    pub filled_levels: usize,
    pub particles: usize,
}

impl Default for TorusSection {
    fn default() -> Self {
        Self { length: 1.0, degeneracy: 4, hbar: 1.0, filled_levels: 1, particles: 6 }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct GridSection {
    pub size: usize,
}

impl Default for GridSection {
    fn default() -> Self {
        Self { size: 256 }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct TruncationSection {
    pub tolerance: f64,
}

impl Default for TruncationSection {
    fn default() -> Self {
        Self { tolerance: 1e-13 }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct BasisSection {
    pub n_max: usize,
}

impl Default for BasisSection {
    fn default() -> Self {
        Self { n_max: 3 }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum PotentialSection {
    Zero,
    Cosine { amplitude: f64 },
    Fourier { modes: Vec<ModeSection> },
    GaussianPeriodic { amplitude: f64, width: f64 },
}

impl Default for PotentialSection {
    fn default() -> Self {
        Self::Zero
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ModeSection {
    pub kx: i32,
    pub ky: i32,
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

impl PotentialSection {
    pub fn to_spec(&self) -> PotentialSpec {
        match self {
            PotentialSection::Zero => PotentialSpec::Zero,
            PotentialSection::Cosine { amplitude } => {
                PotentialSpec::Cosine { amplitude: *amplitude }
            }
            PotentialSection::Fourier { modes } => PotentialSpec::Fourier {
                modes: modes
                    .iter()
                    .map(|m| FourierMode { kx: m.kx, ky: m.ky, re: m.re, im: m.im })
                    .collect(),
            },
            PotentialSection::GaussianPeriodic { amplitude, width } => {
                PotentialSpec::GaussianPeriodic { amplitude: *amplitude, width: *width }
            }
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct LocalizerSection {
    /// `null` means the default scale `d^{1/4}`.
    pub lambda: Option<f64>,
    /// Phase-space level cut for Husimi tables.
    pub n_cut: usize,
}

impl Default for LocalizerSection {
    fn default() -> Self {
        Self { lambda: None, n_cut: 3 }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct SolverSection {
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for SolverSection {
    fn default() -> Self {
        let d = SolverOptions::default();
        Self { tolerance: d.tolerance, max_iterations: d.max_iterations }
    }
}

impl SolverSection {
    pub fn to_options(&self) -> SolverOptions {
        SolverOptions { tolerance: self.tolerance, max_iterations: self.max_iterations }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct EdSection {
    pub n_max: usize,
    pub dimension_budget: usize,
    pub dense_cutoff: usize,
    pub max_lanczos_iterations: usize,
    pub residual_tolerance: f64,
    /// Optional `(degeneracy, particles)` sweep; a single run uses the
    /// torus section when absent.
    pub sweep: Option<Vec<(usize, usize)>>,
    pub save_state: bool,
}

impl Default for EdSection {
    fn default() -> Self {
        let g = GroundStateOptions::default();
        Self {
            n_max: 3,
            dimension_budget: 100_000,
            dense_cutoff: g.dense_cutoff,
            max_lanczos_iterations: g.max_lanczos_iterations,
            residual_tolerance: g.residual_tolerance,
            sweep: None,
            save_state: false,
        }
    }
}

impl EdSection {
    pub fn to_options(&self) -> GroundStateOptions {
        GroundStateOptions {
            dense_cutoff: self.dense_cutoff,
            max_lanczos_iterations: self.max_lanczos_iterations,
            residual_tolerance: self.residual_tolerance,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct ProjectorSection {
    pub levels: Vec<usize>,
    pub degeneracies: Vec<usize>,
}

impl Default for ProjectorSection {
    fn default() -> Self {
        Self { levels: vec![0, 1], degeneracies: vec![8, 16, 32, 64] }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSection {
    pub heatmaps: bool,
}

#[allow(clippy::derivable_impls)]
impl Default for OutputSection {
    fn default() -> Self {
        Self { heatmaps: false }
    }
}

/// The full run configuration.
#[derive(Clone, Debug, Default, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub torus: TorusSection,
    pub grid: GridSection,
    pub truncation: TruncationSection,
    pub basis: BasisSection,
    pub potential: PotentialSection,
    pub interaction: PotentialSection,
    pub localizer: LocalizerSection,
    pub solver: SolverSection,
    pub ed: EdSection,
    pub projector: ProjectorSection,
    pub output: OutputSection,
}

/// Errors before any artifact is written; parse problems exit with
/// code 2.
#[derive(Debug)]
pub enum LoadError {
    Parse(String),
}

impl RunConfig {
    /// Loads a config file (or defaults when `path` is `None`) and applies
    /// `--set key.path=value` overrides.
    pub fn load(path: Option<&std::path::Path>, overrides: &[String]) -> std::result::Result<Self, LoadError> {
        let mut value: serde_json::Value = match path {
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .map_err(|e| LoadError::Parse(format!("cannot read {}: {e}", p.display())))?;
                serde_json::from_str(&text)
                    .map_err(|e| LoadError::Parse(format!("invalid JSON in {}: {e}", p.display())))?
            }
            None => serde_json::json!({}),
        };
        for item in overrides {
            apply_override(&mut value, item).map_err(LoadError::Parse)?;
        }
        let config: RunConfig = serde_json::from_value(value)
            .map_err(|e| LoadError::Parse(format!("invalid configuration: {e}")))?;
        Ok(config)
    }

    pub fn torus_config(&self) -> Result<TorusConfig> {
        TorusConfig::new(
            self.torus.length,
            self.torus.degeneracy,
            self.torus.hbar,
            self.torus.filled_levels,
            self.torus.particles,
        )
    }

    pub fn grid_config(&self) -> Result<Grid> {
        Grid::new(self.grid.size, self.torus.length)
    }

    #[cfg_attr(not(test), allow(dead_code))]
    pub fn canonical_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }
}

/// Applies one `key.path=value` override into the raw JSON tree.
fn apply_override(root: &mut serde_json::Value, item: &str) -> std::result::Result<(), String> {
    let Some((path, raw)) = item.split_once('=') else {
        return Err(format!("override '{item}' is not of the form key.path=value"));
    };
    let parsed: serde_json::Value = serde_json::from_str(raw)
        .unwrap_or_else(|_| serde_json::Value::String(raw.to_string()));
    let mut cursor = root;
    let parts: Vec<&str> = path.split('.').collect();
    for (i, part) in parts.iter().enumerate() {
        if !cursor.is_object() {
            return Err(format!("override path '{path}' crosses a non-object"));
        }
        let map = cursor.as_object_mut().expect("checked");
        if i + 1 == parts.len() {
            map.insert((*part).to_string(), parsed);
            return Ok(());
        }
        cursor = map
            .entry((*part).to_string())
            .or_insert_with(|| serde_json::json!({}));
    }
    Err(format!("empty override path in '{item}'"))
}
