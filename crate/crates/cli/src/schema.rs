//! JSON file schemas.
//!
//! Files carry cm-based units and a `schema_version` (currently 1); each
//! schema converts to and from the SI domain types at load/save time.

use std::fs;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use tailsim_core::units::{CM, CM2, N_PER_CM, N_PER_CM3, N_PER_CM_PER_CM2};
use tailsim_core::{BodyProfile, DkModel, Fluidization, Oscillation, RobotParams, Substrate, TailGeometry};

use crate::error::{CliError, CliResult};

pub const SCHEMA_VERSION: u32 = 1;

fn default_schema_version() -> u32 {
    SCHEMA_VERSION
}

fn check_version(path: &Path, v: u32) -> CliResult<()> {
    if v != SCHEMA_VERSION {
        return Err(CliError::input_at(
            path,
            None,
            format!("unsupported schema_version {v} (expected {SCHEMA_VERSION})"),
        ));
    }
    Ok(())
}

/// Reads and parses a JSON file, reporting the line of any syntax or
/// schema error.
pub fn read_json<T: DeserializeOwned>(path: &Path) -> CliResult<T> {
    let text = fs::read_to_string(path).map_err(|e| CliError::input_at(path, None, format!("cannot read: {e}")))?;
    serde_json::from_str(&text).map_err(|e| CliError::input_at(path, Some(e.line() as u64), e.to_string()))
}

pub fn to_json_string<T: Serialize>(value: &T) -> CliResult<String> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| CliError::Internal(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FluidizationFile {
    pub dk_small_n_per_cm: f64,
    pub a_small_cm2: f64,
    pub dk_large_n_per_cm: f64,
    pub a_large_cm2: f64,
    #[serde(default)]
    pub model: DkModel,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SubstrateFile {
    #[serde(default = "default_schema_version")]
    pub schema_version: u32,
    pub cz_n_per_cm_per_cm2: f64,
    pub ks_n_per_cm3: f64,
    #[serde(default = "default_rho_s")]
    pub rho_s: f64,
    pub fluidization: FluidizationFile,
}

fn default_rho_s() -> f64 {
    Substrate::DEFAULT_RHO_S
}

impl SubstrateFile {
    pub fn from_substrate(s: &Substrate) -> Self {
        let f = s.fluidization();
        Self {
            schema_version: SCHEMA_VERSION,
            cz_n_per_cm_per_cm2: s.cz() / N_PER_CM_PER_CM2,
            ks_n_per_cm3: s.ks() / N_PER_CM3,
            rho_s: s.rho_s(),
            fluidization: FluidizationFile {
                dk_small_n_per_cm: f.dk_small() / N_PER_CM,
                a_small_cm2: f.a_small() / CM2,
                dk_large_n_per_cm: f.dk_large() / N_PER_CM,
                a_large_cm2: f.a_large() / CM2,
                model: f.model(),
            },
        }
    }

    pub fn to_substrate(&self) -> CliResult<Substrate> {
        let f = &self.fluidization;
        let fl = Fluidization::new(
            f.dk_small_n_per_cm * N_PER_CM,
            f.a_small_cm2 * CM2,
            f.dk_large_n_per_cm * N_PER_CM,
            f.a_large_cm2 * CM2,
            f.model,
        )
        .map_err(tailsim_core::ModelError::from)?;
        Ok(Substrate::new(
            self.cz_n_per_cm_per_cm2 * N_PER_CM_PER_CM2,
            self.ks_n_per_cm3 * N_PER_CM3,
            self.rho_s,
            fl,
        )
        .map_err(tailsim_core::ModelError::from)?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RobotFile {
    #[serde(default = "default_schema_version")]
    pub schema_version: u32,
    pub mass_kg: f64,
    #[serde(default = "default_gravity")]
    pub gravity_m_s2: f64,
    #[serde(default = "default_body_length")]
    pub body_length_cm: f64,
    #[serde(default = "default_flipper_speed")]
    pub flipper_speed_rpm: f64,
    #[serde(default = "default_flipper_size")]
    pub flipper_size_cm: [f64; 2],
    #[serde(default = "default_rear_fraction")]
    pub rear_load_fraction: f64,
}

fn default_gravity() -> f64 {
    9.81
}
fn default_body_length() -> f64 {
    20.0
}
fn default_flipper_speed() -> f64 {
    60.0
}
fn default_flipper_size() -> [f64; 2] {
    [6.0, 4.0]
}
fn default_rear_fraction() -> f64 {
    0.5
}

impl RobotFile {
    pub fn to_robot(&self) -> CliResult<RobotParams> {
        Ok(RobotParams::new(
            self.mass_kg,
            self.gravity_m_s2,
            self.body_length_cm * CM,
            self.flipper_speed_rpm,
            [self.flipper_size_cm[0] * CM, self.flipper_size_cm[1] * CM],
            self.rear_load_fraction,
        )
        .map_err(tailsim_core::ModelError::from)?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BodyFile {
    #[serde(default = "default_schema_version")]
    pub schema_version: u32,
    /// `[depth_cm, width_cm]` pairs.
    pub knots_cm: Vec<[f64; 2]>,
}

impl BodyFile {
    pub fn to_profile(&self) -> CliResult<BodyProfile> {
        let knots = self.knots_cm.iter().map(|[z, w]| (z * CM, w * CM)).collect();
        Ok(BodyProfile::new(knots).map_err(tailsim_core::ModelError::from)?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TailEntry {
    pub area_cm2: f64,
    #[serde(default = "default_tail_height")]
    pub height_cm: f64,
    #[serde(default)]
    pub label: Option<String>,
}

fn default_tail_height() -> f64 {
    TailGeometry::DEFAULT_HEIGHT / CM
}

impl TailEntry {
    pub fn to_tail(&self) -> CliResult<TailGeometry> {
        let label = self.label.clone().unwrap_or_else(|| format!("A{}", self.area_cm2));
        Ok(TailGeometry::new(self.area_cm2 * CM2, self.height_cm * CM, label)
            .map_err(tailsim_core::ModelError::from)?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TailsFile {
    #[serde(default = "default_schema_version")]
    pub schema_version: u32,
    pub tails: Vec<TailEntry>,
}

/// Tails given inline by area, or as a path to a [`TailsFile`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TailsSpec {
    Areas {
        areas_cm2: Vec<f64>,
        #[serde(default = "default_tail_height")]
        height_cm: f64,
    },
    File(PathBuf),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeFile {
    #[serde(default = "default_freq")]
    pub freq_hz: f64,
    #[serde(default = "default_amplitude")]
    pub amplitude_deg: f64,
}

fn default_freq() -> f64 {
    5.0
}
fn default_amplitude() -> f64 {
    60.0
}

impl Default for ModeFile {
    fn default() -> Self {
        Self {
            freq_hz: default_freq(),
            amplitude_deg: default_amplitude(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverFile {
    #[serde(default = "default_crossover_tol")]
    pub crossover_tol_cm2: f64,
}

fn default_crossover_tol() -> f64 {
    tailsim_core::codesign::DEFAULT_AREA_TOL / CM2
}

impl Default for SolverFile {
    fn default() -> Self {
        Self {
            crossover_tol_cm2: default_crossover_tol(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GaitFile {
    #[serde(default)]
    pub front_depth_cm: f64,
    #[serde(default)]
    pub thrust_cap_n: Option<f64>,
    #[serde(default)]
    pub stride_cm: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfigFile {
    #[serde(default = "default_schema_version")]
    pub schema_version: u32,
    pub substrate: PathBuf,
    pub robot: PathBuf,
    pub body: PathBuf,
    pub tails: TailsSpec,
    /// Co-design sweep `START:STOP:STEP` in cm²; defaults to the tails.
    #[serde(default)]
    pub area_range_cm2: Option<String>,
    #[serde(default)]
    pub mode: ModeFile,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    #[serde(default)]
    pub solver: SolverFile,
    #[serde(default)]
    pub gait: GaitFile,
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}
fn default_epsilon() -> f64 {
    tailsim_core::codesign::DEFAULT_EPSILON
}

/// A file read as input, kept for provenance hashing.
#[derive(Debug, Clone, PartialEq)]
pub struct InputFile {
    pub path: PathBuf,
    pub bytes: Vec<u8>,
}

/// Fully loaded and validated run configuration, in SI units.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub substrate: Substrate,
    pub robot: RobotParams,
    pub body: BodyProfile,
    pub tails: Vec<TailGeometry>,
    pub area_range_cm2: Option<String>,
    pub oscillation: Oscillation,
    pub output_dir: PathBuf,
    pub epsilon: f64,
    /// m².
    pub crossover_tol: f64,
    pub gait: tailsim_core::gait::GaitConfig,
    /// Every file read, config first.
    pub inputs: Vec<InputFile>,
}

fn load_versioned<T>(path: &Path, inputs: &mut Vec<InputFile>) -> CliResult<T>
where
    T: DeserializeOwned + HasVersion,
{
    let bytes = fs::read(path).map_err(|e| CliError::input_at(path, None, format!("cannot read: {e}")))?;
    let value: T =
        serde_json::from_slice(&bytes).map_err(|e| CliError::input_at(path, Some(e.line() as u64), e.to_string()))?;
    check_version(path, value.version())?;
    inputs.push(InputFile {
        path: path.to_path_buf(),
        bytes,
    });
    Ok(value)
}

pub trait HasVersion {
    fn version(&self) -> u32;
}

macro_rules! has_version {
    ($($t:ty),*) => {$(
        impl HasVersion for $t {
            fn version(&self) -> u32 { self.schema_version }
        }
    )*};
}
has_version!(SubstrateFile, RobotFile, BodyFile, TailsFile, RunConfigFile);

/// Loads a versioned file on its own.
pub fn load<T: DeserializeOwned + HasVersion>(path: &Path) -> CliResult<T> {
    load_versioned(path, &mut Vec::new())
}

impl RunConfig {
    /// Loads `path` and every file it references. Relative paths resolve
    /// against the config file's directory.
    pub fn load(path: &Path) -> CliResult<Self> {
        let mut inputs = Vec::new();
        let cfg: RunConfigFile = load_versioned(path, &mut inputs)?;
        let base = path.parent().unwrap_or(Path::new("."));
        let resolve = |p: &Path| if p.is_absolute() { p.to_path_buf() } else { base.join(p) };

        let substrate = load_versioned::<SubstrateFile>(&resolve(&cfg.substrate), &mut inputs)?.to_substrate()?;
        let robot = load_versioned::<RobotFile>(&resolve(&cfg.robot), &mut inputs)?.to_robot()?;
        let body = load_versioned::<BodyFile>(&resolve(&cfg.body), &mut inputs)?.to_profile()?;
        let tails = match &cfg.tails {
            TailsSpec::Areas { areas_cm2, height_cm } => areas_cm2
                .iter()
                .map(|&a| {
                    TailEntry {
                        area_cm2: a,
                        height_cm: *height_cm,
                        label: None,
                    }
                    .to_tail()
                })
                .collect::<CliResult<Vec<_>>>()?,
            TailsSpec::File(p) => load_versioned::<TailsFile>(&resolve(p), &mut inputs)?
                .tails
                .iter()
                .map(TailEntry::to_tail)
                .collect::<CliResult<Vec<_>>>()?,
        };
        if tails.is_empty() {
            return Err(CliError::input_at(path, None, "tail list is empty"));
        }

        let oscillation =
            Oscillation::new(cfg.mode.freq_hz, cfg.mode.amplitude_deg).map_err(tailsim_core::ModelError::from)?;
        if !(cfg.epsilon.is_finite() && cfg.epsilon >= 0.0) {
            return Err(CliError::input_at(
                path,
                None,
                format!("epsilon must be >= 0, got {}", cfg.epsilon),
            ));
        }
        let tol = cfg.solver.crossover_tol_cm2;
        if !(tol.is_finite() && tol > 0.0) {
            return Err(CliError::input_at(
                path,
                None,
                format!("solver.crossover_tol_cm2 must be > 0, got {tol}"),
            ));
        }

        let mut gait = tailsim_core::gait::GaitConfig::new(body.clone());
        gait.front_depth = cfg.gait.front_depth_cm * CM;
        gait.thrust_cap = cfg.gait.thrust_cap_n;
        gait.stride_per_cycle = cfg.gait.stride_cm.map(|s| s * CM);

        Ok(Self {
            substrate,
            robot,
            body,
            tails,
            area_range_cm2: cfg.area_range_cm2.clone(),
            oscillation,
            output_dir: resolve(&cfg.output_dir),
            epsilon: cfg.epsilon,
            crossover_tol: tol * CM2,
            gait,
            inputs,
        })
    }
}
