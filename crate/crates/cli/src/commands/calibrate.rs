use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use tailsim_core::calibration::{
    build_substrate, drag_reduction, fit_fluidization, fit_penetration, mean_shear, speed_from_mocap,
    speed_improvement, AreaStiffness, CalibrationSet, FitFlag, PenetrationFit, ShearRig, DEFAULT_PENETRATION_WINDOW,
    DEFAULT_SHEAR_WINDOW,
};
use tailsim_core::units::{CM, CM2, CM_PER_S, N_PER_CM};
use tailsim_core::DkModel;

use super::parse_window;
use crate::error::{CliError, CliResult};
use crate::output::{input_hashes, TOOL_NAME, TOOL_VERSION};
use crate::schema::{load, read_json, to_json_string, BodyFile, InputFile, SubstrateFile, SCHEMA_VERSION};
use crate::traces::{read_mocap, read_penetration, read_shear};
use crate::{CalibrateKind, Report};

fn input_file(path: &Path) -> CliResult<InputFile> {
    let bytes = fs::read(path).map_err(|e| CliError::input_at(path, None, format!("cannot read: {e}")))?;
    Ok(InputFile {
        path: path.to_path_buf(),
        bytes,
    })
}

fn generator() -> String {
    format!("{TOOL_NAME} {TOOL_VERSION}")
}

fn window_to_cm((lo, hi): (f64, f64)) -> [Option<f64>; 2] {
    let f = |x: f64| x.is_finite().then_some(x / CM);
    [f(lo), f(hi)]
}

fn window_from_cm((lo, hi): (f64, f64)) -> (f64, f64) {
    (lo * CM, hi * CM)
}

fn cm_window_arg(arg: Option<&str>, default_si: (f64, f64)) -> CliResult<(f64, f64)> {
    match arg {
        None => Ok(default_si),
        Some(text) => {
            let d = (default_si.0 / CM, default_si.1 / CM);
            Ok(window_from_cm(parse_window(text, d)?))
        }
    }
}

/// Emits `value` to `out`, or returns it for stdout.
fn emit<T: Serialize>(value: &T, out: Option<&PathBuf>, summary: String) -> CliResult<Report> {
    let text = to_json_string(value)?;
    match out {
        Some(path) => {
            if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(dir).map_err(|e| CliError::io(format!("creating {}", dir.display()), e))?;
            }
            fs::write(path, &text).map_err(|e| CliError::io(format!("writing {}", path.display()), e))?;
            Ok(Report {
                stdout: summary,
                files: vec![path.clone()],
            })
        }
        None => Ok(Report {
            stdout: text,
            files: vec![],
        }),
    }
}

#[derive(Debug, Serialize)]
pub struct PenetrationFitOut {
    pub k_z_n_per_cm: f64,
    pub residual_rms_n: f64,
    pub relative_residual: f64,
    pub samples: usize,
    pub free_slope_n_per_cm: f64,
    pub free_intercept_n: f64,
    pub flags: Vec<FitFlag>,
}

impl From<&PenetrationFit> for PenetrationFitOut {
    fn from(f: &PenetrationFit) -> Self {
        Self {
            k_z_n_per_cm: f.k_z / N_PER_CM,
            residual_rms_n: f.residual_rms,
            relative_residual: f.relative_residual,
            samples: f.samples,
            free_slope_n_per_cm: f.free_slope / N_PER_CM,
            free_intercept_n: f.free_intercept,
            flags: f.flags.clone(),
        }
    }
}

#[derive(Debug, Serialize)]
struct PenetrationOut {
    schema_version: u32,
    generator: String,
    inputs: Vec<String>,
    window_cm: [Option<f64>; 2],
    #[serde(flatten)]
    idle: PenetrationFitOut,
    #[serde(skip_serializing_if = "Option::is_none")]
    osc: Option<PenetrationFitOut>,
    #[serde(skip_serializing_if = "Option::is_none")]
    dk_n_per_cm: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    warning: Option<String>,
}

fn penetration(input: &Path, osc: Option<&Path>, window: Option<&str>, out: Option<&PathBuf>) -> CliResult<Report> {
    let window = cm_window_arg(window, DEFAULT_PENETRATION_WINDOW)?;
    let mut inputs = vec![input_file(input)?];
    let idle_trace = read_penetration(input)?;
    let (idle, osc_fit, dk, warning) = match osc {
        None => (fit_penetration(&idle_trace, window)?, None, None, None),
        Some(p) => {
            inputs.push(input_file(p)?);
            let osc_trace = read_penetration(p)?;
            let f = fit_fluidization(&idle_trace, &osc_trace, window)?;
            let warning = f
                .stiffer_when_oscillating
                .then(|| "oscillating trace is stiffer than idle (negative reduction)".to_string());
            (
                f.idle.clone(),
                Some(PenetrationFitOut::from(&f.osc)),
                Some(f.dk / N_PER_CM),
                warning,
            )
        }
    };
    let summary = format!(
        "k_z = {} N/cm{}\n",
        idle.k_z / N_PER_CM,
        dk.map(|d| format!(", dk = {d} N/cm")).unwrap_or_default()
    );
    let value = PenetrationOut {
        schema_version: SCHEMA_VERSION,
        generator: generator(),
        inputs: input_hashes(&inputs),
        window_cm: window_to_cm(window),
        idle: PenetrationFitOut::from(&idle),
        osc: osc_fit,
        dk_n_per_cm: dk,
        warning,
    };
    emit(&value, out, summary)
}

#[derive(Debug, Serialize)]
struct ShearOut {
    schema_version: u32,
    generator: String,
    inputs: Vec<String>,
    window_cm: [Option<f64>; 2],
    mean_idle_n: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    mean_osc_n: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    drag_reduction: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    rho_s: Option<f64>,
}

fn shear(idle: &Path, osc: Option<&Path>, window: Option<&str>, out: Option<&PathBuf>) -> CliResult<Report> {
    let window = cm_window_arg(window, DEFAULT_SHEAR_WINDOW)?;
    let mut inputs = vec![input_file(idle)?];
    let mean_idle = mean_shear(&read_shear(idle)?, window)?;
    let mut value = ShearOut {
        schema_version: SCHEMA_VERSION,
        generator: generator(),
        inputs: vec![],
        window_cm: window_to_cm(window),
        mean_idle_n: mean_idle,
        mean_osc_n: None,
        drag_reduction: None,
        rho_s: None,
    };
    if let Some(p) = osc {
        inputs.push(input_file(p)?);
        let mean_osc = mean_shear(&read_shear(p)?, window)?;
        let red = drag_reduction(mean_idle, mean_osc)?;
        value.mean_osc_n = Some(mean_osc);
        value.drag_reduction = Some(red);
        value.rho_s = Some(1.0 - red);
    }
    value.inputs = input_hashes(&inputs);
    let summary = format!(
        "mean shear (idle) = {mean_idle} N{}\n",
        value
            .drag_reduction
            .map(|r| format!(", drag reduction = {r}"))
            .unwrap_or_default()
    );
    emit(&value, out, summary)
}

#[derive(Debug, Serialize)]
struct SpeedOut {
    schema_version: u32,
    generator: String,
    inputs: Vec<String>,
    v_cm_s: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    v_osc_cm_s: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    eta: Option<f64>,
}

fn speed(input: &Path, osc: Option<&Path>, out: Option<&PathBuf>) -> CliResult<Report> {
    let mut inputs = vec![input_file(input)?];
    let v = speed_from_mocap(&read_mocap(input)?)?;
    let (v_osc, eta) = match osc {
        None => (None, None),
        Some(p) => {
            inputs.push(input_file(p)?);
            let vo = speed_from_mocap(&read_mocap(p)?)?;
            (Some(vo / CM_PER_S), Some(speed_improvement(v, vo)?))
        }
    };
    let value = SpeedOut {
        schema_version: SCHEMA_VERSION,
        generator: generator(),
        inputs: input_hashes(&inputs),
        v_cm_s: v / CM_PER_S,
        v_osc_cm_s: v_osc,
        eta,
    };
    let summary = format!(
        "v_x = {} cm/s{}\n",
        value.v_cm_s,
        eta.map(|e| format!(", eta = {e}")).unwrap_or_default()
    );
    emit(&value, out, summary)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManifestPenetration {
    pub area_cm2: f64,
    pub idle: PathBuf,
    #[serde(default)]
    pub osc: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManifestShear {
    pub idle: PathBuf,
    pub osc: PathBuf,
    #[serde(default)]
    pub window_cm: Option<[f64; 2]>,
    /// Depth at which the rig held the body, cm.
    pub rig_depth_cm: f64,
    /// Body profile file for the rig.
    pub rig_body: PathBuf,
}

/// Inputs for `calibrate substrate`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CalibrationManifest {
    #[serde(default = "default_version")]
    pub schema_version: u32,
    #[serde(default)]
    pub dk_model: DkModel,
    #[serde(default)]
    pub penetration_window_cm: Option<[f64; 2]>,
    pub penetration: Vec<ManifestPenetration>,
    pub shear: ManifestShear,
}

fn default_version() -> u32 {
    SCHEMA_VERSION
}

fn substrate(manifest_path: &Path, out: Option<&PathBuf>) -> CliResult<Report> {
    let m: CalibrationManifest = read_json(manifest_path)?;
    if m.schema_version != SCHEMA_VERSION {
        return Err(CliError::input_at(
            manifest_path,
            None,
            format!("unsupported schema_version {}", m.schema_version),
        ));
    }
    let base = manifest_path.parent().unwrap_or(Path::new("."));
    let resolve = |p: &Path| if p.is_absolute() { p.to_path_buf() } else { base.join(p) };
    let pen_window = m
        .penetration_window_cm
        .map(|[a, b]| window_from_cm((a, b)))
        .unwrap_or(DEFAULT_PENETRATION_WINDOW);

    let mut summary = String::new();
    let mut areas = Vec::new();
    for entry in &m.penetration {
        let idle = fit_penetration(&read_penetration(&resolve(&entry.idle))?, pen_window)?;
        let osc = match &entry.osc {
            Some(p) => Some(fit_penetration(&read_penetration(&resolve(p))?, pen_window)?),
            None => None,
        };
        summary.push_str(&format!(
            "A = {} cm2: k_idle = {} N/cm{}\n",
            entry.area_cm2,
            idle.k_z / N_PER_CM,
            osc.as_ref()
                .map(|o| format!(", k_osc = {} N/cm", o.k_z / N_PER_CM))
                .unwrap_or_default()
        ));
        areas.push(AreaStiffness {
            area: entry.area_cm2 * CM2,
            idle: idle.k_z,
            osc: osc.map(|o| o.k_z),
        });
    }

    let sh = &m.shear;
    let shear_window = sh
        .window_cm
        .map(|[a, b]| window_from_cm((a, b)))
        .unwrap_or(DEFAULT_SHEAR_WINDOW);
    let mean_idle = mean_shear(&read_shear(&resolve(&sh.idle))?, shear_window)?;
    let mean_osc = mean_shear(&read_shear(&resolve(&sh.osc))?, shear_window)?;
    let profile = load::<BodyFile>(&resolve(&sh.rig_body))?.to_profile()?;
    summary.push_str(&format!("mean shear idle = {mean_idle} N, osc = {mean_osc} N\n"));

    let substrate = build_substrate(&CalibrationSet {
        areas,
        shear: ShearRig {
            mean_idle,
            mean_osc,
            profile,
            depth: sh.rig_depth_cm * CM,
        },
        dk_model: m.dk_model,
    })?;
    let file = SubstrateFile::from_substrate(&substrate);
    summary.push_str(&format!(
        "cz = {} N/cm per cm2, ks = {} N/cm3, rho_s = {}\n",
        file.cz_n_per_cm_per_cm2, file.ks_n_per_cm3, file.rho_s
    ));
    match out {
        Some(_) => emit(&file, out, summary),
        None => Ok(Report {
            stdout: to_json_string(&file)?,
            files: vec![],
        }),
    }
}

pub fn run(kind: CalibrateKind) -> CliResult<Report> {
    match kind {
        CalibrateKind::Penetration {
            input,
            osc,
            window_cm,
            out,
        } => penetration(&input, osc.as_deref(), window_cm.as_deref(), out.as_ref()),
        CalibrateKind::Shear {
            idle,
            osc,
            window_cm,
            out,
        } => shear(&idle, osc.as_deref(), window_cm.as_deref(), out.as_ref()),
        CalibrateKind::Speed { input, osc, out } => speed(&input, osc.as_deref(), out.as_ref()),
        CalibrateKind::Substrate { manifest, out } => substrate(&manifest, out.as_ref()),
    }
}
