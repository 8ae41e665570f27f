//! Fitting substrate parameters and summary statistics from experimental
//! force and motion-capture traces.

use serde::Serialize;

use crate::error::{ModelError, Result, ValidationError};
use crate::shear::depth_moment;
use crate::terrain::{BodyProfile, DkModel, Fluidization, ForceTrace, MocapTrace, Substrate, TraceKind};

/// Penetration fits skip the first 0.5 cm where the tail is still engaging
/// the surface.
pub const DEFAULT_PENETRATION_WINDOW: (f64, f64) = (0.005, f64::INFINITY);

/// Shear averages run from 2.5 cm to 17.5 cm of displacement.
pub const DEFAULT_SHEAR_WINDOW: (f64, f64) = (0.025, 0.175);

pub const MIN_FIT_SAMPLES: usize = 10;

/// Residual RMS above this fraction of the RMS force marks a poor fit.
const POOR_FIT_RATIO: f64 = 0.2;
/// Free intercept above this fraction of the peak force marks a preload.
const PRELOAD_RATIO: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FitFlag {
    NegativeSlope,
    PoorFit,
    PreloadOffset,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PenetrationFit {
    /// Slope through the origin, N/m.
    pub k_z: f64,
    /// RMS of the through-origin residuals, N.
    pub residual_rms: f64,
    /// `residual_rms` over the RMS force in the window.
    pub relative_residual: f64,
    pub samples: usize,
    /// Ordinary least-squares slope with a free intercept, N/m.
    pub free_slope: f64,
    /// Intercept of the free fit, N.
    pub free_intercept: f64,
    pub flags: Vec<FitFlag>,
}

fn check_window((low, high): (f64, f64)) -> Result<()> {
    if low.is_nan() || high.is_nan() || low >= high {
        return Err(ValidationError::new("window", format!("need low < high, got ({low}, {high})")).into());
    }
    Ok(())
}

/// Least-squares `force = k_z * depth` over samples with depth in `depth_window`.
pub fn fit_penetration(trace: &ForceTrace, depth_window: (f64, f64)) -> Result<PenetrationFit> {
    if trace.kind() != TraceKind::Penetration {
        return Err(ModelError::WrongTraceKind {
            expected: "penetration",
        });
    }
    check_window(depth_window)?;
    let (lo, hi) = depth_window;
    let pts: Vec<(f64, f64)> = trace
        .samples()
        .iter()
        .filter(|s| s.position >= lo && s.position <= hi)
        .map(|s| (s.position, s.force))
        .collect();
    let n = pts.len();
    if n < MIN_FIT_SAMPLES {
        return Err(ModelError::InsufficientData {
            needed: MIN_FIT_SAMPLES,
            got: n,
        });
    }

    let sxx: f64 = pts.iter().map(|(x, _)| x * x).sum();
    let sxy: f64 = pts.iter().map(|(x, y)| x * y).sum();
    if sxx == 0.0 {
        return Err(ValidationError::new("trace", "all depths in the window are zero").into());
    }
    let k_z = sxy / sxx;
    let nf = n as f64;
    let residual_rms = (pts.iter().map(|(x, y)| (y - k_z * x).powi(2)).sum::<f64>() / nf).sqrt();
    let force_rms = (pts.iter().map(|(_, y)| y * y).sum::<f64>() / nf).sqrt();
    let relative_residual = if force_rms > 0.0 { residual_rms / force_rms } else { 0.0 };

    let mx = pts.iter().map(|(x, _)| x).sum::<f64>() / nf;
    let my = pts.iter().map(|(_, y)| y).sum::<f64>() / nf;
    let cxx: f64 = pts.iter().map(|(x, _)| (x - mx).powi(2)).sum();
    let cxy: f64 = pts.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let (free_slope, free_intercept) = if cxx > 0.0 {
        let b = cxy / cxx;
        (b, my - b * mx)
    } else {
        (0.0, my)
    };

    let peak = pts.iter().map(|(_, y)| y.abs()).fold(0.0, f64::max);
    let mut flags = Vec::new();
    if k_z <= 0.0 {
        flags.push(FitFlag::NegativeSlope);
    }
    if relative_residual > POOR_FIT_RATIO {
        flags.push(FitFlag::PoorFit);
    }
    if peak > 0.0 && free_intercept.abs() > PRELOAD_RATIO * peak {
        flags.push(FitFlag::PreloadOffset);
    }

    Ok(PenetrationFit {
        k_z,
        residual_rms,
        relative_residual,
        samples: n,
        free_slope,
        free_intercept,
        flags,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FluidizationFit {
    /// `k_z(idle) - k_z(osc)`, N/m. Negative when the oscillating bed was stiffer.
    pub dk: f64,
    pub idle: PenetrationFit,
    pub osc: PenetrationFit,
    /// Set when `dk < 0`.
    pub stiffer_when_oscillating: bool,
}

pub fn fit_fluidization(idle: &ForceTrace, osc: &ForceTrace, depth_window: (f64, f64)) -> Result<FluidizationFit> {
    let idle = fit_penetration(idle, depth_window)?;
    let osc = fit_penetration(osc, depth_window)?;
    let dk = idle.k_z - osc.k_z;
    Ok(FluidizationFit {
        dk,
        stiffer_when_oscillating: dk < 0.0,
        idle,
        osc,
    })
}

/// Displacement-weighted mean force over `window` (trapezoidal in
/// displacement, so independent of the sampling rate in time).
pub fn mean_shear(trace: &ForceTrace, window: (f64, f64)) -> Result<f64> {
    if trace.kind() != TraceKind::Shear {
        return Err(ModelError::WrongTraceKind { expected: "shear" });
    }
    check_window(window)?;
    if let Some(index) = trace.first_position_reversal() {
        return Err(ModelError::NonMonotoneTrace { index });
    }
    let s = trace.samples();
    let (lo, hi) = window;
    let (min, max) = match (s.first(), s.last()) {
        (Some(a), Some(b)) => (a.position, b.position),
        _ => {
            return Err(ModelError::InsufficientData { needed: 2, got: 0 });
        }
    };
    if lo < min || hi > max {
        return Err(ModelError::WindowOutOfRange {
            low: lo,
            high: hi,
            min,
            max,
        });
    }

    let mut area = 0.0;
    for w in s.windows(2) {
        let (s0, f0, s1, f1) = (w[0].position, w[0].force, w[1].position, w[1].force);
        if s1 <= s0 || s1 <= lo || s0 >= hi {
            continue;
        }
        let at = |x: f64| f0 + (f1 - f0) * (x - s0) / (s1 - s0);
        let (a, b) = (s0.max(lo), s1.min(hi));
        area += 0.5 * (at(a) + at(b)) * (b - a);
    }
    Ok(area / (hi - lo))
}

/// Fractional drag reduction `1 - osc / idle`. Negative means more drag.
pub fn drag_reduction(mean_idle: f64, mean_osc: f64) -> Result<f64> {
    if !(mean_idle > 0.0) {
        return Err(ModelError::DegenerateBaseline { value: mean_idle });
    }
    Ok(1.0 - mean_osc / mean_idle)
}

/// Forward speed (m/s): least-squares slope of x against time.
pub fn speed_from_mocap(trace: &MocapTrace) -> Result<f64> {
    let s = trace.samples();
    if s.len() < 2 {
        return Err(ModelError::InsufficientData {
            needed: 2,
            got: s.len(),
        });
    }
    let n = s.len() as f64;
    let mt = s.iter().map(|p| p.time).sum::<f64>() / n;
    let mx = s.iter().map(|p| p.x).sum::<f64>() / n;
    let ctt: f64 = s.iter().map(|p| (p.time - mt).powi(2)).sum();
    let ctx: f64 = s.iter().map(|p| (p.time - mt) * (p.x - mx)).sum();
    if ctt <= 0.0 {
        return Err(ModelError::InsufficientData { needed: 2, got: 1 });
    }
    Ok(ctx / ctt)
}

/// Relative speed gain η = (v_osc − v_idle) / v_idle.
pub fn speed_improvement(v_idle: f64, v_osc: f64) -> Result<f64> {
    if !(v_idle > 0.0) {
        return Err(ModelError::DegenerateBaseline { value: v_idle });
    }
    Ok((v_osc - v_idle) / v_idle)
}

/// Penetration stiffness measured for one tail area.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AreaStiffness {
    /// m².
    pub area: f64,
    /// Idle k_z, N/m.
    pub idle: f64,
    /// Oscillating k_z, N/m, if measured.
    pub osc: Option<f64>,
}

/// Shear-rig measurement: mean body drag in each mode with the body held at
/// a fixed depth.
#[derive(Debug, Clone, PartialEq)]
pub struct ShearRig {
    pub mean_idle: f64,
    pub mean_osc: f64,
    pub profile: BodyProfile,
    /// m.
    pub depth: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CalibrationSet {
    pub areas: Vec<AreaStiffness>,
    pub shear: ShearRig,
    pub dk_model: DkModel,
}

/// Assembles a [`Substrate`] from per-area stiffness fits and a shear-rig pair.
///
/// * `cz`: slope of idle k_z against area through the origin.
/// * Δk: idle minus oscillating k_z at the smallest and largest area that
///   has both.
/// * `rho_s`: oscillating over idle mean drag. The rig holds depth fixed, so
///   the ratio is a pure strength ratio.
/// * `ks`: idle mean drag over the rig profile's depth moment.
pub fn build_substrate(cal: &CalibrationSet) -> Result<Substrate> {
    let areas = &cal.areas;
    if areas.len() < 2 {
        return Err(ModelError::InsufficientData {
            needed: 2,
            got: areas.len(),
        });
    }
    for (i, a) in areas.iter().enumerate() {
        if !(a.area > 0.0) {
            return Err(ValidationError::new("area", format!("entry {i} must be > 0, got {}", a.area)).into());
        }
        if areas[..i].iter().any(|b| b.area == a.area) {
            return Err(ValidationError::new("area", format!("duplicate area {}", a.area)).into());
        }
    }

    let saa: f64 = areas.iter().map(|a| a.area * a.area).sum();
    let sak: f64 = areas.iter().map(|a| a.area * a.idle).sum();
    let cz = sak / saa;
    if !(cz > 0.0) {
        return Err(ModelError::InconsistentCalibration(format!(
            "stiffness density must be positive, got {cz}"
        )));
    }

    let mut with_osc: Vec<(f64, f64)> = areas
        .iter()
        .filter_map(|a| a.osc.map(|k| (a.area, a.idle - k)))
        .collect();
    if with_osc.len() < 2 {
        return Err(ModelError::InsufficientData {
            needed: 2,
            got: with_osc.len(),
        });
    }
    with_osc.sort_by(|a, b| a.0.total_cmp(&b.0));
    let (a_small, dk_small) = with_osc[0];
    let (a_large, dk_large) = with_osc[with_osc.len() - 1];
    if dk_small < 0.0 || dk_large < 0.0 {
        return Err(ModelError::InconsistentCalibration(format!(
            "oscillation stiffened the bed (dk_small = {dk_small}, dk_large = {dk_large})"
        )));
    }
    let fluidization = Fluidization::new(dk_small, a_small, dk_large, a_large, cal.dk_model)?;

    let rig = &cal.shear;
    let reduction = drag_reduction(rig.mean_idle, rig.mean_osc)?;
    let rho_s = 1.0 - reduction;
    if !(rho_s > 0.0 && rho_s <= 1.0) {
        return Err(ModelError::InconsistentCalibration(format!(
            "fluidization shear ratio must lie in (0, 1], got {rho_s}"
        )));
    }
    let moment = depth_moment(&rig.profile, rig.depth)?;
    if !(moment > 0.0) {
        return Err(ModelError::InconsistentCalibration(
            "shear rig profile has no submerged width".into(),
        ));
    }
    let ks = rig.mean_idle / moment;

    Ok(Substrate::new(cz, ks, rho_s, fluidization)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::terrain::{ForceSample, MocapSample};
    use crate::units::{CM, CM2, N_PER_CM};

    fn trace(kind: TraceKind, n: usize, max_pos: f64, f: impl Fn(f64) -> f64) -> ForceTrace {
        let samples = (0..n)
            .map(|i| {
                let p = max_pos * i as f64 / (n - 1) as f64;
                ForceSample {
                    time: i as f64 * 0.01,
                    position: p,
                    force: f(p),
                }
            })
            .collect();
        ForceTrace::new(kind, samples).unwrap()
    }

    #[test]
    fn exact_penetration_fit() {
        let t = trace(TraceKind::Penetration, 100, 4.0 * CM, |d| 1.5 * N_PER_CM * d);
        let fit = fit_penetration(&t, DEFAULT_PENETRATION_WINDOW).unwrap();
        assert!((fit.k_z - 150.0).abs() < 1e-9);
        assert!(fit.residual_rms < 1e-9);
        assert!(fit.flags.is_empty());
        assert!(fit.free_intercept.abs() < 1e-9);
    }

    #[test]
    fn constant_force_is_flagged() {
        let t = trace(TraceKind::Penetration, 100, 4.0 * CM, |_| 3.0);
        let fit = fit_penetration(&t, DEFAULT_PENETRATION_WINDOW).unwrap();
        assert!(fit.relative_residual > POOR_FIT_RATIO);
        assert!(fit.flags.contains(&FitFlag::PoorFit));
        assert!(fit.flags.contains(&FitFlag::PreloadOffset));
    }

    #[test]
    fn negative_slope_is_flagged() {
        let t = trace(TraceKind::Penetration, 50, 4.0 * CM, |d| -10.0 * d);
        let fit = fit_penetration(&t, DEFAULT_PENETRATION_WINDOW).unwrap();
        assert!(fit.flags.contains(&FitFlag::NegativeSlope));
    }

    #[test]
    fn penetration_fit_needs_data_and_kind() {
        let t = trace(TraceKind::Penetration, 8, 4.0 * CM, |d| d);
        assert!(matches!(
            fit_penetration(&t, (0.0, 1.0)),
            Err(ModelError::InsufficientData { needed: 10, got: 8 })
        ));
        let s = trace(TraceKind::Shear, 50, 0.18, |d| d);
        assert!(matches!(
            fit_penetration(&s, (0.0, 1.0)),
            Err(ModelError::WrongTraceKind { .. })
        ));
    }

    #[test]
    fn fluidization_examples() {
        let idle = trace(TraceKind::Penetration, 50, 4.0 * CM, |d| 200.0 * d);
        let osc = trace(TraceKind::Penetration, 50, 4.0 * CM, |d| 149.0 * d);
        let f = fit_fluidization(&idle, &osc, DEFAULT_PENETRATION_WINDOW).unwrap();
        assert!((f.dk - 51.0).abs() < 1e-9);
        assert!(!f.stiffer_when_oscillating);

        let same = fit_fluidization(&idle, &idle, DEFAULT_PENETRATION_WINDOW).unwrap();
        assert_eq!(same.dk, 0.0);

        let rev = fit_fluidization(&osc, &idle, DEFAULT_PENETRATION_WINDOW).unwrap();
        assert!(rev.dk < 0.0 && rev.stiffer_when_oscillating);
    }

    #[test]
    fn mean_shear_examples() {
        let c = trace(TraceKind::Shear, 181, 18.0 * CM, |_| 2.0);
        assert!((mean_shear(&c, DEFAULT_SHEAR_WINDOW).unwrap() - 2.0).abs() < 1e-12);

        let (lo, hi) = DEFAULT_SHEAR_WINDOW;
        let ramp = trace(TraceKind::Shear, 181, 18.0 * CM, |s| 4.0 * (s - lo) / (hi - lo));
        assert!((mean_shear(&ramp, DEFAULT_SHEAR_WINDOW).unwrap() - 2.0).abs() < 1e-12);

        let err = mean_shear(&c, (0.0, 20.0 * CM)).unwrap_err();
        assert!(matches!(err, ModelError::WindowOutOfRange { .. }));
        assert!(mean_shear(&c, (0.1, 0.05)).is_err());
    }

    #[test]
    fn mean_shear_rejects_reversing_displacement() {
        let samples = [0.0, 0.1, 0.05, 0.2]
            .iter()
            .enumerate()
            .map(|(i, &p)| ForceSample {
                time: i as f64,
                position: p,
                force: 1.0,
            })
            .collect();
        let t = ForceTrace::new(TraceKind::Shear, samples).unwrap();
        assert!(matches!(
            mean_shear(&t, (0.0, 0.2)),
            Err(ModelError::NonMonotoneTrace { index: 2 })
        ));
    }

    #[test]
    fn reduction_and_improvement() {
        assert!((drag_reduction(1.0, 0.54).unwrap() - 0.46).abs() < 1e-15);
        assert_eq!(drag_reduction(2.0, 2.0).unwrap(), 0.0);
        assert!(drag_reduction(1.0, 1.3).unwrap() < 0.0);
        assert!(matches!(
            drag_reduction(0.0, 1.0),
            Err(ModelError::DegenerateBaseline { .. })
        ));

        assert!((speed_improvement(5.9, 6.9).unwrap() - 0.169_491_5).abs() < 1e-6);
        assert_eq!(speed_improvement(5.9, 5.9).unwrap(), 0.0);
        assert!(speed_improvement(5.9, 5.0).unwrap() < 0.0);
        assert!(speed_improvement(0.0, 1.0).is_err());
    }

    #[test]
    fn speed_examples() {
        let m = |v: f64| {
            let s = (0..200)
                .map(|i| {
                    let t = i as f64 / 120.0;
                    MocapSample {
                        time: t,
                        x: v * t,
                        y: 0.0,
                        z: 0.0,
                        pitch: 0.0,
                        tail_z: None,
                    }
                })
                .collect();
            MocapTrace::new(s).unwrap()
        };
        assert!((speed_from_mocap(&m(0.05)).unwrap() - 0.05).abs() < 1e-12);
        assert_eq!(speed_from_mocap(&m(0.0)).unwrap(), 0.0);
    }

    fn rig() -> ShearRig {
        ShearRig {
            mean_idle: 1.0,
            mean_osc: 0.54,
            profile: BodyProfile::constant(10.0 * CM, 5.0 * CM).unwrap(),
            depth: 1.0 * CM,
        }
    }

    #[test]
    fn build_substrate_noiseless() {
        let areas = vec![
            AreaStiffness {
                area: 2.0 * CM2,
                idle: 40.0,
                osc: Some(5.0),
            },
            AreaStiffness {
                area: 16.0 * CM2,
                idle: 320.0,
                osc: Some(269.0),
            },
        ];
        let s = build_substrate(&CalibrationSet {
            areas,
            shear: rig(),
            dk_model: DkModel::Constant,
        })
        .unwrap();
        assert!((s.cz() - 2e5).abs() / 2e5 < 1e-12);
        assert!((s.rho_s() - 0.54).abs() < 1e-12);
        assert!((s.fluidization().dk_small() - 35.0).abs() < 1e-9);
        assert!((s.fluidization().dk_large() - 51.0).abs() < 1e-9);
        // 1 N = ks * w * d^2 / 2 with w = 0.1 m, d = 0.01 m.
        assert!((s.ks() - 1.0 / (0.1 * 1e-4 / 2.0)).abs() / s.ks() < 1e-12);
    }

    #[test]
    fn build_substrate_rejects_bad_shear_ratio() {
        let areas = vec![
            AreaStiffness {
                area: 2.0 * CM2,
                idle: 40.0,
                osc: Some(5.0),
            },
            AreaStiffness {
                area: 16.0 * CM2,
                idle: 320.0,
                osc: Some(269.0),
            },
        ];
        let mut shear = rig();
        shear.mean_osc = 1.2;
        let err = build_substrate(&CalibrationSet {
            areas,
            shear,
            dk_model: DkModel::Constant,
        })
        .unwrap_err();
        assert!(matches!(err, ModelError::InconsistentCalibration(_)));
    }

    #[test]
    fn build_substrate_needs_two_areas() {
        let areas = vec![AreaStiffness {
            area: 2.0 * CM2,
            idle: 40.0,
            osc: Some(5.0),
        }];
        let err = build_substrate(&CalibrationSet {
            areas,
            shear: rig(),
            dk_model: DkModel::Constant,
        })
        .unwrap_err();
        assert!(matches!(err, ModelError::InsufficientData { .. }));
        let areas = vec![
            AreaStiffness {
                area: 2.0 * CM2,
                idle: 40.0,
                osc: None,
            },
            AreaStiffness {
                area: 2.0 * CM2,
                idle: 40.0,
                osc: None,
            },
        ];
        let err = build_substrate(&CalibrationSet {
            areas,
            shear: rig(),
            dk_model: DkModel::Constant,
        })
        .unwrap_err();
        assert!(matches!(err, ModelError::Invalid(_)));
    }
}
