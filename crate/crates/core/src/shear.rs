//! Shear drag on the submerged body.
//!
//! Shear stress grows linearly with depth, `τ(z) = k_s z`, and a fluidized
//! bed scales it by `ρ_s`. Drag is the stress integrated over the body's
//! width profile down to the sinkage depth.

use crate::error::{ModelError, Result, ValidationError};
use crate::penetration::sinkage_for;
use crate::terrain::{BodyProfile, RobotParams, Substrate, TailGeometry, TailMode};

/// Stress gradient dτ/dz (N/m³) of the bed under `mode`.
pub fn stress_gradient(substrate: &Substrate, mode: TailMode) -> f64 {
    match mode {
        TailMode::Idle => substrate.ks(),
        TailMode::Oscillate(_) => substrate.rho_s() * substrate.ks(),
    }
}

/// Shear stress (N/m²) at depth `z` (m).
pub fn shear_stress(substrate: &Substrate, mode: TailMode, z: f64) -> Result<f64> {
    if !(z.is_finite() && z >= 0.0) {
        return Err(ValidationError::new("z", format!("must be >= 0, got {z}")).into());
    }
    Ok(stress_gradient(substrate, mode) * z)
}

fn check_depth(profile: &BodyProfile, depth: f64) -> Result<()> {
    if !(depth.is_finite() && depth >= 0.0) {
        return Err(ValidationError::new("depth", format!("must be >= 0, got {depth}")).into());
    }
    if depth > profile.max_depth() {
        return Err(ModelError::DepthOutOfProfile {
            depth,
            max_depth: profile.max_depth(),
        });
    }
    Ok(())
}

/// First moment of the submerged width, `∫₀^d z w(z) dz` (m³).
///
/// Exact: each linear piece contributes a cubic in its local coordinate.
pub fn depth_moment(profile: &BodyProfile, depth: f64) -> Result<f64> {
    check_depth(profile, depth)?;
    Ok(profile
        .segments_to(depth)
        .map(|(z0, z1, w0, slope)| {
            let h = z1 - z0;
            z0 * w0 * h + (z0 * slope + w0) * h * h / 2.0 + slope * h * h * h / 3.0
        })
        .sum())
}

/// Drag (N) on `profile` submerged to `depth` under `mode`.
pub fn drag_force(substrate: &Substrate, mode: TailMode, profile: &BodyProfile, depth: f64) -> Result<f64> {
    Ok(stress_gradient(substrate, mode) * depth_moment(profile, depth)?)
}

/// Drag under an arbitrary stress law `stress(z)` (N/m²), by composite
/// Simpson with `panels` (rounded up to even) intervals on each profile
/// piece.
pub fn drag_force_with_law<F>(stress: F, profile: &BodyProfile, depth: f64, panels: usize) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    check_depth(profile, depth)?;
    let n = (panels.max(2) + 1) & !1;
    let mut total = 0.0;
    for (z0, z1, w0, slope) in profile.segments_to(depth) {
        let h = (z1 - z0) / n as f64;
        let f = |z: f64| stress(z) * (w0 + slope * (z - z0));
        let mut acc = f(z0) + f(z1);
        for i in 1..n {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            acc += w * f(z0 + i as f64 * h);
        }
        total += acc * h / 3.0;
    }
    Ok(total)
}

/// Sinkage and drag of one tail in both modes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeComparison {
    pub sink_idle: f64,
    pub sink_osc: f64,
    pub drag_idle: f64,
    pub drag_osc: f64,
}

impl ModeComparison {
    /// `drag_osc / drag_idle`.
    pub fn ratio(&self) -> Result<f64> {
        if self.drag_idle <= 0.0 {
            return Err(ModelError::DegenerateDrag);
        }
        Ok(self.drag_osc / self.drag_idle)
    }
}

/// Body drag under each mode with the body riding at the tail's sinkage.
pub fn compare_modes(
    substrate: &Substrate,
    tail: &TailGeometry,
    body: &BodyProfile,
    robot: &RobotParams,
) -> Result<ModeComparison> {
    let osc = TailMode::oscillate();
    let sink_idle = sinkage_for(substrate, tail, TailMode::Idle, robot)?;
    let sink_osc = sinkage_for(substrate, tail, osc, robot)?;
    Ok(ModeComparison {
        sink_idle,
        sink_osc,
        drag_idle: drag_force(substrate, TailMode::Idle, body, sink_idle)?,
        drag_osc: drag_force(substrate, osc, body, sink_osc)?,
    })
}

/// Oscillating / idle body drag ratio R for `tail`. R < 1 favours oscillation.
pub fn drag_ratio(substrate: &Substrate, tail: &TailGeometry, body: &BodyProfile, robot: &RobotParams) -> Result<f64> {
    compare_modes(substrate, tail, body, robot)?.ratio()
}
