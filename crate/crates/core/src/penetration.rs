//! Pressure–sinkage law.
//!
//! Vertical resistance grows linearly with insertion depth, `f_z = k_z d`,
//! and `k_z` scales with the tail's support area. An oscillating tail
//! fluidizes the bed and lowers `k_z` by Δk. The tail settles where `f_z`
//! carries the rear share of the robot's weight.

use crate::error::{ModelError, Result, ValidationError};
use crate::terrain::{RobotParams, Substrate, TailGeometry, TailMode};

/// Bisection controls for [`solve_sinkage`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    /// Force residual accepted at the root, N.
    pub abs_tol: f64,
    /// Bracket width accepted at the root, relative to the depth.
    pub depth_rel_tol: f64,
    pub max_iter: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            abs_tol: 1e-9,
            depth_rel_tol: 1e-13,
            max_iter: 200,
        }
    }
}

/// Penetration stiffness `k_z` (N/m) of a tail with support `area` (m²).
pub fn penetration_stiffness(substrate: &Substrate, area: f64, mode: TailMode) -> Result<f64> {
    if !(area.is_finite() && area > 0.0) {
        return Err(ValidationError::new("area", format!("must be > 0, got {area}")).into());
    }
    let idle = substrate.cz() * area;
    match mode {
        TailMode::Idle => Ok(idle),
        TailMode::Oscillate(_) => {
            let reduction = substrate.dk_at(area);
            let k = idle - reduction;
            if k <= 0.0 {
                Err(ModelError::SubstrateYield {
                    area,
                    stiffness_idle: idle,
                    reduction,
                })
            } else {
                Ok(k)
            }
        }
    }
}

/// Vertical resistance at `depth` for stiffness `k_z`.
pub fn penetration_force(k_z: f64, depth: f64) -> Result<f64> {
    if !(k_z.is_finite() && k_z > 0.0) {
        return Err(ValidationError::new("k_z", format!("must be > 0, got {k_z}")).into());
    }
    if !(depth.is_finite() && depth >= 0.0) {
        return Err(ValidationError::new("depth", format!("must be >= 0, got {depth}")).into());
    }
    Ok(k_z * depth)
}

fn check_load_and_bracket(load: f64, (lo, hi): (f64, f64)) -> Result<()> {
    if !(load.is_finite() && load >= 0.0) {
        return Err(ValidationError::new("load", format!("must be >= 0, got {load}")).into());
    }
    if !(lo.is_finite() && hi.is_finite() && lo >= 0.0 && hi > lo) {
        return Err(ValidationError::new("depth_bracket", format!("need 0 <= low < high, got ({lo}, {hi})")).into());
    }
    Ok(())
}

/// Depth at which a monotone force–depth curve reaches `load`, by bisection.
///
/// `curve` maps depth (m) to force (N), must vanish at the surface and be
/// nondecreasing on the bracket.
pub fn solve_sinkage<F>(curve: F, load: f64, bracket: (f64, f64), opts: SolverOptions) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    check_load_and_bracket(load, bracket)?;
    let (mut lo, mut hi) = bracket;
    let mut f_lo = curve(lo);
    let mut f_hi = curve(hi);

    if f_hi < load {
        return Err(ModelError::NoIntersection {
            load,
            max_force: f_hi,
            upper: hi,
        });
    }
    if f_lo > f_hi {
        return Err(ModelError::NonMonotone { depth: lo });
    }
    if f_lo == load {
        return Ok(lo);
    }
    if f_lo > load {
        // The load is already exceeded at the top of the bracket; only the
        // surface itself can be the answer, and only for a zero load.
        return Err(ModelError::NonMonotone { depth: lo });
    }

    let mut mid = 0.5 * (lo + hi);
    for _ in 0..opts.max_iter {
        mid = 0.5 * (lo + hi);
        let f_mid = curve(mid);
        if !(f_lo..=f_hi).contains(&f_mid) {
            return Err(ModelError::NonMonotone { depth: mid });
        }
        let residual = f_mid - load;
        let width = hi - lo;
        if residual == 0.0
            || (residual.abs() <= opts.abs_tol && width <= opts.depth_rel_tol * mid)
            || mid <= lo
            || mid >= hi
        {
            return Ok(mid);
        }
        if residual < 0.0 {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
            f_hi = f_mid;
        }
    }
    Ok(mid)
}

/// Closed-form sinkage `load / k_z` for the linear law, with the same
/// bracket semantics as [`solve_sinkage`] on `[0, upper]`.
pub fn solve_linear_sinkage(k_z: f64, load: f64, upper: f64) -> Result<f64> {
    if !(k_z.is_finite() && k_z > 0.0) {
        return Err(ValidationError::new("k_z", format!("must be > 0, got {k_z}")).into());
    }
    check_load_and_bracket(load, (0.0, upper))?;
    let depth = load / k_z;
    if depth > upper {
        return Err(ModelError::NoIntersection {
            load,
            max_force: k_z * upper,
            upper,
        });
    }
    Ok(depth)
}

/// Deepest equilibrium searched for a tail: twice its height.
pub fn default_depth_limit(tail: &TailGeometry) -> f64 {
    2.0 * tail.height()
}

/// Equilibrium depth of `tail` carrying the robot's rear load.
pub fn sinkage_for(substrate: &Substrate, tail: &TailGeometry, mode: TailMode, robot: &RobotParams) -> Result<f64> {
    let k = penetration_stiffness(substrate, tail.area(), mode)?;
    solve_linear_sinkage(k, robot.rear_load(), default_depth_limit(tail))
}
