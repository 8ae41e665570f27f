//! Quasi-static crutching gait.
//!
//! Each flipper cycle the tail settles to its equilibrium sinkage on a
//! freshly prepared bed, the body pitches by the rear/front depth
//! difference, and the body drags through the bed at the rear depth.
//!
//! The forward speed reported here is a ranking surrogate, not a prediction:
//! the kinematic stride speed derated by how much of the available thrust
//! the body drag consumes.

use serde::Serialize;

use crate::error::{ModelError, Result, ValidationError};
use crate::penetration::sinkage_for;
use crate::shear::drag_force;
use crate::terrain::{BodyProfile, RobotParams, Substrate, TailGeometry, TailMode};

/// Largest pitch difference between modes regarded as "nearly identical".
pub const PITCH_MATCH_THRESHOLD_DEG: f64 = 0.5;

/// Body pitch in degrees, positive nose-up (rear deeper than front).
pub fn pitch_from_sinkage(d_front: f64, d_rear: f64, body_length: f64) -> Result<f64> {
    if !(body_length.is_finite() && body_length > 0.0) {
        return Err(ValidationError::new("body_length", format!("must be > 0, got {body_length}")).into());
    }
    if !(d_front >= 0.0 && d_rear >= 0.0) {
        return Err(ValidationError::new(
            "depth",
            format!("depths must be >= 0, got front {d_front}, rear {d_rear}"),
        )
        .into());
    }
    Ok(((d_rear - d_front) / body_length).atan().to_degrees())
}

/// `v_kin` derated linearly by drag until the drag reaches `thrust_cap`.
pub fn estimate_speed(v_kin: f64, drag: f64, thrust_cap: f64) -> Result<f64> {
    if !(v_kin >= 0.0 && drag >= 0.0) {
        return Err(ValidationError::new(
            "speed_inputs",
            format!("v_kin and drag must be >= 0, got {v_kin}, {drag}"),
        )
        .into());
    }
    if !(thrust_cap > 0.0) {
        return Err(ValidationError::new("thrust_cap", format!("must be > 0, got {thrust_cap}")).into());
    }
    Ok(v_kin * (1.0 - drag / thrust_cap).max(0.0))
}

#[derive(Debug, Clone, PartialEq)]
pub struct GaitConfig {
    /// Body cross-section dragged through the bed.
    pub body: BodyProfile,
    /// Sinkage of the flipper-supported front end, m.
    pub front_depth: f64,
    /// Thrust the flippers can supply, N. `None` uses the robot's weight.
    pub thrust_cap: Option<f64>,
    /// Forward travel per flipper revolution on firm ground, m. `None` uses
    /// the flipper length.
    pub stride_per_cycle: Option<f64>,
}

impl GaitConfig {
    pub fn new(body: BodyProfile) -> Self {
        Self {
            body,
            front_depth: 0.0,
            thrust_cap: None,
            stride_per_cycle: None,
        }
    }

    fn thrust_cap(&self, robot: &RobotParams) -> f64 {
        self.thrust_cap.unwrap_or(robot.mass() * robot.gravity())
    }

    /// Stride speed with no drag, m/s.
    pub fn kinematic_speed(&self, robot: &RobotParams) -> f64 {
        let stride = self.stride_per_cycle.unwrap_or(robot.flipper_size()[0]);
        stride * robot.flipper_speed() / 60.0
    }

    fn validate(&self) -> Result<()> {
        if !(self.front_depth.is_finite() && self.front_depth >= 0.0) {
            return Err(ValidationError::new("front_depth", format!("must be >= 0, got {}", self.front_depth)).into());
        }
        if let Some(t) = self.thrust_cap {
            if !(t.is_finite() && t > 0.0) {
                return Err(ValidationError::new("thrust_cap", format!("must be > 0, got {t}")).into());
            }
        }
        if let Some(s) = self.stride_per_cycle {
            if !(s.is_finite() && s >= 0.0) {
                return Err(ValidationError::new("stride_per_cycle", format!("must be >= 0, got {s}")).into());
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct GaitState {
    /// Completed steps.
    pub step: usize,
    /// Distance travelled, m.
    pub x: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StepRecord {
    pub step: usize,
    pub d_rear: Option<f64>,
    pub d_front: f64,
    /// Degrees.
    pub pitch: Option<f64>,
    pub drag: Option<f64>,
    /// Surrogate speed, m/s. Zero when stuck.
    pub speed: f64,
    /// Position after the step, m.
    pub x: f64,
    /// Why the robot could not be supported, if it could not.
    pub stuck: Option<String>,
}

impl StepRecord {
    pub fn is_stuck(&self) -> bool {
        self.stuck.is_some()
    }
}

fn is_stuck_error(e: &ModelError) -> bool {
    matches!(
        e,
        ModelError::SubstrateYield { .. } | ModelError::NoIntersection { .. } | ModelError::DepthOutOfProfile { .. }
    )
}

/// Advances one flipper cycle.
pub fn step(
    state: GaitState,
    robot: &RobotParams,
    substrate: &Substrate,
    tail: &TailGeometry,
    mode: TailMode,
    config: &GaitConfig,
) -> Result<(GaitState, StepRecord)> {
    config.validate()?;
    let cycle_time = 60.0 / robot.flipper_speed();
    let d_front = config.front_depth;

    let physics = sinkage_for(substrate, tail, mode, robot).and_then(|d_rear| {
        let drag = drag_force(substrate, mode, &config.body, d_rear)?;
        Ok((d_rear, drag))
    });

    let record = match physics {
        Ok((d_rear, drag)) => {
            let speed = estimate_speed(config.kinematic_speed(robot), drag, config.thrust_cap(robot))?;
            StepRecord {
                step: state.step,
                d_rear: Some(d_rear),
                d_front,
                pitch: Some(pitch_from_sinkage(d_front, d_rear, robot.body_length())?),
                drag: Some(drag),
                speed,
                x: state.x + speed * cycle_time,
                stuck: None,
            }
        }
        Err(e) if is_stuck_error(&e) => StepRecord {
            step: state.step,
            d_rear: None,
            d_front,
            pitch: None,
            drag: None,
            speed: 0.0,
            x: state.x,
            stuck: Some(format!("{}: {e}", e.kind())),
        },
        Err(e) => return Err(e),
    };
    let next = GaitState {
        step: state.step + 1,
        x: record.x,
    };
    Ok((next, record))
}

/// Runs `n_steps` flipper cycles from rest.
pub fn simulate(
    robot: &RobotParams,
    substrate: &Substrate,
    tail: &TailGeometry,
    mode: TailMode,
    n_steps: usize,
    config: &GaitConfig,
) -> Result<Vec<StepRecord>> {
    if n_steps == 0 {
        return Err(ValidationError::new("n_steps", "must be >= 1").into());
    }
    let mut state = GaitState::default();
    let mut out = Vec::with_capacity(n_steps);
    for _ in 0..n_steps {
        let (next, rec) = step(state, robot, substrate, tail, mode, config)?;
        out.push(rec);
        state = next;
    }
    Ok(out)
}
