//! Tail–granular-terrain interaction model.
//!
//! A tail resting on a granular bed sinks until the bed's linear
//! pressure–sinkage resistance carries the rear of the robot. Oscillating
//! the tail fluidizes the bed: shear drag on the body drops, but so does
//! the bed's normal strength, so the body rides deeper. Which effect wins
//! depends on the tail's support area, and [`codesign`] turns that into an
//! idle/oscillate recommendation per tail.
//!
//! Internal units are SI throughout; [`units`] holds the cm conversions
//! used at file and command-line boundaries.

// `!(x > 0.0)` is used on purpose so NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod calibration;
pub mod codesign;
pub mod error;
pub mod gait;
pub mod penetration;
pub mod shear;
pub mod terrain;
pub mod units;

pub use error::{ModelError, Result, ValidationError};
pub use terrain::{
    BodyProfile, CodesignRow, DkModel, Fluidization, ForceSample, ForceTrace, MocapSample, MocapTrace, Oscillation,
    Recommendation, RobotParams, Substrate, TailGeometry, TailMode, TraceKind,
};
