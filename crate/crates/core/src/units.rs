//! Conversions between the cm-based units used in files and on the command
//! line and the SI units used everywhere inside the library.
//!
//! Each constant is the SI value of one unit of the named quantity, so
//! `x_si = x_cm * CM` and `x_cm = x_si / CM`.

/// Length, cm → m.
pub const CM: f64 = 1e-2;
/// Area, cm² → m².
pub const CM2: f64 = 1e-4;
/// Stiffness, N/cm → N/m.
pub const N_PER_CM: f64 = 1e2;
/// Stiffness density, (N/cm)/cm² → N/m³.
pub const N_PER_CM_PER_CM2: f64 = 1e6;
/// Stress gradient, N/cm³ → N/m³.
pub const N_PER_CM3: f64 = 1e6;
/// Speed, cm/s → m/s.
pub const CM_PER_S: f64 = 1e-2;
