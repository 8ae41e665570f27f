//! Domain types for the tail–terrain model.
//!
//! Every type validates its invariants on construction and on
//! deserialization, so a value that exists is a value the model accepts.
//! All quantities are SI.

use serde::{Deserialize, Serialize};

use crate::error::{ensure, ValidationError};

fn finite(x: f64) -> bool {
    x.is_finite()
}

/// How the fluidization stiffness reduction Δk is evaluated at an arbitrary
/// tail area, given the two calibration points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DkModel {
    /// Mean of the two calibrated reductions, independent of area.
    #[default]
    Constant,
    /// Straight line through the two calibration points, clamped at zero.
    LinearInArea,
}

/// Measured loss of penetration stiffness under an oscillating tail at two
/// reference areas.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "FluidizationRaw")]
pub struct Fluidization {
    dk_small: f64,
    a_small: f64,
    dk_large: f64,
    a_large: f64,
    model: DkModel,
}

#[derive(Deserialize)]
struct FluidizationRaw {
    dk_small: f64,
    a_small: f64,
    dk_large: f64,
    a_large: f64,
    #[serde(default)]
    model: DkModel,
}

impl TryFrom<FluidizationRaw> for Fluidization {
    type Error = ValidationError;
    fn try_from(r: FluidizationRaw) -> Result<Self, Self::Error> {
        Fluidization::new(r.dk_small, r.a_small, r.dk_large, r.a_large, r.model)
    }
}

impl Fluidization {
    pub fn new(
        dk_small: f64,
        a_small: f64,
        dk_large: f64,
        a_large: f64,
        model: DkModel,
    ) -> Result<Self, ValidationError> {
        ensure(finite(dk_small) && dk_small >= 0.0, "dk_small", || {
            format!("must be finite and >= 0, got {dk_small}")
        })?;
        ensure(finite(dk_large) && dk_large >= 0.0, "dk_large", || {
            format!("must be finite and >= 0, got {dk_large}")
        })?;
        ensure(finite(a_small) && a_small > 0.0, "a_small", || {
            format!("must be finite and > 0, got {a_small}")
        })?;
        ensure(finite(a_large) && a_large > a_small, "a_large", || {
            format!("must be finite and > a_small ({a_small}), got {a_large}")
        })?;
        Ok(Self {
            dk_small,
            a_small,
            dk_large,
            a_large,
            model,
        })
    }

    /// Same reduction at every area.
    pub fn uniform(dk: f64) -> Result<Self, ValidationError> {
        Self::new(dk, 2e-4, dk, 16e-4, DkModel::Constant)
    }

    /// No fluidization at all.
    pub fn none() -> Self {
        Self::uniform(0.0).expect("zero reduction is valid")
    }

    pub fn dk_small(&self) -> f64 {
        self.dk_small
    }
    pub fn a_small(&self) -> f64 {
        self.a_small
    }
    pub fn dk_large(&self) -> f64 {
        self.dk_large
    }
    pub fn a_large(&self) -> f64 {
        self.a_large
    }
    pub fn model(&self) -> DkModel {
        self.model
    }

    pub fn with_model(mut self, model: DkModel) -> Self {
        self.model = model;
        self
    }

    /// Stiffness reduction Δk(A) in N/m.
    pub fn reduction_at(&self, area: f64) -> f64 {
        match self.model {
            DkModel::Constant => 0.5 * (self.dk_small + self.dk_large),
            DkModel::LinearInArea => {
                let slope = (self.dk_large - self.dk_small) / (self.a_large - self.a_small);
                (self.dk_small + slope * (area - self.a_small)).max(0.0)
            }
        }
    }
}

/// Calibrated granular bed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SubstrateRaw")]
pub struct Substrate {
    /// Penetration stiffness per unit support area, N/m³.
    cz: f64,
    /// Quiescent shear stress per unit depth, N/m³.
    ks: f64,
    /// Fluidized / quiescent shear coefficient.
    rho_s: f64,
    fluidization: Fluidization,
}

#[derive(Deserialize)]
struct SubstrateRaw {
    cz: f64,
    ks: f64,
    #[serde(default = "default_rho_s")]
    rho_s: f64,
    fluidization: Fluidization,
}

fn default_rho_s() -> f64 {
    Substrate::DEFAULT_RHO_S
}

impl TryFrom<SubstrateRaw> for Substrate {
    type Error = ValidationError;
    fn try_from(r: SubstrateRaw) -> Result<Self, Self::Error> {
        Substrate::new(r.cz, r.ks, r.rho_s, r.fluidization)
    }
}

impl Substrate {
    /// 46% lower shear drag under oscillation.
    pub const DEFAULT_RHO_S: f64 = 0.54;

    pub fn new(cz: f64, ks: f64, rho_s: f64, fluidization: Fluidization) -> Result<Self, ValidationError> {
        ensure(finite(cz) && cz > 0.0, "cz", || {
            format!("must be finite and > 0, got {cz}")
        })?;
        ensure(finite(ks) && ks > 0.0, "ks", || {
            format!("must be finite and > 0, got {ks}")
        })?;
        ensure(rho_s > 0.0 && rho_s <= 1.0, "rho_s", || {
            format!("must lie in (0, 1], got {rho_s}")
        })?;
        Ok(Self {
            cz,
            ks,
            rho_s,
            fluidization,
        })
    }

    /// Plastic-sphere bed at the reference calibration: 0.2 (N/cm)/cm²,
    /// Δk of 0.35 N/cm at 2 cm² and 0.51 N/cm at 16 cm², ρ_s = 0.54.
    ///
    /// `ks` is not measured directly and is set to 1 N/cm³; drag ratios do
    /// not depend on it.
    pub fn reference() -> Self {
        let fl =
            Fluidization::new(35.0, 2e-4, 51.0, 16e-4, DkModel::Constant).expect("reference fluidization is valid");
        Self::new(2e5, 1e6, Self::DEFAULT_RHO_S, fl).expect("reference substrate is valid")
    }

    pub fn cz(&self) -> f64 {
        self.cz
    }
    pub fn ks(&self) -> f64 {
        self.ks
    }
    pub fn rho_s(&self) -> f64 {
        self.rho_s
    }
    pub fn fluidization(&self) -> &Fluidization {
        &self.fluidization
    }

    pub fn with_rho_s(self, rho_s: f64) -> Result<Self, ValidationError> {
        Self::new(self.cz, self.ks, rho_s, self.fluidization)
    }

    pub fn with_fluidization(self, fluidization: Fluidization) -> Self {
        Self { fluidization, ..self }
    }

    pub fn with_dk_model(self, model: DkModel) -> Self {
        self.with_fluidization(self.fluidization.with_model(model))
    }

    pub fn dk_at(&self, area: f64) -> f64 {
        self.fluidization.reduction_at(area)
    }
}

/// Tail intruder.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TailRaw")]
pub struct TailGeometry {
    area: f64,
    height: f64,
    label: String,
}

#[derive(Deserialize)]
struct TailRaw {
    area: f64,
    height: f64,
    #[serde(default)]
    label: String,
}

impl TryFrom<TailRaw> for TailGeometry {
    type Error = ValidationError;
    fn try_from(r: TailRaw) -> Result<Self, Self::Error> {
        TailGeometry::new(r.area, r.height, r.label)
    }
}

impl TailGeometry {
    /// Height of every tail in the reference set, 40 mm.
    pub const DEFAULT_HEIGHT: f64 = 0.04;

    pub fn new(area: f64, height: f64, label: impl Into<String>) -> Result<Self, ValidationError> {
        ensure(finite(area) && area > 0.0, "area", || {
            format!("must be finite and > 0, got {area}")
        })?;
        ensure(finite(height) && height > 0.0, "height", || {
            format!("must be finite and > 0, got {height}")
        })?;
        Ok(Self {
            area,
            height,
            label: label.into(),
        })
    }

    /// Tail of the default height with an auto-generated label.
    pub fn with_area(area: f64) -> Result<Self, ValidationError> {
        Self::new(area, Self::DEFAULT_HEIGHT, format!("A{}cm2", area * 1e4))
    }

    pub fn area(&self) -> f64 {
        self.area
    }
    pub fn height(&self) -> f64 {
        self.height
    }
    pub fn label(&self) -> &str {
        &self.label
    }
}

/// Piecewise-linear width of the submerged body cross-section as a
/// function of depth below the surface.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ProfileRaw")]
pub struct BodyProfile {
    knots: Vec<(f64, f64)>,
}

#[derive(Deserialize)]
struct ProfileRaw {
    knots: Vec<(f64, f64)>,
}

impl TryFrom<ProfileRaw> for BodyProfile {
    type Error = ValidationError;
    fn try_from(r: ProfileRaw) -> Result<Self, Self::Error> {
        BodyProfile::new(r.knots)
    }
}

impl BodyProfile {
    /// `knots` are `(depth, width)` pairs, depths strictly increasing from 0.
    pub fn new(knots: Vec<(f64, f64)>) -> Result<Self, ValidationError> {
        ensure(knots.len() >= 2, "knots", || {
            format!("need at least 2 knots, got {}", knots.len())
        })?;
        ensure(knots[0].0 == 0.0, "knots", || {
            format!("first depth must be 0, got {}", knots[0].0)
        })?;
        for (i, &(z, w)) in knots.iter().enumerate() {
            ensure(finite(z) && finite(w), "knots", || format!("knot {i} is not finite"))?;
            ensure(w >= 0.0, "knots", || format!("knot {i} has negative width {w}"))?;
            if i > 0 {
                let prev = knots[i - 1].0;
                ensure(z > prev, "knots", || {
                    format!("depths must be strictly increasing ({prev} then {z} at knot {i})")
                })?;
            }
        }
        Ok(Self { knots })
    }

    /// Prismatic body: same width at every depth down to `max_depth`.
    pub fn constant(width: f64, max_depth: f64) -> Result<Self, ValidationError> {
        Self::new(vec![(0.0, width), (max_depth, width)])
    }

    pub fn knots(&self) -> &[(f64, f64)] {
        &self.knots
    }

    pub fn max_depth(&self) -> f64 {
        self.knots[self.knots.len() - 1].0
    }

    /// `true` when every knot has the same width.
    pub fn is_constant_width(&self) -> bool {
        let w0 = self.knots[0].1;
        self.knots.iter().all(|&(_, w)| w == w0)
    }

    /// Width at depth `z`, linear between knots. `None` outside the profile.
    pub fn width_at(&self, z: f64) -> Option<f64> {
        if !(0.0..=self.max_depth()).contains(&z) {
            return None;
        }
        let seg = self
            .knots
            .windows(2)
            .find(|w| z <= w[1].0)
            .expect("z is inside the profile");
        let ((z0, w0), (z1, w1)) = (seg[0], seg[1]);
        Some(w0 + (w1 - w0) * (z - z0) / (z1 - z0))
    }

    /// Iterates over the linear pieces clipped to `[0, depth]`, yielding
    /// `(z0, z1, w0, slope)` with `w(z) = w0 + slope * (z - z0)`.
    pub(crate) fn segments_to(&self, depth: f64) -> impl Iterator<Item = (f64, f64, f64, f64)> + '_ {
        self.knots.windows(2).filter_map(move |w| {
            let ((z0, w0), (z1, w1)) = (w[0], w[1]);
            if z0 >= depth {
                return None;
            }
            let slope = (w1 - w0) / (z1 - z0);
            Some((z0, z1.min(depth), w0, slope))
        })
    }
}

/// Oscillation parameters of an active tail.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "OscRaw")]
pub struct Oscillation {
    freq: f64,
    amplitude: f64,
}

#[derive(Deserialize)]
struct OscRaw {
    freq: f64,
    amplitude: f64,
}

impl TryFrom<OscRaw> for Oscillation {
    type Error = ValidationError;
    fn try_from(r: OscRaw) -> Result<Self, Self::Error> {
        Oscillation::new(r.freq, r.amplitude)
    }
}

impl Oscillation {
    /// `freq` in Hz, `amplitude` in degrees.
    pub fn new(freq: f64, amplitude: f64) -> Result<Self, ValidationError> {
        ensure(finite(freq) && freq > 0.0, "freq", || {
            format!("must be finite and > 0, got {freq}")
        })?;
        ensure(amplitude > 0.0 && amplitude <= 180.0, "amplitude", || {
            format!("must lie in (0, 180] degrees, got {amplitude}")
        })?;
        Ok(Self { freq, amplitude })
    }

    pub fn freq(&self) -> f64 {
        self.freq
    }
    pub fn amplitude(&self) -> f64 {
        self.amplitude
    }
}

impl Default for Oscillation {
    /// 5 Hz, 60°.
    fn default() -> Self {
        Self {
            freq: 5.0,
            amplitude: 60.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TailMode {
    Idle,
    Oscillate(Oscillation),
}

impl TailMode {
    /// Oscillation at the default 5 Hz / 60°.
    pub fn oscillate() -> Self {
        TailMode::Oscillate(Oscillation::default())
    }

    pub fn is_oscillating(&self) -> bool {
        matches!(self, TailMode::Oscillate(_))
    }

    pub fn name(&self) -> &'static str {
        match self {
            TailMode::Idle => "idle",
            TailMode::Oscillate(_) => "oscillate",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RobotRaw")]
pub struct RobotParams {
    mass: f64,
    gravity: f64,
    body_length: f64,
    flipper_speed: f64,
    flipper_size: [f64; 2],
    rear_load_fraction: f64,
}

#[derive(Deserialize)]
struct RobotRaw {
    mass: f64,
    #[serde(default = "RobotParams::default_gravity")]
    gravity: f64,
    #[serde(default = "RobotParams::default_body_length")]
    body_length: f64,
    #[serde(default = "RobotParams::default_flipper_speed")]
    flipper_speed: f64,
    #[serde(default = "RobotParams::default_flipper_size")]
    flipper_size: [f64; 2],
    #[serde(default = "RobotParams::default_rear_load_fraction")]
    rear_load_fraction: f64,
}

impl TryFrom<RobotRaw> for RobotParams {
    type Error = ValidationError;
    fn try_from(r: RobotRaw) -> Result<Self, Self::Error> {
        RobotParams::new(
            r.mass,
            r.gravity,
            r.body_length,
            r.flipper_speed,
            r.flipper_size,
            r.rear_load_fraction,
        )
    }
}

impl RobotParams {
    fn default_gravity() -> f64 {
        9.81
    }
    fn default_body_length() -> f64 {
        0.20
    }
    fn default_flipper_speed() -> f64 {
        60.0
    }
    fn default_flipper_size() -> [f64; 2] {
        [0.06, 0.04]
    }
    fn default_rear_load_fraction() -> f64 {
        0.5
    }

    /// `flipper_speed` is in RPM, `flipper_size` is `[length, width]` in m.
    pub fn new(
        mass: f64,
        gravity: f64,
        body_length: f64,
        flipper_speed: f64,
        flipper_size: [f64; 2],
        rear_load_fraction: f64,
    ) -> Result<Self, ValidationError> {
        let positive = |x: f64| finite(x) && x > 0.0;
        ensure(positive(mass), "mass", || format!("must be > 0, got {mass}"))?;
        ensure(positive(gravity), "gravity", || format!("must be > 0, got {gravity}"))?;
        ensure(positive(body_length), "body_length", || {
            format!("must be > 0, got {body_length}")
        })?;
        ensure(positive(flipper_speed), "flipper_speed", || {
            format!("must be > 0, got {flipper_speed}")
        })?;
        ensure(
            positive(flipper_size[0]) && positive(flipper_size[1]),
            "flipper_size",
            || format!("both dimensions must be > 0, got {flipper_size:?}"),
        )?;
        ensure(
            rear_load_fraction > 0.0 && rear_load_fraction < 1.0,
            "rear_load_fraction",
            || format!("must lie in (0, 1), got {rear_load_fraction}"),
        )?;
        Ok(Self {
            mass,
            gravity,
            body_length,
            flipper_speed,
            flipper_size,
            rear_load_fraction,
        })
    }

    /// Robot of the given mass with every other parameter at its default.
    /// There is no default mass.
    pub fn with_mass(mass: f64) -> Result<Self, ValidationError> {
        Self::new(
            mass,
            Self::default_gravity(),
            Self::default_body_length(),
            Self::default_flipper_speed(),
            Self::default_flipper_size(),
            Self::default_rear_load_fraction(),
        )
    }

    pub fn with_body_length(self, body_length: f64) -> Result<Self, ValidationError> {
        Self::new(
            self.mass,
            self.gravity,
            body_length,
            self.flipper_speed,
            self.flipper_size,
            self.rear_load_fraction,
        )
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }
    pub fn gravity(&self) -> f64 {
        self.gravity
    }
    pub fn body_length(&self) -> f64 {
        self.body_length
    }
    pub fn flipper_speed(&self) -> f64 {
        self.flipper_speed
    }
    pub fn flipper_size(&self) -> [f64; 2] {
        self.flipper_size
    }
    pub fn rear_load_fraction(&self) -> f64 {
        self.rear_load_fraction
    }

    /// Weight carried by the tail, N.
    pub fn rear_load(&self) -> f64 {
        self.rear_load_fraction * self.mass * self.gravity
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TraceKind {
    Penetration,
    Shear,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ForceSample {
    pub time: f64,
    /// Depth for penetration traces, shear displacement for shear traces.
    pub position: f64,
    pub force: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ForceTraceRaw")]
pub struct ForceTrace {
    kind: TraceKind,
    samples: Vec<ForceSample>,
}

#[derive(Deserialize)]
struct ForceTraceRaw {
    kind: TraceKind,
    samples: Vec<ForceSample>,
}

impl TryFrom<ForceTraceRaw> for ForceTrace {
    type Error = ValidationError;
    fn try_from(r: ForceTraceRaw) -> Result<Self, Self::Error> {
        ForceTrace::new(r.kind, r.samples)
    }
}

impl ForceTrace {
    pub fn new(kind: TraceKind, samples: Vec<ForceSample>) -> Result<Self, ValidationError> {
        for (i, s) in samples.iter().enumerate() {
            ensure(
                finite(s.time) && finite(s.position) && finite(s.force),
                "samples",
                || format!("sample {i} is not finite"),
            )?;
            if i > 0 {
                let prev = samples[i - 1].time;
                ensure(s.time > prev, "time", || {
                    format!("must be strictly increasing ({prev} then {} at sample {i})", s.time)
                })?;
            }
        }
        Ok(Self { kind, samples })
    }

    pub fn kind(&self) -> TraceKind {
        self.kind
    }
    pub fn samples(&self) -> &[ForceSample] {
        &self.samples
    }
    pub fn len(&self) -> usize {
        self.samples.len()
    }
    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Index of the first sample whose position drops below its predecessor.
    pub fn first_position_reversal(&self) -> Option<usize> {
        self.samples
            .windows(2)
            .position(|w| w[1].position < w[0].position)
            .map(|i| i + 1)
    }

    /// Same trace with every force multiplied by `c`.
    pub fn scaled_forces(&self, c: f64) -> Self {
        Self {
            kind: self.kind,
            samples: self
                .samples
                .iter()
                .map(|s| ForceSample {
                    force: s.force * c,
                    ..*s
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MocapSample {
    pub time: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
    /// Degrees, positive nose-up.
    pub pitch: f64,
    pub tail_z: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MocapRaw")]
pub struct MocapTrace {
    samples: Vec<MocapSample>,
}

#[derive(Deserialize)]
struct MocapRaw {
    samples: Vec<MocapSample>,
}

impl TryFrom<MocapRaw> for MocapTrace {
    type Error = ValidationError;
    fn try_from(r: MocapRaw) -> Result<Self, Self::Error> {
        MocapTrace::new(r.samples)
    }
}

impl MocapTrace {
    pub fn new(samples: Vec<MocapSample>) -> Result<Self, ValidationError> {
        ensure(samples.len() >= 2, "samples", || {
            format!("need at least 2 samples, got {}", samples.len())
        })?;
        for (i, s) in samples.iter().enumerate() {
            ensure(
                [s.time, s.x, s.y, s.z, s.pitch].iter().all(|v| v.is_finite()) && s.tail_z.is_none_or(f64::is_finite),
                "samples",
                || format!("sample {i} is not finite"),
            )?;
            if i > 0 {
                let prev = samples[i - 1].time;
                ensure(s.time > prev, "time", || {
                    format!("must be strictly increasing ({prev} then {} at sample {i})", s.time)
                })?;
            }
        }
        Ok(Self { samples })
    }

    pub fn samples(&self) -> &[MocapSample] {
        &self.samples
    }
}

/// Action the co-design rule recommends for a tail.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Recommendation {
    Idle,
    Oscillate,
    Indifferent,
}

impl Recommendation {
    pub fn as_str(&self) -> &'static str {
        match self {
            Recommendation::Idle => "idle",
            Recommendation::Oscillate => "oscillate",
            Recommendation::Indifferent => "indifferent",
        }
    }
}

/// One tail area evaluated under both modes.
///
/// Fields are `None` when the corresponding quantity could not be computed;
/// `flag` then says why.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CodesignRow {
    pub area: f64,
    pub sink_idle: Option<f64>,
    pub sink_osc: Option<f64>,
    pub drag_idle: Option<f64>,
    pub drag_osc: Option<f64>,
    pub ratio: Option<f64>,
    pub recommendation: Recommendation,
    pub flag: Option<String>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn substrate_rejects_bad_fields_by_name() {
        let fl = Fluidization::none();
        assert_eq!(Substrate::new(0.0, 1.0, 0.5, fl).unwrap_err().field, "cz");
        assert_eq!(Substrate::new(1.0, -1.0, 0.5, fl).unwrap_err().field, "ks");
        assert_eq!(Substrate::new(1.0, 1.0, 0.0, fl).unwrap_err().field, "rho_s");
        assert_eq!(Substrate::new(1.0, 1.0, 1.01, fl).unwrap_err().field, "rho_s");
        assert!(Substrate::new(1.0, 1.0, 1.0, fl).is_ok());
    }

    #[test]
    fn fluidization_validation() {
        let e = Fluidization::new(-1.0, 1.0, 1.0, 2.0, DkModel::Constant).unwrap_err();
        assert_eq!(e.field, "dk_small");
        let e = Fluidization::new(1.0, 2.0, 1.0, 2.0, DkModel::Constant).unwrap_err();
        assert_eq!(e.field, "a_large");
        let e = Fluidization::new(1.0, 1.0, -0.1, 2.0, DkModel::Constant).unwrap_err();
        assert_eq!(e.field, "dk_large");
    }

    #[test]
    fn dk_models() {
        let fl = Fluidization::new(35.0, 2e-4, 51.0, 16e-4, DkModel::Constant).unwrap();
        assert!((fl.reduction_at(1e-3) - 43.0).abs() < 1e-12);
        let lin = fl.with_model(DkModel::LinearInArea);
        assert!((lin.reduction_at(2e-4) - 35.0).abs() < 1e-9);
        assert!((lin.reduction_at(16e-4) - 51.0).abs() < 1e-9);
        assert!((lin.reduction_at(9e-4) - 43.0).abs() < 1e-9);
        // Extrapolation below the small point with a steep slope clamps at 0.
        let steep = Fluidization::new(1.0, 2e-4, 100.0, 3e-4, DkModel::LinearInArea).unwrap();
        assert_eq!(steep.reduction_at(1e-4), 0.0);
    }

    #[test]
    fn tail_and_mode_validation() {
        assert_eq!(TailGeometry::new(0.0, 0.04, "").unwrap_err().field, "area");
        assert_eq!(TailGeometry::new(1e-4, 0.0, "").unwrap_err().field, "height");
        assert_eq!(Oscillation::new(0.0, 60.0).unwrap_err().field, "freq");
        assert_eq!(Oscillation::new(5.0, 0.0).unwrap_err().field, "amplitude");
        assert_eq!(Oscillation::new(5.0, 181.0).unwrap_err().field, "amplitude");
        assert!(Oscillation::new(5.0, 180.0).is_ok());
    }

    #[test]
    fn robot_validation() {
        assert_eq!(RobotParams::with_mass(0.0).unwrap_err().field, "mass");
        let e = RobotParams::new(1.0, 9.81, 0.2, 60.0, [0.06, 0.04], 1.0).unwrap_err();
        assert_eq!(e.field, "rear_load_fraction");
        let e = RobotParams::new(1.0, 9.81, 0.2, 60.0, [0.06, 0.0], 0.5).unwrap_err();
        assert_eq!(e.field, "flipper_size");
        let r = RobotParams::with_mass(0.4).unwrap();
        assert!((r.rear_load() - 1.962).abs() < 1e-12);
    }

    #[test]
    fn profile_validation_and_width() {
        assert!(BodyProfile::new(vec![(0.0, 1.0)]).is_err());
        assert!(BodyProfile::new(vec![(0.1, 1.0), (0.2, 1.0)]).is_err());
        assert!(BodyProfile::new(vec![(0.0, 1.0), (0.0, 1.0)]).is_err());
        assert!(BodyProfile::new(vec![(0.0, 1.0), (0.1, -1.0)]).is_err());
        let p = BodyProfile::new(vec![(0.0, 0.0), (0.1, 0.1), (0.3, 0.1)]).unwrap();
        assert_eq!(p.max_depth(), 0.3);
        assert!((p.width_at(0.05).unwrap() - 0.05).abs() < 1e-15);
        assert_eq!(p.width_at(0.2), Some(0.1));
        assert_eq!(p.width_at(0.31), None);
        assert!(!p.is_constant_width());
        assert!(BodyProfile::constant(0.1, 0.2).unwrap().is_constant_width());
    }

    #[test]
    fn traces_require_increasing_time() {
        let s = |t| ForceSample {
            time: t,
            position: 0.0,
            force: 0.0,
        };
        let e = ForceTrace::new(TraceKind::Shear, vec![s(0.0), s(0.0)]).unwrap_err();
        assert_eq!(e.field, "time");
        let m = |t| MocapSample {
            time: t,
            x: 0.0,
            y: 0.0,
            z: 0.0,
            pitch: 0.0,
            tail_z: None,
        };
        assert_eq!(MocapTrace::new(vec![m(0.0)]).unwrap_err().field, "samples");
        assert_eq!(MocapTrace::new(vec![m(1.0), m(0.5)]).unwrap_err().field, "time");
    }

    #[test]
    fn json_roundtrip_and_validated_deserialize() {
        let s = Substrate::reference().with_dk_model(DkModel::LinearInArea);
        let back: Substrate = serde_json::from_str(&serde_json::to_string(&s).unwrap()).unwrap();
        assert_eq!(s, back);

        let bad = r#"{"cz": -1, "ks": 1, "rho_s": 0.5,
            "fluidization": {"dk_small": 0, "a_small": 1, "dk_large": 0, "a_large": 2}}"#;
        let err = serde_json::from_str::<Substrate>(bad).unwrap_err();
        assert!(err.to_string().contains("cz"));

        let mode = TailMode::oscillate();
        let back: TailMode = serde_json::from_str(&serde_json::to_string(&mode).unwrap()).unwrap();
        assert_eq!(mode, back);

        let robot: RobotParams = serde_json::from_str(r#"{"mass": 0.4}"#).unwrap();
        assert_eq!(robot, RobotParams::with_mass(0.4).unwrap());
    }
}
