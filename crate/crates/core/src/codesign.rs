//! Tail area × tail action co-design.
//!
//! For every candidate support area the body drag ratio R = f_osc / f_idle
//! decides the action: oscillate when fluidization wins (R < 1), stay idle
//! when the extra sinkage wins (R > 1). The crossover area A* splits the two
//! regimes.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{ModelError, Result, ValidationError};
use crate::penetration::sinkage_for;
use crate::shear::{compare_modes, drag_force};
use crate::terrain::{BodyProfile, CodesignRow, Recommendation, RobotParams, Substrate, TailGeometry, TailMode};

/// Dead band around R = 1.
pub const DEFAULT_EPSILON: f64 = 0.02;

/// Default bisection tolerance for the crossover area, 0.01 cm².
pub const DEFAULT_AREA_TOL: f64 = 1e-6;

/// Number of points sampled across a crossover bracket to check monotonicity.
const MONOTONE_SAMPLES: usize = 64;

/// Thresholds the drag ratio into an action.
pub fn recommend(ratio: f64, epsilon: f64) -> Recommendation {
    if ratio > 1.0 + epsilon {
        Recommendation::Idle
    } else if ratio < 1.0 - epsilon {
        Recommendation::Oscillate
    } else {
        Recommendation::Indifferent
    }
}

/// Result of a crossover search.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Crossover {
    /// A* in m².
    pub area: f64,
    /// R evaluated at `area`.
    pub ratio: f64,
    /// Present when sampled R rises somewhere on the bracket.
    pub non_monotone: Option<NonMonotoneWarning>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NonMonotoneWarning {
    /// First sampled area at which R increased.
    pub area: f64,
    pub previous_ratio: f64,
    pub ratio: f64,
}

/// Everything except the tail area, held fixed across a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct CodesignProblem {
    pub substrate: Substrate,
    pub body: BodyProfile,
    pub robot: RobotParams,
    pub tail_height: f64,
}

impl CodesignProblem {
    pub fn new(substrate: Substrate, body: BodyProfile, robot: RobotParams) -> Self {
        Self {
            substrate,
            body,
            robot,
            tail_height: TailGeometry::DEFAULT_HEIGHT,
        }
    }

    pub fn with_tail_height(mut self, height: f64) -> Self {
        self.tail_height = height;
        self
    }

    fn tail(&self, area: f64) -> Result<TailGeometry> {
        Ok(TailGeometry::new(area, self.tail_height, "")?)
    }

    /// R at one area, with every failure reported.
    pub fn ratio_at(&self, area: f64) -> Result<f64> {
        let tail = self.tail(area)?;
        compare_modes(&self.substrate, &tail, &self.body, &self.robot)?.ratio()
    }

    /// R at one area, where a tail that cannot carry the robot while
    /// oscillating counts as R = +∞.
    fn ratio_or_inf(&self, area: f64) -> Result<f64> {
        match self.ratio_at(area) {
            Ok(r) => Ok(r),
            Err(
                ModelError::SubstrateYield { .. }
                | ModelError::NoIntersection { .. }
                | ModelError::DepthOutOfProfile { .. },
            ) => Ok(f64::INFINITY),
            Err(e) => Err(e),
        }
    }

    /// One row of the co-design table. Never fails; problems go in `flag`.
    pub fn evaluate(&self, area: f64, epsilon: f64) -> CodesignRow {
        let mut row = CodesignRow {
            area,
            sink_idle: None,
            sink_osc: None,
            drag_idle: None,
            drag_osc: None,
            ratio: None,
            recommendation: Recommendation::Idle,
            flag: None,
        };
        let cmp = self
            .tail(area)
            .and_then(|tail| compare_modes(&self.substrate, &tail, &self.body, &self.robot));
        match cmp {
            Ok(c) => {
                row.sink_idle = Some(c.sink_idle);
                row.sink_osc = Some(c.sink_osc);
                row.drag_idle = Some(c.drag_idle);
                row.drag_osc = Some(c.drag_osc);
                match c.ratio() {
                    Ok(r) => {
                        row.ratio = Some(r);
                        row.recommendation = recommend(r, epsilon);
                    }
                    Err(e) => {
                        row.recommendation = Recommendation::Indifferent;
                        row.flag = Some(format!("{}: {e}", e.kind()));
                    }
                }
            }
            Err(e) => {
                // Fill in whatever the idle tail alone still supports.
                if let Ok(tail) = self.tail(area) {
                    if let Ok(d) = sinkage_for(&self.substrate, &tail, TailMode::Idle, &self.robot) {
                        row.sink_idle = Some(d);
                        row.drag_idle = drag_force(&self.substrate, TailMode::Idle, &self.body, d).ok();
                    }
                }
                row.flag = Some(format!("{}: {e}", e.kind()));
            }
        }
        row
    }

    fn check_sweep_args(areas: &[f64], epsilon: f64) -> Result<()> {
        if areas.is_empty() {
            return Err(ValidationError::new("areas", "must not be empty").into());
        }
        if let Some(a) = areas.iter().find(|a| !(a.is_finite() && **a > 0.0)) {
            return Err(ValidationError::new("areas", format!("every area must be > 0, got {a}")).into());
        }
        if !(epsilon.is_finite() && epsilon >= 0.0) {
            return Err(ValidationError::new("epsilon", format!("must be >= 0, got {epsilon}")).into());
        }
        Ok(())
    }

    /// One row per area, in input order.
    pub fn sweep(&self, areas: &[f64], epsilon: f64) -> Result<Vec<CodesignRow>> {
        Self::check_sweep_args(areas, epsilon)?;
        Ok(areas.iter().map(|&a| self.evaluate(a, epsilon)).collect())
    }

    /// Same as [`sweep`](Self::sweep), rows evaluated on the rayon pool.
    pub fn sweep_parallel(&self, areas: &[f64], epsilon: f64) -> Result<Vec<CodesignRow>> {
        Self::check_sweep_args(areas, epsilon)?;
        Ok(areas.par_iter().map(|&a| self.evaluate(a, epsilon)).collect())
    }

    /// Bisects R(A) = 1 on `bracket` (m²) down to width `tol` (m²).
    pub fn crossover_area(&self, bracket: (f64, f64), tol: f64) -> Result<Crossover> {
        let (mut lo, mut hi) = bracket;
        if !(lo.is_finite() && hi.is_finite() && lo > 0.0 && hi > lo) {
            return Err(ValidationError::new("bracket", format!("need 0 < low < high, got ({lo}, {hi})")).into());
        }
        if !(tol.is_finite() && tol > 0.0) {
            return Err(ValidationError::new("tol", format!("must be > 0, got {tol}")).into());
        }
        let r_lo = self.ratio_or_inf(lo)?;
        let r_hi = self.ratio_or_inf(hi)?;
        if !(r_lo > 1.0 && r_hi < 1.0) {
            return Err(ModelError::NoCrossover {
                low_ratio: r_lo,
                high_ratio: r_hi,
            });
        }

        let non_monotone = self.monotone_check(bracket)?;

        while hi - lo > tol {
            let mid = 0.5 * (lo + hi);
            if self.ratio_or_inf(mid)? > 1.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let area = 0.5 * (lo + hi);
        Ok(Crossover {
            area,
            ratio: self.ratio_or_inf(area)?,
            non_monotone,
        })
    }

    fn monotone_check(&self, (lo, hi): (f64, f64)) -> Result<Option<NonMonotoneWarning>> {
        let mut prev = self.ratio_or_inf(lo)?;
        for i in 1..=MONOTONE_SAMPLES {
            let a = lo + (hi - lo) * i as f64 / MONOTONE_SAMPLES as f64;
            let r = self.ratio_or_inf(a)?;
            if r > prev {
                return Ok(Some(NonMonotoneWarning {
                    area: a,
                    previous_ratio: prev,
                    ratio: r,
                }));
            }
            prev = r;
        }
        Ok(None)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::terrain::Fluidization;
    use crate::units::{CM, CM2, N_PER_CM, N_PER_CM3, N_PER_CM_PER_CM2};

    fn problem(rho_s: f64, dk_n_per_cm: f64) -> CodesignProblem {
        let s = Substrate::new(
            0.2 * N_PER_CM_PER_CM2,
            N_PER_CM3,
            rho_s,
            Fluidization::uniform(dk_n_per_cm * N_PER_CM).unwrap(),
        )
        .unwrap();
        CodesignProblem::new(
            s,
            BodyProfile::constant(10.0 * CM, 10.0 * CM).unwrap(),
            RobotParams::with_mass(0.2).unwrap(),
        )
    }

    fn tail_areas() -> Vec<f64> {
        [2.0, 4.0, 8.0, 12.0, 16.0, 20.0, 24.0]
            .iter()
            .map(|a| a * CM2)
            .collect()
    }

    #[test]
    fn recommend_thresholds() {
        assert_eq!(recommend(0.54, 0.02), Recommendation::Oscillate);
        assert_eq!(recommend(1.0, 0.02), Recommendation::Indifferent);
        assert_eq!(recommend(1.02, 0.02), Recommendation::Indifferent);
        assert_eq!(recommend(1.5, 0.02), Recommendation::Idle);
        assert_eq!(recommend(1.0, 0.0), Recommendation::Indifferent);
    }

    #[test]
    fn sweep_keeps_order_and_flags_yield() {
        let p = problem(0.54, 0.43);
        let rows = p.sweep(&tail_areas(), DEFAULT_EPSILON).unwrap();
        assert_eq!(rows.len(), 7);
        for (row, a) in rows.iter().zip(tail_areas()) {
            assert_eq!(row.area, a);
        }
        // 2 cm^2 * 0.2 = 0.4 N/cm < 0.43 N/cm.
        assert!(rows[0].flag.as_deref().unwrap().starts_with("substrate_yield"));
        assert_eq!(rows[0].recommendation, Recommendation::Idle);
        assert!(rows[0].sink_idle.is_some());
        assert!(rows[0].ratio.is_none());

        let ratios: Vec<f64> = rows.iter().filter_map(|r| r.ratio).collect();
        assert!(ratios.windows(2).all(|w| w[1] < w[0]));
        assert_eq!(rows[1].recommendation, Recommendation::Idle);
        assert_eq!(rows[2].recommendation, Recommendation::Indifferent);
        assert_eq!(rows[6].recommendation, Recommendation::Oscillate);
    }

    #[test]
    fn sweep_limit_cases() {
        let rows = problem(0.54, 0.0).sweep(&tail_areas(), DEFAULT_EPSILON).unwrap();
        assert!(rows.iter().all(|r| r.recommendation == Recommendation::Oscillate));
        let rows = problem(1.0, 0.1).sweep(&tail_areas(), DEFAULT_EPSILON).unwrap();
        assert!(rows.iter().all(|r| r.recommendation == Recommendation::Idle));
    }

    #[test]
    fn sweep_rejects_bad_arguments() {
        let p = problem(0.54, 0.43);
        assert!(p.sweep(&[], 0.02).is_err());
        assert!(p.sweep(&[1e-4, -1e-4], 0.02).is_err());
        assert!(p.sweep(&[1e-4], -0.1).is_err());
    }

    #[test]
    fn parallel_sweep_matches_serial() {
        let p = problem(0.54, 0.43);
        let areas: Vec<f64> = (1..=200).map(|i| i as f64 * 0.15 * CM2).collect();
        assert_eq!(p.sweep(&areas, 0.02).unwrap(), p.sweep_parallel(&areas, 0.02).unwrap());
    }

    #[test]
    fn crossover_matches_closed_form() {
        let p = problem(0.54, 0.43);
        let c = p.crossover_area((2.0 * CM2, 24.0 * CM2), 1e-4 * CM2).unwrap();
        let expected = 0.43 / (0.2 * (1.0 - 0.54f64.sqrt())) * CM2;
        assert!(
            (c.area - expected).abs() / expected < 1e-5,
            "{} vs {}",
            c.area,
            expected
        );
        assert!(c.non_monotone.is_none());
        assert!((c.ratio - 1.0).abs() < 1e-3);
    }

    #[test]
    fn crossover_failures() {
        let err = problem(1.0, 0.43)
            .crossover_area((2.0 * CM2, 24.0 * CM2), DEFAULT_AREA_TOL)
            .unwrap_err();
        assert!(matches!(err, ModelError::NoCrossover { .. }));
        let err = problem(0.54, 0.43)
            .crossover_area((12.0 * CM2, 24.0 * CM2), DEFAULT_AREA_TOL)
            .unwrap_err();
        assert!(matches!(err, ModelError::NoCrossover { .. }));
        assert!(problem(0.54, 0.43).crossover_area((2e-4, 1e-4), 1e-6).is_err());
        assert!(problem(0.54, 0.43).crossover_area((1e-4, 2e-4), 0.0).is_err());
    }

    #[test]
    fn crossover_flags_non_monotone_ratio() {
        // Narrow keel over a wide hull: R spikes when the oscillating body
        // reaches the hull while the idle one has not.
        let mut p = problem(0.54, 0.43);
        p.body = BodyProfile::new(vec![(0.0, 0.01), (0.012, 0.01), (0.013, 0.2), (0.2, 0.2)]).unwrap();
        p.robot = RobotParams::with_mass(0.4).unwrap();
        let c = p.crossover_area((5.0 * CM2, 20.0 * CM2), DEFAULT_AREA_TOL).unwrap();
        let w = c.non_monotone.expect("warning attached");
        assert!(w.ratio > w.previous_ratio);
        assert!((c.ratio - 1.0).abs() < 0.5);
    }
}
