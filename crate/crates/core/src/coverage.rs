//! Brute-force coverage verification.
//!
//! Walks the locomotive antenna over the notification zone before the
//! crossing and over one train length past it, and for every position
//! checks every vehicle position on the road safe segment. The received
//! power uses the pattern gain toward the vehicle, looked up pessimistically,
//! so a pass here does not rely on interpolating between bins.
//!
//! Positions are signed: along the track, negative before the crossing and
//! positive past it; along the road, positive on the side that leaves the
//! crossing at angle `δ` to the direction of travel.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::envelope::{CrossingGeometry, MAX_SYNTHESIS_RESOLUTION};
use crate::error::{Error, Result};
use crate::link_budget::{LinkBudgetParams, REFERENCE_DISTANCE_M};
use crate::pattern::AzimuthPattern;
use crate::units::ratio_to_db;

pub const DEFAULT_SAMPLES: usize = 500;

/// Margins closer to zero than this are floating-point noise on an exact
/// equality and are reported as zero.
pub const MARGIN_FLOOR_DB: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverageGrid {
    /// Samples over each train interval (approach and departure).
    pub train_samples: usize,
    /// Samples over the road segment `[−r_s, r_s]`.
    pub vehicle_samples: usize,
}

impl Default for CoverageGrid {
    fn default() -> Self {
        Self::new(DEFAULT_SAMPLES, DEFAULT_SAMPLES)
    }
}

impl CoverageGrid {
    pub const fn new(train_samples: usize, vehicle_samples: usize) -> Self {
        Self {
            train_samples,
            vehicle_samples,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.train_samples < 2 || self.vehicle_samples < 2 {
            return Err(Error::InvalidParameter(format!(
                "grid needs at least 2×2 samples, got {}×{}",
                self.train_samples, self.vehicle_samples
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageReport {
    pub pass: bool,
    pub min_margin_db: f64,
    pub worst_train_pos_m: f64,
    pub worst_vehicle_pos_m: f64,
    pub train_samples: usize,
    pub vehicle_samples: usize,
    /// Position pairs closer than the reference distance, not evaluated.
    pub skipped_pairs: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TracePoint {
    pub train_pos_m: f64,
    pub vehicle_pos_m: f64,
    pub margin_db: f64,
}

/// Minimum over one train position; `vehicle` is the index of the binding
/// vehicle sample, `None` if every pair was skipped.
#[derive(Debug, Clone, Copy)]
struct RowResult {
    margin_db: f64,
    vehicle: Option<usize>,
    skipped: usize,
}

struct Evaluator<'a> {
    pattern: &'a AzimuthPattern,
    params: &'a LinkBudgetParams,
    road_dir: (f64, f64),
    vehicle_pos: Vec<f64>,
    train_pos: Vec<f64>,
}

impl<'a> Evaluator<'a> {
    fn new(
        pattern: &'a AzimuthPattern,
        geom: &CrossingGeometry,
        params: &'a LinkBudgetParams,
        grid: CoverageGrid,
    ) -> Result<Self> {
        geom.validate()?;
        params.validate()?;
        grid.validate()?;
        if pattern.resolution() > MAX_SYNTHESIS_RESOLUTION * (1.0 + 1e-12) {
            return Err(Error::out_of_domain(
                "pattern resolution",
                pattern.resolution(),
                "<= 0.01 rad",
            ));
        }
        let linspace = |lo: f64, hi: f64, n: usize| -> Vec<f64> {
            (0..n)
                .map(|i| {
                    if i + 1 == n {
                        hi
                    } else {
                        lo + (hi - lo) * i as f64 / (n - 1) as f64
                    }
                })
                .collect()
        };
        let mut train_pos: Vec<f64> = linspace(-geom.d_s, 0.0, grid.train_samples);
        train_pos.extend(linspace(0.0, geom.train_length, grid.train_samples));
        Ok(Self {
            pattern,
            params,
            road_dir: (geom.delta.cos(), geom.delta.sin()),
            vehicle_pos: linspace(-geom.r_s, geom.r_s, grid.vehicle_samples),
            train_pos,
        })
    }

    /// Link margin in dB, or `None` when the pair is skipped.
    fn margin(&self, train: f64, vehicle: f64) -> Option<f64> {
        if vehicle.abs() < REFERENCE_DISTANCE_M {
            return None;
        }
        let dx = vehicle * self.road_dir.0 - train;
        let dy = vehicle * self.road_dir.1;
        let distance = dx.hypot(dy);
        if distance < REFERENCE_DISTANCE_M {
            return None;
        }
        let gain = self.pattern.gain_pessimistic(dy.atan2(dx));
        if gain <= 0.0 {
            return Some(f64::NEG_INFINITY);
        }
        let power = self
            .params
            .received_power(gain, distance)
            .expect("gain and distance checked above");
        let margin = ratio_to_db(power / self.params.p_min);
        Some(if margin.abs() < MARGIN_FLOOR_DB {
            0.0
        } else {
            margin
        })
    }

    fn row(&self, train: f64) -> RowResult {
        let mut best = RowResult {
            margin_db: f64::INFINITY,
            vehicle: None,
            skipped: 0,
        };
        for (j, &p) in self.vehicle_pos.iter().enumerate() {
            match self.margin(train, p) {
                None => best.skipped += 1,
                Some(m) => {
                    if best.vehicle.is_none() || m < best.margin_db {
                        best.margin_db = m;
                        best.vehicle = Some(j);
                    }
                }
            }
        }
        best
    }

    fn rows(&self) -> Vec<RowResult> {
        self.train_pos.par_iter().map(|&q| self.row(q)).collect()
    }
}

/// Checks every train/vehicle position pair on the grid.
pub fn verify_coverage(
    pattern: &AzimuthPattern,
    geom: &CrossingGeometry,
    params: &LinkBudgetParams,
    grid: CoverageGrid,
) -> Result<CoverageReport> {
    let eval = Evaluator::new(pattern, geom, params, grid)?;
    let rows = eval.rows();
    let skipped = rows.iter().map(|r| r.skipped).sum();
    // sequential reduction keeps the reported worst case independent of
    // thread scheduling: first minimum in (train, vehicle) order wins
    let worst = rows
        .iter()
        .enumerate()
        .filter_map(|(i, r)| r.vehicle.map(|j| (i, j, r.margin_db)))
        .fold(None, |best: Option<(usize, usize, f64)>, cur| match best {
            Some(b) if b.2 <= cur.2 => Some(b),
            _ => Some(cur),
        });
    let (i, j, min_margin_db) = worst.ok_or_else(|| {
        Error::InvalidParameter("every position pair is inside the reference distance".into())
    })?;
    Ok(CoverageReport {
        pass: min_margin_db >= 0.0,
        min_margin_db,
        worst_train_pos_m: eval.train_pos[i],
        worst_vehicle_pos_m: eval.vehicle_pos[j],
        train_samples: grid.train_samples,
        vehicle_samples: grid.vehicle_samples,
        skipped_pairs: skipped,
    })
}

/// Binding vehicle position and its margin for every train position,
/// approach first, then departure.
pub fn worst_angle_trace(
    pattern: &AzimuthPattern,
    geom: &CrossingGeometry,
    params: &LinkBudgetParams,
    grid: CoverageGrid,
) -> Result<Vec<TracePoint>> {
    let eval = Evaluator::new(pattern, geom, params, grid)?;
    Ok(eval
        .rows()
        .into_iter()
        .zip(&eval.train_pos)
        .filter_map(|(r, &q)| {
            r.vehicle.map(|j| TracePoint {
                train_pos_m: q,
                vehicle_pos_m: eval.vehicle_pos[j],
                margin_db: r.margin_db,
            })
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::envelope::{synthesize_envelope, DEFAULT_RESOLUTION};
    use crate::safety::{default_scenario, Scenario};

    fn envelope(s: &Scenario) -> AzimuthPattern {
        synthesize_envelope(&s.geometry, &s.link, DEFAULT_RESOLUTION).unwrap()
    }

    const SMALL: CoverageGrid = CoverageGrid::new(200, 200);

    #[test]
    fn envelope_passes_tightly() {
        let s = default_scenario();
        let r = verify_coverage(&envelope(&s), &s.geometry, &s.link, SMALL).unwrap();
        assert!(r.pass, "{r:?}");
        assert!(r.min_margin_db >= -0.01 && r.min_margin_db <= 0.5);
    }

    #[test]
    fn lowered_envelope_fails() {
        let s = default_scenario();
        let low = envelope(&s).scaled_db(-0.2).unwrap();
        let r = verify_coverage(&low, &s.geometry, &s.link, SMALL).unwrap();
        assert!(!r.pass);
        assert!(r.min_margin_db <= -0.19);
    }

    #[test]
    fn huge_isotropic_passes() {
        let s = default_scenario();
        let iso = AzimuthPattern::isotropic(6284, 1e6).unwrap();
        let r = verify_coverage(&iso, &s.geometry, &s.link, SMALL).unwrap();
        assert!(r.pass && r.min_margin_db > 20.0);
        let trace = worst_angle_trace(&iso, &s.geometry, &s.link, SMALL).unwrap();
        assert!(trace.iter().all(|t| t.margin_db > 0.0));
    }

    #[test]
    fn report_is_deterministic_and_in_range() {
        let s = default_scenario().with_delta(1.0).unwrap();
        let env = envelope(&s);
        let a = verify_coverage(&env, &s.geometry, &s.link, SMALL).unwrap();
        let b = verify_coverage(&env, &s.geometry, &s.link, SMALL).unwrap();
        assert_eq!(a, b);
        let g = s.geometry;
        assert!(a.worst_train_pos_m >= -g.d_s && a.worst_train_pos_m <= g.train_length);
        assert!(a.worst_vehicle_pos_m.abs() <= g.r_s);
    }

    #[test]
    fn trace_binding_points() {
        let s = default_scenario();
        let env = envelope(&s);
        let grid = CoverageGrid::new(100, 100);
        let trace = worst_angle_trace(&env, &s.geometry, &s.link, grid).unwrap();
        assert_eq!(trace.len(), 200);
        // antenna at the notification point: binding receiver is a road corner
        let far = trace[0];
        assert_eq!(far.train_pos_m, -s.geometry.d_s);
        assert_eq!(far.vehicle_pos_m.abs(), s.geometry.r_s);
        assert!(far.margin_db.abs() < 1e-6);
        // antenna on the crossing: corner again, seen broadside
        let at = trace[99];
        assert_eq!(at.train_pos_m, 0.0);
        assert_eq!(at.vehicle_pos_m.abs(), s.geometry.r_s);
        assert!(at.margin_db >= 0.0 && at.margin_db < 1e-3);
    }

    #[test]
    fn close_pairs_are_skipped() {
        let s = default_scenario()
            .with_delta(std::f64::consts::FRAC_PI_4)
            .unwrap();
        let iso = AzimuthPattern::isotropic(1000, 1e6).unwrap();
        // an odd vehicle count puts one sample exactly on the crossing
        let r = verify_coverage(&iso, &s.geometry, &s.link, CoverageGrid::new(11, 11)).unwrap();
        assert!(r.skipped_pairs >= 22);
    }

    #[test]
    fn input_validation() {
        let s = default_scenario();
        let env = envelope(&s);
        assert!(verify_coverage(&env, &s.geometry, &s.link, CoverageGrid::new(1, 10)).is_err());
        let coarse = AzimuthPattern::isotropic(100, 1.0).unwrap();
        assert!(verify_coverage(&coarse, &s.geometry, &s.link, SMALL).is_err());
    }

    #[test]
    fn refinement_is_stable() {
        let s = default_scenario().with_lead_time(15.0).unwrap();
        let env = envelope(&s);
        let a = verify_coverage(&env, &s.geometry, &s.link, CoverageGrid::new(150, 150)).unwrap();
        let b = verify_coverage(&env, &s.geometry, &s.link, CoverageGrid::new(300, 300)).unwrap();
        assert!((a.min_margin_db - b.min_margin_db).abs() < 0.05);
    }

    #[test]
    fn higher_exponent_never_helps() {
        let s = default_scenario();
        let env = envelope(&s);
        let mut last = f64::INFINITY;
        for n in [2.0, 2.5, 3.0, 3.5, 4.0] {
            let p = s.link.with_exponent(n).unwrap();
            let r = verify_coverage(&env, &s.geometry, &p, CoverageGrid::new(60, 60)).unwrap();
            assert!(r.min_margin_db <= last);
            last = r.min_margin_db;
        }
    }
}
