//! Road stopping distances and railway notification distances.
//!
//! These two distances fix the coverage requirement: every vehicle within
//! the road safe distance `r_s` of the crossing must hear the train while
//! the locomotive is within the notification distance `d_s`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::envelope::CrossingGeometry;
use crate::error::{Error, Result};
use crate::link_budget::LinkBudgetParams;
use crate::units::{mph_to_mps, GainDbi, PowerDbm};

/// Average stopping distances on dry, level pavement (mph, meters).
pub const DRY_STOPPING_DISTANCES: [(f64, f64); 5] = [
    (25.0, 26.0),
    (35.0, 42.0),
    (45.0, 60.0),
    (55.0, 81.0),
    (65.0, 105.0),
];

pub const MIN_LEAD_TIME_S: f64 = 1.0;
pub const MAX_LEAD_TIME_S: f64 = 120.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Surface {
    Dry,
    /// Worst case: braking distance doubled.
    Wet,
}

impl FromStr for Surface {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "dry" => Ok(Surface::Dry),
            "wet" => Ok(Surface::Wet),
            other => Err(Error::InvalidParameter(format!(
                "unknown surface {other:?}, expected dry or wet"
            ))),
        }
    }
}

impl fmt::Display for Surface {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Surface::Dry => "dry",
            Surface::Wet => "wet",
        })
    }
}

/// Vehicle speed to stopping distance lookup, linearly interpolated.
#[derive(Debug, Clone, PartialEq)]
pub struct StoppingTable {
    rows: Vec<(f64, f64)>,
}

impl Default for StoppingTable {
    fn default() -> Self {
        Self {
            rows: DRY_STOPPING_DISTANCES.to_vec(),
        }
    }
}

impl StoppingTable {
    pub fn new(rows: Vec<(f64, f64)>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::InvalidParameter("stopping table is empty".into()));
        }
        for w in rows.windows(2) {
            if !(w[1].0 > w[0].0 && w[1].1 > w[0].1) {
                return Err(Error::InvalidParameter(
                    "stopping table speeds and distances must be strictly increasing".into(),
                ));
            }
        }
        Ok(Self { rows })
    }

    pub fn rows(&self) -> &[(f64, f64)] {
        &self.rows
    }

    pub fn speed_range(&self) -> (f64, f64) {
        (self.rows[0].0, self.rows[self.rows.len() - 1].0)
    }

    /// Stopping distance in meters. No extrapolation beyond the table.
    pub fn stopping_distance(&self, speed_mph: f64, surface: Surface) -> Result<f64> {
        let (lo, hi) = self.speed_range();
        if !(speed_mph >= lo && speed_mph <= hi) {
            return Err(Error::out_of_domain(
                "vehicle_speed_mph",
                speed_mph,
                "within the stopping table speed range",
            ));
        }
        // partition_point: first row with speed > target
        let idx = self.rows.partition_point(|&(s, _)| s <= speed_mph);
        let dry = if idx == self.rows.len() {
            self.rows[idx - 1].1
        } else {
            let (s0, d0) = self.rows[idx - 1];
            let (s1, d1) = self.rows[idx];
            d0 + (d1 - d0) * (speed_mph - s0) / (s1 - s0)
        };
        Ok(match surface {
            Surface::Dry => dry,
            Surface::Wet => 2.0 * dry,
        })
    }
}

/// Along-track distance covered by the train during the lead time.
pub fn notification_distance(train_speed_mph: f64, lead_time_s: f64) -> Result<f64> {
    if !(lead_time_s >= 0.0) || !lead_time_s.is_finite() {
        return Err(Error::out_of_domain("lead_time_s", lead_time_s, ">= 0"));
    }
    Ok(mph_to_mps(train_speed_mph)? * lead_time_s)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SafetyScenario {
    pub train_speed_mph: f64,
    pub vehicle_speed_mph: f64,
    pub lead_time_s: f64,
    pub surface: Surface,
}

impl Default for SafetyScenario {
    fn default() -> Self {
        Self {
            train_speed_mph: 79.0,
            vehicle_speed_mph: 65.0,
            lead_time_s: 30.0,
            surface: Surface::Wet,
        }
    }
}

impl SafetyScenario {
    pub fn validate(&self) -> Result<()> {
        if !(self.train_speed_mph > 0.0) {
            return Err(Error::out_of_domain(
                "train_speed_mph",
                self.train_speed_mph,
                "> 0",
            ));
        }
        if !(self.vehicle_speed_mph > 0.0) {
            return Err(Error::out_of_domain(
                "vehicle_speed_mph",
                self.vehicle_speed_mph,
                "> 0",
            ));
        }
        if !(MIN_LEAD_TIME_S..=MAX_LEAD_TIME_S).contains(&self.lead_time_s) {
            return Err(Error::out_of_domain(
                "lead_time_s",
                self.lead_time_s,
                "[1, 120] s",
            ));
        }
        Ok(())
    }

    pub fn notification_distance(&self) -> Result<f64> {
        notification_distance(self.train_speed_mph, self.lead_time_s)
    }

    pub fn road_safe_distance(&self, table: &StoppingTable) -> Result<f64> {
        table.stopping_distance(self.vehicle_speed_mph, self.surface)
    }
}

/// Everything the synthesis pipeline needs for one crossing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scenario {
    pub safety: SafetyScenario,
    pub link: LinkBudgetParams,
    pub geometry: CrossingGeometry,
}

impl Scenario {
    /// Assembles a scenario, deriving `d_s` from the train speed and lead
    /// time and `r_s` from the stopping table unless `road_safe_m` is given.
    /// The train length is set equal to `d_s`.
    pub fn build(
        safety: SafetyScenario,
        link: LinkBudgetParams,
        delta: f64,
        road_safe_m: Option<f64>,
    ) -> Result<Self> {
        safety.validate()?;
        link.validate()?;
        let d_s = safety.notification_distance()?;
        let r_s = match road_safe_m {
            Some(r) => r,
            None => safety.road_safe_distance(&StoppingTable::default())?,
        };
        let geometry = CrossingGeometry::new(delta, d_s, r_s, d_s)?;
        Ok(Self {
            safety,
            link,
            geometry,
        })
    }

    /// Same crossing, different lead time (and so a different `d_s`).
    pub fn with_lead_time(&self, lead_time_s: f64) -> Result<Self> {
        let safety = SafetyScenario {
            lead_time_s,
            ..self.safety
        };
        Self::build(
            safety,
            self.link,
            self.geometry.delta,
            Some(self.geometry.r_s),
        )
    }

    pub fn with_exponent(&self, n: f64) -> Result<Self> {
        Ok(Self {
            link: self.link.with_exponent(n)?,
            ..*self
        })
    }

    pub fn with_delta(&self, delta: f64) -> Result<Self> {
        let g = self.geometry;
        Ok(Self {
            geometry: CrossingGeometry::new(delta, g.d_s, g.r_s, g.train_length)?,
            ..*self
        })
    }
}

/// 79 mph train, 65 mph vehicle on wet pavement, 30 s lead, 24 dBm
/// transmitter, −90 dBm receiver at 5.9 GHz, perpendicular crossing, n = 3.
pub fn default_scenario() -> Scenario {
    let link = LinkBudgetParams::from_db(
        PowerDbm(24.0),
        PowerDbm(-90.0),
        GainDbi(0.0),
        0.0,
        0.0508,
        3.0,
    )
    .expect("default link parameters are valid");
    Scenario::build(
        SafetyScenario::default(),
        link,
        std::f64::consts::FRAC_PI_2,
        None,
    )
    .expect("default scenario is valid")
}
