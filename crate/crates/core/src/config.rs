//! Flat `key=value` scenario files.
//!
//! ```text
//! # 30 s lead, perpendicular crossing
//! train_speed_mph = 79
//! vehicle_speed_mph = 65
//! lead_time_s = 30
//! surface = wet
//! pt_dbm = 24
//! pmin_dbm = -90
//! gr_dbi = 0
//! loss_db = 0
//! wavelength_m = 0.0508
//! n = 3
//! delta_deg = 90
//! rs_m = 210
//! ```
//!
//! Every key is optional; missing keys take the default scenario values.
//! `rs_m` overrides the road safe distance derived from the stopping table.
//! Blank lines and `#` comments are ignored.

use std::io::BufRead;

use crate::error::{Error, Result};
use crate::link_budget::LinkBudgetParams;
use crate::safety::{default_scenario, SafetyScenario, Scenario, Surface};
use crate::units::{linear_to_dbi, ratio_to_db, watts_to_dbm, GainDbi, PowerDbm};

/// Parsed configuration, before defaults are applied.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ScenarioConfig {
    pub train_speed_mph: Option<f64>,
    pub vehicle_speed_mph: Option<f64>,
    pub lead_time_s: Option<f64>,
    pub surface: Option<Surface>,
    pub pt_dbm: Option<f64>,
    pub pmin_dbm: Option<f64>,
    pub gr_dbi: Option<f64>,
    pub loss_db: Option<f64>,
    pub wavelength_m: Option<f64>,
    pub n: Option<f64>,
    pub delta_deg: Option<f64>,
    pub rs_m: Option<f64>,
}

impl ScenarioConfig {
    pub fn parse<R: BufRead>(reader: R) -> Result<Self> {
        let mut cfg = Self::default();
        for (idx, line) in reader.lines().enumerate() {
            let lineno = idx + 1;
            let line = line?;
            let content = line.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content.split_once('=').ok_or_else(|| {
                Error::parse(lineno, format!("expected key=value, got {content:?}"))
            })?;
            cfg.set(key.trim(), value.trim())
                .map_err(|msg| Error::parse(lineno, msg))?;
        }
        Ok(cfg)
    }

    fn set(&mut self, key: &str, value: &str) -> std::result::Result<(), String> {
        if key == "surface" {
            self.surface = Some(value.parse().map_err(|e: Error| e.to_string())?);
            return Ok(());
        }
        let slot = match key {
            "train_speed_mph" => &mut self.train_speed_mph,
            "vehicle_speed_mph" => &mut self.vehicle_speed_mph,
            "lead_time_s" => &mut self.lead_time_s,
            "pt_dbm" => &mut self.pt_dbm,
            "pmin_dbm" => &mut self.pmin_dbm,
            "gr_dbi" => &mut self.gr_dbi,
            "loss_db" => &mut self.loss_db,
            "wavelength_m" => &mut self.wavelength_m,
            "n" => &mut self.n,
            "delta_deg" => &mut self.delta_deg,
            "rs_m" => &mut self.rs_m,
            other => return Err(format!("unknown key {other:?}")),
        };
        let v: f64 = value
            .parse()
            .map_err(|_| format!("{key}: {value:?} is not a number"))?;
        if !v.is_finite() {
            return Err(format!("{key}: value must be finite"));
        }
        *slot = Some(v);
        Ok(())
    }

    /// Applies the configuration on top of the default scenario.
    pub fn to_scenario(&self) -> Result<Scenario> {
        let base = default_scenario();
        let safety = SafetyScenario {
            train_speed_mph: self.train_speed_mph.unwrap_or(base.safety.train_speed_mph),
            vehicle_speed_mph: self
                .vehicle_speed_mph
                .unwrap_or(base.safety.vehicle_speed_mph),
            lead_time_s: self.lead_time_s.unwrap_or(base.safety.lead_time_s),
            surface: self.surface.unwrap_or(base.safety.surface),
        };
        let link = LinkBudgetParams::from_db(
            PowerDbm(self.pt_dbm.unwrap_or(watts_to_dbm(base.link.p_t).0)),
            PowerDbm(self.pmin_dbm.unwrap_or(watts_to_dbm(base.link.p_min).0)),
            GainDbi(self.gr_dbi.unwrap_or(linear_to_dbi(base.link.g_r).0)),
            self.loss_db.unwrap_or(ratio_to_db(base.link.system_loss)),
            self.wavelength_m.unwrap_or(base.link.wavelength),
            self.n.unwrap_or(base.link.n),
        )?;
        let delta = self
            .delta_deg
            .map(f64::to_radians)
            .unwrap_or(base.geometry.delta);
        Scenario::build(safety, link, delta, self.rs_m)
    }
}
