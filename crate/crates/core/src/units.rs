//! Unit conversions shared by the rest of the crate.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Meters per second in one statute mile per hour.
pub const MPS_PER_MPH: f64 = 0.44704;

/// Power level in decibel-milliwatts.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct PowerDbm(pub f64);

/// Antenna gain in decibels relative to an isotropic radiator.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct GainDbi(pub f64);

pub fn dbm_to_watts(p: PowerDbm) -> f64 {
    10f64.powf((p.0 - 30.0) / 10.0)
}

pub fn watts_to_dbm(watts: f64) -> PowerDbm {
    PowerDbm(10.0 * watts.log10() + 30.0)
}

pub fn dbi_to_linear(g: GainDbi) -> f64 {
    db_to_ratio(g.0)
}

pub fn linear_to_dbi(gain: f64) -> GainDbi {
    GainDbi(ratio_to_db(gain))
}

#[inline]
pub fn db_to_ratio(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

#[inline]
pub fn ratio_to_db(ratio: f64) -> f64 {
    10.0 * ratio.log10()
}

pub fn mph_to_mps(mph: f64) -> Result<f64> {
    if !(mph >= 0.0) || !mph.is_finite() {
        return Err(Error::out_of_domain("speed_mph", mph, "finite, >= 0"));
    }
    Ok(mph * MPS_PER_MPH)
}
