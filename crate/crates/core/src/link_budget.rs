//! Received power and required transmit gain under a log-distance path-loss
//! model.
//!
//! The free-space link equation is generalized by raising distance to the
//! path-loss exponent `n` with a 1 m reference distance:
//!
//! ```text
//! P_r = P_t · G_t · G_r · λ² / ((4π)² · d^n · L)
//! ```
//!
//! Solving for `G_t` at `P_r = P_min` gives the required gain `K · d^n`,
//! where `K` is the gain needed at the reference distance.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::units::{db_to_ratio, dbi_to_linear, dbm_to_watts, GainDbi, PowerDbm};

/// Distances below this are inside the reference distance and rejected.
pub const REFERENCE_DISTANCE_M: f64 = 1.0;

pub const MIN_EXPONENT: f64 = 2.0;
pub const MAX_EXPONENT: f64 = 5.0;

/// Link parameters, all in linear units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkBudgetParams {
    /// Transmit power, watts.
    pub p_t: f64,
    /// Receiver sensitivity, watts.
    pub p_min: f64,
    /// Receive antenna gain, linear.
    pub g_r: f64,
    /// System loss factor, linear, at least 1.
    pub system_loss: f64,
    /// Carrier wavelength, meters.
    pub wavelength: f64,
    /// Path-loss exponent.
    pub n: f64,
}

impl LinkBudgetParams {
    pub fn new(
        p_t: f64,
        p_min: f64,
        g_r: f64,
        system_loss: f64,
        wavelength: f64,
        n: f64,
    ) -> Result<Self> {
        let params = Self {
            p_t,
            p_min,
            g_r,
            system_loss,
            wavelength,
            n,
        };
        params.validate()?;
        Ok(params)
    }

    /// Builds parameters from the decibel quantities used in configuration
    /// files.
    pub fn from_db(
        pt: PowerDbm,
        pmin: PowerDbm,
        gr: GainDbi,
        loss_db: f64,
        wavelength: f64,
        n: f64,
    ) -> Result<Self> {
        Self::new(
            dbm_to_watts(pt),
            dbm_to_watts(pmin),
            dbi_to_linear(gr),
            db_to_ratio(loss_db),
            wavelength,
            n,
        )
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |name: &'static str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::out_of_domain(name, v, "finite, > 0"))
            }
        };
        positive("p_t", self.p_t)?;
        positive("p_min", self.p_min)?;
        positive("g_r", self.g_r)?;
        positive("wavelength", self.wavelength)?;
        if !(self.system_loss >= 1.0) || !self.system_loss.is_finite() {
            return Err(Error::out_of_domain(
                "system_loss",
                self.system_loss,
                "finite, >= 1",
            ));
        }
        if !(MIN_EXPONENT..=MAX_EXPONENT).contains(&self.n) {
            return Err(Error::out_of_domain("n", self.n, "[2, 5]"));
        }
        Ok(())
    }

    pub fn with_exponent(self, n: f64) -> Result<Self> {
        let params = Self { n, ..self };
        params.validate()?;
        Ok(params)
    }

    pub fn with_transmit_power(self, p_t: f64) -> Result<Self> {
        let params = Self { p_t, ..self };
        params.validate()?;
        Ok(params)
    }

    /// Transmit gain needed to close the link at the 1 m reference distance.
    pub fn reference_gain(&self) -> f64 {
        let four_pi = 4.0 * PI;
        self.p_min * four_pi * four_pi * self.system_loss
            / (self.p_t * self.g_r * self.wavelength * self.wavelength)
    }

    /// Received power in watts for transmit gain `g_t` at `distance` meters.
    pub fn received_power(&self, g_t: f64, distance: f64) -> Result<f64> {
        if !(g_t > 0.0) {
            return Err(Error::out_of_domain("g_t", g_t, "> 0"));
        }
        check_distance(distance)?;
        let four_pi = 4.0 * PI;
        Ok(
            self.p_t * g_t * self.g_r * self.wavelength * self.wavelength
                / (four_pi * four_pi * distance.powf(self.n) * self.system_loss),
        )
    }

    /// Smallest transmit gain (linear) that delivers `p_min` at `distance`.
    pub fn required_gain(&self, distance: f64) -> Result<f64> {
        check_distance(distance)?;
        Ok(self.reference_gain() * distance.powf(self.n))
    }

    /// Distance at which transmit gain `g_t` delivers exactly `p_min`.
    pub fn max_range(&self, g_t: f64) -> Result<f64> {
        if !(g_t > 0.0) {
            return Err(Error::out_of_domain("g_t", g_t, "> 0"));
        }
        Ok((g_t / self.reference_gain()).powf(1.0 / self.n))
    }
}

fn check_distance(distance: f64) -> Result<()> {
    if distance >= REFERENCE_DISTANCE_M && distance.is_finite() {
        Ok(())
    } else {
        Err(Error::out_of_domain("distance", distance, ">= 1 m"))
    }
}
