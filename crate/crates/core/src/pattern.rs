//! Uniformly sampled azimuth gain patterns and their CSV form.
//!
//! Bin `k` is centered on azimuth `k·Δ` with `Δ = 2π / bins`, measured from
//! the railway axis in the direction of travel. Gains are linear.

use std::f64::consts::TAU;
use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::units::{db_to_ratio, ratio_to_db};

pub const CSV_HEADER: &str = "theta_deg,gain_dbi";

/// Slack, in bins, for deciding that an angle sits on a bin boundary.
const BOUNDARY_EPS: f64 = 1e-9;

/// Allowed deviation of a CSV angle from the uniform grid, degrees. Angles are
/// written with four decimals.
const CSV_ANGLE_TOL_DEG: f64 = 1.0e-4 + 1e-9;

/// How dB values are rounded to four decimals on output.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DbRounding {
    #[default]
    Nearest,
    /// Round toward +∞. Used for requirement envelopes so that a reloaded
    /// envelope never asks for less than the original.
    Up,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AzimuthPattern {
    resolution: f64,
    gains: Vec<f64>,
}

impl AzimuthPattern {
    /// Number of bins needed to cover the circle at `resolution` radians.
    pub fn bins_for_resolution(resolution: f64) -> Result<usize> {
        if !(resolution > 0.0 && resolution <= TAU) {
            return Err(Error::out_of_domain(
                "resolution",
                resolution,
                "(0, 2π] rad",
            ));
        }
        // the small slack keeps exact divisors of 2π from gaining a bin
        Ok(((TAU / resolution) - 1e-9).ceil().max(1.0) as usize)
    }

    pub fn from_gains(gains: Vec<f64>) -> Result<Self> {
        if gains.is_empty() {
            return Err(Error::InvalidParameter("pattern has no bins".into()));
        }
        if let Some((k, g)) = gains
            .iter()
            .enumerate()
            .find(|(_, g)| !(**g >= 0.0) || !g.is_finite())
        {
            return Err(Error::InvalidParameter(format!(
                "bin {k} has gain {g}; gains must be finite and >= 0"
            )));
        }
        Ok(Self {
            resolution: TAU / gains.len() as f64,
            gains,
        })
    }

    /// Samples `f(θ)` at every bin center.
    pub fn from_fn(bins: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        let resolution = TAU / bins as f64;
        Self::from_gains((0..bins).map(|k| f(k as f64 * resolution)).collect())
    }

    pub fn isotropic(bins: usize, gain: f64) -> Result<Self> {
        Self::from_gains(vec![gain; bins])
    }

    pub fn resolution(&self) -> f64 {
        self.resolution
    }

    pub fn len(&self) -> usize {
        self.gains.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gains.is_empty()
    }

    pub fn gains(&self) -> &[f64] {
        &self.gains
    }

    /// Bin center in radians.
    pub fn theta(&self, bin: usize) -> f64 {
        bin as f64 * self.resolution
    }

    fn bin_position(&self, theta: f64) -> f64 {
        theta.rem_euclid(TAU) / self.resolution
    }

    /// Gain of the bin whose center is nearest to `theta`.
    pub fn gain_at(&self, theta: f64) -> f64 {
        let k = self.bin_position(theta).round() as usize % self.len();
        self.gains[k]
    }

    /// Gain of the bin containing `theta`; on a shared bin edge the lower of
    /// the two neighbors is used.
    pub fn gain_pessimistic(&self, theta: f64) -> f64 {
        let u = self.bin_position(theta);
        let lower = u.floor();
        let m = self.len();
        if (u - lower - 0.5).abs() < BOUNDARY_EPS {
            let a = lower as usize % m;
            let b = (a + 1) % m;
            self.gains[a].min(self.gains[b])
        } else {
            self.gains[u.round() as usize % m]
        }
    }

    /// Index and value of the first maximum.
    pub fn peak(&self) -> (usize, f64) {
        self.gains
            .iter()
            .copied()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |best, (k, g)| {
                if g > best.1 {
                    (k, g)
                } else {
                    best
                }
            })
    }

    pub fn peak_dbi(&self) -> f64 {
        ratio_to_db(self.peak().1)
    }

    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::from_gains(self.gains.iter().map(|g| g * factor).collect())
    }

    pub fn scaled_db(&self, db: f64) -> Result<Self> {
        self.scaled(db_to_ratio(db))
    }

    pub fn gains_dbi(&self) -> impl Iterator<Item = f64> + '_ {
        self.gains.iter().map(|&g| ratio_to_db(g))
    }

    pub fn ensure_same_grid(&self, other: &Self) -> Result<()> {
        if self.len() == other.len() {
            Ok(())
        } else {
            Err(Error::ResolutionMismatch {
                left: self.len(),
                right: other.len(),
            })
        }
    }

    pub fn write_csv<W: Write>(&self, mut w: W, rounding: DbRounding) -> std::io::Result<()> {
        writeln!(w, "{CSV_HEADER}")?;
        for (k, db) in self.gains_dbi().enumerate() {
            let theta_deg = self.theta(k).to_degrees();
            writeln!(
                w,
                "{},{}",
                fixed4(theta_deg),
                fixed4(round_db(db, rounding))
            )?;
        }
        Ok(())
    }

    /// Reads a `theta_deg,gain_dbi` CSV. Angles must start at 0, increase
    /// strictly and sit on a uniform full-circle grid.
    pub fn read_csv<R: BufRead>(r: R) -> Result<Self> {
        let mut lines = r.lines().enumerate();
        match lines.next() {
            Some((_, line)) => {
                let line = line?;
                if line.trim() != CSV_HEADER {
                    return Err(Error::parse(
                        1,
                        format!("expected header {CSV_HEADER:?}, found {:?}", line.trim()),
                    ));
                }
            }
            None => return Err(Error::parse(1, "empty pattern file")),
        }

        let mut rows: Vec<(usize, f64, f64)> = Vec::new();
        for (idx, line) in lines {
            let lineno = idx + 1;
            let line = line?;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let mut fields = line.split(',');
            let (Some(t), Some(g), None) = (fields.next(), fields.next(), fields.next()) else {
                return Err(Error::parse(lineno, "expected two comma-separated fields"));
            };
            let theta: f64 = t
                .trim()
                .parse()
                .map_err(|_| Error::parse(lineno, format!("bad angle {t:?}")))?;
            let gain: f64 = g
                .trim()
                .parse()
                .map_err(|_| Error::parse(lineno, format!("bad gain {g:?}")))?;
            if !theta.is_finite() || !(0.0..360.0).contains(&theta) {
                return Err(Error::parse(
                    lineno,
                    format!("angle {theta} outside [0, 360)"),
                ));
            }
            if gain.is_nan() || gain == f64::INFINITY {
                return Err(Error::parse(lineno, format!("gain {gain} is not a level")));
            }
            if let Some(&(_, prev, _)) = rows.last() {
                if theta <= prev {
                    return Err(Error::parse(
                        lineno,
                        format!("angles must increase strictly ({theta} after {prev})"),
                    ));
                }
            }
            rows.push((lineno, theta, gain));
        }
        if rows.is_empty() {
            return Err(Error::parse(2, "pattern has no rows"));
        }
        let step = 360.0 / rows.len() as f64;
        for (k, &(lineno, theta, _)) in rows.iter().enumerate() {
            if (theta - k as f64 * step).abs() > CSV_ANGLE_TOL_DEG {
                return Err(Error::parse(
                    lineno,
                    format!(
                        "angle {theta} is off the uniform {step}° grid implied by {} rows",
                        rows.len()
                    ),
                ));
            }
        }
        Self::from_gains(rows.into_iter().map(|(_, _, db)| db_to_ratio(db)).collect())
    }
}

fn round_db(db: f64, rounding: DbRounding) -> f64 {
    if !db.is_finite() {
        return db;
    }
    let scaled = db * 1e4;
    let r = match rounding {
        DbRounding::Nearest => scaled.round(),
        DbRounding::Up => scaled.ceil(),
    } / 1e4;
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

/// Four-decimal fixed format without negative zero.
pub fn fixed4(x: f64) -> String {
    let s = format!("{x:.4}");
    if s == "-0.0000" {
        "0.0000".to_string()
    } else {
        s
    }
}
