//! Aperture sizing from a required azimuth envelope.
//!
//! The vertical extent follows from a normalization argument: if the gain
//! is spread uniformly over elevations `[0, φ_max]` and is zero elsewhere,
//! the discrete average over a `(2π/Δ)²` angular grid must be one, so
//!
//! ```text
//! φ_max = 4π² / (Δ · Σ_θ G(θ))
//! ```
//!
//! Physical dimensions then come from the `51λ / beamwidth°` rule of thumb.

use serde::{Deserialize, Serialize};

use crate::envelope::{synthesize_envelope, CrossingGeometry};
use crate::error::{Error, Result};
use crate::link_budget::LinkBudgetParams;
use crate::pattern::AzimuthPattern;
use std::f64::consts::{PI, TAU};

/// Beamwidth-aperture constant, degrees.
pub const BEAMWIDTH_APERTURE_DEG: f64 = 51.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AntennaDimensions {
    pub max_gain_dbi: f64,
    pub phi_max_deg: f64,
    pub length_m: f64,
    pub width_m: f64,
    pub horizontal_3db_beamwidth_deg: f64,
}

/// Vertical angular extent φ_max in radians, capped at a full circle.
pub fn vertical_beamwidth(pattern: &AzimuthPattern) -> Result<f64> {
    let total: f64 = pattern.gains().iter().sum();
    if !(total > 0.0) {
        return Err(Error::DegeneratePattern);
    }
    let phi = 4.0 * PI * PI / (pattern.resolution() * total);
    Ok(phi.min(TAU))
}

fn aperture(beamwidth_deg: f64, wavelength: f64, name: &'static str) -> Result<f64> {
    if !(beamwidth_deg > 0.0 && beamwidth_deg <= 360.0) {
        return Err(Error::out_of_domain(
            name,
            beamwidth_deg,
            "(0, 360] degrees",
        ));
    }
    if !(wavelength > 0.0) {
        return Err(Error::out_of_domain("wavelength", wavelength, "> 0"));
    }
    Ok(BEAMWIDTH_APERTURE_DEG * wavelength / beamwidth_deg)
}

/// Aperture length (m) from the vertical 3 dB beamwidth in degrees.
pub fn aperture_length(phi_3db_deg: f64, wavelength: f64) -> Result<f64> {
    aperture(phi_3db_deg, wavelength, "phi_3db_deg")
}

/// Aperture width (m) from the horizontal 3 dB beamwidth in degrees.
pub fn aperture_width(theta_3db_deg: f64, wavelength: f64) -> Result<f64> {
    aperture(theta_3db_deg, wavelength, "theta_3db_deg")
}

/// Number of contiguous bins around `peak_bin` whose gain is at least half
/// the gain at `peak_bin`, wrapping around the circle.
pub fn half_power_bins(pattern: &AzimuthPattern, peak_bin: usize) -> usize {
    let gains = pattern.gains();
    let m = gains.len();
    let half = gains[peak_bin] / 2.0;
    let mut count = 1;
    let mut right = 0;
    while count < m && gains[(peak_bin + right + 1) % m] >= half {
        right += 1;
        count += 1;
    }
    let mut left = 0;
    while count < m && gains[(peak_bin + m - left - 1) % m] >= half {
        left += 1;
        count += 1;
    }
    count
}

/// Full 3 dB width of the lobe around the strongest bin, degrees.
pub fn main_lobe_3db_beamwidth(pattern: &AzimuthPattern) -> f64 {
    let (peak, _) = pattern.peak();
    (half_power_bins(pattern, peak) as f64 * pattern.resolution()).to_degrees()
}

/// Horizontal 3 dB beamwidth used for the width rule: the half-power lobe
/// around the strongest forward-looking bin, counted twice for the matching
/// rear lobe, capped at 360°.
pub fn horizontal_3db_beamwidth(pattern: &AzimuthPattern) -> f64 {
    let forward_peak = pattern
        .gains()
        .iter()
        .enumerate()
        .filter(|(k, _)| pattern.theta(*k).cos() > 0.0)
        .fold(None, |best: Option<(usize, f64)>, (k, &g)| match best {
            Some((_, bg)) if bg >= g => best,
            _ => Some((k, g)),
        })
        .map(|(k, _)| k)
        .unwrap_or_else(|| pattern.peak().0);
    let lobe = half_power_bins(pattern, forward_peak) as f64 * pattern.resolution();
    (2.0 * lobe).to_degrees().min(360.0)
}

/// Smallest antenna meeting the crossing requirement.
pub fn size_antenna(
    geom: &CrossingGeometry,
    params: &LinkBudgetParams,
    resolution: f64,
) -> Result<AntennaDimensions> {
    let envelope = synthesize_envelope(geom, params, resolution)?;
    dimensions_for(&envelope, params.wavelength)
}

/// Sizing for an already synthesized envelope.
pub fn dimensions_for(envelope: &AzimuthPattern, wavelength: f64) -> Result<AntennaDimensions> {
    // φ_max doubles as the vertical 3 dB beamwidth
    let phi_max_deg = vertical_beamwidth(envelope)?.to_degrees();
    let horizontal = horizontal_3db_beamwidth(envelope);
    Ok(AntennaDimensions {
        max_gain_dbi: envelope.peak_dbi(),
        phi_max_deg,
        length_m: aperture_length(phi_max_deg, wavelength)?,
        width_m: aperture_width(horizontal, wavelength)?,
        horizontal_3db_beamwidth_deg: horizontal,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::envelope::DEFAULT_RESOLUTION;
    use crate::safety::default_scenario;
    use approx::assert_relative_eq;

    fn within_pct(got: f64, want: f64, pct: f64) -> bool {
        ((got - want) / want).abs() <= pct / 100.0
    }

    #[test]
    fn aperture_examples() {
        assert!(within_pct(
            aperture_length(6.4, 0.0508).unwrap(),
            0.407,
            5.0
        ));
        assert!(within_pct(
            aperture_length(360.0, 0.0508).unwrap(),
            0.0072,
            5.0
        ));
        assert_relative_eq!(aperture_length(51.0, 1.0).unwrap(), 1.0);
        assert!(within_pct(
            aperture_width(50.8, 0.0508).unwrap(),
            0.051,
            5.0
        ));
        assert_relative_eq!(aperture_width(51.0, 1.0).unwrap(), 1.0);
        assert_relative_eq!(
            aperture_width(20.0, 0.05).unwrap(),
            2.0 * aperture_width(40.0, 0.05).unwrap()
        );
        assert!(aperture_length(0.0, 0.05).is_err());
        assert!(aperture_width(361.0, 0.05).is_err());
    }

    #[test]
    fn vertical_beamwidth_rejects_dead_pattern() {
        let dead = AzimuthPattern::isotropic(100, 0.0).unwrap();
        assert!(matches!(
            vertical_beamwidth(&dead),
            Err(Error::DegeneratePattern)
        ));
    }

    #[test]
    fn isotropic_unit_gain_fills_the_circle() {
        // Σ G · Δ = 2π → φ_max = 2π exactly
        let iso = AzimuthPattern::isotropic(1000, 1.0).unwrap();
        assert_relative_eq!(vertical_beamwidth(&iso).unwrap(), TAU, max_relative = 1e-12);
        let hot = AzimuthPattern::isotropic(1000, 4.0).unwrap();
        assert_relative_eq!(
            vertical_beamwidth(&hot).unwrap(),
            PI / 2.0,
            max_relative = 1e-12
        );
        assert_eq!(horizontal_3db_beamwidth(&iso), 360.0);
    }

    #[test]
    fn spike_beamwidth_is_two_bins() {
        let mut gains = vec![0.01; 360];
        gains[0] = 1.0;
        let spike = AzimuthPattern::from_gains(gains).unwrap();
        assert_relative_eq!(horizontal_3db_beamwidth(&spike), 2.0, max_relative = 1e-12);
        assert_relative_eq!(main_lobe_3db_beamwidth(&spike), 1.0, max_relative = 1e-12);
    }

    #[test]
    fn envelope_horizontal_beamwidth_matches_corner_branch_solution() {
        // Oracle: on the corner branch K·r_s³/sin³θ = peak/2 gives the
        // half-power edge of the forward lobe.
        let s = default_scenario();
        let g = s.geometry;
        let peak_dist_sq = g.r_s * g.r_s + g.d_s * g.d_s;
        let edge = (g.r_s / (peak_dist_sq.sqrt() / 2f64.powf(1.0 / 3.0))).asin();
        let expected = 4.0 * edge.to_degrees();
        assert!((expected - 56.8).abs() < 0.2);
        let env = synthesize_envelope(&g, &s.link, DEFAULT_RESOLUTION).unwrap();
        let got = horizontal_3db_beamwidth(&env);
        assert!(
            (got - expected).abs() <= 4.0 * DEFAULT_RESOLUTION.to_degrees(),
            "{got}"
        );
    }

    #[test]
    fn default_sizing() {
        let s = default_scenario();
        let d = size_antenna(&s.geometry, &s.link, DEFAULT_RESOLUTION).unwrap();
        assert!((d.max_gain_dbi - 24.8).abs() <= 0.2);
        assert!(within_pct(d.phi_max_deg, 6.4, 7.0), "{}", d.phi_max_deg);
        assert!(within_pct(d.length_m, 0.407, 7.0), "{}", d.length_m);
        assert_relative_eq!(
            d.length_m * d.phi_max_deg,
            BEAMWIDTH_APERTURE_DEG * s.link.wavelength,
            max_relative = 1e-12
        );
    }

    #[test]
    fn exponent_grid_rows() {
        let s = default_scenario();
        let n4 = s.with_exponent(4.0).unwrap();
        let d = size_antenna(&n4.geometry, &n4.link, DEFAULT_RESOLUTION).unwrap();
        assert!((d.max_gain_dbi - 55.2).abs() <= 0.2);
        assert!(within_pct(d.length_m, 379.7, 10.0), "{}", d.length_m);

        let n2 = s.with_exponent(2.0).unwrap().with_lead_time(15.0).unwrap();
        let d = size_antenna(&n2.geometry, &n2.link, DEFAULT_RESOLUTION).unwrap();
        assert!((d.max_gain_dbi - -11.0).abs() <= 0.2);
        assert_eq!(d.phi_max_deg, 360.0);
    }

    #[test]
    fn normalization_is_self_consistent() {
        // Discrete double sum of the implied 3-D gain over a (2π/Δ)² grid.
        let s = default_scenario();
        for lead in [15.0, 30.0] {
            let sc = s.with_lead_time(lead).unwrap();
            let env = synthesize_envelope(&sc.geometry, &sc.link, DEFAULT_RESOLUTION).unwrap();
            let phi = vertical_beamwidth(&env).unwrap();
            let step = env.resolution();
            let cells = env.len();
            let lit = (0..cells)
                .filter(|j| (*j as f64 + 0.5) * step <= phi)
                .count() as f64;
            let total: f64 = env.gains().iter().map(|g| g * lit).sum();
            let avg = total / (cells as f64 * cells as f64);
            assert!((avg - 1.0).abs() <= 0.01, "lead {lead}: {avg}");
        }
    }

    #[test]
    fn longer_lead_needs_bigger_antenna() {
        let s = default_scenario();
        let rows: Vec<AntennaDimensions> = [15.0, 20.0, 25.0, 30.0]
            .iter()
            .map(|&t| {
                let sc = s.with_lead_time(t).unwrap();
                size_antenna(&sc.geometry, &sc.link, DEFAULT_RESOLUTION).unwrap()
            })
            .collect();
        for w in rows.windows(2) {
            assert!(w[1].max_gain_dbi > w[0].max_gain_dbi);
            assert!(w[1].phi_max_deg < w[0].phi_max_deg);
            assert!(w[1].length_m > w[0].length_m);
        }
    }
}
