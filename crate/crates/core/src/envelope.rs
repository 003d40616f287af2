//! Minimal azimuthal gain envelope for a train-mounted warning transmitter.
//!
//! Coordinates: crossing at the origin, railway along +x, the train heading
//! +x with its antenna on the locomotive. The road leaves the crossing at
//! angle `δ` to the direction of travel. Azimuth `θ` is measured from the
//! heading.
//!
//! With the antenna at the edge of the notification zone (`d_s` before the
//! crossing), a road point at offset `r` is seen at
//!
//! ```text
//! tan θ = r sin δ / (d_s + r cos δ)
//! ```
//!
//! For `θ ≤ θ*` (the angle of the far road corner) the binding receiver is
//! that road point and the requirement is `K · R^n` with `R` the distance to
//! it. Beyond `θ*` the binding receiver is the road corner itself, seen from
//! a train somewhere between the notification point and the crossing, at
//! distance `r_s sin δ / sin θ`. Fore/aft and left/right symmetry fold every
//! azimuth into `[0, π/2]`.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::link_budget::LinkBudgetParams;
use crate::pattern::AzimuthPattern;
use crate::units::db_to_ratio;

/// Default synthesis resolution, radians.
pub const DEFAULT_RESOLUTION: f64 = 0.001;
/// Coarsest resolution accepted for synthesis, radians.
pub const MAX_SYNTHESIS_RESOLUTION: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CrossingGeometry {
    /// Angle between railway and road, radians, in (0, π/2].
    pub delta: f64,
    /// Railway notification distance, meters.
    pub d_s: f64,
    /// Road safe distance on each side of the crossing, meters.
    pub r_s: f64,
    /// Train length, meters. The antenna rides at the front.
    pub train_length: f64,
}

impl CrossingGeometry {
    pub fn new(delta: f64, d_s: f64, r_s: f64, train_length: f64) -> Result<Self> {
        let g = Self {
            delta,
            d_s,
            r_s,
            train_length,
        };
        g.validate()?;
        if delta < FRAC_PI_4 {
            log::warn!(
                "intersection angle {:.2}° is below 45°; unusually skewed crossing",
                delta.to_degrees()
            );
        }
        Ok(g)
    }

    /// Right-angle crossing with train length equal to `d_s`.
    pub fn perpendicular(d_s: f64, r_s: f64) -> Result<Self> {
        Self::new(FRAC_PI_2, d_s, r_s, d_s)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.delta > 0.0 && self.delta <= FRAC_PI_2) {
            return Err(Error::out_of_domain("delta", self.delta, "(0, π/2] rad"));
        }
        for (name, v) in [
            ("d_s", self.d_s),
            ("r_s", self.r_s),
            ("train_length", self.train_length),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::out_of_domain(name, v, "finite, > 0"));
            }
        }
        Ok(())
    }

    /// Azimuth of the far road corner seen from the notification point.
    pub fn boundary_angle(&self) -> f64 {
        let (s, c) = self.delta.sin_cos();
        (self.r_s * s / (self.d_s + self.r_s * c)).atan()
    }

    /// Road offset seen at azimuth `theta` from the notification point.
    pub fn road_offset_from_angle(&self, theta: f64) -> Result<f64> {
        let limit = self.boundary_angle();
        if !(theta >= 0.0 && theta <= limit * (1.0 + 1e-12)) {
            return Err(Error::out_of_domain("theta", theta, "[0, boundary angle]"));
        }
        Ok(self.offset_unchecked(theta))
    }

    fn offset_unchecked(&self, theta: f64) -> f64 {
        let (s, c) = self.delta.sin_cos();
        let t = theta.tan();
        self.d_s * t / (s - c * t)
    }

    /// Height of the road corner above the railway line.
    fn corner_height(&self) -> f64 {
        self.r_s * self.delta.sin()
    }
}

/// Maps any azimuth onto `[0, π/2]` using left/right and fore/aft symmetry.
pub fn fold_angle(theta: f64) -> f64 {
    let mut t = theta.rem_euclid(TAU);
    if t > PI {
        t = TAU - t;
    }
    if t > FRAC_PI_2 {
        t = PI - t;
    }
    t
}

/// Required transmit gain (linear) at azimuth `theta`.
pub fn required_gain_at_angle(
    theta: f64,
    geom: &CrossingGeometry,
    params: &LinkBudgetParams,
) -> f64 {
    let t = fold_angle(theta);
    let k = params.reference_gain();
    let half_n = params.n / 2.0;
    if t <= geom.boundary_angle() {
        let (s, c) = geom.delta.sin_cos();
        let r = geom.offset_unchecked(t);
        let dist_sq = (r * s).powi(2) + (r * c + geom.d_s).powi(2);
        k * dist_sq.powf(half_n)
    } else {
        let h = geom.corner_height();
        let cot = t.cos() / t.sin();
        k * ((h * cot).powi(2) + h * h).powf(half_n)
    }
}

/// Bin count used for synthesis: enough bins for `resolution`, rounded up
/// to a multiple of four so both mirror axes fall on bin centers.
pub fn synthesis_bins(resolution: f64) -> Result<usize> {
    if !(resolution > 0.0 && resolution <= MAX_SYNTHESIS_RESOLUTION) {
        return Err(Error::out_of_domain(
            "resolution",
            resolution,
            "(0, 0.01] rad",
        ));
    }
    let bins = AzimuthPattern::bins_for_resolution(resolution)?;
    Ok(bins.div_ceil(4) * 4)
}

/// Samples the required gain on a full-circle grid. Each bin holds the
/// maximum requirement over its angular extent, so the pattern is an upper
/// envelope of the continuous requirement.
pub fn synthesize_envelope(
    geom: &CrossingGeometry,
    params: &LinkBudgetParams,
    resolution: f64,
) -> Result<AzimuthPattern> {
    geom.validate()?;
    params.validate()?;
    let bins = synthesis_bins(resolution)?;
    let quarter = bins / 4;
    let step = TAU / bins as f64;
    let critical = geom.boundary_angle();

    // Requirement is increasing on [0, θ*] and decreasing on [θ*, π/2], so
    // the extent maximum is at an edge, the center, or θ* itself.
    let first_quadrant: Vec<f64> = (0..=quarter)
        .map(|k| {
            let center = k as f64 * step;
            let lo = (center - step / 2.0).max(0.0);
            let hi = (center + step / 2.0).min(FRAC_PI_2);
            let mut g = [lo, center, hi]
                .into_iter()
                .map(|t| required_gain_at_angle(t, geom, params))
                .fold(0.0, f64::max);
            if (lo..=hi).contains(&critical) {
                g = g.max(required_gain_at_angle(critical, geom, params));
            }
            g
        })
        .collect();

    let half = bins / 2;
    let gains = (0..bins)
        .map(|k| {
            let k = if k > half { bins - k } else { k };
            let k = if k > quarter { half - k } else { k };
            first_quadrant[k]
        })
        .collect();
    AzimuthPattern::from_gains(gains)
}

/// True when `a` meets or exceeds `b` in every bin, allowing `b` to be up to
/// `tolerance_db` above `a`.
pub fn envelope_dominates(
    a: &AzimuthPattern,
    b: &AzimuthPattern,
    tolerance_db: f64,
) -> Result<bool> {
    a.ensure_same_grid(b)?;
    let slack = db_to_ratio(tolerance_db);
    Ok(a.gains()
        .iter()
        .zip(b.gains())
        .all(|(ga, gb)| *gb <= ga * slack))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::safety::default_scenario;
    use crate::units::{linear_to_dbi, ratio_to_db};
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn defaults() -> (CrossingGeometry, LinkBudgetParams) {
        let s = default_scenario();
        (s.geometry, s.link)
    }

    /// Direct distance from the notification point to the road point at
    /// offset `r`, computed from coordinates rather than the closed form.
    fn distance_to_road_point(geom: &CrossingGeometry, r: f64) -> (f64, f64) {
        let (x, y) = (geom.d_s + r * geom.delta.cos(), r * geom.delta.sin());
        (y.atan2(x), x.hypot(y))
    }

    #[test]
    fn boundary_angle_examples() {
        let g = CrossingGeometry::perpendicular(1059.0, 210.0).unwrap();
        assert_relative_eq!(
            g.boundary_angle(),
            (210.0f64 / 1059.0).atan(),
            max_relative = 1e-12
        );
        assert!((g.boundary_angle() - 0.1957).abs() < 1e-4);
        assert!((g.boundary_angle().to_degrees() - 11.21).abs() < 1e-2);
        let g15 = CrossingGeometry::perpendicular(530.0, 210.0).unwrap();
        assert!((g15.boundary_angle() - 0.3772).abs() < 1e-4);
        assert!((g15.boundary_angle().to_degrees() - 21.61).abs() < 1e-2);
        let tiny = CrossingGeometry::perpendicular(1059.0, 1e-9).unwrap();
        assert!(tiny.boundary_angle() < 1e-11);
    }

    #[test]
    fn road_offset_examples() {
        let g = CrossingGeometry::perpendicular(1059.0, 210.0).unwrap();
        assert_eq!(g.road_offset_from_angle(0.0).unwrap(), 0.0);
        assert_relative_eq!(
            g.road_offset_from_angle(g.boundary_angle()).unwrap(),
            210.0,
            max_relative = 1e-6
        );
        assert_relative_eq!(
            g.road_offset_from_angle(0.1f64.atan()).unwrap(),
            105.9,
            max_relative = 1e-9
        );
        assert!(g.road_offset_from_angle(0.3).is_err());
        assert!(g.road_offset_from_angle(-0.01).is_err());
    }

    #[test]
    fn geometry_validation() {
        assert!(CrossingGeometry::new(0.0, 1.0, 1.0, 1.0).is_err());
        assert!(CrossingGeometry::new(1.7, 1.0, 1.0, 1.0).is_err());
        assert!(CrossingGeometry::new(1.0, -1.0, 1.0, 1.0).is_err());
        assert!(CrossingGeometry::new(1.0, 1.0, 0.0, 1.0).is_err());
        // skewed crossings are accepted
        assert!(CrossingGeometry::new(0.5, 1.0, 1.0, 1.0).is_ok());
    }

    #[test]
    fn peak_requirements_match_published_values() {
        let (g, p) = defaults();
        let peak = linear_to_dbi(required_gain_at_angle(g.boundary_angle(), &g, &p)).0;
        assert!((peak - 24.8).abs() <= 0.2, "{peak}");
        let g15 = CrossingGeometry::perpendicular(530.0, 210.0).unwrap();
        let peak15 = linear_to_dbi(required_gain_at_angle(g15.boundary_angle(), &g15, &p)).0;
        assert!((peak15 - 16.5).abs() <= 0.2, "{peak15}");
    }

    #[test]
    fn broadside_closed_form() {
        let (g, p) = defaults();
        for n in [2.0, 3.0, 4.5] {
            let p = p.with_exponent(n).unwrap();
            assert_relative_eq!(
                required_gain_at_angle(FRAC_PI_2, &g, &p),
                p.reference_gain() * g.r_s.powf(n),
                max_relative = 1e-12
            );
        }
    }

    #[test]
    fn synthesized_envelope_examples() {
        let (g, p) = defaults();
        let env = synthesize_envelope(&g, &p, DEFAULT_RESOLUTION).unwrap();
        assert_eq!(env.len() % 4, 0);
        assert!((env.peak_dbi() - 24.8).abs() <= 0.2);
        // on axis the requirement is the notification distance itself
        let on_axis = required_gain_at_angle(0.0, &g, &p);
        assert_relative_eq!(
            on_axis,
            p.required_gain(g.d_s).unwrap(),
            max_relative = 1e-12
        );
        // bin 0 covers [0, Δ/2]; its value may only exceed the axis by the slope
        assert!(env.gains()[0] >= on_axis);
        assert!(ratio_to_db(env.gains()[0] / on_axis) < 1e-5);
    }

    #[test]
    fn envelope_symmetries_are_bit_exact() {
        let s = default_scenario();
        let g = CrossingGeometry::new(1.0, s.geometry.d_s, 210.0, s.geometry.d_s).unwrap();
        let env = synthesize_envelope(&g, &s.link, 0.003).unwrap();
        let m = env.len();
        let gains = env.gains();
        for k in 0..m {
            assert_eq!(gains[k], gains[(m - k) % m], "left/right at {k}");
            assert_eq!(gains[k], gains[(m / 2 + m - k) % m], "fore/aft at {k}");
        }
    }

    #[test]
    fn envelope_is_upper_bound_of_requirement() {
        let s = default_scenario();
        for delta_deg in [45.0f64, 90.0] {
            let g = s.with_delta(delta_deg.to_radians()).unwrap().geometry;
            let env = synthesize_envelope(&g, &s.link, 0.005).unwrap();
            for i in 0..20_000 {
                let theta = TAU * i as f64 / 20_000.0;
                let req = required_gain_at_angle(theta, &g, &s.link);
                assert!(env.gain_pessimistic(theta) >= req * (1.0 - 1e-12));
            }
        }
    }

    #[test]
    fn resolution_bounds() {
        let (g, p) = defaults();
        assert!(synthesize_envelope(&g, &p, 0.0).is_err());
        assert!(synthesize_envelope(&g, &p, 0.02).is_err());
        assert!(synthesize_envelope(&g, &p, 0.01).is_ok());
    }

    #[test]
    fn dominance_examples() {
        let (g, p) = defaults();
        let x = synthesize_envelope(&g, &p, 0.005).unwrap();
        assert!(envelope_dominates(&x, &x, 0.0).unwrap());
        let doubled = x.scaled(2.0).unwrap();
        assert!(!envelope_dominates(&x, &doubled, 0.0).unwrap());
        assert!(envelope_dominates(&x, &doubled, 3.02).unwrap());
        let coarse = synthesize_envelope(&g, &p, 0.01).unwrap();
        assert!(matches!(
            envelope_dominates(&x, &coarse, 0.0),
            Err(Error::ResolutionMismatch { .. })
        ));
    }

    #[test]
    fn seventy_five_degree_crossing_within_one_db_of_perpendicular() {
        let s = default_scenario();
        let g90 = synthesize_envelope(&s.geometry, &s.link, DEFAULT_RESOLUTION).unwrap();
        let g75 = synthesize_envelope(
            &s.with_delta(75f64.to_radians()).unwrap().geometry,
            &s.link,
            DEFAULT_RESOLUTION,
        )
        .unwrap();
        assert!(envelope_dominates(&g90, &g75, 1.0).unwrap());
    }

    #[test]
    fn eq5_branch_matches_coordinate_distance() {
        let s = default_scenario();
        for delta_deg in [45.0f64, 60.0, 90.0] {
            let g = s.with_delta(delta_deg.to_radians()).unwrap().geometry;
            for i in 1..=50 {
                let r = g.r_s * i as f64 / 50.0;
                let (theta, dist) = distance_to_road_point(&g, r);
                assert_relative_eq!(
                    g.road_offset_from_angle(theta.min(g.boundary_angle()))
                        .unwrap(),
                    r,
                    max_relative = 1e-9
                );
                assert_relative_eq!(
                    required_gain_at_angle(theta, &g, &s.link),
                    s.link.required_gain(dist).unwrap(),
                    max_relative = 1e-9
                );
            }
        }
    }

    #[test]
    fn continuity_at_boundary_angle() {
        let s = default_scenario();
        for delta_deg in [45.0f64, 60.0, 75.0, 90.0] {
            for n in [2.0, 3.0, 4.0] {
                let g = s.with_delta(delta_deg.to_radians()).unwrap().geometry;
                let p = s.link.with_exponent(n).unwrap();
                let (sd, cd) = g.delta.sin_cos();
                let eq5 = p.reference_gain()
                    * ((g.r_s * sd).powi(2) + (g.r_s * cd + g.d_s).powi(2)).powf(n / 2.0);
                let ts = g.boundary_angle();
                let h = g.r_s * sd;
                let eq6 = p.reference_gain() * ((h / ts.tan()).powi(2) + h * h).powf(n / 2.0);
                assert!(((eq5 - eq6) / eq5).abs() <= 1e-9, "δ={delta_deg} n={n}");
            }
        }
    }

    proptest! {
        #[test]
        fn offset_satisfies_sight_line(frac in 0.0f64..=1.0, delta in 0.3f64..=FRAC_PI_2,
                                        ds in 50.0f64..3000.0, rs in 10.0f64..500.0) {
            let g = CrossingGeometry::new(delta, ds, rs, ds).unwrap();
            let theta = frac * g.boundary_angle();
            let r = g.road_offset_from_angle(theta).unwrap();
            let rhs = r * delta.sin() / (ds + r * delta.cos());
            prop_assert!((theta.tan() - rhs).abs() <= 1e-9 * theta.tan().max(1e-300) + 1e-15);
        }

        #[test]
        fn requirement_grows_toward_boundary(a in 0.0f64..=1.0, b in 0.0f64..=1.0,
                                             delta in 0.5f64..=FRAC_PI_2, n in 2.0f64..=5.0) {
            let s = default_scenario();
            let g = s.with_delta(delta).unwrap().geometry;
            let p = s.link.with_exponent(n).unwrap();
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            let ts = g.boundary_angle();
            prop_assert!(required_gain_at_angle(lo * ts, &g, &p)
                <= required_gain_at_angle(hi * ts, &g, &p) * (1.0 + 1e-12));
        }

        #[test]
        fn transmit_power_scales_inversely(c in 0.1f64..10.0) {
            let s = default_scenario();
            let base = synthesize_envelope(&s.geometry, &s.link, 0.01).unwrap();
            let boosted_link = s.link.with_transmit_power(s.link.p_t * c).unwrap();
            let boosted = synthesize_envelope(&s.geometry, &boosted_link, 0.01).unwrap();
            for (a, b) in base.gains().iter().zip(boosted.gains()) {
                prop_assert!(((a / c - b) / b).abs() <= 1e-12);
            }
        }

        #[test]
        fn perpendicular_corner_branch_closed_form(frac in 0.0f64..=1.0, n in 2.0f64..=5.0) {
            let s = default_scenario();
            let g = s.geometry;
            let p = s.link.with_exponent(n).unwrap();
            let ts = g.boundary_angle();
            let theta = ts + frac * (FRAC_PI_2 - ts);
            prop_assume!(theta > ts);
            let closed = p.reference_gain() * (g.r_s / theta.sin()).powf(n);
            let got = required_gain_at_angle(theta, &g, &p);
            prop_assert!(((got - closed) / closed).abs() <= 1e-9);
        }
    }
}
