//! Uniform linear arrays of omnidirectional elements and compliance grading
//! of candidate patterns against a required envelope.

use std::f64::consts::{FRAC_PI_2, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pattern::AzimuthPattern;
use crate::units::{dbi_to_linear, ratio_to_db, GainDbi};

#[derive(Debug, Clone, PartialEq)]
pub struct UniformLinearArraySpec {
    pub n_elements: usize,
    /// Center-to-center spacing, meters.
    pub spacing: f64,
    /// Element gain in the horizontal plane.
    pub element_gain: GainDbi,
    /// Optional elevation cut of one element (index 0 = horizon). Only its
    /// horizon-to-peak ratio is used, scaling the element gain.
    pub element_elevation_pattern: Option<AzimuthPattern>,
    /// Progressive phase per element, radians. Zero steers to broadside.
    pub phase_taper: f64,
}

impl UniformLinearArraySpec {
    pub fn new(n_elements: usize, spacing: f64, element_gain: GainDbi) -> Result<Self> {
        let spec = Self {
            n_elements,
            spacing,
            element_gain,
            element_elevation_pattern: None,
            phase_taper: 0.0,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_elements == 0 {
            return Err(Error::InvalidParameter(
                "array needs at least one element".into(),
            ));
        }
        if !(self.spacing > 0.0 && self.spacing.is_finite()) {
            return Err(Error::out_of_domain("spacing", self.spacing, "finite, > 0"));
        }
        if !self.element_gain.0.is_finite() || !self.phase_taper.is_finite() {
            return Err(Error::InvalidParameter(
                "element gain and phase taper must be finite".into(),
            ));
        }
        Ok(())
    }

    /// Element gain on the horizon, linear.
    pub fn horizon_element_gain(&self) -> f64 {
        let g = dbi_to_linear(self.element_gain);
        match &self.element_elevation_pattern {
            Some(cut) => {
                let (_, peak) = cut.peak();
                if peak > 0.0 {
                    g * cut.gains()[0] / peak
                } else {
                    0.0
                }
            }
            None => g,
        }
    }
}

/// |Σ_k e^{i k ψ}| with ψ = (2π/λ)·d·cos θ + taper, θ from the array axis.
pub fn array_factor_magnitude(spec: &UniformLinearArraySpec, wavelength: f64, theta: f64) -> f64 {
    let psi = TAU / wavelength * spec.spacing * theta.cos() + spec.phase_taper;
    let n = spec.n_elements as f64;
    let half = 0.5 * psi.rem_euclid(TAU);
    let den = half.sin();
    // removable singularity at ψ ≡ 0 (mod 2π)
    if den.abs() < 1e-12 {
        return n;
    }
    ((n * half).sin() / den).abs().min(n)
}

/// Horizontal pattern of the array in railway azimuth. The array axis is
/// mounted across the track, so broadside points along the railway.
pub fn array_pattern(
    spec: &UniformLinearArraySpec,
    wavelength: f64,
    resolution: f64,
) -> Result<AzimuthPattern> {
    spec.validate()?;
    if !(wavelength > 0.0) {
        return Err(Error::out_of_domain("wavelength", wavelength, "> 0"));
    }
    let bins = AzimuthPattern::bins_for_resolution(resolution)?;
    let element = spec.horizon_element_gain();
    let n = spec.n_elements as f64;
    AzimuthPattern::from_fn(bins, |theta| {
        let af = array_factor_magnitude(spec, wavelength, theta + FRAC_PI_2);
        element * af * af / n
    })
}

/// Smallest element count whose ideal array gain reaches `target`.
pub fn estimate_element_count(target: GainDbi, element: GainDbi) -> usize {
    let needed = target.0 - element.0;
    if needed <= 0.0 {
        return 1;
    }
    let mut n = (10f64.powf(needed / 10.0) - 1e-9).ceil().max(1.0) as usize;
    while n > 1 && ratio_to_db((n - 1) as f64) >= needed {
        n -= 1;
    }
    while ratio_to_db(n as f64) < needed {
        n += 1;
    }
    n
}

/// Physical array length, counting one spacing per element.
pub fn array_length(n_elements: usize, spacing: f64) -> f64 {
    n_elements as f64 * spacing
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub start_deg: f64,
    /// May be smaller than `start_deg` when the interval wraps through 0°.
    pub end_deg: f64,
    pub worst_shortfall_db: f64,
}

impl Violation {
    pub fn contains_deg(&self, deg: f64) -> bool {
        let d = deg.rem_euclid(360.0);
        if self.start_deg <= self.end_deg {
            (self.start_deg..=self.end_deg).contains(&d)
        } else {
            d >= self.start_deg || d <= self.end_deg
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplianceReport {
    pub pass: bool,
    /// Smallest candidate-minus-required difference over all bins, dB.
    pub margin_db: f64,
    pub violations: Vec<Violation>,
}

/// Bin-by-bin comparison of `candidate` against `required`.
pub fn compliance_report(
    candidate: &AzimuthPattern,
    required: &AzimuthPattern,
) -> Result<ComplianceReport> {
    candidate.ensure_same_grid(required)?;
    let diffs: Vec<f64> = candidate
        .gains()
        .iter()
        .zip(required.gains())
        .map(|(&c, &r)| match (c > 0.0, r > 0.0) {
            (_, false) => f64::INFINITY,
            (false, true) => f64::NEG_INFINITY,
            (true, true) => ratio_to_db(c / r),
        })
        .collect();
    let margin_db = diffs.iter().copied().fold(f64::INFINITY, f64::min);

    // runs of violating bins as (first, last, worst)
    let m = diffs.len();
    let mut runs: Vec<(usize, usize, f64)> = Vec::new();
    for (k, &d) in diffs.iter().enumerate() {
        if d >= 0.0 {
            continue;
        }
        match runs.last_mut() {
            Some(run) if run.1 + 1 == k => {
                run.1 = k;
                run.2 = run.2.min(d);
            }
            _ => runs.push((k, k, d)),
        }
    }
    if runs.len() > 1 {
        let last = runs[runs.len() - 1];
        if runs[0].0 == 0 && last.1 == m - 1 {
            runs.pop();
            runs[0].0 = last.0;
            runs[0].2 = runs[0].2.min(last.2);
        }
    }

    let step = candidate.resolution();
    let violations: Vec<Violation> = runs
        .into_iter()
        .map(|(a, b, worst)| Violation {
            start_deg: (a as f64 * step).to_degrees(),
            end_deg: (b as f64 * step).to_degrees(),
            worst_shortfall_db: -worst,
        })
        .collect();
    Ok(ComplianceReport {
        pass: violations.is_empty(),
        margin_db,
        violations,
    })
}

/// Half-power beamwidth estimate for a broadside uniform array, radians.
pub fn broadside_beamwidth_estimate(n_elements: usize, spacing: f64, wavelength: f64) -> f64 {
    0.886 * wavelength / (n_elements as f64 * spacing)
}
