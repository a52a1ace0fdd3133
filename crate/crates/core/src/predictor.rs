//! Tangent-law localization model driven by the direct sound.
//!
//! The direction of a phantom source is dominated by the first arriving
//! wavefronts, so the model only looks at the amplitude of each speaker's
//! direct path at the listening position after the whole signal chain.

use serde::Serialize;

use crate::panner::{mode_gains, pan_pairwise, RenderMode};
use crate::{db_to_gain, CalibrationProfile, Error, GainVector, Layout, Result};

/// Linear direct-wavefront amplitude per speaker at the listener.
#[derive(Debug, Clone, PartialEq)]
pub struct EffectiveDirectGains(pub Vec<f64>);

/// `e_i = g_i · 10^((ΔL_i + L_i^DS)/20)` for the stage gains of `mode`.
pub fn effective_direct_gains(
    g: &GainVector,
    profile: &CalibrationProfile,
    mode: RenderMode,
) -> Result<EffectiveDirectGains> {
    let expected = mode.output_stage();
    if g.stage != expected {
        return Err(Error::StageMismatch {
            expected: expected.as_str(),
            found: g.stage.as_str(),
        });
    }
    if g.len() != profile.len() {
        return Err(Error::ProfileMismatch(format!(
            "{} gains for {} calibrated speakers",
            g.len(),
            profile.len()
        )));
    }
    Ok(EffectiveDirectGains(
        g.gains
            .iter()
            .zip(&profile.speakers)
            .map(|(x, s)| x * db_to_gain(s.loudness_comp_db + s.direct_level_db))
            .collect(),
    ))
}

/// Predicted azimuth from the active speaker or adjacent pair.
///
/// For a pair at `θ_lo < θ_hi` the tangent law is applied about the pair's
/// bisector: `tan(θ̂ - θ_c) = (e_hi - e_lo)/(e_hi + e_lo) · tan(θ_half)`.
pub fn predict_angle(e: &EffectiveDirectGains, layout: &Layout) -> Result<f64> {
    let gains = &e.0;
    if gains.len() != layout.len() {
        return Err(Error::ProfileMismatch(format!(
            "{} amplitudes for {} speakers",
            gains.len(),
            layout.len()
        )));
    }
    let active: Vec<usize> = (0..gains.len()).filter(|&i| gains[i] > 0.0).collect();
    match active.as_slice() {
        [] => Err(Error::ZeroGains),
        [only] => Ok(layout.speakers[*only].azimuth_deg),
        [a, b] => {
            let order = layout.by_azimuth();
            let pos = |i: usize| order.iter().position(|&o| o == i).unwrap();
            let (lo, hi) = if layout.speakers[*a].azimuth_deg < layout.speakers[*b].azimuth_deg {
                (*a, *b)
            } else {
                (*b, *a)
            };
            if pos(hi) != pos(lo) + 1 {
                return Err(Error::InvalidParams(
                    "active speakers are not adjacent".into(),
                ));
            }
            let (th_lo, th_hi) = (
                layout.speakers[lo].azimuth_deg,
                layout.speakers[hi].azimuth_deg,
            );
            let center = 0.5 * (th_lo + th_hi);
            let half = (0.5 * (th_hi - th_lo)).to_radians();
            let ratio = (gains[hi] - gains[lo]) / (gains[hi] + gains[lo]);
            Ok(center + (ratio * half.tan()).atan().to_degrees())
        }
        more => Err(Error::TooManyActive(more.len())),
    }
}

/// Predicted azimuth for an object panned to `theta_deg` in `mode`.
pub fn predict_for_theta(
    theta_deg: f64,
    layout: &Layout,
    profile: &CalibrationProfile,
    mode: RenderMode,
    p: f64,
) -> Result<f64> {
    let raw = pan_pairwise(theta_deg, layout)?;
    let g = mode_gains(&raw, profile, mode, p)?;
    predict_angle(&effective_direct_gains(&g, profile, mode)?, layout)
}

/// Prediction for the same raw gains on an equidistant layout: the direct
/// amplitudes are then proportional to the panning gains.
pub fn predict_reference(theta_deg: f64, layout: &Layout) -> Result<f64> {
    let raw = pan_pairwise(theta_deg, layout)?;
    predict_angle(&EffectiveDirectGains(raw.gains), layout)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PredictionRow {
    pub theta_deg: f64,
    pub reference_deg: f64,
    pub frc_deg: f64,
    pub dsc_deg: f64,
}

/// Predictions on a grid of `step_deg` across the layout's panning span.
pub fn prediction_grid(
    layout: &Layout,
    profile: &CalibrationProfile,
    step_deg: f64,
    p: f64,
) -> Result<Vec<PredictionRow>> {
    if step_deg.is_nan() || step_deg <= 0.0 {
        return Err(Error::InvalidParams(format!(
            "step must be positive, got {step_deg}"
        )));
    }
    profile.check_layout(layout)?;
    let az = layout.azimuths();
    let min = az.iter().copied().fold(f64::INFINITY, f64::min);
    let max = az.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let steps = ((max - min) / step_deg + 1e-9).floor() as usize;
    (0..=steps)
        .map(|k| {
            let theta = min + k as f64 * step_deg;
            Ok(PredictionRow {
                theta_deg: theta,
                reference_deg: predict_reference(theta, layout)?,
                frc_deg: predict_for_theta(theta, layout, profile, RenderMode::Frc, p)?,
                dsc_deg: predict_for_theta(theta, layout, profile, RenderMode::Dsc, p)?,
            })
        })
        .collect()
}
