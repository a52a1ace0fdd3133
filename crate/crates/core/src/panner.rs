//! Per-object gain computation.
//!
//! The pipeline for one object is
//!
//! ```text
//! raw g  --apply_dsc-->  g'  --loudness_correct-->  g''  --frc_gains-->  G
//! ```
//!
//! [`combined_gains`] computes `G` in a single step; both routes agree.

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::model::p_norm;
use crate::{db_to_gain, CalibrationProfile, Error, GainStage, GainVector, Layout, Result};

/// Default norm exponent; the sin/cos law is unit-norm for `p = 2`.
pub const DEFAULT_P: f64 = 2.0;

/// Tolerance used to snap an azimuth onto a speaker or the span edge.
const ANGLE_EPS: f64 = 1e-9;

/// How object gains are derived from the raw panning gains.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RenderMode {
    /// Plain panning on a loudness-matched, time-aligned layout.
    Frc,
    /// Direct-sound compensation followed by loudness correction.
    Dsc,
    /// Direct-sound compensation without loudness correction.
    DscNoLc,
}

impl RenderMode {
    pub fn as_str(self) -> &'static str {
        match self {
            RenderMode::Frc => "frc",
            RenderMode::Dsc => "dsc",
            RenderMode::DscNoLc => "dsc-no-lc",
        }
    }

    /// Stage of the gain vector this mode feeds into the per-speaker FRC
    /// chain.
    pub fn output_stage(self) -> GainStage {
        match self {
            RenderMode::Frc => GainStage::Raw,
            RenderMode::Dsc => GainStage::LoudnessCorrected,
            RenderMode::DscNoLc => GainStage::DscModified,
        }
    }
}

impl std::str::FromStr for RenderMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "frc" => Ok(RenderMode::Frc),
            "dsc" => Ok(RenderMode::Dsc),
            "dsc-no-lc" | "dsc_no_lc" => Ok(RenderMode::DscNoLc),
            other => Err(Error::InvalidParams(format!("unknown mode {other:?}"))),
        }
    }
}

/// Pairwise sin/cos panning between the two speakers adjacent to `theta_deg`.
///
/// An azimuth that coincides with a speaker hard-pans to it. Every speaker
/// outside the active pair gets zero.
pub fn pan_pairwise(theta_deg: f64, layout: &Layout) -> Result<GainVector> {
    let order = layout.by_azimuth();
    let az = |i: usize| layout.speakers[order[i]].azimuth_deg;
    let (min, max) = (az(0), az(order.len() - 1));
    if !(theta_deg >= min - ANGLE_EPS && theta_deg <= max + ANGLE_EPS) {
        return Err(Error::OutOfSpan {
            theta: theta_deg,
            min,
            max,
        });
    }
    let mut gains = vec![0.0; layout.len()];
    if let Some(hit) = (0..order.len()).find(|&i| (az(i) - theta_deg).abs() <= ANGLE_EPS) {
        gains[order[hit]] = 1.0;
        return GainVector::new(GainStage::Raw, gains, DEFAULT_P);
    }
    let upper = (1..order.len())
        .find(|&i| az(i) > theta_deg)
        .expect("theta strictly inside span");
    let (right, left) = (order[upper - 1], order[upper]);
    let (theta_r, theta_l) = (az(upper - 1), az(upper));
    let psi = FRAC_PI_2 * (theta_deg - theta_r) / (theta_l - theta_r);
    gains[left] = psi.sin().max(0.0);
    gains[right] = psi.cos().max(0.0);
    GainVector::new(GainStage::Raw, gains, DEFAULT_P)
}

/// Scales `g` to unit p-norm. The stage is kept.
pub fn normalize(g: &GainVector, p: f64) -> Result<GainVector> {
    let norm = p_norm(&g.gains, p);
    if norm == 0.0 {
        return Err(Error::ZeroGains);
    }
    GainVector::new(g.stage, g.gains.iter().map(|x| x / norm).collect(), p)
}

fn check_profile(g: &GainVector, profile: &CalibrationProfile) -> Result<()> {
    if g.len() != profile.len() {
        return Err(Error::ProfileMismatch(format!(
            "{} gains for {} calibrated speakers",
            g.len(),
            profile.len()
        )));
    }
    Ok(())
}

/// `g'_i = 10^((ΔL_i^DS - ΔL_i)/20) · g_i`.
pub fn apply_dsc(g: &GainVector, profile: &CalibrationProfile) -> Result<GainVector> {
    check_profile(g, profile)?;
    let gains = g
        .gains
        .iter()
        .zip(&profile.speakers)
        .map(|(x, s)| db_to_gain(s.dsc_offset_db()) * x)
        .collect();
    GainVector::new(GainStage::DscModified, gains, g.p_norm)
}

/// `g'' = g' / ‖g'‖_p`.
pub fn loudness_correct(g: &GainVector, p: f64) -> Result<GainVector> {
    let mut out = normalize(g, p)?;
    out.stage = GainStage::LoudnessCorrected;
    Ok(out)
}

/// Per-speaker loudness compensation `10^(ΔL_i/20) · g_i`, the last stage
/// before the feeds.
pub fn frc_gains(g: &GainVector, profile: &CalibrationProfile) -> Result<GainVector> {
    check_profile(g, profile)?;
    let gains = g
        .gains
        .iter()
        .zip(&profile.speakers)
        .map(|(x, s)| s.frc_gain() * x)
        .collect();
    GainVector::new(GainStage::Combined, gains, g.p_norm)
}

/// Single-step combined gains
/// `G_i = 10^(ΔL_i^DS/20)·g_i / (Σ_j |10^((ΔL_j^DS-ΔL_j)/20)·g_j|^p)^(1/p)`.
pub fn combined_gains(g: &GainVector, profile: &CalibrationProfile, p: f64) -> Result<GainVector> {
    check_profile(g, profile)?;
    let modified: Vec<f64> = profile
        .speakers
        .iter()
        .zip(&g.gains)
        .map(|(s, x)| db_to_gain(s.dsc_offset_db()) * x)
        .collect();
    let denom = p_norm(&modified, p);
    if denom == 0.0 {
        return Err(Error::ZeroGains);
    }
    let gains = profile
        .speakers
        .iter()
        .zip(&g.gains)
        .map(|(s, x)| db_to_gain(s.dsc_comp_db) * x / denom)
        .collect();
    GainVector::new(GainStage::Combined, gains, p)
}

/// Gains that `mode` hands to the FRC chain for a raw panning vector.
pub fn mode_gains(
    raw: &GainVector,
    profile: &CalibrationProfile,
    mode: RenderMode,
    p: f64,
) -> Result<GainVector> {
    match mode {
        RenderMode::Frc => normalize(raw, p),
        RenderMode::Dsc => loudness_correct(&apply_dsc(raw, profile)?, p),
        RenderMode::DscNoLc => apply_dsc(raw, profile),
    }
}

/// Every stage for one azimuth, as reported by the `gains` command.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GainTable {
    pub theta_deg: f64,
    pub mode: RenderMode,
    pub p: f64,
    pub raw: GainVector,
    pub dsc_modified: GainVector,
    pub loudness_corrected: GainVector,
    /// Mode gains after the per-speaker FRC gain, i.e. what reaches the
    /// delay lines.
    pub feed: GainVector,
}

pub fn gain_table(
    theta_deg: f64,
    layout: &Layout,
    profile: &CalibrationProfile,
    mode: RenderMode,
    p: f64,
) -> Result<GainTable> {
    profile.check_layout(layout)?;
    let raw = pan_pairwise(theta_deg, layout)?;
    let dsc_modified = apply_dsc(&raw, profile)?;
    let loudness_corrected = loudness_correct(&dsc_modified, p)?;
    let feed = frc_gains(&mode_gains(&raw, profile, mode, p)?, profile)?;
    Ok(GainTable {
        theta_deg,
        mode,
        p,
        raw,
        dsc_modified,
        loudness_corrected,
        feed,
    })
}
