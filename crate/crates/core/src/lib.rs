//! Loudspeaker calibration and object panning for non-equidistant layouts.
//!
//! The crate covers the whole chain from impulse responses to loudspeaker
//! feeds:
//!
//! - [`analysis`] estimates full-response and direct-sound levels from
//!   impulse responses (with A/pink weighting and frequency-dependent
//!   truncation), plus the free-field/diffuse-field level models.
//! - [`calibration`] turns levels and distances into a [`CalibrationProfile`]:
//!   loudness compensation, time alignment and direct-sound compensation.
//! - [`panner`] computes per-object gains: pairwise sin/cos panning, the
//!   direct-sound modification, loudness correction and the combined gains.
//! - [`renderer`] mixes a [`Scene`] to per-speaker feeds, offline or block by
//!   block.
//! - [`roomsim`] generates deterministic synthetic room responses and
//!   simulates what arrives at the listening position.
//! - [`predictor`] is a tangent-law localization model used to check where
//!   a phantom source ends up.

pub mod analysis;
pub mod calibration;
mod dsp;
mod error;
pub mod model;
pub mod panner;
pub mod predictor;
pub mod renderer;
pub mod roomsim;
pub mod schema;
pub mod wav;

pub use error::{Error, Result};
pub use model::{
    validate_layout, AzimuthSegment, CalibrationProfile, GainStage, GainVector, ImpulseResponse,
    Layout, Loudspeaker, RoomModel, Scene, SourceObject, SpeakerCalibration, SpeakerLevels,
};

/// Decibels to linear amplitude gain.
#[inline]
pub fn db_to_gain(db: f64) -> f64 {
    10f64.powf(db / 20.0)
}

/// Linear amplitude gain to decibels.
#[inline]
pub fn gain_to_db(gain: f64) -> f64 {
    20.0 * gain.log10()
}

/// Power-like quantity to decibels.
#[inline]
pub fn power_to_db(power: f64) -> f64 {
    10.0 * power.log10()
}
