//! Level estimation from impulse responses and from the distance-decay
//! models.

mod fdt;
mod weighting;

pub use fdt::{fdt_truncate, FdtParams};
pub use weighting::{a_weighting_magnitude, WeightingSpec};

use crate::{power_to_db, Error, ImpulseResponse, Loudspeaker, Result, RoomModel};

/// Threshold below the global peak that marks the direct-path arrival.
pub const ONSET_THRESHOLD_DB: f64 = 20.0;

/// Index of the first sample within [`ONSET_THRESHOLD_DB`] of the peak
/// magnitude.
pub fn detect_onset(ir: &ImpulseResponse) -> Result<usize> {
    let peak = ir.samples().iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if peak == 0.0 {
        return Err(Error::SilentResponse);
    }
    let threshold = peak * 10f64.powf(-ONSET_THRESHOLD_DB / 20.0);
    Ok(ir
        .samples()
        .iter()
        .position(|x| x.abs() >= threshold)
        .expect("peak sample satisfies the threshold"))
}

/// `ir` with its onset index filled in by [`detect_onset`].
pub fn with_detected_onset(ir: &ImpulseResponse) -> Result<ImpulseResponse> {
    let onset = detect_onset(ir)?;
    ir.clone().with_onset(onset)
}

/// Mean-square level of the weighted signal over its full length, in dB.
pub fn weighted_level_db(
    samples: &[f64],
    sample_rate_hz: u32,
    weighting: WeightingSpec,
) -> Result<f64> {
    if samples.iter().all(|&x| x == 0.0) {
        return Err(Error::SilentResponse);
    }
    let energy = weighting::weighted_energy(samples, sample_rate_hz, weighting);
    Ok(power_to_db(energy / samples.len() as f64))
}

/// `10·log10((1/T)·∫|(h∗w)(t)|² dt)` with `T` the IR duration.
pub fn level_from_ir(ir: &ImpulseResponse, weighting: WeightingSpec) -> Result<f64> {
    weighted_level_db(ir.samples(), ir.sample_rate_hz(), weighting)
}

/// Level of the direct-sound portion. The truncated response keeps the
/// original length, so `T` is the same as for [`level_from_ir`]. The onset
/// is detected if the IR does not carry one.
pub fn direct_level_from_ir(
    ir: &ImpulseResponse,
    params: &FdtParams,
    weighting: WeightingSpec,
) -> Result<f64> {
    let truncated = match ir.onset_index() {
        Some(_) => fdt_truncate(ir, params)?,
        None => fdt_truncate(&with_detected_onset(ir)?, params)?,
    };
    level_from_ir(&truncated, weighting)
}

/// Free-field direct level `10·log10(P·Q / (4π·d²))`.
pub fn model_direct_level(spk: &Loudspeaker) -> f64 {
    power_to_db(spk.power * spk.directivity / (4.0 * std::f64::consts::PI * spk.distance_m.powi(2)))
}

/// Direct plus diffuse level `10·log10(P·Q/(4π) · (1/d² + 1/D_c²))`.
pub fn model_total_level(spk: &Loudspeaker, room: &RoomModel) -> f64 {
    let source = spk.power * spk.directivity / (4.0 * std::f64::consts::PI);
    power_to_db(source * (spk.distance_m.powi(-2) + room.critical_distance_m.powi(-2)))
}
