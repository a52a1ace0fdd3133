//! Full-response compensation (loudness matching and time alignment) and
//! direct-sound compensation terms.

use crate::analysis::{self, FdtParams, WeightingSpec};
use crate::model::SpeakerLevels;
use crate::{CalibrationProfile, Error, ImpulseResponse, Layout, Result, RoomModel};

/// `ΔL_i = L_ref - L_i`.
pub fn loudness_compensation(levels: &[f64], l_ref_db: f64) -> Vec<f64> {
    levels.iter().map(|l| l_ref_db - l).collect()
}

/// `ΔL_i^DS = L_ref^DS - L_i^DS`.
pub fn dsc_compensation(direct_levels: &[f64], l_ref_ds_db: f64) -> Vec<f64> {
    direct_levels.iter().map(|l| l_ref_ds_db - l).collect()
}

/// `Δt_i = (d_ref - d_i) / c`. A reference closer than any speaker would
/// need a negative delay and is rejected.
pub fn time_alignment(distances: &[f64], d_ref_m: f64, speed_of_sound: f64) -> Result<Vec<f64>> {
    distances
        .iter()
        .enumerate()
        .map(|(index, &d)| {
            if d > d_ref_m {
                Err(Error::NegativeDelay {
                    index,
                    distance: d,
                    d_ref: d_ref_m,
                })
            } else {
                Ok((d_ref_m - d) / speed_of_sound)
            }
        })
        .collect()
}

/// Where the per-speaker levels come from.
#[derive(Debug, Clone, Copy)]
pub enum LevelSource<'a> {
    /// Direct level from the inverse-square model, total level from the
    /// direct-plus-diffuse model.
    Model,
    /// One impulse response per speaker, in layout order.
    Measured(&'a [ImpulseResponse]),
}

#[derive(Debug, Clone, PartialEq)]
pub struct CalibrationOptions {
    pub weighting: WeightingSpec,
    pub fdt: FdtParams,
    /// Defaults to the quietest speaker's full-response level.
    pub l_ref_db: Option<f64>,
    /// Defaults to the quietest speaker's direct level.
    pub l_ref_ds_db: Option<f64>,
    /// Defaults to the largest speaker distance.
    pub d_ref_m: Option<f64>,
}

impl Default for CalibrationOptions {
    fn default() -> Self {
        CalibrationOptions {
            weighting: WeightingSpec::PINK_A,
            fdt: FdtParams::default(),
            l_ref_db: None,
            l_ref_ds_db: None,
            d_ref_m: None,
        }
    }
}

/// Full and direct levels per speaker, in layout order.
pub fn speaker_levels(
    layout: &Layout,
    room: &RoomModel,
    source: LevelSource<'_>,
    options: &CalibrationOptions,
) -> Result<Vec<(f64, f64)>> {
    match source {
        LevelSource::Model => Ok(layout
            .speakers
            .iter()
            .map(|s| {
                (
                    analysis::model_total_level(s, room),
                    analysis::model_direct_level(s),
                )
            })
            .collect()),
        LevelSource::Measured(irs) => {
            if irs.len() < layout.len() {
                return Err(Error::MissingImpulseResponse(
                    layout.speakers[irs.len()].id.clone(),
                ));
            }
            if irs.len() > layout.len() {
                return Err(Error::ChannelCountMismatch {
                    expected: layout.len(),
                    found: irs.len(),
                });
            }
            let rate = irs[0].sample_rate_hz();
            if let Some(ir) = irs.iter().find(|ir| ir.sample_rate_hz() != rate) {
                return Err(Error::RateMismatch {
                    expected: rate,
                    found: ir.sample_rate_hz(),
                });
            }
            // common averaging time so levels are comparable across speakers
            let len = irs.iter().map(|ir| ir.len()).max().unwrap_or(0);
            irs.iter()
                .map(|ir| {
                    let onset = match ir.onset_index() {
                        Some(o) => o,
                        None => analysis::detect_onset(ir)?,
                    };
                    let ir = ir.zero_padded(len).with_onset(onset)?;
                    Ok((
                        analysis::level_from_ir(&ir, options.weighting)?,
                        analysis::direct_level_from_ir(&ir, &options.fdt, options.weighting)?,
                    ))
                })
                .collect()
        }
    }
}

/// Analyzes every speaker and assembles the profile.
pub fn build_profile(
    layout: &Layout,
    room: &RoomModel,
    source: LevelSource<'_>,
    options: &CalibrationOptions,
) -> Result<CalibrationProfile> {
    crate::validate_layout(layout)?;
    room.validate()?;
    let levels = speaker_levels(layout, room, source, options)?;

    let min = |it: &mut dyn Iterator<Item = f64>| it.fold(f64::INFINITY, f64::min);
    let l_ref = options
        .l_ref_db
        .unwrap_or_else(|| min(&mut levels.iter().map(|l| l.0)));
    let l_ref_ds = options
        .l_ref_ds_db
        .unwrap_or_else(|| min(&mut levels.iter().map(|l| l.1)));
    let distances = layout.distances();
    let d_ref = options
        .d_ref_m
        .unwrap_or_else(|| distances.iter().copied().fold(0.0, f64::max));
    let delays = time_alignment(&distances, d_ref, room.speed_of_sound)?;

    let entries = layout
        .speakers
        .iter()
        .zip(levels)
        .zip(delays)
        .map(
            |((s, (level_db, direct_level_db)), delay_s)| SpeakerLevels {
                id: s.id.clone(),
                level_db,
                direct_level_db,
                delay_s,
            },
        )
        .collect();
    CalibrationProfile::new(entries, l_ref, l_ref_ds, d_ref)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Loudspeaker;

    fn asymmetric_stereo() -> Layout {
        Layout::new(vec![
            Loudspeaker::new("L", 30.0, 1.5),
            Loudspeaker::new("R", -30.0, 3.0),
        ])
        .unwrap()
    }

    #[test]
    fn loudness_compensation_examples() {
        assert_eq!(
            loudness_compensation(&[-20.0, -23.0], -23.0),
            vec![-3.0, 0.0]
        );
        assert_eq!(
            loudness_compensation(&[-23.0, -23.0], -23.0),
            vec![0.0, 0.0]
        );
        let base = loudness_compensation(&[-20.0, -23.0], -23.0);
        let shifted = loudness_compensation(&[-20.0, -23.0], -21.5);
        for (a, b) in base.iter().zip(&shifted) {
            assert!((b - a - 1.5).abs() < 1e-12);
        }
    }

    #[test]
    fn dsc_compensation_examples() {
        let d = dsc_compensation(&[-14.0, -20.02], -20.02);
        assert!((d[0] + 6.02).abs() < 1e-12);
        assert_eq!(d[1], 0.0);
        assert_eq!(dsc_compensation(&[-9.0, -9.0], -9.0), vec![0.0, 0.0]);
    }

    #[test]
    fn time_alignment_examples() {
        let dt = time_alignment(&[1.5, 3.0], 3.0, 343.0).unwrap();
        assert!((dt[0] - 1.5 / 343.0).abs() < 1e-15);
        assert!((dt[0] * 1e3 - 4.373).abs() < 1e-3);
        assert_eq!(dt[1], 0.0);
        assert_eq!(
            time_alignment(&[2.0, 2.0], 2.0, 343.0).unwrap(),
            vec![0.0, 0.0]
        );
        assert!(matches!(
            time_alignment(&[1.5, 3.0], 1.5, 343.0),
            Err(Error::NegativeDelay { index: 1, .. })
        ));
    }

    #[test]
    fn model_profile_for_reference_geometry() {
        let room = RoomModel::new(2.114).unwrap();
        let p = build_profile(
            &asymmetric_stereo(),
            &room,
            LevelSource::Model,
            &CalibrationOptions::default(),
        )
        .unwrap();
        // independent evaluation of the level models
        let pi4 = 4.0 * std::f64::consts::PI;
        let total =
            |d: f64| 10.0 * ((1.0 / pi4) * (1.0 / (d * d) + 1.0 / (2.114f64 * 2.114))).log10();
        let direct = |d: f64| 10.0 * (1.0 / (pi4 * d * d)).log10();
        let l = &p.speakers[0];
        assert!((l.loudness_comp_db - (total(3.0) - total(1.5))).abs() < 1e-12);
        assert!((l.loudness_comp_db + 3.000_291_5).abs() < 1e-6);
        assert!((l.dsc_comp_db - (direct(3.0) - direct(1.5))).abs() < 1e-12);
        assert!((l.dsc_comp_db + 6.020_600).abs() < 1e-6);
        assert!((l.delay_s - 0.004_373_178).abs() < 1e-9);
        let r = &p.speakers[1];
        assert_eq!(
            (r.loudness_comp_db, r.dsc_comp_db, r.delay_s),
            (0.0, 0.0, 0.0)
        );
        assert_eq!(p.d_ref_m, 3.0);
    }

    #[test]
    fn equidistant_profile_is_neutral() {
        let layout = asymmetric_stereo().equidistant(2.5);
        let room = RoomModel::new(2.114).unwrap();
        let p = build_profile(
            &layout,
            &room,
            LevelSource::Model,
            &CalibrationOptions::default(),
        )
        .unwrap();
        for s in &p.speakers {
            assert_eq!(
                (s.loudness_comp_db, s.dsc_comp_db, s.delay_s),
                (0.0, 0.0, 0.0)
            );
        }
    }

    #[test]
    fn measured_mode_errors() {
        let room = RoomModel::new(2.114).unwrap();
        let layout = asymmetric_stereo();
        let opts = CalibrationOptions::default();
        let ir = |rate| {
            let mut h = vec![0.0; 4800];
            h[10] = 1.0;
            ImpulseResponse::new(h, rate).unwrap()
        };
        let one = [ir(48_000)];
        assert_eq!(
            build_profile(&layout, &room, LevelSource::Measured(&one), &opts),
            Err(Error::MissingImpulseResponse("R".into()))
        );
        let mixed = [ir(48_000), ir(44_100)];
        assert!(matches!(
            build_profile(&layout, &room, LevelSource::Measured(&mixed), &opts),
            Err(Error::RateMismatch { .. })
        ));
        let silent = [
            ir(48_000),
            ImpulseResponse::new(vec![0.0; 4800], 48_000).unwrap(),
        ];
        assert_eq!(
            build_profile(&layout, &room, LevelSource::Measured(&silent), &opts),
            Err(Error::SilentResponse)
        );
    }
}
