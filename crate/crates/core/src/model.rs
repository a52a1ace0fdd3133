//! Domain types shared by every stage of the pipeline.
//!
//! Angles are in degrees, listener-centric, positive to the left. Distances
//! are meters, levels are dB (`10·log10` of a power-like quantity) and
//! compensation gains are applied as amplitudes (`10^(dB/20)`).

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

fn one() -> f64 {
    1.0
}

/// A loudspeaker as seen from the listening position.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Loudspeaker {
    pub id: String,
    pub azimuth_deg: f64,
    pub distance_m: f64,
    /// Acoustic power in watts.
    #[serde(default = "one")]
    pub power: f64,
    /// Directivity factor toward the listener.
    #[serde(default = "one")]
    pub directivity: f64,
}

impl Loudspeaker {
    /// Unit-power omnidirectional speaker.
    pub fn new(id: impl Into<String>, azimuth_deg: f64, distance_m: f64) -> Self {
        Loudspeaker {
            id: id.into(),
            azimuth_deg,
            distance_m,
            power: 1.0,
            directivity: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (field, value) in [
            ("distance_m", self.distance_m),
            ("power", self.power),
            ("directivity", self.directivity),
        ] {
            if !(value > 0.0 && value.is_finite()) {
                return Err(Error::NonPositive {
                    id: self.id.clone(),
                    field,
                    value,
                });
            }
        }
        if !(-180.0..180.0).contains(&self.azimuth_deg) {
            return Err(Error::AzimuthOutOfRange {
                id: self.id.clone(),
                value: self.azimuth_deg,
            });
        }
        Ok(())
    }
}

/// Ordered set of loudspeakers; the listener sits at the origin.
///
/// Azimuths must be strictly monotonic in layout order (either direction),
/// so `[L +30°, R -30°]` and `[R -30°, L +30°]` are both accepted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Layout {
    pub speakers: Vec<Loudspeaker>,
}

impl Layout {
    pub fn new(speakers: Vec<Loudspeaker>) -> Result<Self> {
        let layout = Layout { speakers };
        validate_layout(&layout)?;
        Ok(layout)
    }

    pub fn len(&self) -> usize {
        self.speakers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.speakers.is_empty()
    }

    pub fn distances(&self) -> Vec<f64> {
        self.speakers.iter().map(|s| s.distance_m).collect()
    }

    pub fn azimuths(&self) -> Vec<f64> {
        self.speakers.iter().map(|s| s.azimuth_deg).collect()
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.speakers.iter().position(|s| s.id == id)
    }

    /// Speaker indices sorted by ascending azimuth.
    pub fn by_azimuth(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.speakers.len()).collect();
        idx.sort_by(|&a, &b| {
            self.speakers[a]
                .azimuth_deg
                .total_cmp(&self.speakers[b].azimuth_deg)
        });
        idx
    }

    /// Same angles and speakers, every distance replaced by `distance_m`.
    pub fn equidistant(&self, distance_m: f64) -> Layout {
        Layout {
            speakers: self
                .speakers
                .iter()
                .map(|s| Loudspeaker {
                    distance_m,
                    ..s.clone()
                })
                .collect(),
        }
    }
}

pub fn validate_layout(layout: &Layout) -> Result<()> {
    if layout.speakers.is_empty() {
        return Err(Error::EmptyLayout);
    }
    let mut seen = HashSet::new();
    for spk in &layout.speakers {
        if !seen.insert(spk.id.as_str()) {
            return Err(Error::DuplicateId(spk.id.clone()));
        }
        spk.validate()?;
    }
    if layout.speakers.len() > 1 {
        let ascending = layout.speakers[1].azimuth_deg > layout.speakers[0].azimuth_deg;
        for pair in layout.speakers.windows(2) {
            let ok = if ascending {
                pair[1].azimuth_deg > pair[0].azimuth_deg
            } else {
                pair[1].azimuth_deg < pair[0].azimuth_deg
            };
            if !ok {
                return Err(Error::UnorderedAzimuths {
                    id: pair[1].id.clone(),
                });
            }
        }
    }
    Ok(())
}

fn default_speed_of_sound() -> f64 {
    RoomModel::DEFAULT_SPEED_OF_SOUND
}

fn default_rt60() -> f64 {
    RoomModel::DEFAULT_RT60
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RoomModel {
    /// Distance at which direct and diffuse intensities are equal.
    pub critical_distance_m: f64,
    #[serde(default = "default_speed_of_sound")]
    pub speed_of_sound: f64,
    /// Decay time of the synthetic diffuse tail.
    #[serde(default = "default_rt60")]
    pub rt60_s: f64,
}

impl RoomModel {
    pub const DEFAULT_SPEED_OF_SOUND: f64 = 343.0;
    pub const DEFAULT_RT60: f64 = 0.4;

    pub fn new(critical_distance_m: f64) -> Result<Self> {
        let room = RoomModel {
            critical_distance_m,
            speed_of_sound: Self::DEFAULT_SPEED_OF_SOUND,
            rt60_s: Self::DEFAULT_RT60,
        };
        room.validate()?;
        Ok(room)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("critical_distance_m", self.critical_distance_m),
            ("speed_of_sound", self.speed_of_sound),
            ("rt60_s", self.rt60_s),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidRoom(format!(
                    "{name} must be positive, got {v}"
                )));
            }
        }
        Ok(())
    }
}

/// A sampled impulse response.
#[derive(Debug, Clone, PartialEq)]
pub struct ImpulseResponse {
    samples: Vec<f64>,
    sample_rate_hz: u32,
    onset_index: Option<usize>,
}

impl ImpulseResponse {
    pub fn new(samples: Vec<f64>, sample_rate_hz: u32) -> Result<Self> {
        if sample_rate_hz == 0 {
            return Err(Error::InvalidImpulseResponse("sample rate is zero".into()));
        }
        if samples.is_empty() {
            return Err(Error::InvalidImpulseResponse("no samples".into()));
        }
        if samples.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidImpulseResponse("non-finite sample".into()));
        }
        Ok(ImpulseResponse {
            samples,
            sample_rate_hz,
            onset_index: None,
        })
    }

    pub fn with_onset(mut self, onset: usize) -> Result<Self> {
        if onset >= self.samples.len() {
            return Err(Error::InvalidImpulseResponse(format!(
                "onset {onset} beyond length {}",
                self.samples.len()
            )));
        }
        self.onset_index = Some(onset);
        Ok(self)
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn sample_rate_hz(&self) -> u32 {
        self.sample_rate_hz
    }

    pub fn onset_index(&self) -> Option<usize> {
        self.onset_index
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn duration_s(&self) -> f64 {
        self.samples.len() as f64 / self.sample_rate_hz as f64
    }

    /// Append zeros up to `len` samples; shorter targets are a no-op.
    pub fn zero_padded(&self, len: usize) -> ImpulseResponse {
        let mut out = self.clone();
        if len > out.samples.len() {
            out.samples.resize(len, 0.0);
        }
        out
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }
}

/// Per-speaker calibration record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpeakerCalibration {
    pub id: String,
    /// Full-response level `L_i`.
    pub level_db: f64,
    /// Direct-sound level `L_i^DS`.
    pub direct_level_db: f64,
    /// `L_ref - L_i`.
    pub loudness_comp_db: f64,
    /// `L_ref^DS - L_i^DS`.
    pub dsc_comp_db: f64,
    /// Alignment delay applied to this speaker's feed.
    pub delay_s: f64,
}

impl SpeakerCalibration {
    /// Linear loudness-compensation gain `10^(ΔL_i/20)`.
    pub fn frc_gain(&self) -> f64 {
        crate::db_to_gain(self.loudness_comp_db)
    }

    /// `ΔL_i^DS - ΔL_i`: the extra gain the direct-sound compensation puts on
    /// top of an already loudness-matched speaker.
    pub fn dsc_offset_db(&self) -> f64 {
        self.dsc_comp_db - self.loudness_comp_db
    }
}

/// Levels and delays per speaker together with the references they were
/// compensated against.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawProfile")]
pub struct CalibrationProfile {
    pub speakers: Vec<SpeakerCalibration>,
    pub l_ref_db: f64,
    pub l_ref_ds_db: f64,
    pub d_ref_m: f64,
}

#[derive(Deserialize)]
struct RawProfile {
    speakers: Vec<SpeakerCalibration>,
    l_ref_db: f64,
    l_ref_ds_db: f64,
    d_ref_m: f64,
}

impl TryFrom<RawProfile> for CalibrationProfile {
    type Error = Error;

    fn try_from(raw: RawProfile) -> Result<Self> {
        let profile = CalibrationProfile {
            speakers: raw.speakers,
            l_ref_db: raw.l_ref_db,
            l_ref_ds_db: raw.l_ref_ds_db,
            d_ref_m: raw.d_ref_m,
        };
        profile.validate()?;
        Ok(profile)
    }
}

/// Measured or modelled inputs for one speaker of a [`CalibrationProfile`].
#[derive(Debug, Clone, PartialEq)]
pub struct SpeakerLevels {
    pub id: String,
    pub level_db: f64,
    pub direct_level_db: f64,
    pub delay_s: f64,
}

impl CalibrationProfile {
    /// Tolerance for the compensation identities when loading a profile.
    const IDENTITY_TOL_DB: f64 = 1e-9;

    /// Builds the profile, deriving both compensation terms from the
    /// references.
    pub fn new(
        speakers: Vec<SpeakerLevels>,
        l_ref_db: f64,
        l_ref_ds_db: f64,
        d_ref_m: f64,
    ) -> Result<Self> {
        let speakers = speakers
            .into_iter()
            .map(|s| SpeakerCalibration {
                loudness_comp_db: l_ref_db - s.level_db,
                dsc_comp_db: l_ref_ds_db - s.direct_level_db,
                id: s.id,
                level_db: s.level_db,
                direct_level_db: s.direct_level_db,
                delay_s: s.delay_s,
            })
            .collect();
        let profile = CalibrationProfile {
            speakers,
            l_ref_db,
            l_ref_ds_db,
            d_ref_m,
        };
        profile.validate()?;
        Ok(profile)
    }

    /// Same measurements compensated against different references.
    pub fn with_references(&self, l_ref_db: f64, l_ref_ds_db: f64) -> Result<Self> {
        let levels = self
            .speakers
            .iter()
            .map(|s| SpeakerLevels {
                id: s.id.clone(),
                level_db: s.level_db,
                direct_level_db: s.direct_level_db,
                delay_s: s.delay_s,
            })
            .collect();
        CalibrationProfile::new(levels, l_ref_db, l_ref_ds_db, self.d_ref_m)
    }

    pub fn validate(&self) -> Result<()> {
        if self.speakers.is_empty() {
            return Err(Error::InvalidProfile("no speakers".into()));
        }
        let finite = [self.l_ref_db, self.l_ref_ds_db, self.d_ref_m]
            .iter()
            .all(|v| v.is_finite());
        if !finite || self.d_ref_m <= 0.0 {
            return Err(Error::InvalidProfile(
                "references must be finite, d_ref positive".into(),
            ));
        }
        let mut seen = HashSet::new();
        for s in &self.speakers {
            if !seen.insert(s.id.as_str()) {
                return Err(Error::InvalidProfile(format!(
                    "duplicate speaker id {:?}",
                    s.id
                )));
            }
            let values = [
                s.level_db,
                s.direct_level_db,
                s.loudness_comp_db,
                s.dsc_comp_db,
                s.delay_s,
            ];
            if values.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidProfile(format!("{}: non-finite value", s.id)));
            }
            if (self.l_ref_db - s.level_db - s.loudness_comp_db).abs() > Self::IDENTITY_TOL_DB {
                return Err(Error::InvalidProfile(format!(
                    "{}: loudness_comp_db != l_ref_db - level_db",
                    s.id
                )));
            }
            if (self.l_ref_ds_db - s.direct_level_db - s.dsc_comp_db).abs() > Self::IDENTITY_TOL_DB
            {
                return Err(Error::InvalidProfile(format!(
                    "{}: dsc_comp_db != l_ref_ds_db - direct_level_db",
                    s.id
                )));
            }
            if s.delay_s < 0.0 {
                return Err(Error::InvalidProfile(format!("{}: negative delay", s.id)));
            }
        }
        if !self.speakers.iter().any(|s| s.delay_s == 0.0) {
            return Err(Error::InvalidProfile("no speaker has zero delay".into()));
        }
        Ok(())
    }

    /// Checks that the profile lists exactly the layout's speakers, in order.
    pub fn check_layout(&self, layout: &Layout) -> Result<()> {
        if self.speakers.len() != layout.len() {
            return Err(Error::ProfileMismatch(format!(
                "profile has {} speakers, layout has {}",
                self.speakers.len(),
                layout.len()
            )));
        }
        for (p, s) in self.speakers.iter().zip(&layout.speakers) {
            if p.id != s.id {
                return Err(Error::ProfileMismatch(format!(
                    "expected speaker {:?}, profile has {:?}",
                    s.id, p.id
                )));
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.speakers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.speakers.is_empty()
    }
}

/// Which step of the gain pipeline a [`GainVector`] came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GainStage {
    Raw,
    DscModified,
    LoudnessCorrected,
    Combined,
}

impl GainStage {
    pub fn as_str(self) -> &'static str {
        match self {
            GainStage::Raw => "raw",
            GainStage::DscModified => "dsc_modified",
            GainStage::LoudnessCorrected => "loudness_corrected",
            GainStage::Combined => "combined",
        }
    }
}

/// One gain per speaker, in layout order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GainVector {
    pub stage: GainStage,
    pub gains: Vec<f64>,
    pub p_norm: f64,
}

impl GainVector {
    pub fn new(stage: GainStage, gains: Vec<f64>, p_norm: f64) -> Result<Self> {
        if gains.iter().any(|g| !g.is_finite() || *g < 0.0) {
            return Err(Error::InvalidParams(
                "gains must be finite and non-negative".into(),
            ));
        }
        if !(p_norm > 0.0 && p_norm.is_finite()) {
            return Err(Error::InvalidParams(format!(
                "p must be positive, got {p_norm}"
            )));
        }
        Ok(GainVector {
            stage,
            gains,
            p_norm,
        })
    }

    /// `(Σ|g_j|^p)^(1/p)`.
    pub fn p_norm_value(&self, p: f64) -> f64 {
        p_norm(&self.gains, p)
    }

    pub fn len(&self) -> usize {
        self.gains.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gains.is_empty()
    }
}

/// Scaled by the largest magnitude so that a single non-zero gain `x`
/// yields exactly `|x|`.
pub(crate) fn p_norm(gains: &[f64], p: f64) -> f64 {
    let max = gains.iter().fold(0.0f64, |m, g| m.max(g.abs()));
    if max == 0.0 {
        return 0.0;
    }
    max * gains
        .iter()
        .map(|g| (g.abs() / max).powf(p))
        .sum::<f64>()
        .powf(1.0 / p)
}

/// Azimuth held from `start_s` until the next segment starts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AzimuthSegment {
    pub start_s: f64,
    pub azimuth_deg: f64,
}

/// A mono source with an intended direction.
#[derive(Debug, Clone, PartialEq)]
pub struct SourceObject {
    pub id: String,
    pub samples: Vec<f32>,
    pub sample_rate_hz: u32,
    trajectory: Vec<AzimuthSegment>,
}

impl SourceObject {
    /// Object that stays at one azimuth for its whole duration.
    pub fn fixed(
        id: impl Into<String>,
        samples: Vec<f32>,
        sample_rate_hz: u32,
        azimuth_deg: f64,
    ) -> Self {
        SourceObject {
            id: id.into(),
            samples,
            sample_rate_hz,
            trajectory: vec![AzimuthSegment {
                start_s: 0.0,
                azimuth_deg,
            }],
        }
    }

    /// Piecewise-constant trajectory. The first segment must start at 0 and
    /// start times must strictly increase.
    pub fn with_trajectory(
        id: impl Into<String>,
        samples: Vec<f32>,
        sample_rate_hz: u32,
        trajectory: Vec<AzimuthSegment>,
    ) -> Result<Self> {
        let id = id.into();
        match trajectory.first() {
            Some(first) if first.start_s == 0.0 => {}
            _ => {
                return Err(Error::InvalidScene(format!(
                    "object {id:?}: trajectory must start at 0 s"
                )))
            }
        }
        if trajectory
            .windows(2)
            .any(|w| w[1].start_s.partial_cmp(&w[0].start_s) != Some(std::cmp::Ordering::Greater))
        {
            return Err(Error::InvalidScene(format!(
                "object {id:?}: segment start times must increase"
            )));
        }
        if trajectory.iter().any(|s| !s.azimuth_deg.is_finite()) {
            return Err(Error::InvalidScene(format!(
                "object {id:?}: non-finite azimuth"
            )));
        }
        Ok(SourceObject {
            id,
            samples,
            sample_rate_hz,
            trajectory,
        })
    }

    pub fn trajectory(&self) -> &[AzimuthSegment] {
        &self.trajectory
    }

    pub fn is_static(&self) -> bool {
        self.trajectory.len() == 1
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scene {
    pub objects: Vec<SourceObject>,
    pub sample_rate_hz: u32,
}

impl Scene {
    pub fn new(objects: Vec<SourceObject>, sample_rate_hz: u32) -> Result<Self> {
        if sample_rate_hz == 0 {
            return Err(Error::InvalidScene("sample rate is zero".into()));
        }
        for obj in &objects {
            if obj.sample_rate_hz != sample_rate_hz {
                return Err(Error::RateMismatch {
                    expected: sample_rate_hz,
                    found: obj.sample_rate_hz,
                });
            }
        }
        Ok(Scene {
            objects,
            sample_rate_hz,
        })
    }

    /// Longest object, in samples.
    pub fn len_samples(&self) -> usize {
        self.objects
            .iter()
            .map(|o| o.samples.len())
            .max()
            .unwrap_or(0)
    }

    /// Multiplies every object's audio by `factor`.
    pub fn scaled(&self, factor: f32) -> Scene {
        let mut out = self.clone();
        for obj in &mut out.objects {
            obj.samples.iter_mut().for_each(|x| *x *= factor);
        }
        out
    }
}
