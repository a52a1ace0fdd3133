//! Versioned JSON documents for layouts, calibration profiles and scenes.
//!
//! Every document carries `"schema_version": 1` at the top level.
//!
//! Layout:
//! ```json
//! { "schema_version": 1,
//!   "speakers": [ { "id": "L", "azimuth_deg": 30, "distance_m": 1.5 },
//!                 { "id": "R", "azimuth_deg": -30, "distance_m": 3.0 } ],
//!   "room": { "critical_distance_m": 2.114 } }
//! ```
//!
//! Scene (audio paths are relative to the scene file):
//! ```json
//! { "schema_version": 1, "sample_rate_hz": 48000,
//!   "objects": [
//!     { "id": "voice", "azimuth_deg": 0, "audio": { "file": "voice.wav" } },
//!     { "id": "sweep", "audio": { "samples": [1.0, 0.0, 0.0] },
//!       "trajectory": [ { "start_s": 0.0, "azimuth_deg": -30 },
//!                       { "start_s": 0.5, "azimuth_deg": 30 } ] } ] }
//! ```

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::{
    AzimuthSegment, CalibrationProfile, Error, Layout, Loudspeaker, Result, RoomModel, Scene,
    SourceObject,
};

pub const SCHEMA_VERSION: u32 = 1;

fn check_version(found: u32) -> Result<()> {
    if found != SCHEMA_VERSION {
        return Err(Error::Json(format!(
            "unsupported schema_version {found} (expected {SCHEMA_VERSION})"
        )));
    }
    Ok(())
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Json(format!("{}: {e}", path.display())))
}

fn write<T: Serialize>(path: &Path, doc: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(doc)?;
    text.push('\n');
    std::fs::write(path, text).map_err(|e| Error::Json(format!("{}: {e}", path.display())))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayoutDoc {
    pub schema_version: u32,
    pub speakers: Vec<Loudspeaker>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub room: Option<RoomModel>,
}

impl LayoutDoc {
    pub fn new(layout: &Layout, room: Option<RoomModel>) -> Self {
        LayoutDoc {
            schema_version: SCHEMA_VERSION,
            speakers: layout.speakers.clone(),
            room,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: LayoutDoc = serde_json::from_str(text)?;
        check_version(doc.schema_version)?;
        crate::validate_layout(&doc.layout())?;
        if let Some(room) = &doc.room {
            room.validate()?;
        }
        Ok(doc)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&read(path.as_ref())?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        write(path.as_ref(), self)
    }

    pub fn layout(&self) -> Layout {
        Layout {
            speakers: self.speakers.clone(),
        }
    }
}

/// How the levels in a profile were obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LevelOrigin {
    Model,
    Measured,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationDoc {
    pub schema_version: u32,
    pub source: LevelOrigin,
    pub profile: CalibrationProfile,
}

impl CalibrationDoc {
    pub fn new(profile: CalibrationProfile, source: LevelOrigin) -> Self {
        CalibrationDoc {
            schema_version: SCHEMA_VERSION,
            source,
            profile,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        Ok(text)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: CalibrationDoc = serde_json::from_str(text)?;
        check_version(doc.schema_version)?;
        Ok(doc)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&read(path.as_ref())?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        write(path.as_ref(), self)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AudioRef {
    /// Mono WAV file, or one channel of a multichannel file.
    File {
        file: PathBuf,
        #[serde(default)]
        channel: usize,
    },
    Samples {
        samples: Vec<f32>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObjectDoc {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub azimuth_deg: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trajectory: Option<Vec<AzimuthSegment>>,
    pub audio: AudioRef,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SceneDoc {
    pub schema_version: u32,
    pub sample_rate_hz: u32,
    pub objects: Vec<ObjectDoc>,
}

impl SceneDoc {
    pub fn from_json(text: &str) -> Result<Self> {
        let doc: SceneDoc = serde_json::from_str(text)?;
        check_version(doc.schema_version)?;
        Ok(doc)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&read(path.as_ref())?)
    }

    /// Resolves audio and builds the scene. Relative file paths are taken
    /// from `base_dir`.
    pub fn into_scene(self, base_dir: &Path) -> Result<Scene> {
        let rate = self.sample_rate_hz;
        let objects = self
            .objects
            .into_iter()
            .map(|obj| {
                let samples = match obj.audio {
                    AudioRef::Samples { samples } => samples,
                    AudioRef::File { file, channel } => {
                        let audio = crate::wav::read_multichannel(base_dir.join(file))?;
                        if audio.sample_rate_hz != rate {
                            return Err(Error::RateMismatch {
                                expected: rate,
                                found: audio.sample_rate_hz,
                            });
                        }
                        let n = audio.channels.len();
                        audio.channels.into_iter().nth(channel).ok_or_else(|| {
                            Error::InvalidScene(format!(
                                "object {:?}: channel {channel} of {n}",
                                obj.id
                            ))
                        })?
                    }
                };
                match (obj.azimuth_deg, obj.trajectory) {
                    (Some(az), None) => Ok(SourceObject::fixed(obj.id, samples, rate, az)),
                    (None, Some(t)) => SourceObject::with_trajectory(obj.id, samples, rate, t),
                    _ => Err(Error::InvalidScene(format!(
                        "object {:?}: give exactly one of azimuth_deg or trajectory",
                        obj.id
                    ))),
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Scene::new(objects, rate)
    }
}

/// Loads a scene file, resolving audio relative to its directory.
pub fn load_scene(path: impl AsRef<Path>) -> Result<Scene> {
    let path = path.as_ref();
    let base = path.parent().unwrap_or_else(|| Path::new("."));
    SceneDoc::load(path)?.into_scene(base)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layout_doc_parses_with_defaults() {
        let doc = LayoutDoc::from_json(
            r#"{"schema_version": 1,
                "speakers": [{"id": "L", "azimuth_deg": 30, "distance_m": 1.5},
                             {"id": "R", "azimuth_deg": -30, "distance_m": 3.0}],
                "room": {"critical_distance_m": 2.114}}"#,
        )
        .unwrap();
        let layout = doc.layout();
        assert_eq!(layout.speakers[1].power, 1.0);
        assert_eq!(doc.room.unwrap().speed_of_sound, 343.0);
    }

    #[test]
    fn version_and_validity_are_checked() {
        let bad_version = r#"{"schema_version": 2, "speakers": [{"id": "a", "azimuth_deg": 0, "distance_m": 1}]}"#;
        assert!(matches!(
            LayoutDoc::from_json(bad_version),
            Err(Error::Json(_))
        ));
        let zero = r#"{"schema_version": 1, "speakers": [{"id": "a", "azimuth_deg": 0, "distance_m": 0}]}"#;
        assert!(matches!(
            LayoutDoc::from_json(zero),
            Err(Error::NonPositive { .. })
        ));
    }

    #[test]
    fn scene_inline_and_file_audio() {
        let dir = tempfile::tempdir().unwrap();
        crate::wav::write_multichannel(
            dir.path().join("a.wav"),
            &crate::renderer::MultichannelAudio {
                channels: vec![vec![0.5, 0.25], vec![-1.0, 0.0]],
                sample_rate_hz: 48_000,
            },
        )
        .unwrap();
        let text = r#"{"schema_version": 1, "sample_rate_hz": 48000, "objects": [
            {"id": "f", "azimuth_deg": 10, "audio": {"file": "a.wav", "channel": 1}},
            {"id": "s", "audio": {"samples": [1, 0]},
             "trajectory": [{"start_s": 0, "azimuth_deg": -30}, {"start_s": 0.5, "azimuth_deg": 30}]}]}"#;
        std::fs::write(dir.path().join("scene.json"), text).unwrap();
        let scene = load_scene(dir.path().join("scene.json")).unwrap();
        assert_eq!(scene.objects[0].samples, vec![-1.0, 0.0]);
        assert!(scene.objects[0].is_static());
        assert_eq!(scene.objects[1].trajectory().len(), 2);
    }

    #[test]
    fn scene_errors() {
        let dir = tempfile::tempdir().unwrap();
        let both = r#"{"schema_version": 1, "sample_rate_hz": 48000, "objects": [
            {"id": "x", "azimuth_deg": 0, "trajectory": [{"start_s": 0, "azimuth_deg": 0}], "audio": {"samples": [1]}}]}"#;
        assert!(matches!(
            SceneDoc::from_json(both).unwrap().into_scene(dir.path()),
            Err(Error::InvalidScene(_))
        ));
        let missing = r#"{"schema_version": 1, "sample_rate_hz": 48000, "objects": [
            {"id": "x", "azimuth_deg": 0, "audio": {"file": "nope.wav"}}]}"#;
        assert!(matches!(
            SceneDoc::from_json(missing).unwrap().into_scene(dir.path()),
            Err(Error::Wav(_))
        ));
    }
}
