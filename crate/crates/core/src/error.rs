use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("layout has no speakers")]
    EmptyLayout,
    #[error("duplicate speaker id {0:?}")]
    DuplicateId(String),
    #[error("speaker {id:?}: {field} must be positive (got {value})")]
    NonPositive {
        id: String,
        field: &'static str,
        value: f64,
    },
    #[error("speaker {id:?}: azimuth {value} outside [-180, 180)")]
    AzimuthOutOfRange { id: String, value: f64 },
    #[error("speaker azimuths are not strictly ordered (at {id:?})")]
    UnorderedAzimuths { id: String },
    #[error("invalid room model: {0}")]
    InvalidRoom(String),
    #[error("invalid impulse response: {0}")]
    InvalidImpulseResponse(String),
    #[error("silent response: impulse response has no non-zero sample")]
    SilentResponse,
    #[error("impulse response has no onset index")]
    MissingOnset,
    #[error("truncation time {tau_s} s exceeds the {available_s} s available after onset")]
    TruncationTooLong { tau_s: f64, available_s: f64 },
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("reference distance {d_ref} m is closer than speaker {index} at {distance} m")]
    NegativeDelay {
        index: usize,
        distance: f64,
        d_ref: f64,
    },
    #[error("azimuth {theta} outside panning span [{min}, {max}]")]
    OutOfSpan { theta: f64, min: f64, max: f64 },
    #[error("gain vector is all zero")]
    ZeroGains,
    #[error("profile does not match layout: {0}")]
    ProfileMismatch(String),
    #[error("invalid calibration profile: {0}")]
    InvalidProfile(String),
    #[error("sample rate mismatch: expected {expected} Hz, found {found} Hz")]
    RateMismatch { expected: u32, found: u32 },
    #[error("missing impulse response for speaker {0}")]
    MissingImpulseResponse(String),
    #[error("channel count mismatch: expected {expected}, found {found}")]
    ChannelCountMismatch { expected: usize, found: usize },
    #[error("{0} active speakers; localization needs one speaker or one adjacent pair")]
    TooManyActive(usize),
    #[error("gain stage {found} does not match mode (expected {expected})")]
    StageMismatch {
        expected: &'static str,
        found: &'static str,
    },
    #[error("invalid scene: {0}")]
    InvalidScene(String),
    #[error("wav: {0}")]
    Wav(String),
    #[error("json: {0}")]
    Json(String),
}

impl From<hound::Error> for Error {
    fn from(e: hound::Error) -> Self {
        Error::Wav(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}
