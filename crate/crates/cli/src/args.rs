use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use dscpan_core::analysis::WeightingSpec;
use dscpan_core::panner::RenderMode;
use dscpan_core::roomsim::DEFAULT_SEED;

#[derive(Debug, Parser)]
#[command(
    name = "dscpan",
    version,
    about = "Direct-sound compensated panning for non-equidistant loudspeakers"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Analyze levels and delays and write a calibration profile.
    Calibrate(CalibrateArgs),
    /// Render a scene or channel bed to loudspeaker feeds.
    Render(RenderArgs),
    /// Print the gain stages for one or more azimuths.
    Gains(GainsArgs),
    /// Write synthetic room impulse responses, one WAV per speaker.
    SimulateRoom(SimulateArgs),
    /// Convolve loudspeaker feeds with impulse responses and sum them.
    Listen(ListenArgs),
    /// Tangent-law direction predictions over the panning span, as CSV.
    Predict(PredictArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Mode {
    Frc,
    Dsc,
    DscNoLc,
}

impl From<Mode> for RenderMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Frc => RenderMode::Frc,
            Mode::Dsc => RenderMode::Dsc,
            Mode::DscNoLc => RenderMode::DscNoLc,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Weighting {
    None,
    A,
    Pink,
    PinkA,
}

impl From<Weighting> for WeightingSpec {
    fn from(w: Weighting) -> Self {
        match w {
            Weighting::None => WeightingSpec::NONE,
            Weighting::A => WeightingSpec::A,
            Weighting::Pink => WeightingSpec::PINK,
            Weighting::PinkA => WeightingSpec::PINK_A,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

/// Room parameters; each flag overrides the `room` block of the layout file.
#[derive(Debug, Args)]
pub struct RoomArgs {
    #[arg(long)]
    pub critical_distance: Option<f64>,
    #[arg(long)]
    pub speed_of_sound: Option<f64>,
    #[arg(long)]
    pub rt60: Option<f64>,
}

#[derive(Debug, Args)]
pub struct CalibrateArgs {
    #[arg(long)]
    pub layout: PathBuf,
    /// Directory with one `<speaker id>.wav` impulse response per speaker.
    #[arg(long, conflicts_with = "model", required_unless_present = "model")]
    pub ir_dir: Option<PathBuf>,
    /// Use the level models instead of measured responses.
    #[arg(long)]
    pub model: bool,
    #[command(flatten)]
    pub room: RoomArgs,
    #[arg(long, value_enum, default_value = "pink-a")]
    pub weighting: Weighting,
    /// Truncation time of the lowest band, in milliseconds.
    #[arg(long)]
    pub tau_ms: Option<f64>,
    #[arg(long)]
    pub l_ref: Option<f64>,
    #[arg(long)]
    pub l_ref_ds: Option<f64>,
    #[arg(long)]
    pub d_ref: Option<f64>,
    #[arg(short, long)]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct RenderArgs {
    #[arg(long, required_unless_present = "bed", conflicts_with = "bed")]
    pub scene: Option<PathBuf>,
    /// Mono or stereo WAV rendered as static objects at 0° or ±30°.
    #[arg(long)]
    pub bed: Option<PathBuf>,
    #[arg(long)]
    pub layout: PathBuf,
    #[arg(long)]
    pub calibration: PathBuf,
    #[arg(long, value_enum, default_value = "dsc")]
    pub mode: Mode,
    #[arg(short, default_value_t = 2.0)]
    pub p: f64,
    #[arg(long, default_value_t = 256)]
    pub block_size: usize,
    /// Gain ramp length for trajectory changes; defaults to one block.
    #[arg(long)]
    pub crossfade: Option<usize>,
    #[arg(short, long)]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct GainsArgs {
    #[arg(long, required = true, num_args = 1.., allow_negative_numbers = true)]
    pub theta: Vec<f64>,
    #[arg(long)]
    pub layout: PathBuf,
    #[arg(long)]
    pub calibration: PathBuf,
    #[arg(long, value_enum, default_value = "dsc")]
    pub mode: Mode,
    #[arg(short, default_value_t = 2.0)]
    pub p: f64,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub layout: PathBuf,
    #[command(flatten)]
    pub room: RoomArgs,
    #[arg(long, default_value_t = 48_000)]
    pub sample_rate: u32,
    #[arg(long, env = "DSC_RENDER_SEED", default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Output directory; created if missing.
    #[arg(short, long)]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct ListenArgs {
    /// Multichannel feeds in layout order.
    #[arg(long)]
    pub feeds: PathBuf,
    #[arg(long)]
    pub layout: PathBuf,
    #[arg(long)]
    pub ir_dir: PathBuf,
    #[arg(short, long)]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct PredictArgs {
    #[arg(long)]
    pub layout: PathBuf,
    #[arg(long)]
    pub calibration: PathBuf,
    #[arg(long, default_value_t = 1.0)]
    pub step: f64,
    #[arg(short, default_value_t = 2.0)]
    pub p: f64,
    /// Write to a file instead of stdout.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}
