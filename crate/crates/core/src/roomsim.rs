//! Deterministic synthetic room responses.
//!
//! Each response is a direct-path spike followed, after a fixed gap, by an
//! exponentially decaying Gaussian tail. Direct energy follows the inverse
//! square law; tail energy is set so that diffuse/direct = (d/D_c)², which
//! makes the synthetic responses an exact instance of the direct-plus-diffuse
//! level model.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::dsp::fft_convolve;
use crate::renderer::MultichannelAudio;
use crate::{Error, ImpulseResponse, Layout, Loudspeaker, Result, RoomModel};

/// Seed used when none is given.
pub const DEFAULT_SEED: u64 = 1;

/// Silence between the direct spike and the start of the diffuse tail.
pub const DIFFUSE_GAP_S: f64 = 0.005;

/// Extra length beyond `rt60` so that every speaker within ~60 m shares the
/// same response length.
const LENGTH_PAD_S: f64 = 0.2;

/// Sample index of the direct-path arrival.
pub fn direct_index(spk: &Loudspeaker, room: &RoomModel, sample_rate_hz: u32) -> usize {
    (sample_rate_hz as f64 * spk.distance_m / room.speed_of_sound).round() as usize
}

/// Synthesizes the response of `spk` at the listening position.
pub fn synth_ir(
    spk: &Loudspeaker,
    room: &RoomModel,
    sample_rate_hz: u32,
    seed: u64,
) -> Result<ImpulseResponse> {
    spk.validate()?;
    room.validate()?;
    if sample_rate_hz == 0 {
        return Err(Error::InvalidParams("sample rate is zero".into()));
    }
    let fs = sample_rate_hz as f64;
    let direct = direct_index(spk, room, sample_rate_hz);
    let tail_start = direct + (DIFFUSE_GAP_S * fs).round() as usize;
    let tail_len = (room.rt60_s * fs).ceil() as usize;
    let len = ((room.rt60_s + LENGTH_PAD_S) * fs).ceil() as usize;
    let len = len.max(tail_start + tail_len);

    let source = spk.power * spk.directivity / (4.0 * std::f64::consts::PI);
    let direct_energy = source / spk.distance_m.powi(2);
    let diffuse_energy = source / room.critical_distance_m.powi(2);

    let mut h = vec![0.0; len];
    h[direct] = direct_energy.sqrt();

    // energy falls by 60 dB over rt60
    let decay = (1e6f64).ln() / room.rt60_s;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for (i, x) in h[tail_start..].iter_mut().enumerate() {
        let t = i as f64 / fs;
        let z: f64 = StandardNormal.sample(&mut rng);
        *x = z * (-0.5 * decay * t).exp();
    }
    let tail_energy: f64 = h[tail_start..].iter().map(|x| x * x).sum();
    let scale = (diffuse_energy / tail_energy).sqrt();
    h[tail_start..].iter_mut().for_each(|x| *x *= scale);

    ImpulseResponse::new(h, sample_rate_hz)
}

/// One response per speaker; speaker `i` uses seed `seed + i` so tails are
/// mutually uncorrelated.
pub fn synth_layout_irs(
    layout: &Layout,
    room: &RoomModel,
    sample_rate_hz: u32,
    seed: u64,
) -> Result<Vec<ImpulseResponse>> {
    layout
        .speakers
        .iter()
        .enumerate()
        .map(|(i, s)| synth_ir(s, room, sample_rate_hz, seed.wrapping_add(i as u64)))
        .collect()
}

/// Each feed convolved with its speaker's response, before summation.
pub fn listener_contributions(
    feeds: &MultichannelAudio,
    irs: &[ImpulseResponse],
) -> Result<Vec<Vec<f64>>> {
    if feeds.channels.len() != irs.len() {
        return Err(Error::ChannelCountMismatch {
            expected: feeds.channels.len(),
            found: irs.len(),
        });
    }
    if let Some(ir) = irs
        .iter()
        .find(|ir| ir.sample_rate_hz() != feeds.sample_rate_hz)
    {
        return Err(Error::RateMismatch {
            expected: feeds.sample_rate_hz,
            found: ir.sample_rate_hz(),
        });
    }
    Ok(feeds
        .channels
        .iter()
        .zip(irs)
        .map(|(feed, ir)| {
            let x: Vec<f64> = feed.iter().map(|&v| v as f64).collect();
            fft_convolve(&x, ir.samples())
        })
        .collect())
}

/// Signal at the listening position: `Σ_i feed_i ∗ ir_i`.
pub fn simulate_listening(feeds: &MultichannelAudio, irs: &[ImpulseResponse]) -> Result<Vec<f64>> {
    let parts = listener_contributions(feeds, irs)?;
    let len = parts.iter().map(Vec::len).max().unwrap_or(0);
    let mut out = vec![0.0; len];
    for part in &parts {
        for (o, x) in out.iter_mut().zip(part) {
            *o += x;
        }
    }
    Ok(out)
}
