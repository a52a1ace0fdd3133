//! Object rendering to loudspeaker feeds.
//!
//! Gains are computed per object at render time, the objects are mixed per
//! speaker, and each speaker bus then gets its loudness-compensation gain
//! and alignment delay. [`render`] drives a [`StreamRenderer`] over the whole
//! scene, so offline and block-wise output are the same samples.

use std::collections::VecDeque;

use crate::panner::{mode_gains, pan_pairwise, RenderMode, DEFAULT_P};
use crate::{AzimuthSegment, CalibrationProfile, Error, Layout, Result, Scene, SourceObject};

/// Canonical stereo positions, channel order L, R.
pub const STEREO: [f64; 2] = [30.0, -30.0];
pub const MONO: [f64; 1] = [0.0];

/// Audio with one channel per speaker, in layout order.
#[derive(Debug, Clone, PartialEq)]
pub struct MultichannelAudio {
    pub channels: Vec<Vec<f32>>,
    pub sample_rate_hz: u32,
}

impl MultichannelAudio {
    pub fn len_samples(&self) -> usize {
        self.channels.iter().map(Vec::len).max().unwrap_or(0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RenderConfig {
    pub mode: RenderMode,
    pub p: f64,
    /// Largest block accepted by [`StreamRenderer::process_block`]; also the
    /// chunk size used by [`render`].
    pub block_size: usize,
    /// Length of the linear gain ramp when an object changes azimuth.
    pub crossfade_samples: usize,
}

impl RenderConfig {
    pub fn new(mode: RenderMode) -> Self {
        RenderConfig {
            mode,
            p: DEFAULT_P,
            block_size: 256,
            crossfade_samples: 256,
        }
    }
}

#[derive(Debug, Clone)]
pub struct RenderOutput {
    pub audio: MultichannelAudio,
    /// Output samples with magnitude above 1.0. Feeds are never normalized.
    pub clipped_samples: usize,
}

/// Mode gains per trajectory segment of one object.
#[derive(Debug, Clone)]
struct ObjectGains {
    starts: Vec<usize>,
    gains: Vec<Vec<f64>>,
}

impl ObjectGains {
    fn new(
        trajectory: &[AzimuthSegment],
        layout: &Layout,
        profile: &CalibrationProfile,
        config: &RenderConfig,
        sample_rate_hz: u32,
    ) -> Result<Self> {
        let mut starts = Vec::with_capacity(trajectory.len());
        let mut gains = Vec::with_capacity(trajectory.len());
        for seg in trajectory {
            let raw = pan_pairwise(seg.azimuth_deg, layout)?;
            gains.push(mode_gains(&raw, profile, config.mode, config.p)?.gains);
            starts.push((seg.start_s * sample_rate_hz as f64).round() as usize);
        }
        if starts.is_empty() {
            return Err(Error::InvalidScene("object without trajectory".into()));
        }
        Ok(ObjectGains { starts, gains })
    }

    fn at(&self, n: usize, crossfade: usize, out: &mut [f64]) {
        let k = self.starts.partition_point(|&s| s <= n).max(1) - 1;
        let cur = &self.gains[k];
        let t = n - self.starts[k].min(n);
        if k == 0 || t >= crossfade {
            out.copy_from_slice(cur);
            return;
        }
        let prev = &self.gains[k - 1];
        let frac = t as f64 / crossfade as f64;
        for ((o, a), b) in out.iter_mut().zip(prev).zip(cur) {
            *o = a + (b - a) * frac;
        }
    }
}

#[derive(Debug, Clone)]
struct DelayLine(VecDeque<f32>);

impl DelayLine {
    fn new(delay: usize) -> Self {
        DelayLine(std::iter::repeat_n(0.0, delay).collect())
    }

    fn push(&mut self, x: f32) -> f32 {
        if self.0.is_empty() {
            return x;
        }
        self.0.push_back(x);
        self.0.pop_front().unwrap_or(0.0)
    }
}

/// Block-based renderer. Output sample `n` depends only on `n` and the
/// inputs up to `n`, never on how the stream was split into blocks.
#[derive(Debug, Clone)]
pub struct StreamRenderer {
    objects: Vec<ObjectGains>,
    frc: Vec<f64>,
    delays: Vec<DelayLine>,
    delay_samples: Vec<usize>,
    config: RenderConfig,
    position: usize,
    gains: Vec<f64>,
    acc: Vec<f64>,
}

impl StreamRenderer {
    pub fn new(
        trajectories: &[&[AzimuthSegment]],
        layout: &Layout,
        profile: &CalibrationProfile,
        config: RenderConfig,
        sample_rate_hz: u32,
    ) -> Result<Self> {
        crate::validate_layout(layout)?;
        profile.check_layout(layout)?;
        if config.block_size == 0 {
            return Err(Error::InvalidParams("block size must be at least 1".into()));
        }
        if sample_rate_hz == 0 {
            return Err(Error::InvalidParams("sample rate is zero".into()));
        }
        let objects = trajectories
            .iter()
            .map(|t| ObjectGains::new(t, layout, profile, &config, sample_rate_hz))
            .collect::<Result<Vec<_>>>()?;
        let delay_samples: Vec<usize> = profile
            .speakers
            .iter()
            .map(|s| (s.delay_s * sample_rate_hz as f64).round() as usize)
            .collect();
        Ok(StreamRenderer {
            objects,
            frc: profile.speakers.iter().map(|s| s.frc_gain()).collect(),
            delays: delay_samples.iter().map(|&d| DelayLine::new(d)).collect(),
            delay_samples,
            config,
            position: 0,
            gains: vec![0.0; layout.len()],
            acc: vec![0.0; layout.len()],
        })
    }

    /// Longest alignment delay in samples.
    pub fn latency_samples(&self) -> usize {
        self.delay_samples.iter().copied().max().unwrap_or(0)
    }

    pub fn delay_samples(&self) -> &[usize] {
        &self.delay_samples
    }

    /// Samples rendered so far.
    pub fn position(&self) -> usize {
        self.position
    }

    /// Renders one block. `inputs` holds one slice per object and `outputs`
    /// one slice per speaker; all must have the same length, at most the
    /// configured block size.
    pub fn process_block(&mut self, inputs: &[&[f32]], outputs: &mut [&mut [f32]]) -> Result<()> {
        if inputs.len() != self.objects.len() {
            return Err(Error::ChannelCountMismatch {
                expected: self.objects.len(),
                found: inputs.len(),
            });
        }
        if outputs.len() != self.frc.len() {
            return Err(Error::ChannelCountMismatch {
                expected: self.frc.len(),
                found: outputs.len(),
            });
        }
        let n = outputs.first().map_or(0, |o| o.len());
        if n > self.config.block_size
            || outputs.iter().any(|o| o.len() != n)
            || inputs.iter().any(|i| i.len() != n)
        {
            return Err(Error::InvalidParams(format!(
                "blocks must share one length of at most {} samples",
                self.config.block_size
            )));
        }

        for i in 0..n {
            let pos = self.position + i;
            self.acc.iter_mut().for_each(|a| *a = 0.0);
            for (obj, input) in self.objects.iter().zip(inputs) {
                obj.at(pos, self.config.crossfade_samples, &mut self.gains);
                let x = input[i] as f64;
                for (a, g) in self.acc.iter_mut().zip(&self.gains) {
                    *a += g * x;
                }
            }
            for (s, out) in outputs.iter_mut().enumerate() {
                let y = (self.frc[s] * self.acc[s]) as f32;
                out[i] = self.delays[s].push(y);
            }
        }
        self.position += n;
        Ok(())
    }
}

/// Renders the whole scene. The output is `latency` samples longer than the
/// longest object so that every delayed tail is included.
pub fn render(
    scene: &Scene,
    layout: &Layout,
    profile: &CalibrationProfile,
    config: RenderConfig,
) -> Result<RenderOutput> {
    let trajectories: Vec<&[AzimuthSegment]> =
        scene.objects.iter().map(SourceObject::trajectory).collect();
    let mut stream =
        StreamRenderer::new(&trajectories, layout, profile, config, scene.sample_rate_hz)?;
    let total = scene.len_samples() + stream.latency_samples();
    let mut channels = vec![vec![0.0f32; total]; layout.len()];
    let block = config.block_size;
    let mut in_bufs = vec![vec![0.0f32; block]; scene.objects.len()];

    let mut start = 0;
    while start < total {
        let n = block.min(total - start);
        for (buf, obj) in in_bufs.iter_mut().zip(&scene.objects) {
            for (i, b) in buf[..n].iter_mut().enumerate() {
                *b = obj.samples.get(start + i).copied().unwrap_or(0.0);
            }
        }
        let inputs: Vec<&[f32]> = in_bufs.iter().map(|b| &b[..n]).collect();
        let mut outputs: Vec<&mut [f32]> = channels
            .iter_mut()
            .map(|c| &mut c[start..start + n])
            .collect();
        stream.process_block(&inputs, &mut outputs)?;
        start += n;
    }

    let clipped_samples = channels.iter().flatten().filter(|x| x.abs() > 1.0).count();
    Ok(RenderOutput {
        audio: MultichannelAudio {
            channels,
            sample_rate_hz: scene.sample_rate_hz,
        },
        clipped_samples,
    })
}

/// One static object per channel at the canonical azimuth for that channel.
pub fn channel_bed_to_scene(bed: &MultichannelAudio, canonical_azimuths: &[f64]) -> Result<Scene> {
    if bed.channels.len() != canonical_azimuths.len() {
        return Err(Error::ChannelCountMismatch {
            expected: canonical_azimuths.len(),
            found: bed.channels.len(),
        });
    }
    let objects = bed
        .channels
        .iter()
        .zip(canonical_azimuths)
        .enumerate()
        .map(|(i, (ch, &az))| {
            SourceObject::fixed(format!("ch{i}"), ch.clone(), bed.sample_rate_hz, az)
        })
        .collect();
    Scene::new(objects, bed.sample_rate_hz)
}

/// Canonical azimuths for a bed with `channels` channels, if one is defined.
pub fn canonical_azimuths(channels: usize) -> Option<&'static [f64]> {
    match channels {
        1 => Some(&MONO),
        2 => Some(&STEREO),
        _ => None,
    }
}
