//! WAV input and output.

use std::io::{Read, Seek, Write};
use std::path::Path;

use hound::{SampleFormat, WavReader, WavSpec, WavWriter};

use crate::renderer::MultichannelAudio;
use crate::{Error, ImpulseResponse, Result};

fn read_channels<R: Read>(mut reader: WavReader<R>) -> Result<MultichannelAudio> {
    let spec = reader.spec();
    let channels = spec.channels as usize;
    if channels == 0 {
        return Err(Error::Wav("file has no channels".into()));
    }
    let interleaved: Vec<f32> = match (spec.sample_format, spec.bits_per_sample) {
        (SampleFormat::Float, 32) => reader
            .samples::<f32>()
            .collect::<std::result::Result<_, _>>()?,
        (SampleFormat::Int, bits @ (8 | 16 | 24 | 32)) => {
            let scale = 1.0 / (1u64 << (bits - 1)) as f64;
            reader
                .samples::<i32>()
                .map(|s| s.map(|v| (v as f64 * scale) as f32))
                .collect::<std::result::Result<_, _>>()?
        }
        (fmt, bits) => {
            return Err(Error::Wav(format!(
                "unsupported sample format {fmt:?} {bits}-bit"
            )))
        }
    };
    let mut out = vec![Vec::with_capacity(interleaved.len() / channels); channels];
    for frame in interleaved.chunks(channels) {
        for (ch, &x) in out.iter_mut().zip(frame) {
            ch.push(x);
        }
    }
    Ok(MultichannelAudio {
        channels: out,
        sample_rate_hz: spec.sample_rate,
    })
}

/// Reads all channels of a PCM or float WAV file as f32 in [-1, 1).
pub fn read_multichannel(path: impl AsRef<Path>) -> Result<MultichannelAudio> {
    let path = path.as_ref();
    let reader =
        WavReader::open(path).map_err(|e| Error::Wav(format!("{}: {e}", path.display())))?;
    read_channels(reader)
}

/// Reads a mono file as an impulse response.
pub fn read_impulse_response(path: impl AsRef<Path>) -> Result<ImpulseResponse> {
    let path = path.as_ref();
    let audio = read_multichannel(path)?;
    if audio.channels.len() != 1 {
        return Err(Error::Wav(format!(
            "{}: impulse responses must be mono, found {} channels",
            path.display(),
            audio.channels.len()
        )));
    }
    let samples = audio.channels[0].iter().map(|&x| x as f64).collect();
    ImpulseResponse::new(samples, audio.sample_rate_hz)
}

fn write_float<W: Write + Seek>(writer: W, channels: &[&[f32]], sample_rate_hz: u32) -> Result<()> {
    if channels.is_empty() || channels.len() > u16::MAX as usize {
        return Err(Error::Wav(format!(
            "cannot write {} channels",
            channels.len()
        )));
    }
    let spec = WavSpec {
        channels: channels.len() as u16,
        sample_rate: sample_rate_hz,
        bits_per_sample: 32,
        sample_format: SampleFormat::Float,
    };
    let len = channels.iter().map(|c| c.len()).max().unwrap_or(0);
    let mut w = WavWriter::new(writer, spec)?;
    for i in 0..len {
        for ch in channels {
            w.write_sample(ch.get(i).copied().unwrap_or(0.0))?;
        }
    }
    w.finalize()?;
    Ok(())
}

/// Writes 32-bit float WAV; shorter channels are padded with zeros.
pub fn write_multichannel(path: impl AsRef<Path>, audio: &MultichannelAudio) -> Result<()> {
    let file = std::io::BufWriter::new(
        std::fs::File::create(path.as_ref()).map_err(|e| Error::Wav(e.to_string()))?,
    );
    let channels: Vec<&[f32]> = audio.channels.iter().map(Vec::as_slice).collect();
    write_float(file, &channels, audio.sample_rate_hz)
}

/// Writes an impulse response as mono 32-bit float.
pub fn write_impulse_response(path: impl AsRef<Path>, ir: &ImpulseResponse) -> Result<()> {
    let samples: Vec<f32> = ir.samples().iter().map(|&x| x as f32).collect();
    write_multichannel(
        path,
        &MultichannelAudio {
            channels: vec![samples],
            sample_rate_hz: ir.sample_rate_hz(),
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("a.wav");
        let audio = MultichannelAudio {
            channels: vec![vec![0.25, -0.5, 1.5], vec![0.0, 0.125, -1.0]],
            sample_rate_hz: 44_100,
        };
        write_multichannel(&path, &audio).unwrap();
        assert_eq!(read_multichannel(&path).unwrap(), audio);
    }

    #[test]
    fn pcm_inputs_are_scaled() {
        let dir = tempfile::tempdir().unwrap();
        for bits in [16u16, 24] {
            let path = dir.path().join(format!("{bits}.wav"));
            let spec = WavSpec {
                channels: 1,
                sample_rate: 48_000,
                bits_per_sample: bits,
                sample_format: SampleFormat::Int,
            };
            let full = 1i32 << (bits - 1);
            let mut w = WavWriter::create(&path, spec).unwrap();
            for v in [0, full / 2, -full] {
                w.write_sample(v).unwrap();
            }
            w.finalize().unwrap();
            let ir = read_impulse_response(&path).unwrap();
            assert_eq!(ir.samples(), &[0.0, 0.5, -1.0]);
            assert_eq!(ir.sample_rate_hz(), 48_000);
        }
    }

    #[test]
    fn stereo_is_not_an_impulse_response() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.wav");
        let audio = MultichannelAudio {
            channels: vec![vec![1.0], vec![0.0]],
            sample_rate_hz: 48_000,
        };
        write_multichannel(&path, &audio).unwrap();
        assert!(matches!(read_impulse_response(&path), Err(Error::Wav(_))));
        assert!(matches!(
            read_multichannel(dir.path().join("none.wav")),
            Err(Error::Wav(_))
        ));
    }
}
