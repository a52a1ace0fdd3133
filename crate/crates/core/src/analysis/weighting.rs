use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::dsp::to_complex;

/// Frequency weighting applied before an energy measurement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct WeightingSpec {
    /// IEC 61672 A-weighting.
    pub a_weighting: bool,
    /// -3 dB/octave tilt, 0 dB at 1 kHz.
    pub pink_weighting: bool,
}

impl WeightingSpec {
    pub const NONE: WeightingSpec = WeightingSpec {
        a_weighting: false,
        pink_weighting: false,
    };
    pub const A: WeightingSpec = WeightingSpec {
        a_weighting: true,
        pink_weighting: false,
    };
    pub const PINK: WeightingSpec = WeightingSpec {
        a_weighting: false,
        pink_weighting: true,
    };
    pub const PINK_A: WeightingSpec = WeightingSpec {
        a_weighting: true,
        pink_weighting: true,
    };

    pub fn is_flat(&self) -> bool {
        !self.a_weighting && !self.pink_weighting
    }

    /// Linear magnitude response at `freq_hz`.
    pub fn magnitude(&self, freq_hz: f64) -> f64 {
        let mut m = 1.0;
        if self.a_weighting {
            m *= a_weighting_magnitude(freq_hz);
        }
        if self.pink_weighting {
            m *= pink_magnitude(freq_hz);
        }
        m
    }
}

/// Analytic A-weighting magnitude (IEC 61672-1 Annex E), normalized to unity
/// at 1 kHz.
pub fn a_weighting_magnitude(freq_hz: f64) -> f64 {
    a_weighting_raw(freq_hz) / a_weighting_raw(1000.0)
}

fn a_weighting_raw(freq_hz: f64) -> f64 {
    const F1: f64 = 20.598_997;
    const F2: f64 = 107.652_65;
    const F3: f64 = 737.862_23;
    const F4: f64 = 12_194.217;
    let f2 = freq_hz * freq_hz;
    let num = F4 * F4 * f2 * f2;
    let den = (f2 + F1 * F1) * ((f2 + F2 * F2) * (f2 + F3 * F3)).sqrt() * (f2 + F4 * F4);
    num / den
}

fn pink_magnitude(freq_hz: f64) -> f64 {
    if freq_hz <= 0.0 {
        0.0
    } else {
        (1000.0 / freq_hz).sqrt()
    }
}

/// Energy `Σ|(x∗w)[n]|²` of the zero-phase weighted signal.
pub(crate) fn weighted_energy(
    samples: &[f64],
    sample_rate_hz: u32,
    weighting: WeightingSpec,
) -> f64 {
    if weighting.is_flat() {
        return samples.iter().map(|x| x * x).sum();
    }
    let n = (2 * samples.len()).next_power_of_two();
    let mut spectrum = to_complex(samples, n);
    FftPlanner::<f64>::new()
        .plan_fft_forward(n)
        .process(&mut spectrum);
    let fs = sample_rate_hz as f64;
    let mut energy = 0.0;
    for (k, bin) in spectrum.iter().enumerate() {
        let k_abs = if k <= n / 2 { k } else { n - k };
        let w = weighting.magnitude(k_abs as f64 * fs / n as f64);
        energy += bin.norm_sqr() * w * w;
    }
    energy / n as f64
}
