//! Frequency-dependent truncation of impulse responses.
//!
//! The response is split into fractional-octave bands by nested lowpass
//! kernels. Band `b` is `(lp_b - lp_{b-1}) ∗ h`, with the lowest band
//! `lp_0 ∗ h` and the highest `h - lp_last ∗ h`, so the bands always sum back
//! to `h`. Each band is kept from the onset up to
//! `τ_b = max(min_tau, tau · f_low / f_b)`, ending in a raised-cosine fade.
//! Summing the windowed bands telescopes into
//!
//! ```text
//! h_ds = w_top · h + Σ_e (w_e - w_{e+1}) · (lp_e ∗ h)
//! ```
//!
//! i.e. a time-varying lowpass: past each band's window only the content
//! below that band survives.
//!
//! Crossover `e` is a normalized Hann kernel that is 6 dB down at the
//! geometric mean of the two band centers. Its half-length never exceeds the
//! flat part of band `e+1`'s window.
//! A direct-path spike at the onset therefore stays entirely inside the flat
//! part of every window it touches and passes through unchanged.

use serde::{Deserialize, Serialize};

use crate::{Error, ImpulseResponse, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FdtParams {
    /// Truncation time of the lowest band.
    pub tau_s: f64,
    pub f_low_hz: f64,
    pub f_high_hz: f64,
    pub bands_per_octave: u32,
    /// Truncation time floor for the highest bands.
    pub min_tau_s: f64,
    /// Fraction of each window spent fading out.
    pub fade_fraction: f64,
}

impl Default for FdtParams {
    fn default() -> Self {
        FdtParams {
            tau_s: 0.020,
            f_low_hz: 50.0,
            f_high_hz: 16_000.0,
            bands_per_octave: 3,
            min_tau_s: 0.001,
            fade_fraction: 0.25,
        }
    }
}

impl FdtParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParams(msg));
        if !(self.min_tau_s > 0.0 && self.tau_s >= self.min_tau_s && self.tau_s.is_finite()) {
            return bad(format!(
                "need tau_s >= min_tau_s > 0 (tau_s {}, min_tau_s {})",
                self.tau_s, self.min_tau_s
            ));
        }
        if !(self.f_low_hz > 0.0 && self.f_low_hz < self.f_high_hz && self.f_high_hz.is_finite()) {
            return bad(format!(
                "need 0 < f_low_hz < f_high_hz ({} / {})",
                self.f_low_hz, self.f_high_hz
            ));
        }
        if self.bands_per_octave < 1 {
            return bad("bands_per_octave must be >= 1".into());
        }
        if !(self.fade_fraction > 0.0 && self.fade_fraction <= 1.0) {
            return bad(format!(
                "fade_fraction {} outside (0, 1]",
                self.fade_fraction
            ));
        }
        Ok(())
    }

    /// Band center frequencies from `f_low_hz` up to `f_high_hz`.
    pub fn band_centers(&self) -> Vec<f64> {
        let octaves = (self.f_high_hz / self.f_low_hz).log2();
        let count = (octaves * self.bands_per_octave as f64 + 1e-9).floor() as usize + 1;
        (0..count)
            .map(|b| self.f_low_hz * 2f64.powf(b as f64 / self.bands_per_octave as f64))
            .collect()
    }

    /// Truncation time for a band centered at `f_hz`.
    pub fn band_tau(&self, f_hz: f64) -> f64 {
        (self.tau_s * self.f_low_hz / f_hz).max(self.min_tau_s)
    }
}

/// Raised-cosine truncation window, measured from the onset.
#[derive(Debug, Clone, Copy)]
struct Window {
    flat: usize,
    end: f64,
    fade: f64,
}

impl Window {
    fn new(tau_s: f64, fade_fraction: f64, fs: f64) -> Self {
        let end = tau_s * fs;
        let fade = fade_fraction * end;
        Window {
            flat: ((end - fade) + 1e-9).floor().max(0.0) as usize,
            end,
            fade,
        }
    }

    /// Window value `offset` samples after the onset; 1 before the onset.
    fn at(&self, offset: isize) -> f64 {
        if offset <= self.flat as isize {
            return 1.0;
        }
        let t = offset as f64;
        if t >= self.end {
            return 0.0;
        }
        let start = self.end - self.fade;
        if t <= start {
            1.0
        } else {
            0.5 * (1.0 + (std::f64::consts::PI * (t - start) / self.fade).cos())
        }
    }
}

/// Normalized Hann kernel. A Hann window of total length `T` is 6 dB down
/// at `1/T`, so the length is set from the cutoff and capped at `max_half`.
fn lowpass_kernel(max_half: usize, cutoff_hz: f64, fs: f64) -> Vec<f64> {
    let half_len = ((fs / (2.0 * cutoff_hz)).round() as usize).min(max_half);
    let n = half_len as f64 + 1.0;
    let mut k: Vec<f64> = (-(half_len as isize)..=half_len as isize)
        .map(|i| 0.5 * (1.0 + (std::f64::consts::PI * i as f64 / n).cos()))
        .collect();
    let sum: f64 = k.iter().sum();
    k.iter_mut().for_each(|v| *v /= sum);
    k
}

/// Returns the direct-sound portion of `ir`. The onset must already be set
/// and the lowest band's window must fit after it.
pub fn fdt_truncate(ir: &ImpulseResponse, params: &FdtParams) -> Result<ImpulseResponse> {
    params.validate()?;
    let onset = ir.onset_index().ok_or(Error::MissingOnset)?;
    let fs = ir.sample_rate_hz() as f64;
    let h = ir.samples();
    let available = (h.len() - onset) as f64 / fs;
    if params.tau_s > available + 1e-12 {
        return Err(Error::TruncationTooLong {
            tau_s: params.tau_s,
            available_s: available,
        });
    }

    let centers = params.band_centers();
    let windows: Vec<Window> = centers
        .iter()
        .map(|&f| Window::new(params.band_tau(f), params.fade_fraction, fs))
        .collect();
    let top = windows[windows.len() - 1];

    let mut out: Vec<f64> = h
        .iter()
        .enumerate()
        .map(|(n, x)| x * top.at(n as isize - onset as isize))
        .collect();

    for (e, pair) in windows.windows(2).enumerate() {
        let (lower, upper) = (pair[0], pair[1]);
        if lower.end == upper.end && lower.fade == upper.fade {
            continue;
        }
        // the weight (lower - upper) is zero up to the flat part of `upper`
        // and beyond the end of `lower`
        let kernel = lowpass_kernel(upper.flat, (centers[e] * centers[e + 1]).sqrt(), fs);
        let half = kernel.len() / 2;
        let from = onset + upper.flat + 1;
        let to = (onset + lower.end.ceil() as usize).min(h.len());
        for (n, o) in out.iter_mut().enumerate().take(to).skip(from) {
            let offset = n as isize - onset as isize;
            let weight = lower.at(offset) - upper.at(offset);
            if weight == 0.0 {
                continue;
            }
            let lo = n.saturating_sub(half);
            let hi = (n + half).min(h.len() - 1);
            let mut acc = 0.0;
            for m in lo..=hi {
                acc += kernel[m + half - n] * h[m];
            }
            *o += weight * acc;
        }
    }

    ImpulseResponse::new(out, ir.sample_rate_hz())?.with_onset(onset)
}
