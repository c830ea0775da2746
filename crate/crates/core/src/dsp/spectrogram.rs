//! Short-time Fourier log-power images.
//!
//! A 4 s segment at 512 Hz is reflect-padded by 240 samples per side,
//! cut into 64 Hann-windowed frames of 512 samples with hop 32, and
//! transformed with a 512-point FFT. Bins 1..=120 (1 Hz spacing) are kept,
//! log-compressed and standardized, giving a 120 x 64 image with frequency
//! on the vertical axis and time on the horizontal one.

use std::f64::consts::PI;
use std::sync::Arc;

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::dsp::RawSignal;
use crate::error::{Error, Result};
use crate::nn::{Shape, Tensor};

pub const SAMPLING_RATE: f64 = 512.0;
pub const SEGMENT_SAMPLES: usize = 2048;
pub const FREQUENCY_BINS: usize = 120;
pub const TIME_FRAMES: usize = 64;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpectrogramConfig {
    pub window: usize,
    pub hop: usize,
    /// Reflect padding on each side of the segment.
    pub padding: usize,
    /// First retained FFT bin.
    pub min_bin: usize,
    pub bins: usize,
    pub log_floor: f64,
    pub standardize: bool,
}

impl Default for SpectrogramConfig {
    fn default() -> Self {
        Self {
            window: 512,
            hop: 32,
            padding: 240,
            min_bin: 1,
            bins: FREQUENCY_BINS,
            log_floor: 1e-10,
            standardize: true,
        }
    }
}

impl SpectrogramConfig {
    pub fn frames(&self, samples: usize) -> Option<usize> {
        let padded = samples + 2 * self.padding;
        (self.hop > 0 && padded >= self.window).then(|| (padded - self.window) / self.hop + 1)
    }

    pub fn validate(&self) -> Result<()> {
        if self.window < 2 || self.hop == 0 {
            return Err(Error::Parameter("window must be >= 2 and hop > 0".into()));
        }
        if self.padding >= SEGMENT_SAMPLES {
            return Err(Error::Parameter(
                "reflect padding must be shorter than the segment".into(),
            ));
        }
        if self.min_bin + self.bins > self.window / 2 + 1 {
            return Err(Error::Parameter(format!(
                "bins {}..{} exceed the {} available FFT bins",
                self.min_bin,
                self.min_bin + self.bins,
                self.window / 2 + 1
            )));
        }
        if !(self.log_floor > 0.0) {
            return Err(Error::Parameter("log floor must be positive".into()));
        }
        if self.bins != FREQUENCY_BINS || self.frames(SEGMENT_SAMPLES) != Some(TIME_FRAMES) {
            return Err(Error::Parameter(format!(
                "settings yield a {}x{} image, the network needs {FREQUENCY_BINS}x{TIME_FRAMES}",
                self.bins,
                self.frames(SEGMENT_SAMPLES).unwrap_or(0)
            )));
        }
        Ok(())
    }
}

/// One-sided power spectra, frame-major.
///
/// Bin `k` holds `c_k |X_k|^2 / N` with `c_k = 1` for DC and Nyquist and 2
/// otherwise, so each frame sums to the energy of its windowed samples.
#[derive(Clone, Debug, PartialEq)]
pub struct PowerSpectrogram {
    pub frames: usize,
    pub bins: usize,
    pub values: Vec<f64>,
}

impl PowerSpectrogram {
    pub fn frame(&self, f: usize) -> &[f64] {
        &self.values[f * self.bins..(f + 1) * self.bins]
    }

    pub fn get(&self, frame: usize, bin: usize) -> f64 {
        self.values[frame * self.bins + bin]
    }

    /// Power of `bin` averaged over frames `range`.
    pub fn mean_bin_power(&self, bin: usize, frames: std::ops::Range<usize>) -> f64 {
        let n = frames.len() as f64;
        frames.map(|f| self.get(f, bin)).sum::<f64>() / n
    }

    /// Bin with the largest power averaged over all frames.
    pub fn peak_bin(&self) -> usize {
        (0..self.bins)
            .max_by(|&a, &b| {
                self.mean_bin_power(a, 0..self.frames)
                    .total_cmp(&self.mean_bin_power(b, 0..self.frames))
            })
            .unwrap_or(0)
    }

    /// Sum over all frames of the power in bins `lo..=hi`.
    pub fn band_power(&self, lo: usize, hi: usize) -> f64 {
        (0..self.frames)
            .map(|f| self.frame(f)[lo..=hi.min(self.bins - 1)].iter().sum::<f64>())
            .sum()
    }
}

/// Network input image: `(FREQUENCY_BINS, TIME_FRAMES, 1)` with row 0 at
/// the lowest retained frequency.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectrogramImage(Tensor<f32>);

impl SpectrogramImage {
    pub fn tensor(&self) -> &Tensor<f32> {
        &self.0
    }

    pub fn into_tensor(self) -> Tensor<f32> {
        self.0
    }

    pub fn at(&self, bin: usize, frame: usize) -> f32 {
        self.0.at(bin, frame, 0)
    }
}

/// Reusable transform with a planned FFT and precomputed window.
pub struct LogSpectrogram {
    config: SpectrogramConfig,
    window: Vec<f64>,
    fft: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for LogSpectrogram {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("LogSpectrogram").field("config", &self.config).finish()
    }
}

/// Periodic Hann window.
pub fn hann(len: usize) -> Vec<f64> {
    (0..len)
        .map(|n| 0.5 - 0.5 * (2.0 * PI * n as f64 / len as f64).cos())
        .collect()
}

/// Mirror-pads without repeating the edge samples.
pub fn reflect_pad(samples: &[f64], pad: usize) -> Result<Vec<f64>> {
    let n = samples.len();
    if pad >= n {
        return Err(Error::dim(format!("cannot reflect-pad {n} samples by {pad}")));
    }
    let mut out = Vec::with_capacity(n + 2 * pad);
    out.extend((1..=pad).rev().map(|j| samples[j]));
    out.extend_from_slice(samples);
    out.extend((1..=pad).map(|j| samples[n - 1 - j]));
    Ok(out)
}

impl LogSpectrogram {
    pub fn new(config: SpectrogramConfig) -> Result<Self> {
        config.validate()?;
        let fft = FftPlanner::new().plan_fft_forward(config.window);
        Ok(Self {
            window: hann(config.window),
            fft,
            config,
        })
    }

    pub fn config(&self) -> &SpectrogramConfig {
        &self.config
    }

    fn check_segment(signal: &RawSignal) -> Result<()> {
        if signal.len() != SEGMENT_SAMPLES || signal.sampling_rate() != SAMPLING_RATE {
            return Err(Error::dim(format!(
                "spectrogram needs {SEGMENT_SAMPLES} samples at {SAMPLING_RATE} Hz, got {} at {} Hz",
                signal.len(),
                signal.sampling_rate()
            )));
        }
        Ok(())
    }

    /// Full one-sided power spectra (all `window / 2 + 1` bins) of every frame.
    pub fn power(&self, signal: &RawSignal) -> Result<PowerSpectrogram> {
        Self::check_segment(signal)?;
        let cfg = &self.config;
        let padded = reflect_pad(signal.samples(), cfg.padding)?;
        let frames = cfg.frames(signal.len()).unwrap();
        let bins = cfg.window / 2 + 1;
        let norm = cfg.window as f64;
        let mut values = Vec::with_capacity(frames * bins);
        let mut buf = vec![Complex::new(0.0, 0.0); cfg.window];
        for f in 0..frames {
            let start = f * cfg.hop;
            for ((b, &x), &w) in buf.iter_mut().zip(&padded[start..start + cfg.window]).zip(&self.window) {
                *b = Complex::new(x * w, 0.0);
            }
            self.fft.process(&mut buf);
            for (k, c) in buf[..bins].iter().enumerate() {
                let one_sided = if k == 0 || 2 * k == cfg.window { 1.0 } else { 2.0 };
                values.push(one_sided * c.norm_sqr() / norm);
            }
        }
        Ok(PowerSpectrogram { frames, bins, values })
    }

    pub fn image(&self, signal: &RawSignal) -> Result<SpectrogramImage> {
        let power = self.power(signal)?;
        let cfg = &self.config;
        let mut logp = vec![0.0f64; cfg.bins * power.frames];
        for f in 0..power.frames {
            let frame = power.frame(f);
            for b in 0..cfg.bins {
                logp[b * power.frames + f] = (frame[cfg.min_bin + b] + cfg.log_floor).ln();
            }
        }
        if cfg.standardize {
            let n = logp.len() as f64;
            let mean = logp.iter().sum::<f64>() / n;
            let sd = (logp.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n).sqrt();
            let constant = logp.iter().all(|&v| v == logp[0]);
            for v in &mut logp {
                *v = if constant || sd == 0.0 { 0.0 } else { (*v - mean) / sd };
            }
        }
        let tensor = Tensor::from_vec(
            Shape::new(cfg.bins, power.frames, 1),
            logp.into_iter().map(|v| v as f32).collect(),
        )?;
        Ok(SpectrogramImage(tensor))
    }
}

/// Log-spectrogram image with the default settings.
pub fn log_spectrogram(signal: &RawSignal) -> Result<SpectrogramImage> {
    LogSpectrogram::new(SpectrogramConfig::default())?.image(signal)
}
