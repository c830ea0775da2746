//! Synthetic subjects with spectrally distinct classes.
//!
//! Every segment carries a pink-noise background. A-phases add band-limited
//! noise bursts under a raised-cosine envelope:
//!
//! * A1: strong delta (0.5-4 Hz) with some theta (4-8 Hz) over 80-100% of the window.
//! * A2: moderate delta over 80-100% of the window plus 8-30 Hz activity over 40-60% of it.
//! * A3: 8-30 Hz and broadband 30-100 Hz activity over 70-100% of the window, little delta.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use crate::data::{ClassCounts, Label, Provenance, Segment, SubjectDataset};
use crate::dsp::{SAMPLING_RATE, SEGMENT_SAMPLES};

const BACKGROUND_RMS: (f64, f64) = (8.0, 12.0);
/// Spacing between synthetic onsets, in seconds.
const ONSET_SPACING: f64 = 30.0;

const DELTA: (f64, f64) = (0.5, 4.0);
const THETA: (f64, f64) = (4.0, 8.0);
const FAST: (f64, f64) = (8.0, 30.0);
const HIGH: (f64, f64) = (30.0, 100.0);

/// Gaussian noise shaped in the frequency domain by `gain(f)`, rescaled to
/// the requested RMS.
fn shaped_noise<R: Rng>(rng: &mut R, len: usize, rms: f64, gain: impl Fn(f64) -> f64) -> Vec<f64> {
    let mut buf: Vec<Complex<f64>> = (0..len)
        .map(|_| Complex::new(rng.sample::<f64, _>(StandardNormal), 0.0))
        .collect();
    let mut planner = FftPlanner::new();
    planner.plan_fft_forward(len).process(&mut buf);
    for (k, c) in buf.iter_mut().enumerate() {
        let f = k.min(len - k) as f64 * SAMPLING_RATE / len as f64;
        *c *= gain(f);
    }
    planner.plan_fft_inverse(len).process(&mut buf);
    let x: Vec<f64> = buf.iter().map(|c| c.re).collect();
    let cur = (x.iter().map(|v| v * v).sum::<f64>() / len as f64).sqrt();
    if cur == 0.0 {
        return x;
    }
    x.into_iter().map(|v| v * rms / cur).collect()
}

fn pink_noise<R: Rng>(rng: &mut R, len: usize, rms: f64) -> Vec<f64> {
    shaped_noise(rng, len, rms, |f| if f == 0.0 { 0.0 } else { 1.0 / f.sqrt() })
}

fn band_noise<R: Rng>(rng: &mut R, len: usize, band: (f64, f64), rms: f64) -> Vec<f64> {
    shaped_noise(rng, len, rms, |f| if f >= band.0 && f <= band.1 { 1.0 } else { 0.0 })
}

/// Raised-cosine envelope covering `fraction` of the window at a random
/// position, with 0.25 s ramps.
fn envelope<R: Rng>(rng: &mut R, len: usize, fraction: f64) -> Vec<f64> {
    let width = ((fraction * len as f64).round() as usize).clamp(1, len);
    let start = rng.random_range(0..=len - width);
    let ramp = ((0.25 * SAMPLING_RATE) as usize).min(width / 2).max(1);
    (0..len)
        .map(|i| {
            if i < start || i >= start + width {
                return 0.0;
            }
            let d = (i - start).min(start + width - 1 - i);
            if d >= ramp {
                1.0
            } else {
                0.5 - 0.5 * (PI * d as f64 / ramp as f64).cos()
            }
        })
        .collect()
}

type Range = (f64, f64);

/// Adds bursts in each `(band, rms range)` under one shared envelope.
fn burst<R: Rng>(rng: &mut R, out: &mut [f64], coverage: Range, bands: &[(Range, Range)]) {
    let c = rng.random_range(coverage.0..coverage.1);
    let env = envelope(rng, out.len(), c);
    for &(band, (lo, hi)) in bands {
        let rms = if hi > lo { rng.random_range(lo..hi) } else { lo };
        let noise = band_noise(rng, out.len(), band, rms);
        for ((o, e), n) in out.iter_mut().zip(&env).zip(noise) {
            *o += e * n;
        }
    }
}

fn segment_samples<R: Rng>(rng: &mut R, label: Label) -> Vec<f32> {
    let rms = rng.random_range(BACKGROUND_RMS.0..BACKGROUND_RMS.1);
    let mut x = pink_noise(rng, SEGMENT_SAMPLES, rms);
    match label {
        Label::N => {}
        Label::A1 => burst(rng, &mut x, (0.8, 1.0), &[(DELTA, (35.0, 50.0)), (THETA, (10.0, 15.0))]),
        Label::A2 => {
            burst(rng, &mut x, (0.8, 1.0), &[(DELTA, (15.0, 25.0))]);
            burst(rng, &mut x, (0.4, 0.6), &[(FAST, (16.0, 22.0))]);
        }
        Label::A3 => {
            burst(rng, &mut x, (0.5, 1.0), &[(DELTA, (0.0, 6.0))]);
            burst(rng, &mut x, (0.7, 1.0), &[(FAST, (15.0, 25.0)), (HIGH, (6.0, 10.0))]);
        }
    }
    x.into_iter().map(|v| v as f32).collect()
}

/// Generates `counts` segments per label. Deterministic given `seed`.
pub fn synthesize_subject(seed: u64, counts: ClassCounts, subject_id: &str) -> SubjectDataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut segments = Vec::with_capacity(counts.total());
    for label in Label::ALL {
        for _ in 0..counts.get(label) {
            let onset = segments.len() as f64 * ONSET_SPACING;
            let samples = segment_samples(&mut rng, label);
            segments.push(Segment::new(label, onset, samples).expect("synthetic segments have the right length"));
        }
    }
    SubjectDataset {
        subject_id: subject_id.into(),
        segments,
        channel_name: None,
        provenance: Provenance::Synthetic,
    }
}
