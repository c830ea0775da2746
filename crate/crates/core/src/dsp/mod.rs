//! Signal conditioning: spline resampling and log-spectrogram images.

mod signal;
pub mod spectrogram;
mod spline;

pub use signal::RawSignal;
pub use spectrogram::{
    log_spectrogram, LogSpectrogram, PowerSpectrogram, SpectrogramConfig, SpectrogramImage, SAMPLING_RATE,
    SEGMENT_SAMPLES,
};
pub use spline::{cubic_spline_resample, NaturalCubicSpline};
