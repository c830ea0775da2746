use crate::error::{Error, Result};

/// Uniformly sampled signal in physical units (microvolts for EEG).
#[derive(Clone, Debug, PartialEq)]
pub struct RawSignal {
    samples: Vec<f64>,
    sampling_rate: f64,
}

impl RawSignal {
    pub fn new(samples: Vec<f64>, sampling_rate: f64) -> Result<Self> {
        if !(sampling_rate > 0.0 && sampling_rate.is_finite()) {
            return Err(Error::Parameter(format!(
                "sampling rate must be positive, got {sampling_rate}"
            )));
        }
        if samples.is_empty() {
            return Err(Error::InsufficientData("signal has no samples".into()));
        }
        Ok(Self { samples, sampling_rate })
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }

    pub fn sampling_rate(&self) -> f64 {
        self.sampling_rate
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Time of the last sample, in seconds.
    pub fn duration(&self) -> f64 {
        (self.samples.len() - 1) as f64 / self.sampling_rate
    }
}
