use std::fmt;
use std::str::FromStr;

use crate::dsp::{RawSignal, SAMPLING_RATE, SEGMENT_SAMPLES};
use crate::error::{Error, Result};
use crate::nn::Task;

/// Segment class. The discriminant is the on-disk label code.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    N = 0,
    A1 = 1,
    A2 = 2,
    A3 = 3,
}

impl Label {
    pub const ALL: [Label; 4] = [Label::N, Label::A1, Label::A2, Label::A3];

    pub fn code(self) -> u8 {
        self as u8
    }

    pub fn from_code(code: u8) -> Option<Self> {
        Self::ALL.get(code as usize).copied()
    }

    pub fn is_a_phase(self) -> bool {
        self != Label::N
    }

    /// Class index for `task`, or `None` when the segment is not used by it.
    pub fn class_for(self, task: Task) -> Option<usize> {
        match (task, self) {
            (Task::AN, Label::N) => Some(1),
            (Task::AN, _) => Some(0),
            (Task::Subtype, Label::N) => None,
            (Task::Subtype, a) => Some(a as usize - 1),
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Label::N => "N",
            Label::A1 => "A1",
            Label::A2 => "A2",
            Label::A3 => "A3",
        })
    }
}

impl FromStr for Label {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "N" => Ok(Label::N),
            "A1" => Ok(Label::A1),
            "A2" => Ok(Label::A2),
            "A3" => Ok(Label::A3),
            other => Err(Error::Parameter(format!("unknown segment label `{other}`"))),
        }
    }
}

/// Four seconds of EEG at 512 Hz.
#[derive(Clone, Debug, PartialEq)]
pub struct Segment {
    pub label: Label,
    /// Start time of the segment in seconds from the recording start.
    pub onset: f64,
    samples: Vec<f32>,
}

impl Segment {
    pub fn new(label: Label, onset: f64, samples: Vec<f32>) -> Result<Self> {
        if samples.len() != SEGMENT_SAMPLES {
            return Err(Error::dim(format!(
                "segments hold {SEGMENT_SAMPLES} samples, got {}",
                samples.len()
            )));
        }
        Ok(Self { label, onset, samples })
    }

    pub fn samples(&self) -> &[f32] {
        &self.samples
    }

    pub fn to_signal(&self) -> RawSignal {
        RawSignal::new(self.samples.iter().map(|&v| v as f64).collect(), SAMPLING_RATE).expect("segment is non-empty")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Provenance {
    Real = 0,
    Synthetic = 1,
}

impl Provenance {
    pub fn from_code(code: u8) -> Option<Self> {
        match code {
            0 => Some(Provenance::Real),
            1 => Some(Provenance::Synthetic),
            _ => None,
        }
    }
}

/// Per-label segment counts.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct ClassCounts {
    pub n: usize,
    pub a1: usize,
    pub a2: usize,
    pub a3: usize,
}

impl ClassCounts {
    pub fn new(n: usize, a1: usize, a2: usize, a3: usize) -> Self {
        Self { n, a1, a2, a3 }
    }

    pub fn get(&self, label: Label) -> usize {
        match label {
            Label::N => self.n,
            Label::A1 => self.a1,
            Label::A2 => self.a2,
            Label::A3 => self.a3,
        }
    }

    pub fn add(&mut self, label: Label) {
        match label {
            Label::N => self.n += 1,
            Label::A1 => self.a1 += 1,
            Label::A2 => self.a2 += 1,
            Label::A3 => self.a3 += 1,
        }
    }

    pub fn a_phases(&self) -> usize {
        self.a1 + self.a2 + self.a3
    }

    pub fn total(&self) -> usize {
        self.n + self.a_phases()
    }
}

impl FromStr for ClassCounts {
    type Err = Error;

    /// Parses `N,A1,A2,A3`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<usize> = s
            .split(',')
            .map(|p| p.trim().parse::<usize>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| Error::Parameter(format!("counts must be N,A1,A2,A3 integers, got `{s}`")))?;
        match parts[..] {
            [n, a1, a2, a3] => Ok(Self::new(n, a1, a2, a3)),
            _ => Err(Error::Parameter(format!("expected 4 counts (N,A1,A2,A3), got `{s}`"))),
        }
    }
}

/// All segments extracted (or generated) for one subject.
#[derive(Clone, Debug, PartialEq)]
pub struct SubjectDataset {
    pub subject_id: String,
    pub segments: Vec<Segment>,
    /// EEG trace the segments were cut from; not persisted in the container.
    pub channel_name: Option<String>,
    pub provenance: Provenance,
}

impl SubjectDataset {
    pub fn counts(&self) -> ClassCounts {
        let mut c = ClassCounts::default();
        for s in &self.segments {
            c.add(s.label);
        }
        c
    }

    /// One-row summary laid out like the per-subject A-phase count table.
    pub fn summary(&self) -> String {
        let c = self.counts();
        format!(
            "{:<10} {:>6} {:>6} {:>6} | {:>6} {:>6}\n{:<10} {:>6} {:>6} {:>6} | {:>6} {:>6}",
            "subject",
            "A1",
            "A2",
            "A3",
            "A",
            "N",
            self.subject_id,
            c.a1,
            c.a2,
            c.a3,
            c.a_phases(),
            c.n
        )
    }
}
