//! European Data Format reader (fixed header, 16-bit little-endian samples).

use crate::dsp::RawSignal;
use crate::error::{Error, Result};

const FIXED_HEADER: usize = 256;
const SIGNAL_HEADER: usize = 256;

#[derive(Clone, Debug, PartialEq)]
pub struct EdfSignal {
    pub label: String,
    pub transducer: String,
    pub physical_dimension: String,
    pub physical_min: f64,
    pub physical_max: f64,
    pub digital_min: i32,
    pub digital_max: i32,
    pub prefiltering: String,
    pub samples_per_record: usize,
    /// Decoded samples in physical units.
    pub samples: Vec<f64>,
}

impl EdfSignal {
    /// `(d - dmin) * (pmax - pmin) / (dmax - dmin) + pmin`
    pub fn decode(&self, digital: i16) -> f64 {
        (digital as f64 - self.digital_min as f64) * (self.physical_max - self.physical_min)
            / (self.digital_max as f64 - self.digital_min as f64)
            + self.physical_min
    }
}

/// Recording start as written in the header.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StartTime {
    pub day: u8,
    pub month: u8,
    pub year: u8,
    pub hour: u8,
    pub minute: u8,
    pub second: u8,
}

impl StartTime {
    pub fn seconds_of_day(&self) -> u32 {
        self.hour as u32 * 3600 + self.minute as u32 * 60 + self.second as u32
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EdfRecording {
    pub patient: String,
    pub recording: String,
    pub start: StartTime,
    pub record_duration: f64,
    pub num_records: usize,
    pub signals: Vec<EdfSignal>,
}

impl EdfRecording {
    pub fn labels(&self) -> Vec<String> {
        self.signals.iter().map(|s| s.label.clone()).collect()
    }

    pub fn signal_index(&self, label: &str) -> Option<usize> {
        let want = normalize_label(label);
        self.signals.iter().position(|s| normalize_label(&s.label) == want)
    }

    pub fn sampling_rate(&self, index: usize) -> f64 {
        self.signals[index].samples_per_record as f64 / self.record_duration
    }

    pub fn raw_signal(&self, index: usize) -> Result<RawSignal> {
        RawSignal::new(self.signals[index].samples.clone(), self.sampling_rate(index))
    }
}

/// Case-insensitive comparison key that ignores whitespace.
pub fn normalize_label(label: &str) -> String {
    label
        .chars()
        .filter(|c| !c.is_whitespace())
        .collect::<String>()
        .to_ascii_uppercase()
}

struct Header<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Header<'a> {
    fn field(&mut self, len: usize, name: &str) -> Result<String> {
        if self.bytes.len() < self.pos + len {
            return Err(Error::Truncated {
                offset: self.bytes.len(),
                context: format!("header field `{name}` needs {len} bytes at offset {}", self.pos),
            });
        }
        let raw = &self.bytes[self.pos..self.pos + len];
        self.pos += len;
        Ok(raw.iter().map(|&b| b as char).collect::<String>().trim().to_string())
    }

    fn number<T: std::str::FromStr>(&mut self, len: usize, name: &str) -> Result<T> {
        let s = self.field(len, name)?;
        s.parse().map_err(|_| Error::HeaderFormat {
            field: name.into(),
            value: s,
        })
    }

    fn per_signal(&mut self, ns: usize, len: usize, name: &str) -> Result<Vec<String>> {
        (0..ns).map(|_| self.field(len, name)).collect()
    }

    fn per_signal_numbers<T: std::str::FromStr>(&mut self, ns: usize, len: usize, name: &str) -> Result<Vec<T>> {
        (0..ns).map(|_| self.number(len, name)).collect()
    }
}

fn parse_triplet(s: &str, field: &str) -> Result<[u8; 3]> {
    let bad = || Error::HeaderFormat {
        field: field.into(),
        value: s.into(),
    };
    let parts: Vec<u8> = s
        .split(['.', ':'])
        .map(|p| p.trim().parse::<u8>().map_err(|_| bad()))
        .collect::<Result<_>>()?;
    parts.try_into().map_err(|_| bad())
}

pub fn parse_edf(bytes: &[u8]) -> Result<EdfRecording> {
    if bytes.len() < FIXED_HEADER {
        return Err(Error::Truncated {
            offset: bytes.len(),
            context: format!("EDF header needs {FIXED_HEADER} bytes"),
        });
    }
    let mut h = Header { bytes, pos: 0 };
    let _version = h.field(8, "version")?;
    let patient = h.field(80, "patient")?;
    let recording = h.field(80, "recording")?;
    let [day, month, year] = parse_triplet(&h.field(8, "start date")?, "start date")?;
    let [hour, minute, second] = parse_triplet(&h.field(8, "start time")?, "start time")?;
    let header_bytes: usize = h.number(8, "header bytes")?;
    let _reserved = h.field(44, "reserved")?;
    let declared_records: i64 = h.number(8, "number of data records")?;
    let record_duration: f64 = h.number(8, "record duration")?;
    let ns: usize = h.number(4, "number of signals")?;

    if !(record_duration > 0.0) {
        return Err(Error::HeaderFormat {
            field: "record duration".into(),
            value: record_duration.to_string(),
        });
    }
    let expected_header = FIXED_HEADER + SIGNAL_HEADER * ns;
    if header_bytes != expected_header {
        return Err(Error::HeaderFormat {
            field: "header bytes".into(),
            value: format!("{header_bytes} (expected {expected_header} for {ns} signals)"),
        });
    }

    let labels = h.per_signal(ns, 16, "label")?;
    let transducers = h.per_signal(ns, 80, "transducer")?;
    let dims = h.per_signal(ns, 8, "physical dimension")?;
    let pmin: Vec<f64> = h.per_signal_numbers(ns, 8, "physical minimum")?;
    let pmax: Vec<f64> = h.per_signal_numbers(ns, 8, "physical maximum")?;
    let dmin: Vec<i32> = h.per_signal_numbers(ns, 8, "digital minimum")?;
    let dmax: Vec<i32> = h.per_signal_numbers(ns, 8, "digital maximum")?;
    let prefilters = h.per_signal(ns, 80, "prefiltering")?;
    let spr: Vec<usize> = h.per_signal_numbers(ns, 8, "samples per record")?;
    let _reserved = h.per_signal(ns, 32, "signal reserved")?;

    if let Some(i) = (0..ns).find(|&i| dmax[i] == dmin[i]) {
        return Err(Error::DegenerateScaling {
            signal: labels[i].clone(),
        });
    }

    let record_bytes: usize = spr.iter().sum::<usize>() * 2;
    let data = &bytes[header_bytes..];
    let num_records = if declared_records < 0 {
        data.len().checked_div(record_bytes).unwrap_or(0)
    } else {
        declared_records as usize
    };
    let needed = num_records * record_bytes;
    if data.len() < needed {
        return Err(Error::Truncated {
            offset: bytes.len(),
            context: format!(
                "{num_records} data records need {} bytes, file ends at {}",
                header_bytes + needed,
                bytes.len()
            ),
        });
    }

    let mut signals: Vec<EdfSignal> = (0..ns)
        .map(|i| EdfSignal {
            label: labels[i].clone(),
            transducer: transducers[i].clone(),
            physical_dimension: dims[i].clone(),
            physical_min: pmin[i],
            physical_max: pmax[i],
            digital_min: dmin[i],
            digital_max: dmax[i],
            prefiltering: prefilters[i].clone(),
            samples_per_record: spr[i],
            samples: Vec::with_capacity(spr[i] * num_records),
        })
        .collect();

    let mut words = data[..needed].chunks_exact(2).map(|c| i16::from_le_bytes([c[0], c[1]]));
    for _ in 0..num_records {
        for sig in &mut signals {
            for _ in 0..sig.samples_per_record {
                let d = words.next().expect("length checked above");
                let v = sig.decode(d);
                sig.samples.push(v);
            }
        }
    }

    Ok(EdfRecording {
        patient,
        recording,
        start: StartTime {
            day,
            month,
            year,
            hour,
            minute,
            second,
        },
        record_duration,
        num_records,
        signals,
    })
}
