//! `CAPD` dataset container.
//!
//! Layout (little-endian): magic `CAPD`, version `u32`, `u16`-prefixed UTF-8
//! subject id, provenance `u8`, segment count `u32`, then per segment a label
//! code `u8` (0 N, 1 A1, 2 A2, 3 A3), onset `f64` and 2048 `f32` samples.

use std::io::Write;

use crate::data::{Label, Provenance, Segment, SubjectDataset};
use crate::dsp::SEGMENT_SAMPLES;
use crate::error::{Error, Result};
use crate::io::{put_f32s, put_string_u16, ByteReader};

pub const MAGIC: &[u8; 4] = b"CAPD";
pub const VERSION: u32 = 1;

pub fn encode_dataset(ds: &SubjectDataset) -> Result<Vec<u8>> {
    let count = u32::try_from(ds.segments.len()).map_err(|_| Error::Format("too many segments".into()))?;
    let mut out = Vec::with_capacity(15 + ds.subject_id.len() + ds.segments.len() * (9 + 4 * SEGMENT_SAMPLES));
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    put_string_u16(&mut out, &ds.subject_id, "subject id")?;
    out.push(ds.provenance as u8);
    out.extend_from_slice(&count.to_le_bytes());
    for s in &ds.segments {
        out.push(s.label.code());
        out.extend_from_slice(&s.onset.to_le_bytes());
        put_f32s(&mut out, s.samples());
    }
    Ok(out)
}

pub fn write_dataset<W: Write>(ds: &SubjectDataset, mut sink: W) -> Result<()> {
    sink.write_all(&encode_dataset(ds)?)?;
    Ok(())
}

pub fn read_dataset(bytes: &[u8]) -> Result<SubjectDataset> {
    let mut r = ByteReader::new(bytes);
    if r.take(4, "magic")? != MAGIC {
        return Err(Error::Format("not a CAPD dataset (bad magic)".into()));
    }
    let version = r.u32("version")?;
    if version != VERSION {
        return Err(Error::Format(format!("unsupported dataset version {version}")));
    }
    let subject_id = r.string_u16("subject id")?;
    let code = r.u8("provenance")?;
    let provenance =
        Provenance::from_code(code).ok_or_else(|| Error::Format(format!("unknown provenance code {code}")))?;
    let count = r.u32("segment count")? as usize;
    let mut segments = Vec::with_capacity(count.min(r.remaining() / (9 + 4 * SEGMENT_SAMPLES)));
    for i in 0..count {
        let context = format!("segment {i}");
        let code = r.u8(&context)?;
        let label =
            Label::from_code(code).ok_or_else(|| Error::Format(format!("{context}: unknown label code {code}")))?;
        let onset = r.f64(&context)?;
        let samples = r.f32s(SEGMENT_SAMPLES, &context)?;
        segments.push(Segment::new(label, onset, samples)?);
    }
    if r.remaining() != 0 {
        return Err(Error::Format(format!("{} trailing bytes after dataset", r.remaining())));
    }
    Ok(SubjectDataset {
        subject_id,
        segments,
        channel_name: None,
        provenance,
    })
}
