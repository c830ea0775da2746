//! Little-endian primitives shared by the binary containers.

use crate::error::{Error, Result};

pub(crate) struct ByteReader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> ByteReader<'a> {
    pub fn new(bytes: &'a [u8]) -> Self {
        Self { bytes, pos: 0 }
    }

    pub fn remaining(&self) -> usize {
        self.bytes.len() - self.pos
    }

    pub fn take(&mut self, n: usize, context: &str) -> Result<&'a [u8]> {
        if self.remaining() < n {
            return Err(Error::Truncated {
                offset: self.bytes.len(),
                context: format!("{context}: needed {n} bytes at offset {}", self.pos),
            });
        }
        let out = &self.bytes[self.pos..self.pos + n];
        self.pos += n;
        Ok(out)
    }

    fn array<const N: usize>(&mut self, context: &str) -> Result<[u8; N]> {
        Ok(self.take(N, context)?.try_into().unwrap())
    }

    pub fn u8(&mut self, context: &str) -> Result<u8> {
        Ok(self.array::<1>(context)?[0])
    }

    pub fn u16(&mut self, context: &str) -> Result<u16> {
        Ok(u16::from_le_bytes(self.array(context)?))
    }

    pub fn u32(&mut self, context: &str) -> Result<u32> {
        Ok(u32::from_le_bytes(self.array(context)?))
    }

    pub fn f64(&mut self, context: &str) -> Result<f64> {
        Ok(f64::from_le_bytes(self.array(context)?))
    }

    pub fn f32s(&mut self, n: usize, context: &str) -> Result<Vec<f32>> {
        let raw = self.take(
            n.checked_mul(4)
                .ok_or_else(|| Error::Format(format!("{context}: length overflow")))?,
            context,
        )?;
        Ok(raw
            .chunks_exact(4)
            .map(|c| f32::from_le_bytes(c.try_into().unwrap()))
            .collect())
    }

    pub fn string_u16(&mut self, context: &str) -> Result<String> {
        let len = self.u16(context)? as usize;
        let raw = self.take(len, context)?;
        String::from_utf8(raw.to_vec()).map_err(|_| Error::Format(format!("{context}: invalid UTF-8")))
    }
}

pub(crate) fn put_string_u16(out: &mut Vec<u8>, s: &str, context: &str) -> Result<()> {
    let len = u16::try_from(s.len()).map_err(|_| Error::Format(format!("{context} longer than 65535 bytes")))?;
    out.extend_from_slice(&len.to_le_bytes());
    out.extend_from_slice(s.as_bytes());
    Ok(())
}

pub(crate) fn put_f32s(out: &mut Vec<u8>, values: &[f32]) {
    out.reserve(values.len() * 4);
    for v in values {
        out.extend_from_slice(&v.to_le_bytes());
    }
}
