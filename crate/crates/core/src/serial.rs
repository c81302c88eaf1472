//! Binary serialization shared by all structures.
//!
//! Layout: magic `FIDR`, `u32` version, `u8` structure tag, then the payload.
//! Integers are little-endian. Bit data is written as whole 64-bit words
//! behind a `u64` word count. The writer keeps two tallies: `payload_bits`
//! (the word data of bit arrays and packed arrays) and `header_bits`
//! (everything else), so the space accounting of a structure can be checked
//! against its serialized size.

use crate::error::{Error, Result};

pub const MAGIC: [u8; 4] = *b"FIDR";
pub const VERSION: u32 = 1;

/// Structure tags.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u8)]
pub enum Tag {
    BitVector = 1,
    EliasFano = 2,
    DualView = 3,
    PatriciaTrie = 4,
    Multirank = 5,
    RecursiveFid = 6,
}

impl Tag {
    fn from_u8(v: u8) -> Option<Tag> {
        Some(match v {
            1 => Tag::BitVector,
            2 => Tag::EliasFano,
            3 => Tag::DualView,
            4 => Tag::PatriciaTrie,
            5 => Tag::Multirank,
            6 => Tag::RecursiveFid,
            _ => return None,
        })
    }
}

#[derive(Debug, Default)]
pub struct Writer {
    buf: Vec<u8>,
    header_bits: u64,
    payload_bits: u64,
}

impl Writer {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn u8(&mut self, v: u8) {
        self.buf.push(v);
        self.header_bits += 8;
    }

    pub fn u32(&mut self, v: u32) {
        self.buf.extend_from_slice(&v.to_le_bytes());
        self.header_bits += 32;
    }

    pub fn u64(&mut self, v: u64) {
        self.buf.extend_from_slice(&v.to_le_bytes());
        self.header_bits += 64;
    }

    pub fn f64(&mut self, v: f64) {
        self.u64(v.to_bits());
    }

    pub fn words(&mut self, words: &[u64]) {
        self.u64(words.len() as u64);
        for w in words {
            self.buf.extend_from_slice(&w.to_le_bytes());
        }
        self.payload_bits += 64 * words.len() as u64;
    }

    pub fn header_bits(&self) -> u64 {
        self.header_bits
    }

    pub fn payload_bits(&self) -> u64 {
        self.payload_bits
    }

    pub fn into_bytes(self) -> Vec<u8> {
        self.buf
    }
}

pub struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    pub fn new(buf: &'a [u8]) -> Self {
        Reader { buf, pos: 0 }
    }

    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        if self.buf.len() - self.pos < n {
            return Err(Error::Format(format!(
                "truncated input at byte {}",
                self.pos
            )));
        }
        let s = &self.buf[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    pub fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }

    pub fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    pub fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    pub fn usize(&mut self) -> Result<usize> {
        usize::try_from(self.u64()?).map_err(|_| Error::Format("length overflows usize".into()))
    }

    pub fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_bits(self.u64()?))
    }

    pub fn bool(&mut self) -> Result<bool> {
        match self.u8()? {
            0 => Ok(false),
            1 => Ok(true),
            v => Err(Error::Format(format!("bad boolean byte {v}"))),
        }
    }

    pub fn words(&mut self) -> Result<Vec<u64>> {
        let n = self.usize()?;
        let bytes = self.take(
            n.checked_mul(8)
                .ok_or_else(|| Error::Format("word count overflow".into()))?,
        )?;
        Ok(bytes
            .chunks_exact(8)
            .map(|c| u64::from_le_bytes(c.try_into().unwrap()))
            .collect())
    }

    pub fn finish(&self) -> Result<()> {
        if self.pos != self.buf.len() {
            return Err(Error::Format(format!(
                "{} trailing bytes",
                self.buf.len() - self.pos
            )));
        }
        Ok(())
    }
}

/// A structure that can be written and read back.
pub trait Persist: Sized {
    const TAG: Tag;

    fn write_payload(&self, w: &mut Writer);

    fn read_payload(r: &mut Reader<'_>) -> Result<Self>;

    /// Full serialization with the common header.
    fn to_bytes(&self) -> Vec<u8> {
        self.to_writer().into_bytes()
    }

    /// Serializes into a writer, exposing the header/payload tallies.
    fn to_writer(&self) -> Writer {
        let mut w = Writer::new();
        for b in MAGIC {
            w.u8(b);
        }
        w.u32(VERSION);
        w.u8(Self::TAG as u8);
        self.write_payload(&mut w);
        w
    }

    fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut r = Reader::new(bytes);
        let magic = r.take(4)?;
        if magic != MAGIC {
            return Err(Error::Format("bad magic".into()));
        }
        let version = r.u32()?;
        if version != VERSION {
            return Err(Error::Format(format!("unsupported version {version}")));
        }
        let tag = r.u8()?;
        match Tag::from_u8(tag) {
            Some(t) if t == Self::TAG => {}
            _ => return Err(Error::Format(format!("unexpected structure tag {tag}"))),
        }
        let out = Self::read_payload(&mut r)?;
        r.finish()?;
        Ok(out)
    }
}
