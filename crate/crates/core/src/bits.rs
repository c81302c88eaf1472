//! Raw bit storage: plain bit arrays and fixed-width packed integer arrays.

use crate::error::{Error, Result};
use crate::probe;
use crate::serial::{Reader, Writer};

/// Number of bits needed to write values in `[0, x)`, i.e. `⌈log₂ x⌉` (0 for x ≤ 1).
#[inline]
pub fn ceil_log2(x: u64) -> u32 {
    if x <= 1 {
        0
    } else {
        64 - (x - 1).leading_zeros()
    }
}

/// Number of bits in the binary representation of `x` (0 for 0).
#[inline]
pub fn bit_len(x: u64) -> u32 {
    64 - x.leading_zeros()
}

#[inline]
pub(crate) fn low_mask(width: u32) -> u64 {
    if width >= 64 {
        u64::MAX
    } else {
        (1u64 << width) - 1
    }
}

/// Position (0-based) of the `k`-th set bit of `word`, `k` counted from 0.
#[inline]
pub(crate) fn select_in_word(mut word: u64, mut k: u32) -> u32 {
    debug_assert!(k < word.count_ones());
    // byte-wise skip, then bit-wise
    let mut base = 0;
    loop {
        let c = (word & 0xff).count_ones();
        if k < c {
            break;
        }
        k -= c;
        word >>= 8;
        base += 8;
    }
    for _ in 0..k {
        word &= word - 1;
    }
    base + word.trailing_zeros()
}

/// Bit sequence packed little-endian into 64-bit words.
///
/// Bit `i` lives in bit `i % 64` of word `i / 64`; pad bits past `len` are zero.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BitArray {
    len: usize,
    words: Vec<u64>,
}

impl BitArray {
    pub fn new(len: usize) -> Self {
        BitArray {
            len,
            words: vec![0; len.div_ceil(64)],
        }
    }

    pub fn from_bits<I: IntoIterator<Item = bool>>(bits: I) -> Self {
        let mut a = BitArray::default();
        for b in bits {
            a.push(b);
        }
        a
    }

    /// Parses a string of `0`/`1` characters.
    pub fn from_str_bits(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(Error::InvalidInput(format!("bad bit character {c:?}"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(BitArray::from_bits)
    }

    pub fn push(&mut self, bit: bool) {
        if self.len.is_multiple_of(64) {
            self.words.push(0);
        }
        if bit {
            self.words[self.len / 64] |= 1 << (self.len % 64);
        }
        self.len += 1;
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn words(&self) -> &[u64] {
        &self.words
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        (self.words[i / 64] >> (i % 64)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, bit: bool) {
        debug_assert!(i < self.len);
        if bit {
            self.words[i / 64] |= 1 << (i % 64);
        } else {
            self.words[i / 64] &= !(1 << (i % 64));
        }
    }

    /// Reads `width ≤ 64` bits starting at bit `pos`.
    #[inline]
    pub fn get_bits(&self, pos: usize, width: u32) -> u64 {
        get_bits(&self.words, pos, width)
    }

    /// Appends the low `width` bits of `value`.
    pub fn push_bits(&mut self, value: u64, width: u32) {
        for i in 0..width {
            self.push((value >> i) & 1 == 1);
        }
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    /// Storage in bits including pad bits of the last word.
    pub fn space_bits(&self) -> u64 {
        64 * self.words.len() as u64
    }

    pub(crate) fn write(&self, w: &mut Writer) {
        w.u64(self.len as u64);
        w.words(&self.words);
    }

    pub(crate) fn read(r: &mut Reader<'_>) -> Result<Self> {
        let len = r.usize()?;
        let words = r.words()?;
        if words.len() != len.div_ceil(64) {
            return Err(Error::Format("bit array word count mismatch".into()));
        }
        if len % 64 != 0 {
            if let Some(last) = words.last() {
                if last >> (len % 64) != 0 {
                    return Err(Error::Format("nonzero pad bits".into()));
                }
            }
        }
        Ok(BitArray { len, words })
    }
}

#[inline]
pub(crate) fn get_bits(words: &[u64], pos: usize, width: u32) -> u64 {
    if width == 0 {
        return 0;
    }
    let w = pos / 64;
    let off = (pos % 64) as u32;
    let mut v = words[w] >> off;
    if off + width > 64 {
        v |= words[w + 1] << (64 - off);
    }
    v & low_mask(width)
}

/// Fixed-width unsigned integers packed back to back.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PackedInts {
    len: usize,
    width: u32,
    words: Vec<u64>,
}

impl PackedInts {
    pub fn with_width(width: u32) -> Self {
        assert!(width <= 64);
        PackedInts {
            len: 0,
            width,
            words: Vec::new(),
        }
    }

    /// Packs `values` using the smallest width that fits their maximum.
    pub fn from_values(values: &[u64]) -> Self {
        let width = bit_len(values.iter().copied().max().unwrap_or(0));
        Self::from_values_width(values, width)
    }

    pub fn from_values_width(values: &[u64], width: u32) -> Self {
        let mut p = PackedInts::with_width(width);
        p.words = vec![0; (values.len() * width as usize).div_ceil(64)];
        for &v in values {
            p.push(v);
        }
        p
    }

    pub fn push(&mut self, value: u64) {
        debug_assert!(self.width == 64 || value >> self.width == 0);
        if self.width == 0 {
            self.len += 1;
            return;
        }
        let pos = self.len * self.width as usize;
        let need = (pos + self.width as usize).div_ceil(64);
        if self.words.len() < need {
            self.words.resize(need, 0);
        }
        let w = pos / 64;
        let off = (pos % 64) as u32;
        self.words[w] |= value << off;
        if off + self.width > 64 {
            self.words[w + 1] |= value >> (64 - off);
        }
        self.len += 1;
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn width(&self) -> u32 {
        self.width
    }

    /// Value at index `i`; counts one probe.
    #[inline]
    pub fn get(&self, i: usize) -> u64 {
        debug_assert!(i < self.len);
        probe::hit(1);
        get_bits(&self.words, i * self.width as usize, self.width)
    }

    /// Value at index `i` without probe accounting (the caller charges it).
    #[inline]
    pub(crate) fn get_quiet(&self, i: usize) -> u64 {
        get_bits(&self.words, i * self.width as usize, self.width)
    }

    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        (0..self.len).map(move |i| get_bits(&self.words, i * self.width as usize, self.width))
    }

    pub fn space_bits(&self) -> u64 {
        64 * self.words.len() as u64
    }

    pub(crate) fn write(&self, w: &mut Writer) {
        w.u64(self.len as u64);
        w.u8(self.width as u8);
        w.words(&self.words);
    }

    pub(crate) fn read(r: &mut Reader<'_>) -> Result<Self> {
        let len = r.usize()?;
        let width = r.u8()? as u32;
        if width > 64 {
            return Err(Error::Format("packed width above 64".into()));
        }
        let words = r.words()?;
        if words.len() != (len * width as usize).div_ceil(64) {
            return Err(Error::Format("packed array word count mismatch".into()));
        }
        Ok(PackedInts { len, width, words })
    }
}
