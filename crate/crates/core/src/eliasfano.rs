//! Elias-Fano encoding of a non-decreasing integer sequence.
//!
//! Each value occupies `W = ⌈log₂ m⌉` bits. The top `cut` bits (the high
//! part) go to the bitvector `H` in unary: for every element, as many zeros
//! as the gap from the previous high part, then a one. The remaining
//! `ℓ = W − cut` low bits are stored verbatim in `L`. With the default
//! `cut = ⌈log₂ n⌉`, `H` has at most `n + 2^cut ≤ 3n` bits.
//!
//! Equal values are allowed (a multiset), since the dual sequence of a set is
//! only non-decreasing.

use crate::bits::{ceil_log2, low_mask, BitArray, PackedInts};
use crate::bitvec::BitVector;
use crate::error::{not_found, out_of_range, Error, Result};
use crate::serial::{Persist, Reader, Tag, Writer};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EliasFano {
    n: usize,
    m: u64,
    cut: u32,
    low_width: u32,
    high: BitVector,
    low: PackedInts,
}

impl EliasFano {
    /// Encodes `values` (non-decreasing, each `< m`). `cut` defaults to `⌈log₂ max(n,1)⌉`.
    pub fn encode(values: &[u64], m: u64, cut: Option<u32>) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidInput("universe must be at least 1".into()));
        }
        check_sorted(values, m, false)?;
        let n = values.len();
        let cut = cut.unwrap_or_else(|| ceil_log2(n.max(1) as u64));
        if cut >= 64 {
            return Err(Error::InvalidInput(format!("cut {cut} too large")));
        }
        let low_width = ceil_log2(m).saturating_sub(cut);
        let (high, low) = split(values, low_width);
        Ok(EliasFano {
            n,
            m,
            cut,
            low_width,
            high: BitVector::new(high),
            low,
        })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn universe(&self) -> u64 {
        self.m
    }

    pub fn cut(&self) -> u32 {
        self.cut
    }

    pub fn low_width(&self) -> u32 {
        self.low_width
    }

    pub fn high(&self) -> &BitVector {
        &self.high
    }

    pub fn low(&self) -> &PackedInts {
        &self.low
    }

    /// The `k`-th element, `k` 1-based.
    pub fn access(&self, k: usize) -> Result<u64> {
        if k == 0 || k > self.n {
            return Err(not_found(k, self.n));
        }
        Ok(self.get(k - 1))
    }

    /// Element at 0-based index `i`: high part from `select1(H)`, low part from `L`.
    #[inline]
    pub(crate) fn get(&self, i: usize) -> u64 {
        let h = (self.high.select1(i + 1) - i) as u64;
        (h << self.low_width) | self.low.get(i)
    }

    /// 1-based half-open ordinal range `[lo, hi)` of the elements whose high part is `g`.
    pub fn superblock(&self, g: u64) -> Result<(usize, usize)> {
        if g >> self.cut != 0 {
            return Err(out_of_range(g, 1u64 << self.cut));
        }
        let (lo, hi) = superblock_range(&self.high, self.n, g);
        Ok((lo + 1, hi + 1))
    }

    /// Elements `< x`: the superblock range of `x`'s high part, then a scan of its low parts.
    pub(crate) fn rank_lt(&self, x: u64) -> usize {
        if x >= self.m {
            return self.n;
        }
        let g = if self.low_width >= 64 {
            0
        } else {
            x >> self.low_width
        };
        let (lo, hi) = superblock_range(&self.high, self.n, g);
        let lx = x & low_mask(self.low_width);
        let mut k = lo;
        while k < hi && self.low.get(k) < lx {
            k += 1;
        }
        k
    }

    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        let mut h = 0u64;
        let mut pos = 0usize;
        let bits = self.high.bits();
        (0..self.n).map(move |i| {
            while !bits.get(pos) {
                h += 1;
                pos += 1;
            }
            pos += 1;
            (h << self.low_width) | self.low.get_quiet(i)
        })
    }

    /// Logical length of `H` in bits.
    pub fn high_bits(&self) -> u64 {
        self.high.len() as u64
    }

    /// Logical length of `L` in bits, `n·ℓ`.
    pub fn low_bits(&self) -> u64 {
        self.n as u64 * self.low_width as u64
    }

    /// Exact storage: `H` with its index, plus `L`, pad bits included.
    pub fn space_bits(&self) -> u64 {
        self.high.space_bits() + self.low.space_bits()
    }
}

impl Persist for EliasFano {
    const TAG: Tag = Tag::EliasFano;

    fn write_payload(&self, w: &mut Writer) {
        w.u64(self.n as u64);
        w.u64(self.m);
        w.u32(self.cut);
        w.u32(self.low_width);
        self.high.write(w);
        self.low.write(w);
    }

    fn read_payload(r: &mut Reader<'_>) -> Result<Self> {
        let n = r.usize()?;
        let m = r.u64()?;
        let cut = r.u32()?;
        let low_width = r.u32()?;
        let high = BitVector::read(r)?;
        let low = PackedInts::read(r)?;
        if high.count_ones() != n || low.len() != n || low.width() != low_width || m == 0 {
            return Err(Error::Format("Elias-Fano fields inconsistent".into()));
        }
        Ok(EliasFano {
            n,
            m,
            cut,
            low_width,
            high,
            low,
        })
    }
}

/// Validates a sorted input: values `< m`, non-decreasing (strictly increasing when `strict`).
pub(crate) fn check_sorted(values: &[u64], m: u64, strict: bool) -> Result<()> {
    for (i, w) in values.windows(2).enumerate() {
        if w[1] < w[0] || (strict && w[1] == w[0]) {
            return Err(Error::InvalidInput(format!(
                "values not {} at index {}",
                if strict {
                    "strictly increasing"
                } else {
                    "sorted"
                },
                i + 1
            )));
        }
    }
    if let Some(&last) = values.last() {
        if last >= m {
            return Err(Error::InvalidInput(format!(
                "value {last} outside universe {m}"
            )));
        }
    }
    Ok(())
}

/// Unary high-part bitvector and packed low parts.
pub(crate) fn split(values: &[u64], low_width: u32) -> (BitArray, PackedInts) {
    let mut high = BitArray::default();
    let mut low = PackedInts::with_width(low_width);
    let mut prev = 0u64;
    for &x in values {
        let h = if low_width >= 64 { 0 } else { x >> low_width };
        for _ in prev..h {
            high.push(false);
        }
        high.push(true);
        prev = h;
        low.push(x & low_mask(low_width));
    }
    (high, low)
}

/// 0-based half-open range of elements whose high part equals `g`, read off two `select0` on `H`.
#[inline]
pub(crate) fn superblock_range(high: &BitVector, n: usize, g: u64) -> (usize, usize) {
    let zeros = high.count_zeros() as u64;
    let before = |g: u64| -> usize {
        if g == 0 {
            0
        } else if g > zeros {
            n
        } else {
            high.select0(g as usize) - (g as usize - 1)
        }
    };
    (before(g), before(g + 1))
}
