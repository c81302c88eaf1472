//! Plain bitvector with constant-probe rank and select over both bit values.
//!
//! Positions are 0-based. `rank(b, i)` counts occurrences of `b` at positions
//! strictly below `i`, for `i ∈ [0, len]`. `select(b, k)` takes a 1-based
//! ordinal and returns the 0-based position of the `k`-th occurrence, so
//! `rank(b, select(b, k)) = k − 1`.
//!
//! Rank directory: cumulative counts per 65 536-bit superblock and relative
//! 16-bit counts per 512-bit basic block (one cache line). A rank query reads
//! one superblock entry, one block entry and one cache line.
//!
//! Select directory: occurrences are grouped in chunks of `select_rate`
//! (default 64). A chunk whose occurrences span at most 512 bits stores only
//! the position of its first occurrence and is resolved by scanning at most
//! two cache lines; a wider chunk additionally stores the offset of every
//! occurrence.

use crate::bits::{bit_len, select_in_word, BitArray, PackedInts};
use crate::error::{not_found, out_of_range, Error, Result};
use crate::probe;
use crate::serial::{Persist, Reader, Tag, Writer};

const BLOCK_BITS: usize = 512;
const SUPERBLOCK_BITS: usize = 65536;
const WORDS_PER_BLOCK: usize = BLOCK_BITS / 64;
const DENSE_SPAN: u64 = 512;

pub const DEFAULT_SELECT_RATE: usize = 64;

/// Which select directories to build.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BuildOptions {
    pub select1: bool,
    pub select0: bool,
    pub select_rate: usize,
}

impl Default for BuildOptions {
    fn default() -> Self {
        BuildOptions {
            select1: true,
            select0: true,
            select_rate: DEFAULT_SELECT_RATE,
        }
    }
}

impl BuildOptions {
    pub fn rank_only() -> Self {
        BuildOptions {
            select1: false,
            select0: false,
            ..Default::default()
        }
    }

    pub fn with_select1() -> Self {
        BuildOptions {
            select0: false,
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct SelectIndex {
    rate: usize,
    samples: PackedInts,
    sparse: BitArray,
    // cumulative count of sparse chunks before each group of 64 chunks
    sparse_rank: PackedInts,
    explicit: PackedInts,
}

impl SelectIndex {
    fn build(bits: &BitArray, value: bool, rate: usize) -> Self {
        assert!(rate >= 1);
        let positions: Vec<u64> = (0..bits.len())
            .filter(|&i| bits.get(i) == value)
            .map(|i| i as u64)
            .collect();
        let mut samples = Vec::new();
        let mut sparse = BitArray::default();
        let mut sparse_rank = Vec::new();
        let mut explicit = Vec::new();
        let mut n_sparse = 0u64;
        for (c, chunk) in positions.chunks(rate).enumerate() {
            if c % 64 == 0 {
                sparse_rank.push(n_sparse);
            }
            samples.push(chunk[0]);
            let span = chunk[chunk.len() - 1] - chunk[0] + 1;
            let is_sparse = span > DENSE_SPAN;
            sparse.push(is_sparse);
            if is_sparse {
                n_sparse += 1;
                explicit.extend(chunk.iter().map(|&p| p - chunk[0]));
            }
        }
        SelectIndex {
            rate,
            samples: PackedInts::from_values_width(&samples, bit_len(bits.len() as u64)),
            sparse,
            sparse_rank: PackedInts::from_values(&sparse_rank),
            explicit: PackedInts::from_values(&explicit),
        }
    }

    fn space_bits(&self) -> u64 {
        self.samples.space_bits()
            + self.sparse.space_bits()
            + self.sparse_rank.space_bits()
            + self.explicit.space_bits()
    }

    fn write(&self, w: &mut Writer) {
        w.u64(self.rate as u64);
        self.samples.write(w);
        self.sparse.write(w);
        self.sparse_rank.write(w);
        self.explicit.write(w);
    }

    fn read(r: &mut Reader<'_>) -> Result<Self> {
        let rate = r.usize()?;
        if rate == 0 {
            return Err(Error::Format("zero select rate".into()));
        }
        Ok(SelectIndex {
            rate,
            samples: PackedInts::read(r)?,
            sparse: BitArray::read(r)?,
            sparse_rank: PackedInts::read(r)?,
            explicit: PackedInts::read(r)?,
        })
    }
}

/// Auxiliary rank/select directories over a [`BitArray`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankSelectIndex {
    ones: usize,
    superblocks: Vec<u64>,
    blocks: PackedInts,
    select1: Option<SelectIndex>,
    select0: Option<SelectIndex>,
}

impl RankSelectIndex {
    pub fn superblock_counts(&self) -> &[u64] {
        &self.superblocks
    }

    pub fn block_counts(&self) -> impl Iterator<Item = u64> + '_ {
        self.blocks.iter()
    }

    pub fn space_bits(&self) -> u64 {
        64 * self.superblocks.len() as u64
            + self.blocks.space_bits()
            + self.select1.as_ref().map_or(0, SelectIndex::space_bits)
            + self.select0.as_ref().map_or(0, SelectIndex::space_bits)
    }
}

/// A bit array together with its rank/select index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitVector {
    bits: BitArray,
    index: RankSelectIndex,
}

impl Default for BitVector {
    fn default() -> Self {
        BitVector::new(BitArray::default())
    }
}

impl BitVector {
    /// Builds rank and both select directories.
    pub fn new(bits: BitArray) -> Self {
        Self::with_options(bits, BuildOptions::default())
    }

    pub fn from_bits<I: IntoIterator<Item = bool>>(bits: I) -> Self {
        Self::new(BitArray::from_bits(bits))
    }

    pub fn with_options(bits: BitArray, opts: BuildOptions) -> Self {
        let len = bits.len();
        let words = bits.words();
        let n_blocks = len / BLOCK_BITS + 1;
        let mut superblocks = Vec::with_capacity(len / SUPERBLOCK_BITS + 1);
        let mut blocks = Vec::with_capacity(n_blocks);
        let mut total = 0u64;
        let mut sb_base = 0u64;
        for b in 0..n_blocks {
            if b % (SUPERBLOCK_BITS / BLOCK_BITS) == 0 {
                superblocks.push(total);
                sb_base = total;
            }
            blocks.push(total - sb_base);
            let lo = (b * WORDS_PER_BLOCK).min(words.len());
            let hi = ((b + 1) * WORDS_PER_BLOCK).min(words.len());
            total += words[lo..hi]
                .iter()
                .map(|w| w.count_ones() as u64)
                .sum::<u64>();
        }
        let select1 = opts
            .select1
            .then(|| SelectIndex::build(&bits, true, opts.select_rate));
        let select0 = opts
            .select0
            .then(|| SelectIndex::build(&bits, false, opts.select_rate));
        BitVector {
            index: RankSelectIndex {
                ones: total as usize,
                superblocks,
                blocks: PackedInts::from_values_width(&blocks, 16),
                select1,
                select0,
            },
            bits,
        }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.bits.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    #[inline]
    pub fn count_ones(&self) -> usize {
        self.index.ones
    }

    #[inline]
    pub fn count_zeros(&self) -> usize {
        self.len() - self.index.ones
    }

    pub fn count(&self, value: bool) -> usize {
        if value {
            self.count_ones()
        } else {
            self.count_zeros()
        }
    }

    pub fn bits(&self) -> &BitArray {
        &self.bits
    }

    pub fn index(&self) -> &RankSelectIndex {
        &self.index
    }

    pub fn access(&self, i: usize) -> Result<bool> {
        if i >= self.len() {
            return Err(out_of_range(i, self.len()));
        }
        Ok(self.get(i))
    }

    #[inline]
    pub(crate) fn get(&self, i: usize) -> bool {
        probe::hit(1);
        self.bits.get(i)
    }

    pub fn rank(&self, value: bool, i: usize) -> Result<usize> {
        if i > self.len() {
            return Err(out_of_range(i, self.len()));
        }
        let r1 = self.rank1(i);
        Ok(if value { r1 } else { i - r1 })
    }

    /// Ones strictly before `i`; `i ≤ len`.
    #[inline]
    pub(crate) fn rank1(&self, i: usize) -> usize {
        debug_assert!(i <= self.len());
        probe::hit(2);
        let words = self.bits.words();
        let blk = i / BLOCK_BITS;
        let mut r = self.index.superblocks[i / SUPERBLOCK_BITS] + self.index.blocks.get(blk);
        let end = i / 64;
        for w in &words[blk * WORDS_PER_BLOCK..end] {
            r += w.count_ones() as u64;
        }
        if !i.is_multiple_of(64) {
            r += (words[end] & ((1u64 << (i % 64)) - 1)).count_ones() as u64;
        }
        r as usize
    }

    pub fn select(&self, value: bool, k: usize) -> Result<usize> {
        let count = self.count(value);
        if k == 0 || k > count {
            return Err(not_found(k, count));
        }
        let idx = if value {
            self.index.select1.as_ref()
        } else {
            self.index.select0.as_ref()
        };
        match idx {
            Some(idx) => Ok(self.select_with(idx, value, k - 1)),
            None => Err(Error::Unsupported(
                "select directory not built for this bit value",
            )),
        }
    }

    /// Position of the `k`-th one (1-based); `1 ≤ k ≤ count_ones`.
    #[inline]
    pub(crate) fn select1(&self, k: usize) -> usize {
        let idx = self.index.select1.as_ref().expect("select1 directory");
        self.select_with(idx, true, k - 1)
    }

    /// Position of the `k`-th zero (1-based); `1 ≤ k ≤ count_zeros`.
    #[inline]
    pub(crate) fn select0(&self, k: usize) -> usize {
        let idx = self.index.select0.as_ref().expect("select0 directory");
        self.select_with(idx, false, k - 1)
    }

    // `occ` is the 0-based occurrence ordinal.
    fn select_with(&self, idx: &SelectIndex, value: bool, occ: usize) -> usize {
        let chunk = occ / idx.rate;
        let mut rem = (occ % idx.rate) as u32;
        probe::hit(1);
        let start = idx.samples.get_quiet(chunk) as usize;
        if idx.sparse.get(chunk) {
            let before = idx.sparse_rank.get(chunk / 64) as usize
                + count_ones_range(&idx.sparse, chunk / 64 * 64, chunk);
            return start + idx.explicit.get(before * idx.rate + rem as usize) as usize;
        }
        let words = self.bits.words();
        let mut wi = start / 64;
        let mut line = usize::MAX;
        let mut word = read_word(words, wi, value, self.len()) & (u64::MAX << (start % 64));
        loop {
            if wi / WORDS_PER_BLOCK != line {
                line = wi / WORDS_PER_BLOCK;
                probe::hit(1);
            }
            let c = word.count_ones();
            if rem < c {
                return wi * 64 + select_in_word(word, rem) as usize;
            }
            rem -= c;
            wi += 1;
            word = read_word(words, wi, value, self.len());
        }
    }

    /// Bits of array words plus index, pad bits included.
    pub fn space_bits(&self) -> u64 {
        self.bits.space_bits() + self.index.space_bits()
    }

    pub(crate) fn write(&self, w: &mut Writer) {
        self.bits.write(w);
        w.u64(self.index.ones as u64);
        w.words(&self.index.superblocks);
        self.index.blocks.write(w);
        for s in [&self.index.select1, &self.index.select0] {
            match s {
                Some(s) => {
                    w.u8(1);
                    s.write(w);
                }
                None => w.u8(0),
            }
        }
    }

    pub(crate) fn read(r: &mut Reader<'_>) -> Result<Self> {
        let bits = BitArray::read(r)?;
        let ones = r.usize()?;
        let superblocks = r.words()?;
        let blocks = PackedInts::read(r)?;
        let mut sel = [None, None];
        for s in sel.iter_mut() {
            if r.bool()? {
                *s = Some(SelectIndex::read(r)?);
            }
        }
        let [select1, select0] = sel;
        if ones != bits.count_ones()
            || superblocks.len() != bits.len() / SUPERBLOCK_BITS + 1
            || blocks.len() != bits.len() / BLOCK_BITS + 1
        {
            return Err(Error::Format(
                "bitvector index inconsistent with bits".into(),
            ));
        }
        Ok(BitVector {
            bits,
            index: RankSelectIndex {
                ones,
                superblocks,
                blocks,
                select1,
                select0,
            },
        })
    }
}

impl Persist for BitVector {
    const TAG: Tag = Tag::BitVector;

    fn write_payload(&self, w: &mut Writer) {
        self.write(w);
    }

    fn read_payload(r: &mut Reader<'_>) -> Result<Self> {
        Self::read(r)
    }
}

#[inline]
fn read_word(words: &[u64], wi: usize, value: bool, len: usize) -> u64 {
    let w = words[wi];
    if value {
        w
    } else {
        let mut inv = !w;
        if (wi + 1) * 64 > len {
            inv &= crate::bits::low_mask((len - wi * 64) as u32);
        }
        inv
    }
}

fn count_ones_range(bits: &BitArray, lo: usize, hi: usize) -> usize {
    (lo..hi).filter(|&i| bits.get(i)).count()
}
