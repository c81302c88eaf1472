//! One chain of universe-reduction levels ending in a base predecessor structure.

use crate::bits::{ceil_log2, low_mask, BitArray, PackedInts};
use crate::bitvec::{BitVector, BuildOptions};
use crate::eliasfano::{split, superblock_range};
use crate::error::{Error, Result};
use crate::multirank::{MatrixKind, MultirankIndex};
use crate::sbtree::{default_branching, BlockShape};
use crate::serial::{Persist, Reader, Writer};

use super::BaseKind;

/// Reads the full key at a 0-based index when a level does not store its low parts.
pub(crate) type Ext<'a> = Option<&'a dyn Fn(usize) -> u64>;

#[inline]
fn high_part(x: u64, low_width: u32) -> u64 {
    if low_width >= 64 {
        0
    } else {
        x >> low_width
    }
}

/// Values split at a fixed number of low bits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct CutSeq {
    n: usize,
    low_width: u32,
    high: BitVector,
    low: Option<PackedInts>,
}

impl CutSeq {
    fn build(keys: &[u64], low_width: u32, select1: bool, store_low: bool) -> Self {
        let (high, low) = split(keys, low_width);
        let opts = BuildOptions {
            select1,
            ..BuildOptions::default()
        };
        CutSeq {
            n: keys.len(),
            low_width,
            high: BitVector::with_options(high, opts),
            low: store_low.then_some(low),
        }
    }

    #[inline]
    fn range(&self, g: u64) -> (usize, usize) {
        superblock_range(&self.high, self.n, g)
    }

    #[inline]
    fn low(&self, j: usize, ext: Ext<'_>) -> u64 {
        match &self.low {
            Some(l) => l.get(j),
            None => ext.expect("virtual keys need an accessor")(j) & low_mask(self.low_width),
        }
    }

    fn get(&self, j: usize, ext: Ext<'_>) -> u64 {
        match &self.low {
            Some(l) => {
                let h = (self.high.select1(j + 1) - j) as u64;
                let h = if self.low_width >= 64 {
                    0
                } else {
                    h << self.low_width
                };
                h | l.get(j)
            }
            None => ext.expect("virtual keys need an accessor")(j),
        }
    }

    fn high_space(&self) -> u64 {
        self.high.space_bits()
    }

    fn low_space(&self) -> u64 {
        self.low.as_ref().map_or(0, PackedInts::space_bits)
    }

    fn write(&self, w: &mut Writer) {
        w.u64(self.n as u64);
        w.u32(self.low_width);
        self.high.write(w);
        match &self.low {
            Some(l) => {
                w.u8(1);
                l.write(w);
            }
            None => w.u8(0),
        }
    }

    fn read(r: &mut Reader<'_>) -> Result<Self> {
        let n = r.usize()?;
        let low_width = r.u32()?;
        let high = BitVector::read(r)?;
        let low = if r.bool()? {
            Some(PackedInts::read(r)?)
        } else {
            None
        };
        if high.count_ones() != n
            || low
                .as_ref()
                .is_some_and(|l| l.len() != n || l.width() != low_width)
        {
            return Err(Error::Format("cut sequence inconsistent".into()));
        }
        Ok(CutSeq {
            n,
            low_width,
            high,
            low,
        })
    }
}

/// Shape parameters shared by every level of a chain.
#[derive(Debug, Clone, Copy)]
pub(crate) struct ChainShape {
    pub s: usize,
    pub v: usize,
    pub cut: u32,
    pub branching: Option<usize>,
    pub matrix: MatrixKind,
    pub base: BaseKind,
    pub eps: f64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Level {
    m: u64,
    cut: u32,
    v: usize,
    b: usize,
    seq: CutSeq,
    nonempty: BitVector,
    fat: BitVector,
    extra: PackedInts,
    offsets: PackedInts,
    forest: BitArray,
    mr: Option<MultirankIndex>,
}

impl Level {
    /// Builds the level and returns the keys of the next one (the distinct low
    /// parts of all fat-superblock heads), if any superblock is fat.
    fn build(
        keys: &[u64],
        m: u64,
        shape: &ChainShape,
        select1: bool,
        store_low: bool,
    ) -> Result<(Level, Option<Vec<u64>>)> {
        let cut = shape.cut;
        let v = shape.v;
        let lw = ceil_log2(m) - cut;
        let b = shape.branching.unwrap_or_else(|| default_branching(lw));
        let seq = CutSeq::build(keys, lw, select1, store_low);
        let mask = low_mask(lw);
        let lows: Vec<u64> = keys.iter().map(|&x| x & mask).collect();

        let mut nonempty = BitArray::new(1usize << cut);
        let mut fat = BitArray::default();
        let mut extra = vec![0u64];
        let mut offsets = Vec::new();
        let mut forest = BitArray::default();
        let mut rows: Vec<Vec<u64>> = Vec::new();
        let add_block =
            |start: usize, count: usize, offsets: &mut Vec<u64>, forest: &mut BitArray| {
                offsets.push(forest.len() as u64);
                BlockShape::new(count, b, lw).build(&lows[start..start + count], forest);
            };

        let n = keys.len();
        let mut i = 0;
        while i < n {
            let g = high_part(keys[i], lw);
            let mut j = i + 1;
            while j < n && high_part(keys[j], lw) == g {
                j += 1;
            }
            nonempty.set(g as usize, true);
            let size = j - i;
            if size < v {
                fat.push(false);
                add_block(i, size, &mut offsets, &mut forest);
            } else {
                fat.push(true);
                let blocks = size.div_ceil(v);
                extra.push(extra.last().unwrap() + blocks as u64 - 1);
                let mut heads = Vec::with_capacity(blocks);
                for k in 0..blocks {
                    let start = i + k * v;
                    heads.push(lows[start]);
                    add_block(start, v.min(j - start), &mut offsets, &mut forest);
                }
                rows.push(heads);
            }
            i = j;
        }

        let (mr, next) = if rows.is_empty() {
            (None, None)
        } else {
            let mut alphabet: Vec<u64> = rows.iter().flatten().copied().collect();
            alphabet.sort_unstable();
            alphabet.dedup();
            let cols: Vec<Vec<usize>> = rows
                .iter()
                .map(|r| {
                    r.iter()
                        .map(|h| alphabet.partition_point(|a| a < h))
                        .collect()
                })
                .collect();
            let mr = MultirankIndex::from_rows(&cols, alphabet.len(), shape.matrix)?;
            (Some(mr), Some(alphabet))
        };
        let offsets = PackedInts::from_values(&offsets);
        let level = Level {
            m,
            cut,
            v,
            b,
            seq,
            nonempty: BitVector::with_options(nonempty, BuildOptions::rank_only()),
            fat: BitVector::with_options(fat, BuildOptions::rank_only()),
            extra: PackedInts::from_values(&extra),
            offsets,
            forest,
            mr,
        };
        Ok((level, next))
    }

    /// Keys `≤ q`; `next` ranks a low part on the next level's keys.
    fn count_le(&self, q: u64, ext: Ext<'_>, next: impl FnOnce(u64) -> usize) -> usize {
        let lw = self.seq.low_width;
        let g = high_part(q, lw);
        let lb = q & low_mask(lw);
        let (lo, hi) = self.seq.range(g);
        if lo == hi {
            return lo;
        }
        let size = hi - lo;
        let nz = self.nonempty.rank1(g as usize);
        let row = self.fat.rank1(nz);
        let first = nz + self.extra.get(row) as usize;
        let (block, start, count) = if size < self.v {
            (first, lo, size)
        } else {
            let mr = self.mr.as_ref().expect("fat superblock without multirank");
            let k = mr.mr(row, next(lb));
            if k == 0 {
                return lo;
            }
            let start = lo + (k - 1) * self.v;
            (first + k - 1, start, self.v.min(hi - start))
        };
        let off = self.offsets.get(block) as usize;
        let shape = BlockShape::new(count, self.b, lw);
        start
            + shape.count_le(self.forest.words(), off, lb, false, |i| {
                self.seq.low(start + i, ext)
            })
    }

    pub fn n(&self) -> usize {
        self.seq.n
    }

    pub fn m(&self) -> u64 {
        self.m
    }

    pub fn cut(&self) -> u32 {
        self.cut
    }

    pub fn fat_superblocks(&self) -> usize {
        self.fat.count_ones()
    }

    pub fn blocks(&self) -> usize {
        self.offsets.len()
    }

    pub fn high_space(&self) -> u64 {
        self.seq.high_space()
    }

    pub fn low_space(&self) -> u64 {
        self.seq.low_space()
    }

    pub fn tree_space(&self) -> u64 {
        self.nonempty.space_bits()
            + self.fat.space_bits()
            + self.extra.space_bits()
            + self.offsets.space_bits()
            + self.forest.space_bits()
    }

    pub fn multirank_space(&self) -> u64 {
        self.mr.as_ref().map_or(0, MultirankIndex::space_bits)
    }

    fn write(&self, w: &mut Writer) {
        w.u64(self.m);
        w.u32(self.cut);
        w.u64(self.v as u64);
        w.u64(self.b as u64);
        self.seq.write(w);
        self.nonempty.write(w);
        self.fat.write(w);
        self.extra.write(w);
        self.offsets.write(w);
        self.forest.write(w);
        match &self.mr {
            Some(mr) => {
                w.u8(1);
                mr.write_payload(w);
            }
            None => w.u8(0),
        }
    }

    fn read(r: &mut Reader<'_>) -> Result<Self> {
        let m = r.u64()?;
        let cut = r.u32()?;
        let v = r.usize()?;
        let b = r.usize()?;
        let seq = CutSeq::read(r)?;
        let nonempty = BitVector::read(r)?;
        let fat = BitVector::read(r)?;
        let extra = PackedInts::read(r)?;
        let offsets = PackedInts::read(r)?;
        let forest = BitArray::read(r)?;
        let mr = if r.bool()? {
            Some(MultirankIndex::read_payload(r)?)
        } else {
            None
        };
        if v < 2
            || b < 2
            || cut >= 48
            || nonempty.len() != 1usize << cut
            || fat.len() != nonempty.count_ones()
            || extra.len() != fat.count_ones() + 1
            || mr.as_ref().map_or(0, MultirankIndex::rows) != fat.count_ones()
        {
            return Err(Error::Format("level fields inconsistent".into()));
        }
        Ok(Level {
            m,
            cut,
            v,
            b,
            seq,
            nonempty,
            fat,
            extra,
            offsets,
            forest,
            mr,
        })
    }
}

/// Predecessor structure at the bottom of a chain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Base {
    Dense(BitVector),
    /// Keys split into `2^cut` buckets; a query binary-searches its bucket.
    Sampled(CutSeq),
}

/// Above this universe a dense base is never built.
const DENSE_LIMIT: u64 = 1 << 36;

impl Base {
    fn build(
        keys: &[u64],
        m: u64,
        kind: BaseKind,
        eps: f64,
        select1: bool,
        store_low: bool,
    ) -> Result<Base> {
        let dense = || {
            let mut bits = BitArray::new(m as usize);
            for &x in keys {
                bits.set(x as usize, true);
            }
            let opts = BuildOptions {
                select1,
                select0: false,
                ..BuildOptions::default()
            };
            Base::Dense(BitVector::with_options(bits, opts))
        };
        let sampled = || {
            let width = ceil_log2(m);
            let n = keys.len();
            let cut = if n == 0 {
                0
            } else {
                let buckets = (n as f64 * (m as f64 / n as f64).powf(eps))
                    .ceil()
                    .clamp(1.0, m as f64);
                ceil_log2(buckets as u64).min(width)
            };
            Base::Sampled(CutSeq::build(keys, width - cut, select1, store_low))
        };
        match kind {
            BaseKind::Dense if m > DENSE_LIMIT => Err(Error::InvalidInput(format!(
                "dense base over universe {m} is too large"
            ))),
            BaseKind::Dense => Ok(dense()),
            BaseKind::Sampled => Ok(sampled()),
            BaseKind::Auto => {
                let s = sampled();
                if m <= DENSE_LIMIT && m <= 2 * s.space_bits() {
                    let d = dense();
                    if d.space_bits() < s.space_bits() {
                        return Ok(d);
                    }
                }
                Ok(s)
            }
        }
    }

    fn count_le(&self, q: u64, ext: Ext<'_>) -> usize {
        match self {
            Base::Dense(bv) => bv.rank1(q as usize + 1),
            Base::Sampled(seq) => {
                let lw = seq.low_width;
                let (lo, hi) = seq.range(high_part(q, lw));
                let lb = q & low_mask(lw);
                let (mut a, mut b) = (lo, hi);
                while a < b {
                    let mid = (a + b) / 2;
                    if seq.low(mid, ext) <= lb {
                        a = mid + 1;
                    } else {
                        b = mid;
                    }
                }
                a
            }
        }
    }

    fn select1(&self, k: usize, ext: Ext<'_>) -> u64 {
        match self {
            Base::Dense(bv) => bv.select1(k) as u64,
            Base::Sampled(seq) => seq.get(k - 1, ext),
        }
    }

    pub fn space_bits(&self) -> u64 {
        match self {
            Base::Dense(bv) => bv.space_bits(),
            Base::Sampled(seq) => seq.high_space() + seq.low_space(),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Base::Dense(_) => "dense",
            Base::Sampled(_) => "sampled",
        }
    }

    fn write(&self, w: &mut Writer) {
        match self {
            Base::Dense(bv) => {
                w.u8(0);
                bv.write(w);
            }
            Base::Sampled(seq) => {
                w.u8(1);
                seq.write(w);
            }
        }
    }

    fn read(r: &mut Reader<'_>) -> Result<Self> {
        match r.u8()? {
            0 => Ok(Base::Dense(BitVector::read(r)?)),
            1 => Ok(Base::Sampled(CutSeq::read(r)?)),
            k => Err(Error::Format(format!("unknown base kind {k}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Chain {
    levels: Vec<Level>,
    base: Option<Base>,
}

impl Chain {
    /// `select1` support is built on the first level (or the base) only when
    /// asked; `store_low = false` leaves the first level's keys to an accessor.
    pub fn build(
        keys: Vec<u64>,
        m: u64,
        shape: &ChainShape,
        select1: bool,
        store_low: bool,
    ) -> Result<Chain> {
        let mut keys = keys;
        let mut m_i = m;
        let mut levels: Vec<Level> = Vec::new();
        loop {
            let top = levels.is_empty();
            let lw = ceil_log2(m_i) as i64 - shape.cut as i64;
            if levels.len() < shape.s && lw >= 1 && !keys.is_empty() {
                let (level, next) =
                    Level::build(&keys, m_i, shape, select1 && top, store_low || !top)?;
                levels.push(level);
                match next {
                    None => return Ok(Chain { levels, base: None }),
                    Some(next) => {
                        keys = next;
                        m_i = 1u64 << lw;
                    }
                }
            } else {
                let base = Base::build(
                    &keys,
                    m_i,
                    shape.base,
                    shape.eps,
                    select1 && top,
                    store_low || !top,
                )?;
                return Ok(Chain {
                    levels,
                    base: Some(base),
                });
            }
        }
    }

    pub fn count_le(&self, q: u64, ext: Ext<'_>) -> usize {
        self.count_at(0, q, ext)
    }

    fn count_at(&self, i: usize, q: u64, ext: Ext<'_>) -> usize {
        if i == self.levels.len() {
            return self.base.as_ref().map_or(0, |b| b.count_le(q, ext));
        }
        self.levels[i].count_le(q, ext, |lb| self.count_at(i + 1, lb, None))
    }

    /// The `k`-th key, 1-based.
    pub fn select1(&self, k: usize, ext: Ext<'_>) -> u64 {
        match self.levels.first() {
            Some(l) => l.seq.get(k - 1, ext),
            None => self
                .base
                .as_ref()
                .expect("chain without levels has a base")
                .select1(k, ext),
        }
    }

    pub fn levels(&self) -> &[Level] {
        &self.levels
    }

    pub fn base(&self) -> Option<&Base> {
        self.base.as_ref()
    }

    pub fn space_bits(&self) -> u64 {
        self.levels
            .iter()
            .map(|l| l.high_space() + l.low_space() + l.tree_space() + l.multirank_space())
            .sum::<u64>()
            + self.base.as_ref().map_or(0, Base::space_bits)
    }

    pub fn write(&self, w: &mut Writer) {
        w.u64(self.levels.len() as u64);
        for l in &self.levels {
            l.write(w);
        }
        match &self.base {
            Some(b) => {
                w.u8(1);
                b.write(w);
            }
            None => w.u8(0),
        }
    }

    pub fn read(r: &mut Reader<'_>) -> Result<Self> {
        let count = r.usize()?;
        if count > 64 {
            return Err(Error::Format("too many levels".into()));
        }
        let levels = (0..count)
            .map(|_| Level::read(r))
            .collect::<Result<Vec<_>>>()?;
        let base = if r.bool()? {
            Some(Base::read(r)?)
        } else {
            None
        };
        if base.is_none() && levels.last().is_none_or(|l| l.mr.is_some()) {
            return Err(Error::Format("chain ends without a base".into()));
        }
        Ok(Chain { levels, base })
    }
}
