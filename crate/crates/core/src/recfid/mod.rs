//! Recursive fully indexable dictionary.
//!
//! The stored set is split at a fixed number of high bits into superblocks
//! (read off the unary high-part vector `H`). A superblock with fewer than
//! `v` keys is *slim* and is searched through one string B-tree over its low
//! parts. A *fat* superblock is cut into blocks of `v` keys; the smallest key
//! of each block is its head. The low parts of all heads, deduplicated, form
//! the key set of the next level, whose universe is `2^ℓ` for `ℓ` low bits.
//! A multirank index maps a rank on that next level back to the number of
//! heads `≤` the query within one superblock, which selects the block to
//! search. After `s` levels the chain ends in a base predecessor structure.
//!
//! `select1` reads `H` and `L` of the first level directly. `select0` runs on
//! a second chain built over the deduplicated dual sequence of the stored
//! set, whose first-level keys are not stored but recomputed from the main
//! chain. When more than half the universe is set, the complement is stored
//! instead and the bit senses are swapped at the API boundary.

mod chain;

use std::fmt;
use std::str::FromStr;

use crate::bits::ceil_log2;
use crate::bitvec::BitVector;
use crate::bridge::{pred_from_fid, run_last, select0_via_dual};
use crate::eliasfano::check_sorted;
use crate::error::{not_found, out_of_range, Error, Result};
use crate::multirank::MatrixKind;
use crate::serial::{Persist, Reader, Tag, Writer};
use crate::traits::{Fid, PredCount};

use chain::{Chain, ChainShape};

/// Whether the complement of the set is stored.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Complement {
    /// Store the complement when more than half the universe is set.
    #[default]
    Auto,
    On,
    Off,
}

/// Predecessor structure at the end of a chain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BaseKind {
    /// Whichever of the two takes fewer bits.
    #[default]
    Auto,
    /// Plain bitvector over the final universe.
    Dense,
    /// Bucketed keys; the bucket count grows as `n·(m/n)^eps`.
    Sampled,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Params {
    /// Maximum number of levels.
    pub s: usize,
    /// Block size and slim threshold; `None` means `max(2, ⌈log₂ m⌉²)`.
    pub v: Option<usize>,
    /// Universe divisor per level (cut of `⌈log₂ w⌉` bits); `None` means `max(2, n)`.
    pub w: Option<u64>,
    /// Sampling exponent of the base.
    pub eps: f64,
    pub complement: Complement,
    pub matrix: MatrixKind,
    pub base: BaseKind,
    /// Build the dual chain for `select0`.
    pub select0: bool,
    /// Branching factor of the block trees; `None` means `max(2, ⌊√ℓ⌋)`.
    pub branching: Option<usize>,
}

impl Default for Params {
    fn default() -> Self {
        Params {
            s: 2,
            v: None,
            w: None,
            eps: 0.5,
            complement: Complement::Auto,
            matrix: MatrixKind::Auto,
            base: BaseKind::Auto,
            select0: true,
            branching: None,
        }
    }
}

impl Params {
    pub fn with_s(mut self, s: usize) -> Self {
        self.s = s;
        self
    }

    pub fn with_v(mut self, v: usize) -> Self {
        self.v = Some(v);
        self
    }

    pub fn with_w(mut self, w: u64) -> Self {
        self.w = Some(w);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.v.is_some_and(|v| v < 2) {
            return Err(Error::InvalidInput("v must be at least 2".into()));
        }
        if self.w.is_some_and(|w| !(2..=1 << 40).contains(&w)) {
            return Err(Error::InvalidInput("w must be in [2, 2^40]".into()));
        }
        if !(self.eps > 0.0 && self.eps <= 1.0) {
            return Err(Error::InvalidInput("eps must be in (0, 1]".into()));
        }
        if self.branching.is_some_and(|b| b < 2) {
            return Err(Error::InvalidInput("branching must be at least 2".into()));
        }
        if self.s > 32 {
            return Err(Error::InvalidInput("s above 32".into()));
        }
        Ok(())
    }
}

fn parse_err(msg: String) -> Error {
    Error::InvalidInput(msg)
}

impl FromStr for Params {
    type Err = Error;

    /// Comma-separated `key=value` pairs, e.g. `s=2,v=4,w=64,complement=off`.
    fn from_str(text: &str) -> Result<Self> {
        let mut p = Params::default();
        for part in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (key, value) = part
                .split_once('=')
                .ok_or_else(|| parse_err(format!("expected key=value, got `{part}`")))?;
            let bad = || parse_err(format!("bad value `{value}` for `{key}`"));
            let auto = value == "auto" || value == "default";
            match key {
                "s" => p.s = value.parse().map_err(|_| bad())?,
                "v" => {
                    p.v = if auto {
                        None
                    } else {
                        Some(value.parse().map_err(|_| bad())?)
                    }
                }
                "w" => {
                    p.w = if auto {
                        None
                    } else {
                        Some(value.parse().map_err(|_| bad())?)
                    }
                }
                "eps" => p.eps = value.parse().map_err(|_| bad())?,
                "b" => {
                    p.branching = if auto {
                        None
                    } else {
                        Some(value.parse().map_err(|_| bad())?)
                    }
                }
                "complement" => {
                    p.complement = match value {
                        "auto" => Complement::Auto,
                        "on" => Complement::On,
                        "off" => Complement::Off,
                        _ => return Err(bad()),
                    }
                }
                "matrix" => {
                    p.matrix = match value {
                        "auto" => MatrixKind::Auto,
                        "dense" => MatrixKind::Dense,
                        "sparse" => MatrixKind::Sparse,
                        _ => return Err(bad()),
                    }
                }
                "base" => {
                    p.base = match value {
                        "auto" => BaseKind::Auto,
                        "dense" => BaseKind::Dense,
                        "sampled" => BaseKind::Sampled,
                        _ => return Err(bad()),
                    }
                }
                "select0" => {
                    p.select0 = match value {
                        "on" | "true" => true,
                        "off" | "false" => false,
                        _ => return Err(bad()),
                    }
                }
                _ => return Err(parse_err(format!("unknown parameter `{key}`"))),
            }
        }
        p.validate()?;
        Ok(p)
    }
}

impl fmt::Display for Params {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let opt = |x: Option<u64>| x.map_or("auto".to_string(), |x| x.to_string());
        let complement = match self.complement {
            Complement::Auto => "auto",
            Complement::On => "on",
            Complement::Off => "off",
        };
        let matrix = match self.matrix {
            MatrixKind::Auto => "auto",
            MatrixKind::Dense => "dense",
            MatrixKind::Sparse => "sparse",
        };
        let base = match self.base {
            BaseKind::Auto => "auto",
            BaseKind::Dense => "dense",
            BaseKind::Sampled => "sampled",
        };
        write!(
            f,
            "s={},v={},w={},eps={},complement={},matrix={},base={},select0={},b={}",
            self.s,
            opt(self.v.map(|v| v as u64)),
            opt(self.w),
            self.eps,
            complement,
            matrix,
            base,
            if self.select0 { "on" } else { "off" },
            opt(self.branching.map(|b| b as u64)),
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct Dual {
    marker: BitVector,
    chain: Chain,
    universe: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RecursiveFid {
    params: Params,
    n: u64,
    m: u64,
    v: usize,
    w: u64,
    complemented: bool,
    main: Chain,
    dual: Option<Dual>,
}

/// Bits used by one level of the main chain.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LevelSpace {
    pub n: usize,
    pub m: u64,
    pub cut: u32,
    pub fat_superblocks: usize,
    pub blocks: usize,
    pub high: u64,
    pub low: u64,
    pub trees: u64,
    pub multirank: u64,
}

/// Exact storage breakdown; `total` equals the serialized payload in bits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpaceReport {
    pub levels: Vec<LevelSpace>,
    pub base: u64,
    pub base_kind: Option<&'static str>,
    pub dual: u64,
    pub complemented: bool,
    pub total: u64,
}

impl SpaceReport {
    pub fn high(&self) -> u64 {
        self.levels.iter().map(|l| l.high).sum()
    }

    pub fn low(&self) -> u64 {
        self.levels.iter().map(|l| l.low).sum()
    }

    pub fn trees(&self) -> u64 {
        self.levels.iter().map(|l| l.trees).sum()
    }

    pub fn multirank(&self) -> u64 {
        self.levels.iter().map(|l| l.multirank).sum()
    }
}

impl RecursiveFid {
    /// Builds over the strictly increasing `values`, all `< m`.
    pub fn build(values: &[u64], m: u64, params: Params) -> Result<Self> {
        params.validate()?;
        if m == 0 {
            return Err(Error::InvalidInput("universe must be at least 1".into()));
        }
        check_sorted(values, m, true)?;
        let n = values.len() as u64;
        let complemented = match params.complement {
            Complement::On => true,
            Complement::Off => false,
            Complement::Auto => 2 * n > m,
        };
        let stored: Vec<u64> = if complemented {
            let mut out = Vec::with_capacity((m - n) as usize);
            let mut it = values.iter().peekable();
            for x in 0..m {
                if it.peek() == Some(&&x) {
                    it.next();
                } else {
                    out.push(x);
                }
            }
            out
        } else {
            values.to_vec()
        };
        let ns = stored.len() as u64;
        let width = ceil_log2(m) as usize;
        let v = params.v.unwrap_or((width * width).max(2));
        let w = params.w.unwrap_or(ns.clamp(2, 1 << 40));
        let shape = ChainShape {
            s: params.s,
            v,
            cut: ceil_log2(w),
            branching: params.branching,
            matrix: params.matrix,
            base: params.base,
            eps: params.eps,
        };
        let dual = if params.select0 || complemented {
            let duals: Vec<u64> = stored
                .iter()
                .enumerate()
                .map(|(r, &x)| x - r as u64)
                .collect();
            let (marker, yprime) = run_last(&duals);
            let universe = m - ns + 1;
            let chain = Chain::build(yprime, universe, &shape, false, false)?;
            Some(Dual {
                marker,
                chain,
                universe,
            })
        } else {
            None
        };
        let main = Chain::build(stored, m, &shape, true, true)?;
        Ok(RecursiveFid {
            params,
            n,
            m,
            v,
            w,
            complemented,
            main,
            dual,
        })
    }

    pub fn params(&self) -> &Params {
        &self.params
    }

    /// Universe size.
    pub fn len(&self) -> u64 {
        self.m
    }

    pub fn is_empty(&self) -> bool {
        self.m == 0
    }

    /// Number of ones (elements of the original set).
    pub fn count_ones(&self) -> u64 {
        self.n
    }

    pub fn count(&self, value: bool) -> u64 {
        if value {
            self.n
        } else {
            self.m - self.n
        }
    }

    pub fn is_complemented(&self) -> bool {
        self.complemented
    }

    /// Block size in use.
    pub fn block_size(&self) -> usize {
        self.v
    }

    /// Universe divisor in use.
    pub fn divisor(&self) -> u64 {
        self.w
    }

    /// Number of levels built in the main chain.
    pub fn depth(&self) -> usize {
        self.main.levels().len()
    }

    /// `(n_i, m_i)` of every main-chain level.
    pub fn level_sizes(&self) -> Vec<(usize, u64)> {
        self.main.levels().iter().map(|l| (l.n(), l.m())).collect()
    }

    fn stored_count(&self) -> u64 {
        if self.complemented {
            self.m - self.n
        } else {
            self.n
        }
    }

    fn rank1_stored(&self, i: u64) -> u64 {
        if i == 0 {
            0
        } else {
            self.main.count_le(i - 1, None) as u64
        }
    }

    fn select1_stored(&self, k: u64) -> u64 {
        self.main.select1(k as usize, None)
    }

    fn select0_stored(&self, k: u64) -> Result<u64> {
        let dual = self
            .dual
            .as_ref()
            .ok_or(Error::Unsupported("select0 support was not built"))?;
        let zeros = self.m - self.stored_count();
        select0_via_dual(k, &DualPred { fid: self, dual }, &dual.marker, zeros)
    }

    /// Occurrences of `value` at positions `< i`, `i ≤ m`.
    pub fn rank(&self, value: bool, i: u64) -> Result<u64> {
        if i > self.m {
            return Err(out_of_range(i, self.m + 1));
        }
        Ok(self.rank_unchecked(value, i))
    }

    fn rank_unchecked(&self, value: bool, i: u64) -> u64 {
        let r = self.rank1_stored(i);
        let ones = if self.complemented { i - r } else { r };
        if value {
            ones
        } else {
            i - ones
        }
    }

    /// Position of the `k`-th occurrence of `value`, `k` 1-based.
    pub fn select(&self, value: bool, k: u64) -> Result<u64> {
        let total = self.count(value);
        if k == 0 || k > total {
            return Err(not_found(k, total));
        }
        if value != self.complemented {
            Ok(self.select1_stored(k))
        } else {
            self.select0_stored(k)
        }
    }

    pub fn access(&self, i: u64) -> Result<bool> {
        if i >= self.m {
            return Err(out_of_range(i, self.m));
        }
        Ok(self.rank_unchecked(true, i + 1) != self.rank_unchecked(true, i))
    }

    /// Elements `≤ q` and the largest of them.
    pub fn pred(&self, q: u64) -> Result<(u64, Option<u64>)> {
        pred_from_fid(self, q)
    }

    pub fn space_report(&self) -> SpaceReport {
        let levels: Vec<LevelSpace> = self
            .main
            .levels()
            .iter()
            .map(|l| LevelSpace {
                n: l.n(),
                m: l.m(),
                cut: l.cut(),
                fat_superblocks: l.fat_superblocks(),
                blocks: l.blocks(),
                high: l.high_space(),
                low: l.low_space(),
                trees: l.tree_space(),
                multirank: l.multirank_space(),
            })
            .collect();
        let base = self.main.base().map_or(0, |b| b.space_bits());
        let dual = self
            .dual
            .as_ref()
            .map_or(0, |d| d.marker.space_bits() + d.chain.space_bits());
        let total = levels
            .iter()
            .map(|l| l.high + l.low + l.trees + l.multirank)
            .sum::<u64>()
            + base
            + dual;
        SpaceReport {
            levels,
            base,
            base_kind: self.main.base().map(|b| b.kind()),
            dual,
            complemented: self.complemented,
            total,
        }
    }
}

/// Counting on the deduplicated dual sequence, with first-level keys
/// recomputed from the main chain: the `p`-th kept value is `x_j − j` for
/// `j` the position of the `p`-th marker one.
struct DualPred<'a> {
    fid: &'a RecursiveFid,
    dual: &'a Dual,
}

impl PredCount for DualPred<'_> {
    fn count_le(&self, q: u64) -> usize {
        if q >= self.dual.universe {
            return self.dual.marker.count_ones();
        }
        let key = |p: usize| {
            let j = self.dual.marker.select1(p + 1);
            self.fid.select1_stored(j as u64 + 1) - j as u64
        };
        self.dual.chain.count_le(q, Some(&key))
    }
}

impl Fid for RecursiveFid {
    fn universe(&self) -> u64 {
        self.m
    }

    fn count_ones(&self) -> u64 {
        self.n
    }

    fn rank1(&self, i: u64) -> u64 {
        self.rank_unchecked(true, i)
    }

    fn select1(&self, k: u64) -> u64 {
        self.select(true, k).expect("select1 within range")
    }
}

fn write_opt(w: &mut Writer, x: Option<u64>) {
    match x {
        Some(x) => {
            w.u8(1);
            w.u64(x);
        }
        None => w.u8(0),
    }
}

fn read_opt(r: &mut Reader<'_>) -> Result<Option<u64>> {
    Ok(if r.bool()? { Some(r.u64()?) } else { None })
}

impl Persist for RecursiveFid {
    const TAG: Tag = Tag::RecursiveFid;

    fn write_payload(&self, w: &mut Writer) {
        let p = &self.params;
        w.u64(p.s as u64);
        write_opt(w, p.v.map(|v| v as u64));
        write_opt(w, p.w);
        w.f64(p.eps);
        w.u8(p.complement as u8);
        w.u8(p.matrix as u8);
        w.u8(p.base as u8);
        w.u8(p.select0 as u8);
        write_opt(w, p.branching.map(|b| b as u64));
        w.u64(self.n);
        w.u64(self.m);
        w.u64(self.v as u64);
        w.u64(self.w);
        w.u8(self.complemented as u8);
        self.main.write(w);
        match &self.dual {
            Some(d) => {
                w.u8(1);
                w.u64(d.universe);
                d.marker.write(w);
                d.chain.write(w);
            }
            None => w.u8(0),
        }
    }

    fn read_payload(r: &mut Reader<'_>) -> Result<Self> {
        let bad = |what: &str| Error::Format(format!("bad {what}"));
        let s = r.usize()?;
        let v = read_opt(r)?.map(|v| v as usize);
        let w = read_opt(r)?;
        let eps = r.f64()?;
        let complement = match r.u8()? {
            0 => Complement::Auto,
            1 => Complement::On,
            2 => Complement::Off,
            _ => return Err(bad("complement mode")),
        };
        let matrix = match r.u8()? {
            0 => MatrixKind::Auto,
            1 => MatrixKind::Dense,
            2 => MatrixKind::Sparse,
            _ => return Err(bad("matrix kind")),
        };
        let base = match r.u8()? {
            0 => BaseKind::Auto,
            1 => BaseKind::Dense,
            2 => BaseKind::Sampled,
            _ => return Err(bad("base kind")),
        };
        let select0 = r.bool()?;
        let branching = read_opt(r)?.map(|b| b as usize);
        let params = Params {
            s,
            v,
            w,
            eps,
            complement,
            matrix,
            base,
            select0,
            branching,
        };
        params
            .validate()
            .map_err(|e| Error::Format(e.to_string()))?;
        let n = r.u64()?;
        let m = r.u64()?;
        let v = r.usize()?;
        let w = r.u64()?;
        let complemented = r.bool()?;
        let main = Chain::read(r)?;
        let dual = if r.bool()? {
            let universe = r.u64()?;
            let marker = BitVector::read(r)?;
            let chain = Chain::read(r)?;
            Some(Dual {
                marker,
                chain,
                universe,
            })
        } else {
            None
        };
        if n > m || m == 0 || (complemented && dual.is_none()) {
            return Err(bad("dictionary header"));
        }
        Ok(RecursiveFid {
            params,
            n,
            m,
            v,
            w,
            complemented,
            main,
            dual,
        })
    }
}

#[cfg(test)]
mod tests;
