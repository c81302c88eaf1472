//! Succinct string B-tree over integer keys with Patricia-trie nodes.
//!
//! Each node is a compact binary trie over at most `b` keys, stored without
//! pointers: the preorder topology (1 = internal node, 0 = leaf, `2p − 1`
//! bits) followed by the skip value of every internal node in preorder, each
//! in `⌈log₂(key_width + 1)⌉` bits. A skip value is the bit depth, counted
//! from the most significant of `key_width` bits, at which the node's
//! subtrees separate. Keys themselves stay in an external sorted array and
//! are never copied.
//!
//! Predecessor search in a node has two stages. The blind descent follows the
//! query's bits at the skip depths only and lands on the key sharing the
//! longest common prefix with the query. One comparison against that key
//! gives the LCP length `l`; descending again while skips are `< l` reaches
//! the subtree where the query branches off, and the query's bit at depth
//! `l` says whether the answer is just before or just after that subtree.
//!
//! A block of `p` keys is a B-tree of such nodes: level 0 groups consecutive
//! runs of `b` keys, level `L` indexes every `b^L`-th key.

use std::collections::HashMap;

use crate::bits::{bit_len, ceil_log2, get_bits, BitArray};
use crate::error::{Error, Result};
use crate::probe;
use crate::serial::{Persist, Reader, Tag, Writer};

/// Default branching factor `max(2, ⌊√key_width⌋)`.
pub fn default_branching(key_width: u32) -> usize {
    ((key_width as f64).sqrt().floor() as usize).max(2)
}

/// Bits used by the skip value of one internal node.
pub fn skip_width(key_width: u32) -> u32 {
    ceil_log2(key_width as u64 + 1)
}

/// Encoded size of a trie over `p` keys. Single-key tries are implicit.
pub fn trie_bits(p: usize, skip_width: u32) -> usize {
    if p <= 1 {
        0
    } else {
        (2 * p - 1) + (p - 1) * skip_width as usize
    }
}

#[inline]
fn bit_at(q: u64, depth: u32, key_width: u32) -> bool {
    (q >> (key_width - 1 - depth)) & 1 == 1
}

#[inline]
fn lcp(a: u64, b: u64, key_width: u32) -> u32 {
    let x = a ^ b;
    if x == 0 {
        key_width
    } else {
        key_width - bit_len(x)
    }
}

/// Borrowed view of one encoded trie inside an arena.
#[derive(Clone, Copy)]
struct TrieRef<'a> {
    words: &'a [u64],
    start: usize,
    p: usize,
    skip_width: u32,
    key_width: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
struct Cursor {
    node: u32,
    internal: u32,
    leaf: u32,
}

impl<'a> TrieRef<'a> {
    #[inline]
    fn is_internal(&self, node: u32) -> bool {
        let pos = self.start + node as usize;
        (self.words[pos / 64] >> (pos % 64)) & 1 == 1
    }

    #[inline]
    fn skip(&self, internal: u32) -> u32 {
        let pos = self.start + (2 * self.p - 1) + internal as usize * self.skip_width as usize;
        get_bits(self.words, pos, self.skip_width) as u32
    }

    /// Leaves and internal nodes in the subtree rooted at `node`.
    fn subtree_size(&self, node: u32) -> (u32, u32) {
        let (mut leaves, mut internals) = (0, 0);
        let mut pending = 1;
        let mut t = node;
        while pending > 0 {
            pending -= 1;
            if self.is_internal(t) {
                internals += 1;
                pending += 2;
            } else {
                leaves += 1;
            }
            t += 1;
        }
        (leaves, internals)
    }

    #[inline]
    fn step(&self, c: Cursor, right: bool) -> Cursor {
        if !right {
            Cursor {
                node: c.node + 1,
                internal: c.internal + 1,
                leaf: c.leaf,
            }
        } else {
            let (l, i) = self.subtree_size(c.node + 1);
            Cursor {
                node: c.node + 1 + l + i,
                internal: c.internal + 1 + i,
                leaf: c.leaf + l,
            }
        }
    }

    const ROOT: Cursor = Cursor {
        node: 0,
        internal: 0,
        leaf: 0,
    };

    fn blind_descend(&self, q: u64) -> usize {
        if self.p <= 1 {
            return 0;
        }
        let mut c = Self::ROOT;
        while self.is_internal(c.node) {
            let d = self.skip(c.internal);
            c = self.step(c, bit_at(q, d, self.key_width));
        }
        c.leaf as usize
    }

    fn count_le(&self, q: u64, strict: bool, key: &impl Fn(usize) -> u64) -> usize {
        if self.p == 0 {
            return 0;
        }
        let leaf = self.blind_descend(q);
        let x = key(leaf);
        if x == q {
            return if strict { leaf } else { leaf + 1 };
        }
        let l = lcp(q, x, self.key_width);
        let mut c = Self::ROOT;
        if self.p > 1 {
            while self.is_internal(c.node) {
                let d = self.skip(c.internal);
                if d >= l {
                    debug_assert!(d > l, "blind descent did not reach a longest-prefix key");
                    break;
                }
                c = self.step(c, bit_at(q, d, self.key_width));
            }
        }
        if bit_at(q, l, self.key_width) {
            let leaves = if self.p > 1 {
                self.subtree_size(c.node).0
            } else {
                1
            };
            (c.leaf + leaves) as usize
        } else {
            c.leaf as usize
        }
    }

    fn probe_cost(&self) -> u64 {
        trie_bits(self.p, self.skip_width).div_ceil(64) as u64
    }
}

/// Appends the encoding of the trie over sorted distinct `keys` to `arena`.
fn encode_trie(keys: &[u64], key_width: u32, arena: &mut BitArray) {
    if keys.len() <= 1 {
        return;
    }
    let sw = skip_width(key_width);
    let mut topo = BitArray::default();
    let mut skips = Vec::with_capacity(keys.len() - 1);
    fn rec(keys: &[u64], w: u32, topo: &mut BitArray, skips: &mut Vec<u64>) {
        if keys.len() == 1 {
            topo.push(false);
            return;
        }
        let d = lcp(keys[0], keys[keys.len() - 1], w);
        let split = keys.partition_point(|&k| !bit_at(k, d, w));
        topo.push(true);
        skips.push(d as u64);
        rec(&keys[..split], w, topo, skips);
        rec(&keys[split..], w, topo, skips);
    }
    rec(keys, key_width, &mut topo, &mut skips);
    for b in topo.iter() {
        arena.push(b);
    }
    for s in skips {
        arena.push_bits(s, sw);
    }
}

fn validate_keys(keys: &[u64], key_width: u32) -> Result<()> {
    if key_width > 64 {
        return Err(Error::InvalidInput("key width above 64".into()));
    }
    for (i, w) in keys.windows(2).enumerate() {
        if w[0] >= w[1] {
            return Err(Error::InvalidInput(format!(
                "keys not strictly increasing at index {}",
                i + 1
            )));
        }
    }
    if key_width < 64 {
        if let Some(&k) = keys.last() {
            if k >> key_width != 0 {
                return Err(Error::InvalidInput(format!(
                    "key {k} wider than {key_width} bits"
                )));
            }
        }
    }
    Ok(())
}

/// A standalone compact trie over one node's keys.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PatriciaTrie {
    key_count: usize,
    key_width: u32,
    arena: BitArray,
}

impl PatriciaTrie {
    pub fn build(keys: &[u64], key_width: u32) -> Result<Self> {
        if keys.is_empty() {
            return Err(Error::InvalidInput("trie needs at least one key".into()));
        }
        validate_keys(keys, key_width)?;
        let mut arena = BitArray::default();
        encode_trie(keys, key_width, &mut arena);
        Ok(PatriciaTrie {
            key_count: keys.len(),
            key_width,
            arena,
        })
    }

    fn view(&self) -> TrieRef<'_> {
        TrieRef {
            words: self.arena.words(),
            start: 0,
            p: self.key_count,
            skip_width: skip_width(self.key_width),
            key_width: self.key_width,
        }
    }

    pub fn key_count(&self) -> usize {
        self.key_count
    }

    pub fn key_width(&self) -> u32 {
        self.key_width
    }

    /// Preorder topology, `1` for internal nodes.
    pub fn topology(&self) -> Vec<bool> {
        let n = if self.key_count > 1 {
            2 * self.key_count - 1
        } else {
            1
        };
        if self.key_count == 1 {
            return vec![false];
        }
        (0..n).map(|i| self.arena.get(i)).collect()
    }

    /// Skip values of the internal nodes in preorder.
    pub fn skips(&self) -> Vec<u32> {
        let v = self.view();
        (0..self.key_count.saturating_sub(1) as u32)
            .map(|i| v.skip(i))
            .collect()
    }

    /// Leaf reached by following the query's bits at the skip depths.
    pub fn blind_descend(&self, q: u64) -> usize {
        self.view().blind_descend(q)
    }

    /// Keys `≤ q` (`< q` when `strict`); `keys` is the sorted array the trie was built on.
    pub fn count_le(&self, keys: &[u64], q: u64, strict: bool) -> usize {
        debug_assert_eq!(keys.len(), self.key_count);
        self.view().count_le(q, strict, &|i| keys[i])
    }

    /// Descent memoized per (node, query chunk); must agree with [`Self::blind_descend`].
    pub fn blind_descend_cached(&self, q: u64, cache: &mut DescentCache) -> usize {
        let v = self.view();
        if self.key_count <= 1 {
            return 0;
        }
        let desc = self.descriptor();
        let chunk = cache.chunk_bits.max(1);
        let mut c = TrieRef::ROOT;
        while v.is_internal(c.node) {
            let ci = v.skip(c.internal) / chunk;
            let lo = ci * chunk;
            let width = chunk.min(self.key_width - lo);
            let qchunk = (q >> (self.key_width - lo - width)) & crate::bits::low_mask(width);
            let key = (desc, c.node, ci, qchunk);
            if let Some(&next) = cache.map.get(&key) {
                cache.hits += 1;
                c = next;
                continue;
            }
            cache.misses += 1;
            let from = c;
            while v.is_internal(c.node) {
                let d = v.skip(c.internal);
                if d / chunk != ci {
                    break;
                }
                c = v.step(c, bit_at(q, d, self.key_width));
            }
            if cache.map.len() < cache.capacity {
                cache.map.insert((desc, from.node, ci, qchunk), c);
            }
        }
        c.leaf as usize
    }

    fn descriptor(&self) -> u64 {
        let mut h = 0xcbf2_9ce4_8422_2325u64 ^ self.key_count as u64;
        for &w in self.arena.words() {
            h = (h ^ w).wrapping_mul(0x0000_0100_0000_01b3).rotate_left(29);
        }
        h
    }

    /// Index bits: topology plus skip values, pad bits excluded.
    pub fn index_bits(&self) -> u64 {
        trie_bits(self.key_count, skip_width(self.key_width)) as u64
    }
}

impl Persist for PatriciaTrie {
    const TAG: Tag = Tag::PatriciaTrie;

    fn write_payload(&self, w: &mut Writer) {
        w.u64(self.key_count as u64);
        w.u32(self.key_width);
        self.arena.write(w);
    }

    fn read_payload(r: &mut Reader<'_>) -> Result<Self> {
        let key_count = r.usize()?;
        let key_width = r.u32()?;
        let arena = BitArray::read(r)?;
        if key_count == 0 || arena.len() != trie_bits(key_count, skip_width(key_width)) {
            return Err(Error::Format("trie size mismatch".into()));
        }
        Ok(PatriciaTrie {
            key_count,
            key_width,
            arena,
        })
    }
}

/// Memo table standing in for the shared precomputed descent table.
#[derive(Debug, Default)]
pub struct DescentCache {
    chunk_bits: u32,
    capacity: usize,
    map: HashMap<(u64, u32, u32, u64), Cursor>,
    pub hits: u64,
    pub misses: u64,
}

const CACHE_ENTRY_BYTES: usize = 40;

impl DescentCache {
    /// Cache holding at most `budget_bytes` worth of entries, chunking queries in
    /// `chunk_bits`-bit pieces (capped at 16).
    pub fn new(budget_bytes: usize, chunk_bits: u32) -> Self {
        DescentCache {
            chunk_bits: chunk_bits.clamp(1, 16),
            capacity: budget_bytes / CACHE_ENTRY_BYTES,
            ..Default::default()
        }
    }

    /// Chunk size `⌊γ·key_width⌋` bits, at most 16.
    pub fn chunk_for(key_width: u32, gamma: f64) -> u32 {
        ((gamma * key_width as f64).floor() as u32).clamp(1, 16)
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }
}

/// Lays out the B-tree of one block and answers its queries.
#[derive(Debug, Clone, Copy)]
pub(crate) struct BlockShape {
    pub count: usize,
    pub b: usize,
    pub skip_width: u32,
    pub key_width: u32,
}

impl BlockShape {
    pub fn new(count: usize, b: usize, key_width: u32) -> Self {
        BlockShape {
            count,
            b,
            skip_width: skip_width(key_width),
            key_width,
        }
    }

    /// Number of levels: smallest `h ≥ 1` with `b^h ≥ count`.
    pub fn height(&self) -> usize {
        let mut h = 1;
        let mut cap = self.b;
        while cap < self.count {
            cap = cap.saturating_mul(self.b);
            h += 1;
        }
        h
    }

    // stride of level L and number of items there
    fn level_items(&self, level: usize) -> (usize, usize) {
        let stride = self.b.pow(level as u32);
        (stride, self.count.div_ceil(stride))
    }

    /// Bits of every trie of the block, levels laid out top-down.
    pub fn total_bits(&self) -> usize {
        (0..self.height()).map(|l| self.level_bits(l)).sum()
    }

    fn level_bits(&self, level: usize) -> usize {
        let (_, items) = self.level_items(level);
        let full = items / self.b;
        let rest = items % self.b;
        full * trie_bits(self.b, self.skip_width) + trie_bits(rest, self.skip_width)
    }

    pub fn build(&self, keys: &[u64], arena: &mut BitArray) {
        debug_assert_eq!(keys.len(), self.count);
        for level in (0..self.height()).rev() {
            let (stride, items) = self.level_items(level);
            let seps: Vec<u64> = (0..items).map(|i| keys[i * stride]).collect();
            for group in seps.chunks(self.b) {
                encode_trie(group, self.key_width, arena);
            }
        }
    }

    /// Keys `≤ q` (`< q` when `strict`) in the block; `key(i)` reads the block's `i`-th key.
    pub fn count_le(
        &self,
        words: &[u64],
        start: usize,
        q: u64,
        strict: bool,
        key: impl Fn(usize) -> u64,
    ) -> usize {
        if self.count == 0 {
            return 0;
        }
        let h = self.height();
        let mut level_start = start;
        let mut node = 0usize;
        for level in (0..h).rev() {
            let (stride, items) = self.level_items(level);
            let entries = self.b.min(items - node * self.b);
            let trie = TrieRef {
                words,
                start: level_start + node * trie_bits(self.b, self.skip_width),
                p: entries,
                skip_width: self.skip_width,
                key_width: self.key_width,
            };
            probe::hit(trie.probe_cost());
            let base = node * self.b;
            let keyed = |i: usize| {
                probe::hit(1);
                key((base + i) * stride)
            };
            let c = trie.count_le(q, strict && level == 0, &keyed);
            if level == 0 {
                return base + c;
            }
            if c == 0 {
                return 0;
            }
            level_start += self.level_bits(level);
            node = base + c - 1;
        }
        unreachable!()
    }
}

/// Predecessor index for one block of an external key array.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockPred {
    offset: usize,
    count: usize,
    b: usize,
    key_width: u32,
    arena: BitArray,
}

impl BlockPred {
    /// Indexes `keys[offset..offset + count]` (sorted, distinct, `< 2^key_width`).
    pub fn build(
        keys: &[u64],
        offset: usize,
        count: usize,
        key_width: u32,
        b: Option<usize>,
    ) -> Result<Self> {
        let slice = keys
            .get(offset..offset + count)
            .ok_or_else(|| Error::InvalidInput("block outside key array".into()))?;
        validate_keys(slice, key_width)?;
        let b = b.unwrap_or_else(|| default_branching(key_width));
        if b < 2 {
            return Err(Error::InvalidInput("branching factor below 2".into()));
        }
        let shape = BlockShape::new(count, b, key_width);
        let mut arena = BitArray::default();
        shape.build(slice, &mut arena);
        debug_assert_eq!(arena.len(), shape.total_bits());
        Ok(BlockPred {
            offset,
            count,
            b,
            key_width,
            arena,
        })
    }

    fn shape(&self) -> BlockShape {
        BlockShape::new(self.count, self.b, self.key_width)
    }

    pub fn height(&self) -> usize {
        self.shape().height()
    }

    pub fn branching(&self) -> usize {
        self.b
    }

    /// Keys of the block `≤ q` (`< q` when `strict`).
    pub fn count_le(&self, keys: &[u64], q: u64, strict: bool) -> usize {
        self.shape()
            .count_le(self.arena.words(), 0, q, strict, |i| keys[self.offset + i])
    }

    /// Index bits beyond the keys (topologies and skips).
    pub fn index_bits(&self) -> u64 {
        self.arena.len() as u64
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reforacle::o_lcp;

    #[test]
    fn trie_shape_for_three_keys() {
        let t = PatriciaTrie::build(&[2, 6, 7], 3).unwrap();
        assert_eq!(t.topology(), vec![true, false, true, false, false]);
        assert_eq!(t.skips(), vec![0, 2]);
        assert_eq!(t.blind_descend(3), 0);
        assert_eq!(t.blind_descend(6), 1);
        assert_eq!(t.count_le(&[2, 6, 7], 3, false), 1);
        assert_eq!(t.count_le(&[2, 6, 7], 1, false), 0);
        assert_eq!(t.count_le(&[2, 6, 7], 6, true), 1);
        assert_eq!(t.count_le(&[2, 6, 7], 6, false), 2);
        assert_eq!(t.count_le(&[2, 6, 7], 5, false), 1);
    }

    #[test]
    fn trivial_tries() {
        let t = PatriciaTrie::build(&[5], 3).unwrap();
        assert_eq!(t.topology(), vec![false]);
        assert!(t.skips().is_empty());
        assert_eq!(t.count_le(&[5], 4, false), 0);
        assert_eq!(t.count_le(&[5], 5, false), 1);
        assert_eq!(t.count_le(&[5], 5, true), 0);
        let t = PatriciaTrie::build(&[0, 1], 1).unwrap();
        assert_eq!(t.skips(), vec![0]);
        assert!(PatriciaTrie::build(&[], 3).is_err());
        assert!(PatriciaTrie::build(&[3, 3], 3).is_err());
        assert!(PatriciaTrie::build(&[8], 3).is_err());
    }

    #[test]
    fn exhaustive_width_five() {
        let w = 5;
        // every subset of size ≤ 6 would be large; sweep sets given by bit masks over strided patterns
        for mask in 1u64..(1 << 12) {
            let keys: Vec<u64> = (0..12u64)
                .filter(|i| (mask >> i) & 1 == 1)
                .map(|i| (i * 11) % 32)
                .collect::<std::collections::BTreeSet<_>>()
                .into_iter()
                .collect();
            let t = PatriciaTrie::build(&keys, w).unwrap();
            for q in 0..32 {
                let leaf = t.blind_descend(q);
                let best = keys.iter().map(|&k| o_lcp(q, k, w)).max().unwrap();
                assert_eq!(o_lcp(q, keys[leaf], w), best);
                for strict in [false, true] {
                    let expect = keys
                        .iter()
                        .filter(|&&k| k < q || (!strict && k == q))
                        .count();
                    assert_eq!(t.count_le(&keys, q, strict), expect);
                }
            }
        }
    }

    #[test]
    fn block_btree_heights_and_answers() {
        let keys: Vec<u64> = (0..40u64).map(|i| i * 37 + (i % 3)).collect();
        for b in [2usize, 3, 4, 7] {
            for (off, cnt) in [(0, 1), (3, 4), (0, 9), (5, 27), (0, 40)] {
                let bp = BlockPred::build(&keys, off, cnt, 11, Some(b)).unwrap();
                let block = &keys[off..off + cnt];
                if cnt <= b * b {
                    assert!(bp.height() <= 2);
                }
                for q in 0..(1u64 << 11) {
                    for strict in [false, true] {
                        let expect = block
                            .iter()
                            .filter(|&&k| k < q || (!strict && k == q))
                            .count();
                        assert_eq!(
                            bp.count_le(&keys, q, strict),
                            expect,
                            "b={b} off={off} cnt={cnt} q={q}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn cached_descent_agrees() {
        let keys: Vec<u64> = vec![3, 100, 101, 2000, 40000, 40001, 65000];
        let t = PatriciaTrie::build(&keys, 16).unwrap();
        let mut cache = DescentCache::new(1 << 16, DescentCache::chunk_for(16, 0.25));
        for q in (0..65536u64).step_by(97) {
            assert_eq!(t.blind_descend_cached(q, &mut cache), t.blind_descend(q));
        }
        assert!(cache.hits > 0);
        let mut off = DescentCache::new(0, 4);
        assert_eq!(
            t.blind_descend_cached(40000, &mut off),
            t.blind_descend(40000)
        );
        assert!(off.is_empty());
    }

    #[test]
    fn index_space_bound() {
        for w in [4u32, 16, 40, 64] {
            let keys: Vec<u64> = (0..8u64).map(|i| i << (w - 3).min(60)).collect();
            let t = PatriciaTrie::build(&keys, w).unwrap();
            let p = keys.len() as u64;
            assert!(t.index_bits() <= 2 * p * (2 + ceil_log2(w as u64 + 1) as u64));
        }
    }
}
