//! Brute-force reference answers, computed by linear scans.
//!
//! Nothing here shares code with the indexed structures; these functions are
//! the ground truth that every property test compares against.

/// A set of distinct values in `[0, m)`, kept sorted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExplicitSet {
    pub m: u64,
    pub values: Vec<u64>,
}

impl ExplicitSet {
    /// Panics if the values are unsorted, repeated or out of range.
    pub fn new(m: u64, values: Vec<u64>) -> Self {
        for w in values.windows(2) {
            assert!(w[0] < w[1], "values must be strictly increasing");
        }
        if let Some(&last) = values.last() {
            assert!(last < m, "value out of universe");
        }
        ExplicitSet { m, values }
    }

    /// Characteristic bitstring of length `m`.
    pub fn bits(&self) -> Vec<bool> {
        let mut b = vec![false; self.m as usize];
        for &x in &self.values {
            b[x as usize] = true;
        }
        b
    }
}

pub fn rank_bits(bits: &[bool], val: bool, i: usize) -> usize {
    bits[..i].iter().filter(|&&b| b == val).count()
}

/// 0-based position of the `k`-th (1-based) occurrence of `val`.
pub fn select_bits(bits: &[bool], val: bool, k: usize) -> Option<usize> {
    if k == 0 {
        return None;
    }
    let mut seen = 0;
    for (p, &b) in bits.iter().enumerate() {
        if b == val {
            seen += 1;
            if seen == k {
                return Some(p);
            }
        }
    }
    None
}

/// Rank over the set's characteristic string: positions `< i` holding `val`.
pub fn o_rank(set: &ExplicitSet, val: bool, i: u64) -> u64 {
    let ones = set.values.iter().filter(|&&x| x < i).count() as u64;
    if val {
        ones
    } else {
        i - ones
    }
}

pub fn o_select(set: &ExplicitSet, val: bool, k: u64) -> Option<u64> {
    if k == 0 {
        return None;
    }
    if val {
        return set.values.get(k as usize - 1).copied();
    }
    let mut seen = 0;
    for p in 0..set.m {
        if !set.values.contains(&p) {
            seen += 1;
            if seen == k {
                return Some(p);
            }
        }
    }
    None
}

/// `(j, value)`: `j` elements are `≤ q` (or `< q` when `strict`), `value` the largest of them.
pub fn o_pred(set: &ExplicitSet, q: u64, strict: bool) -> (u64, Option<u64>) {
    let mut j = 0;
    let mut best = None;
    for &x in &set.values {
        if x < q || (!strict && x == q) {
            j += 1;
            best = Some(x);
        }
    }
    (j, best)
}

/// Elements of `sequences[i]` that are `≤ q`.
pub fn o_multirank(sequences: &[Vec<u64>], i: usize, q: u64) -> u64 {
    sequences[i].iter().filter(|&&a| a <= q).count() as u64
}

/// Longest common prefix of two `width`-bit strings, most significant bit first.
pub fn o_lcp(a: u64, b: u64, width: u32) -> u32 {
    let mut l = 0;
    while l < width {
        let bit = width - 1 - l;
        if (a >> bit) & 1 != (b >> bit) & 1 {
            break;
        }
        l += 1;
    }
    l
}

/// Answers precomputed by one linear scan, for large randomized sweeps where
/// scanning per query would be too slow.
#[derive(Debug, Clone)]
pub struct ScanTables {
    pub m: u64,
    rank1: Vec<u32>,
    ones: Vec<u64>,
    zeros: Vec<u64>,
}

impl ScanTables {
    pub fn new(set: &ExplicitSet) -> Self {
        let bits = set.bits();
        let mut rank1 = Vec::with_capacity(bits.len() + 1);
        let mut ones = Vec::new();
        let mut zeros = Vec::new();
        let mut r = 0u32;
        for (p, &b) in bits.iter().enumerate() {
            rank1.push(r);
            if b {
                r += 1;
                ones.push(p as u64);
            } else {
                zeros.push(p as u64);
            }
        }
        rank1.push(r);
        ScanTables {
            m: set.m,
            rank1,
            ones,
            zeros,
        }
    }

    pub fn rank(&self, val: bool, i: u64) -> u64 {
        let r = self.rank1[i as usize] as u64;
        if val {
            r
        } else {
            i - r
        }
    }

    pub fn select(&self, val: bool, k: u64) -> Option<u64> {
        let v = if val { &self.ones } else { &self.zeros };
        k.checked_sub(1).and_then(|k| v.get(k as usize).copied())
    }

    pub fn pred(&self, q: u64) -> (u64, Option<u64>) {
        let j = self.rank1[q as usize + 1] as u64;
        (j, j.checked_sub(1).map(|j| self.ones[j as usize]))
    }

    pub fn count(&self, val: bool) -> u64 {
        if val {
            self.ones.len() as u64
        } else {
            self.zeros.len() as u64
        }
    }
}

/// Answers by binary search over the sorted values; memory stays `O(n)` for
/// large universes. `select0` bisects positions on `rank0`.
#[derive(Debug, Clone)]
pub struct SortedOracle {
    pub m: u64,
    values: Vec<u64>,
}

impl SortedOracle {
    pub fn new(set: &ExplicitSet) -> Self {
        SortedOracle {
            m: set.m,
            values: set.values.clone(),
        }
    }

    pub fn rank(&self, val: bool, i: u64) -> u64 {
        let r = self.values.partition_point(|&x| x < i) as u64;
        if val {
            r
        } else {
            i - r
        }
    }

    pub fn select(&self, val: bool, k: u64) -> Option<u64> {
        if k == 0 || k > self.count(val) {
            return None;
        }
        if val {
            return Some(self.values[k as usize - 1]);
        }
        // smallest p with rank0(p + 1) >= k
        let (mut lo, mut hi) = (0u64, self.m - 1);
        while lo < hi {
            let mid = lo + (hi - lo) / 2;
            if self.rank(false, mid + 1) >= k {
                hi = mid;
            } else {
                lo = mid + 1;
            }
        }
        Some(lo)
    }

    pub fn pred(&self, q: u64) -> (u64, Option<u64>) {
        let j = self.values.partition_point(|&x| x <= q);
        (j as u64, j.checked_sub(1).map(|j| self.values[j]))
    }

    pub fn count(&self, val: bool) -> u64 {
        if val {
            self.values.len() as u64
        } else {
            self.m - self.values.len() as u64
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pred_examples() {
        let x = ExplicitSet::new(16, vec![3, 5, 9, 14]);
        assert_eq!(o_pred(&x, 9, false), (3, Some(9)));
        assert_eq!(o_pred(&x, 2, false), (0, None));
        assert_eq!(o_pred(&x, 9, true), (2, Some(5)));
    }

    #[test]
    fn lcp_examples() {
        assert_eq!(o_lcp(0b011, 0b010, 3), 2);
        assert_eq!(o_lcp(0b101, 0b101, 3), 3);
        assert_eq!(o_lcp(0b100, 0b011, 3), 0);
    }

    #[test]
    fn rank_identity_and_tables() {
        let x = ExplicitSet::new(16, vec![3, 5, 9, 14]);
        let t = ScanTables::new(&x);
        for i in 0..=16 {
            assert_eq!(o_rank(&x, false, i) + o_rank(&x, true, i), i);
            assert_eq!(t.rank(true, i), o_rank(&x, true, i));
        }
        for k in 1..=12 {
            assert_eq!(t.select(false, k), o_select(&x, false, k));
        }
        assert_eq!(o_select(&x, false, 5), Some(6));
        for q in 0..16 {
            assert_eq!(t.pred(q), o_pred(&x, q, false));
        }
    }

    #[test]
    fn sorted_oracle_matches_scans() {
        for mask in 0u32..(1 << 9) {
            let x = ExplicitSet::new(9, (0..9).filter(|i| (mask >> i) & 1 == 1).collect());
            let o = SortedOracle::new(&x);
            for i in 0..=9 {
                for b in [false, true] {
                    assert_eq!(o.rank(b, i), o_rank(&x, b, i));
                    assert_eq!(o.select(b, i), o_select(&x, b, i));
                }
            }
            for q in 0..9 {
                assert_eq!(o.pred(q), o_pred(&x, q, false));
            }
        }
    }
}
