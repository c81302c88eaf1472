use crate::bitvec::BitVector;

/// Rank/select over the characteristic bitstring of a set in `[0, m)`.
pub trait Fid {
    fn universe(&self) -> u64;
    fn count_ones(&self) -> u64;
    /// Ones strictly before `i`, `i ≤ universe`.
    fn rank1(&self, i: u64) -> u64;
    /// Position of the `k`-th one, `1 ≤ k ≤ count_ones`.
    fn select1(&self, k: u64) -> u64;
}

/// Non-strict predecessor counting: how many stored values are `≤ q`.
pub trait PredCount {
    fn count_le(&self, q: u64) -> usize;
}

impl Fid for BitVector {
    fn universe(&self) -> u64 {
        self.len() as u64
    }

    fn count_ones(&self) -> u64 {
        BitVector::count_ones(self) as u64
    }

    fn rank1(&self, i: u64) -> u64 {
        BitVector::rank1(self, i as usize) as u64
    }

    fn select1(&self, k: u64) -> u64 {
        BitVector::select1(self, k as usize) as u64
    }
}

/// Binary search over a sorted slice.
impl PredCount for [u64] {
    fn count_le(&self, q: u64) -> usize {
        self.partition_point(|&x| x <= q)
    }
}

impl PredCount for Vec<u64> {
    fn count_le(&self, q: u64) -> usize {
        self.as_slice().count_le(q)
    }
}
