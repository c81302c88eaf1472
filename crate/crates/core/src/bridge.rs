//! Reductions between predecessor search and rank/select.
//!
//! * Predecessor from a FID: the predecessor of `q` is `select1(rank1(q + 1))`.
//! * `select0` from predecessor search on the dual sequence
//!   `d(r) = x[r] − r` (0-based rank `r`), which counts the zeros of the
//!   characteristic string before `x[r]`. If `j` elements have `d ≤ k − 1`,
//!   then exactly those `j` elements precede the `k`-th zero, which sits at
//!   position `(k − 1) + j`. (With 1-based positions and ordinals this is
//!   the familiar `v_k = k + j`.)
//!
//! The dual sequence is only non-decreasing. Keeping the last element of
//! every run of equal duals yields a strictly increasing subsequence `Y'`;
//! a marker bitvector over the original ordinals maps a rank in `Y'` back to
//! the ordinal of the run's last element, which is exactly the `j` needed.

use crate::bitvec::BitVector;
use crate::eliasfano::check_sorted;
use crate::error::{not_found, out_of_range, Result};
use crate::serial::{Persist, Reader, Tag, Writer};
use crate::traits::{Fid, PredCount};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DualView {
    duals: Vec<u64>,
    marker: BitVector,
    yprime: Vec<u64>,
}

impl DualView {
    /// Builds the dual view of a strictly increasing set in `[0, m)`.
    pub fn build(values: &[u64], m: u64) -> Result<Self> {
        check_sorted(values, m, true)?;
        let duals: Vec<u64> = values
            .iter()
            .enumerate()
            .map(|(r, &x)| x - r as u64)
            .collect();
        let (marker, yprime) = run_last(&duals);
        Ok(DualView {
            duals,
            marker,
            yprime,
        })
    }

    pub fn duals(&self) -> &[u64] {
        &self.duals
    }

    pub fn marker(&self) -> &BitVector {
        &self.marker
    }

    pub fn yprime(&self) -> &[u64] {
        &self.yprime
    }

    /// `select0` through the dual view, with `Y'` searched by binary search.
    pub fn select0(&self, k: u64, m: u64) -> Result<u64> {
        select0_via_dual(k, &self.yprime, &self.marker, m - self.duals.len() as u64)
    }
}

impl Persist for DualView {
    const TAG: Tag = Tag::DualView;

    fn write_payload(&self, w: &mut Writer) {
        w.words(&self.duals);
        self.marker.write(w);
        w.words(&self.yprime);
    }

    fn read_payload(r: &mut Reader<'_>) -> Result<Self> {
        let duals = r.words()?;
        let marker = BitVector::read(r)?;
        let yprime = r.words()?;
        let (m2, y2) = run_last(&duals);
        if m2 != marker || y2 != yprime {
            return Err(crate::Error::Format("dual view fields inconsistent".into()));
        }
        Ok(DualView {
            duals,
            marker,
            yprime,
        })
    }
}

/// Marker with a one at the last index of each run of equal values, and the kept values.
pub(crate) fn run_last(duals: &[u64]) -> (BitVector, Vec<u64>) {
    let mut yprime = Vec::new();
    let marker = BitVector::with_options(
        crate::bits::BitArray::from_bits(duals.iter().enumerate().map(|(r, &d)| {
            let last = r + 1 == duals.len() || duals[r + 1] != d;
            if last {
                yprime.push(d);
            }
            last
        })),
        crate::bitvec::BuildOptions::with_select1(),
    );
    (marker, yprime)
}

/// `(j, value)` for the non-strict predecessor of `q` using only FID operations.
pub fn pred_from_fid<F: Fid + ?Sized>(fid: &F, q: u64) -> Result<(u64, Option<u64>)> {
    if q >= fid.universe() {
        return Err(out_of_range(q, fid.universe()));
    }
    let j = fid.rank1(q + 1);
    Ok((j, (j > 0).then(|| fid.select1(j))))
}

/// Position of the `k`-th zero (1-based `k`), given a predecessor structure over `Y'`.
pub fn select0_via_dual<P: PredCount + ?Sized>(
    k: u64,
    ypred: &P,
    marker: &BitVector,
    zeros: u64,
) -> Result<u64> {
    if k == 0 || k > zeros {
        return Err(not_found(k, zeros));
    }
    let p = ypred.count_le(k - 1);
    let j = if p == 0 {
        0
    } else {
        marker.select1(p) as u64 + 1
    };
    Ok(k - 1 + j)
}
