//! Batched queries, sharded across threads with the `parallel` feature.
//!
//! Results always come back in input order, so sequential and parallel runs
//! are interchangeable.

use crate::probe;
use crate::recfid::RecursiveFid;

/// Applies `f` to every item on the calling thread.
pub fn map_seq<T: Sync, R: Send>(items: &[T], f: impl Fn(&T) -> R + Sync) -> Vec<R> {
    items.iter().map(f).collect()
}

/// Applies `f` to every item across the rayon pool.
#[cfg(feature = "parallel")]
pub fn map_par<T: Sync, R: Send>(items: &[T], f: impl Fn(&T) -> R + Sync) -> Vec<R> {
    use rayon::prelude::*;
    items.par_iter().map(&f).collect()
}

/// Parallel when the `parallel` feature is on, sequential otherwise.
pub fn map<T: Sync, R: Send>(items: &[T], f: impl Fn(&T) -> R + Sync) -> Vec<R> {
    #[cfg(feature = "parallel")]
    {
        map_par(items, f)
    }
    #[cfg(not(feature = "parallel"))]
    {
        map_seq(items, f)
    }
}

/// `rank1` of every position (each `≤ m`).
pub fn rank1_seq(fid: &RecursiveFid, positions: &[u64]) -> Vec<u64> {
    map_seq(positions, |&i| {
        fid.rank(true, i).expect("position within universe")
    })
}

#[cfg(feature = "parallel")]
pub fn rank1_par(fid: &RecursiveFid, positions: &[u64]) -> Vec<u64> {
    map_par(positions, |&i| {
        fid.rank(true, i).expect("position within universe")
    })
}

pub fn rank1(fid: &RecursiveFid, positions: &[u64]) -> Vec<u64> {
    map(positions, |&i| {
        fid.rank(true, i).expect("position within universe")
    })
}

/// Predecessor of every query (each `< m`).
pub fn pred_seq(fid: &RecursiveFid, queries: &[u64]) -> Vec<(u64, Option<u64>)> {
    map_seq(queries, |&q| fid.pred(q).expect("query within universe"))
}

#[cfg(feature = "parallel")]
pub fn pred_par(fid: &RecursiveFid, queries: &[u64]) -> Vec<(u64, Option<u64>)> {
    map_par(queries, |&q| fid.pred(q).expect("query within universe"))
}

pub fn pred(fid: &RecursiveFid, queries: &[u64]) -> Vec<(u64, Option<u64>)> {
    map(queries, |&q| fid.pred(q).expect("query within universe"))
}

/// Probes spent by each `rank1` query.
pub fn rank1_probes(fid: &RecursiveFid, positions: &[u64]) -> Vec<u64> {
    map(positions, |&i| probe::measure(|| fid.rank(true, i)).1)
}

/// Probes spent by each `select` query.
pub fn select_probes(fid: &RecursiveFid, value: bool, ks: &[u64]) -> Vec<u64> {
    map(ks, |&k| probe::measure(|| fid.select(value, k)).1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::recfid::Params;

    #[test]
    fn sequential_and_default_agree() {
        let values: Vec<u64> = (0..3000u64).map(|i| i * 37 + i % 5).collect();
        let fid = RecursiveFid::build(&values, 120_000, Params::default().with_v(4)).unwrap();
        let qs: Vec<u64> = (0..120_000).step_by(13).collect();
        assert_eq!(rank1_seq(&fid, &qs), rank1(&fid, &qs));
        assert_eq!(pred_seq(&fid, &qs), pred(&fid, &qs));
        #[cfg(feature = "parallel")]
        {
            assert_eq!(rank1_seq(&fid, &qs), rank1_par(&fid, &qs));
            assert_eq!(pred_seq(&fid, &qs), pred_par(&fid, &qs));
        }
        let probes = rank1_probes(&fid, &qs);
        assert_eq!(probes[0], 0);
        assert!(probes.iter().any(|&p| p > 0));
    }
}
