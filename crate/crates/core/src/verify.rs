//! Checks a dictionary against the reference oracle and shrinks failures to
//! a small reproducer.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::batch;
use crate::dataset::Dataset;
use crate::error::Result;
use crate::recfid::{Params, RecursiveFid};
use crate::reforacle::{ExplicitSet, SortedOracle};

/// Deliberate corruption of answers, for exercising the failure path.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fault {
    /// `rank1(i)` is off by one when `i` lies past the third-largest element.
    RankPastThird,
}

impl Fault {
    fn rank1(self, data: &[u64], i: u64, r: u64) -> u64 {
        match self {
            Fault::RankPastThird => {
                if data.len() >= 3 && i > data[data.len() - 3] {
                    r + 1
                } else {
                    r
                }
            }
        }
    }
}

/// Query arguments: positions for rank/access/pred and ordinals for select.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct QuerySet {
    pub positions: Vec<u64>,
    pub ones: Vec<u64>,
    pub zeros: Vec<u64>,
}

impl QuerySet {
    /// Every boundary argument plus `random` draws of each kind.
    pub fn new(data: &Dataset, random: usize, seed: u64) -> Self {
        let m = data.m;
        let n = data.n();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut positions = vec![0, 1, 2, m / 2, m.saturating_sub(2), m.saturating_sub(1), m];
        for &x in data
            .values
            .iter()
            .take(8)
            .chain(data.values.iter().rev().take(8))
        {
            positions.extend([x.saturating_sub(1), x, x + 1]);
        }
        positions.extend((0..random).map(|_| rng.gen_range(0..=m)));
        positions.retain(|&p| p <= m);
        let ordinals = |count: u64, rng: &mut ChaCha8Rng| {
            let mut ks = vec![0, 1, 2, count.saturating_sub(1), count, count + 1];
            if count > 0 {
                ks.extend((0..random).map(|_| rng.gen_range(1..=count)));
            }
            ks
        };
        let ones = ordinals(n, &mut rng);
        let zeros = ordinals(m - n, &mut rng);
        QuerySet {
            positions,
            ones,
            zeros,
        }
    }

    /// All arguments of a small universe.
    pub fn exhaustive(data: &Dataset) -> Self {
        let m = data.m;
        QuerySet {
            positions: (0..=m).collect(),
            ones: (0..=data.n() + 1).collect(),
            zeros: (0..=m - data.n() + 1).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.positions.len() + self.ones.len() + self.zeros.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mismatch {
    pub op: String,
    pub arg: u64,
    pub expected: String,
    pub actual: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Failure {
    pub params: Params,
    pub mismatch: Mismatch,
    pub reproducer: Dataset,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub configs: usize,
    pub checks: u64,
    pub failure: Option<Failure>,
}

fn show<T: std::fmt::Debug>(x: T) -> String {
    format!("{x:?}")
}

/// First disagreement between the dictionary and the oracle over `queries`.
pub fn check(
    fid: &RecursiveFid,
    data: &Dataset,
    queries: &QuerySet,
    fault: Option<Fault>,
) -> (u64, Option<Mismatch>) {
    let oracle = SortedOracle::new(&ExplicitSet::new(data.m, data.values.clone()));
    let m = data.m;
    let at_position = |&i: &u64| -> (u64, Option<Mismatch>) {
        let mut checks = 0;
        for b in [true, false] {
            checks += 1;
            let mut got = fid.rank(b, i).ok();
            if let (true, Some(f), Some(r)) = (b, fault, got) {
                got = Some(f.rank1(&data.values, i, r));
            }
            let want = Some(oracle.rank(b, i));
            if got != want {
                let op = if b { "rank1" } else { "rank0" };
                return (
                    checks,
                    Some(Mismatch {
                        op: op.into(),
                        arg: i,
                        expected: show(want),
                        actual: show(got),
                    }),
                );
            }
        }
        if i < m {
            checks += 2;
            let want = oracle.pred(i);
            let got = fid.pred(i).ok();
            if got != Some(want) {
                return (
                    checks,
                    Some(Mismatch {
                        op: "pred".into(),
                        arg: i,
                        expected: show(Some(want)),
                        actual: show(got),
                    }),
                );
            }
            let want = oracle.rank(true, i + 1) != oracle.rank(true, i);
            let got = fid.access(i).ok();
            if got != Some(want) {
                return (
                    checks,
                    Some(Mismatch {
                        op: "access".into(),
                        arg: i,
                        expected: show(Some(want)),
                        actual: show(got),
                    }),
                );
            }
        }
        (checks, None)
    };
    let oracle = &oracle;
    let at_ordinal = |b: bool| {
        move |&k: &u64| -> (u64, Option<Mismatch>) {
            let want = oracle.select(b, k);
            let got = fid.select(b, k).ok();
            if got != want {
                let op = if b { "select1" } else { "select0" };
                return (
                    1,
                    Some(Mismatch {
                        op: op.into(),
                        arg: k,
                        expected: show(want),
                        actual: show(got),
                    }),
                );
            }
            (1, None)
        }
    };
    let mut results = batch::map(&queries.positions, at_position);
    results.extend(batch::map(&queries.ones, at_ordinal(true)));
    results.extend(batch::map(&queries.zeros, at_ordinal(false)));
    let checks = results.iter().map(|r| r.0).sum();
    (checks, results.into_iter().find_map(|r| r.1))
}

fn fails(
    data: &Dataset,
    params: Params,
    random: usize,
    seed: u64,
    fault: Option<Fault>,
) -> Option<Mismatch> {
    let fid = match RecursiveFid::build(&data.values, data.m, params) {
        Ok(f) => f,
        Err(e) => {
            return Some(Mismatch {
                op: "build".into(),
                arg: 0,
                expected: "Ok".into(),
                actual: e.to_string(),
            })
        }
    };
    let queries = if data.m <= 4096 {
        QuerySet::exhaustive(data)
    } else {
        QuerySet::new(data, random, seed)
    };
    check(&fid, data, &queries, fault).1
}

/// Greedily removes values (halves first, then single values) and trims the
/// universe while the failure persists.
pub fn shrink(
    data: &Dataset,
    params: Params,
    random: usize,
    seed: u64,
    fault: Option<Fault>,
) -> (Dataset, Option<Mismatch>) {
    let mut best = data.clone();
    let mut mismatch = fails(&best, params, random, seed, fault);
    if mismatch.is_none() {
        return (best, None);
    }
    let mut chunk = best.values.len().div_ceil(2).max(1);
    loop {
        let mut progress = false;
        let mut start = 0;
        while start < best.values.len() {
            let mut values = best.values.clone();
            values.drain(start..(start + chunk).min(values.len()));
            let cand = Dataset { m: best.m, values };
            if let Some(mm) = fails(&cand, params, random, seed, fault) {
                best = cand;
                mismatch = Some(mm);
                progress = true;
            } else {
                start += chunk;
            }
        }
        if !progress {
            if chunk == 1 {
                break;
            }
            chunk = chunk.div_ceil(2);
        }
    }
    // trim the universe from above
    loop {
        let floor = best.values.last().map_or(1, |&x| x + 1);
        if best.m <= floor {
            break;
        }
        let target = floor.max(best.m / 2).min(best.m - 1);
        let cand = Dataset {
            m: target,
            values: best.values.clone(),
        };
        match fails(&cand, params, random, seed, fault) {
            Some(mm) => {
                best = cand;
                mismatch = Some(mm);
            }
            None if target == best.m - 1 => break,
            None => {
                let cand = Dataset {
                    m: best.m - 1,
                    values: best.values.clone(),
                };
                match fails(&cand, params, random, seed, fault) {
                    Some(mm) => {
                        best = cand;
                        mismatch = Some(mm);
                    }
                    None => break,
                }
            }
        }
    }
    (best, mismatch)
}

/// Runs every parameter set of `grid` over `data`; on the first failure,
/// shrinks it to a minimal reproducer.
pub fn verify(
    data: &Dataset,
    grid: &[Params],
    random: usize,
    seed: u64,
    fault: Option<Fault>,
) -> Result<Outcome> {
    let queries = QuerySet::new(data, random, seed);
    let mut checks = 0;
    for (i, &params) in grid.iter().enumerate() {
        let fid = RecursiveFid::build(&data.values, data.m, params)?;
        let (c, mismatch) = check(&fid, data, &queries, fault);
        checks += c;
        if let Some(mismatch) = mismatch {
            let (reproducer, shrunk) = shrink(data, params, random, seed, fault);
            return Ok(Outcome {
                configs: i + 1,
                checks,
                failure: Some(Failure {
                    params,
                    mismatch: shrunk.unwrap_or(mismatch),
                    reproducer,
                }),
            });
        }
    }
    Ok(Outcome {
        configs: grid.len(),
        checks,
        failure: None,
    })
}

/// Parameter grid used by default: `s ∈ {0,1,2,3}`, `v ∈ {2,4,16,default}`, `w ∈ {2,4,n}`.
pub fn default_grid() -> Vec<Params> {
    let mut grid = Vec::new();
    for s in 0..4 {
        for v in [Some(2), Some(4), Some(16), None] {
            for w in [Some(2), Some(4), None] {
                grid.push(Params {
                    s,
                    v,
                    w,
                    ..Params::default()
                });
            }
        }
    }
    grid
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{generate, Kind};

    #[test]
    fn clean_run_passes() {
        let d = generate(Kind::Uniform, 300, 5000, 1).unwrap();
        let out = verify(&d, &default_grid()[..6], 500, 2, None).unwrap();
        assert!(out.failure.is_none());
        assert_eq!(out.configs, 6);
        assert!(out.checks > 6 * 1000);
    }

    #[test]
    fn injected_fault_shrinks_to_three_values() {
        let d = generate(Kind::Uniform, 200, 3000, 5).unwrap();
        let out = verify(&d, &[Params::default()], 200, 1, Some(Fault::RankPastThird)).unwrap();
        let f = out.failure.expect("fault detected");
        assert_eq!(f.reproducer.values.len(), 3);
        assert_eq!(f.mismatch.op, "rank1");
        assert!(f.reproducer.m < 3000);
        assert!(fails(&f.reproducer, f.params, 10, 1, Some(Fault::RankPastThird)).is_some());
    }

    #[test]
    fn query_set_covers_boundaries() {
        let d = Dataset::new(16, vec![3, 5, 9, 14]).unwrap();
        let q = QuerySet::new(&d, 10, 0);
        for p in [0, 15, 16, 2, 4] {
            assert!(q.positions.contains(&p));
        }
        assert!(q.ones.contains(&0) && q.ones.contains(&5));
        assert!(q.zeros.contains(&13));
        assert_eq!(QuerySet::exhaustive(&d).positions.len(), 17);
    }
}
