use super::*;
use crate::reforacle::{o_pred, o_rank, o_select, ExplicitSet};

fn small() -> RecursiveFid {
    RecursiveFid::build(
        &[3, 5, 9, 14],
        16,
        Params::default().with_s(1).with_v(2).with_w(4),
    )
    .unwrap()
}

#[test]
fn four_element_trace() {
    let f = small();
    assert_eq!(f.depth(), 1);
    let lvl = &f.main.levels()[0];
    assert_eq!(lvl.cut(), 2);
    assert_eq!(lvl.fat_superblocks(), 0);
    assert!(f.main.base().is_none());
    let report = f.space_report();
    assert_eq!(report.levels[0].multirank, 0);
    assert!(report.levels[0].trees > 0);
    assert_eq!(report.base, 0);
    assert_eq!(f.rank(true, 10).unwrap(), 3);
    assert_eq!(f.rank(true, 0).unwrap(), 0);
    assert_eq!(f.select(true, 2).unwrap(), 5);
    assert_eq!(f.select(false, 5).unwrap(), 6);
    assert_eq!(f.pred(13).unwrap(), (3, Some(9)));
    assert_eq!(f.pred(15).unwrap(), (4, Some(14)));
    assert_eq!(f.pred(2).unwrap(), (0, None));
    assert!(f.rank(true, 17).is_err());
    assert!(f.select(true, 5).is_err());
    assert!(f.select(false, 0).is_err());
    assert!(f.pred(16).is_err());
}

#[test]
fn empty_and_full() {
    let f = RecursiveFid::build(&[], 20, Params::default()).unwrap();
    assert_eq!(f.depth(), 0);
    for i in 0..=20 {
        assert_eq!(f.rank(true, i).unwrap(), 0);
    }
    for k in 1..=20 {
        assert_eq!(f.select(false, k).unwrap(), k - 1);
    }
    let all: Vec<u64> = (0..20).collect();
    let f = RecursiveFid::build(&all, 20, Params::default()).unwrap();
    assert!(f.is_complemented());
    assert_eq!(f.stored_count(), 0);
    for k in 1..=20 {
        assert_eq!(f.select(true, k).unwrap(), k - 1);
        assert_eq!(f.rank(true, k).unwrap(), k);
    }
}

#[test]
fn params_text() {
    let p: Params = "s=3,v=4,w=8,complement=off,matrix=sparse,base=dense,eps=0.25"
        .parse()
        .unwrap();
    assert_eq!(p.s, 3);
    assert_eq!(p.v, Some(4));
    assert_eq!(p.complement, Complement::Off);
    assert_eq!(p.to_string().parse::<Params>().unwrap(), p);
    assert!("v=1".parse::<Params>().is_err());
    assert!("x=1".parse::<Params>().is_err());
    assert!("s".parse::<Params>().is_err());
    assert!("complement=maybe".parse::<Params>().is_err());
}

fn check_all(values: &[u64], m: u64, params: Params) {
    let f = RecursiveFid::build(values, m, params).unwrap();
    let set = ExplicitSet::new(m, values.to_vec());
    for i in 0..=m {
        for b in [false, true] {
            assert_eq!(
                f.rank(b, i).unwrap(),
                o_rank(&set, b, i),
                "{values:?} m={m} {params} rank{b}({i})"
            );
        }
    }
    for b in [false, true] {
        for k in 0..=m + 1 {
            assert_eq!(
                f.select(b, k).ok(),
                o_select(&set, b, k),
                "{values:?} m={m} {params} select{b}({k})"
            );
        }
    }
    for q in 0..m {
        assert_eq!(f.pred(q).unwrap(), o_pred(&set, q, false));
    }
}

#[test]
fn exhaustive_small_universes() {
    let grid: Vec<Params> = [0usize, 1, 2]
        .iter()
        .flat_map(|&s| [2usize, 3].map(move |v| (s, v)))
        .flat_map(|(s, v)| [2u64, 4].map(move |w| Params::default().with_s(s).with_v(v).with_w(w)))
        .collect();
    for m in 1..=8u64 {
        for mask in 0u32..(1 << m) {
            let values: Vec<u64> = (0..m).filter(|i| (mask >> i) & 1 == 1).collect();
            for &p in &grid {
                check_all(&values, m, p);
            }
        }
    }
}

#[test]
fn dense_and_sampled_bases_agree() {
    let values: Vec<u64> = (0..300u64)
        .map(|i| i * i % 5003)
        .collect::<std::collections::BTreeSet<_>>()
        .into_iter()
        .collect();
    for base in [BaseKind::Dense, BaseKind::Sampled] {
        for matrix in [MatrixKind::Dense, MatrixKind::Sparse] {
            for s in 0..4 {
                let p = Params {
                    base,
                    matrix,
                    ..Params::default().with_s(s).with_v(2).with_w(16)
                };
                check_all(&values, 5003, p);
            }
        }
    }
}

#[test]
fn levels_shrink() {
    let values: Vec<u64> = (0..4000u64)
        .map(|i| i * 977 % 1_000_003)
        .collect::<std::collections::BTreeSet<_>>()
        .into_iter()
        .collect();
    let f = RecursiveFid::build(&values, 1_000_003, Params::default().with_s(3).with_v(2)).unwrap();
    let sizes = f.level_sizes();
    assert!(!sizes.is_empty() && sizes.len() <= 3);
    for (lvl, next) in f.main.levels().iter().zip(sizes.iter().skip(1)) {
        assert!(next.0 <= lvl.blocks());
        assert_eq!(next.1, 1u64 << (ceil_log2(lvl.m()) - lvl.cut()));
    }
}

#[test]
fn serialization_and_space_agree() {
    let values: Vec<u64> = (0..500u64)
        .map(|i| i * 131 % 70_001)
        .collect::<std::collections::BTreeSet<_>>()
        .into_iter()
        .collect();
    for s in 0..3 {
        let f =
            RecursiveFid::build(&values, 70_001, Params::default().with_s(s).with_v(2)).unwrap();
        let w = f.to_writer();
        assert_eq!(w.payload_bits(), f.space_report().total);
        let bytes = w.into_bytes();
        let back = RecursiveFid::from_bytes(&bytes).unwrap();
        assert_eq!(back, f);
        assert_eq!(back.to_bytes(), bytes);
    }
    let f = small();
    let mut bytes = f.to_bytes();
    bytes.pop();
    assert!(RecursiveFid::from_bytes(&bytes).is_err());
}

#[test]
fn select1_needs_no_recursion() {
    let values: Vec<u64> = (0..2000u64)
        .map(|i| i * 7919 % 1_048_573)
        .collect::<std::collections::BTreeSet<_>>()
        .into_iter()
        .collect();
    let probes = |s: usize| {
        let f =
            RecursiveFid::build(&values, 1_048_573, Params::default().with_s(s).with_v(2)).unwrap();
        (1..=values.len() as u64)
            .map(|k| crate::probe::measure(|| f.select(true, k).unwrap()).1)
            .max()
            .unwrap()
    };
    assert_eq!(probes(1), probes(3));
}
