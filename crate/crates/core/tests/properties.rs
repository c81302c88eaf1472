use std::collections::BTreeSet;

use fidkit::binom::binom_bits;
use fidkit::bits::BitArray;
use fidkit::bitvec::{BitVector, BuildOptions};
use fidkit::bridge::{pred_from_fid, DualView};
use fidkit::eliasfano::EliasFano;
use fidkit::multirank::{MatrixKind, MultirankIndex};
use fidkit::recfid::{BaseKind, Complement, Params, RecursiveFid};
use fidkit::reforacle::{o_lcp, o_multirank, o_pred, o_rank, o_select, ExplicitSet, ScanTables};
use fidkit::sbtree::{BlockPred, PatriciaTrie};
use fidkit::serial::Persist;
use proptest::prelude::*;

fn sorted_set(max_m: u64, max_n: usize) -> impl Strategy<Value = (u64, Vec<u64>)> {
    (1..=max_m).prop_flat_map(move |m| {
        let n = (m as usize).min(max_n);
        (Just(m), proptest::collection::btree_set(0..m, 0..=n))
            .prop_map(|(m, s)| (m, s.into_iter().collect::<Vec<u64>>()))
    })
}

fn params() -> impl Strategy<Value = Params> {
    (
        0usize..4,
        prop_oneof![Just(None), (2usize..20).prop_map(Some)],
        prop_oneof![Just(None), (2u64..64).prop_map(Some)],
        prop_oneof![
            Just(Complement::Auto),
            Just(Complement::On),
            Just(Complement::Off)
        ],
        prop_oneof![
            Just(MatrixKind::Auto),
            Just(MatrixKind::Dense),
            Just(MatrixKind::Sparse)
        ],
        prop_oneof![
            Just(BaseKind::Auto),
            Just(BaseKind::Dense),
            Just(BaseKind::Sampled)
        ],
        0.1f64..=1.0,
    )
        .prop_map(|(s, v, w, complement, matrix, base, eps)| Params {
            s,
            v,
            w,
            eps,
            complement,
            matrix,
            base,
            ..Params::default()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn bitvector_matches_oracle(bits in proptest::collection::vec(any::<bool>(), 0..3000), rate in 1usize..100) {
        let bv = BitVector::with_options(BitArray::from_bits(bits.iter().copied()), BuildOptions { select_rate: rate, ..BuildOptions::default() });
        let ones: Vec<u64> = bits.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i as u64).collect();
        let set = ExplicitSet::new(bits.len() as u64, ones);
        let t = ScanTables::new(&set);
        for i in 0..=bits.len() {
            prop_assert_eq!(bv.rank(true, i).unwrap() as u64, t.rank(true, i as u64));
            prop_assert_eq!(bv.rank(false, i).unwrap() as u64, t.rank(false, i as u64));
        }
        for b in [true, false] {
            for k in 0..=t.count(b) + 1 {
                prop_assert_eq!(bv.select(b, k as usize).ok().map(|p| p as u64), t.select(b, k));
            }
        }
    }

    #[test]
    fn elias_fano_layout((m, values) in sorted_set(1 << 40, 300)) {
        let ef = EliasFano::encode(&values, m, None).unwrap();
        let n = values.len() as u64;
        prop_assert!(ef.high_bits() <= 3 * n.max(1));
        let expect_low = n * (fidkit::bits::ceil_log2(m).saturating_sub(fidkit::bits::ceil_log2(n.max(1)))) as u64;
        prop_assert_eq!(ef.low_bits(), expect_low);
        prop_assert_eq!(ef.iter().collect::<Vec<_>>(), values.clone());
        for (k, &x) in values.iter().enumerate() {
            prop_assert_eq!(ef.access(k + 1).unwrap(), x);
        }
        let back = EliasFano::from_bytes(&ef.to_bytes()).unwrap();
        prop_assert_eq!(back, ef);
    }

    #[test]
    fn dual_select0_matches_oracle((m, values) in sorted_set(2000, 2000)) {
        let d = DualView::build(&values, m).unwrap();
        let set = ExplicitSet::new(m, values.clone());
        for k in 0..=(m - values.len() as u64 + 1) {
            prop_assert_eq!(d.select0(k, m).ok(), o_select(&set, false, k));
        }
        prop_assert!(d.yprime().windows(2).all(|w| w[0] < w[1]));
        prop_assert_eq!(d.marker().count_ones(), d.yprime().len());
    }

    #[test]
    fn pred_through_fid((m, values) in sorted_set(3000, 500)) {
        let bv = BitVector::from_bits((0..m).map(|i| values.binary_search(&i).is_ok()));
        let set = ExplicitSet::new(m, values.clone());
        for q in (0..m).step_by(7) {
            prop_assert_eq!(pred_from_fid(&bv, q).unwrap(), o_pred(&set, q, false));
        }
    }

    #[test]
    fn trie_blind_search(width in 1u32..=64, raw in proptest::collection::btree_set(any::<u64>(), 1..40), queries in proptest::collection::vec(any::<u64>(), 50)) {
        let mask = if width == 64 { u64::MAX } else { (1u64 << width) - 1 };
        let keys: Vec<u64> = raw.into_iter().map(|k| k & mask).collect::<BTreeSet<_>>().into_iter().collect();
        let trie = PatriciaTrie::build(&keys, width).unwrap();
        for q in queries.into_iter().map(|q| q & mask).chain(keys.iter().copied()) {
            let leaf = trie.blind_descend(q);
            let best = keys.iter().map(|&k| o_lcp(q, k, width)).max().unwrap();
            prop_assert_eq!(o_lcp(q, keys[leaf], width), best);
            for strict in [false, true] {
                let expect = keys.iter().filter(|&&k| k < q || (!strict && k == q)).count();
                prop_assert_eq!(trie.count_le(&keys, q, strict), expect);
            }
        }
        let p = keys.len() as u64;
        prop_assert!(trie.index_bits() <= (2 * p).saturating_sub(1) + p.saturating_sub(1) * fidkit::bits::ceil_log2(width as u64 + 1) as u64);
    }

    #[test]
    fn block_pred_counts(width in 4u32..=40, raw in proptest::collection::btree_set(any::<u64>(), 1..200), b in 2usize..8, queries in proptest::collection::vec(any::<u64>(), 40)) {
        let mask = (1u64 << width) - 1;
        let keys: Vec<u64> = raw.into_iter().map(|k| k & mask).collect::<BTreeSet<_>>().into_iter().collect();
        let bp = BlockPred::build(&keys, 0, keys.len(), width, Some(b)).unwrap();
        for q in queries.into_iter().map(|q| q & mask) {
            prop_assert_eq!(bp.count_le(&keys, q, false), keys.partition_point(|&k| k <= q));
            prop_assert_eq!(bp.count_le(&keys, q, true), keys.partition_point(|&k| k < q));
        }
    }

    #[test]
    fn multirank_matches_oracle(seqs in proptest::collection::vec(proptest::collection::btree_set(0u64..5000, 1..30), 1..20), dense in any::<bool>()) {
        let seqs: Vec<Vec<u64>> = seqs.into_iter().map(|s| s.into_iter().collect()).collect();
        let kind = if dense { MatrixKind::Dense } else { MatrixKind::Sparse };
        let (alpha, idx) = MultirankIndex::build(&seqs, 5000, kind).unwrap();
        let r: usize = seqs.iter().map(Vec::len).sum();
        prop_assert!((idx.rows() * idx.alphabet_size()) as u64 <= (r * r) as u64);
        prop_assert_eq!((0..seqs.len()).map(|i| idx.query(i, alpha.len()).unwrap()).sum::<usize>(), r);
        for i in 0..seqs.len() {
            for q in (0..5000).step_by(97) {
                prop_assert_eq!(idx.count_le(i, q).unwrap() as u64, o_multirank(&seqs, i, q));
            }
        }
    }

    #[test]
    fn recursive_fid_matches_oracle((m, values) in sorted_set(1 << 14, 1 << 14), p in params()) {
        let fid = RecursiveFid::build(&values, m, p).unwrap();
        let set = ExplicitSet::new(m, values.clone());
        let t = ScanTables::new(&set);
        let step = (m / 300).max(1) as usize;
        for i in (0..=m).step_by(step) {
            prop_assert_eq!(fid.rank(true, i).unwrap(), t.rank(true, i));
            prop_assert_eq!(fid.rank(false, i).unwrap(), t.rank(false, i));
            if i < m {
                prop_assert_eq!(fid.pred(i).unwrap(), t.pred(i));
            }
        }
        for b in [true, false] {
            let c = t.count(b);
            for k in (0..=c + 1).step_by(((c / 200).max(1)) as usize) {
                prop_assert_eq!(fid.select(b, k).ok(), t.select(b, k));
            }
        }
        prop_assert!(fid.depth() <= p.s);
        let w = fid.to_writer();
        prop_assert_eq!(w.payload_bits(), fid.space_report().total);
        let bytes = w.into_bytes();
        prop_assert_eq!(RecursiveFid::from_bytes(&bytes).unwrap().to_bytes(), bytes);
    }

    #[test]
    fn binom_properties(m in 1u64..5000, frac in 0.0f64..=1.0) {
        let n = ((m as f64) * frac) as u64;
        let b = binom_bits(n, m).unwrap();
        prop_assert_eq!(b, binom_bits(m - n, m).unwrap());
        if n < m {
            prop_assert!(binom_bits(n, m + 1).unwrap() >= b);
        }
        if n > 0 && 2 * n <= m {
            prop_assert!(n as f64 * (m as f64 / n as f64).log2() <= b as f64 + 1e-9);
        }
    }
}

#[test]
fn small_universe_oracles_agree() {
    for m in 1..=6u64 {
        for mask in 0u32..(1 << m) {
            let values: Vec<u64> = (0..m).filter(|i| (mask >> i) & 1 == 1).collect();
            let set = ExplicitSet::new(m, values);
            let t = ScanTables::new(&set);
            for i in 0..=m {
                assert_eq!(t.rank(true, i), o_rank(&set, true, i));
            }
        }
    }
}
