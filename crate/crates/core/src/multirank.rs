//! Multiranking: per-sequence predecessor counts for `c` sorted sequences over
//! a shared universe.
//!
//! All sequences are mapped onto their sorted distinct union `Λ` (size `t`).
//! Row `i` of a `c × t` membership matrix has a one in column `j` when
//! `Λ[j]` belongs to sequence `i`. The rows are concatenated into one bit
//! string of length `c·t`, so with `λ = |{Λ_j ≤ q}|` the answer for row `i`
//! is `rank1(t·i + λ) − rank1(t·i)`.

use crate::bits::BitArray;
use crate::bitvec::{BitVector, BuildOptions};
use crate::eliasfano::{check_sorted, EliasFano};
use crate::error::{out_of_range, Error, Result};
use crate::serial::{Persist, Reader, Tag, Writer};
use crate::traits::PredCount;

/// Ranking of queries on the alphabet: `|{Λ_j ≤ q}|`.
pub trait AlphabetRanker: PredCount {}

impl<T: PredCount + ?Sized> AlphabetRanker for T {}

/// Requested matrix representation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MatrixKind {
    /// Dense when `c·t ≤ 64·r`, sparse otherwise.
    #[default]
    Auto,
    Dense,
    Sparse,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Matrix {
    Dense(BitVector),
    Sparse(EliasFano),
}

impl Matrix {
    fn rank1(&self, pos: u64) -> usize {
        match self {
            Matrix::Dense(bv) => bv.rank1(pos as usize),
            Matrix::Sparse(ef) => ef.rank_lt(pos),
        }
    }

    fn space_bits(&self) -> u64 {
        match self {
            Matrix::Dense(bv) => bv.space_bits(),
            Matrix::Sparse(ef) => ef.space_bits(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultirankIndex {
    c: usize,
    t: usize,
    r: usize,
    matrix: Matrix,
    alphabet: Option<BitVector>,
}

impl MultirankIndex {
    /// Builds over `sequences` (each non-empty, strictly increasing, `< u`) and
    /// returns the alphabet `Λ` together with a standalone index.
    pub fn build(sequences: &[Vec<u64>], u: u64, kind: MatrixKind) -> Result<(Vec<u64>, Self)> {
        if sequences.is_empty() {
            return Err(Error::InvalidInput("need at least one sequence".into()));
        }
        for (i, s) in sequences.iter().enumerate() {
            if s.is_empty() {
                return Err(Error::InvalidInput(format!("sequence {i} is empty")));
            }
            check_sorted(s, u, true)?;
        }
        let mut alphabet: Vec<u64> = sequences.iter().flatten().copied().collect();
        alphabet.sort_unstable();
        alphabet.dedup();
        let rows: Vec<Vec<usize>> = sequences
            .iter()
            .map(|s| {
                s.iter()
                    .map(|x| alphabet.partition_point(|a| a < x))
                    .collect()
            })
            .collect();
        let mut idx = Self::from_rows(&rows, alphabet.len(), kind)?;
        let mut bits = BitArray::new(u as usize);
        for &a in &alphabet {
            bits.set(a as usize, true);
        }
        idx.alphabet = Some(BitVector::with_options(bits, BuildOptions::rank_only()));
        Ok((alphabet, idx))
    }

    /// Builds from rows given as strictly increasing column indices in `[0, t)`;
    /// the alphabet ranking is left to the caller.
    pub(crate) fn from_rows(rows: &[Vec<usize>], t: usize, kind: MatrixKind) -> Result<Self> {
        let c = rows.len();
        let r: usize = rows.iter().map(Vec::len).sum();
        if c == 0 || rows.iter().any(Vec::is_empty) {
            return Err(Error::InvalidInput(
                "every row needs at least one column".into(),
            ));
        }
        let cells = c as u64 * t as u64;
        if cells > (r as u64) * (r as u64) {
            return Err(Error::InvalidInput(format!(
                "matrix of {cells} cells exceeds r² for r = {r}"
            )));
        }
        let dense = match kind {
            MatrixKind::Dense => true,
            MatrixKind::Sparse => false,
            MatrixKind::Auto => cells <= 64 * r as u64,
        };
        let positions = rows.iter().enumerate().flat_map(|(i, row)| {
            row.iter().map(move |&j| {
                debug_assert!(j < t);
                (i * t + j) as u64
            })
        });
        let matrix = if dense {
            let mut bits = BitArray::new(cells as usize);
            for p in positions {
                bits.set(p as usize, true);
            }
            Matrix::Dense(BitVector::with_options(bits, BuildOptions::rank_only()))
        } else {
            let pos: Vec<u64> = positions.collect();
            check_sorted(&pos, cells, true)?;
            Matrix::Sparse(EliasFano::encode(&pos, cells, None)?)
        };
        Ok(MultirankIndex {
            c,
            t,
            r,
            matrix,
            alphabet: None,
        })
    }

    pub fn rows(&self) -> usize {
        self.c
    }

    pub fn alphabet_size(&self) -> usize {
        self.t
    }

    pub fn total(&self) -> usize {
        self.r
    }

    pub fn is_dense(&self) -> bool {
        matches!(self.matrix, Matrix::Dense(_))
    }

    /// Ones among the first `λ` columns of row `i`.
    pub fn query(&self, i: usize, lambda: usize) -> Result<usize> {
        if i >= self.c {
            return Err(out_of_range(i, self.c));
        }
        if lambda > self.t {
            return Err(out_of_range(lambda, self.t + 1));
        }
        Ok(self.mr(i, lambda))
    }

    #[inline]
    pub(crate) fn mr(&self, i: usize, lambda: usize) -> usize {
        if lambda == 0 {
            return 0;
        }
        let base = (i * self.t) as u64;
        self.matrix.rank1(base + lambda as u64) - self.matrix.rank1(base)
    }

    /// Elements of sequence `i` that are `≤ q`, ranking `q` with the given alphabet ranker.
    pub fn count_le_with<A: AlphabetRanker + ?Sized>(
        &self,
        ranker: &A,
        i: usize,
        q: u64,
    ) -> Result<usize> {
        self.query(i, ranker.count_le(q))
    }

    /// Elements of sequence `i` that are `≤ q`, using the stored alphabet.
    pub fn count_le(&self, i: usize, q: u64) -> Result<usize> {
        let alpha = self
            .alphabet
            .as_ref()
            .ok_or(Error::Unsupported("no stored alphabet"))?;
        let lambda = alpha.rank1((q as usize).saturating_add(1).min(alpha.len()));
        self.query(i, lambda)
    }

    /// Matrix bits plus the stored alphabet, if any.
    pub fn space_bits(&self) -> u64 {
        self.matrix.space_bits() + self.alphabet.as_ref().map_or(0, BitVector::space_bits)
    }
}

impl Persist for MultirankIndex {
    const TAG: Tag = Tag::Multirank;

    fn write_payload(&self, w: &mut Writer) {
        w.u64(self.c as u64);
        w.u64(self.t as u64);
        w.u64(self.r as u64);
        match &self.matrix {
            Matrix::Dense(bv) => {
                w.u8(0);
                bv.write(w);
            }
            Matrix::Sparse(ef) => {
                w.u8(1);
                ef.write_payload(w);
            }
        }
        match &self.alphabet {
            Some(a) => {
                w.u8(1);
                a.write(w);
            }
            None => w.u8(0),
        }
    }

    fn read_payload(r: &mut Reader<'_>) -> Result<Self> {
        let c = r.usize()?;
        let t = r.usize()?;
        let total = r.usize()?;
        let matrix = match r.u8()? {
            0 => Matrix::Dense(BitVector::read(r)?),
            1 => Matrix::Sparse(EliasFano::read_payload(r)?),
            k => return Err(Error::Format(format!("unknown matrix kind {k}"))),
        };
        let alphabet = if r.bool()? {
            Some(BitVector::read(r)?)
        } else {
            None
        };
        let (len, ones) = match &matrix {
            Matrix::Dense(bv) => (bv.len() as u64, bv.count_ones()),
            Matrix::Sparse(ef) => (ef.universe(), ef.len()),
        };
        if ones != total || len != (c * t) as u64 {
            return Err(Error::Format("multirank matrix inconsistent".into()));
        }
        Ok(MultirankIndex {
            c,
            t,
            r: total,
            matrix,
            alphabet,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reforacle::o_multirank;

    fn example() -> Vec<Vec<u64>> {
        vec![vec![2, 5], vec![2, 7], vec![0, 5]]
    }

    fn row_string(idx: &MultirankIndex) -> String {
        match &idx.matrix {
            Matrix::Dense(bv) => bv
                .bits()
                .iter()
                .map(|b| if b { '1' } else { '0' })
                .collect(),
            Matrix::Sparse(_) => unreachable!(),
        }
    }

    #[test]
    fn worked_example() {
        for kind in [MatrixKind::Dense, MatrixKind::Sparse] {
            let (alpha, idx) = MultirankIndex::build(&example(), 8, kind).unwrap();
            assert_eq!(alpha, vec![0, 2, 5, 7]);
            assert_eq!(idx.alphabet_size(), 4);
            if kind == MatrixKind::Dense {
                assert_eq!(row_string(&idx), "011001011010");
            }
            assert_eq!(alpha.count_le(6), 3);
            assert_eq!(idx.query(1, 3).unwrap(), 1);
            assert_eq!(idx.count_le(1, 6).unwrap(), 1);
            assert_eq!(idx.count_le_with(&alpha, 1, 6).unwrap(), 1);
            for i in 0..3 {
                assert_eq!(idx.query(i, 0).unwrap(), 0);
                assert_eq!(idx.query(i, 4).unwrap(), 2);
            }
            assert!(idx.query(3, 0).is_err());
            assert!(idx.query(0, 5).is_err());
        }
    }

    #[test]
    fn degenerate_inputs() {
        let (_, one) = MultirankIndex::build(&[vec![1, 4, 6]], 8, MatrixKind::Auto).unwrap();
        for q in 0..8 {
            assert_eq!(
                one.count_le(0, q).unwrap(),
                [1u64, 4, 6].iter().filter(|&&x| x <= q).count()
            );
        }
        let same = vec![vec![3, 4], vec![3, 4], vec![3, 4]];
        let (alpha, idx) = MultirankIndex::build(&same, 8, MatrixKind::Dense).unwrap();
        assert_eq!(alpha.len(), 2);
        assert_eq!(row_string(&idx), "111111");
        assert!(MultirankIndex::build(&[vec![1], vec![]], 8, MatrixKind::Auto).is_err());
        assert!(MultirankIndex::build(&[vec![3, 1]], 8, MatrixKind::Auto).is_err());
        assert!(MultirankIndex::build(&[], 8, MatrixKind::Auto).is_err());
    }

    #[test]
    fn exhaustive_tiny() {
        // every pair of non-empty subsets of [0, 5)
        let u = 5u64;
        let subsets: Vec<Vec<u64>> = (1u32..32)
            .map(|m| (0..u).filter(|b| (m >> b) & 1 == 1).collect())
            .collect();
        for a in &subsets {
            for b in &subsets {
                let seqs = vec![a.clone(), b.clone()];
                for kind in [MatrixKind::Dense, MatrixKind::Sparse] {
                    let (_, idx) = MultirankIndex::build(&seqs, u, kind).unwrap();
                    for i in 0..2 {
                        for q in 0..u {
                            assert_eq!(
                                idx.count_le(i, q).unwrap() as u64,
                                o_multirank(&seqs, i, q)
                            );
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn auto_threshold_and_roundtrip() {
        let seqs: Vec<Vec<u64>> = (0..200u64).map(|i| vec![i * 1000]).collect();
        let (_, idx) = MultirankIndex::build(&seqs, 200_000, MatrixKind::Auto).unwrap();
        assert!(!idx.is_dense());
        let back = MultirankIndex::from_bytes(&idx.to_bytes()).unwrap();
        assert_eq!(back, idx);
        let (_, idx) = MultirankIndex::build(&example(), 8, MatrixKind::Auto).unwrap();
        assert!(idx.is_dense());
        let w = idx.to_writer();
        assert_eq!(w.payload_bits(), idx.space_bits());
        assert_eq!(MultirankIndex::from_bytes(&w.into_bytes()).unwrap(), idx);
    }
}
