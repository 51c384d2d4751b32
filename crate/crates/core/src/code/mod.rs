//! LDPC codes as sparse Tanner graphs.
//!
//! A [`ParityCheckCode`] stores the bipartite graph in both directions.
//! Edges are numbered bit-major: all edges of bit 0 first (in the order of
//! its neighbor list), then bit 1, and so on. Message buffers elsewhere in
//! the crate are indexed by these edge ids.

mod alist;
mod gf2;
mod qc;

use std::ops::Range;

use thiserror::Error;

pub use alist::{parse_alist, to_alist, AlistError};
pub use gf2::gf2_rank;
pub use qc::{build_qc_code, tanner_155_64, TANNER_CIRCULANT};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CodeError {
    #[error("bit index {index} out of range (n_bits = {n_bits}) in check {check}")]
    BitOutOfRange {
        check: usize,
        index: usize,
        n_bits: usize,
    },
    #[error("check index {index} out of range (n_checks = {n_checks}) for bit {bit}")]
    CheckOutOfRange {
        bit: usize,
        index: usize,
        n_checks: usize,
    },
    #[error("duplicate edge between bit {bit} and check {check}")]
    DuplicateEdge { bit: usize, check: usize },
    #[error("bit {0} is not connected to any check")]
    IsolatedBit(usize),
    #[error("bit and check adjacency lists disagree at bit {bit}, check {check}")]
    InconsistentAdjacency { bit: usize, check: usize },
    #[error("bit {bit} neighbor list has {found} entries, check lists imply {expected}")]
    BitDegreeMismatch {
        bit: usize,
        expected: usize,
        found: usize,
    },
    #[error("circulant exponent {value} at ({row}, {col}) not in [0, {size})")]
    ExponentOutOfRange {
        row: usize,
        col: usize,
        value: usize,
        size: usize,
    },
    #[error("exponent table is empty or ragged")]
    BadExponentTable,
    #[error("circulant size must be positive")]
    ZeroCirculant,
    #[error("word has length {found}, code has {expected} bits")]
    LengthMismatch { expected: usize, found: usize },
    #[error("spin values must be +1 or -1, got {0}")]
    InvalidSpin(i8),
}

/// Sparse bipartite graph of bits and parity checks.
///
/// Immutable once built; share it across threads by reference.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParityCheckCode {
    n_bits: usize,
    n_checks: usize,
    // CSR by bit; edge ids are positions in `edge_check`
    bit_offsets: Vec<usize>,
    edge_check: Vec<usize>,
    edge_bit: Vec<usize>,
    // CSR by check; `check_edges[k]` is the edge id of `check_bits[k]`
    check_offsets: Vec<usize>,
    check_bits: Vec<usize>,
    check_edges: Vec<usize>,
}

impl ParityCheckCode {
    /// Builds a code from the bit lists of each check. Bit neighbor lists are
    /// derived in ascending check order. Isolated bits are rejected.
    pub fn from_checks(n_bits: usize, checks: &[Vec<usize>]) -> Result<Self, CodeError> {
        Self::build(n_bits, None, checks, false)
    }

    /// Like [`from_checks`](Self::from_checks) but permits bits with no
    /// check. Only meant for degenerate graphs used by exact oracles.
    pub fn with_isolated_bits(n_bits: usize, checks: &[Vec<usize>]) -> Result<Self, CodeError> {
        Self::build(n_bits, None, checks, true)
    }

    /// Builds a code from both adjacency directions, keeping the given order
    /// of every list. The two directions must describe the same edge set.
    pub fn from_lists(bits: &[Vec<usize>], checks: &[Vec<usize>]) -> Result<Self, CodeError> {
        Self::build(bits.len(), Some(bits), checks, false)
    }

    /// Builds a code from a dense 0/1 matrix (rows are checks).
    pub fn from_dense(rows: &[Vec<u8>]) -> Result<Self, CodeError> {
        let n_bits = rows.first().map_or(0, Vec::len);
        let checks: Vec<Vec<usize>> = rows
            .iter()
            .map(|r| {
                r.iter()
                    .enumerate()
                    .filter(|(_, &v)| v != 0)
                    .map(|(i, _)| i)
                    .collect()
            })
            .collect();
        Self::from_checks(n_bits, &checks)
    }

    fn build(
        n_bits: usize,
        bit_lists: Option<&[Vec<usize>]>,
        checks: &[Vec<usize>],
        allow_isolated: bool,
    ) -> Result<Self, CodeError> {
        let n_checks = checks.len();
        let mut derived: Vec<Vec<usize>> = vec![Vec::new(); n_bits];
        for (c, list) in checks.iter().enumerate() {
            for &b in list {
                if b >= n_bits {
                    return Err(CodeError::BitOutOfRange {
                        check: c,
                        index: b,
                        n_bits,
                    });
                }
                if derived[b].last() == Some(&c) {
                    return Err(CodeError::DuplicateEdge { bit: b, check: c });
                }
                derived[b].push(c);
            }
        }

        let bit_lists: Vec<Vec<usize>> = match bit_lists {
            None => derived,
            Some(given) => {
                for (b, list) in given.iter().enumerate() {
                    let mut seen = Vec::with_capacity(list.len());
                    for &c in list {
                        if c >= n_checks {
                            return Err(CodeError::CheckOutOfRange {
                                bit: b,
                                index: c,
                                n_checks,
                            });
                        }
                        if seen.contains(&c) {
                            return Err(CodeError::DuplicateEdge { bit: b, check: c });
                        }
                        if !derived[b].contains(&c) {
                            return Err(CodeError::InconsistentAdjacency { bit: b, check: c });
                        }
                        seen.push(c);
                    }
                    if list.len() != derived[b].len() {
                        return Err(CodeError::BitDegreeMismatch {
                            bit: b,
                            expected: derived[b].len(),
                            found: list.len(),
                        });
                    }
                }
                given.to_vec()
            }
        };

        if !allow_isolated {
            if let Some(b) = bit_lists.iter().position(Vec::is_empty) {
                return Err(CodeError::IsolatedBit(b));
            }
        }

        let mut bit_offsets = Vec::with_capacity(n_bits + 1);
        let mut edge_check = Vec::new();
        let mut edge_bit = Vec::new();
        bit_offsets.push(0);
        for (b, list) in bit_lists.iter().enumerate() {
            edge_check.extend_from_slice(list);
            edge_bit.extend(std::iter::repeat_n(b, list.len()));
            bit_offsets.push(edge_check.len());
        }

        let mut check_offsets = Vec::with_capacity(n_checks + 1);
        let mut check_bits = Vec::with_capacity(edge_check.len());
        let mut check_edges = Vec::with_capacity(edge_check.len());
        check_offsets.push(0);
        for (c, list) in checks.iter().enumerate() {
            for &b in list {
                let r = bit_offsets[b]..bit_offsets[b + 1];
                let e = r.start
                    + edge_check[r]
                        .iter()
                        .position(|&x| x == c)
                        .expect("edge present in both directions");
                check_bits.push(b);
                check_edges.push(e);
            }
            check_offsets.push(check_bits.len());
        }

        Ok(Self {
            n_bits,
            n_checks,
            bit_offsets,
            edge_check,
            edge_bit,
            check_offsets,
            check_bits,
            check_edges,
        })
    }

    #[inline]
    pub fn n_bits(&self) -> usize {
        self.n_bits
    }

    #[inline]
    pub fn n_checks(&self) -> usize {
        self.n_checks
    }

    #[inline]
    pub fn n_edges(&self) -> usize {
        self.edge_check.len()
    }

    /// Checks adjacent to `bit`, in neighbor-list order.
    #[inline]
    pub fn bit_neighbors(&self, bit: usize) -> &[usize] {
        &self.edge_check[self.bit_edges(bit)]
    }

    /// Edge ids of `bit`; contiguous because ids are bit-major.
    #[inline]
    pub fn bit_edges(&self, bit: usize) -> Range<usize> {
        self.bit_offsets[bit]..self.bit_offsets[bit + 1]
    }

    /// Bits adjacent to `check`, in neighbor-list order.
    #[inline]
    pub fn check_neighbors(&self, check: usize) -> &[usize] {
        &self.check_bits[self.check_offsets[check]..self.check_offsets[check + 1]]
    }

    /// Edge ids of `check`, aligned with [`check_neighbors`](Self::check_neighbors).
    #[inline]
    pub fn check_edges(&self, check: usize) -> &[usize] {
        &self.check_edges[self.check_offsets[check]..self.check_offsets[check + 1]]
    }

    #[inline]
    pub fn bit_degree(&self, bit: usize) -> usize {
        self.bit_offsets[bit + 1] - self.bit_offsets[bit]
    }

    #[inline]
    pub fn check_degree(&self, check: usize) -> usize {
        self.check_offsets[check + 1] - self.check_offsets[check]
    }

    /// `(bit, check)` endpoints of an edge id.
    #[inline]
    pub fn edge_endpoints(&self, edge: usize) -> (usize, usize) {
        (self.edge_bit[edge], self.edge_check[edge])
    }

    /// Edge id joining `bit` and `check`, if they are neighbors.
    pub fn edge_id(&self, bit: usize, check: usize) -> Option<usize> {
        if bit >= self.n_bits {
            return None;
        }
        let r = self.bit_edges(bit);
        let start = r.start;
        self.edge_check[r]
            .iter()
            .position(|&c| c == check)
            .map(|p| start + p)
    }

    pub fn max_bit_degree(&self) -> usize {
        (0..self.n_bits)
            .map(|b| self.bit_degree(b))
            .max()
            .unwrap_or(0)
    }

    pub fn max_check_degree(&self) -> usize {
        (0..self.n_checks)
            .map(|c| self.check_degree(c))
            .max()
            .unwrap_or(0)
    }

    /// Dense 0/1 parity-check matrix, rows indexed by check.
    pub fn to_dense(&self) -> Vec<Vec<u8>> {
        let mut rows = vec![vec![0u8; self.n_bits]; self.n_checks];
        for (c, row) in rows.iter_mut().enumerate() {
            for &b in self.check_neighbors(c) {
                row[b] = 1;
            }
        }
        rows
    }

    /// Per-check spin products; `+1` means satisfied.
    pub fn syndrome(&self, word: &HardWord) -> Result<Vec<i8>, CodeError> {
        if word.len() != self.n_bits {
            return Err(CodeError::LengthMismatch {
                expected: self.n_bits,
                found: word.len(),
            });
        }
        Ok((0..self.n_checks)
            .map(|c| {
                self.check_neighbors(c)
                    .iter()
                    .map(|&b| word.spins[b])
                    .product()
            })
            .collect())
    }

    /// True when every check is satisfied. Slices must have length `n_bits`.
    pub fn is_codeword(&self, spins: &[i8]) -> bool {
        debug_assert_eq!(spins.len(), self.n_bits);
        (0..self.n_checks).all(|c| {
            self.check_neighbors(c)
                .iter()
                .fold(1i8, |acc, &b| acc * spins[b])
                == 1
        })
    }
}

/// A word in spin form: `+1` encodes logical 0, `-1` logical 1.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct HardWord {
    spins: Vec<i8>,
}

impl HardWord {
    pub fn new(spins: Vec<i8>) -> Result<Self, CodeError> {
        if let Some(&s) = spins.iter().find(|&&s| s != 1 && s != -1) {
            return Err(CodeError::InvalidSpin(s));
        }
        Ok(Self { spins })
    }

    /// The all-`+1` word (logical all-zeros), a codeword of every code.
    pub fn all_plus(n: usize) -> Self {
        Self { spins: vec![1; n] }
    }

    /// Converts logical bits (0/1) to spins.
    pub fn from_binary(bits: &[u8]) -> Self {
        Self {
            spins: bits.iter().map(|&b| if b == 0 { 1 } else { -1 }).collect(),
        }
    }

    pub fn to_binary(&self) -> Vec<u8> {
        self.spins.iter().map(|&s| u8::from(s < 0)).collect()
    }

    pub(crate) fn from_spins_unchecked(spins: Vec<i8>) -> Self {
        Self { spins }
    }

    #[inline]
    pub fn spins(&self) -> &[i8] {
        &self.spins
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.spins.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.spins.is_empty()
    }

    /// Number of positions where the two words differ.
    pub fn distance(&self, other: &HardWord) -> usize {
        self.spins
            .iter()
            .zip(&other.spins)
            .filter(|(a, b)| a != b)
            .count()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> ParityCheckCode {
        ParityCheckCode::from_dense(&[vec![1, 1, 0], vec![0, 1, 1]]).unwrap()
    }

    #[test]
    fn adjacency_both_directions() {
        let code = small();
        assert_eq!(code.n_bits(), 3);
        assert_eq!(code.n_checks(), 2);
        assert_eq!(code.n_edges(), 4);
        assert_eq!(code.bit_neighbors(1), &[0, 1]);
        assert_eq!(code.check_neighbors(1), &[1, 2]);
        for e in 0..code.n_edges() {
            let (b, c) = code.edge_endpoints(e);
            assert_eq!(code.edge_id(b, c), Some(e));
        }
        assert_eq!(code.edge_id(0, 1), None);
        // bit-major numbering
        assert_eq!(code.check_edges(0), &[0, 1]);
        assert_eq!(code.check_edges(1), &[2, 3]);
    }

    #[test]
    fn rejects_duplicates_and_isolated() {
        assert_eq!(
            ParityCheckCode::from_checks(2, &[vec![0, 0, 1]]),
            Err(CodeError::DuplicateEdge { bit: 0, check: 0 })
        );
        assert_eq!(
            ParityCheckCode::from_checks(3, &[vec![0, 1]]),
            Err(CodeError::IsolatedBit(2))
        );
        assert!(ParityCheckCode::with_isolated_bits(3, &[vec![0, 1]]).is_ok());
        assert!(matches!(
            ParityCheckCode::from_checks(2, &[vec![0, 2]]),
            Err(CodeError::BitOutOfRange { .. })
        ));
    }

    #[test]
    fn from_lists_checks_consistency() {
        let checks = vec![vec![0, 1], vec![1, 2]];
        let bits = vec![vec![0], vec![1, 0], vec![1]];
        let code = ParityCheckCode::from_lists(&bits, &checks).unwrap();
        assert_eq!(code.bit_neighbors(1), &[1, 0]);
        let bad = vec![vec![0], vec![1], vec![1]];
        assert!(matches!(
            ParityCheckCode::from_lists(&bad, &checks),
            Err(CodeError::BitDegreeMismatch { bit: 1, .. })
        ));
        let wrong = vec![vec![1], vec![1, 0], vec![1]];
        assert!(matches!(
            ParityCheckCode::from_lists(&wrong, &checks),
            Err(CodeError::InconsistentAdjacency { bit: 0, check: 1 })
        ));
    }

    #[test]
    fn syndrome_examples() {
        let code = small();
        let w = HardWord::new(vec![1, -1, 1]).unwrap();
        assert_eq!(code.syndrome(&w).unwrap(), vec![-1, -1]);
        assert_eq!(code.syndrome(&HardWord::all_plus(3)).unwrap(), vec![1, 1]);
        assert!(code.syndrome(&HardWord::all_plus(4)).is_err());
        assert!(code.is_codeword(&[-1, -1, -1]));
        assert!(!code.is_codeword(&[1, -1, 1]));
    }

    #[test]
    fn hard_word_validation() {
        assert_eq!(HardWord::new(vec![1, 0]), Err(CodeError::InvalidSpin(0)));
        let w = HardWord::from_binary(&[0, 1, 1]);
        assert_eq!(w.spins(), &[1, -1, -1]);
        assert_eq!(w.to_binary(), vec![0, 1, 1]);
        assert_eq!(w.distance(&HardWord::all_plus(3)), 2);
    }

    #[test]
    fn brute_force_codewords_have_trivial_syndrome() {
        // Hamming(7,4)
        let code = ParityCheckCode::from_dense(&[
            vec![1, 0, 1, 0, 1, 0, 1],
            vec![0, 1, 1, 0, 0, 1, 1],
            vec![0, 0, 0, 1, 1, 1, 1],
        ])
        .unwrap();
        let h = code.to_dense();
        let mut found = 0;
        for x in 0u32..128 {
            let bits: Vec<u8> = (0..7).map(|i| ((x >> i) & 1) as u8).collect();
            let dense_ok = h
                .iter()
                .all(|row| row.iter().zip(&bits).map(|(a, b)| a * b).sum::<u8>() % 2 == 0);
            if dense_ok {
                found += 1;
                let w = HardWord::from_binary(&bits);
                assert!(code.syndrome(&w).unwrap().iter().all(|&s| s == 1));
            }
        }
        assert_eq!(found, 16);
    }
}
