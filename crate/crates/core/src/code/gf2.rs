//! Rank of a parity-check matrix over GF(2).

use super::ParityCheckCode;

/// Rank of the binary parity-check matrix, by Gaussian elimination on
/// packed 64-bit rows.
pub fn gf2_rank(code: &ParityCheckCode) -> usize {
    let words = code.n_bits().div_ceil(64);
    let mut rows: Vec<Vec<u64>> = (0..code.n_checks())
        .map(|c| {
            let mut row = vec![0u64; words];
            for &b in code.check_neighbors(c) {
                row[b / 64] |= 1 << (b % 64);
            }
            row
        })
        .collect();

    let mut rank = 0;
    for col in 0..code.n_bits() {
        let (w, mask) = (col / 64, 1u64 << (col % 64));
        let Some(p) = (rank..rows.len()).find(|&r| rows[r][w] & mask != 0) else {
            continue;
        };
        rows.swap(rank, p);
        let pivot = rows[rank].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != rank && row[w] & mask != 0 {
                row.iter_mut().zip(&pivot).for_each(|(a, b)| *a ^= b);
            }
        }
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    rank
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn independent_rows() {
        let code = ParityCheckCode::from_dense(&[vec![1, 1, 0], vec![0, 1, 1]]).unwrap();
        assert_eq!(gf2_rank(&code), 2);
    }

    #[test]
    fn duplicated_row_keeps_rank() {
        let code =
            ParityCheckCode::from_dense(&[vec![1, 1, 0, 1], vec![0, 1, 1, 1], vec![1, 1, 0, 1]])
                .unwrap();
        assert_eq!(gf2_rank(&code), 2);
        // sum of the first two rows
        let code =
            ParityCheckCode::from_dense(&[vec![1, 1, 0, 1], vec![0, 1, 1, 1], vec![1, 0, 1, 0]])
                .unwrap();
        assert_eq!(gf2_rank(&code), 2);
    }

    #[test]
    fn wide_rows_cross_word_boundary() {
        let n = 130;
        let checks: Vec<Vec<usize>> = (0..n - 1).map(|i| vec![i, i + 1]).collect();
        let code = ParityCheckCode::from_checks(n, &checks).unwrap();
        assert_eq!(gf2_rank(&code), n - 1);
    }
}
