//! Quasi-cyclic codes built from tables of circulant permutation shifts.

use super::{CodeError, ParityCheckCode};

/// Circulant size of the [155, 64, 20] Tanner code.
pub const TANNER_CIRCULANT: usize = 31;

/// Builds the code whose parity matrix is an `R x C` array of `m x m`
/// blocks, block `(r, c)` being the identity with its columns rotated by
/// `exponents[r][c]`: row `k` of that block has its one in column
/// `(k + s) mod m`.
pub fn build_qc_code(m: usize, exponents: &[Vec<usize>]) -> Result<ParityCheckCode, CodeError> {
    if m == 0 {
        return Err(CodeError::ZeroCirculant);
    }
    let cols = exponents.first().map_or(0, Vec::len);
    if cols == 0 || exponents.iter().any(|row| row.len() != cols) {
        return Err(CodeError::BadExponentTable);
    }
    for (r, row) in exponents.iter().enumerate() {
        for (c, &s) in row.iter().enumerate() {
            if s >= m {
                return Err(CodeError::ExponentOutOfRange {
                    row: r,
                    col: c,
                    value: s,
                    size: m,
                });
            }
        }
    }

    let checks: Vec<Vec<usize>> = exponents
        .iter()
        .flat_map(|row| {
            (0..m).map(move |k| {
                row.iter()
                    .enumerate()
                    .map(|(c, &s)| c * m + (k + s) % m)
                    .collect()
            })
        })
        .collect();
    ParityCheckCode::from_checks(cols * m, &checks)
}

/// Shift table `s[r][c] = 5^r * 2^c mod 31`, `r < 3`, `c < 5`.
///
/// 2 has multiplicative order 5 and 5 has order 3 modulo 31, which gives the
/// (3,5)-regular [155, 64, 20] code.
pub fn tanner_exponents() -> Vec<Vec<usize>> {
    let m = TANNER_CIRCULANT;
    (0..3u32)
        .map(|r| {
            (0..5u32)
                .map(|c| (5usize.pow(r) * 2usize.pow(c)) % m)
                .collect()
        })
        .collect()
}

/// The [155, 64, 20] Tanner code: 93 checks over 155 bits.
pub fn tanner_155_64() -> ParityCheckCode {
    build_qc_code(TANNER_CIRCULANT, &tanner_exponents()).expect("static exponent table is valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_case() {
        let code = build_qc_code(1, &[vec![0]]).unwrap();
        assert_eq!((code.n_bits(), code.n_checks(), code.n_edges()), (1, 1, 1));
    }

    #[test]
    fn single_row_two_blocks() {
        let code = build_qc_code(3, &[vec![0, 1]]).unwrap();
        assert_eq!(code.n_checks(), 3);
        assert_eq!(code.n_bits(), 6);
        assert!((0..3).all(|c| code.check_degree(c) == 2));
        assert!((0..6).all(|b| code.bit_degree(b) == 1));
        // row 0: bit 0 from the identity block, bit 3 + 1 from the shifted one
        assert_eq!(code.check_neighbors(0), &[0, 4]);
        assert_eq!(code.check_neighbors(2), &[2, 3]);
    }

    #[test]
    fn blocks_are_permutations() {
        let exps = vec![vec![0, 2, 5], vec![3, 1, 6]];
        let m = 7;
        let code = build_qc_code(m, &exps).unwrap();
        for r in 0..2 {
            for c in 0..3 {
                let mut cols = Vec::new();
                for k in 0..m {
                    for &b in code.check_neighbors(r * m + k) {
                        if b / m == c {
                            cols.push(b % m);
                        }
                    }
                }
                cols.sort_unstable();
                assert_eq!(cols, (0..m).collect::<Vec<_>>(), "block ({r},{c})");
            }
        }
    }

    #[test]
    fn errors() {
        assert_eq!(build_qc_code(0, &[vec![0]]), Err(CodeError::ZeroCirculant));
        assert_eq!(build_qc_code(3, &[]), Err(CodeError::BadExponentTable));
        assert_eq!(
            build_qc_code(3, &[vec![0, 1], vec![2]]),
            Err(CodeError::BadExponentTable)
        );
        assert!(matches!(
            build_qc_code(3, &[vec![0, 3]]),
            Err(CodeError::ExponentOutOfRange {
                row: 0,
                col: 1,
                value: 3,
                size: 3
            })
        ));
    }

    #[test]
    fn tanner_table() {
        let t = tanner_exponents();
        assert_eq!(t[0], vec![1, 2, 4, 8, 16]);
        assert_eq!(t[1], vec![5, 10, 20, 9, 18]);
        assert_eq!(t[2], vec![25, 19, 7, 14, 28]);
    }

    #[test]
    fn tanner_regular() {
        let code = tanner_155_64();
        assert_eq!(code.n_bits(), 155);
        assert_eq!(code.n_checks(), 93);
        assert!((0..155).all(|b| code.bit_degree(b) == 3));
        assert!((0..93).all(|c| code.check_degree(c) == 5));
        assert_eq!(code.n_edges(), 465);
    }
}
