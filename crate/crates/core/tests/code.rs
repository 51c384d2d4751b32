use ldpc_relax::code::{build_qc_code, to_alist, AlistError, CodeError};
use ldpc_relax::{gf2_rank, parse_alist, tanner_155_64, HardWord, ParityCheckCode};
use proptest::prelude::*;

fn dense_syndrome(rows: &[Vec<u8>], bits: &[u8]) -> Vec<i8> {
    rows.iter()
        .map(|r| {
            let parity = r.iter().zip(bits).fold(0u8, |a, (&x, &y)| a ^ (x & y));
            1 - 2 * parity as i8
        })
        .collect()
}

/// Rank over GF(2) by elimination on a dense byte matrix.
fn dense_rank(mut rows: Vec<Vec<u8>>) -> usize {
    let cols = rows.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..rows.len()).find(|&r| rows[r][c] == 1) else {
            continue;
        };
        rows.swap(rank, p);
        let pivot = rows[rank].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != rank && row[c] == 1 {
                row.iter_mut().zip(&pivot).for_each(|(a, &b)| *a ^= b);
            }
        }
        rank += 1;
    }
    rank
}

#[test]
fn tanner_code_shape() {
    let code = tanner_155_64();
    assert_eq!(
        (code.n_bits(), code.n_checks(), code.n_edges()),
        (155, 93, 465)
    );
    assert!((0..155).all(|b| code.bit_degree(b) == 3));
    assert!((0..93).all(|c| code.check_degree(c) == 5));
    assert_eq!(gf2_rank(&code), 91);
    assert_eq!(dense_rank(code.to_dense()), 91);
}

#[test]
fn tanner_code_has_girth_above_four() {
    let code = tanner_155_64();
    for a in 0..93 {
        for b in a + 1..93 {
            let shared = code
                .check_neighbors(a)
                .iter()
                .filter(|x| code.check_neighbors(b).contains(x))
                .count();
            assert!(shared <= 1, "checks {a} and {b} share {shared} bits");
        }
    }
}

#[test]
fn qc_rejects_bad_tables() {
    assert!(matches!(
        build_qc_code(5, &[vec![1, 7]]),
        Err(CodeError::ExponentOutOfRange { .. })
    ));
    assert!(build_qc_code(5, &[vec![1, 2], vec![3]]).is_err());
}

#[test]
fn syndrome_rejects_wrong_length() {
    let code = tanner_155_64();
    assert!(code.syndrome(&HardWord::all_plus(154)).is_err());
    assert!(code
        .syndrome(&HardWord::all_plus(155))
        .unwrap()
        .iter()
        .all(|&s| s == 1));
}

#[test]
fn alist_errors_carry_line_numbers() {
    let text = to_alist(&tanner_155_64()).replacen("\n3 3", "\n3 x", 1);
    match parse_alist(&text) {
        Err(AlistError::InvalidInteger { line, token }) => {
            assert_eq!(token, "x");
            assert_eq!(line, 3);
        }
        other => panic!("{other:?}"),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn syndrome_matches_dense_product(bits in prop::collection::vec(0u8..2, 155)) {
        let code = tanner_155_64();
        let word = HardWord::from_binary(&bits);
        prop_assert_eq!(code.syndrome(&word).unwrap(), dense_syndrome(&code.to_dense(), &bits));
        let s = dense_syndrome(&code.to_dense(), &bits);
        prop_assert_eq!(code.is_codeword(word.spins()), s.iter().all(|&v| v == 1));
    }

    #[test]
    fn alist_round_trip(rows in prop::collection::vec(prop::collection::vec(0u8..2, 9), 1..7)) {
        // make sure every bit lies in at least one check
        let mut rows = rows;
        let n = rows[0].len();
        let mut extra = vec![0u8; n];
        for b in 0..n {
            if rows.iter().all(|r| r[b] == 0) {
                extra[b] = 1;
            }
        }
        if extra.contains(&1) {
            rows.push(extra);
        }
        let rows: Vec<Vec<u8>> = rows.into_iter().filter(|r| r.contains(&1)).collect();
        let code = ParityCheckCode::from_dense(&rows).unwrap();
        let text = to_alist(&code);
        let back = parse_alist(&text).unwrap();
        prop_assert_eq!(back.to_dense(), rows.clone());
        prop_assert_eq!(to_alist(&back), text);
        prop_assert_eq!(gf2_rank(&code), dense_rank(rows));
    }
}
