//! Reference oracles for testing `ldpc-relax`: random cycle-free codes,
//! their exact BP fixed points and brute-force partition functions.
//! Nothing here calls the decoder; edge ids are only used to lay results
//! out in library order. The acceptance suite lives in `tests/acceptance.rs`.

use ldpc_relax::ParityCheckCode;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// A cycle-free code plus the check lists it was built from.
pub struct Tree {
    pub n_bits: usize,
    pub checks: Vec<Vec<usize>>,
    pub code: ParityCheckCode,
}

impl Tree {
    /// Checks containing `bit`, in increasing order.
    pub fn checks_of(&self, bit: usize) -> Vec<usize> {
        (0..self.checks.len())
            .filter(|&c| self.checks[c].contains(&bit))
            .collect()
    }
}

/// Grows a tree by attaching checks to one existing bit plus 1..=3 fresh
/// bits, so every check has degree at least 2 and no cycle can form.
pub fn random_tree(rng: &mut impl Rng, max_bits: usize) -> Tree {
    assert!(max_bits >= 2);
    let mut n = 1;
    let mut checks = Vec::new();
    while n < max_bits {
        let fresh = rng.random_range(1..=3).min(max_bits - n);
        let anchor = rng.random_range(0..n);
        let mut check = vec![anchor];
        check.extend(n..n + fresh);
        n += fresh;
        checks.push(check);
        if n >= 2 && rng.random_bool(0.15) {
            break;
        }
    }
    let code = ParityCheckCode::from_checks(n, &checks).expect("tree is a valid code");
    Tree {
        n_bits: n,
        checks,
        code,
    }
}

pub fn random_trees(seed: u64, count: usize, max_bits: usize) -> Vec<Tree> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| random_tree(&mut rng, max_bits))
        .collect()
}

pub fn uniform_vec(rng: &mut impl Rng, n: usize, lo: f64, hi: f64) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(lo..hi)).collect()
}

/// Exact fixed point of `η_{iα} = h_i + Σ_{β∋i, β≠α} atanh ∏_{j∈β, j≠i} tanh η_{jβ}`
/// on a tree, by recursion away from each edge. Returned in library edge order.
pub fn tree_fixed_point(tree: &Tree, h: &[f64]) -> Vec<f64> {
    fn bit_to_check(t: &Tree, h: &[f64], bit: usize, check: usize) -> f64 {
        t.checks_of(bit)
            .into_iter()
            .filter(|&b| b != check)
            .map(|b| check_to_bit(t, h, b, bit))
            .sum::<f64>()
            + h[bit]
    }
    fn check_to_bit(t: &Tree, h: &[f64], check: usize, bit: usize) -> f64 {
        t.checks[check]
            .iter()
            .filter(|&&j| j != bit)
            .map(|&j| bit_to_check(t, h, j, check).tanh())
            .product::<f64>()
            .atanh()
    }
    let mut eta = vec![f64::NAN; tree.code.n_edges()];
    for (c, members) in tree.checks.iter().enumerate() {
        for &b in members {
            let e = tree.code.edge_id(b, c).expect("edge");
            eta[e] = bit_to_check(tree, h, b, c);
        }
    }
    eta
}

/// Independent sum-product check-to-bit value for edge `(bit, check)`.
pub fn oracle_check_to_bit(code: &ParityCheckCode, eta: &[f64], bit: usize, check: usize) -> f64 {
    code.check_neighbors(check)
        .iter()
        .filter(|&&j| j != bit)
        .map(|&j| eta[code.edge_id(j, check).unwrap()].tanh())
        .product::<f64>()
        .atanh()
}

/// Exact half-LLRs and `ln Z` for `p(σ) ∝ exp(Σ h_i σ_i)` on the code's
/// codewords, enumerated over a dense matrix.
pub fn enumerate(checks: &[Vec<usize>], n: usize, h: &[f64]) -> (Vec<f64>, f64) {
    let mut weights = Vec::new();
    for x in 0u32..1 << n {
        if checks
            .iter()
            .all(|c| c.iter().filter(|&&b| x >> b & 1 == 1).count() % 2 == 0)
        {
            let e: f64 = (0..n)
                .map(|i| if x >> i & 1 == 1 { -h[i] } else { h[i] })
                .sum();
            weights.push((x, e));
        }
    }
    let max = weights
        .iter()
        .map(|w| w.1)
        .fold(f64::NEG_INFINITY, f64::max);
    let z: f64 = weights.iter().map(|w| (w.1 - max).exp()).sum();
    let llr = (0..n)
        .map(|i| {
            let (mut p, mut m) = (0.0, 0.0);
            for &(x, e) in &weights {
                let w = (e - max).exp();
                if x >> i & 1 == 1 {
                    m += w;
                } else {
                    p += w;
                }
            }
            0.5 * (p / m).ln()
        })
        .collect();
    (llr, max + z.ln())
}
