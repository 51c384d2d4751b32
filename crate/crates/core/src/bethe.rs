//! Beliefs, Bethe free energy and an exact enumeration oracle.
//!
//! For the LDPC factor model
//! `f_α(σ_α) = exp(Σ_{i∈α} h_i σ_i / q_i) · δ(∏_{i∈α} σ_i, 1)`
//! the Bethe free energy of bit beliefs `b_i` and check beliefs `b_α` is
//!
//! ```text
//! U = -Σ_α Σ_σ b_α ln f_α
//! H = -Σ_α Σ_σ b_α ln b_α + Σ_i (q_i - 1) Σ_σ b_i ln b_i
//! F = U - H
//! ```
//!
//! Check tables are dense: entry `x` of the table for check `α` is the
//! configuration whose `p`-th neighbor has spin `-1` iff bit `p` of `x` is
//! set.

use thiserror::Error;

use crate::channel::LlrVector;
use crate::code::ParityCheckCode;
use crate::decoder::{check_to_bit, Variant};
use crate::scalar::Scalar;

/// Beliefs on a check table entry above this, on a configuration the factor
/// forbids, make the energy infinite.
pub const FORBIDDEN_MASS_TOL: f64 = 1e-12;

/// Largest code [`brute_force`] will enumerate.
pub const MAX_ENUMERATED_BITS: usize = 25;

/// Largest check degree for which dense tables are built.
pub const MAX_CHECK_DEGREE: usize = 20;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BetheError {
    #[error("check {check} puts mass {mass} on forbidden configuration {configuration:#b}")]
    InfiniteEnergy {
        check: usize,
        configuration: usize,
        mass: f64,
    },
    #[error("{n_bits} bits exceeds the enumeration limit of {limit}")]
    TooLarge { n_bits: usize, limit: usize },
    #[error("check {check} has degree {degree}, dense tables support at most {limit}")]
    CheckTooWide {
        check: usize,
        degree: usize,
        limit: usize,
    },
    #[error("{what} has length {found}, expected {expected}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },
}

/// Trial distributions on bits and checks.
#[derive(Debug, Clone, PartialEq)]
pub struct Beliefs<T> {
    /// `[b_i(+), b_i(-)]` per bit.
    pub bit_beliefs: Vec<[T; 2]>,
    /// `2^k` entries per check, indexed as described in the module docs.
    pub check_beliefs: Vec<Vec<T>>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FreeEnergyReport<T> {
    pub u_bethe: T,
    pub h_bethe: T,
    pub f_bethe: T,
    /// `max |Σ_{σ_α \ σ_i} b_α(σ_α) - b_i(σ_i)|` over checks, members and spins.
    pub consistency_residual: T,
}

#[inline]
fn spin_of<T: Scalar>(config: usize, p: usize) -> T {
    if config >> p & 1 == 1 {
        -T::one()
    } else {
        T::one()
    }
}

#[inline]
fn even(config: usize) -> bool {
    config.count_ones().is_multiple_of(2)
}

/// `b(+) = 1/(1+e^{-2m})`, `b(-) = 1/(1+e^{2m})`.
#[inline]
fn bit_pair<T: Scalar>(m: T) -> [T; 2] {
    let two = T::lit(2.0);
    [
        (T::one() + (-two * m).exp()).recip(),
        (T::one() + (two * m).exp()).recip(),
    ]
}

fn check_len(what: &'static str, expected: usize, found: usize) -> Result<(), BetheError> {
    if expected == found {
        Ok(())
    } else {
        Err(BetheError::DimensionMismatch {
            what,
            expected,
            found,
        })
    }
}

/// Beliefs implied by a set of check-to-bit values `C(α→i)` (by edge id).
///
/// Bits: `b_i(σ) ∝ exp(σ (h_i + Σ_α C(α→i)))`. Checks:
/// `b_α(σ_α) ∝ δ(∏σ, 1) ∏_{i∈α} exp(σ_i (h_i + Σ_{β≠α} C(β→i)))`, which is
/// `f_α` times the product of the incoming `μ_{iβ}`, `β ≠ α`, with
/// `μ_{iβ}(σ) ∝ exp(σ (C(β→i) + h_i/q_i))`.
pub fn beliefs_from_check_messages<T: Scalar>(
    code: &ParityCheckCode,
    h: &LlrVector<T>,
    checks: &[T],
) -> Result<Beliefs<T>, BetheError> {
    check_len("llr vector", code.n_bits(), h.len())?;
    check_len("check message vector", code.n_edges(), checks.len())?;
    let h = h.as_slice();

    let mut field = vec![T::zero(); code.n_bits()];
    let bit_beliefs = (0..code.n_bits())
        .map(|b| {
            let m = checks[code.bit_edges(b)].iter().fold(h[b], |a, &c| a + c);
            field[b] = m;
            bit_pair(m)
        })
        .collect();

    let mut check_beliefs = Vec::with_capacity(code.n_checks());
    let mut incoming = Vec::new();
    for c in 0..code.n_checks() {
        let k = code.check_degree(c);
        if k > MAX_CHECK_DEGREE {
            return Err(BetheError::CheckTooWide {
                check: c,
                degree: k,
                limit: MAX_CHECK_DEGREE,
            });
        }
        incoming.clear();
        incoming.extend(
            code.check_neighbors(c)
                .iter()
                .zip(code.check_edges(c))
                .map(|(&b, &e)| field[b] - checks[e]),
        );
        let log_w = |x: usize| -> T {
            incoming
                .iter()
                .enumerate()
                .fold(T::zero(), |a, (p, &l)| a + spin_of::<T>(x, p) * l)
        };
        let max = (0..1usize << k)
            .filter(|&x| even(x))
            .map(log_w)
            .fold(T::neg_infinity(), T::max);
        let mut table: Vec<T> = (0..1usize << k)
            .map(|x| {
                if even(x) {
                    (log_w(x) - max).exp()
                } else {
                    T::zero()
                }
            })
            .collect();
        let z: T = table.iter().copied().sum();
        table.iter_mut().for_each(|v| *v = *v / z);
        check_beliefs.push(table);
    }

    Ok(Beliefs {
        bit_beliefs,
        check_beliefs,
    })
}

/// Beliefs reconstructed from edge messages `η` with the sum-product rule.
pub fn beliefs_from_messages<T: Scalar>(
    code: &ParityCheckCode,
    h: &LlrVector<T>,
    eta: &[T],
) -> Result<Beliefs<T>, BetheError> {
    check_len("message vector", code.n_edges(), eta.len())?;
    let c = check_to_bit(code, eta, Variant::SumProduct);
    beliefs_from_check_messages(code, h, &c)
}

#[inline]
fn xlnx<T: Scalar>(x: T) -> T {
    if x > T::zero() {
        x * x.ln()
    } else {
        T::zero()
    }
}

/// Max violation of the bit/check marginal consistency constraints.
pub fn consistency_residual<T: Scalar>(code: &ParityCheckCode, beliefs: &Beliefs<T>) -> T {
    let mut worst = T::zero();
    for c in 0..code.n_checks() {
        let table = &beliefs.check_beliefs[c];
        for (p, &b) in code.check_neighbors(c).iter().enumerate() {
            let minus: T = table
                .iter()
                .enumerate()
                .filter(|(x, _)| x >> p & 1 == 1)
                .map(|(_, &v)| v)
                .sum();
            let plus: T = table
                .iter()
                .enumerate()
                .filter(|(x, _)| x >> p & 1 == 0)
                .map(|(_, &v)| v)
                .sum();
            let [bp, bm] = beliefs.bit_beliefs[b];
            worst = worst.max((plus - bp).abs()).max((minus - bm).abs());
        }
    }
    worst
}

/// Evaluates `U`, `H`, `F = U - H` and the consistency residual.
///
/// Uses `0 ln 0 = 0`; table entries with zero belief contribute nothing to
/// `U` even where `f_α = 0`. Bits outside every check carry their channel
/// evidence as a direct factor `exp(h_i σ_i)`.
pub fn bethe_free_energy<T: Scalar>(
    code: &ParityCheckCode,
    h: &LlrVector<T>,
    beliefs: &Beliefs<T>,
) -> Result<FreeEnergyReport<T>, BetheError> {
    check_len("llr vector", code.n_bits(), h.len())?;
    check_len("bit beliefs", code.n_bits(), beliefs.bit_beliefs.len())?;
    check_len(
        "check beliefs",
        code.n_checks(),
        beliefs.check_beliefs.len(),
    )?;
    let h = h.as_slice();
    let tol = T::lit(FORBIDDEN_MASS_TOL);

    let mut u = T::zero();
    let mut check_entropy = T::zero();
    for c in 0..code.n_checks() {
        let nb = code.check_neighbors(c);
        let table = &beliefs.check_beliefs[c];
        check_len("check table", 1 << nb.len(), table.len())?;
        let scaled: Vec<T> = nb
            .iter()
            .map(|&b| h[b] / T::from_usize(code.bit_degree(b)).expect("degree"))
            .collect();
        for (x, &bx) in table.iter().enumerate() {
            if !even(x) {
                if bx > tol {
                    return Err(BetheError::InfiniteEnergy {
                        check: c,
                        configuration: x,
                        mass: bx.to_f64().unwrap_or(f64::NAN),
                    });
                }
                continue;
            }
            if bx > T::zero() {
                let ln_f = scaled
                    .iter()
                    .enumerate()
                    .fold(T::zero(), |a, (p, &s)| a + spin_of::<T>(x, p) * s);
                u = u - bx * ln_f;
            }
            check_entropy = check_entropy - xlnx(bx);
        }
    }

    let mut bit_term = T::zero();
    for (b, &[bp, bm]) in beliefs.bit_beliefs.iter().enumerate() {
        let q = code.bit_degree(b);
        if q == 0 {
            u = u - (bp - bm) * h[b];
        }
        let qm1 = T::from_usize(q).expect("degree") - T::one();
        bit_term = bit_term + qm1 * (xlnx(bp) + xlnx(bm));
    }
    let h_bethe = check_entropy + bit_term;

    Ok(FreeEnergyReport {
        u_bethe: u,
        h_bethe,
        f_bethe: u - h_bethe,
        consistency_residual: consistency_residual(code, beliefs),
    })
}

/// Bethe report for the beliefs reconstructed from messages `η`.
pub fn free_energy_from_messages<T: Scalar>(
    code: &ParityCheckCode,
    h: &LlrVector<T>,
    eta: &[T],
) -> Result<FreeEnergyReport<T>, BetheError> {
    let beliefs = beliefs_from_messages(code, h, eta)?;
    bethe_free_energy(code, h, &beliefs)
}

/// Exact marginals and partition function by enumeration.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactSolution<T> {
    /// `[p_i(+), p_i(-)]` per bit.
    pub marginals: Vec<[T; 2]>,
    /// `½ ln p_i(+)/p_i(-)`, computed from log-sums.
    pub half_llrs: Vec<T>,
    pub log_z: T,
}

/// Enumerates all `2^N` configurations of `p(σ) ∝ ∏_α f_α(σ_α)`.
///
/// Since every bit's evidence is split evenly over its checks, the weight of
/// a configuration satisfying every check is `exp(Σ_i h_i σ_i)`; bits with no
/// check get the same direct factor.
pub fn brute_force<T: Scalar>(
    code: &ParityCheckCode,
    h: &LlrVector<T>,
) -> Result<ExactSolution<T>, BetheError> {
    let n = code.n_bits();
    if n > MAX_ENUMERATED_BITS {
        return Err(BetheError::TooLarge {
            n_bits: n,
            limit: MAX_ENUMERATED_BITS,
        });
    }
    check_len("llr vector", n, h.len())?;
    let h = h.as_slice();
    let masks: Vec<u32> = (0..code.n_checks())
        .map(|c| {
            code.check_neighbors(c)
                .iter()
                .fold(0u32, |m, &b| m | 1 << b)
        })
        .collect();
    let valid = |x: u32| masks.iter().all(|&m| (x & m).count_ones().is_multiple_of(2));
    let energy = |x: u32| {
        h.iter().enumerate().fold(
            T::zero(),
            |a, (i, &hi)| {
                if x >> i & 1 == 1 {
                    a - hi
                } else {
                    a + hi
                }
            },
        )
    };

    let max = (0..1u32 << n)
        .filter(|&x| valid(x))
        .map(energy)
        .fold(T::neg_infinity(), T::max);
    let mut total = T::zero();
    let mut plus = vec![T::zero(); n];
    let mut minus = vec![T::zero(); n];
    for x in (0..1u32 << n).filter(|&x| valid(x)) {
        let w = (energy(x) - max).exp();
        total = total + w;
        for i in 0..n {
            if x >> i & 1 == 1 {
                minus[i] = minus[i] + w;
            } else {
                plus[i] = plus[i] + w;
            }
        }
    }

    let half = T::lit(0.5);
    Ok(ExactSolution {
        marginals: plus
            .iter()
            .zip(&minus)
            .map(|(&p, &m)| [p / total, m / total])
            .collect(),
        half_llrs: plus
            .iter()
            .zip(&minus)
            .map(|(&p, &m)| half * (p.ln() - m.ln()))
            .collect(),
        log_z: max + total.ln(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pair_code() -> ParityCheckCode {
        ParityCheckCode::from_checks(2, &[vec![0, 1]]).unwrap()
    }

    #[test]
    fn symmetric_zero_state() {
        let code = pair_code();
        let h = LlrVector(vec![0.0f64; 2]);
        let b = beliefs_from_messages(&code, &h, &[0.0, 0.0]).unwrap();
        assert_eq!(b.bit_beliefs, vec![[0.5, 0.5]; 2]);
        assert_eq!(b.check_beliefs[0], vec![0.5, 0.0, 0.0, 0.5]);
    }

    #[test]
    fn degree_two_hand_values() {
        let code = pair_code();
        let h = LlrVector(vec![0.0f64; 2]);
        let b = Beliefs {
            bit_beliefs: vec![[0.5, 0.5]; 2],
            check_beliefs: vec![vec![0.5, 0.0, 0.0, 0.5]],
        };
        let r = bethe_free_energy(&code, &h, &b).unwrap();
        let ln2 = std::f64::consts::LN_2;
        assert_eq!(r.u_bethe, 0.0);
        assert!((r.h_bethe - ln2).abs() < 1e-15);
        assert!((r.f_bethe + ln2).abs() < 1e-15);
        assert_eq!(r.f_bethe, r.u_bethe - r.h_bethe);
        assert_eq!(r.consistency_residual, 0.0);
    }

    #[test]
    fn forbidden_mass_is_an_error() {
        let code = pair_code();
        let h = LlrVector(vec![0.0f64; 2]);
        let b = Beliefs {
            bit_beliefs: vec![[0.5, 0.5]; 2],
            check_beliefs: vec![vec![0.4, 0.1, 0.0, 0.5]],
        };
        assert!(matches!(
            bethe_free_energy(&code, &h, &b),
            Err(BetheError::InfiniteEnergy {
                check: 0,
                configuration: 1,
                ..
            })
        ));
    }

    #[test]
    fn odd_configurations_get_zero_belief() {
        let code = ParityCheckCode::from_checks(4, &[vec![0, 1, 2], vec![1, 2, 3]]).unwrap();
        let h = LlrVector(vec![0.3f64, -1.2, 0.8, 2.0]);
        let eta = [0.1, -0.4, 1.1, 0.7, -2.0, 0.5];
        let b = beliefs_from_messages(&code, &h, &eta).unwrap();
        for table in &b.check_beliefs {
            for (x, &v) in table.iter().enumerate() {
                assert_eq!(v == 0.0, x.count_ones() % 2 == 1, "config {x:#b}");
            }
            assert!((table.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
        for &[p, m] in &b.bit_beliefs {
            assert!((p + m - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn single_bit_posterior() {
        let code = ParityCheckCode::with_isolated_bits(1, &[]).unwrap();
        for &(x, s2) in &[(0.7f64, 2.0f64), (-0.2, 3.0)] {
            let h = LlrVector(vec![s2 * x]);
            let b = beliefs_from_messages(&code, &h, &[]).unwrap();
            let lik = |s: f64| (-s2 * (x - s).powi(2) / 2.0).exp();
            let bayes = lik(1.0) / (lik(1.0) + lik(-1.0));
            assert!((b.bit_beliefs[0][0] - bayes).abs() < 1e-12);

            let exact = brute_force(&code, &h).unwrap();
            assert!((exact.marginals[0][0] - bayes).abs() < 1e-12);
            assert!((exact.log_z - (2.0 * (s2 * x).cosh()).ln()).abs() < 1e-12);

            // F at the exact posterior is -ln Z
            let r = bethe_free_energy(&code, &h, &b).unwrap();
            assert!((r.f_bethe + exact.log_z).abs() < 1e-12);
        }
    }

    #[test]
    fn hamming_symmetric_marginals() {
        let code = ParityCheckCode::from_dense(&[
            vec![1, 0, 1, 0, 1, 0, 1],
            vec![0, 1, 1, 0, 0, 1, 1],
            vec![0, 0, 0, 1, 1, 1, 1],
        ])
        .unwrap();
        let exact = brute_force(&code, &LlrVector(vec![0.0f64; 7])).unwrap();
        for m in &exact.marginals {
            assert!((m[0] - 0.5).abs() < 1e-15);
        }
        assert!((exact.log_z - 16f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn log_z_adds_over_components() {
        let a = ParityCheckCode::from_checks(3, &[vec![0, 1, 2]]).unwrap();
        let b = ParityCheckCode::from_checks(2, &[vec![0, 1]]).unwrap();
        let joint = ParityCheckCode::from_checks(5, &[vec![0, 1, 2], vec![3, 4]]).unwrap();
        let ha = vec![0.4f64, -0.9, 1.3];
        let hb = vec![0.2f64, 0.7];
        let za = brute_force(&a, &LlrVector(ha.clone())).unwrap().log_z;
        let zb = brute_force(&b, &LlrVector(hb.clone())).unwrap().log_z;
        let hj: Vec<f64> = ha.into_iter().chain(hb).collect();
        let zj = brute_force(&joint, &LlrVector(hj)).unwrap().log_z;
        assert!((zj - za - zb).abs() < 1e-12);
    }

    #[test]
    fn enumeration_guard() {
        let checks: Vec<Vec<usize>> = (0..26).map(|i| vec![i, (i + 1) % 26]).collect();
        let code = ParityCheckCode::from_checks(26, &checks).unwrap();
        assert!(matches!(
            brute_force(&code, &LlrVector(vec![0.0f64; 26])),
            Err(BetheError::TooLarge { n_bits: 26, .. })
        ));
    }
}
