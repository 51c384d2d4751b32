//! Check-to-bit rules and the per-bit relaxed update.

use crate::code::ParityCheckCode;
use crate::scalar::{clamped_atanh, Scalar};

use super::Variant;

/// `atanh(∏_{j∈α, j≠i} tanh η_{jα})` for one edge, computed directly.
pub fn check_to_bit_sum_product<T: Scalar>(
    eta: &[T],
    code: &ParityCheckCode,
    bit: usize,
    check: usize,
) -> T {
    let prod = code
        .check_neighbors(check)
        .iter()
        .zip(code.check_edges(check))
        .filter(|(&j, _)| j != bit)
        .fold(T::one(), |acc, (_, &e)| acc * eta[e].tanh());
    clamped_atanh(prod)
}

/// `∏ sign η_{jα} · min |η_{jα}|` over `j∈α, j≠i`, computed directly.
pub fn check_to_bit_min_sum<T: Scalar>(
    eta: &[T],
    code: &ParityCheckCode,
    bit: usize,
    check: usize,
) -> T {
    let (sign, mag) = code
        .check_neighbors(check)
        .iter()
        .zip(code.check_edges(check))
        .filter(|(&j, _)| j != bit)
        .fold((T::one(), T::infinity()), |(s, m), (_, &e)| {
            (s * sign_of(eta[e]), m.min(eta[e].abs()))
        });
    if mag.is_infinite() {
        // a degree-1 check sends the unit-product limit
        return clamped_atanh(T::one());
    }
    sign * mag
}

#[inline]
fn sign_of<T: Scalar>(x: T) -> T {
    if x < T::zero() {
        -T::one()
    } else {
        T::one()
    }
}

/// Fills `out[e]` with the check-to-bit value `C(α→i)` for every edge,
/// using forward/backward exclusive aggregates per check. `scratch` is
/// resized as needed.
pub(crate) fn all_check_to_bit<T: Scalar>(
    code: &ParityCheckCode,
    eta: &[T],
    variant: Variant,
    out: &mut [T],
    scratch: &mut Vec<T>,
) {
    debug_assert_eq!(eta.len(), code.n_edges());
    debug_assert_eq!(out.len(), code.n_edges());
    for c in 0..code.n_checks() {
        let edges = code.check_edges(c);
        let k = edges.len();
        match variant {
            Variant::SumProduct => {
                scratch.clear();
                scratch.extend(edges.iter().map(|&e| eta[e].tanh()));
                // forward pass stores prefix products in `out`
                let mut acc = T::one();
                for (j, &e) in edges.iter().enumerate() {
                    out[e] = acc;
                    acc = acc * scratch[j];
                }
                let mut acc = T::one();
                for j in (0..k).rev() {
                    let e = edges[j];
                    out[e] = clamped_atanh(out[e] * acc);
                    acc = acc * scratch[j];
                }
            }
            Variant::MinSum => {
                scratch.clear();
                // prefix (sign, min) pairs packed as two entries each
                let mut sign = T::one();
                let mut mag = T::infinity();
                for &e in edges {
                    scratch.push(sign);
                    scratch.push(mag);
                    sign = sign * sign_of(eta[e]);
                    mag = mag.min(eta[e].abs());
                }
                let mut sign = T::one();
                let mut mag = T::infinity();
                for j in (0..k).rev() {
                    let e = edges[j];
                    let m = scratch[2 * j + 1].min(mag);
                    out[e] = if m.is_infinite() {
                        clamped_atanh(T::one())
                    } else {
                        scratch[2 * j] * sign * m
                    };
                    sign = sign * sign_of(eta[e]);
                    mag = mag.min(eta[e].abs());
                }
            }
        }
    }
}

/// `h_i + Σ_{β∋i, β≠α} C(β→i)` for the `k`-th edge of a bit.
#[inline]
pub(crate) fn extrinsic<T: Scalar>(h: T, checks: &[T], k: usize) -> T {
    checks
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != k)
        .fold(h, |acc, (_, &c)| acc + c)
}

/// Solves the implicit relaxed update for one bit.
///
/// With `R_α = h + Σ_{β≠α} C_β + (1/Δ) Σ_β η_β` the new messages satisfy
/// `η'_α + (1/Δ) Σ_β η'_β = R_α`; summing over `α` gives
/// `S = Σ_β η'_β = Σ_α R_α / (1 + q/Δ)` and then `η'_α = R_α - S/Δ`.
#[inline]
pub(crate) fn relaxed_bit_update<T: Scalar>(
    h: T,
    checks: &[T],
    old: &[T],
    inv_delta: T,
    out: &mut [T],
) {
    let q = T::from_usize(checks.len()).expect("degree");
    let coupling = inv_delta * old.iter().copied().sum::<T>();
    let mut total = T::zero();
    for (k, o) in out.iter_mut().enumerate() {
        let r = extrinsic(h, checks, k) + coupling;
        *o = r;
        total = total + r;
    }
    let s = total / (T::one() + q * inv_delta);
    let shift = inv_delta * s;
    for o in out.iter_mut() {
        *o = (*o - shift).clamp_message();
    }
}

/// Plain flooding BP update `η'_α = h + Σ_{β≠α} C_β` for one bit.
#[inline]
pub(crate) fn standard_bit_update<T: Scalar>(h: T, checks: &[T], out: &mut [T]) {
    for (k, o) in out.iter_mut().enumerate() {
        *o = extrinsic(h, checks, k).clamp_message();
    }
}
