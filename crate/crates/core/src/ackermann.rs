//! Slow-growing functions: `λ_d`, the star operator, `α` and Ackermann's `A`.
//!
//! ```text
//! λ₁(n) = ⌊√n⌋      λ₂(n) = ⌈log₂ n⌉      λ_d = (λ_{d−2})*
//! f*(n) = min{i : f⁽ⁱ⁾(n) ≤ 1}
//! α(n)  = min{even d : λ_d(n) ≤ 6}
//! A(0, j) = 2j,  A(i, 1) = 2,  A(i, j) = A(i−1, A(i, j−1))
//! ```
//!
//! Everything is exact over any [`Count`]; use [`BigCount`] for inputs such
//! as `2^65536`.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use thiserror::Error;

use crate::scalar::Count;

pub type BigCount = BigUint;

/// Largest accepted input to `λ_d` and `α`, in bits.
pub const MAX_INPUT_BITS: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AckError {
    #[error("depth must be at least 1, got {0}")]
    BadDepth(u64),
    #[error("argument must be at least 1")]
    ZeroArgument,
    #[error("input has {0} bits, above the supported {MAX_INPUT_BITS}")]
    InputTooLarge(u64),
    #[error("value exceeds the cap")]
    BeyondCap,
}

fn check_input<C: Count>(n: &C) -> Result<(), AckError> {
    if n.is_zero() {
        return Err(AckError::ZeroArgument);
    }
    let bits = n.bit_length();
    if bits > MAX_INPUT_BITS {
        return Err(AckError::InputTooLarge(bits));
    }
    Ok(())
}

/// `λ_d(n)`.
pub fn lambda<C: Count>(d: u64, n: &C) -> Result<C, AckError> {
    if d < 1 {
        return Err(AckError::BadDepth(d));
    }
    check_input(n)?;
    Ok(lambda_inner(d, n, None).expect("uncapped evaluation always finishes"))
}

/// `λ_d(n)` if it is at most `cap`, else `None`; stops iterating as soon as
/// the answer is known to exceed `cap`.
pub fn lambda_capped<C: Count>(d: u64, n: &C, cap: u64) -> Result<Option<C>, AckError> {
    if d < 1 {
        return Err(AckError::BadDepth(d));
    }
    check_input(n)?;
    Ok(lambda_inner(d, n, Some(cap)))
}

fn lambda_inner<C: Count>(d: u64, n: &C, cap: Option<u64>) -> Option<C> {
    let value = match d {
        1 => n.sqrt(),
        2 => n.ceil_log2(),
        _ => return star(|x| lambda_inner(d - 2, x, None).expect("uncapped"), n, cap),
    };
    match cap {
        Some(c) if value > <C as Count>::from_u64(c) => None,
        _ => Some(value),
    }
}

/// `f*(n)`: iterations of `f` until the value is at most 1 (zero when `n ≤ 1`).
/// With a cap, gives up and returns `None` once more than `cap` steps are needed.
pub fn star<C: Count>(f: impl Fn(&C) -> C, n: &C, cap: Option<u64>) -> Option<C> {
    let mut x = n.clone();
    let mut steps: u64 = 0;
    while x > C::one() {
        if cap.is_some_and(|c| steps >= c) {
            return None;
        }
        x = f(&x);
        steps += 1;
    }
    Some(<C as Count>::from_u64(steps))
}

/// `α(n)`: the smallest even `d` with `λ_d(n) ≤ 6`.
pub fn alpha<C: Count>(n: &C) -> Result<u64, AckError> {
    check_input(n)?;
    let mut d = 2;
    loop {
        if lambda_inner(d, n, Some(6)).is_some() {
            return Ok(d);
        }
        d += 2;
    }
}

/// `A(i, j)`, or `BeyondCap` as soon as any intermediate value exceeds `cap`.
///
/// Evaluation runs on an explicit frame stack with a memo of finished
/// `(i, j)` pairs, so deep nesting never recurses.
pub fn ackermann<C: Count>(i: u64, j: &C, cap: &C) -> Result<C, AckError> {
    if j.is_zero() {
        return Err(AckError::ZeroArgument);
    }
    enum Frame<C> {
        Eval(u64, C),
        /// Evaluate `A(i, result)`.
        Apply(u64),
        /// Record `result` as `A(i, j)`.
        Store(u64, C),
    }
    let two = <C as Count>::from_u64(2);
    let cap_bits = cap.bit_length();
    let mut memo: BTreeMap<(u64, C), C> = BTreeMap::new();
    let mut stack = vec![Frame::Eval(i, j.clone())];
    let mut result = C::zero();
    while let Some(frame) = stack.pop() {
        match frame {
            Frame::Eval(i, j) => {
                if let Some(v) = memo.get(&(i, j.clone())) {
                    result = v.clone();
                    continue;
                }
                result = if i == 0 {
                    j.checked_add(&j).ok_or(AckError::BeyondCap)?
                } else if j.is_one() {
                    two.clone()
                } else if j.bit_length() > 64 || j.to_u64().is_some_and(|e| e >= cap_bits) {
                    // A(i, j) ≥ 2^j for i ≥ 1, and 2^j > cap here.
                    return Err(AckError::BeyondCap);
                } else if i == 1 {
                    C::pow2(j.to_u64().expect("checked above")).ok_or(AckError::BeyondCap)?
                } else {
                    let prev = j.clone() - C::one();
                    stack.push(Frame::Store(i, j));
                    stack.push(Frame::Apply(i - 1));
                    stack.push(Frame::Eval(i, prev));
                    continue;
                };
                if result > *cap {
                    return Err(AckError::BeyondCap);
                }
            }
            Frame::Apply(i) => stack.push(Frame::Eval(i, result.clone())),
            Frame::Store(i, j) => {
                memo.insert((i, j), result.clone());
            }
        }
    }
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn big(v: u64) -> BigCount {
        BigCount::from(v)
    }

    #[test]
    fn lambda_examples() {
        assert_eq!(lambda(1, &16u64).unwrap(), 4);
        assert_eq!(lambda(2, &8u64).unwrap(), 3);
        assert_eq!(lambda(4, &65u64).unwrap(), 4);
        assert_eq!(lambda(0, &5u64), Err(AckError::BadDepth(0)));
        assert_eq!(lambda(3, &1u64).unwrap(), 0);
        assert_eq!(lambda(2, &0u64), Err(AckError::ZeroArgument));
    }

    #[test]
    fn lambda_four_is_iterated_ceil_log() {
        // Direct iteration oracle: 65 → 7 → 3 → 2 → 1.
        let mut x = 65u64;
        let mut steps = 0;
        while x > 1 {
            x = 64 - (x - 1).leading_zeros() as u64;
            steps += 1;
        }
        assert_eq!(steps, 4);
    }

    #[test]
    fn alpha_boundaries() {
        assert_eq!(alpha(&64u64).unwrap(), 2);
        assert_eq!(alpha(&65u64).unwrap(), 4);
        for n in 2..=64u64 {
            assert_eq!(alpha(&n).unwrap(), 2);
        }
    }

    #[test]
    fn ackermann_examples() {
        let cap = big(1) << 70000usize;
        assert_eq!(ackermann(0, &big(5), &cap).unwrap(), big(10));
        assert_eq!(ackermann(1, &big(4), &cap).unwrap(), big(16));
        assert_eq!(ackermann(2, &big(4), &cap).unwrap(), big(65536));
        assert_eq!(ackermann(2, &big(5), &cap).unwrap(), big(1) << 65536usize);
        assert_eq!(ackermann(3, &big(4), &cap), Err(AckError::BeyondCap));
        assert_eq!(ackermann(2, &big(4), &big(1000)), Err(AckError::BeyondCap));
        assert_eq!(ackermann(2, &4u64, &u64::MAX).unwrap(), 65536);
        assert_eq!(ackermann(2, &5u64, &u64::MAX), Err(AckError::BeyondCap));
    }

    #[test]
    fn ackermann_at_two_is_four() {
        let cap = big(1) << 128usize;
        for i in 0..40 {
            assert_eq!(ackermann(i, &big(2), &cap).unwrap(), big(4), "i = {i}");
        }
    }

    #[test]
    fn lambda_six_of_tower() {
        let n = ackermann(2, &big(5), &(big(1) << 70000usize)).unwrap();
        assert!(lambda(6, &n).unwrap() <= big(6));
    }

    #[test]
    fn lambda_nondecreasing_small() {
        for d in 1..=8 {
            let mut prev = 0u64;
            for n in 1..=5000u64 {
                let v = lambda(d, &n).unwrap();
                assert!(v >= prev, "λ_{d}({n})");
                prev = v;
            }
        }
    }

    proptest! {
        #[test]
        fn lambda_monotone(d in 1u64..=8, a in 1u64..1_000_000, b in 1u64..1_000_000) {
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            prop_assert!(lambda(d, &lo).unwrap() <= lambda(d, &hi).unwrap());
        }

        #[test]
        fn deeper_lambda_is_smaller(d in 1u64..=6, n in 2u64..1_000_000) {
            prop_assert!(lambda(d + 2, &n).unwrap() <= lambda(d, &n).unwrap());
        }

        #[test]
        fn alpha_even_and_monotone(a in 1u64..u64::MAX, b in 1u64..u64::MAX) {
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            let (x, y) = (alpha(&lo).unwrap(), alpha(&hi).unwrap());
            prop_assert!(x >= 2 && x % 2 == 0);
            prop_assert!(x <= y);
        }

        #[test]
        fn star_shifts_by_one(n in 3u64..u64::MAX) {
            let log = |x: &u64| x.ceil_log2();
            let fx = n.ceil_log2();
            prop_assume!(fx >= 2);
            prop_assert_eq!(star(log, &fx, None).unwrap() + 1, star(log, &n, None).unwrap());
        }
    }
}
