use num_bigint::BigUint;
use proptest::prelude::*;
use shallowcode::ackermann::{ackermann, alpha, lambda, AckError};
use shallowcode::BigCount;

fn ceil_log2(n: u128) -> u128 {
    let mut e = 0;
    while (1u128 << e) < n {
        e += 1;
    }
    e
}

fn isqrt(n: u128) -> u128 {
    let mut r = 0u128;
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

fn iterate(f: impl Fn(u128) -> u128, mut n: u128) -> u128 {
    let mut steps = 0;
    while n > 1 {
        n = f(n);
        steps += 1;
    }
    steps
}

/// Plain recursion, for arguments where it terminates quickly.
fn naive_a(i: u64, j: u128) -> u128 {
    match (i, j) {
        (0, j) => 2 * j,
        (_, 1) => 2,
        (i, j) => naive_a(i - 1, naive_a(i, j - 1)),
    }
}

fn big(v: u64) -> BigCount {
    BigUint::from(v)
}

#[test]
fn ackermann_table() {
    let cap = big(u64::MAX);
    assert_eq!(ackermann(0, &big(5), &cap).unwrap(), big(10));
    assert_eq!(ackermann(1, &big(4), &cap).unwrap(), big(16));
    assert_eq!(ackermann(2, &big(4), &cap).unwrap(), big(65536));
    for i in 0..3u64 {
        for j in 1..5u64 {
            if i == 2 && j == 5 {
                continue;
            }
            let got = ackermann(i, &(j as u128), &u128::MAX).unwrap();
            assert_eq!(got, naive_a(i, j as u128), "A({i}, {j})");
        }
    }
    assert_eq!(ackermann(3, &3u64, &u64::MAX).unwrap(), 65536);
    assert_eq!(ackermann(2, &5u64, &u64::MAX), Err(AckError::BeyondCap));
}

#[test]
fn lambda_examples() {
    assert_eq!(lambda(2, &8u64).unwrap(), 3);
    assert_eq!(lambda(4, &65u64).unwrap(), 4);
    assert_eq!(alpha(&64u64).unwrap(), 2);
    assert_eq!(alpha(&65u64).unwrap(), 4);
    assert!(lambda(0, &5u64).is_err());
    assert!(lambda(2, &0u64).is_err());
}

#[test]
fn lambda_matches_iteration_oracle() {
    for n in 1u128..5000 {
        let l1 = isqrt(n);
        let l2 = ceil_log2(n);
        let l3 = iterate(isqrt, n);
        let l4 = iterate(ceil_log2, n);
        let n64 = n as u64;
        assert_eq!(lambda(1, &n64).unwrap() as u128, l1);
        assert_eq!(lambda(2, &n64).unwrap() as u128, l2);
        assert_eq!(lambda(3, &n64).unwrap() as u128, l3);
        assert_eq!(lambda(4, &n64).unwrap() as u128, l4);
        assert_eq!(
            lambda(5, &n64).unwrap() as u128,
            iterate(|x| iterate(isqrt, x), n)
        );
        assert_eq!(
            lambda(6, &n64).unwrap() as u128,
            iterate(|x| iterate(ceil_log2, x), n)
        );
    }
}

#[test]
fn tower_input_has_small_lambda_six() {
    let n = ackermann(2, &big(5), &(BigUint::from(1u8) << 70_000u32)).unwrap();
    assert_eq!(n, BigUint::from(1u8) << 65536u32);
    assert!(lambda(6, &n).unwrap() <= big(6));
    let a = alpha(&n).unwrap();
    assert_eq!(a % 2, 0);
    assert!(a >= alpha(&big(65536)).unwrap());
}

#[test]
fn alpha_over_boundaries_is_even_and_nondecreasing() {
    let mut last = 0;
    for e in 0..200u32 {
        let n = (BigUint::from(1u8) << e) + 1u8;
        let a = alpha(&n).unwrap();
        assert_eq!(a % 2, 0);
        assert!(a >= last);
        last = a;
    }
}

proptest! {
    #[test]
    fn count_types_agree(d in 1u64..=6, n in 1u64..u64::MAX) {
        let a = lambda(d, &n).unwrap();
        let b = lambda(d, &(n as u128)).unwrap();
        let c = lambda(d, &big(n)).unwrap();
        prop_assert_eq!(a as u128, b);
        prop_assert_eq!(big(a), c);
        prop_assert_eq!(alpha(&n).unwrap(), alpha(&big(n)).unwrap());
    }
}
