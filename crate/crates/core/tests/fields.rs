use proptest::prelude::*;
use shallowcode::galois::{field_op, make_field, FieldError, FieldOp};
use shallowcode::{FieldElement, FieldSpec};

const ORDERS: [u64; 7] = [2, 3, 4, 5, 7, 8, 9];

fn fe(v: u32) -> FieldElement {
    FieldElement(v)
}

/// Schoolbook product of the polynomials behind two element indices,
/// reduced by the field's modulus.
fn poly_mul(f: &FieldSpec, a: u32, b: u32) -> u32 {
    let (p, m) = (f.characteristic(), f.degree() as usize);
    let digits = |mut v: u32| {
        let mut d = vec![0u32; m];
        for slot in d.iter_mut() {
            *slot = v % p;
            v /= p;
        }
        d
    };
    let (da, db) = (digits(a), digits(b));
    let mut prod = vec![0u32; 2 * m];
    for i in 0..m {
        for j in 0..m {
            prod[i + j] = (prod[i + j] + da[i] * db[j]) % p;
        }
    }
    let modulus = f.modulus();
    for deg in (m..2 * m).rev() {
        let c = prod[deg];
        if c != 0 {
            for (i, &mc) in modulus.iter().enumerate() {
                let idx = deg - m + i;
                prod[idx] = (prod[idx] + p * p - c * mc % p) % p;
            }
        }
    }
    prod[..m].iter().rev().fold(0, |acc, &d| acc * p + d)
}

#[test]
fn axioms_hold_exhaustively() {
    for q in ORDERS {
        let f = make_field(q).unwrap();
        let els: Vec<_> = f.elements().collect();
        assert_eq!(els.len() as u64, q);
        for &a in &els {
            assert_eq!(f.add(a, f.zero()), a);
            assert_eq!(f.mul(a, f.one()), a);
            assert_eq!(f.add(a, f.neg(a)), f.zero());
            if !a.is_zero() {
                assert_eq!(f.mul(a, f.inv(a).unwrap()), f.one(), "q={q} a={a}");
            }
            for &b in &els {
                assert_eq!(f.add(a, b), f.add(b, a));
                assert_eq!(f.mul(a, b), f.mul(b, a));
                assert_eq!(f.sub(f.add(a, b), b), a);
                for &c in &els {
                    assert_eq!(f.add(f.add(a, b), c), f.add(a, f.add(b, c)));
                    assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
                    assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
                }
            }
        }
    }
}

#[test]
fn multiplication_matches_polynomial_oracle() {
    for q in ORDERS
        .into_iter()
        .chain([16, 25, 27, 32, 49, 64, 81, 121, 128])
    {
        let f = make_field(q).unwrap();
        for a in 0..q as u32 {
            for b in 0..q as u32 {
                assert_eq!(f.mul(fe(a), fe(b)).0, poly_mul(&f, a, b), "q={q} {a}*{b}");
            }
        }
    }
}

#[test]
fn gf4_has_the_expected_modulus_and_products() {
    let f = make_field(4).unwrap();
    assert_eq!(f.modulus(), &[1, 1, 1]);
    assert_eq!(
        field_op(&f, FieldOp::Mul, fe(2), Some(fe(3))).unwrap(),
        fe(1)
    );
    assert_eq!(
        field_op(&f, FieldOp::Add, fe(2), Some(fe(3))).unwrap(),
        fe(1)
    );
}

#[test]
fn prime_fields_are_integers_mod_p() {
    for p in [2u32, 3, 5, 7, 11, 13, 251] {
        let f = make_field(p as u64).unwrap();
        for a in 0..p {
            for b in 0..p {
                assert_eq!(f.add(fe(a), fe(b)).0, (a + b) % p);
                assert_eq!(f.mul(fe(a), fe(b)).0, a * b % p);
            }
        }
    }
}

#[test]
fn rejects_non_prime_powers_and_bad_operands() {
    for q in [0u64, 1, 6, 10, 12, 15] {
        assert!(make_field(q).is_err(), "q={q}");
    }
    let f = make_field(5).unwrap();
    assert!(matches!(f.inv(f.zero()), Err(FieldError::DivisionByZero)));
    assert!(field_op(&f, FieldOp::Add, fe(5), Some(fe(0))).is_err());
    assert!(field_op(&f, FieldOp::Mul, fe(1), None).is_err());
}

#[test]
fn multiplicative_group_is_cyclic() {
    for q in ORDERS.into_iter().chain([16, 27, 256]) {
        let f = make_field(q).unwrap();
        let order = q - 1;
        let generator = f
            .nonzero_elements()
            .find(|&g| (1..order).all(|e| f.pow(g, e) != f.one()));
        assert!(generator.is_some(), "q={q}");
        for a in f.nonzero_elements() {
            assert_eq!(f.pow(a, order), f.one());
        }
    }
}

proptest! {
    #[test]
    fn large_field_axioms(qi in 0usize..6, a in any::<u32>(), b in any::<u32>(), c in any::<u32>()) {
        let q = [256u64, 243, 343, 1024, 4096, 65536][qi];
        let f = make_field(q).unwrap();
        let (a, b, c) = (fe(a % q as u32), fe(b % q as u32), fe(c % q as u32));
        prop_assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
        prop_assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
        prop_assert_eq!(f.mul(a, b).0, poly_mul(&f, a.0, b.0));
        if !a.is_zero() {
            prop_assert_eq!(f.div(f.mul(a, b), a).unwrap(), b);
        }
    }
}
