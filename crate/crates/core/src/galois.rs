//! Arithmetic over finite fields `F_q`, `q = p^m ≤ 2^16`.
//!
//! An element is an index in `[0, q)` whose base-`p` digits are the
//! coefficients (low degree first) of a polynomial of degree `< m`. The
//! modulus for each `q` is the lexicographically smallest monic irreducible
//! polynomial of degree `m`, comparing coefficients from the constant term
//! up, so every `q` names exactly one concrete field. For `m = 1` that rule
//! selects `x`, and arithmetic is plain arithmetic mod `p`.
//!
//! Multiplication uses exp/log tables for `q ≤ 2^12` and schoolbook
//! polynomial arithmetic above.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rng::Stream;

/// Largest supported field order.
pub const MAX_ORDER: u64 = 1 << 16;
/// Largest order that gets exp/log tables.
pub const TABLE_ORDER: u64 = 1 << 12;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("{0} is not a prime power")]
    NotPrimePower(u64),
    #[error("field order {0} exceeds the supported maximum 2^16")]
    OrderTooLarge(u64),
    #[error("division by zero")]
    DivisionByZero,
    #[error("element {element} is out of range for GF({q})")]
    OutOfRange { element: u32, q: u32 },
    #[error("invalid modulus: {0}")]
    BadModulus(String),
    #[error("operation {0:?} needs a second operand")]
    MissingOperand(FieldOp),
}

#[derive(
    Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
#[serde(transparent)]
pub struct FieldElement(pub u32);

impl FieldElement {
    pub const ZERO: FieldElement = FieldElement(0);
    pub const ONE: FieldElement = FieldElement(1);

    pub fn index(self) -> u32 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldOp {
    Add,
    Sub,
    Mul,
    Inv,
    Neg,
}

/// `{p, m, modulus}` as stored in circuit files.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldDescriptor {
    pub p: u32,
    pub m: u32,
    pub modulus: Vec<u32>,
}

#[derive(Clone)]
pub struct FieldSpec {
    inner: Arc<Inner>,
}

struct Inner {
    q: u32,
    p: u32,
    m: u32,
    modulus: Vec<u32>,
    mul: MulImpl,
}

enum MulImpl {
    Tables { exp: Vec<u32>, log: Vec<u32> },
    Schoolbook,
}

impl PartialEq for FieldSpec {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner)
            || (self.inner.p == other.inner.p && self.inner.modulus == other.inner.modulus)
    }
}

impl Eq for FieldSpec {}

impl fmt::Debug for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FieldSpec")
            .field("q", &self.inner.q)
            .field("p", &self.inner.p)
            .field("m", &self.inner.m)
            .field("modulus", &self.inner.modulus)
            .finish()
    }
}

/// Canonical field of order `q`.
pub fn make_field(q: u64) -> Result<FieldSpec, FieldError> {
    let (p, m) = prime_power(q)?;
    if q > MAX_ORDER {
        return Err(FieldError::OrderTooLarge(q));
    }
    let modulus = smallest_irreducible(p, m);
    Ok(FieldSpec::build(p, m, modulus))
}

/// Applies one of the five field operations; `b` is ignored for unary ones.
pub fn field_op(
    spec: &FieldSpec,
    kind: FieldOp,
    a: FieldElement,
    b: Option<FieldElement>,
) -> Result<FieldElement, FieldError> {
    spec.check(a)?;
    if let Some(b) = b {
        spec.check(b)?;
    }
    let rhs = || b.ok_or(FieldError::MissingOperand(kind));
    Ok(match kind {
        FieldOp::Add => spec.add(a, rhs()?),
        FieldOp::Sub => spec.sub(a, rhs()?),
        FieldOp::Mul => spec.mul(a, rhs()?),
        FieldOp::Neg => spec.neg(a),
        FieldOp::Inv => spec.inv(a)?,
    })
}

/// Uniform element of the field, zero included.
pub fn uniform_element(spec: &FieldSpec, stream: &mut Stream) -> FieldElement {
    FieldElement(stream.below(spec.order() as u64) as u32)
}

impl FieldSpec {
    /// Field with an explicit modulus, e.g. one read back from a file.
    pub fn with_modulus(p: u32, m: u32, modulus: Vec<u32>) -> Result<FieldSpec, FieldError> {
        let q = (p as u64)
            .checked_pow(m)
            .filter(|&q| q <= MAX_ORDER)
            .ok_or_else(|| FieldError::BadModulus(format!("{p}^{m} exceeds 2^16")))?;
        if m == 0 || !is_prime(p as u64) {
            return Err(FieldError::NotPrimePower(q));
        }
        if modulus.len() != m as usize + 1 || modulus[m as usize] != 1 {
            return Err(FieldError::BadModulus(format!(
                "expected a monic polynomial of degree {m}"
            )));
        }
        if modulus.iter().any(|&c| c >= p) {
            return Err(FieldError::BadModulus("coefficient out of range".into()));
        }
        if m > 1 && !poly::is_irreducible(&modulus, p) {
            return Err(FieldError::BadModulus(format!(
                "{modulus:?} is reducible over F_{p}"
            )));
        }
        Ok(FieldSpec::build(p, m, modulus))
    }

    pub fn from_descriptor(d: &FieldDescriptor) -> Result<FieldSpec, FieldError> {
        FieldSpec::with_modulus(d.p, d.m, d.modulus.clone())
    }

    pub fn descriptor(&self) -> FieldDescriptor {
        FieldDescriptor {
            p: self.inner.p,
            m: self.inner.m,
            modulus: self.inner.modulus.clone(),
        }
    }

    fn build(p: u32, m: u32, modulus: Vec<u32>) -> FieldSpec {
        let q = p.pow(m);
        let mut inner = Inner {
            q,
            p,
            m,
            modulus,
            mul: MulImpl::Schoolbook,
        };
        if q as u64 <= TABLE_ORDER {
            inner.mul = build_tables(&inner);
        }
        FieldSpec {
            inner: Arc::new(inner),
        }
    }

    pub fn order(&self) -> u32 {
        self.inner.q
    }

    pub fn characteristic(&self) -> u32 {
        self.inner.p
    }

    pub fn degree(&self) -> u32 {
        self.inner.m
    }

    pub fn modulus(&self) -> &[u32] {
        &self.inner.modulus
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement::ZERO
    }

    pub fn one(&self) -> FieldElement {
        FieldElement::ONE
    }

    pub fn element(&self, index: u32) -> Result<FieldElement, FieldError> {
        let e = FieldElement(index);
        self.check(e)?;
        Ok(e)
    }

    pub fn elements(&self) -> impl Iterator<Item = FieldElement> {
        (0..self.inner.q).map(FieldElement)
    }

    pub fn nonzero_elements(&self) -> impl Iterator<Item = FieldElement> {
        (1..self.inner.q).map(FieldElement)
    }

    pub fn contains(&self, e: FieldElement) -> bool {
        e.0 < self.inner.q
    }

    fn check(&self, e: FieldElement) -> Result<(), FieldError> {
        if self.contains(e) {
            Ok(())
        } else {
            Err(FieldError::OutOfRange {
                element: e.0,
                q: self.inner.q,
            })
        }
    }

    #[inline]
    pub fn add(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        let Inner { p, m, .. } = *self.inner;
        if p == 2 {
            return FieldElement(a.0 ^ b.0);
        }
        if m == 1 {
            let s = a.0 + b.0;
            return FieldElement(if s >= p { s - p } else { s });
        }
        let (mut x, mut y, mut out, mut place) = (a.0, b.0, 0, 1);
        for _ in 0..m {
            out += ((x % p + y % p) % p) * place;
            x /= p;
            y /= p;
            place *= p;
        }
        FieldElement(out)
    }

    #[inline]
    pub fn neg(&self, a: FieldElement) -> FieldElement {
        let Inner { p, m, .. } = *self.inner;
        if p == 2 {
            return a;
        }
        if m == 1 {
            return FieldElement(if a.0 == 0 { 0 } else { p - a.0 });
        }
        let (mut x, mut out, mut place) = (a.0, 0, 1);
        for _ in 0..m {
            out += ((p - x % p) % p) * place;
            x /= p;
            place *= p;
        }
        FieldElement(out)
    }

    #[inline]
    pub fn sub(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        if a.0 == 0 || b.0 == 0 {
            return FieldElement::ZERO;
        }
        match &self.inner.mul {
            MulImpl::Tables { exp, log } => {
                FieldElement(exp[(log[a.0 as usize] + log[b.0 as usize]) as usize])
            }
            MulImpl::Schoolbook => FieldElement(schoolbook_mul(&self.inner, a.0, b.0)),
        }
    }

    pub fn inv(&self, a: FieldElement) -> Result<FieldElement, FieldError> {
        if a.0 == 0 {
            return Err(FieldError::DivisionByZero);
        }
        let q1 = self.inner.q - 1;
        Ok(match &self.inner.mul {
            MulImpl::Tables { exp, log } => {
                FieldElement(exp[((q1 - log[a.0 as usize]) % q1) as usize])
            }
            MulImpl::Schoolbook => self.pow(a, q1 as u64 - 1),
        })
    }

    pub fn div(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement, FieldError> {
        Ok(self.mul(a, self.inv(b)?))
    }

    pub fn pow(&self, a: FieldElement, mut e: u64) -> FieldElement {
        let mut base = a;
        let mut acc = FieldElement::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// `acc += c · row`, elementwise.
    pub fn axpy(&self, acc: &mut [FieldElement], c: FieldElement, row: &[FieldElement]) {
        debug_assert_eq!(acc.len(), row.len());
        if c.is_zero() {
            return;
        }
        if c == FieldElement::ONE {
            for (a, &r) in acc.iter_mut().zip(row) {
                *a = self.add(*a, r);
            }
        } else {
            for (a, &r) in acc.iter_mut().zip(row) {
                *a = self.add(*a, self.mul(c, r));
            }
        }
    }

    pub fn dot(&self, a: &[FieldElement], b: &[FieldElement]) -> FieldElement {
        a.iter().zip(b).fold(FieldElement::ZERO, |s, (&x, &y)| {
            self.add(s, self.mul(x, y))
        })
    }

    pub fn uniform(&self, stream: &mut Stream) -> FieldElement {
        uniform_element(self, stream)
    }

    pub fn uniform_nonzero(&self, stream: &mut Stream) -> FieldElement {
        FieldElement(1 + stream.below(self.inner.q as u64 - 1) as u32)
    }
}

fn schoolbook_mul(f: &Inner, a: u32, b: u32) -> u32 {
    let x = poly::digits(a, f.p, f.m);
    let y = poly::digits(b, f.p, f.m);
    let prod = poly::mul(&x, &y, f.p);
    let r = poly::rem(&prod, &f.modulus, f.p);
    poly::undigits(&r, f.p)
}

fn build_tables(f: &Inner) -> MulImpl {
    let q1 = f.q - 1;
    let order_factors = prime_factors(q1 as u64);
    let generator = (1..f.q)
        .find(|&g| {
            order_factors
                .iter()
                .all(|&l| naive_pow(f, g, q1 / l as u32) != 1)
        })
        .expect("the multiplicative group of a finite field is cyclic");
    let mut exp = vec![0u32; 2 * q1 as usize];
    let mut log = vec![0u32; f.q as usize];
    let mut x = 1u32;
    for i in 0..q1 {
        exp[i as usize] = x;
        exp[(i + q1) as usize] = x;
        log[x as usize] = i;
        x = schoolbook_mul(f, x, generator);
    }
    MulImpl::Tables { exp, log }
}

fn naive_pow(f: &Inner, a: u32, mut e: u32) -> u32 {
    let (mut base, mut acc) = (a, 1u32);
    while e > 0 {
        if e & 1 == 1 {
            acc = schoolbook_mul(f, acc, base);
        }
        base = schoolbook_mul(f, base, base);
        e >>= 1;
    }
    acc
}

fn is_prime(n: u64) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| n % d != 0)
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Splits `q = p^m`.
pub fn prime_power(q: u64) -> Result<(u32, u32), FieldError> {
    if q < 2 {
        return Err(FieldError::NotPrimePower(q));
    }
    let factors = prime_factors(q);
    if factors.len() != 1 {
        return Err(FieldError::NotPrimePower(q));
    }
    let p = factors[0];
    if p > u32::MAX as u64 {
        return Err(FieldError::OrderTooLarge(q));
    }
    let (mut rest, mut m) = (q, 0u32);
    while rest > 1 {
        rest /= p;
        m += 1;
    }
    Ok((p as u32, m))
}

/// Lexicographically smallest monic irreducible of degree `m` over `F_p`,
/// coefficients compared from the constant term up.
fn smallest_irreducible(p: u32, m: u32) -> Vec<u32> {
    if m == 1 {
        return vec![0, 1];
    }
    let count = (p as u64).pow(m);
    (0..count)
        .map(|v| {
            // The constant term is the most significant digit of `v`.
            let mut coeffs = vec![0u32; m as usize + 1];
            let mut rest = v;
            for i in (0..m as usize).rev() {
                coeffs[i] = (rest % p as u64) as u32;
                rest /= p as u64;
            }
            coeffs[m as usize] = 1;
            coeffs
        })
        .find(|c| poly::is_irreducible(c, p))
        .expect("irreducible polynomials exist in every degree")
}

/// Dense polynomials over `F_p`, coefficients low degree first.
pub(crate) mod poly {
    pub fn digits(mut v: u32, p: u32, m: u32) -> Vec<u32> {
        (0..m)
            .map(|_| {
                let d = v % p;
                v /= p;
                d
            })
            .collect()
    }

    pub fn undigits(c: &[u32], p: u32) -> u32 {
        c.iter().rev().fold(0, |acc, &d| acc * p + d)
    }

    pub fn mul(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
        let mut out = vec![0u64; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            for (j, &y) in b.iter().enumerate() {
                out[i + j] = (out[i + j] + x as u64 * y as u64) % p as u64;
            }
        }
        out.into_iter().map(|v| v as u32).collect()
    }

    /// Remainder of `a` modulo a monic `modulus`.
    pub fn rem(a: &[u32], modulus: &[u32], p: u32) -> Vec<u32> {
        let deg = modulus.len() - 1;
        let mut r: Vec<u64> = a.iter().map(|&x| x as u64).collect();
        let p = p as u64;
        for top in (deg..r.len()).rev() {
            let c = r[top] % p;
            if c == 0 {
                continue;
            }
            for (k, &mk) in modulus.iter().enumerate() {
                let idx = top - deg + k;
                r[idx] = (r[idx] + (p - c) * mk as u64) % p;
            }
        }
        let mut out: Vec<u32> = r.into_iter().take(deg).map(|x| x as u32).collect();
        out.resize(deg, 0);
        out
    }

    /// Trial division by every monic polynomial of degree `1..=⌊m/2⌋`.
    pub fn is_irreducible(f: &[u32], p: u32) -> bool {
        let m = f.len() - 1;
        for d in 1..=m / 2 {
            let count = (p as u64).pow(d as u32);
            for v in 0..count {
                let mut divisor: Vec<u32> = digits(v as u32, p, d as u32);
                divisor.push(1);
                if rem(f, &divisor, p).iter().all(|&c| c == 0) {
                    return false;
                }
            }
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_field_two() {
        let f = make_field(2).unwrap();
        assert_eq!((f.characteristic(), f.degree()), (2, 1));
        assert_eq!(f.add(FieldElement(1), FieldElement(1)), FieldElement(0));
    }

    #[test]
    fn gf4_modulus_and_product() {
        let f = make_field(4).unwrap();
        assert_eq!(f.modulus(), &[1, 1, 1]);
        // x · (x + 1) = x² + x = 1 mod x² + x + 1
        assert_eq!(f.mul(FieldElement(2), FieldElement(3)), FieldElement(1));
    }

    #[test]
    fn gf4_modulus_matches_exhaustive_scan() {
        // Monic quadratics over F_2 with no root are irreducible.
        let irreducible: Vec<[u32; 3]> = (0..4u32)
            .map(|v| [v >> 1, v & 1, 1])
            .filter(|c| (0..2).all(|x| (c[0] + c[1] * x + x * x) % 2 != 0))
            .collect();
        assert_eq!(irreducible, vec![[1, 1, 1]]);
    }

    #[test]
    fn rejects_non_prime_powers() {
        assert_eq!(make_field(6).unwrap_err(), FieldError::NotPrimePower(6));
        assert_eq!(make_field(1).unwrap_err(), FieldError::NotPrimePower(1));
        assert_eq!(make_field(0).unwrap_err(), FieldError::NotPrimePower(0));
        assert_eq!(make_field(12).unwrap_err(), FieldError::NotPrimePower(12));
        assert!(matches!(
            make_field(1 << 17),
            Err(FieldError::OrderTooLarge(_))
        ));
    }

    #[test]
    fn inverse_of_one_and_zero() {
        for q in [2, 3, 4, 5, 8, 9, 49, 4096, 1 << 13, 3u64.pow(9)] {
            let f = make_field(q).unwrap();
            assert_eq!(f.inv(FieldElement::ONE).unwrap(), FieldElement::ONE);
            assert_eq!(f.inv(FieldElement::ZERO), Err(FieldError::DivisionByZero));
        }
    }

    #[test]
    fn field_op_dispatch() {
        let f = make_field(5).unwrap();
        let e = |i| FieldElement(i);
        assert_eq!(field_op(&f, FieldOp::Add, e(3), Some(e(4))).unwrap(), e(2));
        assert_eq!(field_op(&f, FieldOp::Sub, e(1), Some(e(3))).unwrap(), e(3));
        assert_eq!(field_op(&f, FieldOp::Mul, e(3), Some(e(4))).unwrap(), e(2));
        assert_eq!(field_op(&f, FieldOp::Inv, e(2), None).unwrap(), e(3));
        assert_eq!(field_op(&f, FieldOp::Neg, e(2), None).unwrap(), e(3));
        assert_eq!(
            field_op(&f, FieldOp::Inv, e(0), None),
            Err(FieldError::DivisionByZero)
        );
        assert!(matches!(
            field_op(&f, FieldOp::Add, e(7), Some(e(1))),
            Err(FieldError::OutOfRange { .. })
        ));
        assert!(matches!(
            field_op(&f, FieldOp::Mul, e(1), None),
            Err(FieldError::MissingOperand(FieldOp::Mul))
        ));
    }

    #[test]
    fn make_field_is_deterministic() {
        for q in [8, 9, 27, 256, 625] {
            assert_eq!(
                make_field(q).unwrap().descriptor(),
                make_field(q).unwrap().descriptor()
            );
        }
    }

    #[test]
    fn tables_agree_with_schoolbook_above_cap() {
        // GF(2^13) has no tables; compare against GF(2^12)-style direct products.
        let f = make_field(1 << 13).unwrap();
        let inner = &f.inner;
        let mut s = Stream::new(3);
        for _ in 0..500 {
            let a = f.uniform_nonzero(&mut s);
            let inv = f.inv(a).unwrap();
            assert_eq!(schoolbook_mul(inner, a.0, inv.0), 1);
        }
    }

    #[test]
    fn descriptor_round_trip_rejects_reducible() {
        let f = make_field(9).unwrap();
        assert_eq!(FieldSpec::from_descriptor(&f.descriptor()).unwrap(), f);
        let bad = FieldDescriptor {
            p: 2,
            m: 2,
            modulus: vec![1, 0, 1],
        };
        assert!(matches!(
            FieldSpec::from_descriptor(&bad),
            Err(FieldError::BadModulus(_))
        ));
    }

    #[test]
    fn uniform_binary_frequency() {
        let f = make_field(2).unwrap();
        let mut s = Stream::new(11);
        let ones = (0..100_000)
            .filter(|_| uniform_element(&f, &mut s).0 == 1)
            .count();
        let freq = ones as f64 / 1e5;
        assert!((freq - 0.5).abs() <= 0.01, "{freq}");
    }

    #[test]
    fn uniform_ternary_hits_everything() {
        let f = make_field(3).unwrap();
        let mut s = Stream::new(12);
        let mut seen = [false; 3];
        for _ in 0..100 {
            seen[uniform_element(&f, &mut s).0 as usize] = true;
        }
        assert_eq!(seen, [true; 3]);
    }

    #[test]
    fn uniform_is_reproducible() {
        let f = make_field(7).unwrap();
        let a: Vec<_> = {
            let mut s = Stream::new(99);
            (0..50).map(|_| uniform_element(&f, &mut s)).collect()
        };
        let b: Vec<_> = {
            let mut s = Stream::new(99);
            (0..50).map(|_| uniform_element(&f, &mut s)).collect()
        };
        assert_eq!(a, b);
    }
}
