//! Typical-set decoding: output the unique message whose codeword is
//! typical for `y`, otherwise fail.
//!
//! Small message spaces are searched message by message. Larger ones are
//! searched from the other side, walking `Typical(y, ε)` and keeping the
//! words that satisfy the parity checks; that walk stops at the second
//! candidate, since the answer is then already FAIL.

use serde::{Deserialize, Serialize};

use super::{CodeInstance, CodecError};
use crate::channel::ChannelSpec;
use crate::galois::FieldElement;
use crate::limits::{saturating_pow, Limits};
use crate::linalg::Matrix;
use crate::scalar::Real;
use crate::typical::{TypicalChecker, TypicalParams};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Message(Vec<u32>),
    Fail,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecodeResult {
    pub outcome: Outcome,
    pub candidates_found: u64,
    /// False when the search stopped early at a second candidate, so
    /// `candidates_found` is a lower bound.
    pub complete: bool,
}

impl DecodeResult {
    pub fn message(&self) -> Option<&[u32]> {
        match &self.outcome {
            Outcome::Message(m) => Some(m),
            Outcome::Fail => None,
        }
    }
}

/// Parity checks and a left inverse of the generator, for the search
/// over the typical set.
#[derive(Debug)]
pub(crate) struct ParityData {
    checks: Matrix,
    pivots: Vec<usize>,
    inverse: Matrix,
}

impl ParityData {
    fn new(inst: &CodeInstance) -> Result<ParityData, CodecError> {
        let f = &inst.field;
        let g = &inst.gen;
        let mut r = g.clone();
        let pivots = r.rref(f);
        if pivots.len() < inst.k {
            return Err(CodecError::BadShape("encoder is not injective".into()));
        }
        let sub = Matrix::from_rows(
            (0..inst.k)
                .map(|i| pivots.iter().map(|&c| g.get(i, c)).collect())
                .collect(),
        )
        .expect("square");
        let inverse = sub
            .inverse(f)
            .map_err(|e| CodecError::BadShape(e.to_string()))?;
        Ok(ParityData {
            checks: g.null_space(f),
            pivots,
            inverse,
        })
    }
}

/// Decodes `y` by the typical-set rule.
pub fn decode_typical<T: Real>(
    inst: &CodeInstance,
    channel: &ChannelSpec<T>,
    eps: T,
    y: &[u32],
) -> Result<DecodeResult, CodecError> {
    let params = TypicalParams::new(channel, inst.n, eps)?;
    decode_with(inst, &params.checker(), y)
}

pub(crate) fn decode_with(
    inst: &CodeInstance,
    checker: &TypicalChecker,
    y: &[u32],
) -> Result<DecodeResult, CodecError> {
    if y.len() != inst.n {
        return Err(crate::typical::TypicalError::LengthMismatch {
            n: inst.n,
            got: y.len(),
        }
        .into());
    }
    if checker.q() != inst.field.order() as usize {
        return Err(CodecError::BadShape(
            "channel and code alphabets differ".into(),
        ));
    }
    let q = inst.field.order() as u64;
    let messages = saturating_pow(q, inst.k as u64);
    if messages <= Limits::global().decode {
        return Ok(if q == 2 {
            by_messages_binary(inst, checker, y)
        } else {
            by_messages(inst, checker, y)
        });
    }
    by_typical_set(inst, parity(inst)?, checker, y)
}

/// Same rule as [`decode_typical`], always searched from the typical-set
/// side whatever the message count.
pub fn decode_typical_search<T: Real>(
    inst: &CodeInstance,
    channel: &ChannelSpec<T>,
    eps: T,
    y: &[u32],
) -> Result<DecodeResult, CodecError> {
    let params = TypicalParams::new(channel, inst.n, eps)?;
    let checker = params.checker();
    if y.len() != inst.n {
        return Err(crate::typical::TypicalError::LengthMismatch {
            n: inst.n,
            got: y.len(),
        }
        .into());
    }
    if checker.q() != inst.field.order() as usize {
        return Err(CodecError::BadShape(
            "channel and code alphabets differ".into(),
        ));
    }
    by_typical_set(inst, parity(inst)?, &checker, y)
}

fn parity(inst: &CodeInstance) -> Result<&ParityData, CodecError> {
    Ok(match inst.parity.get() {
        Some(p) => p,
        None => {
            let p = ParityData::new(inst)?;
            inst.parity.get_or_init(|| p)
        }
    })
}

fn result(first: Option<Vec<u32>>, count: u64, complete: bool) -> DecodeResult {
    let outcome = match (count, first) {
        (1, Some(m)) if complete => Outcome::Message(m),
        _ => Outcome::Fail,
    };
    DecodeResult {
        outcome,
        candidates_found: count,
        complete,
    }
}

/// Over `F_2`: walk the messages in Gray-code order, one row XOR per step.
fn by_messages_binary(inst: &CodeInstance, checker: &TypicalChecker, y: &[u32]) -> DecodeResult {
    let n = inst.n;
    let words = n.div_ceil(64);
    let pack = |v: &mut dyn Iterator<Item = bool>| {
        let mut w = vec![0u64; words];
        for (j, b) in v.enumerate() {
            if b {
                w[j / 64] |= 1 << (j % 64);
            }
        }
        w
    };
    let rows: Vec<Vec<u64>> = (0..inst.k)
        .map(|i| pack(&mut inst.gen.row(i).iter().map(|v| !v.is_zero())))
        .collect();
    // z_j = x_j XOR σ_{y_j}(0)
    let flip = pack(&mut y.iter().map(|&yj| checker.sigma(yj, 0) == 1));
    let typical = |cw: &[u64]| {
        let ones: usize = cw
            .iter()
            .zip(&flip)
            .map(|(a, b)| (a ^ b).count_ones() as usize)
            .sum();
        checker.allows(0, n - ones) && checker.allows(1, ones)
    };
    let mut cw = vec![0u64; words];
    let mut msg = vec![0u32; inst.k];
    let mut count = 0u64;
    let mut first = None;
    if typical(&cw) {
        count += 1;
        first = Some(msg.clone());
    }
    for step in 1u64..(1u64 << inst.k) {
        let bit = step.trailing_zeros() as usize;
        for (a, b) in cw.iter_mut().zip(&rows[bit]) {
            *a ^= b;
        }
        msg[bit] ^= 1;
        if typical(&cw) {
            count += 1;
            if first.is_none() {
                first = Some(msg.clone());
            }
        }
    }
    result(first, count, true)
}

/// General `q`: mixed-radix counter with incremental codeword updates.
fn by_messages(inst: &CodeInstance, checker: &TypicalChecker, y: &[u32]) -> DecodeResult {
    let f = &inst.field;
    let (k, n) = (inst.k, inst.n);
    let q = f.order();
    let top = FieldElement(q - 1);
    let neg_top = f.neg(top);
    let mut cw = vec![FieldElement::ZERO; n];
    let mut msg = vec![0u32; k];
    let mut counts = vec![0usize; q as usize];
    let mut count = 0u64;
    let mut first = None;
    loop {
        counts.iter_mut().for_each(|c| *c = 0);
        for (&yj, xj) in y.iter().zip(&cw) {
            counts[checker.sigma(yj, xj.0) as usize] += 1;
        }
        if checker.counts_ok(&counts) {
            count += 1;
            if first.is_none() {
                first = Some(msg.clone());
            }
        }
        // Increment the counter; digit i contributes msg[i]·G_i and the
        // element with index d is the d-th element, not d·1.
        let mut i = 0;
        loop {
            if i == k {
                return result(first, count, true);
            }
            let old = FieldElement(msg[i]);
            if msg[i] + 1 < q {
                msg[i] += 1;
                let delta = f.sub(FieldElement(msg[i]), old);
                f.axpy(&mut cw, delta, inst.gen.row(i));
                break;
            }
            msg[i] = 0;
            f.axpy(&mut cw, neg_top, inst.gen.row(i));
            i += 1;
        }
    }
}

/// Depth-first walk over `z ∈ F_q^n` with admissible symbol counts,
/// mapping back through `x_j = σ_{y_j}^{-1}(z_j)` and keeping the `x` whose
/// syndrome vanishes.
fn by_typical_set(
    inst: &CodeInstance,
    parity: &ParityData,
    checker: &TypicalChecker,
    y: &[u32],
) -> Result<DecodeResult, CodecError> {
    let f = &inst.field;
    let n = inst.n;
    let q = f.order() as usize;
    // Admissible counts per symbol form an interval.
    let bounds: Vec<(usize, usize)> = (0..q)
        .map(|c| {
            let ok: Vec<usize> = (0..=n).filter(|&i| checker.allows(c, i)).collect();
            (
                ok.first().copied().unwrap_or(n + 1),
                ok.last().copied().unwrap_or(0),
            )
        })
        .collect();
    if bounds.iter().any(|&(lo, hi)| lo > hi) {
        return Ok(result(None, 0, true));
    }
    // inv[y][z] = x with σ_y(x) = z
    let mut inv = vec![vec![0u32; q]; q];
    for (yv, row) in inv.iter_mut().enumerate() {
        for x in 0..q as u32 {
            row[checker.sigma(yv as u32, x) as usize] = x;
        }
    }
    let checks = &parity.checks;
    let r = checks.rows();
    let cols: Vec<Vec<FieldElement>> = (0..n).map(|j| checks.column(j)).collect();
    let budget = Limits::global().typical;

    struct Walk<'a> {
        f: &'a crate::galois::FieldSpec,
        n: usize,
        q: usize,
        bounds: &'a [(usize, usize)],
        cols: &'a [Vec<FieldElement>],
        y: &'a [u32],
        inv: &'a [Vec<u32>],
        x: Vec<u32>,
        counts: Vec<usize>,
        syndromes: Vec<Vec<FieldElement>>,
        leaves: u64,
        budget: u64,
        found: Vec<Vec<u32>>,
    }

    impl Walk<'_> {
        fn feasible(&self, pos: usize) -> bool {
            let rem = self.n - pos;
            let mut lo_sum = 0;
            let mut hi_sum = 0;
            for (c, &(lo, hi)) in self.bounds.iter().enumerate() {
                let have = self.counts[c];
                if have > hi {
                    return false;
                }
                lo_sum += lo.max(have) - have;
                hi_sum += hi - have;
            }
            lo_sum <= rem && rem <= hi_sum
        }

        /// Returns false once the walk should stop.
        fn go(&mut self, pos: usize) -> Result<bool, CodecError> {
            if pos == self.n {
                self.leaves += 1;
                if self.leaves > self.budget {
                    return Err(CodecError::TooLarge {
                        what: "typical-set search",
                        size: self.leaves,
                        cap: self.budget,
                    });
                }
                if self.syndromes[pos].iter().all(|s| s.is_zero()) {
                    self.found.push(self.x.clone());
                    return Ok(self.found.len() < 2);
                }
                return Ok(true);
            }
            for z in 0..self.q {
                self.counts[z] += 1;
                if self.feasible(pos + 1) {
                    let xv = self.inv[self.y[pos] as usize][z];
                    self.x[pos] = xv;
                    let mut s = self.syndromes[pos].clone();
                    self.f.axpy(&mut s, FieldElement(xv), &self.cols[pos]);
                    self.syndromes[pos + 1] = s;
                    if !self.go(pos + 1)? {
                        self.counts[z] -= 1;
                        return Ok(false);
                    }
                }
                self.counts[z] -= 1;
            }
            Ok(true)
        }
    }

    let mut walk = Walk {
        f,
        n,
        q,
        bounds: &bounds,
        cols: &cols,
        y,
        inv: &inv,
        x: vec![0; n],
        counts: vec![0; q],
        syndromes: vec![vec![FieldElement::ZERO; r]; n + 1],
        leaves: 0,
        budget,
        found: Vec::new(),
    };
    let complete = walk.go(0)?;
    let count = walk.found.len() as u64;
    let first = walk.found.first().map(|x| {
        let xp: Vec<FieldElement> = parity.pivots.iter().map(|&c| FieldElement(x[c])).collect();
        parity
            .inverse
            .vec_mul(f, &xp)
            .expect("pivot count matches")
            .iter()
            .map(|v| v.0)
            .collect()
    });
    Ok(result(first, count, complete))
}
