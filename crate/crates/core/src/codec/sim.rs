//! Failure probabilities, the coefficient-uniformity check, and the
//! predicted error exponent.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::decode::decode_with;
use super::{CodeInstance, CodecError};
use crate::channel::{transmit, ChannelSpec};
use crate::disperser::BipartiteGraph;
use crate::galois::{make_field, FieldElement};
use crate::limits::{saturating_pow, Limits};
use crate::rng::Stream;
use crate::scalar::Real;
use crate::typical::{proportion, TypicalParams};

/// `max(1/n, p_min/2)` with `p_min` the smallest positive transition
/// probability in row 0.
pub fn default_eps<T: Real>(channel: &ChannelSpec<T>, n: usize) -> f64 {
    (1.0 / n as f64).max(channel.p_min().as_f64() / 2.0)
}

fn digits(mut index: u64, q: u64, len: usize) -> Vec<u32> {
    let mut v = vec![0u32; len];
    for slot in v.iter_mut().rev() {
        *slot = (index % q) as u32;
        index /= q;
    }
    v
}

/// `Σ_y p(y | Enc(m))·1[Dec(y) ≠ m]`, summed over every channel output.
pub fn failure_prob_exact<T: Real>(
    inst: &CodeInstance,
    channel: &ChannelSpec<T>,
    eps: T,
    m: &[u32],
) -> Result<f64, CodecError> {
    let q = inst.field().order() as u64;
    let n = inst.n();
    let total = saturating_pow(q, n as u64);
    let cap = Limits::global().exact;
    if total > cap {
        return Err(CodecError::TooLarge {
            what: "q^n",
            size: total,
            cap,
        });
    }
    let msg: Vec<FieldElement> = m.iter().map(|&v| FieldElement(v)).collect();
    let x: Vec<u32> = inst.encode(&msg)?.iter().map(|v| v.0).collect();
    let checker = TypicalParams::new(channel, n, eps)?.checker();
    const CHUNK: u64 = 1 << 12;
    let partial: Vec<Result<f64, CodecError>> = (0..total.div_ceil(CHUNK))
        .into_par_iter()
        .map(|c| {
            let mut sum = 0.0;
            for idx in c * CHUNK..((c + 1) * CHUNK).min(total) {
                let y = digits(idx, q, n);
                let p: f64 = x
                    .iter()
                    .zip(&y)
                    .map(|(&a, &b)| channel.prob(a, b).as_f64())
                    .product();
                if p == 0.0 {
                    continue;
                }
                if decode_with(inst, &checker, &y)?.message() != Some(m) {
                    sum += p;
                }
            }
            Ok(sum)
        })
        .collect();
    let mut sum = 0.0;
    for p in partial {
        sum += p?;
    }
    Ok(sum)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MessageEstimate {
    pub message: Vec<u32>,
    pub trials: u64,
    pub failures: u64,
    pub estimate: f64,
    pub stderr: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McReport {
    pub per_message: Vec<MessageEstimate>,
}

impl McReport {
    /// The message with the largest estimate (first on ties).
    pub fn worst(&self) -> Option<&MessageEstimate> {
        self.per_message
            .iter()
            .fold(None, |best: Option<&MessageEstimate>, m| match best {
                Some(b) if b.estimate >= m.estimate => Some(b),
                _ => Some(m),
            })
    }
}

/// Monte Carlo failure rates for the all-zero message and
/// `message_sample_size − 1` uniform messages. Message `i`, trial `t` draws
/// from `stream.substream(1 + i).substream(t)`; messages from substream 0.
pub fn failure_prob_mc<T: Real>(
    inst: &CodeInstance,
    channel: &ChannelSpec<T>,
    eps: T,
    message_sample_size: usize,
    trials: u64,
    stream: &Stream,
) -> Result<McReport, CodecError> {
    let f = inst.field();
    let checker = TypicalParams::new(channel, inst.n(), eps)?.checker();
    let mut ms = stream.substream(0);
    let mut messages = vec![vec![0u32; inst.k()]];
    for _ in 1..message_sample_size.max(1) {
        messages.push((0..inst.k()).map(|_| f.uniform(&mut ms).0).collect());
    }
    let mut per_message = Vec::with_capacity(messages.len());
    for (i, m) in messages.into_iter().enumerate() {
        let msg: Vec<FieldElement> = m.iter().map(|&v| FieldElement(v)).collect();
        let x: Vec<u32> = inst.encode(&msg)?.iter().map(|v| v.0).collect();
        let base = stream.substream(1 + i as u64);
        let outcomes: Vec<Result<bool, CodecError>> = (0..trials)
            .into_par_iter()
            .map(|t| {
                let mut s = base.substream(t);
                let y = transmit(channel, &x, &mut s)
                    .map_err(|e| CodecError::BadShape(e.to_string()))?;
                Ok(decode_with(inst, &checker, &y)?.message() != Some(&m[..]))
            })
            .collect();
        let mut failures = 0u64;
        for o in outcomes {
            failures += o? as u64;
        }
        let (estimate, stderr) = proportion(failures, trials);
        per_message.push(MessageEstimate {
            message: m,
            trials,
            failures,
            estimate,
            stderr,
        });
    }
    Ok(McReport { per_message })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UniformityVerdict {
    pub passed: bool,
    /// `|N(supp x)|`.
    pub support_size: usize,
    pub assignments: u64,
    pub min_count: u64,
    pub max_count: u64,
}

/// Runs over every coefficient assignment `α ∈ F_q^{E(H)}` and tallies the
/// layer's output on `S = N(supp x)`; passes iff every value in `F_q^S`
/// occurs equally often.
pub fn restriction_uniformity_check(
    g: &BipartiteGraph,
    x: &[u32],
    q: u32,
) -> Result<UniformityVerdict, CodecError> {
    let f = make_field(q as u64)?;
    if x.len() != g.n_left {
        return Err(CodecError::BadShape(format!(
            "x has length {}, graph has {} left vertices",
            x.len(),
            g.n_left
        )));
    }
    for &v in x {
        f.element(v)?;
    }
    let support: Vec<usize> = (0..x.len()).filter(|&i| x[i] != 0).collect();
    if support.is_empty() {
        return Err(CodecError::EmptySupport);
    }
    let s = g.neighborhood(&support);
    let edges: Vec<(usize, usize)> = g.edges().collect();
    let assignments = saturating_pow(q as u64, edges.len() as u64);
    let cap = Limits::global().uniformity;
    if assignments > cap {
        return Err(CodecError::TooLarge {
            what: "q^|E|",
            size: assignments,
            cap,
        });
    }
    let mut slot = vec![usize::MAX; g.n_right];
    for (p, &j) in s.iter().enumerate() {
        slot[j] = p;
    }
    let mut tally = vec![0u64; saturating_pow(q as u64, s.len() as u64) as usize];
    let mut alpha = vec![0u32; edges.len()];
    let mut out = vec![FieldElement::ZERO; s.len()];
    for _ in 0..assignments {
        out.iter_mut().for_each(|v| *v = FieldElement::ZERO);
        for (e, &(i, j)) in edges.iter().enumerate() {
            if slot[j] != usize::MAX && x[i] != 0 {
                let p = slot[j];
                out[p] = f.add(out[p], f.mul(FieldElement(alpha[e]), FieldElement(x[i])));
            }
        }
        let idx = out
            .iter()
            .fold(0usize, |acc, v| acc * q as usize + v.0 as usize);
        tally[idx] += 1;
        for a in alpha.iter_mut() {
            *a += 1;
            if *a < q {
                break;
            }
            *a = 0;
        }
    }
    let min_count = *tally.iter().min().expect("nonempty");
    let max_count = *tally.iter().max().expect("nonempty");
    Ok(UniformityVerdict {
        passed: min_count == max_count,
        support_size: s.len(),
        assignments,
        min_count,
        max_count,
    })
}

/// `r − (1 − γ)·log₂ q + H₂(row)`, the exponent of the bound on the chance
/// that a wrong codeword looks typical (lower-order terms dropped).
pub fn predicted_exponent<T: Real>(channel: &ChannelSpec<T>, r: f64, gamma: f64, _eps: f64) -> f64 {
    r - (1.0 - gamma) * (channel.q() as f64).log2() + channel.row_entropy().as_f64()
}
