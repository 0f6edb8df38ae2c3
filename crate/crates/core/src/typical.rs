//! Typical sets.
//!
//! For a received word `y`, `x` is ε-typical when the symbols
//! `z_i = σ_{y_i}(x_i)` have empirical frequencies within `ε` of the
//! posterior `p(X = c | Y = 0)` for every symbol `c` whose posterior is
//! nonzero. Symbols with zero posterior are unconstrained.
//!
//! Membership, counting and mass computations share one admissibility
//! table, so they agree exactly on boundary cases.

use num_bigint::BigUint;
use num_traits::{One, Zero};
use rayon::prelude::*;
use thiserror::Error;

use crate::channel::ChannelSpec;
use crate::limits::{saturating_pow, Limits};
use crate::rng::Stream;
use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TypicalError {
    #[error("vectors have lengths {got} but the block length is {n}")]
    LengthMismatch { n: usize, got: usize },
    #[error("{what} is too large for enumeration ({size} > {cap})")]
    TooLarge {
        what: &'static str,
        size: u64,
        cap: u64,
    },
    #[error("invalid parameters: {0}")]
    BadParams(String),
}

#[derive(Debug, Clone)]
pub struct TypicalParams<'a, T: Real> {
    pub channel: &'a ChannelSpec<T>,
    pub n: usize,
    pub eps: T,
}

impl<'a, T: Real> TypicalParams<'a, T> {
    pub fn new(channel: &'a ChannelSpec<T>, n: usize, eps: T) -> Result<Self, TypicalError> {
        if n == 0 {
            return Err(TypicalError::BadParams(
                "block length must be positive".into(),
            ));
        }
        if !(eps > T::zero() && eps <= T::one()) {
            return Err(TypicalError::BadParams(format!(
                "ε = {eps} is outside (0, 1]"
            )));
        }
        Ok(Self { channel, n, eps })
    }

    pub fn checker(&self) -> TypicalChecker {
        TypicalChecker::new(self)
    }
}

/// Precomputed admissible symbol counts for one `(channel, n, ε)`.
#[derive(Debug, Clone)]
pub struct TypicalChecker {
    q: usize,
    n: usize,
    /// `allowed[c][i]`: may symbol `c` occur exactly `i` times.
    allowed: Vec<Vec<bool>>,
    constrained: Vec<bool>,
    sigma: Vec<Vec<u32>>,
}

impl TypicalChecker {
    pub fn new<T: Real>(params: &TypicalParams<'_, T>) -> Self {
        let ch = params.channel;
        let n = params.n;
        let slack = T::of(T::SLACK);
        let nn = T::of(n as f64);
        let constrained: Vec<bool> = ch.posterior_zero().iter().map(|z| !z).collect();
        let allowed = (0..ch.q())
            .map(|c| {
                (0..=n)
                    .map(|i| {
                        !constrained[c]
                            || (T::of(i as f64) / nn - ch.posterior0()[c]).abs()
                                <= params.eps + slack
                    })
                    .collect()
            })
            .collect();
        Self {
            q: ch.q(),
            n,
            allowed,
            constrained,
            sigma: (0..ch.q() as u32).map(|y| ch.sigma(y).to_vec()).collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn sigma(&self, y: u32, x: u32) -> u32 {
        self.sigma[y as usize][x as usize]
    }

    pub fn allows(&self, symbol: usize, count: usize) -> bool {
        self.allowed[symbol][count]
    }

    pub fn is_constrained(&self, symbol: usize) -> bool {
        self.constrained[symbol]
    }

    /// Typicality from the counts of `z`.
    pub fn counts_ok(&self, counts: &[usize]) -> bool {
        counts.iter().enumerate().all(|(c, &i)| self.allowed[c][i])
    }

    pub fn check(&self, y: &[u32], x: &[u32]) -> Result<bool, TypicalError> {
        for v in [y, x] {
            if v.len() != self.n {
                return Err(TypicalError::LengthMismatch {
                    n: self.n,
                    got: v.len(),
                });
            }
        }
        let mut counts = vec![0usize; self.q];
        for (&yi, &xi) in y.iter().zip(x) {
            counts[self.sigma[yi as usize][xi as usize] as usize] += 1;
        }
        Ok(self.counts_ok(&counts))
    }
}

pub fn is_typical<T: Real>(
    params: &TypicalParams<'_, T>,
    y: &[u32],
    x: &[u32],
) -> Result<bool, TypicalError> {
    params.checker().check(y, x)
}

/// Every member of `Typical(y, ε)`, in lexicographic order (coordinate 0
/// most significant).
pub fn enumerate_typical<T: Real>(
    params: &TypicalParams<'_, T>,
    y: &[u32],
) -> Result<Vec<Vec<u32>>, TypicalError> {
    let q = params.channel.q() as u64;
    let size = saturating_pow(q, params.n as u64);
    let cap = Limits::global().typical;
    if size > cap {
        return Err(TypicalError::TooLarge {
            what: "q^n",
            size,
            cap,
        });
    }
    if y.len() != params.n {
        return Err(TypicalError::LengthMismatch {
            n: params.n,
            got: y.len(),
        });
    }
    let checker = params.checker();
    let mut out = Vec::new();
    let mut x = vec![0u32; params.n];
    for _ in 0..size {
        if checker.check(y, &x)? {
            out.push(x.clone());
        }
        for xi in x.iter_mut().rev() {
            *xi += 1;
            if (*xi as u64) < q {
                break;
            }
            *xi = 0;
        }
    }
    Ok(out)
}

/// `|Typical(y, ε)|` (independent of `y`) as a sum of multinomials over
/// admissible count vectors; zero-posterior symbols share the remainder.
pub fn count_typical<T: Real>(params: &TypicalParams<'_, T>) -> Result<BigUint, TypicalError> {
    let (n, q) = (params.n, params.channel.q());
    if n > 64 || q > 8 {
        return Err(TypicalError::TooLarge {
            what: "count_typical (n ≤ 64, q ≤ 8)",
            size: n.max(q) as u64,
            cap: 64,
        });
    }
    let checker = params.checker();
    let binom = binomials(n);
    // dp[s]: ways to place the constrained symbols seen so far on s positions.
    let mut dp = vec![BigUint::zero(); n + 1];
    dp[0] = BigUint::one();
    let mut free = 0u32;
    for c in 0..q {
        if !checker.is_constrained(c) {
            free += 1;
            continue;
        }
        let mut next = vec![BigUint::zero(); n + 1];
        for (s, ways) in dp.iter().enumerate() {
            if ways.is_zero() {
                continue;
            }
            for i in 0..=(n - s) {
                if checker.allows(c, i) {
                    next[s + i] += ways * &binom[n - s][i];
                }
            }
        }
        dp = next;
    }
    let mut total = BigUint::zero();
    for (s, ways) in dp.iter().enumerate() {
        let rest = (n - s) as u32;
        if rest == 0 {
            total += ways;
        } else if free > 0 {
            total += ways * BigUint::from(free).pow(rest);
        }
    }
    Ok(total)
}

fn binomials(n: usize) -> Vec<Vec<BigUint>> {
    let mut rows: Vec<Vec<BigUint>> = Vec::with_capacity(n + 1);
    for i in 0..=n {
        let mut row = vec![BigUint::one(); i + 1];
        for j in 1..i {
            row[j] = &rows[i - 1][j - 1] + &rows[i - 1][j];
        }
        rows.push(row);
    }
    rows
}

/// Monte Carlo estimate of the probability mass outside the typical set.
#[derive(Debug, Clone, PartialEq)]
pub struct MassEstimate {
    pub trials: u64,
    pub outside: u64,
    pub estimate: f64,
    pub stderr: f64,
    /// `2q · min_{p_c > 0} exp(−ε² p_c n / 2)`.
    pub comparator: f64,
}

/// Chernoff-style comparator `2q · min_{p_c>0} exp(−ε² p_c n / 2)` over the
/// nonzero posteriors.
pub fn chernoff_comparator<T: Real>(params: &TypicalParams<'_, T>) -> f64 {
    let ch = params.channel;
    let eps = params.eps.as_f64();
    let n = params.n as f64;
    let best = ch
        .posterior0()
        .iter()
        .zip(ch.posterior_zero())
        .filter(|(_, &zero)| !zero)
        .map(|(p, _)| (-eps * eps * p.as_f64() * n / 2.0).exp())
        .fold(f64::INFINITY, f64::min);
    2.0 * ch.q() as f64 * best
}

/// Exact `Σ_z p(z | 0ⁿ)·1[0ⁿ ∉ Typical(z, ε)]`, summing over output
/// compositions rather than individual outputs.
pub fn mass_outside_exact<T: Real>(params: &TypicalParams<'_, T>) -> Result<f64, TypicalError> {
    let ch = params.channel;
    let (n, q) = (params.n, ch.q());
    let size = saturating_pow(q as u64, n as u64);
    let cap = Limits::global().exact;
    if size > cap {
        return Err(TypicalError::TooLarge {
            what: "q^n",
            size,
            cap,
        });
    }
    let checker = params.checker();
    let ln_fact: Vec<f64> = (0..=n)
        .scan(0.0, |acc, i| {
            if i > 0 {
                *acc += (i as f64).ln();
            }
            Some(*acc)
        })
        .collect();
    let row0: Vec<f64> = (0..q as u32).map(|y| ch.prob(0, y).as_f64()).collect();
    let target: Vec<usize> = (0..q as u32)
        .map(|y| checker.sigma(y, 0) as usize)
        .collect();
    let mut outside = 0.0;
    for_each_composition(n, q, &mut |j: &[usize]| {
        let mut ln_p = ln_fact[n];
        for (y, &jy) in j.iter().enumerate() {
            if jy > 0 {
                if row0[y] <= 0.0 {
                    return;
                }
                ln_p += jy as f64 * row0[y].ln() - ln_fact[jy];
            }
        }
        let mut counts = vec![0usize; q];
        for (y, &jy) in j.iter().enumerate() {
            counts[target[y]] += jy;
        }
        if !checker.counts_ok(&counts) {
            outside += ln_p.exp();
        }
    });
    Ok(outside)
}

fn for_each_composition(n: usize, parts: usize, f: &mut impl FnMut(&[usize])) {
    fn go(rest: usize, idx: usize, cur: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
        if idx + 1 == cur.len() {
            cur[idx] = rest;
            f(cur);
            return;
        }
        for v in 0..=rest {
            cur[idx] = v;
            go(rest - v, idx + 1, cur, f);
        }
    }
    let mut cur = vec![0; parts];
    go(n, 0, &mut cur, f);
}

/// Samples `z ~ p(· | 0ⁿ)` and counts how often `0ⁿ ∉ Typical(z, ε)`.
/// Trial `t` uses substream `t` of `stream`, so results do not depend on
/// the thread count.
pub fn mass_outside_mc<T: Real>(
    params: &TypicalParams<'_, T>,
    trials: u64,
    stream: &Stream,
) -> MassEstimate {
    let checker = params.checker();
    let ch = params.channel;
    let zero = vec![0u32; params.n];
    let outside: u64 = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut s = stream.substream(t);
            let z: Vec<u32> = (0..params.n).map(|_| ch.sample_output(0, &mut s)).collect();
            u64::from(!checker.check(&z, &zero).expect("lengths match"))
        })
        .sum();
    let (estimate, stderr) = proportion(outside, trials);
    MassEstimate {
        trials,
        outside,
        estimate,
        stderr,
        comparator: chernoff_comparator(params),
    }
}

/// Sample proportion and its binomial standard error.
pub fn proportion(hits: u64, trials: u64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 0.0);
    }
    let p = hits as f64 / trials as f64;
    (p, (p * (1.0 - p) / trials as f64).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{bsc, noiseless};

    #[test]
    fn noiseless_examples() {
        let ch = noiseless::<f64>(2);
        let p = TypicalParams::new(&ch, 4, 0.3).unwrap();
        assert!(is_typical(&p, &[0; 4], &[0; 4]).unwrap());
        assert!(is_typical(&p, &[0; 4], &[0, 0, 0, 1]).unwrap());
        let set = enumerate_typical(&p, &[0; 4]).unwrap();
        assert_eq!(set.len(), 5);
        assert!(set
            .iter()
            .all(|x| x.iter().filter(|&&v| v == 1).count() <= 1));
        assert_eq!(count_typical(&p).unwrap(), BigUint::from(5u8));
    }

    #[test]
    fn all_zero_is_atypical_for_itself() {
        let ch = bsc::<f64>(0.25);
        let p = TypicalParams::new(&ch, 16, 0.05).unwrap();
        assert!(!is_typical(&p, &[0; 16], &[0; 16]).unwrap());
        assert_eq!(count_typical(&p).unwrap(), BigUint::from(1820u32));
    }

    #[test]
    fn eps_one_admits_everything() {
        let ch = bsc::<f64>(0.3);
        let p = TypicalParams::new(&ch, 6, 1.0).unwrap();
        assert_eq!(count_typical(&p).unwrap(), BigUint::from(64u8));
        assert_eq!(
            enumerate_typical(&p, &[1, 0, 1, 0, 0, 0]).unwrap().len(),
            64
        );
    }

    #[test]
    fn length_mismatch() {
        let ch = bsc::<f64>(0.3);
        let p = TypicalParams::new(&ch, 3, 0.1).unwrap();
        assert_eq!(
            is_typical(&p, &[0, 0], &[0, 0, 0]),
            Err(TypicalError::LengthMismatch { n: 3, got: 2 })
        );
    }

    #[test]
    fn noiseless_mass_is_zero() {
        let ch = noiseless::<f64>(3);
        let p = TypicalParams::new(&ch, 10, 0.05).unwrap();
        assert_eq!(mass_outside_exact(&p).unwrap(), 0.0);
        assert_eq!(mass_outside_mc(&p, 500, &Stream::new(1)).outside, 0);
    }

    #[test]
    fn bsc_normalized_log_count_brackets_entropy() {
        let ch = bsc::<f64>(0.25);
        let p = TypicalParams::new(&ch, 48, 0.02).unwrap();
        let count = count_typical(&p).unwrap();
        let log = num_traits::ToPrimitive::to_f64(&count).unwrap().log2();
        let h = ch.row_entropy();
        assert!((log / 48.0 - h).abs() <= 0.25, "{} vs {h}", log / 48.0);
    }
}
