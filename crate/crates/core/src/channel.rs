//! Symmetric discrete memoryless channels.
//!
//! A channel is a `q × q` row-stochastic matrix `p(y | x)` (row = input,
//! column = output) whose rows are permutations of row 0 and whose columns
//! are permutations of column 0. For each output `y` we fix a permutation
//! `σ_y` of the input alphabet with `p(y | x) = p(0 | σ_y(x))`; it is found
//! by sorting column `y` and column 0 by `(probability, input)` and matching
//! ranks, and `σ_0` is the identity.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::rng::Stream;
use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ChannelError {
    #[error("expected a {q}x{q} matrix")]
    BadShape { q: usize },
    #[error("row {row} is not a probability distribution")]
    NotStochastic { row: usize },
    #[error("{kind} {index} is not a permutation of {kind} 0")]
    NotSymmetric { kind: &'static str, index: usize },
    #[error("{0} is outside [0, 1]")]
    DomainError(f64),
    #[error("symbol {symbol} is outside the alphabet of size {q}")]
    BadSymbol { symbol: u32, q: usize },
    #[error("malformed channel file: {0}")]
    Format(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChannelSpec<T: Real> {
    q: usize,
    transition: Vec<Vec<T>>,
    cumulative: Vec<Vec<T>>,
    capacity_bits: T,
    posterior0: Vec<T>,
    posterior_zero: Vec<bool>,
    sigma: Vec<Vec<u32>>,
}

/// Validates a symmetric channel and derives capacity, posteriors and `σ`.
pub fn validate_symmetric<T: Real>(
    q: usize,
    matrix: Vec<Vec<T>>,
) -> Result<ChannelSpec<T>, ChannelError> {
    validate_with_zeros(q, matrix, None)
}

fn validate_with_zeros<T: Real>(
    q: usize,
    matrix: Vec<Vec<T>>,
    exact_zero: Option<Vec<bool>>,
) -> Result<ChannelSpec<T>, ChannelError> {
    if q < 2 || matrix.len() != q || matrix.iter().any(|r| r.len() != q) {
        return Err(ChannelError::BadShape { q });
    }
    let tol = T::of(T::TOLERANCE);
    for (i, row) in matrix.iter().enumerate() {
        let in_range = row.iter().all(|&p| p >= T::zero() && p <= T::one());
        let sum = row.iter().fold(T::zero(), |a, &b| a + b);
        if !in_range || (sum - T::one()).abs() > tol {
            return Err(ChannelError::NotStochastic { row: i });
        }
    }
    let column = |y: usize| -> Vec<T> { matrix.iter().map(|r| r[y]).collect() };
    let same_multiset = |a: &[T], b: &[T]| {
        let (mut a, mut b) = (a.to_vec(), b.to_vec());
        a.sort_by(|x, y| x.partial_cmp(y).expect("finite"));
        b.sort_by(|x, y| x.partial_cmp(y).expect("finite"));
        a.iter().zip(&b).all(|(x, y)| (*x - *y).abs() <= tol)
    };
    for i in 1..q {
        if !same_multiset(&matrix[i], &matrix[0]) {
            return Err(ChannelError::NotSymmetric {
                kind: "row",
                index: i,
            });
        }
    }
    let col0 = column(0);
    for y in 1..q {
        if !same_multiset(&column(y), &col0) {
            return Err(ChannelError::NotSymmetric {
                kind: "column",
                index: y,
            });
        }
    }

    let ranked = |col: &[T]| -> Vec<usize> {
        let mut idx: Vec<usize> = (0..q).collect();
        idx.sort_by(|&a, &b| col[a].partial_cmp(&col[b]).expect("finite").then(a.cmp(&b)));
        idx
    };
    let order0 = ranked(&col0);
    let mut sigma = vec![(0..q as u32).collect::<Vec<u32>>()];
    for y in 1..q {
        let order = ranked(&column(y));
        let mut s = vec![0u32; q];
        for (x, x0) in order.iter().zip(&order0) {
            s[*x] = *x0 as u32;
        }
        sigma.push(s);
    }
    for (y, s) in sigma.iter().enumerate() {
        for x in 0..q {
            if (matrix[x][y] - matrix[s[x] as usize][0]).abs() > tol {
                return Err(ChannelError::NotSymmetric {
                    kind: "column",
                    index: y,
                });
            }
        }
    }

    let total = col0.iter().fold(T::zero(), |a, &b| a + b);
    let posterior0: Vec<T> = col0.iter().map(|&p| p / total).collect();
    let posterior_zero =
        exact_zero.unwrap_or_else(|| posterior0.iter().map(|&p| p.as_f64() <= T::ZERO).collect());
    let capacity_bits = T::of((q as f64).log2()) - entropy_bits(&matrix[0]);
    let cumulative = matrix
        .iter()
        .map(|row| {
            row.iter()
                .scan(T::zero(), |acc, &p| {
                    *acc = *acc + p;
                    Some(*acc)
                })
                .collect()
        })
        .collect();
    Ok(ChannelSpec {
        q,
        transition: matrix,
        cumulative,
        capacity_bits,
        posterior0,
        posterior_zero,
        sigma,
    })
}

/// Base-2 Shannon entropy with `0·log 0 = 0`.
pub fn entropy_bits<T: Real>(dist: &[T]) -> T {
    dist.iter()
        .filter(|&&p| p > T::zero())
        .fold(T::zero(), |acc, &p| acc - p * p.log2())
}

/// q-ary entropy `H_q(x) = x·log_q(q−1) − x·log_q x − (1−x)·log_q(1−x)`.
pub fn entropy_q<T: Real>(x: T, q: u32) -> Result<T, ChannelError> {
    if !(x >= T::zero() && x <= T::one()) {
        return Err(ChannelError::DomainError(x.as_f64()));
    }
    let lq = T::of((q as f64).ln());
    let xlx = |v: T| if v > T::zero() { v * v.ln() } else { T::zero() };
    let qm1 = T::of((q - 1) as f64);
    Ok((x * qm1.ln() - xlx(x) - xlx(T::one() - x)) / lq)
}

pub fn capacity<T: Real>(spec: &ChannelSpec<T>) -> T {
    spec.capacity_bits
}

/// `I(X; Y)` under the uniform input, from the joint distribution.
pub fn mutual_information_uniform<T: Real>(spec: &ChannelSpec<T>) -> T {
    let q = spec.q;
    let px = T::one() / T::of(q as f64);
    let py: Vec<T> = (0..q)
        .map(|y| (0..q).fold(T::zero(), |a, x| a + px * spec.transition[x][y]))
        .collect();
    let mut info = T::zero();
    for x in 0..q {
        for (y, &p_y) in py.iter().enumerate() {
            let p = spec.transition[x][y];
            if p > T::zero() {
                info = info + px * p * (p / p_y).log2();
            }
        }
    }
    info
}

/// Sends `x` through the channel coordinate by coordinate.
pub fn transmit<T: Real>(
    spec: &ChannelSpec<T>,
    x: &[u32],
    stream: &mut Stream,
) -> Result<Vec<u32>, ChannelError> {
    x.iter()
        .map(|&s| {
            if s as usize >= spec.q {
                return Err(ChannelError::BadSymbol {
                    symbol: s,
                    q: spec.q,
                });
            }
            Ok(spec.sample_output(s, stream))
        })
        .collect()
}

impl<T: Real> ChannelSpec<T> {
    pub fn q(&self) -> usize {
        self.q
    }

    pub fn transition(&self) -> &[Vec<T>] {
        &self.transition
    }

    pub fn prob(&self, x: u32, y: u32) -> T {
        self.transition[x as usize][y as usize]
    }

    pub fn row0(&self) -> &[T] {
        &self.transition[0]
    }

    pub fn capacity_bits(&self) -> T {
        self.capacity_bits
    }

    /// `p(X = c | Y = 0)` under the uniform prior.
    pub fn posterior0(&self) -> &[T] {
        &self.posterior0
    }

    /// Symbols whose posterior is treated as zero.
    pub fn posterior_zero(&self) -> &[bool] {
        &self.posterior_zero
    }

    pub fn sigma(&self, y: u32) -> &[u32] {
        &self.sigma[y as usize]
    }

    /// Smallest positive entry of row 0.
    pub fn p_min(&self) -> T {
        self.transition[0]
            .iter()
            .copied()
            .filter(|&p| p.as_f64() > T::ZERO)
            .fold(T::one(), T::min)
    }

    /// Row-0 entropy in bits.
    pub fn row_entropy(&self) -> T {
        entropy_bits(&self.transition[0])
    }

    /// One channel use on input `x`, by inverse CDF on a uniform draw.
    pub fn sample_output(&self, x: u32, stream: &mut Stream) -> u32 {
        let u = T::of(stream.unit_f64());
        let cdf = &self.cumulative[x as usize];
        match cdf.iter().position(|&c| u < c) {
            Some(y) => y as u32,
            // Rounding left the total just under 1: fall back to the last
            // symbol with positive probability.
            None => self.transition[x as usize]
                .iter()
                .rposition(|&p| p > T::zero())
                .expect("row has positive mass") as u32,
        }
    }

    /// Converts to another scalar type, keeping the zero pattern.
    pub fn cast<U: Real>(&self) -> ChannelSpec<U> {
        let matrix = self
            .transition
            .iter()
            .map(|r| r.iter().map(|&p| U::of(p.as_f64())).collect())
            .collect();
        validate_with_zeros(self.q, matrix, Some(self.posterior_zero.clone()))
            .expect("same channel")
    }
}

/// Binary symmetric channel with crossover `p`.
pub fn bsc<T: Real>(p: f64) -> ChannelSpec<T> {
    validate_symmetric(
        2,
        vec![
            vec![T::of(1.0 - p), T::of(p)],
            vec![T::of(p), T::of(1.0 - p)],
        ],
    )
    .expect("BSC is symmetric")
}

/// q-ary symmetric channel: correct with probability `1 − p`, otherwise a
/// uniformly chosen wrong symbol.
pub fn q_ary_symmetric<T: Real>(q: usize, p: f64) -> ChannelSpec<T> {
    let off = p / (q - 1) as f64;
    let matrix = (0..q)
        .map(|x| {
            (0..q)
                .map(|y| T::of(if x == y { 1.0 - p } else { off }))
                .collect()
        })
        .collect();
    validate_symmetric(q, matrix).expect("q-ary symmetric channel")
}

pub fn noiseless<T: Real>(q: usize) -> ChannelSpec<T> {
    q_ary_symmetric(q, 0.0)
}

/// Circulant channel `p(y | x) = row[(y − x) mod q]` for a random row, with
/// some entries zeroed so that zero posteriors get exercised.
pub fn random_symmetric<T: Real>(q: usize, stream: &mut Stream) -> ChannelSpec<T> {
    let mut weights: Vec<f64> = (0..q)
        .map(|i| {
            if i > 0 && stream.below(4) == 0 {
                0.0
            } else {
                0.05 + stream.unit_f64()
            }
        })
        .collect();
    let total: f64 = weights.iter().sum();
    weights.iter_mut().for_each(|w| *w /= total);
    let matrix = (0..q)
        .map(|x| (0..q).map(|y| T::of(weights[(y + q - x) % q])).collect())
        .collect();
    validate_symmetric(q, matrix).expect("circulant matrices are symmetric")
}

/// On-disk channel description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelFile {
    pub q: usize,
    #[serde(default)]
    pub matrix: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exact: Option<Vec<Vec<(u64, u64)>>>,
}

impl ChannelFile {
    /// Exact entries, when present, take precedence over `matrix` and fix
    /// which posteriors are zero.
    pub fn to_spec<T: Real>(&self) -> Result<ChannelSpec<T>, ChannelError> {
        match &self.exact {
            Some(exact) => {
                if exact.len() != self.q || exact.iter().any(|r| r.len() != self.q) {
                    return Err(ChannelError::BadShape { q: self.q });
                }
                if exact.iter().flatten().any(|&(_, den)| den == 0) {
                    return Err(ChannelError::Format("zero denominator".into()));
                }
                let matrix = exact
                    .iter()
                    .map(|r| r.iter().map(|&(n, d)| T::of(n as f64 / d as f64)).collect())
                    .collect();
                let zeros = exact.iter().map(|r| r[0].0 == 0).collect();
                validate_with_zeros(self.q, matrix, Some(zeros))
            }
            None => validate_symmetric(
                self.q,
                self.matrix
                    .iter()
                    .map(|r| r.iter().map(|&p| T::of(p)).collect())
                    .collect(),
            ),
        }
    }

    pub fn from_spec<T: Real>(spec: &ChannelSpec<T>) -> ChannelFile {
        ChannelFile {
            q: spec.q,
            matrix: spec
                .transition
                .iter()
                .map(|r| r.iter().map(|p| p.as_f64()).collect())
                .collect(),
            exact: None,
        }
    }

    pub fn parse(json: &str) -> Result<ChannelFile, ChannelError> {
        serde_json::from_str(json).map_err(|e| ChannelError::Format(e.to_string()))
    }

    /// SHA-256 of the canonical JSON form, as lowercase hex.
    pub fn digest(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("channel serializes");
        Sha256::digest(bytes)
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }
}
