//! Bipartite disperser graphs.
//!
//! `G = (L, R, E)` is a `(γ, ε)`-disperser when every `S ⊆ L` with
//! `|S| ≥ γ|L|` has `|N(S)| ≥ (1 − ε)|R|`. Neighbourhoods only grow with
//! `S`, so checking subsets of size exactly `⌈γ|L|⌉` suffices.

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::limits::Limits;
use crate::rng::Stream;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DisperserError {
    #[error("degree {d} is outside [1, {m}]")]
    BadDegree { d: usize, m: usize },
    #[error("{0} subsets exceed the exhaustive cap {1}")]
    TooLarge(u64, u64),
    #[error("no disperser found in {0} tries")]
    Exhausted(u64),
    #[error("graph needs at least two right vertices")]
    TooSmall,
    #[error("malformed graph: {0}")]
    Format(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BipartiteGraph {
    pub n_left: usize,
    pub n_right: usize,
    pub adj: Vec<Vec<u32>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckMode {
    Exhaustive,
    Sampled,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DisperserVerdict {
    pub passed: bool,
    /// A violating left subset when `passed` is false.
    pub witness: Option<Vec<usize>>,
    pub mode: CheckMode,
    pub subsets_checked: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FoundDisperser {
    pub graph: BipartiteGraph,
    pub tries: u64,
    /// True when the accepted graph was checked exhaustively.
    pub verified: bool,
}

impl BipartiteGraph {
    pub fn new(n_left: usize, n_right: usize, adj: Vec<Vec<u32>>) -> Result<Self, DisperserError> {
        if adj.len() != n_left {
            return Err(DisperserError::Format(format!(
                "{} adjacency lists for {n_left} left vertices",
                adj.len()
            )));
        }
        for (u, list) in adj.iter().enumerate() {
            if list.windows(2).any(|w| w[0] >= w[1]) {
                return Err(DisperserError::Format(format!(
                    "neighbours of {u} not sorted and distinct"
                )));
            }
            if list.last().is_some_and(|&v| v as usize >= n_right) {
                return Err(DisperserError::Format(format!(
                    "neighbour of {u} out of range"
                )));
            }
        }
        Ok(Self {
            n_left,
            n_right,
            adj,
        })
    }

    pub fn complete(n_left: usize, n_right: usize) -> Self {
        Self {
            n_left,
            n_right,
            adj: vec![(0..n_right as u32).collect(); n_left],
        }
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum()
    }

    pub fn max_left_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn right_degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.n_right];
        for &v in self.adj.iter().flatten() {
            deg[v as usize] += 1;
        }
        deg
    }

    /// Edges as `(left, right)` pairs in adjacency order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(u, l)| l.iter().map(move |&v| (u, v as usize)))
    }

    /// Sorted neighbourhood of a set of left vertices.
    pub fn neighborhood(&self, set: &[usize]) -> Vec<usize> {
        let mut seen = vec![false; self.n_right];
        for &u in set {
            for &v in &self.adj[u] {
                seen[v as usize] = true;
            }
        }
        (0..self.n_right).filter(|&v| seen[v]).collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("graph serializes")
    }

    pub fn from_json(s: &str) -> Result<Self, DisperserError> {
        let g: BipartiteGraph =
            serde_json::from_str(s).map_err(|e| DisperserError::Format(e.to_string()))?;
        BipartiteGraph::new(g.n_left, g.n_right, g.adj)
    }
}

/// Each left vertex picks `d` distinct uniform right vertices.
pub fn sample_left_regular(
    n: usize,
    m: usize,
    d: usize,
    stream: &mut Stream,
) -> Result<BipartiteGraph, DisperserError> {
    if d < 1 || d > m {
        return Err(DisperserError::BadDegree { d, m });
    }
    let adj = (0..n)
        .map(|_| {
            stream
                .distinct(m, d)
                .into_iter()
                .map(|v| v as u32)
                .collect()
        })
        .collect();
    Ok(BipartiteGraph {
        n_left: n,
        n_right: m,
        adj,
    })
}

/// `⌈γ n⌉` and `⌈(1 − ε) m⌉`, computed with a little slack so that exact
/// fractions such as `γ = 1/2` do not round up by accident.
pub fn thresholds(n_left: usize, n_right: usize, gamma: f64, eps: f64) -> (usize, usize) {
    let ceil = |x: f64| (x - 1e-9).ceil().max(0.0) as usize;
    (
        ceil(gamma * n_left as f64).min(n_left),
        ceil((1.0 - eps) * n_right as f64),
    )
}

pub fn binomial(n: usize, k: usize) -> BigUint {
    if k > n {
        return BigUint::from(0u8);
    }
    let k = k.min(n - k);
    let mut acc = BigUint::from(1u8);
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// Exhaustive check over all left subsets of size `⌈γ n⌉`. A failing
/// verdict carries the lexicographically smallest violating subset.
pub fn verify_disperser(
    g: &BipartiteGraph,
    gamma: f64,
    eps: f64,
) -> Result<DisperserVerdict, DisperserError> {
    let (size, need) = thresholds(g.n_left, g.n_right, gamma, eps);
    let count = binomial(g.n_left, size);
    let cap = Limits::global().disperser;
    let count = match count.to_u64() {
        Some(c) if c <= cap => c,
        _ => {
            return Err(DisperserError::TooLarge(
                count.to_u64().unwrap_or(u64::MAX),
                cap,
            ))
        }
    };
    if size == 0 {
        let passed = need == 0;
        return Ok(DisperserVerdict {
            passed,
            witness: (!passed).then(Vec::new),
            mode: CheckMode::Exhaustive,
            subsets_checked: 1,
        });
    }
    let words = g.n_right.div_ceil(64);
    let masks: Vec<Vec<u64>> = g
        .adj
        .iter()
        .map(|l| {
            let mut m = vec![0u64; words];
            for &v in l {
                m[v as usize / 64] |= 1 << (v % 64);
            }
            m
        })
        .collect();
    let n = g.n_left;
    let witness = (0..=n - size)
        .into_par_iter()
        .map(|first| smallest_violation(&masks, n, size, need, first, words))
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .next();
    Ok(DisperserVerdict {
        passed: witness.is_none(),
        witness,
        mode: CheckMode::Exhaustive,
        subsets_checked: count,
    })
}

/// Depth-first scan of the subsets whose smallest element is `first`.
fn smallest_violation(
    masks: &[Vec<u64>],
    n: usize,
    size: usize,
    need: usize,
    first: usize,
    words: usize,
) -> Option<Vec<usize>> {
    let mut chosen = vec![first];
    let mut unions: Vec<Vec<u64>> = vec![masks[first].clone()];
    let popcount = |m: &[u64]| m.iter().map(|w| w.count_ones() as usize).sum::<usize>();
    if size == 1 {
        return (popcount(&unions[0]) < need).then_some(chosen);
    }
    let mut next = first + 1;
    loop {
        // Extend the current prefix with `next` if enough vertices remain.
        if next < n && n - next >= size - chosen.len() {
            let mut u = unions.last().expect("nonempty").clone();
            for w in 0..words {
                u[w] |= masks[next][w];
            }
            if chosen.len() + 1 == size {
                if popcount(&u) < need {
                    chosen.push(next);
                    return Some(chosen);
                }
                next += 1;
            } else {
                chosen.push(next);
                unions.push(u);
                next += 1;
            }
            continue;
        }
        // Backtrack.
        if chosen.len() == 1 {
            return None;
        }
        let last = chosen.pop().expect("nonempty");
        unions.pop();
        next = last + 1;
    }
}

/// Checks `samples` random subsets of size `⌈γ n⌉`.
pub fn verify_disperser_sampled(
    g: &BipartiteGraph,
    gamma: f64,
    eps: f64,
    samples: u64,
    stream: &Stream,
) -> DisperserVerdict {
    let (size, need) = thresholds(g.n_left, g.n_right, gamma, eps);
    let witness = (0..samples).into_par_iter().find_map_first(|t| {
        let set = stream.substream(t).distinct(g.n_left, size);
        (g.neighborhood(&set).len() < need).then_some(set)
    });
    DisperserVerdict {
        passed: witness.is_none(),
        witness,
        mode: CheckMode::Sampled,
        subsets_checked: samples,
    }
}

/// Exhaustive when within the cap, otherwise sampled.
pub fn check_disperser(
    g: &BipartiteGraph,
    gamma: f64,
    eps: f64,
    stream: &Stream,
) -> DisperserVerdict {
    match verify_disperser(g, gamma, eps) {
        Ok(v) => v,
        Err(_) => verify_disperser_sampled(g, gamma, eps, Limits::global().samples, stream),
    }
}

/// Las Vegas search: sample a `d`-left-regular graph, verify, retry.
/// Try `t` draws from substream `t`.
pub fn find_disperser(
    n: usize,
    m: usize,
    d: usize,
    gamma: f64,
    eps: f64,
    stream: &Stream,
    max_tries: u64,
) -> Result<FoundDisperser, DisperserError> {
    if d < 1 || d > m {
        return Err(DisperserError::BadDegree { d, m });
    }
    for t in 0..max_tries {
        let mut s = stream.substream(t);
        let graph = sample_left_regular(n, m, d, &mut s)?;
        let verdict = check_disperser(&graph, gamma, eps, &s.substream(u64::MAX));
        if verdict.passed {
            return Ok(FoundDisperser {
                graph,
                tries: t + 1,
                verified: verdict.mode == CheckMode::Exhaustive,
            });
        }
    }
    Err(DisperserError::Exhausted(max_tries))
}

/// Drops the `⌈m/2⌉` right vertices of highest degree (lower index first on
/// ties) and renumbers the rest in order.
pub fn purge_right_half(g: &BipartiteGraph) -> Result<BipartiteGraph, DisperserError> {
    let m = g.n_right;
    if m < 2 {
        return Err(DisperserError::TooSmall);
    }
    let deg = g.right_degrees();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| deg[b].cmp(&deg[a]).then(a.cmp(&b)));
    let mut removed = vec![false; m];
    for &v in &order[..m.div_ceil(2)] {
        removed[v] = true;
    }
    let mut new_index = vec![u32::MAX; m];
    let mut next = 0u32;
    for v in 0..m {
        if !removed[v] {
            new_index[v] = next;
            next += 1;
        }
    }
    let adj = g
        .adj
        .iter()
        .map(|l| {
            l.iter()
                .filter(|&&v| !removed[v as usize])
                .map(|&v| new_index[v as usize])
                .collect()
        })
        .collect();
    Ok(BipartiteGraph {
        n_left: g.n_left,
        n_right: next as usize,
        adj,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complete_and_edgeless() {
        let g = BipartiteGraph::complete(6, 4);
        assert!(verify_disperser(&g, 0.5, 0.0).unwrap().passed);
        let empty = BipartiteGraph::new(6, 4, vec![vec![]; 6]).unwrap();
        let v = verify_disperser(&empty, 0.5, 0.5).unwrap();
        assert!(!v.passed);
        assert_eq!(v.witness, Some(vec![0, 1, 2]));
    }

    #[test]
    fn paired_graph_is_half_half_disperser() {
        let g = BipartiteGraph::new(4, 2, vec![vec![0], vec![0], vec![1], vec![1]]).unwrap();
        let v = verify_disperser(&g, 0.5, 0.5).unwrap();
        assert!(v.passed);
        assert_eq!(v.subsets_checked, 6);
        // With ε = 0 the pair {0, 1} only reaches one vertex.
        let v = verify_disperser(&g, 0.5, 0.0).unwrap();
        assert_eq!(v.witness, Some(vec![0, 1]));
    }

    #[test]
    fn sampling_shapes() {
        let mut s = Stream::new(1);
        let g = sample_left_regular(10, 5, 5, &mut s).unwrap();
        assert_eq!(g, BipartiteGraph::complete(10, 5));
        let g = sample_left_regular(30, 9, 3, &mut s).unwrap();
        assert!(g.adj.iter().all(|l| l.len() == 3));
        assert_eq!(
            sample_left_regular(3, 2, 3, &mut s),
            Err(DisperserError::BadDegree { d: 3, m: 2 })
        );
    }

    #[test]
    fn right_degree_mean() {
        let g = sample_left_regular(1000, 500, 4, &mut Stream::new(2)).unwrap();
        let deg = g.right_degrees();
        let mean = deg.iter().sum::<usize>() as f64 / 500.0;
        assert!((mean - 8.0).abs() <= 0.8);
    }

    #[test]
    fn find_complete_and_exhausted() {
        let s = Stream::new(3);
        let found = find_disperser(8, 4, 4, 0.25, 0.0, &s, 5).unwrap();
        assert_eq!((found.tries, found.verified), (1, true));
        assert_eq!(
            find_disperser(8, 4, 2, 0.25, 0.0, &s, 0),
            Err(DisperserError::Exhausted(0))
        );
    }

    #[test]
    fn purge_star_and_bound() {
        let star = BipartiteGraph::new(3, 2, vec![vec![0], vec![0], vec![0]]).unwrap();
        let p = purge_right_half(&star).unwrap();
        assert_eq!(p.n_right, 1);
        assert_eq!(p.edge_count(), 0);
        let g = sample_left_regular(100, 50, 3, &mut Stream::new(4)).unwrap();
        let p = purge_right_half(&g).unwrap();
        assert_eq!(p.n_right, 25);
        assert!(p.right_degrees().into_iter().max().unwrap() <= 12);
        assert_eq!(
            purge_right_half(&BipartiteGraph::complete(2, 1)),
            Err(DisperserError::TooSmall)
        );
    }

    #[test]
    fn json_round_trip() {
        let g = sample_left_regular(7, 5, 2, &mut Stream::new(5)).unwrap();
        assert_eq!(BipartiteGraph::from_json(&g.to_json()).unwrap(), g);
        assert!(BipartiteGraph::from_json(r#"{"n_left":1,"n_right":2,"adj":[[1,0]]}"#).is_err());
    }
}
