//! Brute-force range-detector verification.
//!
//! The circuit is first reduced to its generator matrix; inputs are then
//! enumerated by support (depth-first, sharing partial sums) and every
//! nonzero coefficient pattern. Over `F_2` rows are bit-packed.
//!
//! Above the enumeration cap the check falls back to random inputs plus a
//! meet-in-the-middle search for low-weight kernel vectors. A sampled pass
//! is reported as such, never as a proof.

use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{GadgetError, RangeDetectorSpec};
use crate::circuit::LinearCircuit;
use crate::disperser::{binomial, CheckMode};
use crate::galois::{FieldElement, FieldSpec};
use crate::limits::Limits;
use crate::rng::Stream;

/// Largest table built by the kernel search.
const MITM_BUDGET: u64 = 1 << 18;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RangeVerdict {
    pub passed: bool,
    pub mode: CheckMode,
    /// An input whose output weight leaves the range.
    pub witness: Option<Vec<u32>>,
    pub inputs_checked: u64,
}

/// Number of inputs with weight in `[lo, hi]`.
pub fn inputs_in_range(m: usize, lo: usize, hi: usize, q: u32) -> BigUint {
    (lo..=hi.min(m))
        .map(|w| binomial(m, w) * BigUint::from(q - 1).pow(w as u32))
        .sum()
}

/// The linear map of a circuit in a form suited to enumeration.
pub(crate) struct MapView {
    field: FieldSpec,
    m: usize,
    n_out: usize,
    binary: Option<Vec<Vec<u64>>>,
    rows: Vec<Vec<FieldElement>>,
}

impl MapView {
    pub(crate) fn new(c: &LinearCircuit) -> Result<Self, GadgetError> {
        let g = c.to_generator_matrix()?;
        let field = c.field().clone();
        let rows: Vec<Vec<FieldElement>> = (0..g.rows()).map(|i| g.row(i).to_vec()).collect();
        let binary = (field.order() == 2).then(|| rows.iter().map(|r| pack(r)).collect());
        Ok(Self {
            field,
            m: c.n_inputs(),
            n_out: c.n_outputs(),
            binary,
            rows,
        })
    }

    /// Output weight of the sparse input `Σ coeffs[i]·e_{support[i]}`.
    fn weight_of(&self, support: &[usize], coeffs: &[FieldElement]) -> usize {
        match &self.binary {
            Some(bits) => {
                let mut acc = vec![0u64; bits.first().map_or(0, Vec::len)];
                for &i in support {
                    xor_into(&mut acc, &bits[i]);
                }
                popcount(&acc)
            }
            None => {
                let mut acc = vec![FieldElement::ZERO; self.n_out];
                for (&i, &c) in support.iter().zip(coeffs) {
                    self.field.axpy(&mut acc, c, &self.rows[i]);
                }
                acc.iter().filter(|v| !v.is_zero()).count()
            }
        }
    }

    fn dense(&self, support: &[usize], coeffs: &[FieldElement]) -> Vec<u32> {
        let mut x = vec![0u32; self.m];
        for (&i, &c) in support.iter().zip(coeffs) {
            x[i] = c.0;
        }
        x
    }
}

fn pack(row: &[FieldElement]) -> Vec<u64> {
    let mut w = vec![0u64; row.len().div_ceil(64)];
    for (j, v) in row.iter().enumerate() {
        if !v.is_zero() {
            w[j / 64] |= 1 << (j % 64);
        }
    }
    w
}

fn xor_into(acc: &mut [u64], row: &[u64]) {
    for (a, r) in acc.iter_mut().zip(row) {
        *a ^= r;
    }
}

fn popcount(v: &[u64]) -> usize {
    v.iter().map(|w| w.count_ones() as usize).sum()
}

fn check_shape(c: &LinearCircuit, spec: &RangeDetectorSpec) -> Result<(), GadgetError> {
    spec.validate()?;
    if c.n_inputs() != spec.m_in || c.n_outputs() != spec.n_out {
        return Err(GadgetError::ArityMismatch {
            expected: (spec.m_in, spec.n_out),
            got: (c.n_inputs(), c.n_outputs()),
        });
    }
    Ok(())
}

/// Exhaustive check that every input with weight in `[ell, k]` has output
/// weight in `[r, s]`. The witness is the first violation in enumeration
/// order (by smallest support index, then depth-first).
pub fn verify_range_detector(
    c: &LinearCircuit,
    spec: &RangeDetectorSpec,
) -> Result<RangeVerdict, GadgetError> {
    verify_range_detector_capped(c, spec, Limits::global().range)
}

/// [`verify_range_detector`] with an explicit input-count cap.
pub fn verify_range_detector_capped(
    c: &LinearCircuit,
    spec: &RangeDetectorSpec,
    cap: u64,
) -> Result<RangeVerdict, GadgetError> {
    check_shape(c, spec)?;
    let q = c.field().order();
    let total = inputs_in_range(spec.m_in, spec.ell, spec.k, q);
    let total = match total.to_u64() {
        Some(t) if t <= cap => t,
        _ => {
            return Err(GadgetError::TooLarge {
                inputs: total.to_u64().unwrap_or(u64::MAX),
                cap,
            })
        }
    };
    let view = MapView::new(c)?;
    let witness = if spec.ell > spec.k.min(spec.m_in) {
        None
    } else {
        (0..spec.m_in)
            .into_par_iter()
            .map(|first| scan_from(&view, spec, first))
            .collect::<Vec<_>>()
            .into_iter()
            .flatten()
            .next()
    };
    Ok(RangeVerdict {
        passed: witness.is_none(),
        mode: CheckMode::Exhaustive,
        witness,
        inputs_checked: total,
    })
}

/// Exhaustive when under the cap, otherwise sampled with a kernel search.
pub fn check_range_detector(
    c: &LinearCircuit,
    spec: &RangeDetectorSpec,
    stream: &Stream,
) -> Result<RangeVerdict, GadgetError> {
    match verify_range_detector(c, spec) {
        Err(GadgetError::TooLarge { .. }) => sampled_check(c, spec, stream),
        other => other,
    }
}

/// Depth-first enumeration of inputs whose smallest support index is
/// `first`, carrying partial sums down the tree.
fn scan_from(view: &MapView, spec: &RangeDetectorSpec, first: usize) -> Option<Vec<u32>> {
    let f = &view.field;
    let m = view.m;
    let k = spec.k.min(m);
    let ok = |w: usize| w >= spec.r && w <= spec.s;
    let nonzero: Vec<FieldElement> = f.nonzero_elements().collect();
    if m - first < spec.ell {
        return None;
    }

    if let Some(bits) = &view.binary {
        let one = FieldElement::ONE;
        let mut support = vec![first];
        let mut sums = vec![bits[first].clone()];
        if support.len() >= spec.ell && !ok(popcount(&sums[0])) {
            return Some(view.dense(&support, &[one]));
        }
        let mut next = first + 1;
        loop {
            if support.len() < k && next < m && support.len() + (m - next) >= spec.ell {
                let mut acc = sums.last().expect("nonempty").clone();
                xor_into(&mut acc, &bits[next]);
                support.push(next);
                if support.len() >= spec.ell && !ok(popcount(&acc)) {
                    return Some(view.dense(&support, &vec![one; support.len()]));
                }
                sums.push(acc);
                next += 1;
                continue;
            }
            if support.len() == 1 {
                return None;
            }
            let last = support.pop().expect("nonempty");
            sums.pop();
            next = last + 1;
        }
    }

    // General fields: each support position also ranges over q − 1 coefficients.
    let mut walk = GeneralWalk {
        view,
        spec,
        nonzero: &nonzero,
        sparse: view
            .rows
            .iter()
            .map(|r| {
                r.iter()
                    .enumerate()
                    .filter(|(_, v)| !v.is_zero())
                    .map(|(j, &v)| (j, v))
                    .collect()
            })
            .collect(),
        acc: vec![FieldElement::ZERO; view.n_out],
        weight: 0,
        support: Vec::with_capacity(k),
        coeffs: Vec::with_capacity(k),
    };
    walk.scan(first, true)
}

/// Depth-first walk over general fields. The running output and its weight
/// are updated in place along the sparse support of each generator row.
struct GeneralWalk<'a> {
    view: &'a MapView,
    spec: &'a RangeDetectorSpec,
    nonzero: &'a [FieldElement],
    sparse: Vec<Vec<(usize, FieldElement)>>,
    acc: Vec<FieldElement>,
    weight: usize,
    support: Vec<usize>,
    coeffs: Vec<FieldElement>,
}

impl GeneralWalk<'_> {
    fn add_row(&mut self, i: usize, c: FieldElement) {
        let f = &self.view.field;
        for &(j, g) in &self.sparse[i] {
            let old = self.acc[j];
            let new = f.add(old, f.mul(c, g));
            self.acc[j] = new;
            match (old.is_zero(), new.is_zero()) {
                (true, false) => self.weight += 1,
                (false, true) => self.weight -= 1,
                _ => {}
            }
        }
    }

    fn scan(&mut self, start: usize, only_start: bool) -> Option<Vec<u32>> {
        let m = self.view.m;
        let end = if only_start { start + 1 } else { m };
        let k = self.spec.k.min(m);
        let f = self.view.field.clone();
        for i in start..end {
            // Too few indices left to reach weight ell.
            if self.support.len() + (m - i) < self.spec.ell {
                break;
            }
            for ci in 0..self.nonzero.len() {
                let c = self.nonzero[ci];
                self.add_row(i, c);
                self.support.push(i);
                self.coeffs.push(c);
                let w = self.weight;
                if self.support.len() >= self.spec.ell && (w < self.spec.r || w > self.spec.s) {
                    return Some(self.view.dense(&self.support, &self.coeffs));
                }
                if self.support.len() < k {
                    if let Some(x) = self.scan(i + 1, false) {
                        return Some(x);
                    }
                }
                self.support.pop();
                self.coeffs.pop();
                self.add_row(i, f.neg(c));
            }
        }
        None
    }
}

fn sampled_check(
    c: &LinearCircuit,
    spec: &RangeDetectorSpec,
    stream: &Stream,
) -> Result<RangeVerdict, GadgetError> {
    let view = MapView::new(c)?;
    let f = c.field().clone();
    let samples = Limits::global().samples;
    let k = spec.k.min(spec.m_in);
    let ok = |w: usize| w >= spec.r && w <= spec.s;
    let mut witness = if spec.ell > k {
        None
    } else {
        (0..samples).into_par_iter().find_map_first(|t| {
            let mut s = stream.substream(t);
            let w = spec.ell + s.below_usize(k - spec.ell + 1);
            let support = s.distinct(spec.m_in, w);
            let coeffs: Vec<FieldElement> =
                support.iter().map(|_| f.uniform_nonzero(&mut s)).collect();
            (!ok(view.weight_of(&support, &coeffs))).then(|| view.dense(&support, &coeffs))
        })
    };
    if witness.is_none() && spec.r >= 1 {
        witness = kernel_search(&view, spec);
    }
    Ok(RangeVerdict {
        passed: witness.is_none(),
        mode: CheckMode::Sampled,
        witness,
        inputs_checked: samples,
    })
}

/// Looks for `x` with `x·G = 0` and `wt(x) ∈ [ell, k]` by colliding the
/// images of all inputs of weight `≤ h`, for the largest `h` whose table
/// fits the budget.
fn kernel_search(view: &MapView, spec: &RangeDetectorSpec) -> Option<Vec<u32>> {
    let f = &view.field;
    let m = view.m;
    let q = f.order();
    let mut h = 0;
    while h < 4 && h < m {
        let size = inputs_in_range(m, 0, h + 1, q);
        if size.to_u64().is_none_or(|s| s > MITM_BUDGET) {
            break;
        }
        h += 1;
    }
    if h == 0 || 2 * h < spec.ell {
        return None;
    }
    let nonzero: Vec<FieldElement> = f.nonzero_elements().collect();
    // Every sparse vector of weight ≤ h, as (support, coefficients).
    let mut combos: Vec<(Vec<usize>, Vec<FieldElement>)> = vec![(vec![], vec![])];
    let mut frontier = combos.clone();
    for _ in 0..h {
        let mut next = Vec::new();
        for (sup, co) in &frontier {
            let start = sup.last().map_or(0, |&l| l + 1);
            for i in start..m {
                for &c in &nonzero {
                    let mut s2 = sup.clone();
                    s2.push(i);
                    let mut c2 = co.clone();
                    c2.push(c);
                    next.push((s2, c2));
                }
            }
        }
        combos.extend(next.iter().cloned());
        frontier = next;
    }
    let mut keyed: Vec<(u64, usize)> = combos
        .par_iter()
        .enumerate()
        .map(|(idx, (sup, co))| (image_hash(view, sup, co), idx))
        .collect();
    keyed.sort_unstable();
    let k = spec.k.min(m);
    for group in keyed.chunk_by(|a, b| a.0 == b.0) {
        for (gi, &(_, a)) in group.iter().enumerate() {
            for &(_, b) in &group[gi + 1..] {
                // x = A − B
                let (sa, ca) = &combos[a];
                let (sb, cb) = &combos[b];
                let mut x = vec![FieldElement::ZERO; m];
                for (&i, &c) in sa.iter().zip(ca) {
                    x[i] = f.add(x[i], c);
                }
                for (&i, &c) in sb.iter().zip(cb) {
                    x[i] = f.sub(x[i], c);
                }
                let support: Vec<usize> = (0..m).filter(|&i| !x[i].is_zero()).collect();
                if support.len() < spec.ell || support.len() > k {
                    continue;
                }
                let coeffs: Vec<FieldElement> = support.iter().map(|&i| x[i]).collect();
                let w = view.weight_of(&support, &coeffs);
                if w < spec.r || w > spec.s {
                    return Some(view.dense(&support, &coeffs));
                }
            }
        }
    }
    None
}

fn image_hash(view: &MapView, support: &[usize], coeffs: &[FieldElement]) -> u64 {
    let mut h = DefaultHasher::new();
    match &view.binary {
        Some(bits) => {
            let mut acc = vec![0u64; bits.first().map_or(0, Vec::len)];
            for &i in support {
                xor_into(&mut acc, &bits[i]);
            }
            acc.hash(&mut h);
        }
        None => {
            let mut acc = vec![FieldElement::ZERO; view.n_out];
            for (&i, &c) in support.iter().zip(coeffs) {
                view.field.axpy(&mut acc, c, &view.rows[i]);
            }
            acc.hash(&mut h);
        }
    }
    h.finish()
}
