//! Range detectors and partial good codes, plus the randomized builders
//! that assemble them into good codes of bounded depth.
//!
//! A range detector with parameters `(m, n, ℓ, k, r, s)` maps every input
//! of weight in `[ℓ, k]` to an output of weight in `[r, s]`. A partial good
//! code on `n` inputs for the range `[r, s]` is the special case with
//! `R·n` outputs and output weight at least `R·n / 8` (so `4n` for the
//! default expansion `R = 32`).

mod builders;
mod good_code;
mod verify;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circuit::{CircuitError, LinearCircuit, Source};
use crate::disperser::{binomial, CheckMode, DisperserError};
use crate::galois::{FieldElement, FieldError, FieldSpec};
use crate::rng::Stream;

pub use builders::{
    build_condenser, build_condenser_range, build_depth2_pgc, build_output_amplifier,
    build_rate_amplifier, compose_pgcs, compose_pgcs_into_parts, depth2_plan, reduce_pgc, BandPlan,
};
pub use good_code::{band_schedule, build_good_code, Schedule};
pub use verify::{
    check_range_detector, inputs_in_range, verify_range_detector, verify_range_detector_capped,
    RangeVerdict,
};

#[derive(Debug, Error)]
pub enum GadgetError {
    #[error("invalid shape: {0}")]
    BadShape(String),
    #[error("circuit has arity {got:?}, expected {expected:?}")]
    ArityMismatch {
        expected: (usize, usize),
        got: (usize, usize),
    },
    #[error("{inputs} inputs to check exceeds the cap of {cap}")]
    TooLarge { inputs: u64, cap: u64 },
    #[error("{stage}: no candidate passed verification in {tries} tries")]
    Exhausted {
        stage: String,
        tries: u64,
        witness: Option<Vec<u32>>,
    },
    #[error("input circuit violates its claimed range")]
    PreconditionFailed { witness: Option<Vec<u32>> },
    #[error("weight ranges do not abut")]
    RangesDontAbut,
    #[error("depth budget {0} is below 2")]
    DepthBudgetTooSmall(usize),
    #[error("{stage}: {source}")]
    Stage {
        stage: String,
        #[source]
        source: Box<GadgetError>,
    },
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error(transparent)]
    Disperser(#[from] DisperserError),
    #[error(transparent)]
    Field(#[from] FieldError),
}

impl GadgetError {
    pub(crate) fn in_stage(self, stage: &str) -> GadgetError {
        GadgetError::Stage {
            stage: stage.to_string(),
            source: Box::new(self),
        }
    }

    /// The offending input, if the error carries one.
    pub fn witness(&self) -> Option<&[u32]> {
        match self {
            GadgetError::Exhausted { witness, .. }
            | GadgetError::PreconditionFailed { witness } => witness.as_deref(),
            GadgetError::Stage { source, .. } => source.witness(),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RangeDetectorSpec {
    pub m_in: usize,
    pub n_out: usize,
    pub ell: usize,
    pub k: usize,
    pub r: usize,
    pub s: usize,
}

impl RangeDetectorSpec {
    pub fn validate(&self) -> Result<(), GadgetError> {
        if self.ell > self.k || self.r > self.s || self.k > self.m_in || self.s > self.n_out {
            return Err(GadgetError::BadShape(format!("{self:?}")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PgcSpec {
    pub n: usize,
    pub r: usize,
    pub s: usize,
    pub expansion: usize,
    pub out_weight_min: usize,
}

impl PgcSpec {
    pub fn new(n: usize, r: usize, s: usize, config: &GadgetConfig) -> PgcSpec {
        PgcSpec {
            n,
            r,
            s,
            expansion: config.expansion,
            out_weight_min: (config.expansion * n).div_ceil(config.weight_divisor),
        }
    }

    pub fn n_out(&self) -> usize {
        self.expansion * self.n
    }

    pub fn detector(&self) -> RangeDetectorSpec {
        RangeDetectorSpec {
            m_in: self.n,
            n_out: self.n_out(),
            ell: self.r,
            k: self.s,
            r: self.out_weight_min,
            s: self.n_out(),
        }
    }
}

/// Tunable constants of the builders.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GadgetConfig {
    /// Output length over input length of a partial good code.
    pub expansion: usize,
    /// Output weight target is `expansion · n / weight_divisor`.
    pub weight_divisor: usize,
    pub max_tries: u64,
    /// Smallest condensing ratio accepted by the condenser.
    pub c0: usize,
    pub condenser_fan_out: usize,
    pub out_amp_fan_in: usize,
    /// Left degree of the disperser wiring in amplifier layers.
    pub amp_degree: usize,
    /// Left degree of the amplifier layer inside a composition.
    pub combine_degree: usize,
    /// Coverage slack of the rate amplifier's disperser check.
    pub amp_eps: f64,
    /// Middle-layer width factor of the depth-2 construction.
    pub c_mid: f64,
    /// Middle-layer fan-in factor of the depth-2 construction.
    pub c_fan: f64,
    /// Good codes on at most this many inputs are sampled directly.
    pub n_small: usize,
    /// Condensing ratio of the low band in recursive good codes.
    pub reduce_ratio: usize,
    /// Largest input weight routed through the low band.
    pub reduce_band_max: usize,
}

impl Default for GadgetConfig {
    fn default() -> Self {
        GadgetConfig {
            expansion: 32,
            weight_divisor: 8,
            max_tries: 200,
            c0: 16,
            condenser_fan_out: 6,
            out_amp_fan_in: 12,
            amp_degree: 4,
            combine_degree: 24,
            amp_eps: 0.5,
            c_mid: 4.0,
            c_fan: 2.0,
            n_small: 10,
            reduce_ratio: 16,
            reduce_band_max: 3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verification {
    Exhaustive,
    Sampled,
    Failed,
}

impl From<&RangeVerdict> for Verification {
    fn from(v: &RangeVerdict) -> Self {
        match (v.passed, v.mode) {
            (false, _) => Verification::Failed,
            (true, CheckMode::Exhaustive) => Verification::Exhaustive,
            (true, CheckMode::Sampled) => Verification::Sampled,
        }
    }
}

/// One stage of a composite build.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartSummary {
    pub label: String,
    pub spec: RangeDetectorSpec,
    pub verified: Verification,
    pub tries: u64,
    pub wire_count: usize,
    pub depth: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct BuildReport {
    #[serde(skip)]
    pub circuit: LinearCircuit,
    pub kind: String,
    pub spec: RangeDetectorSpec,
    pub verified: Verification,
    pub tries: u64,
    pub wire_count: usize,
    pub depth: usize,
    pub seed: u64,
    pub parts: Vec<PartSummary>,
    pub notes: Vec<String>,
}

impl BuildReport {
    pub(crate) fn new(
        kind: &str,
        circuit: LinearCircuit,
        spec: RangeDetectorSpec,
        verdict: &RangeVerdict,
        tries: u64,
        seed: u64,
    ) -> BuildReport {
        BuildReport {
            wire_count: circuit.wire_count(),
            depth: circuit.depth(),
            circuit,
            kind: kind.to_string(),
            spec,
            verified: verdict.into(),
            tries,
            seed,
            parts: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn summary(&self, label: &str) -> PartSummary {
        PartSummary {
            label: label.to_string(),
            spec: self.spec,
            verified: self.verified,
            tries: self.tries,
            wire_count: self.wire_count,
            depth: self.depth,
        }
    }

    /// Report plus circuit as one JSON document.
    pub fn to_json(&self) -> serde_json::Value {
        let mut v = serde_json::to_value(self).expect("report serializes");
        v["circuit"] = serde_json::to_value(self.circuit.to_file()).expect("circuit serializes");
        v
    }
}

pub(crate) enum Attempt {
    Accept(LinearCircuit, RangeVerdict),
    Reject(Option<Vec<u32>>),
}

/// Runs `attempt` on substreams `0, 1, …` until one is accepted.
pub(crate) fn las_vegas(
    stage: &str,
    stream: &Stream,
    max_tries: u64,
    mut attempt: impl FnMut(&mut Stream) -> Result<Attempt, GadgetError>,
) -> Result<(LinearCircuit, RangeVerdict, u64), GadgetError> {
    let mut last = None;
    for t in 0..max_tries {
        let mut s = stream.substream(t);
        match attempt(&mut s)? {
            Attempt::Accept(c, v) => return Ok((c, v, t + 1)),
            Attempt::Reject(w) => last = w.or(last),
        }
    }
    Err(GadgetError::Exhausted {
        stage: stage.to_string(),
        tries: max_tries,
        witness: last,
    })
}

/// Accept a candidate iff its check passes.
pub(crate) fn judge(
    c: LinearCircuit,
    spec: &RangeDetectorSpec,
    stream: &Stream,
) -> Result<Attempt, GadgetError> {
    let v = check_range_detector(&c, spec, stream)?;
    Ok(if v.passed {
        Attempt::Accept(c, v)
    } else {
        Attempt::Reject(v.witness)
    })
}

/// `x ↦ (x, x, …, x)`: every input copied `copies` times, output
/// `i·copies + t` reading input `i`.
pub fn repetition_pgc(field: &FieldSpec, n: usize, copies: usize) -> LinearCircuit {
    let gates = (0..n * copies)
        .map(|j| crate::circuit::Gate::new(field, [(Source::input(j / copies), FieldElement::ONE)]))
        .collect();
    LinearCircuit::new(field.clone(), n, vec![gates]).expect("repetition layer is well formed")
}

/// Number of words of length `n` over an alphabet of size `q` within
/// Hamming distance `w` of a fixed word.
pub fn ball_volume(n: usize, w: usize, q: u32) -> BigUint {
    (0..=w.min(n))
        .map(|i| binomial(n, i) * BigUint::from(q - 1).pow(i as u32))
        .sum()
}

/// `q^{H_q(γ)·n}`, which bounds the ball of radius `γn` for `γ ≤ 1 − 1/q`.
pub fn entropy_volume_bound(n: usize, gamma: f64, q: u32) -> Result<f64, GadgetError> {
    let qf = q as f64;
    if q < 2 || !(0.0..=1.0 - 1.0 / qf).contains(&gamma) {
        return Err(GadgetError::BadShape(format!(
            "gamma {gamma} outside [0, 1 - 1/q]"
        )));
    }
    Ok(qf.powf(entropy_q(gamma, q) * n as f64))
}

/// `H_q(γ) = γ log_q(q − 1) − γ log_q γ − (1 − γ) log_q(1 − γ)`.
pub fn entropy_q(gamma: f64, q: u32) -> f64 {
    let lq = (q as f64).ln();
    let xlx = |x: f64| if x <= 0.0 { 0.0 } else { x * x.ln() };
    (gamma * ((q - 1) as f64).ln() - xlx(gamma) - xlx(1.0 - gamma)) / lq
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::galois::make_field;

    #[test]
    fn repetition_is_a_pgc_for_every_weight() {
        let f = make_field(2).unwrap();
        let cfg = GadgetConfig::default();
        let c = repetition_pgc(&f, 8, 32);
        let spec = PgcSpec::new(8, 1, 8, &cfg);
        assert_eq!(spec.out_weight_min, 32);
        let v = verify_range_detector(&c, &spec.detector()).unwrap();
        assert!(v.passed);
        assert_eq!(v.inputs_checked, 255);
    }

    #[test]
    fn ball_volume_matches_entropy_bound() {
        assert_eq!(ball_volume(10, 2, 2), BigUint::from(56u32));
        assert_eq!(ball_volume(4, 4, 3), BigUint::from(81u32));
        for n in [8, 16, 32] {
            let b = entropy_volume_bound(n, 0.25, 2).unwrap();
            let v: f64 = ball_volume(n, n / 4, 2).to_string().parse().unwrap();
            assert!(v <= b);
        }
        assert!(entropy_volume_bound(8, 0.6, 2).is_err());
    }
}
