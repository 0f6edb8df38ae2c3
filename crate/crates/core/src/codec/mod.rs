//! Capacity-approaching codes: a good mother code followed by a layer
//! that sums mother-code symbols along the edges of a disperser with
//! random coefficients, decoded by typical-set search.

mod decode;
mod sim;

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::channel::{ChannelFile, ChannelSpec};
use crate::circuit::{
    collapse_final_layer, serial_compose, CircuitError, CircuitFile, Gate, LinearCircuit, Source,
};
use crate::disperser::{find_disperser, BipartiteGraph, DisperserError};
use crate::gadgets::{build_good_code, GadgetConfig, GadgetError, Verification};
use crate::galois::{make_field, FieldElement, FieldError, FieldSpec};
use crate::linalg::Matrix;
use crate::rng::Stream;
use crate::scalar::Real;
use crate::typical::TypicalError;

pub use decode::{decode_typical, decode_typical_search, DecodeResult, Outcome};
pub use sim::{
    default_eps, failure_prob_exact, failure_prob_mc, predicted_exponent,
    restriction_uniformity_check, McReport, MessageEstimate, UniformityVerdict,
};

#[derive(Debug, Error)]
pub enum CodecError {
    #[error("rate {rate} is not below capacity {capacity}")]
    RateAboveCapacity { rate: f64, capacity: f64 },
    #[error("invalid shape: {0}")]
    BadShape(String),
    #[error("{what} is too large ({size} > {cap})")]
    TooLarge {
        what: &'static str,
        size: u64,
        cap: u64,
    },
    #[error("input vector has empty support")]
    EmptySupport,
    #[error(transparent)]
    Gadget(#[from] GadgetError),
    #[error(transparent)]
    Disperser(#[from] DisperserError),
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Typical(#[from] TypicalError),
    #[error("bad code file: {0}")]
    Format(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CodecConfig {
    pub gadgets: GadgetConfig,
    /// Depth budget handed to the mother-code builder.
    pub depth_budget: usize,
    /// First left degree tried for the disperser layer; doubled on failure.
    pub disperser_degree: usize,
    pub disperser_tries_per_degree: u64,
    /// Build even when the rate is not below capacity (for experiments).
    pub allow_above_capacity: bool,
}

impl Default for CodecConfig {
    fn default() -> Self {
        CodecConfig {
            gadgets: GadgetConfig::default(),
            depth_budget: 4,
            disperser_degree: 2,
            disperser_tries_per_degree: 20,
            allow_above_capacity: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MotherMeta {
    pub kind: String,
    pub verified: Verification,
    pub tries: u64,
    pub wires: usize,
    pub depth: usize,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DisperserMeta {
    pub n_left: usize,
    pub n_right: usize,
    pub degree: usize,
    pub gamma_left: f64,
    pub eps: f64,
    pub tries: u64,
    /// Exhaustively verified, as opposed to sampled.
    pub verified: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CodeMeta {
    pub seed: u64,
    pub channel_digest: String,
    pub rate_target: f64,
    /// `(k/n)·log₂ q`.
    pub rate_bits: f64,
    pub gamma: f64,
    pub wires: usize,
    pub depth: usize,
    pub mother: Option<MotherMeta>,
    pub disperser: Option<DisperserMeta>,
    pub above_capacity: bool,
}

/// Code file: encoder circuit plus metadata.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CodeFile {
    pub circuit: CircuitFile,
    pub meta: CodeMeta,
}

#[derive(Debug)]
pub struct CodeInstance {
    field: FieldSpec,
    k: usize,
    n: usize,
    encoder: LinearCircuit,
    gen: Matrix,
    pub meta: CodeMeta,
    parity: OnceLock<decode::ParityData>,
}

impl CodeInstance {
    pub fn from_encoder(
        encoder: LinearCircuit,
        meta: CodeMeta,
    ) -> Result<CodeInstance, CodecError> {
        let gen = encoder.to_generator_matrix()?;
        Ok(CodeInstance {
            field: encoder.field().clone(),
            k: encoder.n_inputs(),
            n: encoder.n_outputs(),
            encoder,
            gen,
            meta,
            parity: OnceLock::new(),
        })
    }

    /// Instance with blank metadata, for hand-made encoders.
    pub fn bare(encoder: LinearCircuit) -> Result<CodeInstance, CodecError> {
        let q = encoder.field().order() as f64;
        let meta = CodeMeta {
            seed: 0,
            channel_digest: String::new(),
            rate_target: 0.0,
            rate_bits: encoder.n_inputs() as f64 / encoder.n_outputs() as f64 * q.log2(),
            gamma: 0.0,
            wires: encoder.wire_count(),
            depth: encoder.depth(),
            mother: None,
            disperser: None,
            above_capacity: false,
        };
        CodeInstance::from_encoder(encoder, meta)
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn encoder(&self) -> &LinearCircuit {
        &self.encoder
    }

    pub fn generator(&self) -> &Matrix {
        &self.gen
    }

    pub fn encode(&self, m: &[FieldElement]) -> Result<Vec<FieldElement>, CodecError> {
        Ok(self.encoder.evaluate(m)?)
    }

    pub fn to_file(&self) -> CodeFile {
        CodeFile {
            circuit: self.encoder.to_file(),
            meta: self.meta.clone(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("code file serializes")
    }

    pub fn from_json(s: &str) -> Result<CodeInstance, CodecError> {
        let file: CodeFile =
            serde_json::from_str(s).map_err(|e| CodecError::Format(e.to_string()))?;
        let encoder = LinearCircuit::from_file(&file.circuit)?;
        CodeInstance::from_encoder(encoder, file.meta)
    }
}

/// `⌊r·n / log₂ q⌋`.
pub fn message_length(rate: f64, n: usize, q: u32) -> usize {
    (rate * n as f64 / (q as f64).log2() + 1e-9)
        .floor()
        .max(0.0) as usize
}

/// Builds the code `x ↦ D_{H,α}(C(x))`: `C` a good code `F_q^k → F_q^{Rk}`,
/// `H` a disperser from its `Rk` symbols onto the `n` output positions, and
/// `α` a uniform coefficient per edge. The disperser layer is collapsed
/// into the mother code's output layer.
pub fn build_capacity_code<T: Real>(
    channel: &ChannelSpec<T>,
    rate: f64,
    n: usize,
    gamma: f64,
    seed: u64,
    config: &CodecConfig,
) -> Result<CodeInstance, CodecError> {
    let q = channel.q() as u32;
    let capacity = channel.capacity_bits().as_f64();
    let above = rate >= capacity;
    if above && !config.allow_above_capacity {
        return Err(CodecError::RateAboveCapacity { rate, capacity });
    }
    if !(0.0..1.0).contains(&gamma) {
        return Err(CodecError::BadShape(format!(
            "gamma {gamma} outside [0, 1)"
        )));
    }
    let field = make_field(q as u64)?;
    let k = message_length(rate, n, q);
    if k == 0 {
        return Err(CodecError::BadShape(format!(
            "rate {rate} gives no message symbols at n = {n}"
        )));
    }
    let stream = Stream::new(seed);
    let g = &config.gadgets;
    let mother = build_good_code(&field, k, config.depth_budget, g, &stream.substream(0))?;

    let n_left = mother.circuit.n_outputs();
    let gamma_left = 1.0 / g.weight_divisor as f64;
    let (graph, degree, tries, exhaustive) =
        find_layer_graph(n_left, n, gamma_left, gamma, config, &stream.substream(1))?;

    let mut s = stream.substream(2);
    let mut wires: Vec<Vec<(Source, FieldElement)>> = vec![Vec::new(); n];
    for (i, j) in graph.edges() {
        wires[j].push((Source::input(i), field.uniform(&mut s)));
    }
    let layer = wires.into_iter().map(|w| Gate::new(&field, w)).collect();
    let layer = LinearCircuit::new(field.clone(), n_left, vec![layer])?;
    let encoder = collapse_final_layer(&serial_compose(&mother.circuit, &layer)?)?;

    let meta = CodeMeta {
        seed,
        channel_digest: ChannelFile::from_spec(channel).digest(),
        rate_target: rate,
        rate_bits: k as f64 / n as f64 * (q as f64).log2(),
        gamma,
        wires: encoder.wire_count(),
        depth: encoder.depth(),
        mother: Some(MotherMeta {
            kind: mother.kind.clone(),
            verified: mother.verified,
            tries: mother.tries,
            wires: mother.wire_count,
            depth: mother.depth,
            notes: mother.notes.clone(),
        }),
        disperser: Some(DisperserMeta {
            n_left,
            n_right: n,
            degree,
            gamma_left,
            eps: gamma,
            tries,
            verified: exhaustive,
        }),
        above_capacity: above,
    };
    CodeInstance::from_encoder(encoder, meta)
}

/// Disperser search with the left degree doubling after each batch of
/// failed tries.
fn find_layer_graph(
    n_left: usize,
    n_right: usize,
    gamma_left: f64,
    eps: f64,
    config: &CodecConfig,
    stream: &Stream,
) -> Result<(BipartiteGraph, usize, u64, bool), CodecError> {
    let mut d = config.disperser_degree.clamp(1, n_right);
    let mut total = 0;
    for round in 0.. {
        match find_disperser(
            n_left,
            n_right,
            d,
            gamma_left,
            eps,
            &stream.substream(round),
            config.disperser_tries_per_degree,
        ) {
            Ok(found) => return Ok((found.graph, d, total + found.tries, found.verified)),
            Err(DisperserError::Exhausted(t)) => total += t,
            Err(e) => return Err(e.into()),
        }
        if d == n_right {
            break;
        }
        d = (2 * d).min(n_right);
    }
    Err(DisperserError::Exhausted(total).into())
}
