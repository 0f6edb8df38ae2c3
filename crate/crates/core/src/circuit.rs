//! Layered circuits of unbounded-fan-in weighted addition gates.
//!
//! Layers are numbered from 0. A wire reads either a circuit input or a gate
//! in a strictly earlier layer; the outputs are the gates of the last layer.
//! Size is the total number of wires and depth is the number of layers.
//! Every circuit is kept in live-layer form (each layer has a gate reading
//! the layer just before it), so the layer count equals the longest path.
//!
//! A gate may end up with no wires when random coefficients cancel during
//! merging; such a gate computes the constant zero.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::galois::{FieldDescriptor, FieldElement, FieldError, FieldSpec};
use crate::limits::Limits;
use crate::linalg::Matrix;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CircuitError {
    #[error("expected {expected} inputs, got {got}")]
    InputLengthMismatch { expected: usize, got: usize },
    #[error("vectors have lengths {0} and {1}")]
    LengthMismatch(usize, usize),
    #[error("circuit has {outputs} outputs but the next stage expects {inputs} inputs")]
    ArityMismatch { outputs: usize, inputs: usize },
    #[error("circuits are over different fields")]
    FieldMismatch,
    #[error("{0} inputs exceed the generator-matrix cap {1}")]
    TooManyInputs(usize, u64),
    #[error("collapsing needs depth at least 2, got {0}")]
    DepthTooSmall(usize),
    #[error("layer {0} is empty")]
    EmptyLayer(usize),
    #[error("no gate in layer {0} reads layer {prev}", prev = .0 - 1)]
    DeadLayer(usize),
    #[error("gate ({layer}, {gate}) has an invalid wire: {reason}")]
    BadWire {
        layer: usize,
        gate: usize,
        reason: String,
    },
    #[error("circuit has no layers")]
    NoLayers,
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("malformed circuit file: {0}")]
    Format(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Source {
    Input(u32),
    Gate { layer: u32, gate: u32 },
}

impl Source {
    pub fn gate(layer: usize, gate: usize) -> Source {
        Source::Gate {
            layer: layer as u32,
            gate: gate as u32,
        }
    }

    pub fn input(i: usize) -> Source {
        Source::Input(i as u32)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Wire {
    pub source: Source,
    pub coeff: FieldElement,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Gate {
    wires: Vec<Wire>,
}

impl Gate {
    /// Gate with duplicate sources merged and zero coefficients dropped.
    pub fn new(field: &FieldSpec, wires: impl IntoIterator<Item = (Source, FieldElement)>) -> Gate {
        let mut merged: BTreeMap<Source, FieldElement> = BTreeMap::new();
        for (source, coeff) in wires {
            let slot = merged.entry(source).or_insert(FieldElement::ZERO);
            *slot = field.add(*slot, coeff);
        }
        Gate {
            wires: merged
                .into_iter()
                .filter(|(_, c)| !c.is_zero())
                .map(|(source, coeff)| Wire { source, coeff })
                .collect(),
        }
    }

    pub fn wires(&self) -> &[Wire] {
        &self.wires
    }

    pub fn fan_in(&self) -> usize {
        self.wires.len()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearCircuit {
    field: FieldSpec,
    n_inputs: usize,
    layers: Vec<Vec<Gate>>,
}

impl LinearCircuit {
    pub fn new(
        field: FieldSpec,
        n_inputs: usize,
        layers: Vec<Vec<Gate>>,
    ) -> Result<Self, CircuitError> {
        let c = LinearCircuit {
            field,
            n_inputs,
            layers,
        };
        c.validate()?;
        Ok(c)
    }

    fn validate(&self) -> Result<(), CircuitError> {
        if self.layers.is_empty() {
            return Err(CircuitError::NoLayers);
        }
        for (l, layer) in self.layers.iter().enumerate() {
            if layer.is_empty() {
                return Err(CircuitError::EmptyLayer(l));
            }
            let mut live = l == 0;
            for (g, gate) in layer.iter().enumerate() {
                let bad = |reason: String| CircuitError::BadWire {
                    layer: l,
                    gate: g,
                    reason,
                };
                let mut prev = None;
                for w in &gate.wires {
                    if w.coeff.is_zero() || !self.field.contains(w.coeff) {
                        return Err(bad(format!("coefficient {}", w.coeff)));
                    }
                    if prev.is_some_and(|p| p >= w.source) {
                        return Err(bad("sources not merged".into()));
                    }
                    prev = Some(w.source);
                    match w.source {
                        Source::Input(i) if i as usize >= self.n_inputs => {
                            return Err(bad(format!("input {i} out of range")))
                        }
                        Source::Input(_) => {}
                        Source::Gate { layer, gate } => {
                            let (sl, sg) = (layer as usize, gate as usize);
                            if sl >= l || sg >= self.layers[sl].len() {
                                return Err(bad(format!("source ({sl}, {sg})")));
                            }
                            live |= sl + 1 == l;
                        }
                    }
                }
            }
            if !live {
                return Err(CircuitError::DeadLayer(l));
            }
        }
        Ok(())
    }

    pub fn identity(field: &FieldSpec, n: usize) -> LinearCircuit {
        let gates = (0..n)
            .map(|i| Gate::new(field, [(Source::input(i), FieldElement::ONE)]))
            .collect();
        LinearCircuit::new(field.clone(), n, vec![gates]).expect("identity is valid")
    }

    /// Depth-1 circuit computing `x ↦ x·G`.
    pub fn from_generator(field: &FieldSpec, g: &Matrix) -> LinearCircuit {
        let gates = (0..g.cols())
            .map(|j| {
                Gate::new(
                    field,
                    (0..g.rows()).map(|i| (Source::input(i), g.get(i, j))),
                )
            })
            .collect();
        LinearCircuit::new(field.clone(), g.rows(), vec![gates]).expect("one layer reading inputs")
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    pub fn n_inputs(&self) -> usize {
        self.n_inputs
    }

    pub fn n_outputs(&self) -> usize {
        self.layers.last().map_or(0, Vec::len)
    }

    pub fn layers(&self) -> &[Vec<Gate>] {
        &self.layers
    }

    pub fn gate(&self, layer: usize, gate: usize) -> &Gate {
        &self.layers[layer][gate]
    }

    pub fn wire_count(&self) -> usize {
        self.layers.iter().flatten().map(Gate::fan_in).sum()
    }

    pub fn depth(&self) -> usize {
        self.layers.len()
    }

    pub fn max_fan_in(&self) -> usize {
        self.layers
            .iter()
            .flatten()
            .map(Gate::fan_in)
            .max()
            .unwrap_or(0)
    }

    pub fn output_fan_ins(&self) -> Vec<usize> {
        self.layers
            .last()
            .map_or(Vec::new(), |l| l.iter().map(Gate::fan_in).collect())
    }

    /// Length of the longest input-to-output path, computed from the wiring.
    pub fn longest_path(&self) -> usize {
        let levels = self.levels();
        levels
            .last()
            .map_or(0, |l| l.iter().copied().max().unwrap_or(0))
    }

    fn levels(&self) -> Vec<Vec<usize>> {
        let mut levels: Vec<Vec<usize>> = Vec::with_capacity(self.layers.len());
        for layer in &self.layers {
            let row = layer
                .iter()
                .map(|g| {
                    1 + g
                        .wires
                        .iter()
                        .map(|w| match w.source {
                            Source::Input(_) => 0,
                            Source::Gate { layer, gate } => levels[layer as usize][gate as usize],
                        })
                        .max()
                        .unwrap_or(0)
                })
                .collect();
            levels.push(row);
        }
        levels
    }

    pub fn evaluate(&self, x: &[FieldElement]) -> Result<Vec<FieldElement>, CircuitError> {
        if x.len() != self.n_inputs {
            return Err(CircuitError::InputLengthMismatch {
                expected: self.n_inputs,
                got: x.len(),
            });
        }
        let f = &self.field;
        let mut values: Vec<Vec<FieldElement>> = Vec::with_capacity(self.layers.len());
        for layer in &self.layers {
            let row = layer
                .iter()
                .map(|g| {
                    g.wires.iter().fold(FieldElement::ZERO, |acc, w| {
                        let v = match w.source {
                            Source::Input(i) => x[i as usize],
                            Source::Gate { layer, gate } => values[layer as usize][gate as usize],
                        };
                        f.add(acc, f.mul(w.coeff, v))
                    })
                })
                .collect();
            values.push(row);
        }
        Ok(values.pop().unwrap_or_default())
    }

    /// `k × n` matrix whose row `i` is the image of the `i`-th unit vector,
    /// so that `evaluate(x) = x·G`.
    pub fn to_generator_matrix(&self) -> Result<Matrix, CircuitError> {
        let cap = Limits::global().generator;
        if self.n_inputs as u64 > cap {
            return Err(CircuitError::TooManyInputs(self.n_inputs, cap));
        }
        let f = &self.field;
        let k = self.n_inputs;
        // Linear form of every gate as a dense vector over the inputs.
        let mut forms: Vec<Vec<Vec<FieldElement>>> = Vec::with_capacity(self.layers.len());
        for layer in &self.layers {
            let row = layer
                .iter()
                .map(|g| {
                    let mut acc = vec![FieldElement::ZERO; k];
                    for w in &g.wires {
                        match w.source {
                            Source::Input(i) => {
                                let i = i as usize;
                                acc[i] = f.add(acc[i], w.coeff);
                            }
                            Source::Gate { layer, gate } => {
                                f.axpy(&mut acc, w.coeff, &forms[layer as usize][gate as usize])
                            }
                        }
                    }
                    acc
                })
                .collect();
            forms.push(row);
        }
        let outputs = forms.pop().unwrap_or_default();
        let mut g = Matrix::zeros(k, outputs.len());
        for (j, form) in outputs.iter().enumerate() {
            for (i, &v) in form.iter().enumerate() {
                g.set(i, j, v);
            }
        }
        Ok(g)
    }

    /// Returns an equivalent circuit in live-layer form: dead gates (not on
    /// any path to an output) are dropped, every gate moves to the layer given
    /// by its longest path, and the outputs stay together in the last layer.
    pub fn normalize(&self) -> LinearCircuit {
        let levels = self.levels();
        let last = self.layers.len() - 1;
        let mut reachable: Vec<Vec<bool>> =
            self.layers.iter().map(|l| vec![false; l.len()]).collect();
        reachable[last].iter_mut().for_each(|r| *r = true);
        for l in (0..self.layers.len()).rev() {
            for (g, gate) in self.layers[l].iter().enumerate() {
                if !reachable[l][g] {
                    continue;
                }
                for w in &gate.wires {
                    if let Source::Gate { layer, gate } = w.source {
                        reachable[layer as usize][gate as usize] = true;
                    }
                }
            }
        }
        let depth = levels[last].iter().copied().max().unwrap_or(1).max(1);
        let mut new_layers: Vec<Vec<Gate>> = vec![Vec::new(); depth];
        let mut position: Vec<Vec<Option<Source>>> =
            self.layers.iter().map(|l| vec![None; l.len()]).collect();
        for l in 0..self.layers.len() {
            for (g, gate) in self.layers[l].iter().enumerate() {
                if !reachable[l][g] {
                    continue;
                }
                let target = if l == last {
                    depth - 1
                } else {
                    levels[l][g] - 1
                };
                let wires = gate.wires.iter().map(|w| {
                    let source = match w.source {
                        Source::Input(_) => w.source,
                        Source::Gate { layer, gate } => position[layer as usize][gate as usize]
                            .expect("sources precede readers"),
                    };
                    (source, w.coeff)
                });
                let new_gate = Gate::new(&self.field, wires);
                position[l][g] = Some(Source::gate(target, new_layers[target].len()));
                new_layers[target].push(new_gate);
            }
        }
        LinearCircuit::new(self.field.clone(), self.n_inputs, new_layers)
            .expect("relevelled circuit is in live-layer form")
    }

    pub fn to_file(&self) -> CircuitFile {
        CircuitFile {
            field: self.field.descriptor(),
            n_inputs: self.n_inputs,
            layers: self
                .layers
                .iter()
                .map(|layer| {
                    layer
                        .iter()
                        .map(|g| GateFile {
                            wires: g
                                .wires
                                .iter()
                                .map(|w| match w.source {
                                    Source::Input(i) => ("in".to_string(), i, 0, w.coeff.0),
                                    Source::Gate { layer, gate } => {
                                        ("gate".to_string(), layer, gate, w.coeff.0)
                                    }
                                })
                                .collect(),
                        })
                        .collect()
                })
                .collect(),
        }
    }

    pub fn from_file(file: &CircuitFile) -> Result<LinearCircuit, CircuitError> {
        let field = FieldSpec::from_descriptor(&file.field)?;
        let mut layers = Vec::with_capacity(file.layers.len());
        for layer in &file.layers {
            let mut gates = Vec::with_capacity(layer.len());
            for g in layer {
                let mut wires = Vec::with_capacity(g.wires.len());
                for (kind, a, b, coeff) in &g.wires {
                    let source = match kind.as_str() {
                        "in" => Source::Input(*a),
                        "gate" => Source::Gate {
                            layer: *a,
                            gate: *b,
                        },
                        other => {
                            return Err(CircuitError::Format(format!(
                                "unknown source kind `{other}`"
                            )))
                        }
                    };
                    let coeff = field.element(*coeff)?;
                    if coeff.is_zero() {
                        return Err(CircuitError::Format("zero-weight wire".into()));
                    }
                    wires.push((source, coeff));
                }
                let gate = Gate::new(&field, wires.iter().copied());
                if gate.fan_in() != wires.len() {
                    return Err(CircuitError::Format(
                        "duplicate source within a gate".into(),
                    ));
                }
                gates.push(gate);
            }
            layers.push(gates);
        }
        LinearCircuit::new(field, file.n_inputs, layers)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_file()).expect("circuit serializes")
    }

    pub fn from_json(s: &str) -> Result<LinearCircuit, CircuitError> {
        let file: CircuitFile =
            serde_json::from_str(s).map_err(|e| CircuitError::Format(e.to_string()))?;
        LinearCircuit::from_file(&file)
    }
}

/// On-disk circuit layout.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CircuitFile {
    pub field: FieldDescriptor,
    pub n_inputs: usize,
    pub layers: Vec<Vec<GateFile>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GateFile {
    pub wires: Vec<(String, u32, u32, u32)>,
}

/// Incremental construction of layered circuits.
#[derive(Debug, Clone)]
pub struct CircuitBuilder {
    field: FieldSpec,
    n_inputs: usize,
    layers: Vec<Vec<Gate>>,
}

impl CircuitBuilder {
    pub fn new(field: &FieldSpec, n_inputs: usize) -> Self {
        Self {
            field: field.clone(),
            n_inputs,
            layers: Vec::new(),
        }
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    pub fn depth(&self) -> usize {
        self.layers.len()
    }

    pub fn add_gate(
        &mut self,
        layer: usize,
        wires: impl IntoIterator<Item = (Source, FieldElement)>,
    ) -> Source {
        if self.layers.len() <= layer {
            self.layers.resize_with(layer + 1, Vec::new);
        }
        let gate = Gate::new(&self.field, wires);
        self.layers[layer].push(gate);
        Source::gate(layer, self.layers[layer].len() - 1)
    }

    /// Appends a new last layer; returns the sources of its gates.
    pub fn push_layer(&mut self, gates: Vec<Vec<(Source, FieldElement)>>) -> Vec<Source> {
        let layer = self.layers.len();
        gates.into_iter().map(|w| self.add_gate(layer, w)).collect()
    }

    /// Copies `c` so that its layer `l` lands in layer `base + l`, with its
    /// inputs rebound to `input_map`. Returns the sources of its outputs.
    pub fn embed(
        &mut self,
        c: &LinearCircuit,
        base: usize,
        input_map: &[Source],
    ) -> Result<Vec<Source>, CircuitError> {
        if c.field != self.field {
            return Err(CircuitError::FieldMismatch);
        }
        if input_map.len() != c.n_inputs {
            return Err(CircuitError::ArityMismatch {
                outputs: input_map.len(),
                inputs: c.n_inputs,
            });
        }
        let mut placed: Vec<Vec<Source>> = Vec::with_capacity(c.depth());
        for (l, layer) in c.layers.iter().enumerate() {
            let row = layer
                .iter()
                .map(|g| {
                    let wires: Vec<_> = g
                        .wires
                        .iter()
                        .map(|w| {
                            let source = match w.source {
                                Source::Input(i) => input_map[i as usize],
                                Source::Gate { layer, gate } => {
                                    placed[layer as usize][gate as usize]
                                }
                            };
                            (source, w.coeff)
                        })
                        .collect();
                    self.add_gate(base + l, wires)
                })
                .collect();
            placed.push(row);
        }
        Ok(placed.pop().unwrap_or_default())
    }

    pub fn build(self) -> Result<LinearCircuit, CircuitError> {
        LinearCircuit::new(self.field, self.n_inputs, self.layers)
    }
}

/// `c2 ∘ c1`, with depth `depth(c1) + depth(c2)` and additive wire count.
pub fn serial_compose(
    c1: &LinearCircuit,
    c2: &LinearCircuit,
) -> Result<LinearCircuit, CircuitError> {
    if c1.field != c2.field {
        return Err(CircuitError::FieldMismatch);
    }
    if c1.n_outputs() != c2.n_inputs {
        return Err(CircuitError::ArityMismatch {
            outputs: c1.n_outputs(),
            inputs: c2.n_inputs,
        });
    }
    let mut b = CircuitBuilder::new(&c1.field, c1.n_inputs);
    let inputs: Vec<Source> = (0..c1.n_inputs).map(Source::input).collect();
    let mid = b.embed(c1, 0, &inputs)?;
    b.embed(c2, c1.depth(), &mid)?;
    b.build()
}

/// Substitutes the penultimate layer into the last one, removing a layer.
pub fn collapse_final_layer(c: &LinearCircuit) -> Result<LinearCircuit, CircuitError> {
    let depth = c.depth();
    if depth < 2 {
        return Err(CircuitError::DepthTooSmall(depth));
    }
    let f = &c.field;
    let pen = depth - 2;
    let final_gates: Vec<Gate> = c.layers[depth - 1]
        .iter()
        .map(|g| {
            let mut expanded = Vec::new();
            for w in &g.wires {
                match w.source {
                    Source::Gate { layer, gate } if layer as usize == pen => {
                        for inner in &c.layers[pen][gate as usize].wires {
                            expanded.push((inner.source, f.mul(w.coeff, inner.coeff)));
                        }
                    }
                    _ => expanded.push((w.source, w.coeff)),
                }
            }
            Gate::new(f, expanded)
        })
        .collect();
    let mut layers: Vec<Vec<Gate>> = c.layers[..pen].to_vec();
    layers.push(final_gates);
    // Built directly: the new last layer may skip a level until relevelled.
    let raw = LinearCircuit {
        field: c.field.clone(),
        n_inputs: c.n_inputs,
        layers,
    };
    Ok(raw.normalize())
}

pub fn hamming_weight(v: &[FieldElement]) -> usize {
    v.iter().filter(|x| !x.is_zero()).count()
}

pub fn hamming_distance(u: &[FieldElement], v: &[FieldElement]) -> Result<usize, CircuitError> {
    if u.len() != v.len() {
        return Err(CircuitError::LengthMismatch(u.len(), v.len()));
    }
    Ok(u.iter().zip(v).filter(|(a, b)| a != b).count())
}

/// Random live-layer circuit for tests and benchmarks: every layer has
/// `width` gates each reading up to `fan_in` random earlier sources, and gate
/// 0 of each layer reads the layer before.
pub fn random_circuit(
    field: &FieldSpec,
    n_inputs: usize,
    widths: &[usize],
    fan_in: usize,
    stream: &mut crate::rng::Stream,
) -> LinearCircuit {
    let mut b = CircuitBuilder::new(field, n_inputs);
    let mut available: Vec<Source> = (0..n_inputs).map(Source::input).collect();
    let mut previous: Vec<Source> = available.clone();
    for &width in widths {
        let layer = b.depth();
        let mut made = Vec::with_capacity(width);
        for g in 0..width {
            let mut wires = Vec::with_capacity(fan_in);
            if g == 0 {
                let src = previous[stream.below_usize(previous.len())];
                wires.push((src, field.uniform_nonzero(stream)));
            }
            for _ in 0..fan_in {
                let src = available[stream.below_usize(available.len())];
                wires.push((src, field.uniform_nonzero(stream)));
            }
            let src = b.add_gate(layer, wires);
            made.push(src);
        }
        // Gate 0 can cancel to nothing; give it a fresh wire so the layer stays live.
        if b.layers[layer][0].fan_in() == 0
            || !b.layers[layer][0]
                .wires
                .iter()
                .any(|w| previous.contains(&w.source))
        {
            b.layers[layer][0] = Gate::new(field, [(previous[0], FieldElement::ONE)]);
        }
        available.extend(&made);
        previous = made;
    }
    b.build().expect("random circuit is live by construction")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::galois::make_field;
    use crate::rng::Stream;

    fn fe(v: &[u32]) -> Vec<FieldElement> {
        v.iter().map(|&x| FieldElement(x)).collect()
    }

    #[test]
    fn identity_and_sum() {
        let f3 = make_field(3).unwrap();
        let id = LinearCircuit::identity(&f3, 2);
        assert_eq!(id.evaluate(&fe(&[1, 2])).unwrap(), fe(&[1, 2]));
        assert_eq!((id.wire_count(), id.depth()), (2, 1));

        let f2 = make_field(2).unwrap();
        let sum = LinearCircuit::new(
            f2.clone(),
            2,
            vec![vec![Gate::new(
                &f2,
                [
                    (Source::input(0), FieldElement::ONE),
                    (Source::input(1), FieldElement::ONE),
                ],
            )]],
        )
        .unwrap();
        assert_eq!(sum.evaluate(&fe(&[1, 1])).unwrap(), fe(&[0]));
        assert_eq!((sum.wire_count(), sum.depth()), (2, 1));
        let g = sum.to_generator_matrix().unwrap();
        assert_eq!((g.rows(), g.cols()), (2, 1));
        assert_eq!(g.column(0), fe(&[1, 1]));
    }

    fn chain_gf3() -> LinearCircuit {
        let f = make_field(3).unwrap();
        let two = FieldElement(2);
        LinearCircuit::new(
            f.clone(),
            1,
            vec![
                vec![Gate::new(&f, [(Source::input(0), two)])],
                vec![Gate::new(&f, [(Source::gate(0, 0), two)])],
            ],
        )
        .unwrap()
    }

    #[test]
    fn gf3_chain_and_collapse() {
        let c = chain_gf3();
        assert_eq!(c.evaluate(&fe(&[2])).unwrap(), fe(&[2]));
        let flat = collapse_final_layer(&c).unwrap();
        assert_eq!(flat.depth(), 1);
        assert_eq!(
            flat.gate(0, 0).wires(),
            &[Wire {
                source: Source::input(0),
                coeff: FieldElement(1)
            }]
        );
    }

    #[test]
    fn collapse_rejects_depth_one() {
        let f = make_field(2).unwrap();
        assert_eq!(
            collapse_final_layer(&LinearCircuit::identity(&f, 3)),
            Err(CircuitError::DepthTooSmall(1))
        );
    }

    #[test]
    fn duplicate_sources_merge() {
        let f = make_field(3).unwrap();
        let g = Gate::new(
            &f,
            [
                (Source::input(0), FieldElement(1)),
                (Source::input(0), FieldElement(2)),
                (Source::input(1), FieldElement(1)),
            ],
        );
        assert_eq!(g.fan_in(), 1);
    }

    #[test]
    fn rejects_malformed_layers() {
        let f = make_field(2).unwrap();
        let one = FieldElement::ONE;
        let forward = vec![vec![Gate::new(&f, [(Source::gate(0, 0), one)])]];
        assert!(matches!(
            LinearCircuit::new(f.clone(), 1, forward),
            Err(CircuitError::BadWire { .. })
        ));
        let dead = vec![
            vec![Gate::new(&f, [(Source::input(0), one)])],
            vec![Gate::new(&f, [(Source::input(0), one)])],
        ];
        assert_eq!(
            LinearCircuit::new(f.clone(), 1, dead),
            Err(CircuitError::DeadLayer(1))
        );
        assert_eq!(
            LinearCircuit::new(f, 1, vec![vec![]]),
            Err(CircuitError::EmptyLayer(0))
        );
    }

    #[test]
    fn serial_compose_of_identities() {
        let f = make_field(2).unwrap();
        let id = LinearCircuit::identity(&f, 3);
        let c = serial_compose(&id, &id).unwrap();
        assert_eq!(c.depth(), 2);
        assert_eq!(c.wire_count(), 6);
        assert_eq!(c.to_generator_matrix().unwrap(), Matrix::identity(3));
        let short = LinearCircuit::identity(&f, 2);
        assert!(matches!(
            serial_compose(&id, &short),
            Err(CircuitError::ArityMismatch { .. })
        ));
        let other = LinearCircuit::identity(&make_field(3).unwrap(), 3);
        assert_eq!(
            serial_compose(&id, &other),
            Err(CircuitError::FieldMismatch)
        );
    }

    #[test]
    fn padding_layer_keeps_original_coordinates() {
        let f = make_field(3).unwrap();
        let mut s = Stream::new(4);
        let c = random_circuit(&f, 3, &[3, 2], 2, &mut s);
        let mut gates: Vec<Vec<(Source, FieldElement)>> = (0..2)
            .map(|i| vec![(Source::input(i), FieldElement::ONE)])
            .collect();
        gates.push(vec![
            (Source::input(0), FieldElement(2)),
            (Source::input(1), FieldElement(1)),
        ]);
        let mut b = CircuitBuilder::new(&f, 2);
        b.push_layer(gates);
        let pad = b.build().unwrap();
        let composed = serial_compose(&c, &pad).unwrap();
        for x in 0..27u32 {
            let v = fe(&[x % 3, x / 3 % 3, x / 9]);
            assert_eq!(
                composed.evaluate(&v).unwrap()[..2],
                c.evaluate(&v).unwrap()[..]
            );
        }
    }

    #[test]
    fn hamming_helpers() {
        let u = fe(&[1, 2, 0]);
        let v = fe(&[1, 0, 0]);
        assert_eq!(hamming_weight(&fe(&[0, 0])), 0);
        assert_eq!(hamming_distance(&u, &u).unwrap(), 0);
        assert_eq!(hamming_distance(&u, &v).unwrap(), 1);
        assert_eq!(hamming_weight(&u), 2);
        assert_eq!(
            hamming_distance(&u, &fe(&[1])),
            Err(CircuitError::LengthMismatch(3, 1))
        );
    }

    #[test]
    fn json_round_trip() {
        let f = make_field(4).unwrap();
        let mut s = Stream::new(9);
        let c = random_circuit(&f, 4, &[5, 3, 2], 3, &mut s);
        let back = LinearCircuit::from_json(&c.to_json()).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn evaluation_length_check() {
        let f = make_field(2).unwrap();
        let id = LinearCircuit::identity(&f, 2);
        assert_eq!(
            id.evaluate(&fe(&[1])),
            Err(CircuitError::InputLengthMismatch {
                expected: 2,
                got: 1
            })
        );
    }
}
