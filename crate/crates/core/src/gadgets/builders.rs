//! Randomized gadget builders. Each one samples a candidate wiring, checks
//! it, and retries on fresh randomness (try `t` uses substream `t`).

use serde::{Deserialize, Serialize};

use super::{
    check_range_detector, judge, las_vegas, Attempt, BuildReport, GadgetConfig, GadgetError,
    PgcSpec, RangeDetectorSpec, Verification,
};
use crate::circuit::{
    collapse_final_layer, serial_compose, CircuitBuilder, Gate, LinearCircuit, Source,
};
use crate::disperser::{check_disperser, purge_right_half, sample_left_regular, BipartiteGraph};
use crate::galois::{FieldElement, FieldSpec};
use crate::rng::Stream;

type Wiring = Vec<Vec<(Source, FieldElement)>>;

fn ceil_frac(x: f64) -> usize {
    (x - 1e-9).ceil().max(0.0) as usize
}

/// Disperser-shaped layer from `inputs` to `n_out` gates: a left-regular
/// graph onto `2·n_out` right vertices, purged of its heavier half, with a
/// uniform coefficient on every edge.
fn amplifier_layer(
    field: &FieldSpec,
    inputs: &[Source],
    n_out: usize,
    degree: usize,
    stream: &mut Stream,
) -> Result<(BipartiteGraph, Wiring), GadgetError> {
    let d = degree.clamp(1, 2 * n_out);
    let g = sample_left_regular(inputs.len(), 2 * n_out, d, stream)?;
    let g = purge_right_half(&g)?;
    let mut gates: Wiring = vec![Vec::new(); g.n_right];
    for (i, j) in g.edges() {
        gates[j].push((inputs[i], field.uniform(stream)));
    }
    Ok((g, gates))
}

/// Amplifies the rate of `base`: its outputs feed a disperser-wired layer
/// of `c_target · n` gates.
///
/// `base` must map input weights in `in_range` to relative output weight
/// at least `rho`; the result is checked to map the same range to relative
/// weight at least `delta`.
#[allow(clippy::too_many_arguments)]
pub fn build_rate_amplifier(
    base: &LinearCircuit,
    in_range: (usize, usize),
    rho: f64,
    c_target: usize,
    delta: f64,
    cfg: &GadgetConfig,
    stream: &Stream,
    max_tries: u64,
) -> Result<BuildReport, GadgetError> {
    let (n, m) = (base.n_inputs(), base.n_outputs());
    if c_target == 0 || !(0.0..=1.0).contains(&delta) || !(0.0..=1.0).contains(&rho) {
        return Err(GadgetError::BadShape(format!(
            "c = {c_target}, delta = {delta}, rho = {rho}"
        )));
    }
    let base_spec = RangeDetectorSpec {
        m_in: n,
        n_out: m,
        ell: in_range.0,
        k: in_range.1,
        r: ceil_frac(rho * m as f64),
        s: m,
    };
    let pre = check_range_detector(base, &base_spec, &stream.substream(u64::MAX))?;
    if !pre.passed {
        return Err(GadgetError::PreconditionFailed {
            witness: pre.witness,
        });
    }
    let n_out = c_target * n;
    let spec = RangeDetectorSpec {
        m_in: n,
        n_out,
        ell: in_range.0,
        k: in_range.1,
        r: ceil_frac(delta * n_out as f64),
        s: n_out,
    };
    let field = base.field();
    let mut disperser_mode = None;
    let (circuit, verdict, tries) = las_vegas("rate_amplifier", stream, max_tries, |s| {
        let mut b = CircuitBuilder::new(field, n);
        let inputs: Vec<Source> = (0..n).map(Source::input).collect();
        let outs = b.embed(base, 0, &inputs)?;
        let (g, gates) = amplifier_layer(field, &outs, n_out, cfg.amp_degree, s)?;
        let dv = check_disperser(&g, rho, cfg.amp_eps, &s.substream(u64::MAX));
        if !dv.passed {
            return Ok(Attempt::Reject(None));
        }
        disperser_mode = Some(dv.mode);
        b.push_layer(gates);
        judge(b.build()?, &spec, &s.substream(u64::MAX - 1))
    })?;
    let mut report = BuildReport::new(
        "rate_amplifier",
        circuit,
        spec,
        &verdict,
        tries,
        stream.seed(),
    );
    report.notes.push(format!(
        "disperser check: {:?}",
        disperser_mode.expect("accepted after a disperser check")
    ));
    report.notes.push(format!(
        "output fan-in ≤ {}",
        report
            .circuit
            .output_fan_ins()
            .into_iter()
            .max()
            .unwrap_or(0)
    ));
    Ok(report)
}

/// `m` gates each reading up to `cfg.out_amp_fan_in` distinct random inputs
/// with uniform coefficients.
pub(crate) fn output_amplifier_layer(
    field: &FieldSpec,
    n: usize,
    m: usize,
    cfg: &GadgetConfig,
    stream: &mut Stream,
) -> LinearCircuit {
    let f = cfg.out_amp_fan_in.min(n);
    let gates = (0..m)
        .map(|_| {
            let srcs = stream.distinct(n, f);
            Gate::new(
                field,
                srcs.into_iter()
                    .map(|i| (Source::input(i), field.uniform(stream)))
                    .collect::<Vec<_>>(),
            )
        })
        .collect();
    LinearCircuit::new(field.clone(), n, vec![gates]).expect("one layer over the inputs")
}

/// Depth-1 map from `n` to `m ≥ 3n` symbols sending weights in `[⌈n/8⌉, n]`
/// to weight at least `⌈m/8⌉`.
pub fn build_output_amplifier(
    field: &FieldSpec,
    n: usize,
    m: usize,
    cfg: &GadgetConfig,
    stream: &Stream,
    max_tries: u64,
) -> Result<BuildReport, GadgetError> {
    if n == 0 || m < 3 * n {
        return Err(GadgetError::BadShape(format!(
            "output amplifier needs m >= 3n, got n = {n}, m = {m}"
        )));
    }
    let spec = RangeDetectorSpec {
        m_in: n,
        n_out: m,
        ell: n.div_ceil(8),
        k: n,
        r: m.div_ceil(8),
        s: m,
    };
    let (circuit, verdict, tries) = las_vegas("output_amplifier", stream, max_tries, |s| {
        let c = output_amplifier_layer(field, n, m, cfg, s);
        judge(c, &spec, &s.substream(u64::MAX))
    })?;
    Ok(BuildReport::new(
        "output_amplifier",
        circuit,
        spec,
        &verdict,
        tries,
        stream.seed(),
    ))
}

/// Depth-1 map from `n` to `⌊n/r⌋` symbols sending weights in
/// `[s, ⌊n/r^{1.5}⌋]` into `[s, ⌊n/r⌋]`.
pub fn build_condenser(
    field: &FieldSpec,
    n: usize,
    r: usize,
    s: usize,
    cfg: &GadgetConfig,
    stream: &Stream,
    max_tries: u64,
) -> Result<BuildReport, GadgetError> {
    build_condenser_range(field, n, r, s, None, cfg, stream, max_tries)
}

/// As [`build_condenser`], checked only up to input weight `upper` when given.
#[allow(clippy::too_many_arguments)]
pub fn build_condenser_range(
    field: &FieldSpec,
    n: usize,
    r: usize,
    s: usize,
    upper: Option<usize>,
    cfg: &GadgetConfig,
    stream: &Stream,
    max_tries: u64,
) -> Result<BuildReport, GadgetError> {
    let top = (n as f64 / (r as f64).powf(1.5) + 1e-9).floor() as usize;
    if r < cfg.c0.max(1) || r > n || s < 1 || s > top {
        return Err(GadgetError::BadShape(format!(
            "condenser needs {} <= r <= n and 1 <= s <= n/r^1.5, got n = {n}, r = {r}, s = {s}",
            cfg.c0
        )));
    }
    let k = match upper {
        Some(u) if u < s || u > top => {
            return Err(GadgetError::BadShape(format!(
                "upper weight {u} outside [{s}, {top}]"
            )))
        }
        Some(u) => u,
        None => top,
    };
    let outputs = n / r;
    let spec = RangeDetectorSpec {
        m_in: n,
        n_out: outputs,
        ell: s,
        k,
        r: s,
        s: outputs,
    };
    let fan_out = cfg.condenser_fan_out.min(outputs);
    let (circuit, verdict, tries) = las_vegas("condenser", stream, max_tries, |st| {
        let mut gates: Wiring = vec![Vec::new(); outputs];
        for i in 0..n {
            for j in st.distinct(outputs, fan_out) {
                gates[j].push((Source::input(i), field.uniform_nonzero(st)));
            }
        }
        let layer = gates.into_iter().map(|w| Gate::new(field, w)).collect();
        let c = LinearCircuit::new(field.clone(), n, vec![layer])?;
        judge(c, &spec, &st.substream(u64::MAX))
    })?;
    Ok(BuildReport::new(
        "condenser",
        circuit,
        spec,
        &verdict,
        tries,
        stream.seed(),
    ))
}

/// Combines PGCs for abutting ranges into one PGC for their union.
///
/// The parts run side by side; output `j` of the combination layer is a
/// random combination of the parts' outputs `j`, and an amplifier layer on
/// top is collapsed into it. Depth is the largest part depth plus one.
pub fn compose_pgcs(
    parts: &[(&LinearCircuit, PgcSpec)],
    cfg: &GadgetConfig,
    stream: &Stream,
    max_tries: u64,
) -> Result<BuildReport, GadgetError> {
    compose_impl(parts, false, cfg, stream, max_tries)
}

/// As [`compose_pgcs`], with the final layer collapsed once more into the
/// parts' output layers, so the depth equals the largest part depth. Worth
/// it when those output layers have small fan-in.
pub fn compose_pgcs_into_parts(
    parts: &[(&LinearCircuit, PgcSpec)],
    cfg: &GadgetConfig,
    stream: &Stream,
    max_tries: u64,
) -> Result<BuildReport, GadgetError> {
    compose_impl(parts, true, cfg, stream, max_tries)
}

fn compose_impl(
    parts: &[(&LinearCircuit, PgcSpec)],
    into_parts: bool,
    cfg: &GadgetConfig,
    stream: &Stream,
    max_tries: u64,
) -> Result<BuildReport, GadgetError> {
    let (first_c, first) = parts.first().ok_or(GadgetError::RangesDontAbut)?;
    let field = first_c.field();
    for (c, p) in parts {
        if p.n != first.n
            || p.expansion != first.expansion
            || p.out_weight_min != first.out_weight_min
        {
            return Err(GadgetError::BadShape(
                "parts differ in length or expansion".into(),
            ));
        }
        if c.n_inputs() != p.n || c.n_outputs() != p.n_out() {
            return Err(GadgetError::ArityMismatch {
                expected: (p.n, p.n_out()),
                got: (c.n_inputs(), c.n_outputs()),
            });
        }
        if c.field() != field {
            return Err(crate::circuit::CircuitError::FieldMismatch.into());
        }
    }
    for w in parts.windows(2) {
        let (a, b) = (&w[0].1, &w[1].1);
        if b.r <= a.r || b.r > a.s + 1 || b.s < a.s {
            return Err(GadgetError::RangesDontAbut);
        }
    }
    let last = parts.last().expect("nonempty").1;
    let target = PgcSpec {
        s: last.s,
        ..*first
    };
    let spec = target.detector();
    let n = first.n;
    let n_out = first.n_out();

    let mut base = CircuitBuilder::new(field, n);
    let inputs: Vec<Source> = (0..n).map(Source::input).collect();
    let mut outs = Vec::with_capacity(parts.len());
    for (c, _) in parts {
        outs.push(base.embed(c, 0, &inputs)?);
    }

    let (circuit, verdict, tries) = las_vegas("compose", stream, max_tries, |s| {
        let mut b = base.clone();
        let combo: Wiring = (0..n_out)
            .map(|e| outs.iter().map(|o| (o[e], field.uniform(s))).collect())
            .collect();
        let combo = b.push_layer(combo);
        let (_, amp) = amplifier_layer(field, &combo, n_out, cfg.combine_degree, s)?;
        b.push_layer(amp);
        let mut c = collapse_final_layer(&b.build()?)?;
        if into_parts && c.depth() >= 2 {
            c = collapse_final_layer(&c)?;
        }
        judge(c, &spec, &s.substream(u64::MAX))
    })?;
    let mut report = BuildReport::new(
        "composed_pgc",
        circuit,
        spec,
        &verdict,
        tries,
        stream.seed(),
    );
    for (c, p) in parts {
        report.notes.push(format!(
            "part [{}, {}]: {} wires, depth {}",
            p.r,
            p.s,
            c.wire_count(),
            c.depth()
        ));
    }
    Ok(report)
}

/// Condenser, then an inner PGC on the condensed length, then an output
/// amplifier back to `R·n` symbols. Covers input weights `[s, t]` with
/// `t ≤ n/r^{1.5}`; depth is the inner depth plus two.
///
/// `inner(n', stream)` must return a PGC on `n'` inputs covering `[s, n']`.
#[allow(clippy::too_many_arguments)]
pub fn reduce_pgc(
    field: &FieldSpec,
    n: usize,
    r: usize,
    s: usize,
    t: usize,
    inner: &mut dyn FnMut(usize, &Stream) -> Result<BuildReport, GadgetError>,
    cfg: &GadgetConfig,
    stream: &Stream,
    max_tries: u64,
) -> Result<BuildReport, GadgetError> {
    let condenser = build_condenser_range(
        field,
        n,
        r,
        s,
        Some(t),
        cfg,
        &stream.substream(0),
        max_tries,
    )
    .map_err(|e| e.in_stage("condenser"))?;
    let n_inner = n / r;
    let inner_report = inner(n_inner, &stream.substream(1)).map_err(|e| e.in_stage("inner"))?;
    let expected = PgcSpec::new(n_inner, s, n_inner, cfg);
    let got = inner_report.spec;
    if got.m_in != n_inner
        || got.n_out != expected.n_out()
        || got.ell > s
        || got.k < n_inner
        || got.r < expected.out_weight_min
    {
        return Err(GadgetError::BadShape(format!(
            "inner code {got:?} does not cover {expected:?}"
        ))
        .in_stage("inner"));
    }
    if inner_report.verified == Verification::Failed {
        return Err(GadgetError::PreconditionFailed { witness: None }.in_stage("inner"));
    }
    let head = serial_compose(&condenser.circuit, &inner_report.circuit)?;
    let target = PgcSpec::new(n, s, t, cfg);
    if target.n_out() < 3 * expected.n_out() {
        return Err(
            GadgetError::BadShape(format!("ratio {r} too small for the output amplifier"))
                .in_stage("output_amplifier"),
        );
    }
    let spec = target.detector();
    let (circuit, verdict, tries) =
        las_vegas("output_amplifier", &stream.substream(2), max_tries, |st| {
            let amp = output_amplifier_layer(field, expected.n_out(), target.n_out(), cfg, st);
            judge(serial_compose(&head, &amp)?, &spec, &st.substream(u64::MAX))
        })
        .map_err(|e| e.in_stage("output_amplifier"))?;
    let mut report = BuildReport::new("reduced_pgc", circuit, spec, &verdict, tries, stream.seed());
    report.parts.push(condenser.summary("condenser"));
    report.parts.push(inner_report.summary("inner"));
    report
        .parts
        .extend(inner_report.parts.iter().cloned().map(|mut p| {
            p.label = format!("inner/{}", p.label);
            p
        }));
    report.notes.extend(condenser.notes);
    Ok(report)
}

/// One band of the depth-2 construction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BandPlan {
    pub k: f64,
    pub lo: usize,
    pub hi: usize,
    /// Width of the middle layer.
    pub middle: usize,
    /// Fan-in of each middle gate.
    pub fan_in: usize,
}

/// Bands `[⌈n/k⌉, ⌊2n/k⌋]` for `k = r, r/2, …` until the range reaches `n`.
pub fn depth2_plan(n: usize, r: usize, cfg: &GadgetConfig) -> Vec<BandPlan> {
    let log_r = (r as f64).log2().max(1.0);
    let cap = (cfg.expansion * n / 3).max(1);
    let mut plan = Vec::new();
    let mut k = r as f64;
    loop {
        let lo = ceil_frac(n as f64 / k).max(1);
        let hi = (((2 * n) as f64 / k + 1e-9).floor() as usize)
            .min(n)
            .max(lo);
        plan.push(BandPlan {
            k,
            lo,
            hi,
            middle: ceil_frac(cfg.c_mid * n as f64 / k * log_r).clamp(1, cap),
            fan_in: ceil_frac(cfg.c_fan * k).max(1),
        });
        if hi >= n {
            return plan;
        }
        k /= 2.0;
    }
}

/// A PGC of depth 2 for input weights `[⌈n/r⌉, n]`.
pub fn build_depth2_pgc(
    field: &FieldSpec,
    n: usize,
    r: usize,
    cfg: &GadgetConfig,
    stream: &Stream,
    max_tries: u64,
) -> Result<BuildReport, GadgetError> {
    if r < 2 || r > n {
        return Err(GadgetError::BadShape(format!(
            "depth-2 code needs 2 <= r <= n, got r = {r}, n = {n}"
        )));
    }
    let plan = depth2_plan(n, r, cfg);
    let mut stages = Vec::with_capacity(plan.len());
    for (i, band) in plan.iter().enumerate() {
        let spec = PgcSpec::new(n, band.lo, band.hi, cfg);
        let label = format!("band {i}");
        let (c, v, tries) = las_vegas(&label, &stream.substream(i as u64), max_tries, |s| {
            let mut b = CircuitBuilder::new(field, n);
            let middle: Wiring = (0..band.middle)
                .map(|_| {
                    (0..band.fan_in)
                        .map(|_| (Source::input(s.below_usize(n)), field.uniform(s)))
                        .collect()
                })
                .collect();
            let mid = b.push_layer(middle);
            let amp = output_amplifier_layer(field, band.middle, spec.n_out(), cfg, s);
            b.embed(&amp, 1, &mid)?;
            judge(b.build()?, &spec.detector(), &s.substream(u64::MAX))
        })?;
        let report = BuildReport::new("depth2_band", c, spec.detector(), &v, tries, stream.seed());
        stages.push((report, spec, *band));
    }
    let summaries: Vec<_> = stages
        .iter()
        .map(|(rep, _, band)| rep.summary(&format!("k = {}: [{}, {}]", band.k, band.lo, band.hi)))
        .collect();
    let mut report = if stages.len() == 1 {
        let (mut rep, _, _) = stages.pop().expect("one stage");
        rep.kind = "depth2_pgc".into();
        rep
    } else {
        let parts: Vec<(&LinearCircuit, PgcSpec)> =
            stages.iter().map(|(r, p, _)| (&r.circuit, *p)).collect();
        let mut rep =
            compose_pgcs_into_parts(&parts, cfg, &stream.substream(plan.len() as u64), max_tries)?;
        rep.kind = "depth2_pgc".into();
        rep
    };
    report.parts = summaries;
    Ok(report)
}
