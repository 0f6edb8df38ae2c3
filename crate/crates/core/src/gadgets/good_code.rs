//! Good codes of bounded depth: PGCs covering every input weight `[1, n]`.

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use super::builders::{build_depth2_pgc, compose_pgcs_into_parts, reduce_pgc};
use super::{judge, las_vegas, BuildReport, GadgetConfig, GadgetError, PgcSpec};
use crate::ackermann::ackermann;
use crate::circuit::LinearCircuit;
use crate::galois::FieldSpec;
use crate::linalg::Matrix;
use crate::rng::Stream;

/// Weight thresholds `n / ratio` of the recursive construction, largest
/// weight first. Ratios grow as `r, A(k−1, r), A(k−1, A(k−1, r)), …` for
/// depth `2k ≥ 6` and as `r, 2^{√r}, …` at depth 4, stopping once a ratio
/// reaches `n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Schedule {
    pub depth: usize,
    pub ratios: Vec<u64>,
}

pub fn band_schedule(n: usize, d: usize, r: u64) -> Schedule {
    let k = (d / 2) as u64;
    let n64 = n as u64;
    let mut ratios = vec![r];
    let mut cur = r;
    while cur < n64 && k >= 2 {
        let next = if k == 2 {
            let e = (cur as f64).sqrt().floor() as u32;
            if e >= 63 {
                u64::MAX
            } else {
                1u64 << e
            }
        } else {
            match ackermann(k - 1, &BigUint::from(cur), &BigUint::from(n64)) {
                Ok(v) => v.to_u64().unwrap_or(u64::MAX),
                Err(_) => u64::MAX,
            }
        };
        if next <= cur {
            break;
        }
        ratios.push(next.min(n64));
        cur = next;
    }
    Schedule { depth: d, ratios }
}

/// A PGC for all weights `[1, n]` of depth at most `d` (rounded down to
/// even). Small `n` gets a sampled generator matrix checked outright;
/// `d = 2` uses the depth-2 construction; larger budgets route the lowest
/// weights through a condenser and a good code of depth `d − 2`, falling
/// back to depth 2 when that band cannot be built at this length.
pub fn build_good_code(
    field: &FieldSpec,
    n: usize,
    d: usize,
    cfg: &GadgetConfig,
    stream: &Stream,
) -> Result<BuildReport, GadgetError> {
    if d < 2 {
        return Err(GadgetError::DepthBudgetTooSmall(d));
    }
    if n == 0 {
        return Err(GadgetError::BadShape("good code on zero inputs".into()));
    }
    let d = d - d % 2;
    if n <= cfg.n_small {
        return direct(field, n, cfg, stream);
    }
    if d == 2 {
        let mut rep = build_depth2_pgc(field, n, n, cfg, stream, cfg.max_tries)?;
        rep.kind = "good_code".into();
        return Ok(rep);
    }
    match recursive(field, n, d, cfg, stream) {
        Ok(rep) => Ok(rep),
        Err(
            e @ (GadgetError::Stage { .. }
            | GadgetError::BadShape(_)
            | GadgetError::Exhausted { .. }),
        ) => {
            let mut rep = build_depth2_pgc(field, n, n, cfg, &stream.substream(7), cfg.max_tries)?;
            rep.kind = "good_code".into();
            rep.notes.push(format!(
                "low band unavailable ({e}); depth-2 construction used"
            ));
            Ok(rep)
        }
        Err(e) => Err(e),
    }
}

fn direct(
    field: &FieldSpec,
    n: usize,
    cfg: &GadgetConfig,
    stream: &Stream,
) -> Result<BuildReport, GadgetError> {
    let spec = PgcSpec::new(n, 1, n, cfg);
    let n_out = spec.n_out();
    let (c, v, tries) = las_vegas("good_code", stream, cfg.max_tries, |s| {
        let rows = (0..n)
            .map(|_| (0..n_out).map(|_| field.uniform(s)).collect())
            .collect();
        let g = Matrix::from_rows(rows).expect("rectangular");
        judge(
            LinearCircuit::from_generator(field, &g),
            &spec.detector(),
            &s.substream(u64::MAX),
        )
    })?;
    let mut rep = BuildReport::new("good_code", c, spec.detector(), &v, tries, stream.seed());
    rep.notes.push("direct: sampled generator matrix".into());
    Ok(rep)
}

fn recursive(
    field: &FieldSpec,
    n: usize,
    d: usize,
    cfg: &GadgetConfig,
    stream: &Stream,
) -> Result<BuildReport, GadgetError> {
    let r = cfg.reduce_ratio.max(cfg.c0).max(3);
    let schedule = band_schedule(n, d, r as u64);
    let top = (n as f64 / (r as f64).powf(1.5) + 1e-9).floor() as usize;
    let t = cfg.reduce_band_max.min(top);
    if t < 1 || r > n {
        return Err(GadgetError::BadShape(format!(
            "no low band for n = {n} at ratio {r}"
        )));
    }
    let mut inner = |m: usize, s: &Stream| build_good_code(field, m, d - 2, cfg, s);
    let low = reduce_pgc(
        field,
        n,
        r,
        1,
        t,
        &mut inner,
        cfg,
        &stream.substream(0),
        cfg.max_tries,
    )?;
    let r_top = n.div_ceil(t + 1).max(2);
    let high = build_depth2_pgc(field, n, r_top, cfg, &stream.substream(1), cfg.max_tries)?;
    let lo_spec = PgcSpec::new(n, 1, t, cfg);
    let hi_spec = PgcSpec::new(n, high.spec.ell, n, cfg);
    let parts = [(&low.circuit, lo_spec), (&high.circuit, hi_spec)];
    let mut rep = compose_pgcs_into_parts(&parts, cfg, &stream.substream(2), cfg.max_tries)?;
    rep.kind = "good_code".into();
    rep.parts.push(low.summary(&format!("low band [1, {t}]")));
    rep.parts.extend(low.parts.iter().cloned().map(|mut p| {
        p.label = format!("low/{}", p.label);
        p
    }));
    rep.parts
        .push(high.summary(&format!("high band [{}, {n}]", high.spec.ell)));
    rep.notes
        .push(format!("schedule ratios {:?}", schedule.ratios));
    Ok(rep)
}
