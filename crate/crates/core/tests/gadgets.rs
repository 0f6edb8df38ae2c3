use num_bigint::BigUint;
use proptest::prelude::*;
use shallowcode::circuit::hamming_weight;
use shallowcode::gadgets::{
    ball_volume, build_condenser, build_depth2_pgc, build_good_code, build_output_amplifier,
    build_rate_amplifier, compose_pgcs, entropy_volume_bound, reduce_pgc, repetition_pgc,
    verify_range_detector, verify_range_detector_capped, BuildReport, GadgetConfig, GadgetError,
    PgcSpec, RangeDetectorSpec, Verification,
};
use shallowcode::galois::make_field;
use shallowcode::{FieldElement, FieldSpec, LinearCircuit, Stream};

/// Relative distance of the rate-amplifier fixture, the largest multiple of
/// 1/16 the Las Vegas search reaches within 200 tries.
const RATE_AMP_DELTA: f64 = 0.25;
/// Regression pin on depth-2 wire counts, in units of `n·log₂²r`.
const C_REPORT: f64 = 100.0;

/// Smallest and largest output weight over all inputs with weight in
/// `[lo, hi]`, by plain evaluation.
fn weight_span(c: &LinearCircuit, lo: usize, hi: usize) -> (usize, usize) {
    let f = c.field();
    let q = f.order();
    let n = c.n_inputs();
    let mut span = (usize::MAX, 0);
    let mut x = vec![0u32; n];
    loop {
        let w = x.iter().filter(|&&v| v != 0).count();
        if (lo..=hi).contains(&w) {
            let xe: Vec<FieldElement> = x.iter().map(|&v| FieldElement(v)).collect();
            let out = hamming_weight(&c.evaluate(&xe).unwrap());
            span = (span.0.min(out), span.1.max(out));
        }
        let mut i = 0;
        loop {
            if i == n {
                return span;
            }
            x[i] += 1;
            if x[i] < q {
                break;
            }
            x[i] = 0;
            i += 1;
        }
    }
}

fn gf2() -> FieldSpec {
    make_field(2).unwrap()
}

fn rep_report(field: &FieldSpec, m: usize, lo: usize, cfg: &GadgetConfig) -> BuildReport {
    let circuit = repetition_pgc(field, m, 32);
    let spec = PgcSpec::new(m, lo, m, cfg).detector();
    let v = verify_range_detector(&circuit, &spec).unwrap();
    BuildReport {
        wire_count: circuit.wire_count(),
        depth: circuit.depth(),
        circuit,
        kind: "repetition".into(),
        spec,
        verified: (&v).into(),
        tries: 1,
        seed: 0,
        parts: vec![],
        notes: vec![],
    }
}

#[test]
fn repetition_is_a_partial_good_code() {
    for q in [2u64, 3] {
        let f = make_field(q).unwrap();
        let top = if q == 2 { 16 } else { 13 };
        for n in 1..=top {
            let c = repetition_pgc(&f, n, 32);
            let spec = RangeDetectorSpec {
                m_in: n,
                n_out: 32 * n,
                ell: n.div_ceil(8),
                k: n,
                r: 4 * n,
                s: 32 * n,
            };
            let v = verify_range_detector_capped(&c, &spec, 50_000_000).unwrap();
            assert!(v.passed, "q={q} n={n}");
            if n <= 8 {
                let (lo, hi) = weight_span(&c, spec.ell, n);
                assert_eq!((lo, hi), (32 * spec.ell, 32 * n));
            }
        }
    }
}

#[test]
fn verifier_examples() {
    let f = gf2();
    let id = LinearCircuit::identity(&f, 6);
    let spec = RangeDetectorSpec {
        m_in: 6,
        n_out: 6,
        ell: 1,
        k: 6,
        r: 1,
        s: 6,
    };
    assert!(verify_range_detector(&id, &spec).unwrap().passed);
    let strict = RangeDetectorSpec { r: 2, ..spec };
    let v = verify_range_detector(&id, &strict).unwrap();
    assert!(!v.passed);
    assert_eq!(
        v.witness
            .as_deref()
            .map(|w| w.iter().filter(|&&x| x != 0).count()),
        Some(1)
    );
    let wrong = RangeDetectorSpec { n_out: 7, ..spec };
    assert!(matches!(
        verify_range_detector(&id, &wrong),
        Err(GadgetError::ArityMismatch { .. })
    ));
}

#[test]
fn output_amplifier_fixture() {
    let f = gf2();
    let cfg = GadgetConfig::default();
    let rep = build_output_amplifier(&f, 8, 24, &cfg, &Stream::new(1), 200).unwrap();
    assert_eq!(rep.verified, Verification::Exhaustive);
    assert_eq!(rep.depth, 1);
    assert!(rep.circuit.output_fan_ins().iter().all(|&d| d <= 12));
    let (lo, _) = weight_span(&rep.circuit, 1, 8);
    assert!(lo >= 3);
    assert!(matches!(
        build_output_amplifier(&f, 8, 16, &cfg, &Stream::new(1), 200),
        Err(GadgetError::BadShape(_))
    ));
}

#[test]
fn condenser_over_weights_two_to_eight_is_out_of_reach() {
    // 64 → 16 has a kernel of dimension ≥ 48, and the Hamming balls of
    // radius 4 around 2^48 kernel cosets overlap, so some nonzero input of
    // weight ≤ 8 maps to zero.
    assert!(ball_volume(64, 4, 2) > BigUint::from(1u32 << 16));

    let f = gf2();
    let cfg = GadgetConfig {
        c0: 4,
        ..GadgetConfig::default()
    };
    let err = build_condenser(&f, 64, 4, 2, &cfg, &Stream::new(1), 200).unwrap_err();
    assert!(matches!(err, GadgetError::Exhausted { tries: 200, .. }));
    let w = err.witness().expect("violating input");
    let wt = w.iter().filter(|&&v| v != 0).count();
    assert!((2..=8).contains(&wt));

    let default = GadgetConfig::default();
    assert!(matches!(
        build_condenser(&f, 64, 4, 2, &default, &Stream::new(1), 1),
        Err(GadgetError::BadShape(_))
    ));
}

#[test]
fn two_band_composition_fixture() {
    let f = gf2();
    let cfg = GadgetConfig::default();
    let a = repetition_pgc(&f, 8, 32);
    let parts = [
        (&a, PgcSpec::new(8, 1, 2, &cfg)),
        (&a, PgcSpec::new(8, 2, 4, &cfg)),
    ];
    let rep = compose_pgcs(&parts, &cfg, &Stream::new(1), 200).unwrap();
    assert_eq!(rep.verified, Verification::Exhaustive);
    assert_eq!(rep.depth, 2);
    assert_eq!((rep.spec.ell, rep.spec.k), (1, 4));
    let (lo, _) = weight_span(&rep.circuit, 1, 4);
    assert!(lo >= 32);
    assert!(matches!(
        compose_pgcs(&[], &cfg, &Stream::new(1), 1),
        Err(GadgetError::RangesDontAbut)
    ));
    let gap = [
        (&a, PgcSpec::new(8, 1, 2, &cfg)),
        (&a, PgcSpec::new(8, 4, 8, &cfg)),
    ];
    assert!(matches!(
        compose_pgcs(&gap, &cfg, &Stream::new(1), 1),
        Err(GadgetError::RangesDontAbut)
    ));
}

#[test]
fn direct_good_code_fixture() {
    let f = gf2();
    let cfg = GadgetConfig::default();
    let rep = build_good_code(&f, 8, 2, &cfg, &Stream::new(1)).unwrap();
    assert_eq!(rep.verified, Verification::Exhaustive);
    assert_eq!(rep.circuit.n_outputs(), 256);
    assert_eq!(rep.spec.ell, 1);
    let (lo, _) = weight_span(&rep.circuit, 1, 8);
    assert!(lo >= 32);
    assert!(matches!(
        build_good_code(&f, 8, 1, &cfg, &Stream::new(1)),
        Err(GadgetError::DepthBudgetTooSmall(1))
    ));
}

#[test]
fn rate_amplifier_fixture() {
    let f = gf2();
    let cfg = GadgetConfig::default();
    let base = repetition_pgc(&f, 8, 32);
    let rep = build_rate_amplifier(
        &base,
        (1, 8),
        1.0 / 8.0,
        2,
        RATE_AMP_DELTA,
        &cfg,
        &Stream::new(1),
        200,
    )
    .unwrap();
    assert_eq!(rep.verified, Verification::Exhaustive);
    assert_eq!(rep.circuit.n_outputs(), 16);
    let (lo, _) = weight_span(&rep.circuit, 1, 8);
    assert!(lo as f64 >= RATE_AMP_DELTA * 16.0);
    let vacuous =
        build_rate_amplifier(&base, (1, 8), 1.0 / 8.0, 2, 0.0, &cfg, &Stream::new(2), 1).unwrap();
    assert_eq!(vacuous.tries, 1);
    let bad = build_rate_amplifier(&base, (1, 8), 0.5, 2, 0.1, &cfg, &Stream::new(1), 5);
    assert!(matches!(bad, Err(GadgetError::PreconditionFailed { .. })));
}

#[test]
fn reduction_chain_fixture() {
    let f = gf2();
    let cfg = GadgetConfig {
        c0: 4,
        ..GadgetConfig::default()
    };
    let mut inner = |m: usize, _: &Stream| Ok(rep_report(&f, m, 2, &cfg));
    let rep = reduce_pgc(&f, 64, 4, 2, 3, &mut inner, &cfg, &Stream::new(1), 200).unwrap();
    assert_eq!(rep.verified, Verification::Exhaustive);
    assert_eq!(rep.depth, 1 + 1 + 1);
    assert_eq!(rep.circuit.n_outputs(), 32 * 64);
    assert_eq!((rep.spec.ell, rep.spec.k), (2, 3));

    let mut failing = |_: usize, _: &Stream| -> Result<BuildReport, GadgetError> {
        Err(GadgetError::Exhausted {
            stage: "x".into(),
            tries: 1,
            witness: None,
        })
    };
    let err = reduce_pgc(&f, 64, 4, 2, 3, &mut failing, &cfg, &Stream::new(1), 200).unwrap_err();
    assert!(
        matches!(&err, GadgetError::Stage { stage, .. } if stage == "inner"),
        "{err}"
    );
}

#[test]
fn depth_two_fixture_and_wire_pin() {
    let f = gf2();
    let cfg = GadgetConfig::default();
    let rep = build_depth2_pgc(&f, 8, 2, &cfg, &Stream::new(1), 200).unwrap();
    assert_eq!(rep.verified, Verification::Exhaustive);
    assert_eq!(rep.depth, 2);
    assert_eq!((rep.spec.ell, rep.spec.k), (4, 8));
    let (lo, _) = weight_span(&rep.circuit, 4, 8);
    assert!(lo >= 32);
    for n in [8usize, 16] {
        let rep = build_depth2_pgc(&f, n, n, &cfg, &Stream::new(1), 200).unwrap();
        assert_eq!(rep.spec.ell, 1);
        assert_ne!(rep.verified, Verification::Failed);
        let log_r = (n as f64).log2();
        assert!(
            (rep.wire_count as f64) <= C_REPORT * n as f64 * log_r * log_r,
            "n={n}"
        );
    }
}

#[test]
fn good_code_depth_and_wire_trend() {
    let f = gf2();
    let cfg = GadgetConfig::default();
    let mut wires = Vec::new();
    for d in [2usize, 4, 6] {
        let rep = build_good_code(&f, 16, d, &cfg, &Stream::new(1)).unwrap();
        assert!(rep.depth <= d);
        assert_eq!((rep.spec.ell, rep.spec.k), (1, 16));
        assert_ne!(rep.verified, Verification::Failed);
        wires.push(rep.wire_count);
    }
    assert!(wires[2] <= wires[1]);
    let odd = build_good_code(&f, 8, 3, &cfg, &Stream::new(1)).unwrap();
    assert!(odd.depth <= 2);
}

#[test]
fn ball_volume_examples_and_bound() {
    assert_eq!(ball_volume(4, 0, 3), BigUint::from(1u8));
    assert_eq!(ball_volume(4, 4, 2), BigUint::from(16u8));
    assert_eq!(ball_volume(10, 2, 2), BigUint::from(56u8));
    let b = entropy_volume_bound(10, 0.2, 2).unwrap();
    let oracle = 2f64.powf(10.0 * (-(0.2f64 * 0.2f64.log2()) - 0.8 * 0.8f64.log2()));
    assert!((b - oracle).abs() < 1e-9);
    assert!((b - 149.3).abs() < 0.5, "{b}");
    assert!(entropy_volume_bound(10, 0.6, 2).is_err());
    for q in [2u32, 3, 4] {
        let top = 1.0 - 1.0 / q as f64;
        for n in 1..=40usize {
            for i in 1..=10 {
                let gamma = top * i as f64 / 10.0;
                let w = (gamma * n as f64 + 1e-9).floor() as usize;
                let lhs = ball_volume(n, w, q);
                let bound = entropy_volume_bound(n, gamma, q).unwrap();
                let lhs_f: f64 = lhs.to_string().parse().unwrap();
                assert!(lhs_f <= bound * (1.0 + 1e-9), "n={n} q={q} γ={gamma}");
            }
        }
    }
}

#[test]
fn reports_serialize_with_their_circuit() {
    let f = gf2();
    let rep =
        build_output_amplifier(&f, 8, 24, &GadgetConfig::default(), &Stream::new(4), 200).unwrap();
    let v = rep.to_json();
    assert_eq!(v["verified"], "exhaustive");
    let c =
        LinearCircuit::from_file(&serde_json::from_value(v["circuit"].clone()).unwrap()).unwrap();
    assert_eq!(c, rep.circuit);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn exhaustive_reports_replay(seed in any::<u64>()) {
        let f = gf2();
        let cfg = GadgetConfig::default();
        let rep = build_output_amplifier(&f, 8, 24, &cfg, &Stream::new(seed), 200).unwrap();
        prop_assert_eq!(rep.verified, Verification::Exhaustive);
        prop_assert!(verify_range_detector(&rep.circuit, &rep.spec).unwrap().passed);
        let again = build_output_amplifier(&f, 8, 24, &cfg, &Stream::new(seed), 200).unwrap();
        prop_assert_eq!(again.circuit, rep.circuit);
        prop_assert_eq!(again.tries, rep.tries);
    }
}
