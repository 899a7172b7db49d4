//! CHSH, GHZ and sampling results, against closed forms and brute-force scans.

use std::f64::consts::{FRAC_PI_2, PI, SQRT_2};

use bellctx::distribution::all_outcomes;
use bellctx::inference::{check_all, check_factorization, Setting};
use bellctx::quantum::ghz_parity_state;
use bellctx::theories::*;
use bellctx::StateVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn xy_angles() -> [[f64; 3]; 8] {
    let mut out = [[0.0; 3]; 8];
    for (i, t) in out.iter_mut().enumerate() {
        for (p, angle) in t.iter_mut().enumerate() {
            *angle = if i >> (2 - p) & 1 == 1 {
                FRAC_PI_2
            } else {
                0.0
            };
        }
    }
    out
}

#[test]
fn deterministic_enumeration_reaches_exactly_two() {
    let all = enumerate_deterministic_chsh().unwrap();
    assert_eq!(all.len(), 16);
    // Brute force: S = a1b1 + a1b2 + a2b1 − a2b2 over ±1 values.
    let mut oracle: f64 = 0.0;
    for bits in 0..16u8 {
        let v = |k: u8| if bits >> k & 1 == 1 { -1.0_f64 } else { 1.0 };
        let (a1, a2, b1, b2) = (v(0), v(1), v(2), v(3));
        oracle = oracle.max((a1 * b1 + a1 * b2 + a2 * b1 - a2 * b2).abs());
    }
    let best = all.iter().map(|(_, s)| *s).fold(0.0, f64::max);
    assert_eq!(best, 2.0);
    assert_eq!(oracle, 2.0);
}

#[test]
fn random_mixtures_respect_classical_bound() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..1000 {
        let m = random_deterministic_mixture(&mut rng).unwrap();
        let r = chsh(&table_from_lhv(&m).unwrap(), 0, 1, 0, 1).unwrap();
        assert!(r.s_max_abs <= CLASSICAL_BOUND + 1e-12, "{}", r.s_max_abs);
    }
}

#[test]
fn opposite_strategies_correlate_perfectly_yet_each_factorizes() {
    let s = |t: &str| DeterministicStrategy::parse(t, &[2, 2]).unwrap();
    let m = LocalHvModel::mixture(&[s("a=+1,b=+1"), s("a=-1,b=-1")], &[0.5, 0.5]).unwrap();
    let t = table_from_lhv(&m).unwrap();
    for x in 0..2 {
        for y in 0..2 {
            assert_eq!(correlation(&t, x, y).unwrap(), 1.0);
        }
    }
    // Per λ every check passes; averaging over λ hides λ and breaks factorization.
    assert!(check_all(&t, 1e-9).unwrap().factorization.holds);
    let avg = t.coarse_grained("avg").unwrap();
    let f = check_factorization(&avg, 1e-9).unwrap();
    assert!((f.max_violation - 0.25).abs() < 1e-15);
}

#[test]
fn singlet_canonical_angles_hit_tsirelson() {
    let r = singlet_chsh(SINGLET_OPTIMAL_ANGLES).unwrap();
    assert!((r.s - (-2.0 * SQRT_2)).abs() < 1e-9);
    assert!((r.s_max_abs - TSIRELSON_BOUND).abs() < 1e-9);
    assert!(r.exceeds_classical() && r.within_quantum());
    assert!(r.to_string().contains("exceeds classical bound 2"));
}

#[test]
fn tsirelson_search_finds_quarter_pi_family() {
    let t = tsirelson_search().unwrap();
    assert!((t.s_max_abs - 2.0 * SQRT_2).abs() < 1e-9);
    let theta = t.theta.min(PI - t.theta);
    assert!((theta - PI / 4.0).abs() < 1e-4, "{}", t.theta);
}

#[test]
fn random_angles_stay_below_tsirelson() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let best = random_angle_sweep(&mut rng, 2000).unwrap();
    assert!(best <= TSIRELSON_BOUND + 1e-9);
    assert!(best > CLASSICAL_BOUND);
}

#[test]
fn sweeps_have_expected_shape() {
    let rows = chsh_sweep(8).unwrap();
    assert_eq!(rows.len(), 9);
    assert!(rows.windows(2).all(|w| w[1].s_running >= w[0].s_running));
    for r in &rows {
        assert!((r.e - (-(r.x - r.y).cos())).abs() < 1e-12);
    }
    let csv = sweep_csv(&rows);
    assert!(csv.starts_with(SWEEP_CSV_HEADER));
    assert_eq!(csv.lines().count(), 10);
    let pc = pc_sweep(4).unwrap();
    for (x, y, v) in &pc {
        assert!((v - (x - y).cos().abs() / 2.0).abs() < 1e-12);
    }
    assert!(pc_sweep_csv(&pc).starts_with(PC_SWEEP_CSV_HEADER));
}

#[test]
fn ghz_table_matches_closed_form_verbatim() {
    // The standard GHZ state (|000⟩ + |111⟩)/√2 has <XXX> = +1.
    let model = QuantumModel::xy_settings(StateVector::ghz()).unwrap();
    let t = table_from_quantum(&model).unwrap();
    for (i, angles) in xy_angles().iter().enumerate() {
        let s = [i >> 2 & 1, i >> 1 & 1, i & 1];
        for o in all_outcomes(3) {
            let abc = f64::from(o[0] * o[1] * o[2]);
            let expected = (1.0 + abc * (angles[0] + angles[1] + angles[2]).cos()) / 8.0;
            let got = t.cell(0, &s).unwrap().prob(&o);
            assert!((got - expected).abs() < 1e-12, "{angles:?} {o:?}");
        }
    }
    let ladder = ghz_conditional_ladder(&model).unwrap();
    assert_eq!(ladder.parity_sign, 1.0);
    assert!(ladder.holds, "{}", ladder.max_residual);
}

#[test]
fn psi_in_closed_form_carries_minus_sign() {
    let psi = ghz_parity_state();
    assert_eq!(parity_sign(&psi).unwrap(), -1.0);
    let t = table_from_quantum(&QuantumModel::xy_settings(psi.clone()).unwrap()).unwrap();
    for (i, angles) in xy_angles().iter().enumerate() {
        let s = [i >> 2 & 1, i >> 1 & 1, i & 1];
        for o in all_outcomes(3) {
            let expected = ghz_closed_form(-1.0, [o[0], o[1], o[2]], *angles);
            assert!((t.cell(0, &s).unwrap().prob(&o) - expected).abs() < 1e-12);
        }
    }
    let ladder = ghz_conditional_ladder(&QuantumModel::xy_settings(psi).unwrap()).unwrap();
    assert!(ladder.holds);
    // 8 tuples × 8 outcomes × 3 targets × 4 conditioning sets, minus zero-probability ones.
    assert!(ladder.rows.len() <= 768);
    let singles: Vec<_> = ladder
        .rows
        .iter()
        .filter(|r| r.descriptor.matches(['a', 'b', 'c']).count() <= 2)
        .collect();
    assert!(singles.iter().all(|r| (r.value - 0.5).abs() < 1e-12));
    // |cos(u+v+w)|/2: 1/2 for XXX, XYY, YXY, YYX and 0 when an odd number of Y.
    for (labels, v) in &ladder.pc_violation {
        let ys = labels.iter().filter(|l| l.as_str() == "Y").count();
        let expected = if ys % 2 == 0 { 0.5 } else { 0.0 };
        assert!((v - expected).abs() < 1e-12, "{labels:?} {v}");
    }
}

#[test]
fn closed_form_extends_to_arbitrary_angles() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let triples: Vec<[f64; 3]> = (0..20)
        .map(|_| [(); 3].map(|_| rng.gen_range(-PI..PI)))
        .collect();
    assert!(ghz_extrapolation_residual(&StateVector::ghz(), &triples).unwrap() < 1e-12);
    assert!(ghz_extrapolation_residual(&ghz_parity_state(), &triples).unwrap() < 1e-12);
}

#[test]
fn psi_in_parity_contradiction() {
    let r = ghz_parity_check(&QuantumModel::xy_settings(ghz_parity_state()).unwrap()).unwrap();
    let certain: Vec<_> = r
        .rows
        .iter()
        .map(|row| (row.word.as_str(), row.certain()))
        .collect();
    assert_eq!(
        certain,
        [
            ("XYY", Some(1)),
            ("YXY", Some(1)),
            ("YYX", Some(1)),
            ("XXX", Some(-1))
        ]
    );
    assert_eq!(r.assignments_scanned, 64);
    // Independent count: six free ±1 values with three parity constraints leave 8.
    let mut consistent = 0;
    for bits in 0..64u8 {
        let v = |k: u8| if bits >> k & 1 == 1 { -1i8 } else { 1 };
        let (xa, ya, xb, yb, xc, yc) = (v(0), v(1), v(2), v(3), v(4), v(5));
        if xa * yb * yc == 1 && ya * xb * yc == 1 && ya * yb * xc == 1 {
            consistent += 1;
            assert_eq!(xa * xb * xc, 1);
        }
    }
    assert_eq!(r.assignments_consistent, consistent);
    assert_eq!(consistent, 8);
    assert!(r.consistent_force_xxx_plus && r.quantum_certainties && r.contradiction);
}

#[test]
fn local_models_never_show_the_ghz_contradiction() {
    let xy = || vec![Setting::labeled("X"), Setting::labeled("Y")];
    for strategy in DeterministicStrategy::enumerate(&[2, 2, 2]) {
        let m = LocalHvModel::from_strategy(&strategy);
        let m = LocalHvModel::new(vec![xy(), xy(), xy()], m.entries().to_vec()).unwrap();
        let r = ghz_parity_table(&table_from_lhv(&m).unwrap()).unwrap();
        assert!(!r.contradiction);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..50 {
        let m = LocalHvModel::random(&mut rng, &[2, 2, 2], 3).unwrap();
        let m = LocalHvModel::new(vec![xy(), xy(), xy()], m.entries().to_vec()).unwrap();
        assert!(
            !ghz_parity_table(&table_from_lhv(&m).unwrap())
                .unwrap()
                .contradiction
        );
    }
}

#[test]
fn lhv_json_roundtrip_and_path_errors() {
    let text = r#"[
        {"weight": 0.25, "responses": {"A": {"x1": {"+1": 1.0}, "x2": {"+1": 0.5}},
                                       "B": {"y1": {"+1": 0.0}, "y2": {"+1": 0.2, "-1": 0.8}}}},
        {"weight": 0.75, "responses": {"A": {"x1": {"+1": 0.3}, "x2": {"+1": 0.9}},
                                       "B": {"y1": {"+1": 1.0}, "y2": {"+1": 0.6}}}}
    ]"#;
    let m = LocalHvModel::from_json(text).unwrap();
    let again = LocalHvModel::from_json(&m.to_json()).unwrap();
    assert_eq!(m, again);
    let bad = text.replace("\"-1\": 0.8", "\"-1\": 0.7");
    let err = LocalHvModel::from_json(&bad).unwrap_err().to_string();
    assert!(err.contains("entry[0].responses.B.y2"), "{err}");
}

#[test]
fn sampled_frequencies_within_five_sigma() {
    let t = table_from_quantum(
        &QuantumModel::two_party(StateVector::singlet(), &[0.0], &[PI / 4.0]).unwrap(),
    )
    .unwrap();
    let shots = 1_000_000u64;
    let sampled = sample_table(&t, shots, 2024).unwrap();
    for (o, p) in t.cell(0, &[0, 0]).unwrap().iter() {
        let f = sampled.cell(0, &[0, 0]).unwrap().prob(&o);
        let sigma = (p * (1.0 - p) / shots as f64).sqrt();
        assert!((f - p).abs() <= 5.0 * sigma, "{o:?}: {f} vs {p}");
    }
    // Same seed, same counts.
    assert_eq!(sampled, sample_table(&t, shots, 2024).unwrap());
}
