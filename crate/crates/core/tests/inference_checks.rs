//! Condition checkers on quantum, local and hand-built tables. Expected values come
//! from the closed form `P(ab|xy) = (1 − ab·cos(x−y))/4` for the singlet (itself
//! validated against Born-rule matrices in `quantum_oracles.rs`) and from
//! `(1 + abc·cos(u+v+w))/8` for the GHZ state.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use bellctx::inference::{
    check_all, check_el, check_factorization, check_pc, sixteen_outcome_space, ConditionalTable,
};
use bellctx::theories::{table_from_lhv, table_from_quantum, LocalHvModel, QuantumModel};
use bellctx::{Error, OutcomeDistribution, StateVector};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const TOL: f64 = 1e-9;

fn singlet_table(alice: &[f64], bob: &[f64]) -> ConditionalTable {
    table_from_quantum(&QuantumModel::two_party(StateVector::singlet(), alice, bob).unwrap())
        .unwrap()
}

fn singlet_closed_form(a: i8, b: i8, x: f64, y: f64) -> f64 {
    (1.0 - f64::from(a * b) * (x - y).cos()) / 4.0
}

fn ghz_table() -> ConditionalTable {
    table_from_quantum(&QuantumModel::xy_settings(StateVector::ghz()).unwrap()).unwrap()
}

#[test]
fn singlet_table_matches_closed_form() {
    let angles = [0.0, 0.4, FRAC_PI_2, 2.5, -1.0];
    let t = singlet_table(&angles, &angles);
    for (i, &x) in angles.iter().enumerate() {
        for (j, &y) in angles.iter().enumerate() {
            for (o, p) in t.cell(0, &[i, j]).unwrap().iter() {
                assert!((p - singlet_closed_form(o[0], o[1], x, y)).abs() < 1e-12);
            }
        }
    }
}

#[test]
fn singlet_marginals_are_uniform() {
    let t = singlet_table(&[0.0, 1.0], &[0.3, -0.7]);
    for s in t.scenario().setting_tuples() {
        for keep in [0usize, 1] {
            let m = t.marginal(0, &s, &[keep]).unwrap();
            assert!((m.prob(&[1]) - 0.5).abs() < 1e-12);
            assert!((m.prob(&[-1]) - 0.5).abs() < 1e-12);
        }
    }
}

#[test]
fn ghz_charlie_marginal_is_uniform() {
    let t = ghz_table();
    // settings X=0, Y=1 for each party: (0, π/2, π/2) is (X, Y, Y)
    let m = t.marginal(0, &[0, 1, 1], &[2]).unwrap();
    assert!((m.prob(&[1]) - 0.5).abs() < 1e-12);
}

#[test]
fn singlet_equal_settings_anticorrelate() {
    let t = singlet_table(&[0.7], &[0.7]);
    let bob = t.condition_on(0, &[0, 0], &[(0, 1)]).unwrap();
    assert!(bob.prob(&[1]).abs() < 1e-12);
    assert!((bob.prob(&[-1]) - 1.0).abs() < 1e-12);
}

#[test]
fn ghz_two_results_predict_the_third() {
    let t = ghz_table();
    // (u, v, w) = (0, π/2, π/2): u+v+w = π, so abc = −1 with certainty.
    for a in [1i8, -1] {
        for b in [1i8, -1] {
            let c_dist = t.condition_on(0, &[0, 1, 1], &[(0, a), (1, b)]).unwrap();
            for c in [1i8, -1] {
                let expected = (1.0 + f64::from(a * b * c) * PI.cos()) / 2.0;
                assert!((c_dist.prob(&[c]) - expected).abs() < 1e-12);
                assert!(expected == 0.0 || expected == 1.0);
            }
        }
    }
}

#[test]
fn zero_probability_conditioning_is_typed() {
    let t = singlet_table(&[0.0], &[0.0]);
    let err = t.condition_on(0, &[0, 0], &[(0, 1), (1, 1)]).unwrap_err();
    assert!(matches!(err, Error::InvalidScenario(_)));
    // P(a=+1, b=+1) = 0 at equal settings; conditioning Charlie-free table on it:
    let d =
        OutcomeDistribution::from_fn(3, |o| if o[0] == o[1] { 0.0 } else { 0.125 * 2.0 }).unwrap();
    assert!(matches!(
        d.condition(&[(0, 1), (1, 1)]),
        Err(Error::ZeroProbability { .. })
    ));
}

#[test]
fn singlet_pc_violation_at_quarter_pi() {
    let t = singlet_table(&[FRAC_PI_4], &[0.0]);
    let oracle = {
        // max over a, b of |P(b|a) − P(b)| from the closed form.
        let mut worst: f64 = 0.0;
        for a in [1i8, -1] {
            let pa: f64 = [1i8, -1]
                .iter()
                .map(|&b| singlet_closed_form(a, b, FRAC_PI_4, 0.0))
                .sum();
            for b in [1i8, -1] {
                let pb: f64 = [1i8, -1]
                    .iter()
                    .map(|&a2| singlet_closed_form(a2, b, FRAC_PI_4, 0.0))
                    .sum();
                worst = worst.max((singlet_closed_form(a, b, FRAC_PI_4, 0.0) / pa - pb).abs());
            }
        }
        worst
    };
    assert!((oracle - FRAC_PI_4.cos() / 2.0).abs() < 1e-15);
    let r = check_pc(&t, TOL).unwrap();
    assert!(!r.holds);
    assert!((r.max_violation - 0.353_553_390_593_273_8).abs() < 1e-9);
    assert!(r.witness.is_some());
}

#[test]
fn singlet_factorization_violation_at_quarter_pi() {
    // |P(++) − P(+)P(+)| = |(1 − cos π/4)/4 − 1/4| = cos(π/4)/4.
    let oracle = (singlet_closed_form(1, 1, FRAC_PI_4, 0.0) - 0.25).abs();
    assert!((oracle - 0.176_776_695_296_636_9).abs() < 1e-15);
    let r = check_factorization(&singlet_table(&[FRAC_PI_4], &[0.0]), TOL).unwrap();
    assert!(!r.holds);
    assert!((r.max_violation - oracle).abs() < 1e-12);
}

#[test]
fn singlet_el_holds_pc_fails_unless_orthogonal() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    for _ in 0..50 {
        let x: f64 = rng.gen_range(-PI..PI);
        let y: f64 = rng.gen_range(-PI..PI);
        let t = singlet_table(&[x], &[y]);
        assert!(check_el(&t, TOL).unwrap().max_violation < 1e-12);
        let pc = check_pc(&t, TOL).unwrap();
        assert!((pc.max_violation - (x - y).cos().abs() / 2.0).abs() < 1e-12);
    }
    for (x, y) in [
        (FRAC_PI_2, 0.0),
        (0.3, 0.3 + FRAC_PI_2),
        (1.0, 1.0 - 3.0 * FRAC_PI_2),
    ] {
        let pc = check_pc(&singlet_table(&[x], &[y]), TOL).unwrap();
        assert!(pc.holds && pc.max_violation < 1e-12, "{x} {y}");
    }
}

#[test]
fn ghz_el_holds_pc_fails_by_half() {
    let t = ghz_table();
    assert!(check_el(&t, TOL).unwrap().max_violation < 1e-12);
    let pc = check_pc(&t, TOL).unwrap();
    assert!((pc.max_violation - 0.5).abs() < 1e-12);
}

#[test]
fn deterministic_lhv_passes_pc_exactly() {
    let m = LocalHvModel::from_strategy(
        &bellctx::theories::DeterministicStrategy::parse("a=+1-1,b=-1+1", &[2, 2]).unwrap(),
    );
    let t = table_from_lhv(&m).unwrap();
    let s = check_all(&t, TOL).unwrap();
    assert_eq!(s.pc.max_violation, 0.0);
    assert_eq!(s.factorization.max_violation, 0.0);
    assert!(s.el.holds && s.pc.holds && s.factorization.holds);
}

#[test]
fn chain_rule_on_quantum_tables() {
    for t in [singlet_table(&[0.0, 1.0], &[0.2, 2.0]), ghz_table()] {
        for s in t.scenario().setting_tuples() {
            assert!(t.verify_chain_rule(0, &s).unwrap() < 1e-12);
            // The EL-reduced decompositions also hold: quantum tables are no-signaling.
            assert!(t.verify_local_chain_rule(0, &s).unwrap() < 1e-12);
        }
    }
}

#[test]
fn sixteen_outcome_space_uniform_settings() {
    let t = singlet_table(&[0.0, FRAC_PI_2], &[FRAC_PI_4, -FRAC_PI_4]);
    let s = sixteen_outcome_space(&t, &[0.5, 0.5], &[0.5, 0.5]).unwrap();
    assert_eq!(s.entries.len(), 16);
    assert!((s.total() - 1.0).abs() < 1e-12);
    for e in &s.entries {
        let source = t.cell(0, &[e.x, e.y]).unwrap().prob(&[e.a, e.b]);
        assert!((e.probability - source / 4.0).abs() < 1e-12);
    }
    for x in 0..2 {
        for y in 0..2 {
            let back = s.outcomes_given(x, y).unwrap();
            assert!(back.linf_distance(t.cell(0, &[x, y]).unwrap()).0 < 1e-12);
        }
    }
    // Entropy: 2 bits of settings plus the outcome entropy, which at these
    // angles is H(p, p, q, q) with p = (1 − cos(π/4))/4 or (1 + cos(π/4))/4.
    let (p, q) = ((1.0 - FRAC_PI_4.cos()) / 4.0, (1.0 + FRAC_PI_4.cos()) / 4.0);
    let h_out = -2.0 * p * p.log2() - 2.0 * q * q.log2();
    assert!((s.entropy_bits() - (2.0 + h_out)).abs() < 1e-12);
}

fn random_two_or_three_party(rng: &mut ChaCha8Rng) -> ConditionalTable {
    let parties = rng.gen_range(2..=3);
    let settings: Vec<usize> = (0..parties).map(|_| rng.gen_range(1..=3)).collect();
    let lambdas = rng.gen_range(1..=3);
    ConditionalTable::random(rng, &settings, lambdas).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn chain_rule_is_an_identity(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = random_two_or_three_party(&mut rng);
        for l in 0..t.scenario().lambdas().len() {
            for s in t.scenario().setting_tuples() {
                prop_assert!(t.verify_chain_rule(l, &s).unwrap() < 1e-12);
            }
        }
    }

    #[test]
    fn local_models_pass_every_check(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let parties = rng.gen_range(2..=3);
        let settings: Vec<usize> = (0..parties).map(|_| rng.gen_range(1..=3)).collect();
        let k = rng.gen_range(1..=4);
        let m = LocalHvModel::random(&mut rng, &settings, k).unwrap();
        let s = check_all(&table_from_lhv(&m).unwrap(), TOL).unwrap();
        prop_assert!(s.el.max_violation < 1e-12);
        prop_assert!(s.pc.max_violation < 1e-12);
        prop_assert!(s.factorization.max_violation < 1e-12);
        prop_assert!(s.implication_consistent);
    }

    #[test]
    fn factorization_failures_come_with_el_or_pc_failures(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = random_two_or_three_party(&mut rng);
        let s = check_all(&t, TOL).unwrap();
        prop_assert!(s.implication_consistent);
        if !s.factorization.holds {
            prop_assert!(!s.el.holds || !s.pc.holds);
        }
    }

    #[test]
    fn random_quantum_states_never_signal(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.gen_range(2..=3);
        let psi = StateVector::random(n, &mut rng).unwrap();
        let settings: Vec<Vec<f64>> = (0..n).map(|_| (0..2).map(|_| rng.gen_range(-PI..PI)).collect()).collect();
        let settings = settings
            .iter()
            .map(|a| a.iter().enumerate().map(|(i, &t)| bellctx::inference::Setting::angle(format!("s{i}"), t)).collect())
            .collect();
        let t = table_from_quantum(&QuantumModel::new(psi, settings).unwrap()).unwrap();
        prop_assert!(check_el(&t, TOL).unwrap().max_violation < 1e-12);
    }

    #[test]
    fn conditioning_never_yields_nan_or_negative(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = random_two_or_three_party(&mut rng);
        let s = t.scenario().setting_tuples()[0].clone();
        match t.condition_on(0, &s, &[(0, 1)]) {
            Ok(d) => prop_assert!(d.probs().iter().all(|p| p.is_finite() && *p >= 0.0)),
            Err(e) => prop_assert!(matches!(e, Error::ZeroProbability { .. }), "unexpected error"),
        }
    }
}
