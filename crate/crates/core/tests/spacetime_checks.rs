use std::collections::BTreeSet;

use bellctx::spacetime::*;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use EventLabel::*;
use Symbol::{Lambda, A, B, X, Y};

fn set(s: &[Symbol]) -> BTreeSet<Symbol> {
    s.iter().copied().collect()
}

fn geometry() -> Geometry {
    default_epr_geometry(2.0).unwrap()
}

fn at(g: &Geometry, l: EventLabel) -> &SpacetimeEvent {
    g.event(l).unwrap()
}

#[test]
fn default_geometry_intervals() {
    let g = geometry();
    let sep = |a, b| interval(at(&g, a), at(&g, b));
    assert_eq!(sep(Source, SettingA), Separation::Spacelike);
    assert_eq!(sep(SettingA, ResultA), Separation::Lightlike);
    assert_eq!(sep(ResultA, ResultB), Separation::Spacelike);
    assert_eq!(sep(SettingB, ResultA), Separation::Spacelike);
    // Results sit on the source's light cone.
    assert_eq!(sep(Source, ResultA), Separation::Lightlike);
    for e in &g.events {
        assert!(in_closed_past(e, at(&g, Verify)), "{}", e.label);
        assert_ne!(interval(e, at(&g, Verify)), Separation::Spacelike);
    }
}

#[test]
fn verify_is_earliest_common_future() {
    let g = geometry();
    let v = at(&g, Verify);
    assert_eq!((v.t, v.pos), (2.0, 0.0));
    // Anything earlier at the same place misses a setting event.
    let earlier = SpacetimeEvent::new(Verify, v.t - 1e-3, v.pos);
    assert!(!in_closed_past(at(&g, SettingA), &earlier));
}

#[test]
fn knowledge_sets_match_the_light_cones() {
    let g = geometry();
    let k = |agent, l| knowledge_at(agent, at(&g, l), &g).known;
    assert_eq!(k(Agent::Alice, ResultA), set(&[Lambda, X, A]));
    assert_eq!(k(Agent::Bob, ResultB), set(&[Lambda, Y, B]));
    assert_eq!(k(Agent::Verifier, Verify), set(&[Lambda, X, Y, A, B]));
    assert_eq!(k(Agent::Alice, SettingA), set(&[X]));
    assert_eq!(k(Agent::Alice, Source), set(&[Lambda]));
}

#[test]
fn availability_of_alices_prediction_of_b() {
    let g = geometry();
    let d: InferenceDescriptor = "P(b|y λ, x a)".parse().unwrap();
    let r = inference_availability(&g, Agent::Alice, &d);
    assert_eq!(r.family, Some(ResultA));
    assert_eq!(r.specific, Some(Verify));
    assert_eq!(r.verification, Some(Verify));
    // Bob's own prediction needs nothing from Alice, but λ only reaches him at his result.
    let own: InferenceDescriptor = "P(b|y lambda)".parse().unwrap();
    let r = inference_availability(&g, Agent::Bob, &own);
    assert_eq!(
        (r.family, r.specific, r.verification),
        (Some(ResultB), Some(ResultB), Some(ResultB))
    );
}

#[test]
fn causality_audit_is_clean() {
    let a = causality_audit(&geometry());
    assert!(a.pairs_checked > 0);
    assert!(a.violations.is_empty(), "{:?}", a.violations);
}

#[test]
fn classifications_survive_random_boosts() {
    let g = geometry();
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for _ in 0..100 {
        let v = rng.gen_range(-0.95..0.95);
        let b = g.boosted(v);
        for (e1, f1) in g.events.iter().zip(&b.events) {
            for (e2, f2) in g.events.iter().zip(&b.events) {
                assert_eq!(
                    interval(e1, e2),
                    interval(f1, f2),
                    "v={v} {} {}",
                    e1.label,
                    e2.label
                );
                let s0 = (e2.t - e1.t).powi(2) - (e2.pos - e1.pos).powi(2);
                let s1 = (f2.t - f1.t).powi(2) - (f2.pos - f1.pos).powi(2);
                assert!((s0 - s1).abs() < 1e-9);
            }
            assert_eq!(
                knowledge_at(Agent::Verifier, e1, &g).known,
                knowledge_at(Agent::Verifier, f1, &b).known
            );
        }
    }
}

#[test]
fn csv_lists_every_event() {
    let csv = geometry().to_csv();
    assert_eq!(csv.lines().next(), Some("label,t,pos"));
    assert!(csv.contains("RESULT_A,1,-1"));
    assert_eq!(csv.lines().count(), 7);
}

proptest! {
    #[test]
    fn knowledge_grows_along_worldlines(d in 0.1f64..100.0) {
        let g = default_epr_geometry(d).unwrap();
        for agent in [Agent::Alice, Agent::Bob, Agent::Verifier] {
            let sets: Vec<_> = agent
                .worldline()
                .iter()
                .map(|&l| knowledge_at(agent, g.event(l).unwrap(), &g).known)
                .collect();
            for w in sets.windows(2) {
                prop_assert!(w[0].is_subset(&w[1]));
            }
        }
        prop_assert!(causality_audit(&g).violations.is_empty());
    }
}
