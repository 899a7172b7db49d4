//! Finite-shot estimates of conditional tables.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};

use crate::distribution::OutcomeDistribution;
use crate::error::{Error, Result};
use crate::inference::ConditionalTable;

/// Replaces every cell with empirical frequencies from `shots` draws.
///
/// Cell `k` (λ-major, then setting tuples in scenario order) uses ChaCha stream
/// `k` of a generator seeded with `seed`, so the result depends only on
/// `(seed, shots, table)` and not on evaluation order.
pub fn sample_table(table: &ConditionalTable, shots: u64, seed: u64) -> Result<ConditionalTable> {
    if shots == 0 {
        return Err(Error::InvalidModel(
            "sampling needs at least one shot".into(),
        ));
    }
    let per_lambda = table.scenario().setting_tuple_count();
    let tuples = table.scenario().setting_tuples();
    ConditionalTable::from_fn(table.scenario().clone(), |lambda, settings| {
        let flat = tuples
            .iter()
            .position(|t| t == settings)
            .expect("tuple from scenario");
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream((lambda * per_lambda + flat) as u64);
        let counts = multinomial(&mut rng, shots, table.cell(lambda, settings)?.probs());
        OutcomeDistribution::new(
            settings.len(),
            counts.iter().map(|&c| c as f64 / shots as f64).collect(),
        )
    })
}

/// Multinomial draw by successive conditional binomials.
fn multinomial(rng: &mut ChaCha8Rng, shots: u64, probs: &[f64]) -> Vec<u64> {
    let mut remaining = shots;
    let mut mass_left = 1.0;
    let mut counts = Vec::with_capacity(probs.len());
    for (i, &p) in probs.iter().enumerate() {
        if i + 1 == probs.len() {
            counts.push(remaining);
            break;
        }
        let q = if mass_left > 0.0 {
            (p / mass_left).clamp(0.0, 1.0)
        } else {
            0.0
        };
        let k = if remaining == 0 || q == 0.0 {
            0
        } else {
            Binomial::new(remaining, q)
                .expect("q in [0, 1]")
                .sample(rng)
        };
        counts.push(k);
        remaining -= k;
        mass_left -= p;
    }
    counts
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::inference::{ConditionalTable, ScenarioSpec, Setting};

    fn table() -> ConditionalTable {
        let settings = vec![vec![Setting::labeled("x")], vec![Setting::labeled("y")]];
        let sc = ScenarioSpec::single_lambda(settings, "l").unwrap();
        ConditionalTable::from_fn(sc, |_, _| {
            OutcomeDistribution::new(2, vec![0.1, 0.2, 0.3, 0.4])
        })
        .unwrap()
    }

    #[test]
    fn same_seed_same_sample() {
        let t = table();
        assert_eq!(
            sample_table(&t, 1000, 5).unwrap(),
            sample_table(&t, 1000, 5).unwrap()
        );
        assert_ne!(
            sample_table(&t, 1000, 5).unwrap(),
            sample_table(&t, 1000, 6).unwrap()
        );
    }

    #[test]
    fn point_mass_samples_exactly() {
        let settings = vec![vec![Setting::labeled("x")], vec![Setting::labeled("y")]];
        let sc = ScenarioSpec::single_lambda(settings, "l").unwrap();
        let t =
            ConditionalTable::from_fn(sc, |_, _| Ok(OutcomeDistribution::point(&[-1, 1]))).unwrap();
        assert_eq!(sample_table(&t, 17, 1).unwrap(), t);
    }

    #[test]
    fn zero_shots_rejected() {
        assert!(sample_table(&table(), 0, 1).is_err());
    }
}
