//! Distributions over tuples of ±1 outcomes.

use std::collections::BTreeMap;
use std::fmt;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::tolerance;

/// Index of an outcome tuple. Party `k` of `arity` occupies bit `arity - 1 - k`;
/// a set bit means −1, so index 0 is the all-(+1) outcome.
pub fn outcome_index(outcome: &[i8]) -> usize {
    outcome
        .iter()
        .fold(0, |acc, &v| (acc << 1) | usize::from(v < 0))
}

/// Inverse of [`outcome_index`].
pub fn index_outcome(index: usize, arity: usize) -> Vec<i8> {
    (0..arity)
        .map(|k| {
            if (index >> (arity - 1 - k)) & 1 == 1 {
                -1
            } else {
                1
            }
        })
        .collect()
}

/// Every ±1 tuple of the given length, in index order.
pub fn all_outcomes(arity: usize) -> impl Iterator<Item = Vec<i8>> {
    (0..1usize << arity).map(move |i| index_outcome(i, arity))
}

/// Formats an outcome tuple as `"+1-1+1"`.
pub fn outcome_key(outcome: &[i8]) -> String {
    outcome
        .iter()
        .map(|&v| if v > 0 { "+1" } else { "-1" })
        .collect()
}

/// Parses `"+1-1"` back into a tuple.
pub fn parse_outcome_key(key: &str) -> Option<Vec<i8>> {
    let bytes = key.as_bytes();
    if bytes.is_empty() || !bytes.len().is_multiple_of(2) {
        return None;
    }
    bytes
        .chunks(2)
        .map(|c| match c {
            b"+1" => Some(1),
            b"-1" => Some(-1),
            _ => None,
        })
        .collect()
}

/// A normalized probability distribution over `arity`-tuples of ±1 outcomes.
#[derive(Debug, Clone, PartialEq)]
pub struct OutcomeDistribution {
    arity: usize,
    probs: Vec<f64>,
}

impl OutcomeDistribution {
    /// Builds a distribution from probabilities in index order (see [`outcome_index`]).
    ///
    /// Negative entries above `-1e-14` are clamped to zero; anything lower, or a
    /// total differing from one by more than `1e-12`, is rejected.
    pub fn new(arity: usize, mut probs: Vec<f64>) -> Result<Self> {
        if arity == 0 {
            return Err(Error::InvalidWeights {
                what: "outcome distribution".into(),
                reason: "arity must be positive".into(),
            });
        }
        if probs.len() != 1 << arity {
            return Err(Error::InvalidWeights {
                what: "outcome distribution".into(),
                reason: format!("expected {} entries, got {}", 1 << arity, probs.len()),
            });
        }
        for (i, p) in probs.iter_mut().enumerate() {
            if !p.is_finite() || *p < -tolerance::NEGATIVE_CLAMP {
                return Err(Error::InvalidWeights {
                    what: "outcome distribution".into(),
                    reason: format!("entry {} = {p}", outcome_key(&index_outcome(i, arity))),
                });
            }
            if *p < 0.0 {
                *p = 0.0;
            }
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > tolerance::SCALAR {
            return Err(Error::InvalidWeights {
                what: "outcome distribution".into(),
                reason: format!("probabilities sum to {total}"),
            });
        }
        Ok(Self { arity, probs })
    }

    pub fn from_fn(arity: usize, mut f: impl FnMut(&[i8]) -> f64) -> Result<Self> {
        let probs = all_outcomes(arity).map(|o| f(&o)).collect();
        Self::new(arity, probs)
    }

    /// Point mass on one outcome tuple.
    pub fn point(outcome: &[i8]) -> Self {
        let arity = outcome.len();
        let mut probs = vec![0.0; 1 << arity];
        probs[outcome_index(outcome)] = 1.0;
        Self { arity, probs }
    }

    pub fn uniform(arity: usize) -> Self {
        let n = 1usize << arity;
        Self {
            arity,
            probs: vec![1.0 / n as f64; n],
        }
    }

    /// Product of independent distributions, in party order.
    pub fn product(factors: &[OutcomeDistribution]) -> Self {
        let arity = factors.iter().map(|f| f.arity).sum();
        let probs = all_outcomes(arity)
            .map(|o| {
                let mut offset = 0;
                factors
                    .iter()
                    .map(|f| {
                        let p = f.prob(&o[offset..offset + f.arity]);
                        offset += f.arity;
                        p
                    })
                    .product()
            })
            .collect();
        Self { arity, probs }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn prob(&self, outcome: &[i8]) -> f64 {
        debug_assert_eq!(outcome.len(), self.arity);
        self.probs[outcome_index(outcome)]
    }

    /// Probabilities in index order.
    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn iter(&self) -> impl Iterator<Item = (Vec<i8>, f64)> + '_ {
        self.probs
            .iter()
            .enumerate()
            .map(move |(i, &p)| (index_outcome(i, self.arity), p))
    }

    /// Sums out every position not listed in `keep`; the result follows `keep`'s order.
    pub fn marginal(&self, keep: &[usize]) -> Result<Self> {
        if keep.is_empty() {
            return Err(Error::InvalidScenario(
                "marginal must keep at least one party".into(),
            ));
        }
        for (i, &k) in keep.iter().enumerate() {
            if k >= self.arity || keep[..i].contains(&k) {
                return Err(Error::InvalidScenario(format!(
                    "bad party index {k} in marginal over {} parties",
                    self.arity
                )));
            }
        }
        let mut probs = vec![0.0; 1 << keep.len()];
        for (o, p) in self.iter() {
            let sub: Vec<i8> = keep.iter().map(|&k| o[k]).collect();
            probs[outcome_index(&sub)] += p;
        }
        Ok(Self {
            arity: keep.len(),
            probs,
        })
    }

    /// Probability that every `(position, value)` pair in `event` occurs.
    pub fn event_probability(&self, event: &[(usize, i8)]) -> f64 {
        self.iter()
            .filter(|(o, _)| event.iter().all(|&(k, v)| o[k] == v))
            .map(|(_, p)| p)
            .sum()
    }

    /// Conditional distribution of the positions not fixed by `given`, in increasing order.
    pub fn condition(&self, given: &[(usize, i8)]) -> Result<Self> {
        for (i, &(k, v)) in given.iter().enumerate() {
            if k >= self.arity || v.abs() != 1 || given[..i].iter().any(|&(j, _)| j == k) {
                return Err(Error::InvalidScenario(format!(
                    "bad conditioning assignment ({k}, {v}) over {} parties",
                    self.arity
                )));
            }
        }
        let rest: Vec<usize> = (0..self.arity)
            .filter(|k| !given.iter().any(|&(j, _)| j == *k))
            .collect();
        if rest.is_empty() {
            return Err(Error::InvalidScenario(
                "conditioning fixes every party; nothing left to predict".into(),
            ));
        }
        let norm = self.event_probability(given);
        if norm <= tolerance::ZERO_PROBABILITY {
            return Err(Error::ZeroProbability { probability: norm });
        }
        let mut probs = vec![0.0; 1 << rest.len()];
        for (o, p) in self.iter() {
            if given.iter().all(|&(k, v)| o[k] == v) {
                let sub: Vec<i8> = rest.iter().map(|&k| o[k]).collect();
                probs[outcome_index(&sub)] += p / norm;
            }
        }
        Ok(Self {
            arity: rest.len(),
            probs,
        })
    }

    /// Expectation of the product of all outcomes.
    pub fn parity_expectation(&self) -> f64 {
        self.iter()
            .map(|(o, p)| p * f64::from(o.iter().product::<i8>()))
            .sum()
    }

    /// Shannon entropy in bits.
    pub fn entropy_bits(&self) -> f64 {
        self.probs
            .iter()
            .filter(|&&p| p > 0.0)
            .map(|&p| -p * p.log2())
            .sum()
    }

    /// L∞ distance and the outcome tuple where it is attained.
    pub fn linf_distance(&self, other: &Self) -> (f64, Vec<i8>) {
        debug_assert_eq!(self.arity, other.arity);
        let (i, d) = self
            .probs
            .iter()
            .zip(&other.probs)
            .map(|(a, b)| (a - b).abs())
            .enumerate()
            .fold(
                (0, 0.0),
                |best, (i, d)| if d > best.1 { (i, d) } else { best },
            );
        (d, index_outcome(i, self.arity))
    }
}

impl fmt::Display for OutcomeDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .iter()
            .map(|(o, p)| format!("{}: {p:.6}", outcome_key(&o)))
            .collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

impl Serialize for OutcomeDistribution {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let map: BTreeMap<String, f64> = self.iter().map(|(o, p)| (outcome_key(&o), p)).collect();
        map.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for OutcomeDistribution {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let map = BTreeMap::<String, f64>::deserialize(deserializer)?;
        let arity = map
            .keys()
            .next()
            .map(|k| k.len() / 2)
            .ok_or_else(|| D::Error::custom("empty outcome map"))?;
        let mut probs = vec![0.0; 1 << arity];
        for (k, p) in &map {
            let o = parse_outcome_key(k)
                .filter(|o| o.len() == arity)
                .ok_or_else(|| D::Error::custom(format!("bad outcome key {k:?}")))?;
            probs[outcome_index(&o)] = *p;
        }
        Self::new(arity, probs).map_err(D::Error::custom)
    }
}
