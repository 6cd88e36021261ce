//! Reward schemes and probability distributions over outcomes.
//!
//! A [`RewardScheme`] fixes an ordered set of outcomes and their point
//! values; an [`OutcomeDistribution`] is a probability vector aligned to
//! that order by index. Distributions are never matched by label.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Tolerance on the probability sum of a distribution.
pub const PROB_SUM_TOL: f64 = 1e-9;
/// Entries below zero by more than this are rejected; smaller negatives
/// are clamped to zero.
pub const PROB_NEG_TOL: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum DistributionError {
    #[error("probability {value} at index {index} is negative beyond tolerance")]
    Negative { index: usize, value: f64 },
    #[error("probabilities sum to {sum}, expected 1 within {PROB_SUM_TOL:e}")]
    BadSum { sum: f64 },
    #[error("distribution has {got} entries, scheme has {expected} outcomes")]
    Misaligned { got: usize, expected: usize },
    #[error("empty distribution")]
    Empty,
}

/// An ordered set of outcomes and their real-valued rewards.
///
/// Outcome order is fixed per scheme; every distribution aligned to the
/// scheme uses the same index order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RewardScheme {
    outcomes: Vec<String>,
    values: Vec<f64>,
}

impl RewardScheme {
    pub fn new(outcomes: Vec<String>, values: Vec<f64>) -> Self {
        assert_eq!(outcomes.len(), values.len(), "outcome/value length mismatch");
        assert!(!values.is_empty(), "reward scheme needs at least one outcome");
        assert!(values.iter().all(|v| v.is_finite()), "reward values must be finite");
        Self { outcomes, values }
    }

    /// The chess default: win/draw/loss worth 1, 1/2, 0.
    pub fn chess() -> Self {
        Self::chess_with(1.0, 0.5)
    }

    /// Win/draw/loss with overridable win and draw values (loss is 0).
    pub fn chess_with(win_value: f64, draw_value: f64) -> Self {
        Self::new(
            vec!["win".into(), "draw".into(), "loss".into()],
            vec![win_value, draw_value, 0.0],
        )
    }

    /// A scheme over plain numeric outcome values, labelled by value.
    pub fn from_values(values: Vec<f64>) -> Self {
        let outcomes = values.iter().map(|v| format!("{v}")).collect();
        Self::new(outcomes, values)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn outcomes(&self) -> &[String] {
        &self.outcomes
    }

    pub fn win_value(&self) -> f64 {
        self.values[0]
    }

    pub fn draw_value(&self) -> f64 {
        self.values.get(1).copied().unwrap_or(0.0)
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Index of the outcome value closest to `v` (exact for scheme members).
    pub fn index_of_value(&self, v: f64) -> usize {
        let mut best = 0;
        let mut dist = f64::INFINITY;
        for (i, &x) in self.values.iter().enumerate() {
            let d = (x - v).abs();
            if d < dist {
                dist = d;
                best = i;
            }
        }
        best
    }
}

/// A probability vector over a scheme's outcomes, index-aligned.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutcomeDistribution {
    probs: Vec<f64>,
}

impl OutcomeDistribution {
    /// Validate and normalize a probability vector.
    ///
    /// Accepts iff every entry is >= -[`PROB_NEG_TOL`] (tiny negatives are
    /// clamped to zero) and the sum is within [`PROB_SUM_TOL`] of 1. The
    /// accepted vector is renormalized so downstream sums are exact.
    pub fn validate(probs: Vec<f64>) -> Result<Self, DistributionError> {
        if probs.is_empty() {
            return Err(DistributionError::Empty);
        }
        let mut clamped = probs;
        for (index, p) in clamped.iter_mut().enumerate() {
            if *p < -PROB_NEG_TOL || !p.is_finite() {
                return Err(DistributionError::Negative { index, value: *p });
            }
            if *p < 0.0 {
                *p = 0.0;
            }
        }
        let sum: f64 = clamped.iter().sum();
        if (sum - 1.0).abs() > PROB_SUM_TOL {
            return Err(DistributionError::BadSum { sum });
        }
        for p in clamped.iter_mut() {
            *p /= sum;
        }
        Ok(Self { probs: clamped })
    }

    /// All mass on one outcome index.
    pub fn degenerate(index: usize, len: usize) -> Self {
        assert!(index < len);
        let mut probs = vec![0.0; len];
        probs[index] = 1.0;
        Self { probs }
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    /// Convex mixture of two aligned distributions.
    pub fn mix(&self, other: &Self, alpha: f64) -> Self {
        assert_eq!(self.len(), other.len());
        let probs = self
            .probs
            .iter()
            .zip(&other.probs)
            .map(|(p, q)| alpha * p + (1.0 - alpha) * q)
            .collect();
        Self { probs }
    }

    /// Componentwise max absolute difference.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.probs
            .iter()
            .zip(&other.probs)
            .map(|(p, q)| (p - q).abs())
            .fold(0.0, f64::max)
    }
}

/// Expected game points of a distribution under a scheme.
///
/// Errors if the distribution is not index-aligned with the scheme.
pub fn expected_value(
    dist: &OutcomeDistribution,
    scheme: &RewardScheme,
) -> Result<f64, DistributionError> {
    if dist.len() != scheme.len() {
        return Err(DistributionError::Misaligned {
            got: dist.len(),
            expected: scheme.len(),
        });
    }
    Ok(dist
        .probs
        .iter()
        .zip(scheme.values())
        .map(|(p, v)| p * v)
        .sum())
}
