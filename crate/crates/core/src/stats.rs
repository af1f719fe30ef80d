//! Exact and empirical distribution comparison.
//!
//! Perfect zero-knowledge is an identity of distributions, so the tests
//! that claim it must not round: outcome probabilities are exact
//! rationals over canonical outcome byte strings, and total variation
//! distances come out as exact fractions. Floating point appears only in
//! the chi-square path, which backs the sampler uniformity checks.

use std::collections::BTreeMap;

use num::bigint::BigInt;
use num::rational::BigRational;
use num::traits::{One, Signed, Zero};
use statrs::distribution::{ChiSquared, ContinuousCDF};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StatsError {
    #[error("probabilities sum to {0}, not 1")]
    NotNormalized(String),
    #[error("nonpositive probability for an outcome")]
    NonPositive,
    #[error("expected count per cell {0:.2} below the minimum {1}")]
    InsufficientSample(f64, f64),
}

/// A finite distribution over canonical outcome byte strings with exact
/// rational probabilities.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ExactDistribution {
    outcomes: BTreeMap<Vec<u8>, BigRational>,
}

impl ExactDistribution {
    pub fn from_outcomes(
        outcomes: BTreeMap<Vec<u8>, BigRational>,
    ) -> Result<Self, StatsError> {
        let mut total = BigRational::zero();
        for p in outcomes.values() {
            if !p.is_positive() {
                return Err(StatsError::NonPositive);
            }
            total += p;
        }
        if !total.is_one() {
            return Err(StatsError::NotNormalized(total.to_string()));
        }
        Ok(Self { outcomes })
    }

    /// Accumulate weight on an outcome.
    pub fn builder() -> DistributionBuilder {
        DistributionBuilder::default()
    }

    pub fn outcomes(&self) -> &BTreeMap<Vec<u8>, BigRational> {
        &self.outcomes
    }

    pub fn probability(&self, outcome: &[u8]) -> BigRational {
        self.outcomes.get(outcome).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn support_size(&self) -> usize {
        self.outcomes.len()
    }

    /// Report form: one line per outcome, hex key then reduced fraction.
    pub fn report(&self) -> String {
        let mut out = String::new();
        for (key, p) in &self.outcomes {
            out.push_str(&format!("{} {}\n", hex::encode(key), p));
        }
        out
    }
}

#[derive(Default)]
pub struct DistributionBuilder {
    outcomes: BTreeMap<Vec<u8>, BigRational>,
}

impl DistributionBuilder {
    pub fn add(&mut self, outcome: Vec<u8>, weight: BigRational) {
        *self.outcomes.entry(outcome).or_insert_with(BigRational::zero) += weight;
    }

    pub fn finish(self) -> Result<ExactDistribution, StatsError> {
        ExactDistribution::from_outcomes(self.outcomes)
    }
}

/// Exact total variation distance `(1/2) Σ_z |p(z) − q(z)|`.
pub fn tv_distance(p: &ExactDistribution, q: &ExactDistribution) -> BigRational {
    let mut total = BigRational::zero();
    let keys: std::collections::BTreeSet<_> =
        p.outcomes.keys().chain(q.outcomes.keys()).collect();
    for key in keys {
        total += (p.probability(key) - q.probability(key)).abs();
    }
    total / BigRational::from_integer(BigInt::from(2))
}

/// Counted outcomes of repeated sampling.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EmpiricalSample {
    counts: BTreeMap<Vec<u8>, u64>,
    total: u64,
}

impl EmpiricalSample {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn record(&mut self, outcome: Vec<u8>) {
        *self.counts.entry(outcome).or_insert(0) += 1;
        self.total += 1;
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn counts(&self) -> &BTreeMap<Vec<u8>, u64> {
        &self.counts
    }

    pub fn frequency(&self, outcome: &[u8]) -> BigRational {
        let count = self.counts.get(outcome).copied().unwrap_or(0);
        BigRational::new(BigInt::from(count), BigInt::from(self.total.max(1)))
    }

    /// The sample as an exact distribution of frequencies.
    pub fn to_distribution(&self) -> Result<ExactDistribution, StatsError> {
        let outcomes = self
            .counts
            .iter()
            .filter(|(_, &c)| c > 0)
            .map(|(k, &c)| {
                (
                    k.clone(),
                    BigRational::new(BigInt::from(c), BigInt::from(self.total)),
                )
            })
            .collect();
        ExactDistribution::from_outcomes(outcomes)
    }
}

/// Exact TV distance between two empirical samples (frequency maps are
/// rationals, so no rounding happens).
pub fn empirical_tv(a: &EmpiricalSample, b: &EmpiricalSample) -> BigRational {
    let pa = a.to_distribution().expect("nonempty sample");
    let pb = b.to_distribution().expect("nonempty sample");
    tv_distance(&pa, &pb)
}

/// Result of a Pearson uniformity test.
#[derive(Debug, Clone)]
pub struct ChiSquareOutcome {
    pub statistic: f64,
    pub critical_value: f64,
    pub degrees_of_freedom: f64,
    pub rejected: bool,
}

/// Pearson chi-square test of uniformity over `cells` outcomes at the
/// given significance level. Outcomes absent from the sample count as
/// zero cells; the expected count per cell must be at least 5.
pub fn chi_square_uniform(
    sample: &EmpiricalSample,
    cells: u64,
    significance: f64,
) -> Result<ChiSquareOutcome, StatsError> {
    assert!(cells >= 2);
    assert!(sample.counts.len() as u64 <= cells, "more outcomes than cells");
    let expected = sample.total as f64 / cells as f64;
    if expected < 5.0 {
        return Err(StatsError::InsufficientSample(expected, 5.0));
    }
    let mut statistic = 0.0;
    let mut seen = 0;
    for &count in sample.counts.values() {
        let diff = count as f64 - expected;
        statistic += diff * diff / expected;
        seen += 1;
    }
    statistic += (cells - seen) as f64 * expected; // empty cells
    let dof = (cells - 1) as f64;
    let dist = ChiSquared::new(dof).expect("valid dof");
    let critical_value = dist.inverse_cdf(1.0 - significance);
    Ok(ChiSquareOutcome {
        statistic,
        critical_value,
        degrees_of_freedom: dof,
        rejected: statistic > critical_value,
    })
}

/// Empirical acceptance rate with its 3-sigma binomial half-width.
#[derive(Debug, Clone, Copy)]
pub struct AcceptanceRate {
    pub accepted: u64,
    pub trials: u64,
    pub rate: f64,
    pub half_width_3_sigma: f64,
}

impl AcceptanceRate {
    pub fn within(&self, target: f64, slack: f64) -> bool {
        (self.rate - target).abs() <= slack
    }
}

/// Run a session closure `trials` times and report the acceptance rate.
pub fn acceptance_rate<F: FnMut(u64) -> bool>(trials: u64, mut run: F) -> AcceptanceRate {
    assert!(trials >= 1);
    let mut accepted = 0;
    for trial in 0..trials {
        if run(trial) {
            accepted += 1;
        }
    }
    let rate = accepted as f64 / trials as f64;
    AcceptanceRate {
        accepted,
        trials,
        rate,
        half_width_3_sigma: 3.0 * (rate * (1.0 - rate) / trials as f64).sqrt(),
    }
}

/// Machine-readable summary line for a TV comparison.
pub fn tv_summary_line(tv: &BigRational) -> String {
    format!("TV={}/{}", tv.numer(), tv.denom())
}
