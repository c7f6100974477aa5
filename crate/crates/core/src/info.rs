//! Shannon measures: self-information, entropy, and the plug-in estimate
//! over observed outcome events.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Probabilities must sum to one within this tolerance.
pub const SUM_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum InfoError {
    #[error("probability {0} is outside (0, 1]")]
    Domain(f64),
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),
    #[error("no outcome events given")]
    NoOutcomes,
    #[error("none of the outcome events was observed")]
    NoObservations,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum Base {
    #[default]
    Two,
    E,
    Ten,
}

impl Base {
    fn log(self, x: f64) -> f64 {
        match self {
            Base::Two => x.log2(),
            Base::E => x.ln(),
            Base::Ten => x.log10(),
        }
    }

    pub fn unit(self) -> &'static str {
        match self {
            Base::Two => "bits",
            Base::E => "nats",
            Base::Ten => "hartleys",
        }
    }
}

pub fn self_information(p: f64) -> Result<f64, InfoError> {
    self_information_in(p, Base::Two)
}

pub fn self_information_in(p: f64, base: Base) -> Result<f64, InfoError> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(InfoError::Domain(p));
    }
    // -log(1) would be -0.0
    Ok(0.0 - base.log(p))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Distribution {
    outcomes: Vec<(String, f64)>,
}

impl Distribution {
    pub fn new<S: Into<String>>(
        outcomes: impl IntoIterator<Item = (S, f64)>,
    ) -> Result<Self, InfoError> {
        let outcomes: Vec<(String, f64)> =
            outcomes.into_iter().map(|(l, p)| (l.into(), p)).collect();
        if outcomes.is_empty() {
            return Err(InfoError::InvalidDistribution("no outcomes".into()));
        }
        let mut labels = BTreeSet::new();
        for (label, p) in &outcomes {
            if !labels.insert(label.as_str()) {
                return Err(InfoError::InvalidDistribution(format!(
                    "duplicate label {label}"
                )));
            }
            if !(0.0..=1.0).contains(p) {
                return Err(InfoError::InvalidDistribution(format!(
                    "probability of {label} is {p}"
                )));
            }
        }
        let sum: f64 = outcomes.iter().map(|(_, p)| p).sum();
        if (sum - 1.0).abs() > SUM_TOLERANCE {
            return Err(InfoError::InvalidDistribution(format!(
                "probabilities sum to {sum}"
            )));
        }
        Ok(Distribution { outcomes })
    }

    pub fn outcomes(&self) -> &[(String, f64)] {
        &self.outcomes
    }

    pub fn len(&self) -> usize {
        self.outcomes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outcomes.is_empty()
    }
}

pub fn entropy(d: &Distribution) -> f64 {
    entropy_in(d, Base::Two)
}

/// `0 · log 0` is taken as 0.
pub fn entropy_in(d: &Distribution, base: Base) -> f64 {
    d.outcomes
        .iter()
        .filter(|(_, p)| *p > 0.0)
        .map(|(_, p)| p * self_information_in(*p, base).expect("validated probability"))
        .sum()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutcomeInfo {
    pub label: String,
    pub probability: f64,
    /// Absent for outcomes of probability zero.
    pub information: Option<f64>,
    pub count: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InfoReport {
    pub base: Base,
    pub outcomes: Vec<OutcomeInfo>,
    pub entropy: f64,
    pub empirical_entropy: Option<f64>,
    pub observations: usize,
}

pub fn report(d: &Distribution, base: Base) -> InfoReport {
    InfoReport {
        base,
        outcomes: d
            .outcomes
            .iter()
            .map(|(label, p)| OutcomeInfo {
                label: label.clone(),
                probability: *p,
                information: self_information_in(*p, base).ok(),
                count: None,
            })
            .collect(),
        entropy: entropy_in(d, base),
        empirical_entropy: None,
        observations: 0,
    }
}

/// Relative frequencies of `outcome_events` within `sequence`, reported in
/// bits. Events outside the outcome set are ignored.
pub fn empirical_info<S: AsRef<str>, T: AsRef<str>>(
    sequence: &[S],
    outcome_events: &[T],
) -> Result<InfoReport, InfoError> {
    if outcome_events.is_empty() {
        return Err(InfoError::NoOutcomes);
    }
    let mut counts = vec![0usize; outcome_events.len()];
    for s in sequence {
        if let Some(i) = outcome_events.iter().position(|o| o.as_ref() == s.as_ref()) {
            counts[i] += 1;
        }
    }
    let total: usize = counts.iter().sum();
    if total == 0 {
        return Err(InfoError::NoObservations);
    }
    let d = Distribution::new(
        outcome_events
            .iter()
            .zip(&counts)
            .map(|(o, c)| (o.as_ref().to_string(), *c as f64 / total as f64)),
    )?;
    let mut r = report(&d, Base::Two);
    for (o, c) in r.outcomes.iter_mut().zip(&counts) {
        o.count = Some(*c);
    }
    r.empirical_entropy = Some(r.entropy);
    r.observations = total;
    Ok(r)
}
