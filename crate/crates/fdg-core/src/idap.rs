//! Indicator-distribution analysis: classify a set of indicator values as
//! fully separable, nonseparable, or partially separable by looking for an
//! outlier gap in the sorted sequence of adjacent quotients.

use serde::Serialize;

use crate::error::{FdgError, Result};
use crate::indicator::{Thresholds, MACHINE_EPSILON};

/// Default factor by which the largest adjacent quotient must dominate the
/// second largest to count as an outlier gap. Any value in [1e3, 1e8] works.
pub const DEFAULT_GAP_FACTOR: f64 = 1000.0;

/// Separability classification of an indicator-value distribution (and, by
/// extension, of the instance the values were probed from).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum SeparabilityType {
    #[serde(rename = "fs")]
    FullySeparable,
    #[serde(rename = "ns")]
    Nonseparable,
    #[serde(rename = "ps")]
    PartiallySeparable,
}

impl std::fmt::Display for SeparabilityType {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let tag = match self {
            SeparabilityType::FullySeparable => "fs",
            SeparabilityType::Nonseparable => "ns",
            SeparabilityType::PartiallySeparable => "ps",
        };
        f.write_str(tag)
    }
}

/// Result of the distribution analysis; thresholds are present exactly when
/// the values split into a separable and a nonseparable class.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IdapResult {
    pub kind: SeparabilityType,
    pub thresholds: Option<Thresholds>,
}

/// Quotients between adjacent values of an ascending sequence.
pub fn lambda_sequence(sorted: &[f64]) -> Vec<f64> {
    sorted.windows(2).map(|w| w[1] / w[0]).collect()
}

/// Analyze a multiset of indicator values.
///
/// The values are sorted ascending and the adjacent quotients are scanned for
/// an outlier: if the largest quotient exceeds `gap_factor` times the second
/// largest, the values below the gap come from separable subset pairs and the
/// values above from nonseparable ones, and the two values bracketing the gap
/// become the thresholds. Without such a gap the distribution is uniform:
/// it is fully separable if any value sits exactly at machine precision,
/// nonseparable otherwise.
pub fn analyze(phi_values: &[f64], gap_factor: f64) -> Result<IdapResult> {
    if phi_values.len() < 2 {
        return Err(FdgError::TooFewIndicators {
            got: phi_values.len(),
        });
    }
    if !(1e3..=1e8).contains(&gap_factor) {
        return Err(FdgError::GapFactorOutOfRange { value: gap_factor });
    }
    for &v in phi_values {
        if !(v >= MACHINE_EPSILON) {
            return Err(FdgError::IndicatorBelowEpsilon { value: v });
        }
    }

    let mut sorted = phi_values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("indicator values are finite"));
    let lambdas = lambda_sequence(&sorted);

    // Largest quotient, earliest index on ties so the separable class stays
    // as small as possible; runner-up is the largest value elsewhere.
    let (gap_index, &largest) = lambdas
        .iter()
        .enumerate()
        .max_by(|(ia, a), (ib, b)| a.partial_cmp(b).unwrap().then(ib.cmp(ia)))
        .expect("at least one quotient");
    let runner_up = lambdas
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != gap_index)
        .map(|(_, &v)| v)
        .fold(1.0_f64, f64::max);

    if largest > gap_factor * runner_up {
        return Ok(IdapResult {
            kind: SeparabilityType::PartiallySeparable,
            thresholds: Some(Thresholds::new(sorted[gap_index], sorted[gap_index + 1])),
        });
    }
    if sorted[0] > MACHINE_EPSILON {
        Ok(IdapResult {
            kind: SeparabilityType::Nonseparable,
            thresholds: None,
        })
    } else {
        Ok(IdapResult {
            kind: SeparabilityType::FullySeparable,
            thresholds: None,
        })
    }
}
