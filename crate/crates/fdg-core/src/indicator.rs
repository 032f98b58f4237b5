//! Interdependency mathematics: fitness differences, influence, the roundoff
//! estimate, the normalized indicator phi, and threshold-based separability
//! judgment.

use serde::Serialize;

use crate::error::{FdgError, Result};
use crate::problem::{compose_from, EvaluationLedger, ObjectiveProblem};

/// Machine precision for 64-bit floats, 2^-52. Every indicator value is
/// clamped to at least this.
pub const MACHINE_EPSILON: f64 = f64::EPSILON;

/// Estimation coefficient for the roundoff bound, eps_M / (1 - eps_M).
/// Kept as a named constant so the alternative k*eps/(1 - k*eps) convention
/// is a one-line change.
pub const GAMMA2: f64 = MACHINE_EPSILON / (1.0 - MACHINE_EPSILON);

/// The four evaluated solutions backing one indicator: the base context
/// (`x_ll`), the context with the first subset raised to its upper bound
/// (`x_ul`), with the second subset raised (`x_lu`), and with both raised
/// (`x_uu`), together with their fitness values.
#[derive(Clone, Debug)]
pub struct CornerSample {
    pub x_ll: Vec<f64>,
    pub x_ul: Vec<f64>,
    pub x_lu: Vec<f64>,
    pub x_uu: Vec<f64>,
    pub y_ll: f64,
    pub y_ul: f64,
    pub y_lu: f64,
    pub y_uu: f64,
}

impl CornerSample {
    /// First fitness difference, taken with the second subset at the context.
    pub fn delta_low(&self) -> f64 {
        delta(self.y_ll, self.y_ul)
    }

    /// Second fitness difference, taken with the second subset raised.
    pub fn delta_high(&self) -> f64 {
        delta(self.y_lu, self.y_uu)
    }
}

/// Fitness difference between two solutions that differ only on one subset.
pub fn delta(y_a: f64, y_b: f64) -> f64 {
    y_a - y_b
}

/// Influence of one variable subset on another: the absolute difference of
/// the two fitness differences. Zero for separable subsets up to roundoff.
pub fn influence(sample: &CornerSample) -> f64 {
    (sample.delta_low() - sample.delta_high()).abs()
}

/// Roundoff estimate for the influence, `gamma_2 * sum of |fitness|` over the
/// four corners.
pub fn error_bound(sample: &CornerSample) -> f64 {
    GAMMA2 * (sample.y_ll.abs() + sample.y_ul.abs() + sample.y_lu.abs() + sample.y_uu.abs())
}

/// Normalized interdependency indicator:
/// `max((I - e) / (2 max(|d1|, |d2|)), eps_M)`, with the machine-precision
/// floor also covering a zero denominator (no evidence of interaction).
pub fn phi(sample: &CornerSample) -> f64 {
    let denominator = 2.0 * sample.delta_low().abs().max(sample.delta_high().abs());
    if denominator == 0.0 {
        return MACHINE_EPSILON;
    }
    ((influence(sample) - error_bound(sample)) / denominator).max(MACHINE_EPSILON)
}

/// Pre-evaluated corner fitness values that can be reused instead of spending
/// new evaluations. Each supplied value must equal the evaluator output for
/// the corresponding corner bit-exactly.
#[derive(Clone, Copy, Debug, Default)]
pub struct CornerReuse {
    pub ll: Option<f64>,
    pub ul: Option<f64>,
    pub lu: Option<f64>,
    pub uu: Option<f64>,
}

impl CornerReuse {
    /// Reuse only the base context fitness.
    pub fn base(y_ll: f64) -> Self {
        Self {
            ll: Some(y_ll),
            ..Self::default()
        }
    }

    /// Reuse the base context and the all-raised corner; this is the layout
    /// where the context is the lower bound and both subsets cover all
    /// variables, so `x_uu` is the upper bound.
    pub fn base_and_opposite(y_ll: f64, y_uu: f64) -> Self {
        Self {
            ll: Some(y_ll),
            uu: Some(y_uu),
            ..Self::default()
        }
    }
}

/// Build the four corners for `phi(xi, xj)` around `context`, evaluating only
/// the corners not supplied through `reuse`. The ledger is charged exactly
/// once per newly evaluated corner.
pub fn sample_and_phi(
    problem: &ObjectiveProblem,
    ledger: &EvaluationLedger,
    context: &[f64],
    xi: &[usize],
    xj: &[usize],
    reuse: CornerReuse,
) -> Result<(f64, CornerSample)> {
    if xi.is_empty() || xj.is_empty() || xi.iter().any(|i| xj.contains(i)) {
        return Err(FdgError::InvalidSubsets);
    }
    let upper = problem.upper();
    let x_ll = context.to_vec();
    let x_ul = compose_from(&x_ll, xi, upper)?;
    let x_lu = compose_from(&x_ll, xj, upper)?;
    let x_uu = compose_from(&x_lu, xi, upper)?;

    let fetch = |values: &[f64], reused: Option<f64>| -> Result<f64> {
        match reused {
            Some(y) => Ok(y),
            None => problem.evaluate(ledger, values),
        }
    };
    let y_ll = fetch(&x_ll, reuse.ll)?;
    let y_ul = fetch(&x_ul, reuse.ul)?;
    let y_lu = fetch(&x_lu, reuse.lu)?;
    let y_uu = fetch(&x_uu, reuse.uu)?;

    let sample = CornerSample {
        x_ll,
        x_ul,
        x_lu,
        x_uu,
        y_ll,
        y_ul,
        y_lu,
        y_uu,
    };
    Ok((phi(&sample), sample))
}

/// The adaptive separability / nonseparability threshold pair. Both values
/// are always present; procedures that may fail to produce thresholds return
/// `Option<Thresholds>`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Thresholds {
    pub phi_s: f64,
    pub phi_n: f64,
}

impl Thresholds {
    pub fn new(phi_s: f64, phi_n: f64) -> Self {
        debug_assert!(MACHINE_EPSILON <= phi_s && phi_s < phi_n);
        Self { phi_s, phi_n }
    }
}

/// Compare an indicator value against the thresholds and tighten the matching
/// one. The textbook comparison `phi/phi_s < phi_n/phi` is evaluated as
/// `phi^2 < phi_s * phi_n`, which avoids dividing by a tiny separability
/// threshold and is identical for positive operands.
pub fn judge_sep(phi_value: f64, thresholds: &mut Thresholds) -> bool {
    if phi_value * phi_value < thresholds.phi_s * thresholds.phi_n {
        thresholds.phi_s = thresholds.phi_s.max(phi_value);
        true
    } else {
        thresholds.phi_n = thresholds.phi_n.min(phi_value);
        false
    }
}

/// Check the corner relations that make solution reuse sound: `x_ul`, `x_lu`,
/// and `x_uu` must be exactly the context with `xi`, `xj`, and both subsets
/// raised to the upper bound.
pub fn corner_relations_hold(
    sample: &CornerSample,
    xi: &[usize],
    xj: &[usize],
    upper: &[f64],
) -> bool {
    let ul = compose_from(&sample.x_ll, xi, upper);
    let lu = compose_from(&sample.x_ll, xj, upper);
    let uu = lu
        .as_ref()
        .ok()
        .and_then(|lu| compose_from(lu, xi, upper).ok());
    matches!(ul, Ok(v) if v == sample.x_ul)
        && matches!(lu, Ok(ref v) if *v == sample.x_lu)
        && matches!(uu, Some(v) if v == sample.x_uu)
}
