//! Black-box objective abstraction: bounds, subvector composition, and
//! fitness-evaluation accounting.

use std::sync::atomic::{AtomicU64, Ordering};

use crate::error::{FdgError, Result};

/// A bounded black-box minimization problem over `n` real variables.
///
/// The evaluator must be pure: identical input vectors yield bit-identical
/// fitness values. Every evaluation goes through an [`EvaluationLedger`] so
/// that fitness-evaluation counts stay exact.
pub struct ObjectiveProblem {
    lower: Vec<f64>,
    upper: Vec<f64>,
    evaluator: Box<dyn Fn(&[f64]) -> f64 + Send + Sync>,
}

impl ObjectiveProblem {
    pub fn new<F>(lower: Vec<f64>, upper: Vec<f64>, evaluator: F) -> Result<Self>
    where
        F: Fn(&[f64]) -> f64 + Send + Sync + 'static,
    {
        if lower.len() != upper.len() {
            return Err(FdgError::DimensionMismatch {
                expected: lower.len(),
                got: upper.len(),
            });
        }
        if lower.is_empty() {
            return Err(FdgError::InvalidSpec("dimension must be positive".into()));
        }
        for (i, (&lo, &hi)) in lower.iter().zip(&upper).enumerate() {
            if !(lo < hi) {
                return Err(FdgError::InvalidSpec(format!(
                    "bounds must satisfy lb < ub at index {i}: {lo} >= {hi}"
                )));
            }
        }
        Ok(Self {
            lower,
            upper,
            evaluator: Box::new(evaluator),
        })
    }

    pub fn dimension(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    /// Evaluate a candidate solution, charging exactly one fitness evaluation
    /// to `ledger`. Vectors of the wrong length or with out-of-bounds
    /// components are rejected; decomposition never samples out of bounds.
    pub fn evaluate(&self, ledger: &EvaluationLedger, values: &[f64]) -> Result<f64> {
        if values.len() != self.dimension() {
            return Err(FdgError::DimensionMismatch {
                expected: self.dimension(),
                got: values.len(),
            });
        }
        for (i, &v) in values.iter().enumerate() {
            if v < self.lower[i] || v > self.upper[i] || v.is_nan() {
                return Err(FdgError::OutOfBounds {
                    index: i,
                    value: v,
                    lower: self.lower[i],
                    upper: self.upper[i],
                });
            }
        }
        ledger.record();
        Ok((self.evaluator)(values))
    }
}

/// Counts evaluator invocations. Increments are serialized through an atomic
/// so evaluations may be issued from several contexts at once.
#[derive(Debug, Default)]
pub struct EvaluationLedger {
    used: AtomicU64,
    budget: Option<u64>,
}

impl EvaluationLedger {
    pub fn new() -> Self {
        Self::default()
    }

    /// A ledger that exposes a remaining-budget query. Callers decide what to
    /// do when the budget runs out; the ledger itself never blocks an
    /// evaluation.
    pub fn with_budget(budget: u64) -> Self {
        Self {
            used: AtomicU64::new(0),
            budget: Some(budget),
        }
    }

    pub fn count(&self) -> u64 {
        self.used.load(Ordering::SeqCst)
    }

    pub fn budget(&self) -> Option<u64> {
        self.budget
    }

    /// Remaining evaluations, or `None` for an unbounded ledger.
    pub fn remaining(&self) -> Option<u64> {
        self.budget.map(|b| b.saturating_sub(self.count()))
    }

    pub(crate) fn record(&self) {
        self.used.fetch_add(1, Ordering::SeqCst);
    }
}

/// A candidate solution; `fitness` is present only after evaluation.
#[derive(Clone, Debug, PartialEq)]
pub struct Solution {
    pub values: Vec<f64>,
    pub fitness: Option<f64>,
}

impl Solution {
    pub fn unevaluated(values: Vec<f64>) -> Self {
        Self {
            values,
            fitness: None,
        }
    }

    pub fn evaluated(values: Vec<f64>, fitness: f64) -> Self {
        Self {
            values,
            fitness: Some(fitness),
        }
    }
}

/// Copy `base`, overwriting the positions in `subset` with `donor` values.
/// The base vector is never mutated; writing the same subset twice keeps the
/// last donor (last write wins).
pub fn compose(base: &[f64], subset: &[usize], donor: &[f64]) -> Result<Vec<f64>> {
    if subset.len() != donor.len() {
        return Err(FdgError::DonorMismatch {
            donor: donor.len(),
            subset: subset.len(),
        });
    }
    let mut out = base.to_vec();
    for (&idx, &v) in subset.iter().zip(donor) {
        if idx >= base.len() {
            return Err(FdgError::IndexOutOfRange {
                index: idx,
                dimension: base.len(),
            });
        }
        out[idx] = v;
    }
    Ok(out)
}

/// `compose` restricted to donors taken from another full-length vector:
/// positions in `subset` are overwritten with `source[i]`.
pub fn compose_from(base: &[f64], subset: &[usize], source: &[f64]) -> Result<Vec<f64>> {
    if source.len() != base.len() {
        return Err(FdgError::DimensionMismatch {
            expected: base.len(),
            got: source.len(),
        });
    }
    let mut out = base.to_vec();
    for &idx in subset {
        if idx >= base.len() {
            return Err(FdgError::IndexOutOfRange {
                index: idx,
                dimension: base.len(),
            });
        }
        out[idx] = source[idx];
    }
    Ok(out)
}
