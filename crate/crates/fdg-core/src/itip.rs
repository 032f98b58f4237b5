//! Instance-type identification: probe a handful of subset pairs chosen by
//! two selection rules — random halvings to catch a nonseparable pair, and
//! random variable pairs to catch a separable one — then classify the pooled
//! indicator values.

use rand::Rng;

use crate::error::Result;
use crate::idap::{analyze, IdapResult, SeparabilityType};
use crate::indicator::{sample_and_phi, CornerReuse, Thresholds};
use crate::problem::{EvaluationLedger, ObjectiveProblem};

/// Paper-conservative trial count per selection rule.
pub const DEFAULT_TRIALS: usize = 10;

#[derive(Clone, Debug)]
pub struct ItipResult {
    pub kind: SeparabilityType,
    pub thresholds: Option<Thresholds>,
    /// Evaluations attributable to identification, counting the two bound
    /// evaluations delegated from the driver: 5 * trials + 2.
    pub fe_num: u64,
    /// The pooled indicator values, kept for diagnostics.
    pub phi_values: Vec<f64>,
}

/// Identify the separability type of the instance.
///
/// Each halving trial reuses the bound fitness values on both ends and costs
/// 2 evaluations; each variable-pair trial reuses only the lower bound and
/// costs 3; the ledger is charged `5 * trials` in total. Halvings are drawn
/// independently across trials, and a variable pair is distinct within a
/// trial but may repeat across trials.
pub fn identify(
    problem: &ObjectiveProblem,
    ledger: &EvaluationLedger,
    y_lb: f64,
    y_ub: f64,
    trials: usize,
    gap_factor: f64,
    rng: &mut impl Rng,
) -> Result<ItipResult> {
    let n = problem.dimension();
    if n < 2 {
        return Ok(ItipResult {
            kind: SeparabilityType::FullySeparable,
            thresholds: None,
            fe_num: 0,
            phi_values: Vec::new(),
        });
    }

    let lower = problem.lower().to_vec();
    let mut phi_values = Vec::with_capacity(2 * trials);

    for _ in 0..trials {
        let mut indices: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            let j = rng.random_range(0..=i);
            indices.swap(i, j);
        }
        let mut first: Vec<usize> = indices[..n / 2].to_vec();
        let mut second: Vec<usize> = indices[n / 2..].to_vec();
        first.sort_unstable();
        second.sort_unstable();
        let (phi_value, _) = sample_and_phi(
            problem,
            ledger,
            &lower,
            &first,
            &second,
            CornerReuse::base_and_opposite(y_lb, y_ub),
        )?;
        phi_values.push(phi_value);
    }

    for _ in 0..trials {
        let a = rng.random_range(0..n);
        let mut b = rng.random_range(0..n - 1);
        if b >= a {
            b += 1;
        }
        let (phi_value, _) = sample_and_phi(
            problem,
            ledger,
            &lower,
            &[a],
            &[b],
            CornerReuse::base(y_lb),
        )?;
        phi_values.push(phi_value);
    }

    let IdapResult { kind, thresholds } = analyze(&phi_values, gap_factor)?;
    Ok(ItipResult {
        kind,
        thresholds,
        fe_num: 5 * trials as u64 + 2,
        phi_values,
    })
}
