//! Top-level decomposition driver: evaluate the bounds, identify the
//! instance type, and either finish immediately (fully separable or
//! nonseparable) or hand the instance to the grouping loop.

use rand::Rng;
use serde::Serialize;
use serde_json::json;

use crate::error::Result;
use crate::idap::{SeparabilityType, DEFAULT_GAP_FACTOR};
use crate::indicator::{Thresholds, MACHINE_EPSILON};
use crate::itip::{self, DEFAULT_TRIALS};
use crate::problem::{EvaluationLedger, ObjectiveProblem};
use crate::psdp::{self, Decomposition};

#[derive(Clone, Copy, Debug)]
pub struct FdgConfig {
    /// Trials per selection rule in identification and exclusion.
    pub trials: usize,
    /// Outlier factor for the indicator-distribution analysis.
    pub gap_factor: f64,
    /// Run the grouping loop even on instances identified as fully separable
    /// or nonseparable, seeded with the widest threshold pair. Experimental.
    pub force_psdp: bool,
}

impl Default for FdgConfig {
    fn default() -> Self {
        Self {
            trials: DEFAULT_TRIALS,
            gap_factor: DEFAULT_GAP_FACTOR,
            force_psdp: false,
        }
    }
}

/// One pipeline phase and the evaluations it spent.
#[derive(Clone, Debug, Serialize)]
pub struct PhaseTrace {
    pub name: String,
    #[serde(rename = "feNum")]
    pub fe_num: u64,
    pub detail: serde_json::Value,
}

/// Machine-readable run record.
#[derive(Clone, Debug, Serialize)]
pub struct FdgTrace {
    #[serde(rename = "type")]
    pub kind: SeparabilityType,
    pub thresholds: Option<Thresholds>,
    pub phases: Vec<PhaseTrace>,
}

#[derive(Clone, Debug)]
pub struct FdgOutcome {
    pub decomposition: Decomposition,
    pub fe_num: u64,
    pub trace: FdgTrace,
}

/// Decompose a problem, charging all evaluations to `ledger`.
///
/// Fully separable and nonseparable instances finish after identification;
/// partially separable ones continue through exclusion and grouping with the
/// thresholds identification produced. A single-variable problem is a
/// separable singleton at zero cost.
pub fn decompose(
    problem: &ObjectiveProblem,
    ledger: &EvaluationLedger,
    config: &FdgConfig,
    rng: &mut impl Rng,
) -> Result<FdgOutcome> {
    let n = problem.dimension();
    let start = ledger.count();
    if n == 1 {
        return Ok(FdgOutcome {
            decomposition: Decomposition::fully_separable(1),
            fe_num: 0,
            trace: FdgTrace {
                kind: SeparabilityType::FullySeparable,
                thresholds: None,
                phases: Vec::new(),
            },
        });
    }

    let mut phases = Vec::new();
    let y_lb = problem.evaluate(ledger, problem.lower())?;
    let y_ub = problem.evaluate(ledger, problem.upper())?;
    phases.push(PhaseTrace {
        name: "bounds".into(),
        fe_num: 2,
        detail: json!({ "yLb": y_lb, "yUb": y_ub }),
    });

    let before_itip = ledger.count();
    let identified = itip::identify(
        problem,
        ledger,
        y_lb,
        y_ub,
        config.trials,
        config.gap_factor,
        rng,
    )?;
    phases.push(PhaseTrace {
        name: "itip".into(),
        fe_num: ledger.count() - before_itip,
        detail: json!({
            "type": identified.kind,
            "phiValues": identified.phi_values,
            "feNumWithBounds": identified.fe_num,
        }),
    });

    let mut thresholds = identified.thresholds;
    let run_grouping = match identified.kind {
        SeparabilityType::PartiallySeparable => true,
        _ => config.force_psdp,
    };
    let decomposition = if run_grouping {
        let mut working = thresholds
            .unwrap_or_else(|| Thresholds::new(MACHINE_EPSILON, f64::INFINITY));
        let before = ledger.count();
        let outcome = psdp::psdp(
            problem,
            ledger,
            y_lb,
            y_ub,
            &mut working,
            config.trials,
            rng,
        )?;
        phases.push(PhaseTrace {
            name: "psdp".into(),
            fe_num: ledger.count() - before,
            detail: json!({
                "svepFeNum": outcome.svep_fe,
                "svepSeps": outcome.svep_seps,
                "steps": outcome.steps,
            }),
        });
        thresholds = Some(working);
        outcome.decomposition
    } else {
        match identified.kind {
            SeparabilityType::Nonseparable => Decomposition::single_group(n),
            _ => Decomposition::fully_separable(n),
        }
    };

    let fe_num = ledger.count() - start;
    decomposition.validate_partition(n)?;
    Ok(FdgOutcome {
        decomposition,
        fe_num,
        trace: FdgTrace {
            kind: identified.kind,
            thresholds,
            phases,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::benchmarks::{build, BenchmarkSpec, Family};
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    fn run(spec: &BenchmarkSpec, seed: u64) -> (FdgOutcome, Decomposition) {
        let (problem, truth) = build(spec).unwrap();
        let ledger = EvaluationLedger::new();
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        let outcome = decompose(&problem, &ledger, &FdgConfig::default(), &mut rng).unwrap();
        assert_eq!(outcome.fe_num, ledger.count());
        (outcome, truth)
    }

    #[test]
    fn fully_separable_instance_costs_52_evaluations() {
        let spec = BenchmarkSpec::separable(Family::SumOfSquares, 100, 1, 2);
        let (outcome, truth) = run(&spec, 5);
        assert_eq!(outcome.fe_num, 52);
        assert_eq!(outcome.decomposition, truth);
        assert_eq!(outcome.trace.kind, SeparabilityType::FullySeparable);
    }

    #[test]
    fn nonseparable_instance_costs_52_evaluations() {
        let spec = BenchmarkSpec::separable(Family::FullSchwefel, 100, 3, 4);
        let (outcome, truth) = run(&spec, 6);
        assert_eq!(outcome.fe_num, 52);
        assert_eq!(outcome.decomposition, truth);
    }

    #[test]
    fn grouped_instance_is_recovered_exactly() {
        let spec = BenchmarkSpec::grouped(Family::GroupSchwefel, 40, 4, 5, 7, 8);
        let (outcome, truth) = run(&spec, 7);
        assert_eq!(outcome.decomposition, truth);
        assert_eq!(outcome.trace.kind, SeparabilityType::PartiallySeparable);
        assert!(outcome.trace.thresholds.is_some());
    }

    #[test]
    fn single_variable_short_circuits_at_zero_cost() {
        let problem =
            crate::problem::ObjectiveProblem::new(vec![0.0], vec![1.0], |x: &[f64]| x[0]).unwrap();
        let ledger = EvaluationLedger::new();
        let mut rng = ChaCha12Rng::seed_from_u64(1);
        let outcome = decompose(&problem, &ledger, &FdgConfig::default(), &mut rng).unwrap();
        assert_eq!(outcome.fe_num, 0);
        assert_eq!(outcome.decomposition, Decomposition::fully_separable(1));
    }

    #[test]
    fn ledger_reconciles_with_phase_trace() {
        let spec = BenchmarkSpec::grouped(Family::GroupSchwefel, 30, 3, 6, 9, 10);
        let (outcome, _) = run(&spec, 8);
        let phase_total: u64 = outcome.trace.phases.iter().map(|p| p.fe_num).sum();
        assert_eq!(outcome.fe_num, phase_total);
        assert_eq!(outcome.trace.phases[0].fe_num, 2);
        assert_eq!(outcome.trace.phases[1].fe_num, 50);
    }

    #[test]
    fn identical_seeds_give_bit_identical_outcomes() {
        let spec = BenchmarkSpec::grouped(Family::GroupSchwefel, 40, 4, 5, 11, 12);
        let (a, _) = run(&spec, 42);
        let (b, _) = run(&spec, 42);
        assert_eq!(a.decomposition, b.decomposition);
        assert_eq!(a.fe_num, b.fe_num);
        assert_eq!(
            serde_json::to_string(&a.trace).unwrap(),
            serde_json::to_string(&b.trace).unwrap()
        );
    }

    #[test]
    fn forced_grouping_runs_the_full_pipeline() {
        let spec = BenchmarkSpec::separable(Family::SumOfSquares, 12, 13, 14);
        let (problem, _) = build(&spec).unwrap();
        let ledger = EvaluationLedger::new();
        let mut rng = ChaCha12Rng::seed_from_u64(2);
        let config = FdgConfig {
            force_psdp: true,
            ..FdgConfig::default()
        };
        let outcome = decompose(&problem, &ledger, &config, &mut rng).unwrap();
        assert!(outcome.fe_num > 52, "grouping phase ran");
        assert!(outcome
            .trace
            .phases
            .iter()
            .any(|p| p.name == "psdp"));
        outcome.decomposition.validate_partition(12).unwrap();
    }
}
