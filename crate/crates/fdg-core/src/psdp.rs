//! Separable-variable exclusion and the grouping loop for partially
//! separable instances: grow a candidate group through repeated binary-tree
//! searches so that indirectly interdependent variables end up together.

use rand::Rng;
use serde::Serialize;

use crate::btdp::{self, NodeTrace};
use crate::error::{FdgError, Result};
use crate::indicator::{judge_sep, sample_and_phi, CornerReuse, Thresholds};
use crate::problem::{EvaluationLedger, ObjectiveProblem};

/// A grouping result: nonseparable variable groups plus the set of separable
/// indices. When produced by the decomposition driver the sets are pairwise
/// disjoint and cover every variable.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Decomposition {
    pub nonseps: Vec<Vec<usize>>,
    pub seps: Vec<usize>,
}

impl Decomposition {
    pub fn fully_separable(n: usize) -> Self {
        Self {
            nonseps: Vec::new(),
            seps: (0..n).collect(),
        }
    }

    pub fn single_group(n: usize) -> Self {
        Self {
            nonseps: vec![(0..n).collect()],
            seps: Vec::new(),
        }
    }

    /// Canonical form: members sorted within groups, groups sorted by their
    /// smallest member, separable indices sorted.
    pub fn normalized(mut self) -> Self {
        for group in &mut self.nonseps {
            group.sort_unstable();
        }
        self.nonseps.sort_by_key(|g| g.first().copied());
        self.seps.sort_unstable();
        self
    }

    /// View as a partition: every separable variable becomes its own
    /// singleton block.
    pub fn as_partition(&self) -> Vec<Vec<usize>> {
        let mut blocks = self.nonseps.clone();
        blocks.extend(self.seps.iter().map(|&v| vec![v]));
        blocks
    }

    /// Check that the blocks are pairwise disjoint and cover `0..n` exactly.
    pub fn validate_partition(&self, n: usize) -> Result<()> {
        let mut seen = vec![false; n];
        let mut count = 0usize;
        for block in self.as_partition() {
            for v in block {
                if v >= n {
                    return Err(FdgError::NotAPartition(format!(
                        "index {v} out of range for n = {n}"
                    )));
                }
                if seen[v] {
                    return Err(FdgError::NotAPartition(format!("index {v} appears twice")));
                }
                seen[v] = true;
                count += 1;
            }
        }
        if count != n {
            return Err(FdgError::NotAPartition(format!(
                "{count} of {n} indices covered"
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct SvepOutcome {
    pub seps: Vec<usize>,
    pub fe_num: u64,
}

/// Probe randomly ordered variables against the rest of the variable set and
/// exclude the separable ones. If none of the first `trials` probes is
/// separable the procedure stops early; otherwise it sweeps every variable.
/// Each probe reuses the bound fitness values and costs 2 evaluations.
pub fn svep(
    problem: &ObjectiveProblem,
    ledger: &EvaluationLedger,
    y_lb: f64,
    y_ub: f64,
    thresholds: &mut Thresholds,
    trials: usize,
    rng: &mut impl Rng,
) -> Result<SvepOutcome> {
    let n = problem.dimension();
    if n < 2 {
        return Ok(SvepOutcome {
            seps: Vec::new(),
            fe_num: 0,
        });
    }
    let mut order: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        let j = rng.random_range(0..=i);
        order.swap(i, j);
    }

    let lower = problem.lower().to_vec();
    let mut seps = Vec::new();
    let mut found_separable = false;
    let mut fe_num = 0u64;
    for (probed, &x) in order.iter().enumerate() {
        if probed >= trials && !found_separable {
            break;
        }
        let rest: Vec<usize> = (0..n).filter(|&v| v != x).collect();
        let (phi_value, _) = sample_and_phi(
            problem,
            ledger,
            &lower,
            &[x],
            &rest,
            CornerReuse::base_and_opposite(y_lb, y_ub),
        )?;
        fe_num += 2;
        if judge_sep(phi_value, thresholds) {
            seps.push(x);
            found_separable = true;
        }
    }
    seps.sort_unstable();
    Ok(SvepOutcome { seps, fe_num })
}

/// One binary-tree search within the grouping loop, kept for diagnostics.
#[derive(Clone, Debug, Serialize)]
pub struct GroupingStep {
    pub x1: Vec<usize>,
    pub found: Vec<usize>,
    #[serde(rename = "feNum")]
    pub fe_num: u64,
    pub nodes: Vec<NodeTrace>,
}

#[derive(Clone, Debug)]
pub struct PsdpOutcome {
    pub decomposition: Decomposition,
    pub fe_num: u64,
    pub svep_fe: u64,
    pub svep_seps: Vec<usize>,
    pub steps: Vec<GroupingStep>,
}

/// Full decomposition of a partially separable instance: exclude separable
/// variables, then repeatedly grow a group from a random seed variable by
/// searching the remaining candidates for interdependent variables. A group
/// is finalized once a search comes back empty; growing the group before
/// re-searching is what captures indirect interdependency.
pub fn psdp(
    problem: &ObjectiveProblem,
    ledger: &EvaluationLedger,
    y_lb: f64,
    y_ub: f64,
    thresholds: &mut Thresholds,
    trials: usize,
    rng: &mut impl Rng,
) -> Result<PsdpOutcome> {
    let n = problem.dimension();
    let excluded = svep(problem, ledger, y_lb, y_ub, thresholds, trials, rng)?;
    let mut fe_num = excluded.fe_num;
    let mut seps = excluded.seps.clone();
    let mut candidates: Vec<usize> = (0..n).filter(|v| !seps.contains(v)).collect();
    let mut nonseps: Vec<Vec<usize>> = Vec::new();
    let mut steps = Vec::new();

    if !candidates.is_empty() {
        let mut group = vec![candidates[rng.random_range(0..candidates.len())]];
        while group.len() < candidates.len() {
            let rest: Vec<usize> = candidates
                .iter()
                .copied()
                .filter(|v| !group.contains(v))
                .collect();
            let outcome = btdp::run(problem, ledger, &group, &rest, y_lb, thresholds, rng)?;
            fe_num += outcome.fe_num;
            steps.push(GroupingStep {
                x1: group.clone(),
                found: outcome.interdependent.clone(),
                fe_num: outcome.fe_num,
                nodes: outcome.nodes,
            });
            if outcome.interdependent.is_empty() {
                if group.len() == 1 {
                    seps.push(group[0]);
                } else {
                    nonseps.push(std::mem::take(&mut group));
                }
                candidates = rest;
                group = vec![candidates[rng.random_range(0..candidates.len())]];
            } else {
                group.extend(outcome.interdependent);
                group.sort_unstable();
            }
        }
        if group.len() == 1 {
            seps.push(group[0]);
        } else {
            nonseps.push(group);
        }
    }

    let decomposition = Decomposition { nonseps, seps }.normalized();
    decomposition.validate_partition(n)?;
    Ok(PsdpOutcome {
        decomposition,
        fe_num,
        svep_fe: excluded.fe_num,
        svep_seps: excluded.seps,
        steps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::benchmarks::{build, BenchmarkSpec, Family};
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    fn bracket() -> Thresholds {
        Thresholds::new(1e-10, 1e-3)
    }

    fn prepared(spec: &BenchmarkSpec) -> (ObjectiveProblem, EvaluationLedger, f64, f64) {
        let (problem, _) = build(spec).unwrap();
        let ledger = EvaluationLedger::new();
        let y_lb = problem
            .evaluate(&ledger, &problem.lower().to_vec())
            .unwrap();
        let y_ub = problem
            .evaluate(&ledger, &problem.upper().to_vec())
            .unwrap();
        (problem, ledger, y_lb, y_ub)
    }

    #[test]
    fn svep_excludes_all_separable_variables() {
        let spec = BenchmarkSpec::grouped(Family::GroupSchwefel, 20, 2, 5, 3, 4);
        let (problem, ledger, y_lb, y_ub) = prepared(&spec);
        let (_, truth) = build(&spec).unwrap();
        let mut thresholds = bracket();
        let mut rng = ChaCha12Rng::seed_from_u64(12);

        let outcome = svep(
            &problem,
            &ledger,
            y_lb,
            y_ub,
            &mut thresholds,
            10,
            &mut rng,
        )
        .unwrap();
        // A separable variable appears within the first 10 probes with
        // overwhelming probability, so the sweep continues through all 20.
        assert_eq!(outcome.seps, truth.seps);
        assert_eq!(outcome.fe_num, 40);
    }

    #[test]
    fn svep_stops_after_trials_when_nothing_is_separable() {
        let spec = BenchmarkSpec::separable(Family::FullSchwefel, 12, 5, 6);
        let (problem, ledger, y_lb, y_ub) = prepared(&spec);
        let mut thresholds = bracket();
        let mut rng = ChaCha12Rng::seed_from_u64(13);

        let outcome = svep(
            &problem,
            &ledger,
            y_lb,
            y_ub,
            &mut thresholds,
            10,
            &mut rng,
        )
        .unwrap();
        assert!(outcome.seps.is_empty());
        assert_eq!(outcome.fe_num, 20);
    }

    #[test]
    fn svep_probes_everything_at_tiny_dimension() {
        let spec = BenchmarkSpec::separable(Family::SumOfSquares, 2, 7, 8);
        let (problem, ledger, y_lb, y_ub) = prepared(&spec);
        let mut thresholds = bracket();
        let mut rng = ChaCha12Rng::seed_from_u64(14);

        let outcome = svep(
            &problem,
            &ledger,
            y_lb,
            y_ub,
            &mut thresholds,
            10,
            &mut rng,
        )
        .unwrap();
        assert_eq!(outcome.seps, vec![0, 1]);
        assert_eq!(outcome.fe_num, 4);
    }

    #[test]
    fn psdp_recovers_ground_truth_groups() {
        let spec = BenchmarkSpec::grouped(Family::GroupSchwefel, 20, 2, 5, 3, 4);
        let (problem, ledger, y_lb, y_ub) = prepared(&spec);
        let (_, truth) = build(&spec).unwrap();
        let mut thresholds = bracket();
        let mut rng = ChaCha12Rng::seed_from_u64(21);

        let outcome = psdp(
            &problem,
            &ledger,
            y_lb,
            y_ub,
            &mut thresholds,
            10,
            &mut rng,
        )
        .unwrap();
        assert_eq!(outcome.decomposition, truth);
        assert_eq!(
            outcome.fe_num + 2,
            ledger.count(),
            "psdp accounts for everything but the two bound evaluations"
        );
    }

    #[test]
    fn psdp_merges_chained_overlap_into_one_group() {
        let spec = BenchmarkSpec::grouped(Family::ChainedOverlap, 9, 4, 3, 5, 6);
        let (problem, ledger, y_lb, y_ub) = prepared(&spec);
        let mut thresholds = bracket();
        let mut rng = ChaCha12Rng::seed_from_u64(31);

        let outcome = psdp(
            &problem,
            &ledger,
            y_lb,
            y_ub,
            &mut thresholds,
            10,
            &mut rng,
        )
        .unwrap();
        assert_eq!(outcome.decomposition.nonseps.len(), 1);
        assert_eq!(outcome.decomposition.nonseps[0], (0..9).collect::<Vec<_>>());
        assert!(outcome.decomposition.seps.is_empty());
    }

    #[test]
    fn psdp_handles_fully_nonseparable_input() {
        let spec = BenchmarkSpec::separable(Family::FullSchwefel, 10, 9, 10);
        let (problem, ledger, y_lb, y_ub) = prepared(&spec);
        let mut thresholds = bracket();
        let mut rng = ChaCha12Rng::seed_from_u64(41);

        let outcome = psdp(
            &problem,
            &ledger,
            y_lb,
            y_ub,
            &mut thresholds,
            10,
            &mut rng,
        )
        .unwrap();
        assert_eq!(outcome.decomposition, Decomposition::single_group(10));
    }

    #[test]
    fn psdp_partition_is_seed_independent_on_direct_interaction_benchmarks() {
        let spec = BenchmarkSpec::grouped(Family::GroupSchwefel, 24, 3, 6, 15, 16);
        let mut results = Vec::new();
        for seed in [1u64, 99, 12345] {
            let (problem, ledger, y_lb, y_ub) = prepared(&spec);
            let mut thresholds = bracket();
            let mut rng = ChaCha12Rng::seed_from_u64(seed);
            let outcome = psdp(
                &problem,
                &ledger,
                y_lb,
                y_ub,
                &mut thresholds,
                10,
                &mut rng,
            )
            .unwrap();
            results.push(outcome.decomposition);
        }
        assert_eq!(results[0], results[1]);
        assert_eq!(results[1], results[2]);
    }

    #[test]
    fn decomposition_partition_validation() {
        let good = Decomposition {
            nonseps: vec![vec![0, 2]],
            seps: vec![1, 3],
        };
        assert!(good.validate_partition(4).is_ok());

        let overlapping = Decomposition {
            nonseps: vec![vec![0, 1]],
            seps: vec![1],
        };
        assert!(overlapping.validate_partition(2).is_err());

        let incomplete = Decomposition {
            nonseps: vec![],
            seps: vec![0],
        };
        assert!(incomplete.validate_partition(2).is_err());
    }
}
