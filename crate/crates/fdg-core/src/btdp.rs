//! Binary-tree decomposition: find every variable of a candidate subset that
//! is interdependent with a fixed subset, halving nonseparable nodes
//! breadth-first and reusing parent and brother corner solutions so each
//! split costs exactly two new evaluations.

use std::collections::VecDeque;

use rand::Rng;
use serde::Serialize;

use crate::error::{FdgError, Result};
use crate::indicator::{judge_sep, phi, CornerReuse, CornerSample, Thresholds};
use crate::problem::{compose_from, EvaluationLedger, ObjectiveProblem};

/// A tree node: a candidate variable subset plus the four corner solutions
/// backing its indicator against the fixed subset.
#[derive(Clone, Debug)]
pub struct DetectionNode {
    pub subset: Vec<usize>,
    pub corners: CornerSample,
}

/// Per-node diagnostic record (subset probed, indicator, verdict, new
/// evaluations spent building the node's corners).
#[derive(Clone, Debug, Serialize)]
pub struct NodeTrace {
    pub subset: Vec<usize>,
    pub phi: f64,
    pub separable: bool,
    #[serde(rename = "feCost")]
    pub fe_cost: u64,
}

#[derive(Clone, Debug)]
pub struct BtdpOutcome {
    /// Variables of the candidate subset interdependent with the fixed one.
    pub interdependent: Vec<usize>,
    /// Evaluations spent: 3 for the root plus 2 per split.
    pub fe_num: u64,
    pub nodes: Vec<NodeTrace>,
}

/// Search `x2` for the variables interdependent with `x1`.
///
/// The root corners are built around the lower bound (3 evaluations, with
/// `y_lb` reused); every nonseparable, non-singleton node is halved, the left
/// child re-evaluating two corners and the right child inheriting all four.
/// Thresholds tighten monotonically through every judgment.
pub fn run(
    problem: &ObjectiveProblem,
    ledger: &EvaluationLedger,
    x1: &[usize],
    x2: &[usize],
    y_lb: f64,
    thresholds: &mut Thresholds,
    rng: &mut impl Rng,
) -> Result<BtdpOutcome> {
    if x1.is_empty() || x2.is_empty() {
        return Err(FdgError::InvalidSubsets);
    }
    let lower = problem.lower().to_vec();
    let (_, corners) = crate::indicator::sample_and_phi(
        problem,
        ledger,
        &lower,
        x1,
        x2,
        CornerReuse::base(y_lb),
    )?;

    let mut fe_num = 3u64;
    let mut interdependent = Vec::new();
    let mut nodes = Vec::new();
    let mut queue: VecDeque<(DetectionNode, u64)> = VecDeque::new();
    queue.push_back((
        DetectionNode {
            subset: x2.to_vec(),
            corners,
        },
        3,
    ));

    while let Some((node, fe_cost)) = queue.pop_front() {
        let phi_value = phi(&node.corners);
        let separable = judge_sep(phi_value, thresholds);
        nodes.push(NodeTrace {
            subset: node.subset.clone(),
            phi: phi_value,
            separable,
            fe_cost,
        });
        if separable {
            continue;
        }
        if node.subset.len() == 1 {
            interdependent.push(node.subset[0]);
            continue;
        }
        let (left, right) = split(&node, problem, ledger, rng)?;
        fe_num += 2;
        queue.push_back((left, 2));
        queue.push_back((right, 0));
    }

    interdependent.sort_unstable();
    Ok(BtdpOutcome {
        interdependent,
        fe_num,
        nodes,
    })
}

/// Halve a node's subset and derive both children's corners from the
/// parent's. The left child keeps the parent context and resets the right
/// half of its raised corners back to the lower bound (2 evaluations); the
/// right child re-centers on the left child's `x_lu` and inherits every
/// corner without any new evaluation.
pub fn split(
    parent: &DetectionNode,
    problem: &ObjectiveProblem,
    ledger: &EvaluationLedger,
    rng: &mut impl Rng,
) -> Result<(DetectionNode, DetectionNode)> {
    if parent.subset.len() < 2 {
        return Err(FdgError::InvalidSubsets);
    }
    let mut shuffled = parent.subset.clone();
    for i in (1..shuffled.len()).rev() {
        let j = rng.random_range(0..=i);
        shuffled.swap(i, j);
    }
    let left_size = shuffled.len().div_ceil(2);
    let mut x_left: Vec<usize> = shuffled[..left_size].to_vec();
    let mut x_right: Vec<usize> = shuffled[left_size..].to_vec();
    x_left.sort_unstable();
    x_right.sort_unstable();

    let lower = problem.lower();
    let left_x_lu = compose_from(&parent.corners.x_lu, &x_right, lower)?;
    let left_y_lu = problem.evaluate(ledger, &left_x_lu)?;
    let left_x_uu = compose_from(&parent.corners.x_uu, &x_right, lower)?;
    let left_y_uu = problem.evaluate(ledger, &left_x_uu)?;

    let left = DetectionNode {
        subset: x_left,
        corners: CornerSample {
            x_ll: parent.corners.x_ll.clone(),
            x_ul: parent.corners.x_ul.clone(),
            x_lu: left_x_lu,
            x_uu: left_x_uu,
            y_ll: parent.corners.y_ll,
            y_ul: parent.corners.y_ul,
            y_lu: left_y_lu,
            y_uu: left_y_uu,
        },
    };
    let right = DetectionNode {
        subset: x_right,
        corners: CornerSample {
            x_ll: left.corners.x_lu.clone(),
            x_ul: left.corners.x_uu.clone(),
            x_lu: parent.corners.x_lu.clone(),
            x_uu: parent.corners.x_uu.clone(),
            y_ll: left.corners.y_lu,
            y_ul: left.corners.y_uu,
            y_lu: parent.corners.y_lu,
            y_uu: parent.corners.y_uu,
        },
    };
    Ok((left, right))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::benchmarks::{build, BenchmarkSpec, Family};
    use crate::indicator::{corner_relations_hold, sample_and_phi, MACHINE_EPSILON};
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    fn bracket() -> Thresholds {
        Thresholds::new(1e-10, 1e-3)
    }

    fn prepared(
        spec: &BenchmarkSpec,
    ) -> (crate::problem::ObjectiveProblem, EvaluationLedger, f64) {
        let (problem, _) = build(spec).unwrap();
        let ledger = EvaluationLedger::new();
        let y_lb = problem
            .evaluate(&ledger, &problem.lower().to_vec())
            .unwrap();
        (problem, ledger, y_lb)
    }

    #[test]
    fn separable_candidate_costs_only_the_root() {
        let spec = BenchmarkSpec::grouped(Family::GroupSchwefel, 20, 2, 5, 3, 4);
        let (problem, ledger, y_lb) = prepared(&spec);
        let (_, truth) = build(&spec).unwrap();
        let mut thresholds = bracket();
        let mut rng = ChaCha12Rng::seed_from_u64(1);

        let before = ledger.count();
        let outcome = run(
            &problem,
            &ledger,
            &truth.nonseps[0],
            &truth.nonseps[1],
            y_lb,
            &mut thresholds,
            &mut rng,
        )
        .unwrap();
        assert!(outcome.interdependent.is_empty());
        assert_eq!(outcome.fe_num, 3);
        assert_eq!(ledger.count() - before, 3);
    }

    #[test]
    fn singleton_candidate_is_a_leaf() {
        let spec = BenchmarkSpec::separable(Family::FullSchwefel, 8, 5, 6);
        let (problem, ledger, y_lb) = prepared(&spec);
        let mut thresholds = bracket();
        let mut rng = ChaCha12Rng::seed_from_u64(2);

        let outcome = run(
            &problem,
            &ledger,
            &[0],
            &[5],
            y_lb,
            &mut thresholds,
            &mut rng,
        )
        .unwrap();
        assert_eq!(outcome.interdependent, vec![5]);
        assert_eq!(outcome.fe_num, 3);
    }

    #[test]
    fn fully_interacting_group_costs_three_plus_two_per_split() {
        // 7 interacting candidates: every internal node splits, 7 leaves need
        // 6 splits, so 3 + 2*6 = 15 evaluations.
        let spec = BenchmarkSpec::separable(Family::FullSchwefel, 8, 7, 8);
        let (problem, ledger, y_lb) = prepared(&spec);
        let mut thresholds = bracket();
        let mut rng = ChaCha12Rng::seed_from_u64(3);

        let x2: Vec<usize> = (1..8).collect();
        let before = ledger.count();
        let outcome = run(
            &problem,
            &ledger,
            &[0],
            &x2,
            y_lb,
            &mut thresholds,
            &mut rng,
        )
        .unwrap();
        assert_eq!(outcome.interdependent, x2);
        assert_eq!(outcome.fe_num, 15);
        assert_eq!(ledger.count() - before, 15);
    }

    #[test]
    fn fe_accounting_matches_trace() {
        let spec = BenchmarkSpec::grouped(Family::GroupSchwefel, 24, 3, 6, 11, 12);
        let (problem, ledger, y_lb) = prepared(&spec);
        let (_, truth) = build(&spec).unwrap();
        let mut thresholds = bracket();
        let mut rng = ChaCha12Rng::seed_from_u64(4);

        let x1 = vec![truth.nonseps[1][0]];
        let x2: Vec<usize> = (0..24).filter(|v| *v != x1[0]).collect();
        let outcome = run(
            &problem,
            &ledger,
            &x1,
            &x2,
            y_lb,
            &mut thresholds,
            &mut rng,
        )
        .unwrap();

        let splits = outcome
            .nodes
            .iter()
            .filter(|n| !n.separable && n.subset.len() > 1)
            .count() as u64;
        assert_eq!(outcome.fe_num, 3 + 2 * splits);
        let traced: u64 = outcome.nodes.iter().map(|n| n.fe_cost).sum();
        assert_eq!(outcome.fe_num, traced);

        // The found set is exactly the rest of x1's ground-truth group.
        let expected: Vec<usize> = truth.nonseps[1]
            .iter()
            .copied()
            .filter(|v| *v != x1[0])
            .collect();
        assert_eq!(outcome.interdependent, expected);
    }

    #[test]
    fn found_variables_are_individually_nonseparable_from_x1() {
        let spec = BenchmarkSpec::grouped(Family::GroupSchwefel, 20, 2, 5, 13, 14);
        let (problem, ledger, y_lb) = prepared(&spec);
        let (_, truth) = build(&spec).unwrap();
        let mut thresholds = bracket();
        let mut rng = ChaCha12Rng::seed_from_u64(5);

        let x1 = vec![truth.nonseps[0][0]];
        let x2: Vec<usize> = (0..20).filter(|v| *v != x1[0]).collect();
        let outcome = run(
            &problem,
            &ledger,
            &x1,
            &x2,
            y_lb,
            &mut thresholds,
            &mut rng,
        )
        .unwrap();

        // Re-test each returned variable with fresh corners on a side ledger.
        let side = EvaluationLedger::new();
        for &v in &outcome.interdependent {
            let (phi_value, _) = sample_and_phi(
                &problem,
                &side,
                &problem.lower().to_vec(),
                &x1,
                &[v],
                CornerReuse::base(y_lb),
            )
            .unwrap();
            let mut t = bracket();
            assert!(!judge_sep(phi_value, &mut t), "variable {v} re-judged separable");
        }
    }

    #[test]
    fn split_preserves_corner_relations_and_partition() {
        let spec = BenchmarkSpec::separable(Family::FullSchwefel, 10, 21, 22);
        let (problem, ledger, y_lb) = prepared(&spec);
        let mut rng = ChaCha12Rng::seed_from_u64(6);

        let x1 = vec![0usize, 1];
        let x2: Vec<usize> = (2..10).collect();
        let lower = problem.lower().to_vec();
        let (_, corners) = sample_and_phi(
            &problem,
            &ledger,
            &lower,
            &x1,
            &x2,
            CornerReuse::base(y_lb),
        )
        .unwrap();
        let parent = DetectionNode {
            subset: x2.clone(),
            corners,
        };

        let before = ledger.count();
        let (left, right) = split(&parent, &problem, &ledger, &mut rng).unwrap();
        assert_eq!(ledger.count() - before, 2);

        let mut union: Vec<usize> = left.subset.iter().chain(&right.subset).copied().collect();
        union.sort_unstable();
        assert_eq!(union, parent.subset);
        assert_eq!(left.subset.len(), 4);
        assert!(left.subset.iter().all(|v| !right.subset.contains(v)));

        let upper = problem.upper();
        assert!(corner_relations_hold(&left.corners, &x1, &left.subset, upper));
        assert!(corner_relations_hold(&right.corners, &x1, &right.subset, upper));
        assert_eq!(right.corners.x_ll, left.corners.x_lu);
        assert_eq!(right.corners.x_ul, left.corners.x_uu);

        // Inherited fitness values are bit-exact evaluator outputs.
        let side = EvaluationLedger::new();
        for (x, y) in [
            (&right.corners.x_ll, right.corners.y_ll),
            (&right.corners.x_ul, right.corners.y_ul),
            (&right.corners.x_lu, right.corners.y_lu),
            (&right.corners.x_uu, right.corners.y_uu),
            (&left.corners.x_lu, left.corners.y_lu),
            (&left.corners.x_uu, left.corners.y_uu),
        ] {
            assert_eq!(problem.evaluate(&side, x).unwrap(), y);
        }
    }

    #[test]
    fn split_rejects_singleton_parent() {
        let spec = BenchmarkSpec::separable(Family::FullSchwefel, 4, 1, 1);
        let (problem, ledger, y_lb) = prepared(&spec);
        let mut rng = ChaCha12Rng::seed_from_u64(7);
        let (_, corners) = sample_and_phi(
            &problem,
            &ledger,
            &problem.lower().to_vec(),
            &[0],
            &[1],
            CornerReuse::base(y_lb),
        )
        .unwrap();
        let parent = DetectionNode {
            subset: vec![1],
            corners,
        };
        assert!(split(&parent, &problem, &ledger, &mut rng).is_err());
    }

    #[test]
    fn run_rejects_empty_subsets() {
        let spec = BenchmarkSpec::separable(Family::FullSchwefel, 4, 1, 1);
        let (problem, ledger, y_lb) = prepared(&spec);
        let mut rng = ChaCha12Rng::seed_from_u64(8);
        let mut t = bracket();
        assert!(run(&problem, &ledger, &[], &[1], y_lb, &mut t, &mut rng).is_err());
        assert!(run(&problem, &ledger, &[0], &[], y_lb, &mut t, &mut rng).is_err());
        let _ = MACHINE_EPSILON;
    }
}
