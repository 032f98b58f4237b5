//! Cooperative coevolution: round-robin optimization of decomposed
//! subproblems with a differential-evolution optimizer working through a
//! shared context solution.

use rand::Rng;

use crate::error::{FdgError, Result};
use crate::problem::{compose, EvaluationLedger, ObjectiveProblem, Solution};
use crate::psdp::Decomposition;

/// How separable variables map onto subproblems.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SeparableGrouping {
    /// Each separable variable is its own one-dimensional subproblem.
    Singletons,
    /// All separable variables form a single subproblem.
    Whole,
}

#[derive(Clone, Copy, Debug)]
pub struct DeParams {
    pub pop_size: usize,
    pub scale: f64,
    pub crossover: f64,
    pub generations_per_cycle: usize,
    pub separable_grouping: SeparableGrouping,
}

impl Default for DeParams {
    fn default() -> Self {
        Self {
            pop_size: 25,
            scale: 0.5,
            crossover: 0.9,
            generations_per_cycle: 1,
            separable_grouping: SeparableGrouping::Singletons,
        }
    }
}

/// Population over one variable subset; fitness values are cached from the
/// embedding into the context at evaluation time.
#[derive(Clone, Debug)]
pub struct Subpopulation {
    pub subset: Vec<usize>,
    pub members: Vec<Vec<f64>>,
    pub fitnesses: Vec<f64>,
}

#[derive(Clone, Copy, Debug)]
pub struct TracePoint {
    pub fe_num: u64,
    pub best_fitness: f64,
}

#[derive(Clone, Debug)]
pub struct CcOutcome {
    pub best: Solution,
    pub trace: Vec<TracePoint>,
    /// Set when the budget ran out before one full round-robin cycle.
    pub truncated: bool,
}

fn subproblem_subsets(
    decomposition: &Decomposition,
    grouping: SeparableGrouping,
) -> Vec<Vec<usize>> {
    let mut subsets: Vec<Vec<usize>> = decomposition.nonseps.clone();
    match grouping {
        SeparableGrouping::Singletons => {
            subsets.extend(decomposition.seps.iter().map(|&v| vec![v]));
        }
        SeparableGrouping::Whole => {
            if !decomposition.seps.is_empty() {
                subsets.push(decomposition.seps.clone());
            }
        }
    }
    subsets
}

fn evals_left(ledger: &EvaluationLedger, budget: u64) -> u64 {
    budget.saturating_sub(ledger.count())
}

/// One differential-evolution pass (rand/1 with binomial crossover) over a
/// subpopulation, evaluating trials by embedding them into the shared
/// context. Selection is greedy per member; the context is updated whenever
/// a full evaluation improves on it. Returns true when the budget ran out
/// mid-pass.
#[allow(clippy::too_many_arguments)]
pub fn de_optimizer(
    problem: &ObjectiveProblem,
    ledger: &EvaluationLedger,
    budget: u64,
    context: &mut Solution,
    pop: &mut Subpopulation,
    generations: usize,
    params: &DeParams,
    rng: &mut impl Rng,
) -> Result<bool> {
    let size = pop.members.len();
    if size < 4 {
        return Err(FdgError::InvalidSpec(
            "differential evolution needs a population of at least 4".into(),
        ));
    }
    let dims = pop.subset.len();
    for _ in 0..generations {
        for i in 0..size {
            if evals_left(ledger, budget) == 0 {
                return Ok(true);
            }
            let mut distinct = [0usize; 3];
            for slot in 0..3 {
                loop {
                    let r = rng.random_range(0..size);
                    if r != i && !distinct[..slot].contains(&r) {
                        distinct[slot] = r;
                        break;
                    }
                }
            }
            let [r1, r2, r3] = distinct;
            let mut trial = pop.members[i].clone();
            for d in 0..dims {
                if rng.random::<f64>() < params.crossover {
                    let v = pop.members[r1][d]
                        + params.scale * (pop.members[r2][d] - pop.members[r3][d]);
                    let idx = pop.subset[d];
                    trial[d] = v.clamp(problem.lower()[idx], problem.upper()[idx]);
                }
            }
            let candidate = compose(&context.values, &pop.subset, &trial)?;
            let fitness = problem.evaluate(ledger, &candidate)?;
            if fitness <= pop.fitnesses[i] {
                pop.members[i] = trial;
                pop.fitnesses[i] = fitness;
            }
            if context.fitness.is_none_or(|best| fitness < best) {
                context.values = candidate;
                context.fitness = Some(fitness);
            }
        }
    }
    Ok(false)
}

/// Round-robin cooperative coevolution over the decomposition's subproblems.
///
/// The context starts from the best of `pop_size` uniform samples, each
/// subproblem holds a `pop_size` population over its subset, and subproblems
/// are optimized in turn until the ledger reaches `budget` (which includes
/// whatever the ledger was already charged, e.g. the decomposition cost).
pub fn decc_optimize(
    problem: &ObjectiveProblem,
    ledger: &EvaluationLedger,
    decomposition: &Decomposition,
    budget: u64,
    params: &DeParams,
    rng: &mut impl Rng,
) -> Result<CcOutcome> {
    let n = problem.dimension();
    decomposition.validate_partition(n)?;
    if evals_left(ledger, budget) == 0 {
        return Err(FdgError::InvalidSpec(
            "budget leaves no evaluations for optimization".into(),
        ));
    }
    let subsets = subproblem_subsets(decomposition, params.separable_grouping);
    let mut trace: Vec<TracePoint> = Vec::new();
    let record = |ledger: &EvaluationLedger, best: f64, trace: &mut Vec<TracePoint>| {
        let fe_num = ledger.count();
        if trace.last().is_none_or(|t| t.fe_num < fe_num) {
            trace.push(TracePoint {
                fe_num,
                best_fitness: best,
            });
        }
    };

    let uniform = |rng: &mut dyn rand::RngCore, idx: usize, problem: &ObjectiveProblem| -> f64 {
        rng.random_range(problem.lower()[idx]..=problem.upper()[idx])
    };

    // Context: best of a pop_size-sized uniform sample.
    let mut context = Solution::unevaluated(problem.lower().to_vec());
    for _ in 0..params.pop_size {
        if evals_left(ledger, budget) == 0 {
            break;
        }
        let candidate: Vec<f64> = (0..n).map(|i| uniform(rng, i, problem)).collect();
        let fitness = problem.evaluate(ledger, &candidate)?;
        if context.fitness.is_none_or(|best| fitness < best) {
            context = Solution::evaluated(candidate, fitness);
        }
    }
    if context.fitness.is_none() {
        return Ok(CcOutcome {
            best: context,
            trace,
            truncated: true,
        });
    }
    record(ledger, context.fitness.unwrap(), &mut trace);

    // Subpopulations, evaluated through the context.
    let mut subpops = Vec::with_capacity(subsets.len());
    let mut exhausted = false;
    'init: for subset in &subsets {
        let mut members = Vec::with_capacity(params.pop_size);
        let mut fitnesses = Vec::with_capacity(params.pop_size);
        for _ in 0..params.pop_size {
            if evals_left(ledger, budget) == 0 {
                exhausted = true;
                break 'init;
            }
            let member: Vec<f64> = subset.iter().map(|&i| uniform(rng, i, problem)).collect();
            let candidate = compose(&context.values, subset, &member)?;
            let fitness = problem.evaluate(ledger, &candidate)?;
            if context.fitness.is_none_or(|best| fitness < best) {
                context = Solution::evaluated(candidate, fitness);
            }
            members.push(member);
            fitnesses.push(fitness);
        }
        subpops.push(Subpopulation {
            subset: subset.clone(),
            members,
            fitnesses,
        });
    }
    record(ledger, context.fitness.unwrap(), &mut trace);

    let mut completed_cycles = 0usize;
    if !exhausted {
        'outer: loop {
            for pop in &mut subpops {
                let out = de_optimizer(
                    problem,
                    ledger,
                    budget,
                    &mut context,
                    pop,
                    params.generations_per_cycle,
                    params,
                    rng,
                )?;
                record(ledger, context.fitness.unwrap(), &mut trace);
                if out {
                    break 'outer;
                }
            }
            completed_cycles += 1;
            if evals_left(ledger, budget) == 0 {
                break;
            }
        }
    }

    Ok(CcOutcome {
        best: context,
        trace,
        truncated: completed_cycles == 0,
    })
}

/// Baseline: plain differential evolution over the whole vector, i.e. the
/// degenerate decomposition with a single group.
pub fn monolithic_de(
    problem: &ObjectiveProblem,
    ledger: &EvaluationLedger,
    budget: u64,
    params: &DeParams,
    rng: &mut impl Rng,
) -> Result<CcOutcome> {
    let trivial = Decomposition::single_group(problem.dimension());
    decc_optimize(problem, ledger, &trivial, budget, params, rng)
}
