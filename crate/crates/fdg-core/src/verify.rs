//! Self-contained verification suites behind the CLI's `verify` subcommand:
//! probability formulas against Monte Carlo and exhaustive enumeration,
//! indicator soundness on benchmarks with known structure, the
//! mutual-information fixtures, and the evaluation-count scaling bound.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

use crate::analysis::{
    self, bernoulli_sigma, enumerate_p_s1_exact, mc_p_n1, mc_p_n2, mc_p_s1, mc_p_s2, mc_p_s3,
};
use crate::benchmarks::{build, BenchmarkSpec, Family};
use crate::error::Result;
use crate::fdg::{decompose, FdgConfig};
use crate::indicator::{judge_sep, sample_and_phi, CornerReuse, Thresholds, MACHINE_EPSILON};
use crate::problem::EvaluationLedger;
use crate::psdp::Decomposition;

/// One named pass/fail line.
#[derive(Clone, Debug)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            passed,
            detail: detail.into(),
        }
    }
}

const MC_SAMPLES: u64 = 1_000_000;

/// Selection-probability formulas against Monte Carlo (3 standard errors),
/// exhaustive enumeration (exact), and the published worked values.
pub fn probabilities_suite(seed: u64) -> Result<Vec<Check>> {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut checks = Vec::new();

    let parameterizations: [(usize, Vec<usize>); 10] = [
        (8, vec![2, 2]),
        (8, vec![3, 2]),
        (10, vec![2, 2, 2]),
        (12, vec![3, 4]),
        (12, vec![6]),
        (16, vec![4, 4]),
        (20, vec![5, 5]),
        (24, vec![6, 6]),
        (24, vec![3, 3, 4]),
        (24, vec![12]),
    ];

    for (n, sizes) in &parameterizations {
        let n = *n;
        let label = format!("n={n} sizes={sizes:?}");
        let mut within = |name: &str, p: f64, estimate: f64| {
            let sigma = bernoulli_sigma(p, MC_SAMPLES).max(f64::EPSILON);
            let ok = (estimate - p).abs() <= 3.0 * sigma;
            checks.push(Check::new(
                format!("mc {name} {label}"),
                ok,
                format!("formula {p:.6e} vs mc {estimate:.6e} (3 sigma = {:.2e})", 3.0 * sigma),
            ));
        };

        let p = analysis::p_s1(n, sizes)?;
        within("p_s1", p, mc_p_s1(n, sizes, MC_SAMPLES, &mut rng)?);
        within(
            "p_n1(l=3)",
            analysis::p_n1(p, 3),
            mc_p_n1(n, sizes, 3, MC_SAMPLES, &mut rng)?,
        );
        let p = analysis::p_n2(n, sizes)?;
        within("p_n2", p, mc_p_n2(n, sizes, MC_SAMPLES, &mut rng)?);
        within(
            "p_s2(l=3)",
            analysis::p_s2(p, 3),
            mc_p_s2(n, sizes, 3, MC_SAMPLES, &mut rng)?,
        );
        let n_n: usize = sizes.iter().sum();
        let p_exact = analysis::p_s3_exact(n, n_n, 4)?;
        let p = num_traits::ToPrimitive::to_f64(&p_exact).unwrap();
        within("p_s3(l=4)", p, mc_p_s3(n, n_n, 4, MC_SAMPLES, &mut rng)?);
        let bound_ok = p >= analysis::p_s3_lower_bound(n, n_n, 4) - 1e-12;
        checks.push(Check::new(
            format!("p_s3 bound {label}"),
            bound_ok,
            "exact probability at or above 1 - (n_n/n)^l".to_string(),
        ));
    }

    for (n, sizes) in parameterizations.iter().filter(|(n, _)| *n <= 12) {
        let formula = analysis::p_s1_exact(*n, sizes)?;
        let enumerated = enumerate_p_s1_exact(*n, sizes)?;
        checks.push(Check::new(
            format!("enumeration p_s1 n={n} sizes={sizes:?}"),
            formula == enumerated,
            format!("{formula} vs {enumerated}"),
        ));
    }

    // Published worked values: one 50-group in 1000 variables bounds the
    // separable-halving probability by 2^-49; twenty 50-groups give a
    // nonseparable-pair probability of 49/999, about 0.049.
    let exact = analysis::p_s1_exact(1000, &[50])?;
    let bound = num_rational::BigRational::new(1.into(), num_bigint::BigInt::from(2).pow(49));
    checks.push(Check::new(
        "worked value p_s1(1000, 1x50) <= 2^-49",
        exact <= bound,
        format!("p_s1 = {:.3e}", num_traits::ToPrimitive::to_f64(&exact).unwrap()),
    ));
    let p = analysis::p_n2(1000, &[50; 20])?;
    checks.push(Check::new(
        "worked value p_n2(1000, 20x50) ~ 0.049",
        (p - 0.049).abs() < 1e-3,
        format!("p_n2 = {p:.6}"),
    ));

    Ok(checks)
}

fn random_subset_from_blocks(
    blocks: &[Vec<usize>],
    rng: &mut impl Rng,
) -> Vec<usize> {
    let mut out = Vec::new();
    for block in blocks {
        for &v in block {
            if rng.random_bool(0.5) {
                out.push(v);
            }
        }
    }
    if out.is_empty() {
        out.push(blocks[0][0]);
    }
    out.sort_unstable();
    out
}

/// Indicator soundness over benchmarks of known structure: cross-group
/// subset pairs must come out at machine precision (or at least be judged
/// separable), within-group pairs must be judged nonseparable.
pub fn indicators_suite(seed: u64) -> Result<Vec<Check>> {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let instances = [
        BenchmarkSpec::grouped(Family::GroupSchwefel, 30, 3, 6, 7, 8),
        BenchmarkSpec::grouped(Family::GroupSchwefel, 32, 4, 8, 9, 10),
    ];

    let mut cross_total = 0u64;
    let mut cross_separable = 0u64;
    let mut within_total = 0u64;
    let mut within_nonseparable = 0u64;

    for spec in &instances {
        let (problem, truth) = build(spec)?;
        let ledger = EvaluationLedger::new();
        let lower = problem.lower().to_vec();
        let y_lb = problem.evaluate(&ledger, &lower)?;
        let blocks = truth.as_partition();

        for _ in 0..500 {
            // Cross-group pair: split the blocks in two, draw a subset from
            // each side; no block straddles the pair.
            let mut order: Vec<usize> = (0..blocks.len()).collect();
            for i in (1..order.len()).rev() {
                let j = rng.random_range(0..=i);
                order.swap(i, j);
            }
            let cut = 1 + rng.random_range(0..order.len() - 1);
            let left: Vec<Vec<usize>> = order[..cut].iter().map(|&b| blocks[b].clone()).collect();
            let right: Vec<Vec<usize>> = order[cut..].iter().map(|&b| blocks[b].clone()).collect();
            let xi = random_subset_from_blocks(&left, &mut rng);
            let xj = random_subset_from_blocks(&right, &mut rng);
            let (phi_value, _) =
                sample_and_phi(&problem, &ledger, &lower, &xi, &xj, CornerReuse::base(y_lb))?;
            let mut t = Thresholds::new(1e-10, 1e-3);
            cross_total += 1;
            if phi_value == MACHINE_EPSILON || judge_sep(phi_value, &mut t) {
                cross_separable += 1;
            }

            // Within-group pair: two disjoint pieces of one ground-truth
            // group.
            let group = &truth.nonseps[rng.random_range(0..truth.nonseps.len())];
            let cut = 1 + rng.random_range(0..group.len() - 1);
            let xi: Vec<usize> = group[..cut].to_vec();
            let xj: Vec<usize> = group[cut..].to_vec();
            let (phi_value, _) =
                sample_and_phi(&problem, &ledger, &lower, &xi, &xj, CornerReuse::base(y_lb))?;
            let mut t = Thresholds::new(1e-10, 1e-3);
            within_total += 1;
            if !judge_sep(phi_value, &mut t) {
                within_nonseparable += 1;
            }
        }
    }

    let cross_rate = cross_separable as f64 / cross_total as f64;
    let within_rate = within_nonseparable as f64 / within_total as f64;
    Ok(vec![
        Check::new(
            "cross-group pairs judged separable",
            cross_rate >= 0.999,
            format!("{cross_separable}/{cross_total} ({:.3}%)", cross_rate * 100.0),
        ),
        Check::new(
            "within-group pairs judged nonseparable",
            within_rate == 1.0,
            format!("{within_nonseparable}/{within_total}"),
        ),
    ])
}

/// Mutual-information fixtures.
pub fn nmi_suite() -> Result<Vec<Check>> {
    let mut checks = Vec::new();

    let d = Decomposition {
        nonseps: vec![vec![0, 2], vec![1, 3]],
        seps: vec![4],
    };
    let identity = analysis::nmi(&d, &d, 5)?;
    checks.push(Check::new(
        "identical partitions score 100",
        identity == 100.0,
        format!("nmi = {identity}"),
    ));

    let pairs = Decomposition {
        nonseps: vec![vec![0, 1], vec![2, 3]],
        seps: vec![],
    };
    let singletons = Decomposition::fully_separable(4);
    let value = analysis::nmi(&pairs, &singletons, 4)?;
    checks.push(Check::new(
        "pairs vs singletons fixture",
        (value - 200.0 / 3.0).abs() < 1e-9,
        format!("nmi = {value:.9} (expected 66.666666667)"),
    ));

    let a = Decomposition {
        nonseps: vec![vec![0, 1, 2], vec![5, 6]],
        seps: vec![3, 4],
    };
    let b = Decomposition {
        nonseps: vec![vec![0, 1], vec![2, 5]],
        seps: vec![3, 4, 6],
    };
    let ab = analysis::nmi(&a, &b, 7)?;
    let ba = analysis::nmi(&b, &a, 7)?;
    checks.push(Check::new(
        "symmetry",
        ab == ba && (0.0..=100.0).contains(&ab),
        format!("nmi = {ab:.6}"),
    ));

    Ok(checks)
}

/// Evaluation-count scaling: decompose k = n/16 equal groups with no
/// separable remainder and compare against the worst-case bound
/// 2n log2(k) + 2n + k + 72, plus a sub-quadratic growth ratio test.
pub fn complexity_suite(seed: u64) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    let mut observed = Vec::new();
    for &n in &[64usize, 256, 1024] {
        let k = n / 16;
        let spec = BenchmarkSpec::grouped(Family::GroupSchwefel, n, k, 16, seed ^ n as u64, 77);
        let (problem, truth) = build(&spec)?;
        let ledger = EvaluationLedger::new();
        let mut rng = ChaCha12Rng::seed_from_u64(seed.wrapping_add(n as u64));
        let outcome = decompose(&problem, &ledger, &FdgConfig::default(), &mut rng)?;
        let bound = 2.0 * n as f64 * (k as f64).log2() + 2.0 * n as f64 + k as f64 + 72.0;
        let fe = outcome.fe_num as f64;
        observed.push(fe);
        let exact = analysis::nmi(&outcome.decomposition, &truth, n)? == 100.0;
        checks.push(Check::new(
            format!("fe bound n={n} k={k}"),
            fe <= bound && exact,
            format!("observed {fe} <= bound {bound:.1}, decomposition exact: {exact}"),
        ));
    }
    for w in observed.windows(2) {
        let ratio = w[1] / w[0];
        checks.push(Check::new(
            "sub-quadratic growth",
            ratio < 16.0,
            format!("fe ratio {:.2} for 4x dimension (quadratic would be 16)", ratio),
        ));
    }
    Ok(checks)
}
