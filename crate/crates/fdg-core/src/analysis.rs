//! Verification instruments: an O(n^2) pairwise-oracle decomposer, the
//! normalized-mutual-information accuracy metric, and the selection-rule
//! probability formulas with Monte Carlo and exhaustive counterparts.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::Rng;

use crate::error::{FdgError, Result};
use crate::idap::{analyze, SeparabilityType};
use crate::indicator::{sample_and_phi, CornerReuse};
use crate::problem::{EvaluationLedger, ObjectiveProblem};
use crate::psdp::Decomposition;

/// Default dimension cap for the pairwise oracle; it spends O(n^2)
/// evaluations by design.
pub const DEFAULT_ORACLE_CAP: usize = 128;

struct UnionFind {
    parent: Vec<usize>,
    rank: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
            rank: vec![0; n],
        }
    }

    fn find(&mut self, x: usize) -> usize {
        if self.parent[x] != x {
            self.parent[x] = self.find(self.parent[x]);
        }
        self.parent[x]
    }

    fn union(&mut self, x: usize, y: usize) {
        let (rx, ry) = (self.find(x), self.find(y));
        if rx == ry {
            return;
        }
        if self.rank[rx] < self.rank[ry] {
            self.parent[rx] = ry;
        } else if self.rank[rx] > self.rank[ry] {
            self.parent[ry] = rx;
        } else {
            self.parent[ry] = rx;
            self.rank[rx] += 1;
        }
    }
}

/// Decompose by probing every variable pair with fresh corners, classifying
/// the full pair-indicator multiset, and taking the transitive closure of the
/// nonseparable pairs. The ledger should be budget-free; the cost is
/// quadratic on purpose.
pub fn pairwise_oracle(
    problem: &ObjectiveProblem,
    ledger: &EvaluationLedger,
    cap: usize,
    gap_factor: f64,
) -> Result<Decomposition> {
    let n = problem.dimension();
    if n > cap {
        return Err(FdgError::OracleCapExceeded { dimension: n, cap });
    }
    if n == 1 {
        return Ok(Decomposition::fully_separable(1));
    }

    let lower = problem.lower().to_vec();
    let y_lb = problem.evaluate(ledger, &lower)?;
    let mut pairs = Vec::with_capacity(n * (n - 1) / 2);
    let mut phis = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in (i + 1)..n {
            let (phi_value, _) =
                sample_and_phi(problem, ledger, &lower, &[i], &[j], CornerReuse::base(y_lb))?;
            pairs.push((i, j));
            phis.push(phi_value);
        }
    }

    let verdict = analyze(&phis, gap_factor)?;
    match verdict.kind {
        SeparabilityType::FullySeparable => Ok(Decomposition::fully_separable(n)),
        SeparabilityType::Nonseparable => Ok(Decomposition::single_group(n)),
        SeparabilityType::PartiallySeparable => {
            let thresholds = verdict.thresholds.expect("ps carries thresholds");
            let mut dsu = UnionFind::new(n);
            for (&(i, j), &phi_value) in pairs.iter().zip(&phis) {
                if phi_value >= thresholds.phi_n {
                    dsu.union(i, j);
                }
            }
            let mut members: Vec<Vec<usize>> = vec![Vec::new(); n];
            for v in 0..n {
                let root = dsu.find(v);
                members[root].push(v);
            }
            let mut nonseps = Vec::new();
            let mut seps = Vec::new();
            for group in members {
                match group.len() {
                    0 => {}
                    1 => seps.push(group[0]),
                    _ => nonseps.push(group),
                }
            }
            Ok(Decomposition { nonseps, seps }.normalized())
        }
    }
}

/// Normalized mutual information between two decompositions of the same `n`
/// variables, in percent. Separable variables count as singleton blocks.
/// Identical partitions score exactly 100.
pub fn nmi(d1: &Decomposition, d2: &Decomposition, n: usize) -> Result<f64> {
    d1.validate_partition(n)?;
    d2.validate_partition(n)?;
    let a = d1.clone().normalized();
    let b = d2.clone().normalized();
    if a == b {
        return Ok(100.0);
    }

    let blocks1 = a.as_partition();
    let blocks2 = b.as_partition();
    let mut block_of = vec![0usize; n];
    for (j, block) in blocks2.iter().enumerate() {
        for &v in block {
            block_of[v] = j;
        }
    }
    let mut confusion = vec![vec![0u64; blocks2.len()]; blocks1.len()];
    for (i, block) in blocks1.iter().enumerate() {
        for &v in block {
            confusion[i][block_of[v]] += 1;
        }
    }
    let rows: Vec<u64> = confusion.iter().map(|r| r.iter().sum()).collect();
    let cols: Vec<u64> = (0..blocks2.len())
        .map(|j| confusion.iter().map(|r| r[j]).sum())
        .collect();

    let nf = n as f64;
    let mut numerator = 0.0;
    for (i, row) in confusion.iter().enumerate() {
        for (j, &m) in row.iter().enumerate() {
            if m > 0 {
                let m = m as f64;
                numerator += m * (nf * m / (rows[i] as f64 * cols[j] as f64)).log2();
            }
        }
    }
    numerator *= -2.0;
    let denominator: f64 = rows
        .iter()
        .map(|&m| m as f64 * (m as f64 / nf).log2())
        .sum::<f64>()
        + cols
            .iter()
            .map(|&m| m as f64 * (m as f64 / nf).log2())
            .sum::<f64>();
    if denominator == 0.0 {
        // Both partitions are a single block over the same set, which the
        // equality check above already classified; unreachable in practice.
        return Ok(100.0);
    }
    Ok((numerator / denominator * 100.0).clamp(0.0, 100.0))
}

/// Binomial coefficient with the convention that out-of-range arguments give
/// zero (p < 0, q < 0, or p < q).
pub fn binomial(p: i64, q: i64) -> BigInt {
    if p < 0 || q < 0 || p < q {
        return BigInt::zero();
    }
    let (p, q) = (p as u64, q as u64);
    let q = q.min(p - q);
    let mut result = BigInt::one();
    for i in 0..q {
        result = result * BigInt::from(p - i) / BigInt::from(i + 1);
    }
    result
}

fn validate_sizes(n: usize, sizes: &[usize]) -> Result<usize> {
    if n == 0 {
        return Err(FdgError::InvalidProbability("n must be positive".into()));
    }
    let total: usize = sizes.iter().sum();
    if sizes.iter().any(|&s| s < 2) {
        return Err(FdgError::InvalidProbability(
            "group sizes must be at least 2".into(),
        ));
    }
    if total > n {
        return Err(FdgError::InvalidProbability(format!(
            "groups cover {total} > n = {n} variables"
        )));
    }
    Ok(n - total)
}

/// Probability that a uniformly random floor(n/2)-subset leaves every
/// nonseparable group intact (exact rational arithmetic). Summing over which
/// groups land inside the selected half, the selections that work choose the
/// remainder from the separable variables.
pub fn p_s1_exact(n: usize, sizes: &[usize]) -> Result<BigRational> {
    let n_s = validate_sizes(n, sizes)?;
    let half = (n / 2) as i64;

    // Subset-sum counts over group sizes: ways[total] = number of group
    // subsets with that combined size.
    let mut ways: Vec<BigInt> = vec![BigInt::zero(); n + 1];
    ways[0] = BigInt::one();
    for &s in sizes {
        for total in (s..=n).rev() {
            let add = ways[total - s].clone();
            ways[total] += add;
        }
    }

    let mut numerator = BigInt::zero();
    for (total, count) in ways.iter().enumerate() {
        if !count.is_zero() {
            numerator += count * binomial(n_s as i64, half - total as i64);
        }
    }
    let denominator = binomial(n as i64, half);
    Ok(BigRational::new(numerator, denominator))
}

pub fn p_s1(n: usize, sizes: &[usize]) -> Result<f64> {
    Ok(p_s1_exact(n, sizes)?.to_f64().unwrap_or(0.0))
}

/// Equal-size special case: k groups of s variables each.
pub fn p_s1_uniform_exact(n: usize, k: usize, s: usize) -> Result<BigRational> {
    let sizes = vec![s; k];
    let n_s = validate_sizes(n, &sizes)?;
    let half = (n / 2) as i64;
    let mut numerator = BigInt::zero();
    for i in 0..=k {
        numerator +=
            binomial(k as i64, i as i64) * binomial(n_s as i64, half - (i * s) as i64);
    }
    Ok(BigRational::new(numerator, binomial(n as i64, half)))
}

pub fn p_s1_uniform(n: usize, k: usize, s: usize) -> Result<f64> {
    Ok(p_s1_uniform_exact(n, k, s)?.to_f64().unwrap_or(0.0))
}

/// Probability that at least one of `l` independent halvings splits a
/// nonseparable group.
pub fn p_n1(p_s1: f64, l: u32) -> f64 {
    1.0 - p_s1.powi(l as i32)
}

/// Probability that two distinct uniformly random variables belong to the
/// same nonseparable group (exact).
pub fn p_n2_exact(n: usize, sizes: &[usize]) -> Result<BigRational> {
    validate_sizes(n, sizes)?;
    if n < 2 {
        return Err(FdgError::InvalidProbability("n must be at least 2".into()));
    }
    let numerator: BigInt = sizes
        .iter()
        .map(|&s| binomial(s as i64, 2))
        .fold(BigInt::zero(), |acc, c| acc + c);
    Ok(BigRational::new(numerator, binomial(n as i64, 2)))
}

pub fn p_n2(n: usize, sizes: &[usize]) -> Result<f64> {
    Ok(p_n2_exact(n, sizes)?.to_f64().unwrap_or(0.0))
}

/// Probability that at least one of `l` random variable pairs is separable.
pub fn p_s2(p_n2: f64, l: u32) -> f64 {
    1.0 - p_n2.powi(l as i32)
}

/// Exact probability that `l` distinct random variables include at least one
/// separable variable: 1 - C(n_n, l) / C(n, l).
pub fn p_s3_exact(n: usize, n_n: usize, l: usize) -> Result<BigRational> {
    if n == 0 || n_n > n || l == 0 || l > n {
        return Err(FdgError::InvalidProbability(format!(
            "need 0 < l <= n and n_n <= n, got n = {n}, n_n = {n_n}, l = {l}"
        )));
    }
    let all = binomial(n as i64, l as i64);
    let nonsep_only = binomial(n_n as i64, l as i64);
    Ok(BigRational::one() - BigRational::new(nonsep_only, all))
}

/// The printed lower bound for the separable-variable find probability,
/// 1 - (n_n / n)^l.
pub fn p_s3_lower_bound(n: usize, n_n: usize, l: u32) -> f64 {
    1.0 - (n_n as f64 / n as f64).powi(l as i32)
}

fn partial_shuffle(buffer: &mut [usize], take: usize, rng: &mut impl Rng) {
    let n = buffer.len();
    for i in 0..take.min(n.saturating_sub(1)) {
        let j = rng.random_range(i..n);
        buffer.swap(i, j);
    }
}

fn group_ids(n: usize, sizes: &[usize]) -> Vec<isize> {
    let mut ids = vec![-1isize; n];
    let mut cursor = 0;
    for (g, &s) in sizes.iter().enumerate() {
        for v in cursor..cursor + s {
            ids[v] = g as isize;
        }
        cursor += s;
    }
    ids
}

fn halving_is_separable(
    buffer: &[usize],
    half: usize,
    ids: &[isize],
    counts: &mut [usize],
    sizes: &[usize],
) -> bool {
    counts.iter_mut().for_each(|c| *c = 0);
    for &v in &buffer[..half] {
        if ids[v] >= 0 {
            counts[ids[v] as usize] += 1;
        }
    }
    counts
        .iter()
        .zip(sizes)
        .all(|(&c, &s)| c == 0 || c == s)
}

/// Monte Carlo estimate of the separable-halving probability.
pub fn mc_p_s1(n: usize, sizes: &[usize], samples: u64, rng: &mut impl Rng) -> Result<f64> {
    validate_sizes(n, sizes)?;
    let ids = group_ids(n, sizes);
    let mut buffer: Vec<usize> = (0..n).collect();
    let mut counts = vec![0usize; sizes.len()];
    let half = n / 2;
    let mut hits = 0u64;
    for _ in 0..samples {
        partial_shuffle(&mut buffer, half, rng);
        if halving_is_separable(&buffer, half, &ids, &mut counts, sizes) {
            hits += 1;
        }
    }
    Ok(hits as f64 / samples as f64)
}

/// Monte Carlo estimate of getting at least one group-splitting halving in
/// `l` independent trials.
pub fn mc_p_n1(
    n: usize,
    sizes: &[usize],
    l: usize,
    samples: u64,
    rng: &mut impl Rng,
) -> Result<f64> {
    validate_sizes(n, sizes)?;
    let ids = group_ids(n, sizes);
    let mut buffer: Vec<usize> = (0..n).collect();
    let mut counts = vec![0usize; sizes.len()];
    let half = n / 2;
    let mut hits = 0u64;
    for _ in 0..samples {
        let mut any_nonseparable = false;
        for _ in 0..l {
            partial_shuffle(&mut buffer, half, rng);
            if !halving_is_separable(&buffer, half, &ids, &mut counts, sizes) {
                any_nonseparable = true;
                break;
            }
        }
        if any_nonseparable {
            hits += 1;
        }
    }
    Ok(hits as f64 / samples as f64)
}

/// Monte Carlo estimate of two random distinct variables being nonseparable.
pub fn mc_p_n2(n: usize, sizes: &[usize], samples: u64, rng: &mut impl Rng) -> Result<f64> {
    validate_sizes(n, sizes)?;
    if n < 2 {
        return Err(FdgError::InvalidProbability("n must be at least 2".into()));
    }
    let ids = group_ids(n, sizes);
    let mut hits = 0u64;
    for _ in 0..samples {
        let a = rng.random_range(0..n);
        let mut b = rng.random_range(0..n - 1);
        if b >= a {
            b += 1;
        }
        if ids[a] >= 0 && ids[a] == ids[b] {
            hits += 1;
        }
    }
    Ok(hits as f64 / samples as f64)
}

/// Monte Carlo estimate of finding at least one separable pair in `l` trials.
pub fn mc_p_s2(
    n: usize,
    sizes: &[usize],
    l: usize,
    samples: u64,
    rng: &mut impl Rng,
) -> Result<f64> {
    validate_sizes(n, sizes)?;
    let ids = group_ids(n, sizes);
    let mut hits = 0u64;
    for _ in 0..samples {
        let mut any_separable = false;
        for _ in 0..l {
            let a = rng.random_range(0..n);
            let mut b = rng.random_range(0..n - 1);
            if b >= a {
                b += 1;
            }
            if ids[a] < 0 || ids[a] != ids[b] {
                any_separable = true;
                break;
            }
        }
        if any_separable {
            hits += 1;
        }
    }
    Ok(hits as f64 / samples as f64)
}

/// Monte Carlo estimate of drawing at least one separable variable among `l`
/// distinct draws, with the first `n_n` variables nonseparable.
pub fn mc_p_s3(
    n: usize,
    n_n: usize,
    l: usize,
    samples: u64,
    rng: &mut impl Rng,
) -> Result<f64> {
    if n == 0 || n_n > n || l == 0 || l > n {
        return Err(FdgError::InvalidProbability(format!(
            "need 0 < l <= n and n_n <= n, got n = {n}, n_n = {n_n}, l = {l}"
        )));
    }
    let mut buffer: Vec<usize> = (0..n).collect();
    let mut hits = 0u64;
    for _ in 0..samples {
        partial_shuffle(&mut buffer, l, rng);
        if buffer[..l].iter().any(|&v| v >= n_n) {
            hits += 1;
        }
    }
    Ok(hits as f64 / samples as f64)
}

/// Exhaustively enumerate every floor(n/2)-subset and count the separable
/// halvings, exactly. Feasible for n up to about 16.
pub fn enumerate_p_s1_exact(n: usize, sizes: &[usize]) -> Result<BigRational> {
    validate_sizes(n, sizes)?;
    if n > 16 {
        return Err(FdgError::InvalidProbability(format!(
            "enumeration over C({n}, {}) subsets is too large",
            n / 2
        )));
    }
    let ids = group_ids(n, sizes);
    let half = n / 2;
    let mut counts = vec![0usize; sizes.len()];
    let mut separable = BigInt::zero();
    let mut total = BigInt::zero();

    // Lexicographic combinations of `half` indices out of n.
    let mut selection: Vec<usize> = (0..half).collect();
    loop {
        counts.iter_mut().for_each(|c| *c = 0);
        for &v in &selection {
            if ids[v] >= 0 {
                counts[ids[v] as usize] += 1;
            }
        }
        if counts.iter().zip(sizes).all(|(&c, &s)| c == 0 || c == s) {
            separable += 1;
        }
        total += 1;

        // Advance to the next combination.
        let mut i = half;
        loop {
            if i == 0 {
                break;
            }
            i -= 1;
            if selection[i] != i + n - half {
                selection[i] += 1;
                for j in (i + 1)..half {
                    selection[j] = selection[j - 1] + 1;
                }
                break;
            }
            if i == 0 {
                return Ok(BigRational::new(separable, total));
            }
        }
        if half == 0 {
            return Ok(BigRational::new(separable, total));
        }
    }
}

/// Standard error of a Bernoulli estimate, for the 3-sigma agreement checks.
pub fn bernoulli_sigma(p: f64, samples: u64) -> f64 {
    (p * (1.0 - p) / samples as f64).sqrt().abs()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::benchmarks::{build, BenchmarkSpec, Family};
    use crate::idap::DEFAULT_GAP_FACTOR;
    use num_traits::Signed;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    #[test]
    fn oracle_recovers_group_schwefel_partition() {
        let spec = BenchmarkSpec::grouped(Family::GroupSchwefel, 20, 2, 5, 3, 4);
        let (problem, truth) = build(&spec).unwrap();
        let ledger = EvaluationLedger::new();
        let oracle =
            pairwise_oracle(&problem, &ledger, DEFAULT_ORACLE_CAP, DEFAULT_GAP_FACTOR).unwrap();
        assert_eq!(oracle, truth);
    }

    #[test]
    fn oracle_sees_fully_separable_singletons() {
        let spec = BenchmarkSpec::separable(Family::SumOfSquares, 8, 1, 2);
        let (problem, _) = build(&spec).unwrap();
        let ledger = EvaluationLedger::new();
        let oracle =
            pairwise_oracle(&problem, &ledger, DEFAULT_ORACLE_CAP, DEFAULT_GAP_FACTOR).unwrap();
        assert_eq!(oracle, Decomposition::fully_separable(8));
        // 1 base + 3 per pair.
        assert_eq!(ledger.count(), 1 + 3 * 28);
    }

    #[test]
    fn oracle_merges_chained_overlap_through_closure() {
        let spec = BenchmarkSpec::grouped(Family::ChainedOverlap, 9, 4, 3, 5, 6);
        let (problem, truth) = build(&spec).unwrap();
        let ledger = EvaluationLedger::new();
        let oracle =
            pairwise_oracle(&problem, &ledger, DEFAULT_ORACLE_CAP, DEFAULT_GAP_FACTOR).unwrap();
        assert_eq!(oracle, truth);
        assert_eq!(oracle.nonseps.len(), 1);
        assert_eq!(oracle.nonseps[0].len(), 9);
    }

    #[test]
    fn oracle_rejects_dimensions_above_cap() {
        let spec = BenchmarkSpec::separable(Family::SumOfSquares, 12, 1, 2);
        let (problem, _) = build(&spec).unwrap();
        let ledger = EvaluationLedger::new();
        let err = pairwise_oracle(&problem, &ledger, 8, DEFAULT_GAP_FACTOR).unwrap_err();
        assert!(matches!(err, FdgError::OracleCapExceeded { .. }));
    }

    #[test]
    fn nmi_identical_partitions_scores_exactly_100() {
        let d = Decomposition {
            nonseps: vec![vec![0, 3], vec![1, 4]],
            seps: vec![2],
        };
        assert_eq!(nmi(&d, &d, 5).unwrap(), 100.0);
    }

    #[test]
    fn nmi_pairs_vs_singletons_fixture() {
        // Two 2-blocks against four singletons over n = 4. Direct evaluation
        // of the formula: numerator -2 * 4 * log2(4*1/(2*1)) = -8,
        // denominator 2*2*log2(2/4) + 4*log2(1/4) = -12, so 66.67%.
        let pairs = Decomposition {
            nonseps: vec![vec![0, 1], vec![2, 3]],
            seps: vec![],
        };
        let singletons = Decomposition::fully_separable(4);
        let value = nmi(&pairs, &singletons, 4).unwrap();
        assert!((value - 200.0 / 3.0).abs() < 1e-9, "nmi = {value}");
    }

    #[test]
    fn nmi_matches_entropy_formulation() {
        // Independent route: 2 * I(X;Y) / (H(X) + H(Y)) with natural logs.
        let d1 = Decomposition {
            nonseps: vec![vec![0, 1, 2], vec![3, 4]],
            seps: vec![5, 6],
        };
        let d2 = Decomposition {
            nonseps: vec![vec![0, 1], vec![2, 5], vec![3, 4]],
            seps: vec![6],
        };
        let n = 7usize;
        let blocks1 = d1.as_partition();
        let blocks2 = d2.as_partition();
        let p = |blocks: &Vec<Vec<usize>>| -> Vec<f64> {
            blocks.iter().map(|b| b.len() as f64 / n as f64).collect()
        };
        let h = |ps: &[f64]| -> f64 { -ps.iter().map(|&p| p * p.ln()).sum::<f64>() };
        let mut info = 0.0;
        for b1 in &blocks1 {
            for b2 in &blocks2 {
                let joint = b1.iter().filter(|v| b2.contains(v)).count() as f64 / n as f64;
                if joint > 0.0 {
                    let p1 = b1.len() as f64 / n as f64;
                    let p2 = b2.len() as f64 / n as f64;
                    info += joint * (joint / (p1 * p2)).ln();
                }
            }
        }
        let expected = 2.0 * info / (h(&p(&blocks1)) + h(&p(&blocks2))) * 100.0;
        let value = nmi(&d1, &d2, n).unwrap();
        assert!((value - expected).abs() < 1e-9, "{value} vs {expected}");
    }

    #[test]
    fn nmi_is_symmetric_and_validates_inputs() {
        let d1 = Decomposition {
            nonseps: vec![vec![0, 1, 2]],
            seps: vec![3],
        };
        let d2 = Decomposition {
            nonseps: vec![vec![0, 1]],
            seps: vec![2, 3],
        };
        assert_eq!(nmi(&d1, &d2, 4).unwrap(), nmi(&d2, &d1, 4).unwrap());
        assert!(nmi(&d1, &d2, 5).is_err());
        let bad = Decomposition {
            nonseps: vec![vec![0, 0]],
            seps: vec![1],
        };
        assert!(nmi(&bad, &d2, 2).is_err());
    }

    #[test]
    fn nmi_below_100_for_different_partitions() {
        let d1 = Decomposition {
            nonseps: vec![vec![0, 1]],
            seps: vec![2, 3],
        };
        let d2 = Decomposition {
            nonseps: vec![vec![0, 1, 2]],
            seps: vec![3],
        };
        let value = nmi(&d1, &d2, 4).unwrap();
        assert!(value < 100.0);
        assert!(value > 0.0);
    }

    #[test]
    fn binomial_convention_and_values() {
        assert_eq!(binomial(5, 2), BigInt::from(10));
        assert_eq!(binomial(0, 0), BigInt::one());
        assert_eq!(binomial(-1, 0), BigInt::zero());
        assert_eq!(binomial(3, -1), BigInt::zero());
        assert_eq!(binomial(2, 3), BigInt::zero());
        assert_eq!(
            binomial(50, 25),
            "126410606437752".parse::<BigInt>().unwrap()
        );
    }

    #[test]
    fn p_s1_no_groups_is_one() {
        assert_eq!(p_s1(8, &[]).unwrap(), 1.0);
    }

    #[test]
    fn p_s1_uniform_agrees_with_general_form() {
        let general = p_s1_exact(20, &[4, 4, 4]).unwrap();
        let uniform = p_s1_uniform_exact(20, 3, 4).unwrap();
        assert_eq!(general, uniform);
    }

    #[test]
    fn p_s1_hand_case_n6_one_pair() {
        // n = 6, one group of 2: halvings keeping the pair together are
        // C(4,3) + C(4,1) = 8 out of C(6,3) = 20.
        let exact = p_s1_exact(6, &[2]).unwrap();
        assert_eq!(exact, BigRational::new(BigInt::from(8), BigInt::from(20)));
    }

    #[test]
    fn paper_bound_single_group_of_50_in_1000() {
        let exact = p_s1_exact(1000, &[50]).unwrap();
        let bound = BigRational::new(BigInt::one(), BigInt::from(2).pow(49));
        assert!(exact <= bound, "p_s1 = {exact} exceeds 2^-49");
        assert!(exact.is_positive());
        for l in [1u32, 2, 5] {
            let p = exact.to_f64().unwrap();
            assert!(p_n1(p, l) >= 1.0 - (2f64).powi(-(49 * l as i32)));
        }
    }

    #[test]
    fn paper_value_p_n2_for_20_groups_of_50() {
        let exact = p_n2_exact(1000, &[50; 20]).unwrap();
        assert_eq!(
            exact,
            BigRational::new(BigInt::from(49), BigInt::from(999))
        );
        let p = exact.to_f64().unwrap();
        assert!((p - 0.049).abs() < 1e-3, "p_n2 = {p}");
        assert!((p_s2(p, 10) - (1.0 - 0.049049049049049_f64.powi(10))).abs() < 1e-12);
    }

    #[test]
    fn p_n2_single_group_covering_everything_is_one() {
        let exact = p_n2_exact(12, &[12]).unwrap();
        assert_eq!(exact, BigRational::one());
    }

    #[test]
    fn enumeration_matches_formula_exactly() {
        for (n, sizes) in [
            (6usize, vec![2usize]),
            (8, vec![2, 2]),
            (10, vec![3, 2]),
            (12, vec![3, 4]),
            (12, vec![2, 2, 2]),
            (11, vec![4]),
        ] {
            let formula = p_s1_exact(n, &sizes).unwrap();
            let enumerated = enumerate_p_s1_exact(n, &sizes).unwrap();
            assert_eq!(formula, enumerated, "n = {n}, sizes = {sizes:?}");
        }
    }

    #[test]
    fn monte_carlo_agrees_within_three_sigma() {
        let mut rng = ChaCha12Rng::seed_from_u64(2024);
        let samples = 200_000u64;
        for (n, sizes) in [(6usize, vec![2usize]), (12, vec![3, 4]), (16, vec![4, 4])] {
            let p = p_s1(n, &sizes).unwrap();
            let estimate = mc_p_s1(n, &sizes, samples, &mut rng).unwrap();
            let sigma = bernoulli_sigma(p, samples).max(1e-9);
            assert!(
                (estimate - p).abs() <= 3.0 * sigma,
                "p_s1({n}, {sizes:?}): {estimate} vs {p}"
            );

            let p = p_n2(n, &sizes).unwrap();
            let estimate = mc_p_n2(n, &sizes, samples, &mut rng).unwrap();
            let sigma = bernoulli_sigma(p, samples).max(1e-9);
            assert!((estimate - p).abs() <= 3.0 * sigma);

            let n_n: usize = sizes.iter().sum();
            let p = p_s3_exact(n, n_n, 4).unwrap().to_f64().unwrap();
            let estimate = mc_p_s3(n, n_n, 4, samples, &mut rng).unwrap();
            let sigma = bernoulli_sigma(p, samples).max(1e-9);
            assert!((estimate - p).abs() <= 3.0 * sigma);
            assert!(p >= p_s3_lower_bound(n, n_n, 4) - 1e-12);
        }
    }

    #[test]
    fn probability_validation_errors() {
        assert!(p_s1(4, &[1]).is_err());
        assert!(p_s1(4, &[3, 2]).is_err());
        assert!(p_n2(1, &[]).is_err());
        assert!(p_s3_exact(10, 11, 2).is_err());
        assert!(p_s3_exact(10, 4, 0).is_err());
    }
}
