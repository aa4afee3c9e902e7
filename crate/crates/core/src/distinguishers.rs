//! Distinguishers for the function-vs-permutation problem, with exact query
//! accounting.
//!
//! Two base algorithms are provided: the classical birthday attack (sample
//! distinct points, look for a repeated answer) and the collision-table plus
//! Grover-search procedure (stash a random table, quantum-search for a point
//! colliding with it). Wrappers add conjugation, which makes behavior depend
//! only on the oracle's collision class, and repetition-with-threshold
//! amplification.

use std::collections::{HashMap, HashSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::function_model::{
    sample_uniform_permutation, ConjugatedOracle, CountingOracle, FunctionTable, Oracle,
};
use crate::quantum::{bbht_search_with, BbhtConfig, BooleanOracle};
use crate::stats::two_proportion_halfwidth;

/// Outcome of one distinguisher run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistinguisherReport {
    /// True when the algorithm claims "random function".
    pub accept: bool,
    /// Classical oracle queries spent.
    pub classical_queries: u64,
    /// Quantum oracle applications spent (full-state applications plus
    /// verification queries).
    pub oracle_queries: u64,
    /// The classically queried `(x, f(x))` pairs, when the algorithm keeps
    /// them.
    pub transcript: Option<Vec<(usize, usize)>>,
}

impl DistinguisherReport {
    pub fn output_bit(&self) -> u8 {
        self.accept as u8
    }

    pub fn total_queries(&self) -> u64 {
        self.classical_queries + self.oracle_queries
    }
}

/// A query algorithm that inspects an oracle and outputs one bit.
pub trait Distinguisher: Sync {
    fn run<O: Oracle, R: Rng + ?Sized>(
        &self,
        oracle: &mut O,
        rng: &mut R,
    ) -> Result<DistinguisherReport>;
}

/// Classical baseline: query `queries` distinct uniform points and accept
/// iff two answers coincide.
#[derive(Debug, Clone, Copy)]
pub struct BirthdayDistinguisher {
    pub queries: usize,
}

impl Distinguisher for BirthdayDistinguisher {
    fn run<O: Oracle, R: Rng + ?Sized>(
        &self,
        oracle: &mut O,
        rng: &mut R,
    ) -> Result<DistinguisherReport> {
        let n = oracle.size();
        if self.queries == 0 || self.queries > n {
            return Err(Error::InvalidParameter(format!(
                "query budget {} outside 1..={n}",
                self.queries
            )));
        }
        let start = oracle.query_count();
        let points = rand::seq::index::sample(rng, n, self.queries);
        let mut transcript = Vec::with_capacity(self.queries);
        let mut seen = HashSet::with_capacity(self.queries);
        let mut collision = false;
        for x in points {
            let y = oracle.query(x)?;
            transcript.push((x, y));
            collision |= !seen.insert(y);
        }
        Ok(DistinguisherReport {
            accept: collision,
            classical_queries: oracle.query_count() - start,
            oracle_queries: 0,
            transcript: Some(transcript),
        })
    }
}

/// The marking oracle for the collision-table step: `H(x) = 1` iff some
/// tabled point `s ≠ x` has `L(s) = f(x)`. Self-matches of tabled points are
/// excluded, so a permutation yields the all-zero predicate.
pub fn build_marked_oracle<'a, O: Oracle>(
    entries: &[(usize, usize)],
    oracle: &'a O,
) -> BooleanOracle<'a> {
    let tabled: HashSet<usize> = entries.iter().map(|&(s, _)| s).collect();
    let mut value_count: HashMap<usize, u32> = HashMap::new();
    for &(_, v) in entries {
        *value_count.entry(v).or_default() += 1;
    }
    BooleanOracle::new(oracle.size(), move |x| {
        let hits = value_count.get(&oracle.peek(x)).copied().unwrap_or(0);
        if tabled.contains(&x) {
            hits >= 2
        } else {
            hits >= 1
        }
    })
}

/// Collision-table distinguisher: stash `table_size` random points, accept on
/// an internal collision, otherwise Grover-search for an external one within
/// `grover_budget` oracle applications.
#[derive(Debug, Clone)]
pub struct BhtDistinguisher {
    pub table_size: usize,
    pub grover_budget: u64,
    pub bbht: BbhtConfig,
}

impl BhtDistinguisher {
    pub fn new(table_size: usize, grover_budget: u64) -> Self {
        Self { table_size, grover_budget, bbht: BbhtConfig::default() }
    }
}

impl Distinguisher for BhtDistinguisher {
    fn run<O: Oracle, R: Rng + ?Sized>(
        &self,
        oracle: &mut O,
        rng: &mut R,
    ) -> Result<DistinguisherReport> {
        let n = oracle.size();
        if self.table_size == 0 || self.table_size > n {
            return Err(Error::InvalidParameter(format!(
                "table size {} outside 1..={n}",
                self.table_size
            )));
        }
        if self.grover_budget == 0 {
            return Err(Error::InvalidParameter("grover budget must be at least 1".into()));
        }

        let start = oracle.query_count();
        let mut entries = Vec::with_capacity(self.table_size);
        let mut seen = HashSet::with_capacity(self.table_size);
        let mut internal_collision = false;
        for s in rand::seq::index::sample(rng, n, self.table_size) {
            let y = oracle.query(s)?;
            entries.push((s, y));
            internal_collision |= !seen.insert(y);
        }
        let classical_queries = oracle.query_count() - start;

        if internal_collision {
            return Ok(DistinguisherReport {
                accept: true,
                classical_queries,
                oracle_queries: 0,
                transcript: Some(entries),
            });
        }

        let mut marked = build_marked_oracle(&entries, &*oracle);
        let (_, found) = bbht_search_with::<f64, R>(&mut marked, self.grover_budget, &self.bbht, rng)?;
        Ok(DistinguisherReport {
            accept: found,
            classical_queries,
            oracle_queries: marked.query_count(),
            transcript: Some(entries),
        })
    }
}

/// Runs the inner distinguisher against `x ↦ π(f(σ(x)))` for fresh uniform
/// permutations `π, σ`, making its acceptance rate a function of the oracle's
/// collision class only. Every virtual query costs one real query.
#[derive(Debug, Clone)]
pub struct Conjugated<D> {
    pub inner: D,
}

impl<D: Distinguisher> Distinguisher for Conjugated<D> {
    fn run<O: Oracle, R: Rng + ?Sized>(
        &self,
        oracle: &mut O,
        rng: &mut R,
    ) -> Result<DistinguisherReport> {
        let n = oracle.size();
        let pi = sample_uniform_permutation(n, rng)?;
        let sigma = sample_uniform_permutation(n, rng)?;
        let mut view = ConjugatedOracle::new(oracle, pi, sigma)?;
        self.inner.run(&mut view, rng)
    }
}

/// Majority-style amplification: run the inner distinguisher `reps` times on
/// fresh randomness and accept iff the acceptance fraction reaches
/// `threshold`.
#[derive(Debug, Clone)]
pub struct Amplified<D> {
    pub inner: D,
    pub reps: usize,
    pub threshold: f64,
}

impl<D: Distinguisher> Distinguisher for Amplified<D> {
    fn run<O: Oracle, R: Rng + ?Sized>(
        &self,
        oracle: &mut O,
        rng: &mut R,
    ) -> Result<DistinguisherReport> {
        if self.reps == 0 {
            return Err(Error::InvalidParameter("reps must be at least 1".into()));
        }
        if !(self.threshold > 0.0 && self.threshold < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "threshold must lie in (0,1), got {}",
                self.threshold
            )));
        }
        let mut accepts = 0usize;
        let mut classical = 0u64;
        let mut quantum = 0u64;
        for _ in 0..self.reps {
            let report = self.inner.run(oracle, rng)?;
            accepts += report.accept as usize;
            classical += report.classical_queries;
            quantum += report.oracle_queries;
        }
        Ok(DistinguisherReport {
            accept: accepts as f64 / self.reps as f64 >= self.threshold,
            classical_queries: classical,
            oracle_queries: quantum,
            transcript: None,
        })
    }
}

/// Default quantum budget for [`BhtDistinguisher`]: `8·⌈n^{1/3}⌉`.
pub fn default_grover_budget(n: usize) -> u64 {
    8 * ceil_cbrt(n)
}

fn ceil_cbrt(n: usize) -> u64 {
    let mut t = (n as f64).cbrt().round() as u64;
    while t.saturating_mul(t).saturating_mul(t) < n as u64 {
        t += 1;
    }
    while t > 1 && (t - 1) * (t - 1) * (t - 1) >= n as u64 {
        t -= 1;
    }
    t.max(1)
}

/// One distinguisher run per spec-level entry point.
pub fn classical_birthday<O: Oracle, R: Rng + ?Sized>(
    oracle: &mut O,
    queries: usize,
    rng: &mut R,
) -> Result<DistinguisherReport> {
    BirthdayDistinguisher { queries }.run(oracle, rng)
}

pub fn bht_distinguisher<O: Oracle, R: Rng + ?Sized>(
    oracle: &mut O,
    table_size: usize,
    grover_budget: u64,
    rng: &mut R,
) -> Result<DistinguisherReport> {
    BhtDistinguisher::new(table_size, grover_budget).run(oracle, rng)
}

pub fn conjugated_distinguisher<D: Distinguisher + Clone, O: Oracle, R: Rng + ?Sized>(
    inner: &D,
    oracle: &mut O,
    rng: &mut R,
) -> Result<DistinguisherReport> {
    Conjugated { inner: inner.clone() }.run(oracle, rng)
}

pub fn amplify<D: Distinguisher + Clone, O: Oracle, R: Rng + ?Sized>(
    inner: &D,
    reps: usize,
    threshold: f64,
    oracle: &mut O,
    rng: &mut R,
) -> Result<DistinguisherReport> {
    Amplified { inner: inner.clone(), reps, threshold }.run(oracle, rng)
}

/// Acceptance-rate comparison between two input distributions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BiasEstimate {
    /// Acceptance rate under the first (random-function-like) distribution.
    pub p_function: f64,
    /// Acceptance rate under the second (permutation) distribution.
    pub p_permutation: f64,
    /// Signed difference `p_function − p_permutation`.
    pub bias: f64,
    pub trials: usize,
    /// 95% half-width for the difference of the two rates.
    pub confidence_halfwidth: f64,
}

impl BiasEstimate {
    pub fn abs_bias(&self) -> f64 {
        self.bias.abs()
    }
}

/// Estimates the distinguisher's bias between two table distributions.
///
/// Each trial draws a fresh table and oracle from each sampler and runs the
/// distinguisher once per side. Per-trial generators are derived from one key
/// drawn off `rng` plus the trial index, so results are identical no matter
/// how the trials are scheduled across threads.
pub fn estimate_bias<D, F1, F0, R>(
    distinguisher: &D,
    sample_one: F1,
    sample_zero: F0,
    trials: usize,
    rng: &mut R,
) -> Result<BiasEstimate>
where
    D: Distinguisher,
    F1: Fn(&mut ChaCha8Rng) -> Result<FunctionTable> + Sync,
    F0: Fn(&mut ChaCha8Rng) -> Result<FunctionTable> + Sync,
    R: Rng + ?Sized,
{
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be at least 1".into()));
    }
    let mut key = [0u8; 32];
    rng.fill_bytes(&mut key);

    let outcomes: Result<Vec<(bool, bool)>> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut one_rng = ChaCha8Rng::from_seed(key);
            one_rng.set_stream(2 * trial as u64);
            let mut oracle = CountingOracle::new(sample_one(&mut one_rng)?);
            let accept_one = distinguisher.run(&mut oracle, &mut one_rng)?.accept;

            let mut zero_rng = ChaCha8Rng::from_seed(key);
            zero_rng.set_stream(2 * trial as u64 + 1);
            let mut oracle = CountingOracle::new(sample_zero(&mut zero_rng)?);
            let accept_zero = distinguisher.run(&mut oracle, &mut zero_rng)?.accept;

            Ok((accept_one, accept_zero))
        })
        .collect();
    let outcomes = outcomes?;

    let ones = outcomes.iter().filter(|o| o.0).count();
    let zeros = outcomes.iter().filter(|o| o.1).count();
    let p_function = ones as f64 / trials as f64;
    let p_permutation = zeros as f64 / trials as f64;
    Ok(BiasEstimate {
        p_function,
        p_permutation,
        bias: p_function - p_permutation,
        trials,
        confidence_halfwidth: two_proportion_halfwidth(p_function, p_permutation, trials),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::collision_profiles::{profile_of, sample_from_profile};
    use crate::function_model::{conjugate, sample_uniform_function};
    use crate::stats::birthday_collision_probability;

    /// Accepts with probability `p`, querying nothing.
    #[derive(Clone)]
    struct Coin {
        p: f64,
    }

    impl Distinguisher for Coin {
        fn run<O: Oracle, R: Rng + ?Sized>(
            &self,
            _oracle: &mut O,
            rng: &mut R,
        ) -> Result<DistinguisherReport> {
            Ok(DistinguisherReport {
                accept: rng.random::<f64>() < self.p,
                classical_queries: 0,
                oracle_queries: 0,
                transcript: None,
            })
        }
    }

    fn seeded(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    #[test]
    fn birthday_is_silent_on_permutations() {
        let mut rng = seeded(1);
        for _ in 0..200 {
            let p = sample_uniform_permutation(32, &mut rng).unwrap();
            let mut oracle = CountingOracle::new(p);
            let report = classical_birthday(&mut oracle, 20, &mut rng).unwrap();
            assert!(!report.accept);
            assert_eq!(report.classical_queries, 20);
            assert_eq!(report.oracle_queries, 0);
            assert_eq!(oracle.query_count(), 20);
        }
    }

    #[test]
    fn birthday_rejects_bad_budgets() {
        let mut rng = seeded(2);
        let mut oracle = CountingOracle::new(FunctionTable::identity(8).unwrap());
        assert!(classical_birthday(&mut oracle, 0, &mut rng).is_err());
        assert!(classical_birthday(&mut oracle, 9, &mut rng).is_err());
        assert_eq!(oracle.query_count(), 0);
    }

    #[test]
    fn birthday_two_queries_on_four_points_accepts_quarter_of_the_time() {
        let mut rng = seeded(3);
        let trials = 20_000;
        let mut accepts = 0;
        for _ in 0..trials {
            let f = sample_uniform_function(4, &mut rng).unwrap();
            let mut oracle = CountingOracle::new(f);
            accepts += classical_birthday(&mut oracle, 2, &mut rng).unwrap().accept as usize;
        }
        let rate = accepts as f64 / trials as f64;
        assert!((rate - 0.25).abs() < 0.015, "rate = {rate}");
    }

    #[test]
    fn birthday_matches_collision_closed_form() {
        let n = 1 << 12;
        let trials = 1500;
        let mut rng = seeded(4);
        for q in [16usize, 64, 96] {
            let mut accepts = 0;
            for _ in 0..trials {
                let f = sample_uniform_function(n, &mut rng).unwrap();
                let mut oracle = CountingOracle::new(f);
                accepts += classical_birthday(&mut oracle, q, &mut rng).unwrap().accept as usize;
            }
            let rate = accepts as f64 / trials as f64;
            let exact = birthday_collision_probability(n, q);
            let poisson = 1.0 - (-(q as f64) * (q as f64 - 1.0) / (2.0 * n as f64)).exp();
            assert!((rate - exact).abs() < 0.02, "q={q}: rate {rate} vs exact {exact}");
            assert!((rate - poisson).abs() < 0.025, "q={q}: rate {rate} vs poisson {poisson}");
        }
    }

    #[test]
    fn birthday_acceptance_grows_with_budget() {
        let n = 256;
        let trials = 3000;
        let mut rng = seeded(5);
        let mut previous = -1.0;
        for q in [4usize, 8, 16, 32] {
            let mut accepts = 0;
            for _ in 0..trials {
                let f = sample_uniform_function(n, &mut rng).unwrap();
                let mut oracle = CountingOracle::new(f);
                accepts += classical_birthday(&mut oracle, q, &mut rng).unwrap().accept as usize;
            }
            let rate = accepts as f64 / trials as f64;
            assert!(rate >= previous - 0.03, "q={q}: rate {rate} after {previous}");
            previous = rate;
        }
    }

    #[test]
    fn marked_oracle_excludes_self_matches() {
        // f(0)=5, f(1)=6 with no external collisions on those values.
        let f = FunctionTable::new(vec![5, 6, 0, 1, 2, 3, 4, 7]).unwrap();
        let oracle = CountingOracle::new(f);
        let entries = vec![(0usize, 5usize), (1, 6)];
        let mut h = build_marked_oracle(&entries, &oracle);
        assert!(!h.verify(0).unwrap(), "tabled point must not match itself");
        assert!(!h.verify(1).unwrap());
        assert!(!h.verify(2).unwrap());
    }

    #[test]
    fn marked_oracle_flags_external_collisions() {
        // f(2) = 5 = L(0), so 2 is marked; 0 itself is not.
        let f = FunctionTable::new(vec![5, 6, 5, 1, 2, 3, 4, 7]).unwrap();
        let oracle = CountingOracle::new(f);
        let entries = vec![(0usize, 5usize), (1, 6)];
        let mut h = build_marked_oracle(&entries, &oracle);
        assert!(h.verify(2).unwrap());
        assert!(!h.verify(0).unwrap(), "self-match still excluded for count 1");
        assert!(!h.verify(3).unwrap());
    }

    #[test]
    fn marked_oracle_is_identically_zero_on_permutations() {
        let mut rng = seeded(6);
        let p = sample_uniform_permutation(16, &mut rng).unwrap();
        let oracle = CountingOracle::new(p);
        let entries: Vec<(usize, usize)> = (0..4).map(|s| (s, oracle.peek(s))).collect();
        let mut h = build_marked_oracle(&entries, &oracle);
        for x in 0..16 {
            assert!(!h.verify(x).unwrap());
        }
    }

    #[test]
    fn bht_is_silent_on_permutations() {
        let mut rng = seeded(7);
        for _ in 0..100 {
            let p = sample_uniform_permutation(64, &mut rng).unwrap();
            let mut oracle = CountingOracle::new(p);
            let report = bht_distinguisher(&mut oracle, 4, 12, &mut rng).unwrap();
            assert!(!report.accept);
            assert_eq!(report.classical_queries, 4);
            assert!(report.oracle_queries <= 12);
        }
    }

    #[test]
    fn bht_short_circuits_on_internal_collisions() {
        let mut rng = seeded(8);
        let constant = FunctionTable::new(vec![3; 8]).unwrap();
        let mut oracle = CountingOracle::new(constant);
        let report = bht_distinguisher(&mut oracle, 4, 100, &mut rng).unwrap();
        assert!(report.accept);
        assert_eq!(report.classical_queries, 4);
        assert_eq!(report.oracle_queries, 0);
        assert_eq!(oracle.query_count(), 4);
    }

    #[test]
    fn bht_rejects_bad_parameters() {
        let mut rng = seeded(9);
        let mut oracle = CountingOracle::new(FunctionTable::identity(8).unwrap());
        assert!(bht_distinguisher(&mut oracle, 0, 8, &mut rng).is_err());
        assert!(bht_distinguisher(&mut oracle, 9, 8, &mut rng).is_err());
        assert!(bht_distinguisher(&mut oracle, 4, 0, &mut rng).is_err());
    }

    #[test]
    fn bht_finds_planted_collisions_with_external_search() {
        // 2-to-1 oracle: plenty of external collisions with any table.
        let mut rng = seeded(10);
        let n = 64;
        let profile = crate::collision_profiles::CollisionProfile::from_pairs(n, &[(2, n)]).unwrap();
        let mut hits = 0;
        let trials = 300;
        for _ in 0..trials {
            let f = sample_from_profile(&profile, &mut rng);
            let mut oracle = CountingOracle::new(f);
            let report = bht_distinguisher(&mut oracle, 8, 40, &mut rng).unwrap();
            hits += report.accept as usize;
        }
        let rate = hits as f64 / trials as f64;
        assert!(rate > 0.9, "rate = {rate}");
    }

    #[test]
    fn conjugated_wrapper_keeps_permutation_soundness_and_counts() {
        let mut rng = seeded(11);
        for _ in 0..100 {
            let p = sample_uniform_permutation(32, &mut rng).unwrap();
            let mut oracle = CountingOracle::new(p);
            let inner = BirthdayDistinguisher { queries: 10 };
            let report = Conjugated { inner }.run(&mut oracle, &mut rng).unwrap();
            assert!(!report.accept);
            assert_eq!(report.classical_queries, 10);
            assert_eq!(oracle.query_count(), 10, "virtual queries must map 1:1 to real ones");
        }
    }

    #[test]
    fn conjugated_acceptance_depends_only_on_the_collision_class() {
        // Fix one function; compare the conjugated distinguisher on it with
        // the plain distinguisher on uniform class members.
        let mut rng = seeded(12);
        let f = sample_from_profile(
            &crate::collision_profiles::CollisionProfile::from_pairs(16, &[(1, 8), (2, 8)]).unwrap(),
            &mut rng,
        );
        let inner = BirthdayDistinguisher { queries: 6 };
        let trials = 6000;

        let mut conj_hits = 0;
        for _ in 0..trials {
            let mut oracle = CountingOracle::new(f.clone());
            conj_hits += conjugated_distinguisher(&inner, &mut oracle, &mut rng)
                .unwrap()
                .accept as usize;
        }
        let mut class_hits = 0;
        for _ in 0..trials {
            let member = sample_from_profile(&profile_of(&f), &mut rng);
            let mut oracle = CountingOracle::new(member);
            class_hits += inner.run(&mut oracle, &mut rng).unwrap().accept as usize;
        }
        let conj_rate = conj_hits as f64 / trials as f64;
        let class_rate = class_hits as f64 / trials as f64;
        assert!(
            (conj_rate - class_rate).abs() < 0.03,
            "conjugated {conj_rate} vs class average {class_rate}"
        );
    }

    #[test]
    fn conjugation_averages_exactly_at_n_four() {
        // Acceptance of the two-query birthday attack equals the number of
        // colliding pairs over six. Summed over all (pi, sigma), the
        // conjugates of f must therefore accept exactly as often as the
        // class-average does; both sides are integer-exact here.
        let f = FunctionTable::new(vec![0, 0, 1, 2]).unwrap();
        let perms: Vec<FunctionTable> = all_permutations(4);
        let colliding_pairs = |g: &FunctionTable| -> u64 {
            let mut count = 0;
            for a in 0..4 {
                for b in (a + 1)..4 {
                    count += (g.value(a) == g.value(b)) as u64;
                }
            }
            count
        };

        let mut conjugate_total = 0u64;
        for pi in &perms {
            for sigma in &perms {
                conjugate_total += colliding_pairs(&conjugate(&f, pi, sigma).unwrap());
            }
        }

        let mut class_total = 0u64;
        let mut class_size = 0u64;
        let target = profile_of(&f);
        for code in 0..256u32 {
            let values: Vec<usize> =
                (0..4).map(|p| ((code >> (2 * p)) & 3) as usize).collect();
            let g = FunctionTable::new(values).unwrap();
            if profile_of(&g) == target {
                class_total += colliding_pairs(&g);
                class_size += 1;
            }
        }

        assert_eq!(class_size, 144);
        // 576 conjugations hit each of the 144 members 4 times.
        assert_eq!(conjugate_total, 4 * class_total);
    }

    #[test]
    fn amplify_examples() {
        let mut rng = seeded(13);
        let mut oracle = CountingOracle::new(FunctionTable::identity(4).unwrap());

        let sure = Coin { p: 1.0 };
        let report = amplify(&sure, 50, 0.99, &mut oracle, &mut rng).unwrap();
        assert!(report.accept);

        let never = Coin { p: 0.0 };
        let report = amplify(&never, 50, 0.01, &mut oracle, &mut rng).unwrap();
        assert!(!report.accept);

        assert!(amplify(&sure, 0, 0.5, &mut oracle, &mut rng).is_err());
        assert!(amplify(&sure, 5, 0.0, &mut oracle, &mut rng).is_err());
        assert!(amplify(&sure, 5, 1.5, &mut oracle, &mut rng).is_err());
    }

    #[test]
    fn amplify_reduces_error_within_the_hoeffding_bound() {
        let mut rng = seeded(14);
        let mut oracle = CountingOracle::new(FunctionTable::identity(4).unwrap());
        let runs = 400;

        for (reps, bound) in [(100usize, 0.27), (500, 0.013)] {
            let mut errors = 0;
            for _ in 0..runs {
                let good = Amplified { inner: Coin { p: 0.6 }, reps, threshold: 0.5 };
                errors += !good.run(&mut oracle, &mut rng).unwrap().accept as usize;
                let bad = Amplified { inner: Coin { p: 0.4 }, reps, threshold: 0.5 };
                errors += bad.run(&mut oracle, &mut rng).unwrap().accept as usize;
            }
            let rate = errors as f64 / (2 * runs) as f64;
            assert!(rate <= bound, "reps={reps}: error rate {rate} above {bound}");
        }
    }

    #[test]
    fn amplify_aggregates_query_counts() {
        let mut rng = seeded(15);
        let mut oracle = CountingOracle::new(FunctionTable::identity(16).unwrap());
        let amped = Amplified {
            inner: BirthdayDistinguisher { queries: 4 },
            reps: 25,
            threshold: 0.5,
        };
        let report = amped.run(&mut oracle, &mut rng).unwrap();
        assert_eq!(report.classical_queries, 100);
        assert_eq!(oracle.query_count(), 100);
        assert!(report.transcript.is_none());
    }

    #[test]
    fn bias_of_a_constant_distinguisher_is_zero() {
        let mut rng = seeded(16);
        let est = estimate_bias(
            &Coin { p: 1.0 },
            |r: &mut ChaCha8Rng| sample_uniform_function(8, r),
            |r: &mut ChaCha8Rng| sample_uniform_permutation(8, r),
            500,
            &mut rng,
        )
        .unwrap();
        assert_eq!(est.p_function, 1.0);
        assert_eq!(est.p_permutation, 1.0);
        assert_eq!(est.bias, 0.0);
        assert_eq!(est.abs_bias(), 0.0);
        assert_eq!(est.trials, 500);
    }

    #[test]
    fn bias_of_small_birthday_attack_approaches_one_quarter() {
        let mut rng = seeded(17);
        let est = estimate_bias(
            &BirthdayDistinguisher { queries: 2 },
            |r: &mut ChaCha8Rng| sample_uniform_function(4, r),
            |r: &mut ChaCha8Rng| sample_uniform_permutation(4, r),
            40_000,
            &mut rng,
        )
        .unwrap();
        assert_eq!(est.p_permutation, 0.0);
        assert!((est.bias - 0.25).abs() < 0.012, "bias = {}", est.bias);
        assert!(est.confidence_halfwidth < 0.01);
    }

    #[test]
    fn bias_estimates_are_deterministic_per_seed() {
        let run = || {
            estimate_bias(
                &BirthdayDistinguisher { queries: 8 },
                |r: &mut ChaCha8Rng| sample_uniform_function(64, r),
                |r: &mut ChaCha8Rng| sample_uniform_permutation(64, r),
                2000,
                &mut seeded(18),
            )
            .unwrap()
        };
        let a = run();
        let b = run();
        assert_eq!(a, b);
        assert!(estimate_bias(
            &Coin { p: 0.5 },
            |r: &mut ChaCha8Rng| sample_uniform_function(4, r),
            |r: &mut ChaCha8Rng| sample_uniform_permutation(4, r),
            0,
            &mut seeded(19),
        )
        .is_err());
    }

    #[test]
    fn grover_budget_default_matches_cube_root_rule() {
        assert_eq!(default_grover_budget(1 << 12), 8 * 16);
        assert_eq!(default_grover_budget(1000), 8 * 10);
        assert_eq!(default_grover_budget(1001), 8 * 11);
        assert_eq!(default_grover_budget(1), 8);
        assert_eq!(default_grover_budget(2), 8 * 2);
    }

    fn all_permutations(n: usize) -> Vec<FunctionTable> {
        let mut out = Vec::new();
        let mut items: Vec<usize> = (0..n).collect();
        permute(&mut items, 0, &mut out);
        out
    }

    fn permute(items: &mut Vec<usize>, at: usize, out: &mut Vec<FunctionTable>) {
        if at == items.len() {
            out.push(FunctionTable::new(items.clone()).unwrap());
            return;
        }
        for i in at..items.len() {
            items.swap(at, i);
            permute(items, at + 1, out);
            items.swap(at, i);
        }
    }
}
