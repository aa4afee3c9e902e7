//! Exact statevector simulation of Grover-type search with a boolean
//! marking oracle.
//!
//! Only the n-dimensional search register is tracked. The marking predicate
//! is classical and deterministic, so the phase-oracle form of the query
//! operator is exact and needs no ancilla; memory is O(n), which keeps
//! domains up to 2^20 workable on a desk machine. Queries are charged per
//! application of the oracle to the full state, plus one per classical
//! verification.

use num_complex::Complex;
use rand::Rng;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Marking oracle `H : {0,…,n-1} → {0,1}` with an application counter.
///
/// The predicate must be deterministic and static for the oracle's lifetime;
/// the oracle caches the marked set on first use under that assumption.
pub struct BooleanOracle<'a> {
    n: usize,
    predicate: Box<dyn Fn(usize) -> bool + Send + Sync + 'a>,
    queries: u64,
    marks: Option<Vec<usize>>,
}

impl<'a> BooleanOracle<'a> {
    pub fn new<P>(n: usize, predicate: P) -> Self
    where
        P: Fn(usize) -> bool + Send + Sync + 'a,
    {
        Self { n, predicate: Box::new(predicate), queries: 0, marks: None }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    /// Queries charged so far: one per full-state application, one per
    /// classical verification.
    pub fn query_count(&self) -> u64 {
        self.queries
    }

    /// Classical verification of a single point; costs one query.
    pub fn verify(&mut self, x: usize) -> Result<bool> {
        if x >= self.n {
            return Err(Error::IndexOutOfRange { index: x, size: self.n });
        }
        self.queries += 1;
        Ok((self.predicate)(x))
    }

    fn count_application(&mut self) {
        self.queries += 1;
    }

    fn marks(&mut self) -> &[usize] {
        if self.marks.is_none() {
            let marks = (0..self.n).filter(|&x| (self.predicate)(x)).collect();
            self.marks = Some(marks);
        }
        self.marks.as_deref().unwrap()
    }
}

/// State of the search register: `n` complex amplitudes with unit norm.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector<T: Scalar> {
    amps: Vec<Complex<T>>,
}

impl<T: Scalar> StateVector<T> {
    /// The uniform superposition, all amplitudes `1/√n`.
    pub fn uniform(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyDomain);
        }
        let amp = Complex::new(T::one() / T::from_count(n).sqrt(), T::zero());
        Ok(Self { amps: vec![amp; n] })
    }

    /// Wraps raw amplitudes, enforcing the unit-norm invariant.
    pub fn from_amplitudes(amps: Vec<Complex<T>>) -> Result<Self> {
        if amps.is_empty() {
            return Err(Error::EmptyDomain);
        }
        let state = Self { amps };
        let norm = state.norm_sqr();
        if (norm - T::one()).abs() > T::unit_norm_tolerance() {
            return Err(Error::InvalidParameter(format!(
                "state norm² = {norm}, expected 1"
            )));
        }
        Ok(state)
    }

    pub fn len(&self) -> usize {
        self.amps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amps.is_empty()
    }

    pub fn amplitudes(&self) -> &[Complex<T>] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> T {
        self.amps.iter().map(Complex::norm_sqr).sum()
    }

    /// Measurement probability of outcome `x`.
    pub fn probability(&self, x: usize) -> T {
        self.amps[x].norm_sqr()
    }

    /// Negates the amplitude of every marked point and charges one query.
    pub fn apply_phase_oracle(&mut self, oracle: &mut BooleanOracle<'_>) -> Result<()> {
        if oracle.size() != self.amps.len() {
            return Err(Error::SizeMismatch {
                expected: self.amps.len(),
                found: oracle.size(),
            });
        }
        oracle.count_application();
        for &x in oracle.marks() {
            self.amps[x] = -self.amps[x];
        }
        Ok(())
    }

    /// Reflection about the mean: `a_x ↦ 2·mean(a) − a_x`.
    pub fn apply_diffusion(&mut self) {
        let n = T::from_count(self.amps.len());
        let mut sum = Complex::new(T::zero(), T::zero());
        for a in &self.amps {
            sum += *a;
        }
        let twice_mean = sum * (T::one() + T::one()) / n;
        for a in &mut self.amps {
            *a = twice_mean - *a;
        }
    }

    /// Samples an outcome from `|amplitudes|²` by inverse CDF.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let r = T::from_f64(rng.random::<f64>()).unwrap();
        let mut acc = T::zero();
        let mut last_seen = 0;
        for (x, a) in self.amps.iter().enumerate() {
            let p = a.norm_sqr();
            if p > T::zero() {
                last_seen = x;
            }
            acc += p;
            if r < acc {
                return x;
            }
        }
        // Rounding left us past the accumulated mass; the tail owns it.
        last_seen
    }
}

/// Closed-form success probability of `k` Grover iterations with `m` marked
/// points among `n`: `sin²((2k+1)·θ)` with `θ = arcsin(√(m/n))`.
pub fn grover_success_probability<T: Scalar>(n: usize, m: usize, k: usize) -> T {
    assert!(n >= 1, "domain must be non-empty");
    assert!(m <= n, "marked count exceeds domain");
    if m == 0 {
        return T::zero();
    }
    let theta = (T::from_count(m) / T::from_count(n)).sqrt().asin();
    let angle = T::from_count(2 * k + 1) * theta;
    angle.sin().powi(2)
}

/// Runs `k` Grover iterations from the uniform state, measures, and spends
/// one more query verifying the outcome. Total cost: exactly `k + 1`.
pub fn grover_search<T: Scalar, R: Rng + ?Sized>(
    oracle: &mut BooleanOracle<'_>,
    iterations: usize,
    rng: &mut R,
) -> Result<(usize, bool)> {
    let mut state = StateVector::<T>::uniform(oracle.size())?;
    for _ in 0..iterations {
        state.apply_phase_oracle(oracle)?;
        state.apply_diffusion();
    }
    let x = state.sample(rng);
    let found = oracle.verify(x)?;
    Ok((x, found))
}

/// Schedule constants for [`bbht_search`].
#[derive(Debug, Clone)]
pub struct BbhtConfig {
    /// Stage growth factor for the iteration-count range; 6/5 by default.
    pub growth: f64,
    /// Upper bound on the per-stage range; `⌈π/4·√n⌉` when `None`.
    pub stage_cap: Option<usize>,
    /// Give up once a full stage at the cap completes without success,
    /// instead of burning the rest of the budget.
    pub early_stop: bool,
}

impl Default for BbhtConfig {
    fn default() -> Self {
        Self { growth: 1.2, stage_cap: None, early_stop: true }
    }
}

impl BbhtConfig {
    fn cap_for(&self, n: usize) -> usize {
        self.stage_cap
            .unwrap_or_else(|| (std::f64::consts::FRAC_PI_4 * (n as f64).sqrt()).ceil() as usize)
            .max(1)
    }
}

/// Search with unknown marked count under the default schedule.
pub fn bbht_search<T: Scalar, R: Rng + ?Sized>(
    oracle: &mut BooleanOracle<'_>,
    budget: u64,
    rng: &mut R,
) -> Result<(usize, bool)> {
    bbht_search_with::<T, R>(oracle, budget, &BbhtConfig::default(), rng)
}

/// Search with unknown marked count: at stage `s` the iteration count is
/// drawn uniformly from `[0, min(⌈growth^s⌉, cap))` and one run of
/// [`grover_search`] is made, until success, budget exhaustion, or the
/// configured early stop. Never spends more than `budget` queries, and the
/// spend is exact when it gives up without the early stop.
pub fn bbht_search_with<T: Scalar, R: Rng + ?Sized>(
    oracle: &mut BooleanOracle<'_>,
    budget: u64,
    config: &BbhtConfig,
    rng: &mut R,
) -> Result<(usize, bool)> {
    if budget == 0 {
        return Err(Error::InvalidParameter("budget must be at least 1".into()));
    }
    if config.growth.is_nan() || config.growth <= 1.0 {
        return Err(Error::InvalidParameter(format!(
            "growth must exceed 1, got {}",
            config.growth
        )));
    }
    let cap = config.cap_for(oracle.size());
    let start = oracle.query_count();
    let mut stage = 0i32;
    let mut last_sample = 0;
    loop {
        let used = oracle.query_count() - start;
        if used >= budget {
            return Ok((last_sample, false));
        }
        let remaining = budget - used;
        let range = (config.growth.powi(stage).ceil() as usize).min(cap);
        let mut j = rng.random_range(0..range);
        if (j as u64) + 1 > remaining {
            j = (remaining - 1) as usize;
        }
        let (x, found) = grover_search::<T, R>(oracle, j, rng)?;
        if found {
            return Ok((x, true));
        }
        last_sample = x;
        if config.early_stop && range == cap {
            return Ok((x, false));
        }
        stage += 1;
    }
}

#[cfg(test)]
mod tests {
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;

    fn first_m_marked(n: usize, m: usize) -> BooleanOracle<'static> {
        BooleanOracle::new(n, move |x| x < m)
    }

    /// Exact success probability after `k` iterations, read off the state.
    fn simulated_success(n: usize, m: usize, k: usize) -> f64 {
        let mut oracle = first_m_marked(n, m);
        let mut state = StateVector::<f64>::uniform(n).unwrap();
        for _ in 0..k {
            state.apply_phase_oracle(&mut oracle).unwrap();
            state.apply_diffusion();
        }
        assert_eq!(oracle.query_count(), k as u64);
        (0..m).map(|x| state.probability(x)).sum()
    }

    #[test]
    fn uniform_state_examples() {
        let s = StateVector::<f64>::uniform(4).unwrap();
        for x in 0..4 {
            assert_eq!(s.amplitudes()[x], Complex::new(0.5, 0.0));
        }
        assert!((s.norm_sqr() - 1.0).abs() < 1e-12);
        let s1 = StateVector::<f64>::uniform(1).unwrap();
        assert_eq!(s1.amplitudes(), &[Complex::new(1.0, 0.0)]);
        assert!(StateVector::<f64>::uniform(0).is_err());
    }

    #[test]
    fn from_amplitudes_enforces_norm() {
        let ok = StateVector::from_amplitudes(vec![
            Complex::new(0.6f64, 0.0),
            Complex::new(0.0, 0.8),
        ]);
        assert!(ok.is_ok());
        let bad = StateVector::from_amplitudes(vec![Complex::new(0.5f64, 0.0)]);
        assert!(bad.is_err());
        assert!(StateVector::<f64>::from_amplitudes(vec![]).is_err());
    }

    #[test]
    fn phase_oracle_examples() {
        let mut s = StateVector::<f64>::uniform(4).unwrap();
        let mut none = BooleanOracle::new(4, |_| false);
        s.apply_phase_oracle(&mut none).unwrap();
        assert_eq!(s, StateVector::uniform(4).unwrap());
        assert_eq!(none.query_count(), 1);

        let mut all = BooleanOracle::new(4, |_| true);
        s.apply_phase_oracle(&mut all).unwrap();
        for x in 0..4 {
            assert_eq!(s.amplitudes()[x], Complex::new(-0.5, 0.0));
        }
        assert!((s.norm_sqr() - 1.0).abs() < 1e-12);

        let mut s = StateVector::<f64>::uniform(4).unwrap();
        let mut one = first_m_marked(4, 1);
        s.apply_phase_oracle(&mut one).unwrap();
        assert_eq!(s.amplitudes()[0], Complex::new(-0.5, 0.0));
        assert_eq!(s.amplitudes()[1], Complex::new(0.5, 0.0));

        let mut mismatched = BooleanOracle::new(5, |_| false);
        assert!(s.apply_phase_oracle(&mut mismatched).is_err());
    }

    #[test]
    fn diffusion_fixes_uniform_and_is_an_involution() {
        let mut s = StateVector::<f64>::uniform(8).unwrap();
        s.apply_diffusion();
        for x in 0..8 {
            assert!((s.amplitudes()[x] - Complex::new(1.0 / 8f64.sqrt(), 0.0)).norm() < 1e-12);
        }

        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let raw: Vec<Complex<f64>> = (0..16)
            .map(|_| Complex::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
            .collect();
        let norm = raw.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        let amps: Vec<_> = raw.into_iter().map(|a| a / norm).collect();
        let original = StateVector::from_amplitudes(amps).unwrap();
        let mut s = original.clone();
        s.apply_diffusion();
        assert!((s.norm_sqr() - 1.0).abs() < 1e-9);
        s.apply_diffusion();
        for x in 0..16 {
            assert!((s.amplitudes()[x] - original.amplitudes()[x]).norm() < 1e-9);
        }
    }

    #[test]
    fn success_probability_closed_form() {
        assert!((grover_success_probability::<f64>(4, 1, 1) - 1.0).abs() < 1e-12);
        assert!((grover_success_probability::<f64>(8, 2, 0) - 0.25).abs() < 1e-12);
        assert_eq!(grover_success_probability::<f64>(8, 0, 5), 0.0);
        assert!((grover_success_probability::<f64>(8, 8, 3) - 1.0).abs() < 1e-12);
        let p32: f32 = grover_success_probability(4, 1, 1);
        assert!((p32 - 1.0).abs() < 1e-5);
    }

    #[test]
    #[should_panic(expected = "marked count exceeds domain")]
    fn success_probability_rejects_m_above_n() {
        grover_success_probability::<f64>(4, 5, 1);
    }

    #[test]
    fn simulator_matches_closed_form_on_small_grid() {
        for n in [1usize, 2, 3, 4, 7, 8, 16] {
            for m in 0..=n {
                for k in 0..=6 {
                    let simulated = simulated_success(n, m, k);
                    let predicted = grover_success_probability::<f64>(n, m, k);
                    assert!(
                        (simulated - predicted).abs() < 1e-9,
                        "n={n} m={m} k={k}: simulated {simulated}, closed form {predicted}"
                    );
                }
            }
        }
    }

    #[test]
    fn grover_search_finds_certain_instance() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..25 {
            let mut oracle = first_m_marked(4, 1);
            let (x, found) = grover_search::<f64, _>(&mut oracle, 1, &mut rng).unwrap();
            assert_eq!((x, found), (0, true));
            assert_eq!(oracle.query_count(), 2);
        }
    }

    #[test]
    fn grover_search_with_nothing_marked_fails() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mut oracle = BooleanOracle::new(8, |_| false);
        let (_, found) = grover_search::<f64, _>(&mut oracle, 3, &mut rng).unwrap();
        assert!(!found);
        assert_eq!(oracle.query_count(), 4);
    }

    #[test]
    fn grover_search_empirical_rate_matches_closed_form() {
        let n = 8;
        let m = 1;
        let k = 1;
        let runs = 10_000;
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        let mut hits = 0;
        for _ in 0..runs {
            let mut oracle = first_m_marked(n, m);
            let (_, found) = grover_search::<f64, _>(&mut oracle, k, &mut rng).unwrap();
            if found {
                hits += 1;
            }
        }
        let rate = hits as f64 / runs as f64;
        let predicted = grover_success_probability::<f64>(n, m, k);
        assert!(
            (rate - predicted).abs() < 0.02,
            "rate {rate} vs predicted {predicted}"
        );
    }

    #[test]
    fn bbht_with_nothing_marked_spends_exactly_the_budget() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let cfg = BbhtConfig { early_stop: false, ..BbhtConfig::default() };
        for budget in [1u64, 2, 5, 13, 40] {
            let mut oracle = BooleanOracle::new(8, |_| false);
            let (_, found) = bbht_search_with::<f64, _>(&mut oracle, budget, &cfg, &mut rng).unwrap();
            assert!(!found);
            assert_eq!(oracle.query_count(), budget);
        }
    }

    #[test]
    fn bbht_early_stop_spends_at_most_the_cap_schedule() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        // Cap for n=8 is ceil(pi/4 * sqrt(8)) = 3; ranges run 1,2,2,2,3.
        let max_schedule = 1 + 2 + 2 + 2 + 3;
        for _ in 0..200 {
            let mut oracle = BooleanOracle::new(8, |_| false);
            let (_, found) = bbht_search::<f64, _>(&mut oracle, 1000, &mut rng).unwrap();
            assert!(!found);
            assert!(oracle.query_count() <= max_schedule);
        }
    }

    #[test]
    fn bbht_never_exceeds_budget_and_verifies_success() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..500 {
            let mut oracle = first_m_marked(16, 3);
            let (x, found) = bbht_search::<f64, _>(&mut oracle, 7, &mut rng).unwrap();
            assert!(oracle.query_count() <= 7);
            if found {
                assert!(x < 3, "claimed success at unmarked point {x}");
            }
        }
    }

    #[test]
    fn bbht_finds_quarter_marked_instances_quickly() {
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        let runs = 10_000;
        let mut hits = 0;
        for _ in 0..runs {
            let mut oracle = first_m_marked(8, 2);
            let (_, found) = bbht_search::<f64, _>(&mut oracle, 10, &mut rng).unwrap();
            if found {
                hits += 1;
            }
        }
        let rate = hits as f64 / runs as f64;
        assert!(rate >= 0.6, "success rate {rate} below 0.6");
    }

    #[test]
    fn bbht_rejects_bad_parameters() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut oracle = BooleanOracle::new(4, |_| false);
        assert!(bbht_search::<f64, _>(&mut oracle, 0, &mut rng).is_err());
        let cfg = BbhtConfig { growth: 1.0, ..BbhtConfig::default() };
        assert!(bbht_search_with::<f64, _>(&mut oracle, 5, &cfg, &mut rng).is_err());
    }

    #[test]
    fn oracle_verify_counts_and_checks_range() {
        let mut oracle = first_m_marked(4, 2);
        assert!(oracle.verify(1).unwrap());
        assert!(!oracle.verify(3).unwrap());
        assert_eq!(oracle.query_count(), 2);
        assert!(oracle.verify(4).is_err());
        assert_eq!(oracle.query_count(), 2);
    }

    #[test]
    fn sampling_respects_the_distribution() {
        let s = StateVector::from_amplitudes(vec![
            Complex::new(0.0f64, 0.0),
            Complex::new(1.0, 0.0),
            Complex::new(0.0, 0.0),
        ])
        .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..100 {
            assert_eq!(s.sample(&mut rng), 1);
        }
    }

    #[test]
    fn f32_kernel_is_usable_at_loose_tolerance() {
        let mut oracle = first_m_marked(16, 2);
        let mut state = StateVector::<f32>::uniform(16).unwrap();
        for _ in 0..2 {
            state.apply_phase_oracle(&mut oracle).unwrap();
            state.apply_diffusion();
        }
        let simulated: f32 = (0..2).map(|x| state.probability(x)).sum();
        let predicted: f32 = grover_success_probability(16, 2, 2);
        assert!((simulated - predicted).abs() < 1e-4);
        assert!((state.norm_sqr() - 1.0).abs() < 1e-4);
    }
}
