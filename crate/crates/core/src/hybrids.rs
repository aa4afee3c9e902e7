//! Hybrid profile sequences and the two reductions that connect them.
//!
//! A target profile `C` is approached from the permutation profile through
//! hybrids `H_0, …, H_{q+1}`: each step up to `H_q` introduces one large
//! collision type in full, and the final step adds every small type at once.
//! `embed_collision_point` realizes the step `H_{j-1} → H_j` as a collision
//! problem on one block, and `build_related_pair` realizes the step
//! `H_q → H_{q+1}` as a bounded-difference relation with a checkable witness.

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::collision_profiles::{profile_of, CollisionProfile};
use crate::error::{Error, Result};
use crate::function_model::FunctionTable;

/// Where a multiplicity falls in the size partition.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MultiplicityClass {
    /// Multiplicity 1, which is never partitioned.
    Unit,
    /// Multiplicity absent from the profile.
    Empty,
    /// Present with fewer than `n^d` points.
    Small,
    /// Present with at least `n^d` points.
    Large,
}

/// Partition of the multiplicities `2..=n` of a profile by count size.
#[derive(Debug, Clone, PartialEq)]
pub struct IndexPartition {
    n: usize,
    d: f64,
    threshold: f64,
    small: Vec<usize>,
    large: Vec<usize>,
}

impl IndexPartition {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> f64 {
        self.d
    }

    /// The cutoff `n^d` between small and large counts.
    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    /// Multiplicities `i > 1` with `0 < c_i < n^d`, ascending.
    pub fn small(&self) -> &[usize] {
        &self.small
    }

    /// Multiplicities `i > 1` with `c_i ≥ n^d`, ascending.
    pub fn large(&self) -> &[usize] {
        &self.large
    }

    /// Number of large multiplicities, written `q` throughout.
    pub fn q(&self) -> usize {
        self.large.len()
    }

    /// Classifies a multiplicity in `1..=n`.
    pub fn classify(&self, i: usize) -> MultiplicityClass {
        assert!(i >= 1 && i <= self.n, "multiplicity {i} out of range");
        if i == 1 {
            MultiplicityClass::Unit
        } else if self.large.binary_search(&i).is_ok() {
            MultiplicityClass::Large
        } else if self.small.binary_search(&i).is_ok() {
            MultiplicityClass::Small
        } else {
            MultiplicityClass::Empty
        }
    }
}

/// Splits the multiplicities of `profile` at count threshold `n^d`.
pub fn partition_indices(profile: &CollisionProfile, d: f64) -> Result<IndexPartition> {
    if !(d > 0.0 && d < 1.0) {
        return Err(Error::InvalidParameter(format!("d must lie in (0,1), got {d}")));
    }
    let n = profile.n();
    let threshold = (n as f64).powf(d);
    let mut small = Vec::new();
    let mut large = Vec::new();
    for (i, b) in profile.multiplicities() {
        if i == 1 {
            continue;
        }
        if (b as f64) >= threshold {
            large.push(i);
        } else {
            small.push(i);
        }
    }
    Ok(IndexPartition { n, d, threshold, small, large })
}

/// The chain `H_0, …, H_{q+1}` from the permutation profile to `C`.
#[derive(Debug, Clone, PartialEq)]
pub struct HybridSequence {
    base: CollisionProfile,
    partition: IndexPartition,
    profiles: Vec<CollisionProfile>,
    offsets: Vec<usize>,
}

impl HybridSequence {
    /// The target profile `C = H_{q+1}`.
    pub fn base(&self) -> &CollisionProfile {
        &self.base
    }

    pub fn partition(&self) -> &IndexPartition {
        &self.partition
    }

    /// All profiles in order. A permutation target collapses to `[H_0]`;
    /// otherwise the list is `H_0..H_{q+1}` with `q+2` entries.
    pub fn profiles(&self) -> &[CollisionProfile] {
        &self.profiles
    }

    pub fn len(&self) -> usize {
        self.profiles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.profiles.is_empty()
    }

    /// `H_j`, if `j` is within the chain.
    pub fn hybrid(&self, j: usize) -> Result<&CollisionProfile> {
        self.profiles.get(j).ok_or_else(|| {
            Error::InvalidParameter(format!(
                "hybrid index {j} out of range for chain of length {}",
                self.profiles.len()
            ))
        })
    }

    pub fn q(&self) -> usize {
        self.partition.q()
    }

    /// `H_q`, the last hybrid before the small mass is added.
    pub fn before_small_step(&self) -> &CollisionProfile {
        &self.profiles[self.q().min(self.profiles.len() - 1)]
    }

    /// Cumulative block boundaries `g_0..g_q`; block `k` of the embedding
    /// occupies positions `g_{k-1}..g_k`.
    pub fn offsets(&self) -> &[usize] {
        &self.offsets
    }
}

/// Builds the hybrid chain for `profile` with size exponent `d`.
pub fn build_hybrids(profile: &CollisionProfile, d: f64) -> Result<HybridSequence> {
    let partition = partition_indices(profile, d)?;
    let n = profile.n();

    let mut offsets = vec![0usize];
    for &i in partition.large() {
        offsets.push(offsets.last().unwrap() + profile.count(i));
    }

    let h0 = CollisionProfile::permutation(n)?;
    if *profile == h0 {
        return Ok(HybridSequence {
            base: profile.clone(),
            partition,
            profiles: vec![h0],
            offsets,
        });
    }

    let mut profiles = vec![h0];
    for (j, &g_j) in offsets.iter().enumerate().skip(1) {
        let mut pairs: Vec<(usize, usize)> = partition.large()[..j]
            .iter()
            .map(|&i| (i, profile.count(i)))
            .collect();
        if n > g_j {
            pairs.push((1, n - g_j));
        }
        profiles.push(CollisionProfile::from_pairs(n, &pairs)?);
    }
    profiles.push(profile.clone());

    Ok(HybridSequence { base: profile.clone(), partition, profiles, offsets })
}

/// Evaluates the block embedding `h_f` at a single point.
///
/// `j` is a 1-based large-type index. Only positions inside block `j` depend
/// on `f`, so the callback is invoked at most once (it is consumed), matching
/// the cost accounting of the reduction: one query to `h_f` costs at most one
/// query to `f`.
pub fn embed_collision_point<F>(
    hs: &HybridSequence,
    j: usize,
    x: usize,
    f_at: F,
) -> Result<usize>
where
    F: FnOnce(usize) -> usize,
{
    let q = hs.q();
    if j == 0 || j > q {
        return Err(Error::InvalidParameter(format!(
            "block index {j} out of range 1..={q}"
        )));
    }
    let n = hs.base().n();
    if x >= n {
        return Err(Error::IndexOutOfRange { index: x, size: n });
    }
    let offsets = hs.offsets();
    if x >= offsets[j] {
        return Ok(x);
    }
    if x >= offsets[j - 1] {
        return Ok(offsets[j - 1] + f_at(x - offsets[j - 1]));
    }
    // Earlier block k < j: the fixed i_k-to-1 layout maps each run of i_k
    // positions to the run's first position.
    let k = offsets.partition_point(|&g| g <= x);
    let i_k = hs.partition().large()[k - 1];
    let rel = x - offsets[k - 1];
    Ok(offsets[k - 1] + (rel / i_k) * i_k)
}

/// Materializes `h_f` as a table on the full domain.
///
/// `f` must live on a domain of size `c_{i_j}` (the width of block `j`). If
/// `f` is 1-to-1 the result has profile `H_{j-1}`; if `f` is `i_j`-to-1 the
/// result has profile `H_j`. Anything else is accepted but lands outside the
/// chain.
pub fn embed_collision_instance(
    f: &FunctionTable,
    j: usize,
    hs: &HybridSequence,
) -> Result<FunctionTable> {
    let q = hs.q();
    if j == 0 || j > q {
        return Err(Error::InvalidParameter(format!(
            "block index {j} out of range 1..={q}"
        )));
    }
    let width = hs.offsets()[j] - hs.offsets()[j - 1];
    if f.size() != width {
        return Err(Error::SizeMismatch { expected: width, found: f.size() });
    }
    let n = hs.base().n();
    let values: Result<Vec<usize>> = (0..n)
        .map(|x| embed_collision_point(hs, j, x, |p| f.value(p)))
        .collect();
    FunctionTable::new(values?)
}

/// Witness that `f2` was obtained from `f1` by flattening the small-type
/// classes `s_set` and swapping each flattened point with a distinct
/// multiplicity-1 partner.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelationWitness {
    /// Domain points of small multiplicity under `f1`, ascending.
    pub s_set: Vec<usize>,
    /// For each `x` in `s_set`, the partner `y` outside `s_set` whose value
    /// was exchanged with `x`.
    pub pairing: Vec<(usize, usize)>,
}

impl RelationWitness {
    pub fn empty() -> Self {
        Self { s_set: Vec::new(), pairing: Vec::new() }
    }
}

/// Total count of small-multiplicity points, `v = Σ_{i small} c_i`.
///
/// For any valid profile this is strictly below `maxload(C) · n^d`, which is
/// what keeps the final hybrid step cheap; the bound is asserted.
pub fn small_mass(profile: &CollisionProfile, d: f64) -> Result<usize> {
    let partition = partition_indices(profile, d)?;
    let v: usize = partition.small().iter().map(|&i| profile.count(i)).sum();
    let bound = profile.maxload() as f64 * partition.threshold();
    assert!(
        (v as f64) < bound || v == 0,
        "small mass {v} not below maxload bound {bound}"
    );
    Ok(v)
}

/// Applies the small-mass flattening to `f1`, producing a function with
/// profile `H_q` plus the witness relating the two.
///
/// Step 1 collects `S`, the points whose multiplicity under `f1` is a small
/// type. Step 2 redirects `S` injectively into the values freed by `S` itself
/// together with the unused range (shuffled candidate order). Step 3 swaps
/// each `x` in `S` with a distinct random multiplicity-1 partner, so the two
/// functions disagree on exactly `S` and the partners.
pub fn build_related_pair<R: Rng + ?Sized>(
    f1: &FunctionTable,
    hs: &HybridSequence,
    rng: &mut R,
) -> Result<(FunctionTable, RelationWitness)> {
    let n = f1.size();
    if profile_of(f1) != *hs.base() {
        return Err(Error::FailedPrecondition(
            "profile of f1 must equal the chain's target profile".into(),
        ));
    }

    let mut hits = vec![0usize; n];
    for &v in f1.values() {
        hits[v] += 1;
    }
    let small: HashSet<usize> = hs.partition().small().iter().copied().collect();
    let s_set: Vec<usize> = (0..n).filter(|&x| small.contains(&hits[f1.value(x)])).collect();
    let v = s_set.len();
    if v == 0 {
        return Ok((f1.clone(), RelationWitness::empty()));
    }
    if n - v < v {
        return Err(Error::FailedPrecondition(format!(
            "need n - v >= v to pick distinct partners, but n = {n}, v = {v}"
        )));
    }

    let partner_pool: Vec<usize> = (0..n).filter(|&y| hits[f1.value(y)] == 1).collect();
    if partner_pool.len() < v {
        return Err(Error::FailedPrecondition(format!(
            "need {v} multiplicity-1 partners, but only {} exist",
            partner_pool.len()
        )));
    }

    let s_values: HashSet<usize> = s_set.iter().map(|&x| f1.value(x)).collect();
    let mut candidates: Vec<usize> = (0..n)
        .filter(|&w| hits[w] == 0 || s_values.contains(&w))
        .collect();
    if candidates.len() < v {
        return Err(Error::FailedPrecondition(format!(
            "need {v} free values for the flattened image, but only {} exist",
            candidates.len()
        )));
    }

    candidates.shuffle(rng);
    let mut partners = partner_pool;
    partners.shuffle(rng);
    partners.truncate(v);

    let mut values = f1.values().to_vec();
    let mut pairing = Vec::with_capacity(v);
    for (idx, &x) in s_set.iter().enumerate() {
        let fresh = candidates[idx];
        let y = partners[idx];
        values[x] = f1.value(y);
        values[y] = fresh;
        pairing.push((x, y));
    }
    let f2 = FunctionTable::new(values)?;
    Ok((f2, RelationWitness { s_set, pairing }))
}

/// Verifies that `w` exhibits the step-1..3 transformation from `f1` to `f2`.
///
/// Structurally malformed witnesses (out-of-range points, pairing not a
/// bijection from `s_set` to disjoint partners) are errors; a well-formed
/// witness that does not match the tables yields `false`.
pub fn check_relation_witness(
    f1: &FunctionTable,
    f2: &FunctionTable,
    w: &RelationWitness,
) -> Result<bool> {
    let n = f1.size();
    if f2.size() != n {
        return Err(Error::SizeMismatch { expected: n, found: f2.size() });
    }

    let s: HashSet<usize> = w.s_set.iter().copied().collect();
    if s.len() != w.s_set.len() {
        return Err(Error::InvalidParameter("witness s_set has duplicates".into()));
    }
    if w.pairing.len() != w.s_set.len() {
        return Err(Error::InvalidParameter(
            "witness pairing must cover s_set exactly".into(),
        ));
    }
    let mut partners = HashSet::new();
    for &(x, y) in &w.pairing {
        if x >= n || y >= n {
            return Err(Error::IndexOutOfRange { index: x.max(y), size: n });
        }
        if !s.contains(&x) {
            return Err(Error::InvalidParameter(format!(
                "pairing mentions {x}, which is not in s_set"
            )));
        }
        if s.contains(&y) {
            return Err(Error::InvalidParameter(format!(
                "partner {y} must lie outside s_set"
            )));
        }
        if !partners.insert(y) {
            return Err(Error::InvalidParameter(format!("partner {y} appears twice")));
        }
    }
    let paired: HashSet<usize> = w.pairing.iter().map(|&(x, _)| x).collect();
    if paired != s {
        return Err(Error::InvalidParameter(
            "witness pairing must cover s_set exactly".into(),
        ));
    }
    if w.s_set.iter().any(|&x| x >= n) {
        let &x = w.s_set.iter().find(|&&x| x >= n).unwrap();
        return Err(Error::IndexOutOfRange { index: x, size: n });
    }

    let mut hits = vec![0usize; n];
    for &v in f1.values() {
        hits[v] += 1;
    }

    // Step 1: s_set must consist of whole classes of multiplicity > 1.
    for &x in &w.s_set {
        if hits[f1.value(x)] < 2 {
            return Ok(false);
        }
    }
    for z in 0..n {
        if !s.contains(&z)
            && w.s_set.iter().any(|&x| f1.value(x) == f1.value(z))
        {
            return Ok(false);
        }
    }

    // Untouched points keep their values.
    for z in 0..n {
        if !s.contains(&z) && !partners.contains(&z) && f1.value(z) != f2.value(z) {
            return Ok(false);
        }
    }

    // Step 3 swap: x inherits its partner's (multiplicity-1) value, and the
    // partner carries x's step-2 value, which must come from the freed pool
    // and be used at most once.
    let s_values: HashSet<usize> = w.s_set.iter().map(|&x| f1.value(x)).collect();
    let mut fresh_seen = HashSet::new();
    for &(x, y) in &w.pairing {
        if hits[f1.value(y)] != 1 {
            return Ok(false);
        }
        if f2.value(x) != f1.value(y) {
            return Ok(false);
        }
        let fresh = f2.value(y);
        if hits[fresh] != 0 && !s_values.contains(&fresh) {
            return Ok(false);
        }
        if !fresh_seen.insert(fresh) {
            return Ok(false);
        }
    }
    Ok(true)
}
