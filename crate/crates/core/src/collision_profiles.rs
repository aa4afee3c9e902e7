//! Collision profiles.
//!
//! The profile of `f` records, for each multiplicity `i`, how many domain
//! points `x` satisfy `|f⁻¹(f(x))| = i`. Two functions with equal profiles
//! are relabelings of one another (domain and range permutations), so the
//! profile is exactly what a query-bounded algorithm can hope to learn about
//! the "shape" of its oracle.

use std::collections::BTreeMap;

use rand::Rng;

use crate::error::{Error, Result};
use crate::function_model::{
    conjugate, sample_uniform_permutation, FunctionTable,
};

/// Sparse collision profile `{multiplicity: count}` on a domain of size `n`.
///
/// Only nonzero counts are stored. Invariants: counts sum to `n`, and each
/// count `b_i` is divisible by `i` (points of multiplicity `i` come in whole
/// preimage classes of size `i`).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CollisionProfile {
    n: usize,
    counts: BTreeMap<usize, usize>,
}

impl CollisionProfile {
    pub fn new(n: usize, counts: BTreeMap<usize, usize>) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyDomain);
        }
        let mut total = 0usize;
        for (&i, &b) in &counts {
            if i == 0 || i > n {
                return Err(Error::InvalidProfile(format!(
                    "multiplicity {i} out of range for n = {n}"
                )));
            }
            if b == 0 {
                return Err(Error::InvalidProfile(format!(
                    "zero count stored for multiplicity {i}"
                )));
            }
            if b % i != 0 {
                return Err(Error::InvalidProfile(format!(
                    "count {b} for multiplicity {i} is not divisible by {i}"
                )));
            }
            total += b;
        }
        if total != n {
            return Err(Error::InvalidProfile(format!(
                "counts sum to {total}, expected {n}"
            )));
        }
        Ok(Self { n, counts })
    }

    pub fn from_pairs(n: usize, pairs: &[(usize, usize)]) -> Result<Self> {
        let mut counts = BTreeMap::new();
        for &(i, b) in pairs {
            if counts.insert(i, b).is_some() {
                return Err(Error::InvalidProfile(format!("duplicate multiplicity {i}")));
            }
        }
        Self::new(n, counts)
    }

    /// Profile of any permutation on `n` points: all multiplicities are 1.
    pub fn permutation(n: usize) -> Result<Self> {
        Self::from_pairs(n, &[(1, n)])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Count of domain points with the given multiplicity (0 if absent).
    pub fn count(&self, multiplicity: usize) -> usize {
        self.counts.get(&multiplicity).copied().unwrap_or(0)
    }

    /// `(multiplicity, count)` pairs in increasing multiplicity.
    pub fn multiplicities(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.counts.iter().map(|(&i, &b)| (i, b))
    }

    /// Largest multiplicity present.
    pub fn maxload(&self) -> usize {
        *self.counts.keys().next_back().expect("profile is never empty")
    }

    /// Number of distinct range values hit, `Σ b_i / i`.
    pub fn block_count(&self) -> usize {
        self.counts.iter().map(|(&i, &b)| b / i).sum()
    }

    /// The maxload bound below which a profile counts as good:
    /// `3·log2(n) / log2(log2(n))`. Defined for `n ≥ 4`.
    pub fn goodness_threshold(n: usize) -> Result<f64> {
        if n < 4 {
            return Err(Error::InvalidParameter(
                "goodness threshold needs n >= 4".into(),
            ));
        }
        let log_n = (n as f64).log2();
        Ok(3.0 * log_n / log_n.log2())
    }

    /// True when `maxload < 3·log2(n) / log2(log2(n))`. Almost every uniform
    /// random function is good in this sense; permutations always are.
    pub fn is_good(&self) -> Result<bool> {
        let threshold = Self::goodness_threshold(self.n)?;
        Ok((self.maxload() as f64) < threshold)
    }

    /// Serializes as a line `n` followed by one `i b_i` line per nonzero
    /// count, in increasing `i`.
    pub fn to_text(&self) -> String {
        let mut out = format!("{}\n", self.n);
        for (i, b) in self.multiplicities() {
            out.push_str(&format!("{i} {b}\n"));
        }
        out
    }

    /// Parses the [`to_text`](Self::to_text) format. Blank lines and lines
    /// starting with `#` are ignored.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'));
        let n: usize = lines
            .next()
            .ok_or_else(|| Error::Parse("missing domain size line".into()))?
            .parse()
            .map_err(|_| Error::Parse("domain size must be an integer".into()))?;
        let mut counts = BTreeMap::new();
        for line in lines {
            let mut tokens = line.split_whitespace();
            let (Some(i), Some(b), None) = (tokens.next(), tokens.next(), tokens.next()) else {
                return Err(Error::Parse(format!("expected \"i b_i\", found {line:?}")));
            };
            let i: usize = i
                .parse()
                .map_err(|_| Error::Parse(format!("bad multiplicity {i:?}")))?;
            let b: usize = b
                .parse()
                .map_err(|_| Error::Parse(format!("bad count {b:?}")))?;
            if counts.insert(i, b).is_some() {
                return Err(Error::Parse(format!("duplicate multiplicity {i}")));
            }
        }
        Self::new(n, counts)
    }
}

/// Number of domain points sharing `f(x)`, including `x` itself.
pub fn multiplicity(f: &FunctionTable, x: usize) -> Result<usize> {
    if x >= f.size() {
        return Err(Error::IndexOutOfRange { index: x, size: f.size() });
    }
    let target = f.value(x);
    Ok(f.values().iter().filter(|&&v| v == target).count())
}

/// Collision profile of `f`.
pub fn profile_of(f: &FunctionTable) -> CollisionProfile {
    let n = f.size();
    let mut hits = vec![0usize; n];
    for &v in f.values() {
        hits[v] += 1;
    }
    let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
    for &c in hits.iter().filter(|&&c| c > 0) {
        *counts.entry(c).or_default() += c;
    }
    CollisionProfile { n, counts }
}

/// True when `f` and `g` are domain/range relabelings of each other, i.e.
/// share a collision profile.
pub fn collision_equivalent(f: &FunctionTable, g: &FunctionTable) -> Result<bool> {
    if f.size() != g.size() {
        return Err(Error::SizeMismatch { expected: f.size(), found: g.size() });
    }
    Ok(profile_of(f) == profile_of(g))
}

/// The canonical representative of a profile's collision class.
///
/// Domain points are laid out in consecutive blocks of increasing
/// multiplicity, and each block maps to its own first element. For example
/// `{2: 4}` on `n = 4` yields `[0, 0, 2, 2]`.
pub fn canonical_function(profile: &CollisionProfile) -> FunctionTable {
    let mut values = Vec::with_capacity(profile.n());
    for (i, b) in profile.multiplicities() {
        for _ in 0..b / i {
            let start = values.len();
            values.extend(std::iter::repeat_n(start, i));
        }
    }
    FunctionTable::new(values).expect("canonical layout is always a valid table")
}

/// A uniform random member of the profile's collision class, drawn by
/// conjugating the canonical representative with two uniform permutations.
pub fn sample_from_profile<R: Rng + ?Sized>(
    profile: &CollisionProfile,
    rng: &mut R,
) -> FunctionTable {
    let n = profile.n();
    let base = canonical_function(profile);
    let pi = sample_uniform_permutation(n, rng).expect("n >= 1");
    let sigma = sample_uniform_permutation(n, rng).expect("n >= 1");
    conjugate(&base, &pi, &sigma).expect("conjugation of valid tables")
}
