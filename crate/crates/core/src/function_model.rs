//! Function tables over `{0, …, n-1}` and counted oracle access to them.
//!
//! Everything downstream measures cost in oracle queries, so the only way to
//! evaluate a table during an experiment is through [`Oracle::query`], which
//! advances a counter. Distinguishers receive an oracle, never a bare table.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};

/// Total function on `{0, …, n-1}`, stored as its value table.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FunctionTable {
    values: Vec<usize>,
}

impl FunctionTable {
    /// Builds a table from `values`; entry `x` is the image of `x`.
    /// The domain must be non-empty and every value must lie in range.
    pub fn new(values: Vec<usize>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyDomain);
        }
        let n = values.len();
        for &v in &values {
            if v >= n {
                return Err(Error::IndexOutOfRange { index: v, size: n });
            }
        }
        Ok(Self { values })
    }

    /// The identity permutation on `n` points.
    pub fn identity(n: usize) -> Result<Self> {
        Self::new((0..n).collect())
    }

    pub fn size(&self) -> usize {
        self.values.len()
    }

    /// Unchecked table lookup. Panics if `x >= size()`; experiments should go
    /// through [`Oracle::query`] instead so the access is counted.
    pub fn value(&self, x: usize) -> usize {
        self.values[x]
    }

    pub fn values(&self) -> &[usize] {
        &self.values
    }

    /// True when every range point is hit exactly once.
    pub fn is_bijection(&self) -> bool {
        let mut seen = vec![false; self.values.len()];
        for &v in &self.values {
            if seen[v] {
                return false;
            }
            seen[v] = true;
        }
        true
    }

    /// Inverse permutation. Fails on non-bijective tables.
    pub fn inverse(&self) -> Result<Self> {
        if !self.is_bijection() {
            return Err(Error::NotABijection { role: "table" });
        }
        let mut inv = vec![0; self.values.len()];
        for (x, &v) in self.values.iter().enumerate() {
            inv[v] = x;
        }
        Ok(Self { values: inv })
    }

    /// Serializes as two lines: the domain size, then the value table.
    pub fn to_text(&self) -> String {
        let row: Vec<String> = self.values.iter().map(|v| v.to_string()).collect();
        format!("{}\n{}\n", self.values.len(), row.join(" "))
    }

    /// Parses the [`to_text`](Self::to_text) format. Blank lines and lines
    /// starting with `#` are ignored; values may wrap across lines.
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
        if n == 0 {
            return Err(Error::EmptyDomain);
        }
        let mut values = Vec::with_capacity(n);
        for line in lines {
            for token in line.split_whitespace() {
                let v: usize = token
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad table entry {token:?}")))?;
                values.push(v);
            }
        }
        if values.len() != n {
            return Err(Error::Parse(format!(
                "expected {n} table entries, found {}",
                values.len()
            )));
        }
        Self::new(values)
    }
}

/// Uniform random function on `n` points: each image drawn independently.
pub fn sample_uniform_function<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<FunctionTable> {
    if n == 0 {
        return Err(Error::EmptyDomain);
    }
    let values = (0..n).map(|_| rng.random_range(0..n)).collect();
    Ok(FunctionTable { values })
}

/// Uniform random permutation on `n` points via Fisher-Yates.
pub fn sample_uniform_permutation<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<FunctionTable> {
    if n == 0 {
        return Err(Error::EmptyDomain);
    }
    let mut values: Vec<usize> = (0..n).collect();
    values.shuffle(rng);
    Ok(FunctionTable { values })
}

/// The table `x ↦ pi(f(sigma(x)))` for permutations `pi` and `sigma`.
///
/// Relabeling domain and range this way lands on a uniformly random member of
/// `f`'s collision class when `pi` and `sigma` are uniform, which is how
/// profiles are sampled and how distinguishers are made class-oblivious.
pub fn conjugate(
    f: &FunctionTable,
    pi: &FunctionTable,
    sigma: &FunctionTable,
) -> Result<FunctionTable> {
    let n = f.size();
    if pi.size() != n {
        return Err(Error::SizeMismatch { expected: n, found: pi.size() });
    }
    if sigma.size() != n {
        return Err(Error::SizeMismatch { expected: n, found: sigma.size() });
    }
    if !pi.is_bijection() {
        return Err(Error::NotABijection { role: "pi" });
    }
    if !sigma.is_bijection() {
        return Err(Error::NotABijection { role: "sigma" });
    }
    let values = (0..n)
        .map(|x| pi.value(f.value(sigma.value(x))))
        .collect();
    Ok(FunctionTable { values })
}

/// Counted access to a function.
///
/// `query` is the only evaluation distinguishers may use classically. `peek`
/// exists for the state-vector simulator, which accounts for cost per oracle
/// application over the whole domain rather than per point.
pub trait Oracle: Sync {
    fn size(&self) -> usize;

    /// Evaluates the function at `x` and advances the query counter.
    /// Out-of-range points are rejected and leave the counter unchanged.
    fn query(&mut self, x: usize) -> Result<usize>;

    fn query_count(&self) -> u64;

    /// Uncounted table read; `x` must be in range.
    fn peek(&self, x: usize) -> usize;
}

/// An [`Oracle`] backed directly by a [`FunctionTable`].
#[derive(Debug, Clone)]
pub struct CountingOracle {
    table: FunctionTable,
    queries: u64,
}

impl CountingOracle {
    pub fn new(table: FunctionTable) -> Self {
        Self { table, queries: 0 }
    }

    pub fn table(&self) -> &FunctionTable {
        &self.table
    }

    pub fn reset(&mut self) {
        self.queries = 0;
    }

    pub fn into_table(self) -> FunctionTable {
        self.table
    }
}

impl Oracle for CountingOracle {
    fn size(&self) -> usize {
        self.table.size()
    }

    fn query(&mut self, x: usize) -> Result<usize> {
        if x >= self.table.size() {
            return Err(Error::IndexOutOfRange { index: x, size: self.table.size() });
        }
        self.queries += 1;
        Ok(self.table.value(x))
    }

    fn query_count(&self) -> u64 {
        self.queries
    }

    fn peek(&self, x: usize) -> usize {
        self.table.value(x)
    }
}

/// View of an inner oracle relabeled as `x ↦ pi(inner(sigma(x)))`.
///
/// Every virtual query is implemented by exactly one query to the inner
/// oracle, and the counter is the inner oracle's counter.
pub struct ConjugatedOracle<'a, O: Oracle> {
    inner: &'a mut O,
    pi: FunctionTable,
    sigma: FunctionTable,
}

impl<'a, O: Oracle> ConjugatedOracle<'a, O> {
    pub fn new(inner: &'a mut O, pi: FunctionTable, sigma: FunctionTable) -> Result<Self> {
        let n = inner.size();
        if pi.size() != n {
            return Err(Error::SizeMismatch { expected: n, found: pi.size() });
        }
        if sigma.size() != n {
            return Err(Error::SizeMismatch { expected: n, found: sigma.size() });
        }
        if !pi.is_bijection() {
            return Err(Error::NotABijection { role: "pi" });
        }
        if !sigma.is_bijection() {
            return Err(Error::NotABijection { role: "sigma" });
        }
        Ok(Self { inner, pi, sigma })
    }
}

impl<O: Oracle> Oracle for ConjugatedOracle<'_, O> {
    fn size(&self) -> usize {
        self.inner.size()
    }

    fn query(&mut self, x: usize) -> Result<usize> {
        if x >= self.inner.size() {
            return Err(Error::IndexOutOfRange { index: x, size: self.inner.size() });
        }
        let y = self.inner.query(self.sigma.value(x))?;
        Ok(self.pi.value(y))
    }

    fn query_count(&self) -> u64 {
        self.inner.query_count()
    }

    fn peek(&self, x: usize) -> usize {
        self.pi.value(self.inner.peek(self.sigma.value(x)))
    }
}
