//! Sweep orchestration: measures distinguisher bias over grids of domain
//! sizes and query budgets, writes stable CSV, and fits scaling exponents.

use std::fs;
use std::path::Path;

use rand_chacha::ChaCha8Rng;

use crate::distinguishers::{estimate_bias, BhtDistinguisher, BiasEstimate, BirthdayDistinguisher};
use crate::error::{Error, Result};
use crate::function_model::{sample_uniform_function, sample_uniform_permutation};
use crate::harness::config::{DistinguisherKind, ExperimentConfig};
use crate::stats::{linear_fit, LinearFit};
use crate::trial_rng;

/// Fixed CSV schema; the header never changes.
pub const CSV_HEADER: &str = "n,budget,p_function,p_permutation,bias,ci_halfwidth,trials,seed";

/// One measured sweep point.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub n: usize,
    pub budget: u64,
    pub p_function: f64,
    pub p_permutation: f64,
    pub bias: f64,
    pub ci_halfwidth: f64,
    pub trials: usize,
    pub seed: u64,
}

impl SweepRow {
    pub fn to_csv_line(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{}",
            self.n,
            self.budget,
            self.p_function,
            self.p_permutation,
            self.bias,
            self.ci_halfwidth,
            self.trials,
            self.seed
        )
    }
}

/// Renders rows under the fixed header with LF line endings.
pub fn rows_to_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for row in rows {
        out.push_str(&row.to_csv_line());
        out.push('\n');
    }
    out
}

pub fn write_csv(path: &Path, rows: &[SweepRow]) -> Result<()> {
    fs::write(path, rows_to_csv(rows)).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Measures the bias of one configured distinguisher at `(n, budget)` between
/// uniform functions and uniform permutations.
///
/// For `bht` the budget is the total query count: `k` classical table queries
/// (half the budget unless pinned) plus the remainder for the quantum search.
pub fn run_point(
    kind: DistinguisherKind,
    n: usize,
    budget: u64,
    k: Option<usize>,
    trials: usize,
    rng: &mut ChaCha8Rng,
) -> Result<BiasEstimate> {
    let sample_f = move |r: &mut ChaCha8Rng| sample_uniform_function(n, r);
    let sample_p = move |r: &mut ChaCha8Rng| sample_uniform_permutation(n, r);
    match kind {
        DistinguisherKind::Birthday => {
            if budget as usize > n {
                return Err(Error::InvalidParameter(format!(
                    "birthday budget {budget} exceeds domain size {n}"
                )));
            }
            let inner = BirthdayDistinguisher { queries: budget as usize };
            estimate_bias(&inner, sample_f, sample_p, trials, rng)
        }
        DistinguisherKind::Bht => {
            let table = k.unwrap_or(budget.div_ceil(2) as usize);
            if table as u64 >= budget {
                return Err(Error::InvalidParameter(format!(
                    "table size {table} leaves no quantum budget out of {budget}"
                )));
            }
            if table > n {
                return Err(Error::InvalidParameter(format!(
                    "table size {table} exceeds domain size {n}"
                )));
            }
            let inner = BhtDistinguisher::new(table, budget - table as u64);
            estimate_bias(&inner, sample_f, sample_p, trials, rng)
        }
    }
}

/// One sweep point as a CSV row. The generator stream is the row index, so a
/// row measured alone matches the same row inside a full sweep.
pub fn run_single(
    kind: DistinguisherKind,
    n: usize,
    budget: u64,
    k: Option<usize>,
    trials: usize,
    seed: u64,
    stream: u64,
) -> Result<SweepRow> {
    let mut rng = trial_rng(seed, stream);
    let est = run_point(kind, n, budget, k, trials, &mut rng)?;
    Ok(SweepRow {
        n,
        budget,
        p_function: est.p_function,
        p_permutation: est.p_permutation,
        bias: est.bias,
        ci_halfwidth: est.confidence_halfwidth,
        trials,
        seed,
    })
}

/// Runs the full grid `n_values × budgets` in deterministic order. Invalid
/// configurations are rejected before any row is measured.
pub fn run_sweep(cfg: &ExperimentConfig) -> Result<Vec<SweepRow>> {
    for &n in &cfg.n_values {
        for &budget in &cfg.budgets {
            validate_point(cfg.distinguisher, n, budget, cfg.k)?;
        }
    }
    let mut rows = Vec::with_capacity(cfg.n_values.len() * cfg.budgets.len());
    let mut stream = 0u64;
    for &n in &cfg.n_values {
        for &budget in &cfg.budgets {
            rows.push(run_single(
                cfg.distinguisher,
                n,
                budget,
                cfg.k,
                cfg.trials,
                cfg.seed,
                stream,
            )?);
            stream += 1;
        }
    }
    Ok(rows)
}

fn validate_point(kind: DistinguisherKind, n: usize, budget: u64, k: Option<usize>) -> Result<()> {
    match kind {
        DistinguisherKind::Birthday => {
            if budget == 0 || budget as usize > n {
                return Err(Error::InvalidParameter(format!(
                    "birthday budget {budget} outside 1..={n}"
                )));
            }
        }
        DistinguisherKind::Bht => {
            let table = k.unwrap_or(budget.div_ceil(2) as usize);
            if table == 0 || table as u64 >= budget || table > n {
                return Err(Error::InvalidParameter(format!(
                    "bht split (table {table}, budget {budget}) invalid for n = {n}"
                )));
            }
        }
    }
    Ok(())
}

/// Least-squares fit of `log2(threshold)` against `log2(n)`.
///
/// The slope is the scaling exponent: points on `t = c·n^e` give slope `e`
/// exactly.
pub fn fit_exponent(points: &[(f64, f64)]) -> Result<LinearFit<f64>> {
    if points.len() < 3 {
        return Err(Error::InvalidParameter(format!(
            "exponent fit needs at least 3 points, got {}",
            points.len()
        )));
    }
    if points.iter().any(|&(n, t)| n <= 0.0 || t <= 0.0) {
        return Err(Error::InvalidParameter(
            "exponent fit needs strictly positive coordinates".into(),
        ));
    }
    let logs: Vec<(f64, f64)> = points.iter().map(|&(n, t)| (n.log2(), t.log2())).collect();
    linear_fit(&logs)
}

/// Smallest budget whose measured bias reaches `target`, located by doubling
/// then bisection.
///
/// Each probed budget gets its own generator stream derived from `(n,
/// budget)`, so the answer does not depend on the search path. The bisection
/// stops once the bracket is within one part in sixteen, which is tighter
/// than the noise on the bias curve.
pub fn find_threshold_budget(
    kind: DistinguisherKind,
    n: usize,
    k: Option<usize>,
    trials: usize,
    seed: u64,
    target: f64,
) -> Result<u64> {
    if !(target > 0.0 && target < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "target bias must lie in (0,1), got {target}"
        )));
    }
    let measure = |budget: u64| -> Result<f64> {
        let mut rng = trial_rng(seed, (n as u64) << 32 | budget);
        Ok(run_point(kind, n, budget, k, trials, &mut rng)?.bias)
    };
    let floor = match kind {
        DistinguisherKind::Birthday => 2,
        DistinguisherKind::Bht => 2,
    };
    let ceiling = n as u64;

    let mut lo = floor;
    let mut hi = floor;
    loop {
        if measure(hi)? >= target {
            break;
        }
        if hi >= ceiling {
            return Err(Error::FailedPrecondition(format!(
                "bias never reached {target} up to budget {ceiling} at n = {n}"
            )));
        }
        lo = hi;
        hi = (hi * 2).min(ceiling);
    }
    if hi == floor {
        return Ok(floor);
    }
    while hi - lo > (lo / 16).max(1) {
        let mid = lo + (hi - lo) / 2;
        if measure(mid)? >= target {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Extracts `(n, threshold)` fit points from CSV text.
///
/// Accepts either bare two-column `n,threshold` data (optional header) or the
/// sweep schema, where each `n` contributes its smallest budget with bias at
/// least 0.5.
pub fn points_from_csv(text: &str) -> Result<Vec<(f64, f64)>> {
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty()).peekable();
    let Some(&first) = lines.peek() else {
        return Err(Error::Parse("empty CSV".into()));
    };

    if first == CSV_HEADER {
        lines.next();
        let mut thresholds: Vec<(f64, f64)> = Vec::new();
        for line in lines {
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 8 {
                return Err(Error::Parse(format!("expected 8 CSV fields, found {line:?}")));
            }
            let n: f64 = parse_field(fields[0], "n")?;
            let budget: f64 = parse_field(fields[1], "budget")?;
            let bias: f64 = parse_field(fields[4], "bias")?;
            if bias >= 0.5 {
                match thresholds.iter_mut().find(|(m, _)| *m == n) {
                    Some((_, t)) => *t = t.min(budget),
                    None => thresholds.push((n, budget)),
                }
            }
        }
        if thresholds.is_empty() {
            return Err(Error::Parse(
                "no rows with bias >= 0.5; nothing to fit".into(),
            ));
        }
        return Ok(thresholds);
    }

    let mut points = Vec::new();
    for (at, line) in lines.enumerate() {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 2 {
            return Err(Error::Parse(format!("expected \"n,threshold\", found {line:?}")));
        }
        if at == 0 && fields[0].parse::<f64>().is_err() {
            continue;
        }
        points.push((parse_field(fields[0], "n")?, parse_field(fields[1], "threshold")?));
    }
    Ok(points)
}

fn parse_field(field: &str, name: &str) -> Result<f64> {
    field
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("bad {name} field {field:?}")))
}
