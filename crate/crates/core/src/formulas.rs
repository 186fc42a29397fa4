//! Closed-form identities for partition statistics, expressed through the
//! lengths of leading subpartitions, plus the diagnostic supernorm estimate
//! and the staircase-partition identities.
//!
//! Two families of closed forms are provided. The `*_from_lengths` forms are
//! the identities obtained by a single Abel summation against the stair-step
//! function u -> len(lambda(1,u)); they are exact. The `*_stated` forms are
//! fully telescoped variants that drop interior boundary terms; they fail on
//! partitions with small parts, and `closed_form_audit` pins down exactly
//! where, reporting the minimal counterexamples instead of patching them.

use num_bigint::BigUint;
use num_traits::One;
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::partition::Partition;
use crate::primes::PrimeTable;

/// lambda(m, n): the subpartition keeping only parts with sizes in [m, n].
pub fn subpartition_range(p: &Partition, lo: u64, hi: u64) -> Result<Partition> {
    if lo < 1 || lo > hi {
        return Err(Error::BadRange { lo, hi });
    }
    let pairs = p
        .multiplicities()
        .iter()
        .copied()
        .filter(|&(part, _)| part >= lo && part <= hi);
    Partition::from_multiplicities(pairs)
}

/// len(lambda(1, u)) without building the subpartition.
fn leading_length(p: &Partition, u: u64) -> u64 {
    p.multiplicities()
        .iter()
        .take_while(|&&(part, _)| part <= u)
        .map(|&(_, m)| m)
        .sum()
}

/// Direct oracle: log N(lambda) = sum of m_i * ln(i).
pub fn log_norm_direct(p: &Partition) -> f64 {
    p.multiplicities()
        .iter()
        .map(|&(part, m)| m as f64 * (part as f64).ln())
        .sum()
}

/// log N(lambda) computed from the length and largest part alone, via the
/// stair-step identity
///   log N = len(lambda) ln r - sum_{u=1}^{r-1} len(lambda(1,u)) (ln(u+1) - ln u),
/// with the sum grouped over the bands between distinct part values.
/// Requires largest part r > 1.
pub fn log_norm_from_lengths(p: &Partition) -> Result<f64> {
    let r = p.largest_part()?;
    if r <= 1 {
        return Err(Error::LargestPartTooSmall { got: r });
    }
    let distinct: Vec<u64> = p.multiplicities().iter().map(|&(part, _)| part).collect();
    let mut acc = p.length() as f64 * (r as f64).ln();
    for w in distinct.windows(2) {
        let len = leading_length(p, w[0]) as f64;
        acc -= len * ((w[1] as f64).ln() - (w[0] as f64).ln());
    }
    Ok(acc)
}

/// |lambda| from the same stair-step identity, in exact integer arithmetic:
///   |lambda| = len(lambda) * r - sum_{u=1}^{r-1} len(lambda(1,u)).
pub fn size_from_lengths(p: &Partition) -> Result<u64> {
    let r = p.largest_part()?;
    let distinct: Vec<u64> = p.multiplicities().iter().map(|&(part, _)| part).collect();
    let mut acc = p.length() as u128 * r as u128;
    for w in distinct.windows(2) {
        acc -= leading_length(p, w[0]) as u128 * (w[1] - w[0]) as u128;
    }
    Ok(u64::try_from(acc).expect("size fits u64"))
}

/// The fully telescoped closed form for log N(lambda), evaluated verbatim:
///   len(lambda) ln r + eps_r m_{floor(r/2)} ln(floor(r/2))
///     + sum_{i=2}^{floor(r/2)} [len(lambda(i, r-i+1)) - len(lambda(1, r-i))] ln(r-i+1),
/// eps_r = 1 for odd r, 0 for even r. See `closed_form_audit` for where this
/// variant drifts from log N.
pub fn log_norm_stated(p: &Partition) -> Result<f64> {
    let r = p.largest_part()?;
    if r <= 1 {
        return Err(Error::LargestPartTooSmall { got: r });
    }
    let half = r / 2;
    let mut acc = p.length() as f64 * (r as f64).ln();
    if r % 2 == 1 {
        acc += p.multiplicity_of(half) as f64 * (half as f64).ln();
    }
    for i in 2..=half {
        let inner = subpartition_range(p, i, r - i + 1)?.length() as f64;
        let leading = leading_length(p, r - i) as f64;
        acc += (inner - leading) * ((r - i + 1) as f64).ln();
    }
    Ok(acc)
}

/// The fully telescoped closed form for |lambda|, evaluated verbatim:
///   len(lambda) * r + sum_{i=3}^{r} (r-i) len(lambda(1, i-1)) - r * m_1.
pub fn size_stated(p: &Partition) -> Result<i64> {
    let r = p.largest_part()?;
    let mut acc = p.length() as i128 * r as i128;
    for i in 3..=r {
        acc += (r - i) as i128 * leading_length(p, i - 1) as i128;
    }
    acc -= r as i128 * p.multiplicity_of(1) as i128;
    Ok(i64::try_from(acc).expect("stated size fits i64"))
}

/// Relative comparison with a small absolute floor.
pub fn floats_agree(a: f64, b: f64) -> bool {
    let tol = 1e-12f64.max(1e-9 * a.abs().max(b.abs()));
    (a - b).abs() <= tol
}

#[derive(Debug, Clone, Serialize)]
pub struct Counterexample {
    pub partition: String,
    pub formula_value: f64,
    pub direct_value: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct FormCheck {
    pub checked: u64,
    pub failures: u64,
    /// First failure in enumeration order (sizes ascending), i.e. a minimal
    /// counterexample.
    pub first_counterexample: Option<Counterexample>,
}

impl FormCheck {
    fn new() -> Self {
        FormCheck {
            checked: 0,
            failures: 0,
            first_counterexample: None,
        }
    }

    fn record(&mut self, p: &Partition, formula: f64, direct: f64) {
        self.checked += 1;
        if !floats_agree(formula, direct) {
            self.failures += 1;
            if self.first_counterexample.is_none() {
                self.first_counterexample = Some(Counterexample {
                    partition: p.to_string(),
                    formula_value: formula,
                    direct_value: direct,
                });
            }
        }
    }
}

/// Exhaustive audit of all four closed forms against the direct sums, over
/// every partition of size <= max_size (within each form's domain).
#[derive(Debug, Clone, Serialize)]
pub struct FormulaAudit {
    pub max_size: u64,
    pub log_norm_from_lengths: FormCheck,
    pub size_from_lengths: FormCheck,
    pub log_norm_stated: FormCheck,
    pub size_stated: FormCheck,
}

pub fn closed_form_audit(max_size: u64) -> FormulaAudit {
    let mut audit = FormulaAudit {
        max_size,
        log_norm_from_lengths: FormCheck::new(),
        size_from_lengths: FormCheck::new(),
        log_norm_stated: FormCheck::new(),
        size_stated: FormCheck::new(),
    };
    for n in 1..=max_size {
        for p in crate::partition::partitions_of_size(n, &crate::partition::Constraints::none()) {
            audit_one(&mut audit, &p);
        }
    }
    audit
}

pub fn audit_one(audit: &mut FormulaAudit, p: &Partition) {
    let log_direct = log_norm_direct(p);
    let size_direct = p.size();
    if p.largest_part().map(|r| r > 1).unwrap_or(false) {
        audit.log_norm_from_lengths.record(
            p,
            log_norm_from_lengths(p).expect("domain checked"),
            log_direct,
        );
        audit
            .log_norm_stated
            .record(p, log_norm_stated(p).expect("domain checked"), log_direct);
    }
    if !p.is_empty() {
        audit.size_from_lengths.record(
            p,
            size_from_lengths(p).expect("domain checked") as f64,
            size_direct as f64,
        );
        audit.size_stated.record(
            p,
            size_stated(p).expect("domain checked") as f64,
            size_direct as f64,
        );
    }
}

/// Random partition with largest part in [2, max_largest] and multiplicities
/// up to 3, for sampled formula checks.
pub fn random_partition<R: Rng + ?Sized>(rng: &mut R, max_largest: u64) -> Partition {
    let r = rng.random_range(2..=max_largest.max(2));
    let mut pairs: Vec<(u64, u64)> = Vec::new();
    for part in 1..r {
        let m = rng.random_range(0..=3u64);
        if m > 0 {
            pairs.push((part, m));
        }
    }
    pairs.push((r, rng.random_range(1..=3u64)));
    Partition::from_multiplicities(pairs).expect("parts are positive")
}

/// Logs of the crude supernorm estimate 2^{m_1} prod_{i>=2} (i ln i)^{m_i}
/// next to the true log supernorm, with their ratio. Purely diagnostic: the
/// estimate is poor at small parts (part 3 contributes 3 ln 3 ~ 3.30 while
/// the third prime is 5).
#[derive(Debug, Clone, Serialize)]
pub struct SupernormEstimate {
    pub approx_log: f64,
    pub exact_log: f64,
    pub log_ratio: f64,
}

pub fn supernorm_approximation(p: &Partition, table: &PrimeTable) -> Result<SupernormEstimate> {
    let mut approx_log = 0.0f64;
    let mut exact_log = 0.0f64;
    for &(part, m) in p.multiplicities() {
        let m = m as f64;
        if part == 1 {
            approx_log += m * 2f64.ln();
        } else {
            let x = part as f64;
            approx_log += m * (x * x.ln()).ln();
        }
        exact_log += m * (table.nth_prime(part)? as f64).ln();
    }
    let log_ratio = if exact_log == 0.0 {
        1.0
    } else {
        approx_log / exact_log
    };
    Ok(SupernormEstimate {
        approx_log,
        exact_log,
        log_ratio,
    })
}

/// The staircase partition <1,2,...,n>.
pub fn staircase_partition(n: u64) -> Partition {
    Partition::from_multiplicities((1..=n).map(|i| (i, 1))).expect("parts are positive")
}

/// The staircase partition together with its four exact identities:
/// length n, size n(n+1)/2, norm n!, supernorm = product of first n primes.
#[derive(Debug, Clone)]
pub struct StaircaseReport {
    pub n: u64,
    pub partition: Partition,
    pub length: u64,
    pub size: u64,
    pub norm: BigUint,
    pub supernorm: BigUint,
    pub length_is_n: bool,
    pub size_is_triangular: bool,
    pub norm_is_factorial: bool,
    pub supernorm_is_primorial: bool,
}

pub fn staircase_report(n: u64, table: &PrimeTable) -> Result<StaircaseReport> {
    let partition = staircase_partition(n);
    let length = partition.length();
    let size = partition.size();
    let norm = partition.norm();
    let supernorm = crate::bijections::supernorm(&partition, table)?;

    let mut factorial = BigUint::one();
    for i in 2..=n {
        factorial *= BigUint::from(i);
    }
    let primorial = table.primorial(n)?;

    Ok(StaircaseReport {
        n,
        length_is_n: length == n,
        size_is_triangular: size == n * (n + 1) / 2,
        norm_is_factorial: norm == factorial,
        supernorm_is_primorial: supernorm == primorial,
        partition,
        length,
        size,
        norm,
        supernorm,
    })
}
