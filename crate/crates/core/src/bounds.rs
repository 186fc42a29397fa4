//! Sweep verifiers for the supernorm bounds: the power bound against the
//! norm, the interval bound for fixed size, the Bertrand-type prime
//! inequalities they rest on, and the length/size/norm/supernorm chain.

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use serde::Serialize;

use crate::bijections::supernorm;
use crate::error::Result;
use crate::partition::{partitions_of_norm, partitions_of_size, Constraints, Partition};
use crate::primes::PrimeTable;

/// log 3 / log 2, the exponent in the norm power bound.
pub fn power_bound_exponent() -> f64 {
    3f64.ln() / 2f64.ln()
}

/// a(d) = log p_d / log d for d >= 2.
pub fn exponent_a(d: u64, table: &PrimeTable) -> Result<f64> {
    if d < 2 {
        return Err(crate::error::Error::BelowDomain { got: d, min: 2 });
    }
    Ok((table.nth_prime(d)? as f64).ln() / (d as f64).ln())
}

/// Natural log of a big integer, stable for values far beyond f64 range.
pub fn ln_biguint(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 900 {
        x.to_f64().expect("finite").ln()
    } else {
        let shifted = x >> (bits - 64);
        shifted.to_f64().expect("finite").ln() + (bits - 64) as f64 * 2f64.ln()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct NormPowerViolation {
    pub partition: String,
    pub norm: String,
    pub supernorm: String,
    /// log supernorm / log norm; absent when the norm is 1.
    pub exponent_ratio: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct OnesFindings {
    pub ones_multiplicity_max: u64,
    pub checked_count: u64,
    pub violation_count: u64,
    /// At most the first few witnesses; the full set is far too large to
    /// store (adjoining a single 1 already breaks the bound for most cores).
    pub violations: Vec<NormPowerViolation>,
}

const ONES_WITNESS_CAP: usize = 10;

#[derive(Debug, Clone, Serialize)]
pub struct NormPowerReport {
    pub theorem: String,
    pub range: String,
    pub checked_count: u64,
    pub violations: Vec<NormPowerViolation>,
    pub extremal_witnesses: Vec<NormPowerViolation>,
    /// Largest observed log supernorm / log norm over the no-1s sweep.
    pub max_exponent_ratio: f64,
    /// Separate sweep over partitions with parts equal to 1: each 1 multiplies
    /// the supernorm by 2 and leaves the norm alone, so the bound can fail
    /// there. Reported, never asserted.
    pub ones_findings: OnesFindings,
}

/// Check supernorm <= norm^(log 3 / log 2) over every partition with no 1s
/// and norm at most `norm_limit`; then re-check with 1..=`ones_mult_max`
/// parts equal to 1 adjoined, reporting (not asserting) what fails.
pub fn verify_norm_power_bound(
    norm_limit: u64,
    ones_mult_max: u64,
    table: &PrimeTable,
) -> Result<NormPowerReport> {
    let c = power_bound_exponent();
    let mut checked = 0u64;
    let mut violations = Vec::new();
    let mut max_ratio = f64::MIN;
    let mut max_witness: Option<NormPowerViolation> = None;

    let mut ones_checked = 0u64;
    let mut ones_violation_count = 0u64;
    let mut ones_violations = Vec::new();

    for norm in 2..=norm_limit {
        for p in partitions_of_norm(norm, &Constraints::no_ones()) {
            let n_hat = supernorm(&p, table)?;
            let ln_norm = (norm as f64).ln();
            let ln_hat = ln_biguint(&n_hat);
            let ratio = ln_hat / ln_norm;
            checked += 1;
            if ratio > max_ratio {
                max_ratio = ratio;
                max_witness = Some(NormPowerViolation {
                    partition: p.to_string(),
                    norm: norm.to_string(),
                    supernorm: n_hat.to_string(),
                    exponent_ratio: Some(ratio),
                });
            }
            if ln_hat > c * ln_norm + 1e-9 {
                violations.push(NormPowerViolation {
                    partition: p.to_string(),
                    norm: norm.to_string(),
                    supernorm: n_hat.to_string(),
                    exponent_ratio: Some(ratio),
                });
            }

            for m1 in 1..=ones_mult_max {
                ones_checked += 1;
                let with_ones =
                    p.multiply(&Partition::from_multiplicities([(1, m1)]).expect("positive part"));
                let hat = &n_hat * BigUint::from(2u32).pow(m1 as u32);
                if ln_biguint(&hat) > c * ln_norm + 1e-9 {
                    ones_violation_count += 1;
                    if ones_violations.len() < ONES_WITNESS_CAP {
                        ones_violations.push(NormPowerViolation {
                            partition: with_ones.to_string(),
                            norm: norm.to_string(),
                            supernorm: hat.to_string(),
                            exponent_ratio: Some(ln_biguint(&hat) / ln_norm),
                        });
                    }
                }
            }
        }
    }

    // Pure-1s partitions: norm 1, supernorm 2^m, bound 1^c = 1.
    for m1 in 1..=ones_mult_max {
        ones_checked += 1;
        ones_violation_count += 1;
        let p = Partition::from_multiplicities([(1, m1)]).expect("positive part");
        let hat = BigUint::from(2u32).pow(m1 as u32);
        if ones_violations.len() < ONES_WITNESS_CAP || m1 == ones_mult_max {
            ones_violations.push(NormPowerViolation {
                partition: p.to_string(),
                norm: "1".to_string(),
                supernorm: hat.to_string(),
                exponent_ratio: None,
            });
        }
    }

    Ok(NormPowerReport {
        theorem: "4".to_string(),
        range: format!("2 <= norm <= {norm_limit}, no parts equal to 1"),
        checked_count: checked,
        violations,
        extremal_witnesses: max_witness.into_iter().collect(),
        max_exponent_ratio: max_ratio,
        ones_findings: OnesFindings {
            ones_multiplicity_max: ones_mult_max,
            checked_count: ones_checked,
            violation_count: ones_violation_count,
            violations: ones_violations,
        },
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ExponentSweep {
    pub range: String,
    pub bound: f64,
    pub max_ratio: f64,
    pub argmax: u64,
    pub violations: Vec<u64>,
}

/// a(d) <= log 3 / log 2 for 2 <= d <= d_max; equality holds at d = 2.
pub fn exponent_sweep(d_max: u64, table: &PrimeTable) -> Result<ExponentSweep> {
    let bound = power_bound_exponent();
    let mut max_ratio = f64::MIN;
    let mut argmax = 0;
    let mut violations = Vec::new();
    for d in 2..=d_max {
        let a = exponent_a(d, table)?;
        if a > max_ratio {
            max_ratio = a;
            argmax = d;
        }
        if a > bound + 1e-12 {
            violations.push(d);
        }
    }
    Ok(ExponentSweep {
        range: format!("2 <= d <= {d_max}"),
        bound,
        max_ratio,
        argmax,
        violations,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct SizeIntervalViolation {
    pub n: u64,
    pub partition: String,
    pub supernorm: String,
    pub side: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct SizeExtremal {
    pub n: u64,
    pub min_partition: String,
    pub min_supernorm: String,
    pub max_partition: String,
    pub max_supernorm: String,
    pub min_is_single_part: bool,
    pub max_is_all_ones: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct SizeIntervalReport {
    pub theorem: String,
    pub range: String,
    pub checked_count: u64,
    pub violations: Vec<SizeIntervalViolation>,
    pub extremal_witnesses: Vec<SizeExtremal>,
}

/// Check p_n <= supernorm <= 2^n over every partition of every size
/// n <= size_limit, recording per-size extremal witnesses.
pub fn verify_size_interval(size_limit: u64, table: &PrimeTable) -> Result<SizeIntervalReport> {
    let mut checked = 0u64;
    let mut violations = Vec::new();
    let mut witnesses = Vec::new();
    for n in 1..=size_limit {
        let lower = BigUint::from(table.nth_prime(n)?);
        let upper = BigUint::from(2u32).pow(n as u32);
        let mut min: Option<(BigUint, Partition)> = None;
        let mut max: Option<(BigUint, Partition)> = None;
        for p in partitions_of_size(n, &Constraints::none()) {
            let hat = supernorm(&p, table)?;
            checked += 1;
            if hat < lower {
                violations.push(SizeIntervalViolation {
                    n,
                    partition: p.to_string(),
                    supernorm: hat.to_string(),
                    side: "below p_n".to_string(),
                });
            }
            if hat > upper {
                violations.push(SizeIntervalViolation {
                    n,
                    partition: p.to_string(),
                    supernorm: hat.to_string(),
                    side: "above 2^n".to_string(),
                });
            }
            if min.as_ref().map_or(true, |(v, _)| hat < *v) {
                min = Some((hat.clone(), p.clone()));
            }
            if max.as_ref().map_or(true, |(v, _)| hat > *v) {
                max = Some((hat, p));
            }
        }
        let (min_v, min_p) = min.expect("size >= 1 has partitions");
        let (max_v, max_p) = max.expect("size >= 1 has partitions");
        let single = Partition::single(n).expect("n >= 1");
        let all_ones = Partition::from_multiplicities([(1, n)]).expect("n >= 1");
        witnesses.push(SizeExtremal {
            n,
            min_is_single_part: min_p == single,
            max_is_all_ones: max_p == all_ones,
            min_partition: min_p.to_string(),
            min_supernorm: min_v.to_string(),
            max_partition: max_p.to_string(),
            max_supernorm: max_v.to_string(),
        });
    }
    Ok(SizeIntervalReport {
        theorem: "5".to_string(),
        range: format!("1 <= size <= {size_limit}"),
        checked_count: checked,
        violations,
        extremal_witnesses: witnesses,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct BertrandReport {
    pub theorem: String,
    pub range: String,
    pub checked_count: u64,
    pub violations: Vec<String>,
    pub extremal_witnesses: Vec<String>,
}

/// The two prime inequalities behind the interval bound:
/// p_r < 2 p_{r-1} for 2 <= r <= r_limit, and p_{2b} <= 3 p_b for
/// 1 <= b <= b_limit.
pub fn verify_bertrand_consequences(
    r_limit: u64,
    b_limit: u64,
    table: &PrimeTable,
) -> Result<BertrandReport> {
    let mut checked = 0u64;
    let mut violations = Vec::new();
    let mut min_doubling_slack = f64::MAX;
    let mut slack_witness = String::new();
    for r in 2..=r_limit {
        checked += 1;
        let a = table.nth_prime(r)?;
        let b = table.nth_prime(r - 1)?;
        if a >= 2 * b {
            violations.push(format!("p_{r} = {a} >= 2 p_{} = {}", r - 1, 2 * b));
        }
        let slack = a as f64 / b as f64;
        if slack < min_doubling_slack {
            min_doubling_slack = slack;
        }
    }
    let mut max_ratio = 0f64;
    let mut max_b = 0u64;
    for b in 1..=b_limit {
        checked += 1;
        let top = table.nth_prime(2 * b)?;
        let bottom = table.nth_prime(b)?;
        if top > 3 * bottom {
            violations.push(format!("p_{} = {top} > 3 p_{b} = {}", 2 * b, 3 * bottom));
        }
        let ratio = top as f64 / bottom as f64;
        if ratio > max_ratio {
            max_ratio = ratio;
            max_b = b;
        }
    }
    slack_witness.push_str(&format!("max p_2b/p_b = {max_ratio:.6} at b = {max_b}"));
    Ok(BertrandReport {
        theorem: "5 (Bertrand consequences)".to_string(),
        range: format!("2 <= r <= {r_limit}; 1 <= b <= {b_limit}"),
        checked_count: checked,
        violations,
        extremal_witnesses: vec![slack_witness],
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ChainCounterexample {
    pub partition: String,
    pub length: u64,
    pub size: u64,
    pub norm: String,
    pub supernorm: String,
    pub failed_link: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct ChainReport {
    pub range: String,
    pub checked_count: u64,
    pub holds_count: u64,
    pub counterexamples: Vec<ChainCounterexample>,
}

/// Test the chain length <= size <= norm <= supernorm literally on every
/// partition of size <= max_size, and report the exact counterexample set.
/// The middle link fails for partitions with enough parts equal to 1
/// (e.g. <1^2> has size 2 but norm 1), so this is a report, not an assert.
pub fn verify_statistic_chain(max_size: u64, table: &PrimeTable) -> Result<ChainReport> {
    let mut checked = 0u64;
    let mut holds = 0u64;
    let mut counterexamples = Vec::new();
    for n in 0..=max_size {
        for p in partitions_of_size(n, &Constraints::none()) {
            checked += 1;
            let length = p.length();
            let size = p.size();
            let norm = p.norm();
            let hat = supernorm(&p, table)?;
            let mut failed = Vec::new();
            if BigUint::from(length) > BigUint::from(size) {
                failed.push("length <= size");
            }
            if BigUint::from(size) > norm {
                failed.push("size <= norm");
            }
            if norm > hat {
                failed.push("norm <= supernorm");
            }
            if failed.is_empty() {
                holds += 1;
            } else {
                counterexamples.push(ChainCounterexample {
                    partition: p.to_string(),
                    length,
                    size,
                    norm: norm.to_string(),
                    supernorm: hat.to_string(),
                    failed_link: failed.join(", "),
                });
            }
        }
    }
    Ok(ChainReport {
        range: format!("size <= {max_size}"),
        checked_count: checked,
        holds_count: holds,
        counterexamples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponent_a_values() {
        let t = PrimeTable::new(10_000);
        let a2 = exponent_a(2, &t).unwrap();
        assert!((a2 - 1.58496).abs() < 1e-4);
        assert_eq!(a2, power_bound_exponent());
        assert!(exponent_a(1, &t).is_err());
    }

    #[test]
    fn exponent_sweep_small() {
        let t = PrimeTable::new(10_000);
        let sweep = exponent_sweep(200, &t).unwrap();
        assert!(sweep.violations.is_empty());
        assert_eq!(sweep.argmax, 2);
    }

    #[test]
    fn power_bound_examples() {
        let t = PrimeTable::new(10_000);
        // <2^m>: supernorm 3^m equals norm^(log3/log2) exactly.
        for m in 1..=20u64 {
            let p = Partition::from_multiplicities([(2, m)]).unwrap();
            let hat = supernorm(&p, &t).unwrap();
            assert_eq!(hat, BigUint::from(3u32).pow(m as u32));
            let ratio = ln_biguint(&hat) / ln_biguint(&p.norm());
            assert!((ratio - power_bound_exponent()).abs() < 1e-9);
        }
        // (5): supernorm 11 <= 5^1.585 ~ 12.8.
        let hat = supernorm(&Partition::single(5).unwrap(), &t).unwrap();
        assert_eq!(hat, BigUint::from(11u32));
        assert!(11f64.ln() <= power_bound_exponent() * 5f64.ln());
    }

    #[test]
    fn power_bound_sweep_small() {
        let t = PrimeTable::new(10_000);
        let report = verify_norm_power_bound(200, 8, &t).unwrap();
        assert!(report.violations.is_empty());
        assert!((report.max_exponent_ratio - power_bound_exponent()).abs() < 1e-9);
        // Pure-1s partitions always violate; they must be findings.
        assert!(!report.ones_findings.violations.is_empty());
        assert!(report
            .ones_findings
            .violations
            .iter()
            .any(|v| v.partition == "<1^8>"));
    }

    #[test]
    fn size_interval_small() {
        let t = PrimeTable::new(10_000);
        let report = verify_size_interval(10, &t).unwrap();
        assert!(report.violations.is_empty());
        for w in &report.extremal_witnesses {
            assert!(w.min_is_single_part, "n={}", w.n);
            assert!(w.max_is_all_ones, "n={}", w.n);
        }
        let w3 = &report.extremal_witnesses[2];
        assert_eq!(w3.min_supernorm, "5");
        assert_eq!(w3.max_supernorm, "8");
        let w1 = &report.extremal_witnesses[0];
        assert_eq!(w1.min_supernorm, "2");
        assert_eq!(w1.max_supernorm, "2");
    }

    #[test]
    fn bertrand_small() {
        let t = PrimeTable::new(100_000);
        let report = verify_bertrand_consequences(1000, 500, &t).unwrap();
        assert!(report.violations.is_empty());
    }

    #[test]
    fn chain_counterexamples_all_contain_ones() {
        let t = PrimeTable::new(1000);
        let report = verify_statistic_chain(8, &t).unwrap();
        assert!(!report.counterexamples.is_empty());
        for ce in &report.counterexamples {
            // Every counterexample must contain a part equal to 1.
            assert!(ce.partition.starts_with("<1"), "{}", ce.partition);
            assert_eq!(ce.failed_link, "size <= norm");
        }
        // <1^2> is the minimal counterexample.
        assert_eq!(report.counterexamples[0].partition, "<1^2>");
        // No-1s partitions always satisfy the chain.
        for n in 1..=8u64 {
            for p in partitions_of_size(n, &Constraints::no_ones()) {
                assert!(BigUint::from(p.size()) <= p.norm(), "p={p}");
            }
        }
    }

    #[test]
    fn ln_biguint_handles_huge_values() {
        let x = BigUint::from(2u32).pow(5000);
        let expected = 5000f64 * 2f64.ln();
        assert!((ln_biguint(&x) - expected).abs() < 1e-6 * expected);
        assert!((ln_biguint(&BigUint::from(12u32)) - 12f64.ln()).abs() < 1e-12);
    }
}
