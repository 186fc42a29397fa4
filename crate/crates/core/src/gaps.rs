//! Divisor-count model of prime gaps: the gap above the n-th prime is
//! modeled by twice the number of one- or two-part partitions of norm n with
//! no 1s, i.e. 2 * ceil(d(n)/2). The functions here generate the model rows,
//! audit the model's predictions against the sieve, and enumerate the
//! longer-partition correction candidates.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::partition::{partitions_of_norm, Constraints, Partition};
use crate::primes::PrimeTable;

/// Euler-Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// One row of the model: actual gap above p_n next to the prediction from
/// d(n).
#[derive(Debug, Clone, Serialize)]
pub struct GapModelRow {
    pub n: u64,
    pub prime: u64,
    pub actual_gap: u64,
    pub divisor_count: u64,
    pub predicted_gap: u64,
    pub matches: bool,
}

/// The one- and two-part partitions of norm n with no 1s: (n) plus (d, n/d)
/// for each unordered divisor pair with both entries >= 2. Cardinality is
/// ceil(d(n)/2).
pub fn gap_partitions(n: u64) -> Result<Vec<Partition>> {
    if n < 2 {
        return Err(Error::BelowDomain { got: n, min: 2 });
    }
    let mut out = vec![Partition::single(n).expect("n >= 2")];
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            out.push(Partition::from_parts([n / d, d]).expect("positive parts"));
        }
        d += 1;
    }
    Ok(out)
}

/// Modeled gap above p_n: 1 for n = 1 (the single odd gap), else
/// 2 * ceil(d(n)/2) = twice the count from `gap_partitions`.
pub fn predicted_gap(n: u64, table: &PrimeTable) -> Result<u64> {
    if n == 0 {
        return Err(Error::BelowDomain { got: 0, min: 1 });
    }
    if n == 1 {
        return Ok(1);
    }
    let d = table.divisor_count(n)?;
    Ok(d + d % 2)
}

/// Model rows for n = 1..=n_max. Needs the sieve to cover p_{n_max + 1}.
pub fn model_table(n_max: u64, table: &PrimeTable) -> Result<Vec<GapModelRow>> {
    let mut rows = Vec::with_capacity(n_max as usize);
    for n in 1..=n_max {
        let prime = table.nth_prime(n)?;
        let actual_gap = table.nth_prime(n + 1)? - prime;
        let divisor_count = table.divisor_count(n)?;
        let predicted = predicted_gap(n, table)?;
        rows.push(GapModelRow {
            n,
            prime,
            actual_gap,
            divisor_count,
            predicted_gap: predicted,
            matches: actual_gap == predicted,
        });
    }
    Ok(rows)
}

/// CSV form, column order n,p_n,actual_gap,predicted_gap,match.
pub fn rows_to_csv(rows: &[GapModelRow]) -> String {
    let mut out = String::from("n,p_n,actual_gap,predicted_gap,match\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            r.n, r.prime, r.actual_gap, r.predicted_gap, r.matches
        ));
    }
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct AverageGapReport {
    pub n_max: u64,
    /// Mean of the predicted gap over n = 2..=n_max.
    pub model_mean: f64,
    /// ln(n_max), the prime-number-theorem average gap.
    pub log_reference: f64,
    /// ln(n_max) + 2 gamma - 1, the Dirichlet mean of d(n).
    pub dirichlet_reference: f64,
    /// Mean of d(n) over n = 1..=n_max.
    pub divisor_mean: f64,
    /// Mean excess of the prediction over d(n): the ceiling rounds d(n) up
    /// exactly at the squares.
    pub ceiling_inflation: f64,
}

/// Mean predicted gap next to its two analytic references.
pub fn average_gap_check(n_max: u64, table: &PrimeTable) -> Result<AverageGapReport> {
    if n_max < 2 {
        return Err(Error::BelowDomain { got: n_max, min: 2 });
    }
    let mut predicted_total = 0u64;
    let mut divisor_total = 0u64;
    let mut squares = 0u64;
    for n in 1..=n_max {
        let d = table.divisor_count(n)?;
        divisor_total += d;
        if n >= 2 {
            predicted_total += d + d % 2;
            if d % 2 == 1 {
                squares += 1;
            }
        }
    }
    let count = (n_max - 1) as f64;
    let log_n = (n_max as f64).ln();
    Ok(AverageGapReport {
        n_max,
        model_mean: predicted_total as f64 / count,
        log_reference: log_n,
        dirichlet_reference: log_n + 2.0 * EULER_GAMMA - 1.0,
        divisor_mean: divisor_total as f64 / n_max as f64,
        ceiling_inflation: squares as f64 / count,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct PntReport {
    pub n: u64,
    pub p_n: u64,
    pub n_log_n: f64,
    /// p_n / (n ln n).
    pub true_ratio: f64,
    /// 2 + sum of predicted gaps below n: the model's version of p_n.
    pub model_cumulative: u64,
    /// model_cumulative / (n ln n).
    pub model_ratio: f64,
}

/// Compare p_n against the model's cumulative gap sum and against n ln n.
pub fn pnt_consistency(n: u64, table: &PrimeTable) -> Result<PntReport> {
    if n < 2 {
        return Err(Error::BelowDomain { got: n, min: 2 });
    }
    let p_n = table.nth_prime(n)?;
    let mut cumulative = 2u64;
    for i in 1..n {
        cumulative += predicted_gap(i, table)?;
    }
    let n_log_n = n as f64 * (n as f64).ln();
    Ok(PntReport {
        n,
        p_n,
        n_log_n,
        true_ratio: p_n as f64 / n_log_n,
        model_cumulative: cumulative,
        model_ratio: cumulative as f64 / n_log_n,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct TwinAudit {
    pub x_max: u64,
    /// Number of gaps (p_n, p_{n+1}) with p_{n+1} <= x_max.
    pub positions_considered: u64,
    /// n with actual gap exactly 2.
    pub twin_positions: Vec<u64>,
    /// n where the model predicts gap 2, i.e. prime n >= 2.
    pub predicted_positions: Vec<u64>,
    /// Twin positions the model gets right.
    pub correct_positions: Vec<u64>,
    pub true_positives: u64,
    pub false_positives: u64,
    pub false_negatives: u64,
    pub true_negatives: u64,
}

/// Confusion matrix between actual gap-2 positions and the model's
/// prediction (gap 2 exactly at prime index), over gaps lying below x_max.
pub fn twin_prediction_audit(x_max: u64, table: &PrimeTable) -> Result<TwinAudit> {
    if x_max > table.limit() {
        return Err(Error::SieveExhausted {
            limit: table.limit(),
            needed: x_max,
        });
    }
    let mut twin_positions = Vec::new();
    let mut predicted_positions = Vec::new();
    let mut correct = Vec::new();
    let mut considered = 0u64;
    let primes = table.primes();
    for i in 0..primes.len().saturating_sub(1) {
        if primes[i + 1] > x_max {
            break;
        }
        let n = i as u64 + 1;
        considered += 1;
        let actual_twin = primes[i + 1] - primes[i] == 2;
        let predicted_twin = n >= 2 && table.is_prime(n)?;
        if actual_twin {
            twin_positions.push(n);
        }
        if predicted_twin {
            predicted_positions.push(n);
        }
        if actual_twin && predicted_twin {
            correct.push(n);
        }
    }
    let tp = correct.len() as u64;
    let fp = predicted_positions.len() as u64 - tp;
    let fnn = twin_positions.len() as u64 - tp;
    Ok(TwinAudit {
        x_max,
        positions_considered: considered,
        true_positives: tp,
        false_positives: fp,
        false_negatives: fnn,
        true_negatives: considered - tp - fp - fnn,
        twin_positions,
        predicted_positions,
        correct_positions: correct,
    })
}

/// Average ranks (ties share the mean rank).
fn ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).expect("finite"));
    let mut out = vec![0f64; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &k in &order[i..=j] {
            out[k] = avg;
        }
        i = j + 1;
    }
    out
}

/// Spearman rank correlation.
pub fn spearman(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    let ra = ranks(a);
    let rb = ranks(b);
    let n = a.len() as f64;
    let ma = ra.iter().sum::<f64>() / n;
    let mb = rb.iter().sum::<f64>() / n;
    let mut cov = 0f64;
    let mut va = 0f64;
    let mut vb = 0f64;
    for i in 0..a.len() {
        let da = ra[i] - ma;
        let db = rb[i] - mb;
        cov += da * db;
        va += da * da;
        vb += db * db;
    }
    cov / (va.sqrt() * vb.sqrt())
}

#[derive(Debug, Clone, Serialize)]
pub struct StratumMean {
    pub label: String,
    pub count: u64,
    pub mean_gap: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct FluctuationReport {
    pub n_max: u64,
    /// Spearman rank correlation between d(n) and the actual gap, n in
    /// [2, n_max].
    pub spearman: f64,
    pub strata: Vec<StratumMean>,
}

/// Descriptive check of "more divisors at the index, larger gap": rank
/// correlation plus stratified gap means for d(n) = 2, 3..4, and >= 5.
pub fn divisor_fluctuation_report(n_max: u64, table: &PrimeTable) -> Result<FluctuationReport> {
    if n_max < 3 {
        return Err(Error::BelowDomain { got: n_max, min: 3 });
    }
    let mut divisor_counts = Vec::with_capacity((n_max - 1) as usize);
    let mut gaps = Vec::with_capacity((n_max - 1) as usize);
    for n in 2..=n_max {
        divisor_counts.push(table.divisor_count(n)? as f64);
        gaps.push((table.nth_prime(n + 1)? - table.nth_prime(n)?) as f64);
    }
    let rho = spearman(&divisor_counts, &gaps);
    let mut strata = Vec::new();
    for (label, lo, hi) in [("d=2", 2, 2), ("d=3..4", 3, 4), ("d>=5", 5, u64::MAX)] {
        let mut total = 0f64;
        let mut count = 0u64;
        for i in 0..divisor_counts.len() {
            let d = divisor_counts[i] as u64;
            if d >= lo && d <= hi {
                total += gaps[i];
                count += 1;
            }
        }
        strata.push(StratumMean {
            label: label.to_string(),
            count,
            mean_gap: if count > 0 { total / count as f64 } else { 0.0 },
        });
    }
    Ok(FluctuationReport {
        n_max,
        spearman: rho,
        strata,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct CorrectionCandidate {
    pub partition: String,
    pub norm: u64,
    /// N(lambda) * prod over parts of ln(part).
    pub weight: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CorrectionReport {
    pub n: u64,
    pub length_min: u64,
    /// Norm search cap. The two-sided weight window gives no intrinsic bound
    /// on the norm, so the search must be cut off somewhere; the default cap
    /// is n itself.
    pub norm_cap: u64,
    pub window_lo: f64,
    pub window_hi: f64,
    pub candidates: Vec<CorrectionCandidate>,
}

/// Weight of a no-1s partition: product over parts of part * ln(part).
pub fn correction_weight(p: &Partition) -> f64 {
    p.multiplicities()
        .iter()
        .map(|&(part, m)| {
            let x = part as f64;
            (x * x.ln()).powi(m as i32)
        })
        .product()
}

/// Longer partitions (no 1s, length >= length_min) whose weight lands in
/// [n ln n, (n+1) ln(n+1)), searched over norms up to norm_cap. Empty output
/// is a result, not an error.
pub fn correction_candidates(n: u64, length_min: u64, norm_cap: u64) -> Result<CorrectionReport> {
    if n < 2 {
        return Err(Error::BelowDomain { got: n, min: 2 });
    }
    let lo = n as f64 * (n as f64).ln();
    let hi = (n + 1) as f64 * ((n + 1) as f64).ln();
    let mut candidates = Vec::new();
    for norm in 2..=norm_cap {
        for p in partitions_of_norm(norm, &Constraints::no_ones()) {
            if p.length() < length_min {
                continue;
            }
            let w = correction_weight(&p);
            if w >= lo && w < hi {
                candidates.push(CorrectionCandidate {
                    partition: p.to_string(),
                    norm,
                    weight: w,
                });
            }
        }
    }
    Ok(CorrectionReport {
        n,
        length_min,
        norm_cap,
        window_lo: lo,
        window_hi: hi,
        candidates,
    })
}
