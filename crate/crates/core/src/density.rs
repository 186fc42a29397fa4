//! Arithmetic-density series: partial sums of mu*(n)/n filtered by the index
//! of the smallest prime factor, the counting identity behind them, the
//! inclusion-exclusion sieve bound, and the Abelian-limit evaluators on both
//! the power-series and Dirichlet-series sides.
//!
//! Hard contract: all series here converge only conditionally, so partial
//! sums are accumulated strictly in increasing n. Grouping terms (say by
//! smallest prime factor) is an invalid rearrangement; `euler_product_tail`
//! exists to demonstrate where that rearrangement collapses to zero.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::primes::PrimeTable;

/// Compensated (Kahan) summation; long conditional series lose digits with
/// a bare accumulator.
#[derive(Debug, Clone, Copy, Default)]
pub struct Kahan {
    sum: f64,
    carry: f64,
}

impl Kahan {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let y = x - self.carry;
        let t = self.sum + y;
        self.carry = (t - self.sum) - y;
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum
    }
}

/// An arithmetic progression `residue mod modulus`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Ap {
    pub residue: u64,
    pub modulus: u64,
}

/// A subset of the positive integers with a total membership test and, where
/// computable, an exact density.
#[derive(Clone)]
pub enum IndexSet {
    Finite(BTreeSet<u64>),
    ApUnion(Vec<Ap>),
    Complement(Box<IndexSet>),
    /// Arbitrary pure predicate; no text form and no exact density.
    Predicate {
        description: String,
        test: Arc<dyn Fn(u64) -> bool + Send + Sync>,
    },
}

impl fmt::Debug for IndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IndexSet({self})")
    }
}

impl IndexSet {
    pub fn contains(&self, n: u64) -> bool {
        match self {
            IndexSet::Finite(set) => set.contains(&n),
            IndexSet::ApUnion(aps) => aps.iter().any(|ap| n % ap.modulus == ap.residue),
            IndexSet::Complement(inner) => !inner.contains(n),
            IndexSet::Predicate { test, .. } => test(n),
        }
    }

    /// Exact density as a fraction (covered residues, common modulus), when
    /// the set is built from finite data and progressions.
    pub fn exact_density(&self) -> Option<(u64, u64)> {
        match self {
            IndexSet::Finite(_) => Some((0, 1)),
            IndexSet::ApUnion(aps) => {
                let mut l = 1u64;
                for ap in aps {
                    l = lcm(l, ap.modulus)?;
                    if l > 10_000_000 {
                        return None;
                    }
                }
                let covered = (0..l)
                    .filter(|r| aps.iter().any(|ap| r % ap.modulus == ap.residue))
                    .count() as u64;
                Some((covered, l))
            }
            IndexSet::Complement(inner) => {
                let (num, den) = inner.exact_density()?;
                Some((den - num, den))
            }
            IndexSet::Predicate { .. } => None,
        }
    }

    pub fn density(&self) -> Option<f64> {
        self.exact_density().map(|(n, d)| n as f64 / d as f64)
    }

    pub fn predicate<F>(description: &str, test: F) -> Self
    where
        F: Fn(u64) -> bool + Send + Sync + 'static,
    {
        IndexSet::Predicate {
            description: description.to_string(),
            test: Arc::new(test),
        }
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: u64, b: u64) -> Option<u64> {
    (a / gcd(a, b)).checked_mul(b)
}

/// Text grammar: `finite:{1,4,9}`, `ap:r mod m [+ ap:...]`,
/// `complement(...)`.
impl FromStr for IndexSet {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some(inner) = s.strip_prefix("complement(") {
            let inner = inner
                .strip_suffix(')')
                .ok_or_else(|| Error::Parse(format!("unbalanced complement in {s:?}")))?;
            return Ok(IndexSet::Complement(Box::new(inner.parse()?)));
        }
        if let Some(body) = s.strip_prefix("finite:") {
            let body = body.trim();
            let inner = body
                .strip_prefix('{')
                .and_then(|b| b.strip_suffix('}'))
                .ok_or_else(|| Error::Parse(format!("finite set needs braces: {s:?}")))?;
            let mut set = BTreeSet::new();
            for tok in inner.split(',') {
                let tok = tok.trim();
                if tok.is_empty() {
                    continue;
                }
                set.insert(
                    tok.parse::<u64>()
                        .map_err(|_| Error::Parse(format!("bad integer {tok:?} in {s:?}")))?,
                );
            }
            return Ok(IndexSet::Finite(set));
        }
        // Union of progressions.
        let mut aps = Vec::new();
        for atom in s.split('+') {
            let atom = atom.trim();
            let body = atom
                .strip_prefix("ap:")
                .ok_or_else(|| Error::Parse(format!("expected ap:r mod m, got {atom:?}")))?;
            let (r, m) = body
                .split_once("mod")
                .ok_or_else(|| Error::Parse(format!("expected ap:r mod m, got {atom:?}")))?;
            let residue: u64 = r
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad residue in {atom:?}")))?;
            let modulus: u64 = m
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad modulus in {atom:?}")))?;
            if modulus == 0 {
                return Err(Error::Parse(format!("zero modulus in {atom:?}")));
            }
            aps.push(Ap {
                residue: residue % modulus,
                modulus,
            });
        }
        Ok(IndexSet::ApUnion(aps))
    }
}

impl fmt::Display for IndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IndexSet::Finite(set) => {
                write!(f, "finite:{{")?;
                for (i, n) in set.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{n}")?;
                }
                write!(f, "}}")
            }
            IndexSet::ApUnion(aps) => {
                for (i, ap) in aps.iter().enumerate() {
                    if i > 0 {
                        write!(f, " + ")?;
                    }
                    write!(f, "ap:{} mod {}", ap.residue, ap.modulus)?;
                }
                Ok(())
            }
            IndexSet::Complement(inner) => write!(f, "complement({inner})"),
            IndexSet::Predicate { description, .. } => write!(f, "predicate:{description}"),
        }
    }
}

/// A subset of the primes.
#[derive(Debug, Clone)]
pub enum PrimeSet {
    Finite(BTreeSet<u64>),
    /// Primes congruent to `residue` mod `modulus`.
    Residue(Ap),
    All,
    /// The primes whose index lies in the given set.
    FromIndices(IndexSet),
}

impl PrimeSet {
    pub fn contains(&self, p: u64, table: &PrimeTable) -> Result<bool> {
        Ok(match self {
            PrimeSet::Finite(set) => set.contains(&p),
            PrimeSet::Residue(ap) => p % ap.modulus == ap.residue,
            PrimeSet::All => true,
            PrimeSet::FromIndices(set) => set.contains(table.index_of(p)?),
        })
    }

    /// Natural density within the primes, when known.
    pub fn density(&self) -> Option<f64> {
        match self {
            PrimeSet::Finite(_) => Some(0.0),
            PrimeSet::Residue(ap) => {
                if gcd(ap.residue, ap.modulus) == 1 {
                    Some(1.0 / euler_phi(ap.modulus) as f64)
                } else {
                    Some(0.0)
                }
            }
            PrimeSet::All => Some(1.0),
            PrimeSet::FromIndices(set) => set.density(),
        }
    }

    pub fn describe(&self) -> String {
        match self {
            PrimeSet::Finite(set) => format!("primes in {set:?}"),
            PrimeSet::Residue(ap) => format!("primes = {} mod {}", ap.residue, ap.modulus),
            PrimeSet::All => "all primes".to_string(),
            PrimeSet::FromIndices(set) => format!("primes with index in {set}"),
        }
    }
}

fn euler_phi(mut m: u64) -> u64 {
    let mut phi = m;
    let mut p = 2u64;
    while p.saturating_mul(p) <= m {
        if m % p == 0 {
            phi -= phi / p;
            while m % p == 0 {
                m /= p;
            }
        }
        p += 1;
    }
    if m > 1 {
        phi -= phi / m;
    }
    phi
}

/// An arithmetic function given as data. `eval(0)` is 0 by convention.
#[derive(Debug, Clone)]
pub enum ArithmeticFn {
    One,
    Mobius,
    Identity,
    Indicator(IndexSet),
    Table(Vec<(u64, f64)>),
}

impl ArithmeticFn {
    pub fn eval(&self, n: u64, table: &PrimeTable) -> Result<f64> {
        if n == 0 {
            return Ok(0.0);
        }
        Ok(match self {
            ArithmeticFn::One => 1.0,
            ArithmeticFn::Mobius => table.mobius(n)? as f64,
            ArithmeticFn::Identity => n as f64,
            ArithmeticFn::Indicator(set) => {
                if set.contains(n) {
                    1.0
                } else {
                    0.0
                }
            }
            ArithmeticFn::Table(entries) => entries
                .iter()
                .find(|&&(k, _)| k == n)
                .map(|&(_, v)| v)
                .unwrap_or(0.0),
        })
    }

    /// (c0, c1) with |f(n)| <= c0 + c1 n, used for truncation tail bounds.
    pub fn growth(&self) -> (f64, f64) {
        match self {
            ArithmeticFn::One | ArithmeticFn::Mobius | ArithmeticFn::Indicator(_) => (1.0, 0.0),
            ArithmeticFn::Identity => (0.0, 1.0),
            ArithmeticFn::Table(entries) => (
                entries.iter().map(|&(_, v)| v.abs()).fold(0.0, f64::max),
                0.0,
            ),
        }
    }

    /// Limit of the average value (1/N) sum_{k<=N} f(k), when known.
    pub fn mean(&self) -> Option<f64> {
        match self {
            ArithmeticFn::One => Some(1.0),
            ArithmeticFn::Mobius => Some(0.0),
            ArithmeticFn::Identity => None,
            ArithmeticFn::Indicator(set) => set.density(),
            ArithmeticFn::Table(_) => Some(0.0),
        }
    }
}

/// Text grammar: `one`, `mu`, `id`, `indicator(<set spec>)`,
/// `table{2=3,5=-7}`.
impl FromStr for ArithmeticFn {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s {
            "one" | "1" => return Ok(ArithmeticFn::One),
            "mu" => return Ok(ArithmeticFn::Mobius),
            "id" => return Ok(ArithmeticFn::Identity),
            _ => {}
        }
        if let Some(body) = s.strip_prefix("indicator(") {
            let body = body
                .strip_suffix(')')
                .ok_or_else(|| Error::Parse(format!("unbalanced indicator in {s:?}")))?;
            return Ok(ArithmeticFn::Indicator(body.parse()?));
        }
        if let Some(body) = s.strip_prefix("table{") {
            let body = body
                .strip_suffix('}')
                .ok_or_else(|| Error::Parse(format!("unbalanced table in {s:?}")))?;
            let mut entries = Vec::new();
            for tok in body.split(',') {
                let tok = tok.trim();
                if tok.is_empty() {
                    continue;
                }
                let (k, v) = tok
                    .split_once('=')
                    .ok_or_else(|| Error::Parse(format!("table entries are n=value: {tok:?}")))?;
                entries.push((
                    k.trim()
                        .parse::<u64>()
                        .map_err(|_| Error::Parse(format!("bad table key {k:?}")))?,
                    v.trim()
                        .parse::<f64>()
                        .map_err(|_| Error::Parse(format!("bad table value {v:?}")))?,
                ));
            }
            return Ok(ArithmeticFn::Table(entries));
        }
        Err(Error::Parse(format!(
            "expected one|mu|id|indicator(...)|table{{...}}, got {s:?}"
        )))
    }
}

impl fmt::Display for ArithmeticFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ArithmeticFn::One => write!(f, "one"),
            ArithmeticFn::Mobius => write!(f, "mu"),
            ArithmeticFn::Identity => write!(f, "id"),
            ArithmeticFn::Indicator(set) => write!(f, "indicator({set})"),
            ArithmeticFn::Table(entries) => {
                write!(f, "table{{")?;
                for (i, (k, v)) in entries.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{k}={v}")?;
                }
                write!(f, "}}")
            }
        }
    }
}

/// Partial-sum trajectory of a density series with truncation metadata.
#[derive(Debug, Clone, Serialize)]
pub struct DensityReport {
    pub description: String,
    pub truncations: Vec<u64>,
    pub partial_sums: Vec<f64>,
    pub target: Option<f64>,
    /// |partial sum - target| per truncation, when the target is known.
    pub errors: Vec<Option<f64>>,
    /// Width (max - min) of the running sum inside each truncation window.
    pub oscillation: Vec<f64>,
}

impl DensityReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("N,partial_sum,target,error\n");
        for (i, &n) in self.truncations.iter().enumerate() {
            let target = self.target.map(|t| t.to_string()).unwrap_or_default();
            let error = self.errors[i].map(|e| e.to_string()).unwrap_or_default();
            out.push_str(&format!("{n},{},{target},{error}\n", self.partial_sums[i]));
        }
        out
    }
}

fn validate_truncations(truncations: &[u64]) -> Result<u64> {
    if truncations.is_empty() {
        return Err(Error::InvalidArgument("no truncation points".into()));
    }
    if truncations.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument(
            "truncations must be strictly ascending".into(),
        ));
    }
    Ok(*truncations.last().expect("nonempty"))
}

/// Accumulate term(n) for n = 2..=max(truncations), strictly in increasing n
/// (conditional convergence: reordering changes the value). Terms that are
/// exactly zero are skipped, which keeps indicator-weighted runs
/// bit-identical to their filtered counterparts.
fn accumulate<F>(truncations: &[u64], mut term: F) -> Result<(Vec<f64>, Vec<f64>)>
where
    F: FnMut(u64) -> Result<f64>,
{
    let max_n = validate_truncations(truncations)?;
    let mut kahan = Kahan::new();
    let mut sums = Vec::with_capacity(truncations.len());
    let mut oscillation = Vec::with_capacity(truncations.len());
    let mut window_min = 0f64;
    let mut window_max = 0f64;
    let mut next = 0usize;
    let flush = |kahan: &Kahan,
                 sums: &mut Vec<f64>,
                 oscillation: &mut Vec<f64>,
                 window_min: &mut f64,
                 window_max: &mut f64| {
        sums.push(kahan.value());
        oscillation.push(*window_max - *window_min);
        *window_min = kahan.value();
        *window_max = kahan.value();
    };
    for n in 2..=max_n {
        // Truncation points below the current n close on the sum so far.
        while next < truncations.len() && truncations[next] < n {
            flush(
                &kahan,
                &mut sums,
                &mut oscillation,
                &mut window_min,
                &mut window_max,
            );
            next += 1;
        }
        let t = term(n)?;
        if t != 0.0 {
            kahan.add(t);
            let v = kahan.value();
            window_min = window_min.min(v);
            window_max = window_max.max(v);
        }
        while next < truncations.len() && truncations[next] == n {
            flush(
                &kahan,
                &mut sums,
                &mut oscillation,
                &mut window_min,
                &mut window_max,
            );
            next += 1;
        }
    }
    Ok((sums, oscillation))
}

fn report_from(
    description: String,
    truncations: &[u64],
    target: Option<f64>,
    sums: Vec<f64>,
    oscillation: Vec<f64>,
) -> DensityReport {
    let errors = sums
        .iter()
        .map(|&s| target.map(|t| (s - t).abs()))
        .collect();
    DensityReport {
        description,
        truncations: truncations.to_vec(),
        partial_sums: sums,
        target,
        errors,
        oscillation,
    }
}

/// Partial sums of sum_{n>=2} mu*(n)/n over n whose smallest prime factor
/// has index in `set`. The limit is the arithmetic density of `set`.
pub fn theorem1_partial_sums(
    set: &IndexSet,
    truncations: &[u64],
    table: &PrimeTable,
) -> Result<DensityReport> {
    let (sums, osc) = accumulate(truncations, |n| {
        let (mu, spf) = table.mobius_spf(n)?;
        if mu == 0 {
            return Ok(0.0);
        }
        let idx = table.index_of(spf)?;
        if set.contains(idx) {
            Ok(-mu as f64 / n as f64)
        } else {
            Ok(0.0)
        }
    })?;
    Ok(report_from(
        format!("index-filtered mu*(n)/n, S = {set}"),
        truncations,
        set.density(),
        sums,
        osc,
    ))
}

/// Partial sums of sum_{n>=2} mu*(n)/n over n whose smallest prime factor
/// lies in the prime set `a`. The limit is the natural density of `a`.
pub fn kms_partial_sums(
    a: &PrimeSet,
    truncations: &[u64],
    table: &PrimeTable,
) -> Result<DensityReport> {
    let (sums, osc) = accumulate(truncations, |n| {
        let (mu, spf) = table.mobius_spf(n)?;
        if mu == 0 {
            return Ok(0.0);
        }
        if a.contains(spf, table)? {
            Ok(-mu as f64 / n as f64)
        } else {
            Ok(0.0)
        }
    })?;
    Ok(report_from(
        format!("prime-filtered mu*(n)/n, A = {}", a.describe()),
        truncations,
        a.density(),
        sums,
        osc,
    ))
}

#[derive(Debug, Clone, Serialize)]
pub struct CountingCheck {
    pub x: u64,
    /// #{p <= x : idx(p) in S}.
    pub primes_in_class: u64,
    /// S(pi(x)) = #{n <= pi(x) : n in S}.
    pub indices_below_pi: u64,
    pub holds: bool,
}

/// The exact counting identity pi_A(x) = S(pi(x)) for A = { p_a : a in S },
/// evaluated by two independent counting routes.
pub fn counting_identity_check(
    set: &IndexSet,
    x: u64,
    table: &PrimeTable,
) -> Result<CountingCheck> {
    if x > table.limit() {
        return Err(Error::SieveExhausted {
            limit: table.limit(),
            needed: x,
        });
    }
    let mut primes_in_class = 0u64;
    for (i, &p) in table.primes().iter().enumerate() {
        if p > x {
            break;
        }
        if set.contains(i as u64 + 1) {
            primes_in_class += 1;
        }
    }
    let pi_x = table.prime_count(x)?;
    let indices_below_pi = (1..=pi_x).filter(|&n| set.contains(n)).count() as u64;
    Ok(CountingCheck {
        x,
        primes_in_class,
        indices_below_pi,
        holds: primes_in_class == indices_below_pi,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct SieveBoundReport {
    pub k: u64,
    pub x: u64,
    pub product_truncation: u64,
    pub member_count: u64,
    /// Proportion of n <= x with no prime factor's index divisible by k.
    pub empirical: f64,
    /// prod (1 - 1/p) over primes with index divisible by k, up to the
    /// truncation; an upper bound for the density in the limit.
    pub bound: f64,
}

/// Empirical density of {n : no prime factor's index divisible by k} next to
/// the truncated sieve product bounding it.
pub fn sieve_bound(
    k: u64,
    x: u64,
    product_truncation: u64,
    table: &PrimeTable,
) -> Result<SieveBoundReport> {
    if k < 2 {
        return Err(Error::BelowDomain { got: k, min: 2 });
    }
    let mut member_count = 0u64;
    'outer: for n in 1..=x {
        let f = table.factor(n)?;
        for &(p, _) in &f.factors {
            if table.index_of(p)? % k == 0 {
                continue 'outer;
            }
        }
        member_count += 1;
    }
    let mut bound = 1f64;
    for (i, &p) in table.primes().iter().enumerate() {
        if p > product_truncation {
            break;
        }
        if (i as u64 + 1) % k == 0 {
            bound *= 1.0 - 1.0 / p as f64;
        }
    }
    Ok(SieveBoundReport {
        k,
        x,
        product_truncation,
        member_count,
        empirical: member_count as f64 / x as f64,
        bound,
    })
}

/// prod_{p <= t} (1 - 1/p): the factor each smallest-prime-factor group
/// telescopes into under the invalid grouped rearrangement. It tends to 0,
/// while the increasing-n partial sums hold their limit.
pub fn euler_product_tail(t: u64, table: &PrimeTable) -> Result<f64> {
    if t > table.limit() {
        return Err(Error::SieveExhausted {
            limit: table.limit(),
            needed: t,
        });
    }
    let mut prod = 1f64;
    for &p in table.primes() {
        if p > t {
            break;
        }
        prod *= 1.0 - 1.0 / p as f64;
    }
    Ok(prod)
}

#[derive(Debug, Clone, Serialize)]
pub struct TrajPoint {
    pub parameter: f64,
    pub value: f64,
    pub terms: u64,
    pub tail_bound: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Trajectory {
    pub function: String,
    pub target: Option<f64>,
    pub points: Vec<TrajPoint>,
}

impl Trajectory {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("parameter,value,terms,tail_bound\n");
        for p in &self.points {
            out.push_str(&format!(
                "{},{},{},{}\n",
                p.parameter, p.value, p.terms, p.tail_bound
            ));
        }
        out
    }

    /// "approaching <target>" when the absolute error shrinks from the first
    /// point to the last; purely descriptive.
    pub fn verdict(&self) -> String {
        match (self.target, self.points.first(), self.points.last()) {
            (Some(t), Some(a), Some(b)) if self.points.len() >= 2 => {
                let (e0, e1) = ((a.value - t).abs(), (b.value - t).abs());
                if e1 < e0 {
                    format!("approaching {t} (error {e0:.6} -> {e1:.6})")
                } else {
                    format!("inconclusive against {t} (error {e0:.6} -> {e1:.6})")
                }
            }
            (Some(t), ..) => format!("target {t}"),
            (None, ..) => "no known target".to_string(),
        }
    }
}

const FROBENIUS_TAIL_EPS: f64 = 1e-10;

fn frobenius_tail(c0: f64, c1: f64, q: f64, n: u64) -> f64 {
    // (1-q) sum_{m>n} (c0 + c1 m) q^m, in closed form.
    let qn1 = q.powi(n as i32 + 1);
    c0 * qn1 + c1 * qn1 * ((n + 1) as f64 + q / (1.0 - q))
}

/// (1-q) sum_{n>=1} f(n) q^n for each q, truncated once the closed-form tail
/// bound for linear-growth f drops below 1e-10. The limit as q -> 1- is the
/// average value of f, when that average exists.
pub fn frobenius_limit(
    f: &ArithmeticFn,
    q_values: &[f64],
    table: &PrimeTable,
) -> Result<Trajectory> {
    let (c0, c1) = f.growth();
    let mut points = Vec::with_capacity(q_values.len());
    for &q in q_values {
        if !(0.0 < q && q < 1.0) {
            return Err(Error::InvalidArgument(format!("q = {q} must be in (0,1)")));
        }
        let mut n_terms = 64u64;
        while frobenius_tail(c0, c1, q, n_terms) >= FROBENIUS_TAIL_EPS {
            n_terms = n_terms
                .checked_mul(2)
                .ok_or_else(|| Error::InvalidArgument("tail never closes".into()))?;
        }
        let mut kahan = Kahan::new();
        let mut qn = 1f64;
        for n in 1..=n_terms {
            qn *= q;
            let fv = f.eval(n, table)?;
            if fv != 0.0 {
                kahan.add(fv * qn);
            }
        }
        points.push(TrajPoint {
            parameter: q,
            value: (1.0 - q) * kahan.value(),
            terms: n_terms,
            tail_bound: frobenius_tail(c0, c1, q, n_terms),
        });
    }
    Ok(Trajectory {
        function: f.to_string(),
        target: f.mean(),
        points,
    })
}

/// sum_k f(k) q^k prod_{j>k} (1 - q^j) for each q: the smallest-part
/// decomposition of the signed distinct-part series
/// sum over distinct-part partitions of (-1)^(length+1) f(smallest part)
/// q^size. Its limit as q -> 1- is again the average value of f. Validate
/// the product form against direct enumeration with `qseries_coefficients`
/// before leaning on it.
pub fn qseries_abelian(
    f: &ArithmeticFn,
    q_values: &[f64],
    table: &PrimeTable,
) -> Result<Trajectory> {
    let (c0, c1) = f.growth();
    let mut points = Vec::with_capacity(q_values.len());
    for &q in q_values {
        if !(0.0 < q && q < 1.0) {
            return Err(Error::InvalidArgument(format!("q = {q} must be in (0,1)")));
        }
        // Choose K so the term bound (c0 + c1 K) q^K / (1-q) is < 1e-12;
        // every suffix product is in (0, 1].
        let mut k_max = 64u64;
        while (c0 + c1 * k_max as f64) * q.powi(k_max as i32) / (1.0 - q) >= 1e-12 {
            k_max = k_max
                .checked_mul(2)
                .ok_or_else(|| Error::InvalidArgument("tail never closes".into()))?;
        }
        let k = k_max as usize;
        let mut qpow = vec![1f64; k + 1];
        for i in 1..=k {
            qpow[i] = qpow[i - 1] * q;
        }
        let mut suffix = vec![1f64; k + 1];
        for i in (0..k).rev() {
            suffix[i] = suffix[i + 1] * (1.0 - qpow[i + 1]);
        }
        let mut kahan = Kahan::new();
        for n in 1..=k {
            let fv = f.eval(n as u64, table)?;
            if fv != 0.0 {
                kahan.add(fv * qpow[n] * suffix[n]);
            }
        }
        points.push(TrajPoint {
            parameter: q,
            value: kahan.value(),
            terms: k_max,
            tail_bound: (c0 + c1 * k_max as f64) * q.powi(k_max as i32) / (1.0 - q),
        });
    }
    Ok(Trajectory {
        function: f.to_string(),
        target: f.mean(),
        points,
    })
}

/// Coefficients of q^0..q^max_n in sum_k f(k) q^k prod_{j>k} (1 - q^j),
/// by exact polynomial expansion. For integer-valued f these are exact in
/// f64, so they can be compared bit-for-bit against direct enumeration over
/// distinct-part partitions.
pub fn qseries_coefficients(f: &ArithmeticFn, max_n: u64, table: &PrimeTable) -> Result<Vec<f64>> {
    let n = max_n as usize;
    let mut total = vec![0f64; n + 1];
    for k in 1..=n {
        let fk = f.eval(k as u64, table)?;
        if fk == 0.0 {
            continue;
        }
        let mut poly = vec![0f64; n + 1];
        poly[k] = 1.0;
        for j in (k + 1)..=n {
            for d in (j..=n).rev() {
                poly[d] -= poly[d - j];
            }
        }
        for d in k..=n {
            total[d] += fk * poly[d];
        }
    }
    Ok(total)
}

/// Ratio of truncated prime sums sum f(idx(p)) p^-s / sum p^-s for each s,
/// with a crude integral tail bound reported per point. Exploratory: the
/// output is a trajectory, never an assertion about the limit.
pub fn dirichlet_ratio(
    f: &ArithmeticFn,
    s_values: &[f64],
    prime_limit: u64,
    table: &PrimeTable,
) -> Result<Trajectory> {
    if prime_limit > table.limit() {
        return Err(Error::SieveExhausted {
            limit: table.limit(),
            needed: prime_limit,
        });
    }
    let mut points = Vec::with_capacity(s_values.len());
    for &s in s_values {
        if s <= 1.0 {
            return Err(Error::InvalidArgument(format!("s = {s} must exceed 1")));
        }
        let mut num = Kahan::new();
        let mut den = Kahan::new();
        let mut terms = 0u64;
        for (i, &p) in table.primes().iter().enumerate() {
            if p > prime_limit {
                break;
            }
            terms += 1;
            let t = (p as f64).powf(-s);
            den.add(t);
            let fv = f.eval(i as u64 + 1, table)?;
            if fv != 0.0 {
                num.add(fv * t);
            }
        }
        let tail = (prime_limit as f64).powf(1.0 - s) / ((s - 1.0) * (prime_limit as f64).ln());
        points.push(TrajPoint {
            parameter: s,
            value: num.value() / den.value(),
            terms,
            tail_bound: tail,
        });
    }
    Ok(Trajectory {
        function: f.to_string(),
        target: f.mean(),
        points,
    })
}

/// Partial sums of sum_{n>=2} mu*(n) f(idx(p_min(n))) / n, increasing n.
/// For indicator f this coincides term for term with
/// `theorem1_partial_sums` on the underlying index set.
pub fn conjecture2_partial_sums(
    f: &ArithmeticFn,
    truncations: &[u64],
    table: &PrimeTable,
) -> Result<DensityReport> {
    let (sums, osc) = accumulate(truncations, |n| {
        let (mu, spf) = table.mobius_spf(n)?;
        if mu == 0 {
            return Ok(0.0);
        }
        let idx = table.index_of(spf)?;
        let fv = f.eval(idx, table)?;
        Ok(-mu as f64 * fv / n as f64)
    })?;
    Ok(report_from(
        format!("mu*(n) f(idx(p_min(n)))/n, f = {f}"),
        truncations,
        f.mean(),
        sums,
        osc,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table() -> PrimeTable {
        PrimeTable::new(100_000)
    }

    #[test]
    fn kahan_beats_naive_on_small_terms() {
        let mut k = Kahan::new();
        k.add(1.0);
        for _ in 0..1_000_000 {
            k.add(1e-17);
        }
        assert!((k.value() - (1.0 + 1e-11)).abs() < 1e-13);
    }

    #[test]
    fn index_set_grammar_round_trips() {
        for text in [
            "finite:{1,4,9}",
            "ap:1 mod 2",
            "ap:1 mod 2 + ap:0 mod 4",
            "complement(ap:0 mod 2)",
            "finite:{}",
        ] {
            let set: IndexSet = text.parse().unwrap();
            assert_eq!(set.to_string(), text);
        }
        assert!("ap:1 mod 0".parse::<IndexSet>().is_err());
        assert!("finite:{1,x}".parse::<IndexSet>().is_err());
        assert!("nonsense".parse::<IndexSet>().is_err());
    }

    #[test]
    fn index_set_membership_and_density() {
        let odds: IndexSet = "ap:1 mod 2".parse().unwrap();
        assert!(odds.contains(1) && odds.contains(3) && !odds.contains(4));
        assert_eq!(odds.exact_density(), Some((1, 2)));

        let finite: IndexSet = "finite:{1,4,9}".parse().unwrap();
        assert!(finite.contains(4) && !finite.contains(5));
        assert_eq!(finite.density(), Some(0.0));

        // Overlapping progressions must not double count: 3 mod 4 is inside
        // 1 mod 2.
        let overlap: IndexSet = "ap:1 mod 2 + ap:3 mod 4".parse().unwrap();
        assert_eq!(overlap.exact_density(), Some((2, 4)));

        let evens_complement: IndexSet = "complement(ap:0 mod 2)".parse().unwrap();
        assert_eq!(evens_complement.exact_density(), Some((1, 2)));
        assert!(evens_complement.contains(7) && !evens_complement.contains(8));

        let all: IndexSet = "ap:0 mod 1".parse().unwrap();
        assert_eq!(all.exact_density(), Some((1, 1)));
        assert!(all.contains(123));

        let squares = IndexSet::predicate("squares", |n| {
            let r = n.isqrt();
            r * r == n
        });
        assert!(squares.contains(49) && !squares.contains(50));
        assert_eq!(squares.density(), None);
    }

    #[test]
    fn arithmetic_fn_grammar_round_trips() {
        for text in [
            "one",
            "mu",
            "id",
            "indicator(ap:0 mod 2)",
            "table{2=3,5=-7}",
        ] {
            let f: ArithmeticFn = text.parse().unwrap();
            assert_eq!(f.to_string(), text);
        }
        assert!("bogus{}".parse::<ArithmeticFn>().is_err());
    }

    #[test]
    fn arithmetic_fn_eval() {
        let t = table();
        let f: ArithmeticFn = "table{2=3,5=-7}".parse().unwrap();
        assert_eq!(f.eval(2, &t).unwrap(), 3.0);
        assert_eq!(f.eval(5, &t).unwrap(), -7.0);
        assert_eq!(f.eval(6, &t).unwrap(), 0.0);
        assert_eq!(f.eval(0, &t).unwrap(), 0.0);
        let mu = ArithmeticFn::Mobius;
        assert_eq!(mu.eval(10, &t).unwrap(), 1.0);
        assert_eq!(mu.eval(12, &t).unwrap(), 0.0);
    }

    #[test]
    fn theorem1_trends_for_small_battery() {
        let t = table();
        let truncs = [1_000, 10_000, 100_000];

        // S = {1}: A = {2}; density 0.
        let single: IndexSet = "finite:{1}".parse().unwrap();
        let rep = theorem1_partial_sums(&single, &truncs, &t).unwrap();
        assert_eq!(rep.target, Some(0.0));
        assert!(rep.partial_sums.last().unwrap().abs() < 0.05);

        // S = all of N: partial sums head to 1.
        let all: IndexSet = "ap:0 mod 1".parse().unwrap();
        let rep = theorem1_partial_sums(&all, &truncs, &t).unwrap();
        assert!((rep.partial_sums.last().unwrap() - 1.0).abs() < 0.01);

        // Odd indices: density 1/2.
        let odds: IndexSet = "ap:1 mod 2".parse().unwrap();
        let rep = theorem1_partial_sums(&odds, &truncs, &t).unwrap();
        assert_eq!(rep.target, Some(0.5));
        assert!((rep.partial_sums.last().unwrap() - 0.5).abs() < 0.05);
        assert_eq!(rep.errors.len(), 3);
        assert_eq!(rep.oscillation.len(), 3);
    }

    #[test]
    fn theorem1_all_indices_matches_independent_mertens_route() {
        // Independent oracle: 1 - sum_{n<=N} mu(n)/n with mu from a local
        // sieve written here, not from PrimeTable.
        let n_max = 50_000usize;
        let mut mu = vec![1i8; n_max + 1];
        let mut is_comp = vec![false; n_max + 1];
        let mut primes = Vec::new();
        for i in 2..=n_max {
            if !is_comp[i] {
                primes.push(i);
                mu[i] = -1;
            }
            for &p in &primes {
                if i * p > n_max {
                    break;
                }
                is_comp[i * p] = true;
                if i % p == 0 {
                    mu[i * p] = 0;
                    break;
                }
                mu[i * p] = -mu[i];
            }
        }
        let mut oracle = 0f64;
        for n in 2..=n_max {
            oracle -= mu[n] as f64 / n as f64;
        }

        let t = table();
        let all: IndexSet = "ap:0 mod 1".parse().unwrap();
        let rep = theorem1_partial_sums(&all, &[n_max as u64], &t).unwrap();
        assert!((rep.partial_sums[0] - oracle).abs() < 1e-12);
    }

    #[test]
    fn kms_examples() {
        let t = table();
        let truncs = [10_000, 100_000];

        let empty = PrimeSet::Finite(BTreeSet::new());
        let rep = kms_partial_sums(&empty, &truncs, &t).unwrap();
        assert!(rep.partial_sums.iter().all(|&s| s == 0.0));

        let all = PrimeSet::All;
        let rep = kms_partial_sums(&all, &truncs, &t).unwrap();
        assert!((rep.partial_sums.last().unwrap() - 1.0).abs() < 0.01);

        // p = 1 mod 4 has natural density 1/2.
        let res = PrimeSet::Residue(Ap {
            residue: 1,
            modulus: 4,
        });
        assert_eq!(res.density(), Some(0.5));
        let rep = kms_partial_sums(&res, &truncs, &t).unwrap();
        assert!((rep.partial_sums.last().unwrap() - 0.5).abs() < 0.1);
    }

    #[test]
    fn counting_identity_hand_example() {
        let t = table();
        // S = odd integers, x = 20: primes {2,5,11,17} have odd index;
        // pi(20) = 8 and S(8) = 4.
        let odds: IndexSet = "ap:1 mod 2".parse().unwrap();
        let check = counting_identity_check(&odds, 20, &t).unwrap();
        assert_eq!(check.primes_in_class, 4);
        assert_eq!(check.indices_below_pi, 4);
        assert!(check.holds);

        let none: IndexSet = "finite:{}".parse().unwrap();
        let check = counting_identity_check(&none, 1000, &t).unwrap();
        assert_eq!(check.primes_in_class, 0);
        assert!(check.holds);
    }

    #[test]
    fn sieve_bound_membership_and_monotonicity() {
        let t = table();
        // For k = 2 the excluded primes are those with even index: 3, 7, ...
        let rep = sieve_bound(2, 100, 1000, &t).unwrap();
        // 2 and 5 stay, 3 drops out.
        let members: Vec<u64> = (1..=10)
            .filter(|&n| {
                let f = t.factor(n).unwrap();
                f.factors
                    .iter()
                    .all(|&(p, _)| t.index_of(p).unwrap() % 2 != 0)
            })
            .collect();
        assert!(members.contains(&2) && members.contains(&5) && !members.contains(&3));
        assert!(rep.empirical > 0.0 && rep.bound > 0.0);

        // More product factors means a strictly smaller bound.
        let small = sieve_bound(2, 100, 1_000, &t).unwrap();
        let large = sieve_bound(2, 100, 100_000, &t).unwrap();
        assert!(large.bound < small.bound);
        assert!(sieve_bound(1, 10, 10, &t).is_err());
    }

    #[test]
    fn frobenius_known_limits() {
        let t = table();
        let qs = [0.9, 0.99, 0.999];

        // (1-q) sum_{n>=1} q^n = q exactly; the limit toward 1 is taken in q.
        let one = frobenius_limit(&ArithmeticFn::One, &qs, &t).unwrap();
        for p in &one.points {
            assert!(
                (p.value - p.parameter).abs() < 1e-9,
                "q={} v={}",
                p.parameter,
                p.value
            );
        }
        assert!((one.points.last().unwrap().value - 1.0).abs() < 2e-3);

        let evens = ArithmeticFn::Indicator("ap:0 mod 2".parse().unwrap());
        let rep = frobenius_limit(&evens, &qs, &t).unwrap();
        assert_eq!(rep.target, Some(0.5));
        assert!((rep.points.last().unwrap().value - 0.5).abs() < 0.01);

        assert!(frobenius_limit(&ArithmeticFn::One, &[1.0], &t).is_err());
        assert!(frobenius_limit(&ArithmeticFn::One, &[0.0], &t).is_err());
    }

    #[test]
    fn frobenius_identity_diverges_but_is_tracked() {
        let t = table();
        // f = id: (1-q) sum n q^n = q/(1-q), diverging as q -> 1-.
        let rep = frobenius_limit(&ArithmeticFn::Identity, &[0.5, 0.9], &t).unwrap();
        assert_eq!(rep.target, None);
        assert!((rep.points[0].value - 1.0).abs() < 1e-6);
        assert!((rep.points[1].value - 9.0).abs() < 1e-5);
    }

    #[test]
    fn qseries_telescopes_for_constant_f() {
        let t = table();
        let rep = qseries_abelian(&ArithmeticFn::One, &[0.9, 0.99, 0.999], &t).unwrap();
        // sum_k q^k prod_{j>k}(1-q^j) = 1 - prod_{j>=1}(1-q^j).
        let vals: Vec<f64> = rep.points.iter().map(|p| p.value).collect();
        assert!((vals[2] - 1.0).abs() < 0.05);
        assert!(vals[0] < vals[1] && vals[1] < vals[2]);
    }

    #[test]
    fn qseries_coefficients_match_direct_enumeration() {
        let t = table();
        let specimens: Vec<ArithmeticFn> = vec![
            ArithmeticFn::One,
            ArithmeticFn::Mobius,
            ArithmeticFn::Identity,
            ArithmeticFn::Indicator("ap:0 mod 2".parse().unwrap()),
            "table{2=3,5=-7}".parse().unwrap(),
        ];
        for f in &specimens {
            let coeffs = qseries_coefficients(f, 20, &t).unwrap();
            for n in 0..=20u64 {
                let mut direct = 0f64;
                for p in crate::partition::partitions_of_size(
                    n,
                    &crate::partition::Constraints::distinct(),
                ) {
                    if p.is_empty() {
                        continue;
                    }
                    let sign = if p.length() % 2 == 1 { 1.0 } else { -1.0 };
                    direct += sign * f.eval(p.smallest_part().unwrap(), &t).unwrap();
                }
                assert_eq!(coeffs[n as usize], direct, "f={f} n={n}");
            }
        }
    }

    #[test]
    fn dirichlet_ratio_is_exactly_one_for_constant_f() {
        let t = table();
        let rep = dirichlet_ratio(&ArithmeticFn::One, &[1.5, 1.1, 1.01], 100_000, &t).unwrap();
        for p in &rep.points {
            assert_eq!(p.value, 1.0, "s={}", p.parameter);
        }
        assert!(dirichlet_ratio(&ArithmeticFn::One, &[1.0], 1000, &t).is_err());
    }

    #[test]
    fn dirichlet_ratio_finite_support_heads_to_zero() {
        let t = table();
        let f: ArithmeticFn = "table{1=1,2=1,3=1}".parse().unwrap();
        let rep = dirichlet_ratio(&f, &[1.5, 1.1, 1.01], 100_000, &t).unwrap();
        let vals: Vec<f64> = rep.points.iter().map(|p| p.value).collect();
        assert!(vals[0] > vals[1] && vals[1] > vals[2]);
        assert!(vals[2] < 0.5);
    }

    #[test]
    fn conjecture2_indicator_reduces_to_theorem1_bit_for_bit() {
        let t = table();
        let truncs = [100, 1_000, 10_000, 100_000];
        let odds: IndexSet = "ap:1 mod 2".parse().unwrap();
        let direct = theorem1_partial_sums(&odds, &truncs, &t).unwrap();
        let via_f = conjecture2_partial_sums(
            &ArithmeticFn::Indicator("ap:1 mod 2".parse().unwrap()),
            &truncs,
            &t,
        )
        .unwrap();
        assert_eq!(direct.partial_sums, via_f.partial_sums);
    }

    #[test]
    fn euler_product_tail_decays() {
        let t = table();
        let p3 = euler_product_tail(1_000, &t).unwrap();
        let p4 = euler_product_tail(10_000, &t).unwrap();
        let p5 = euler_product_tail(100_000, &t).unwrap();
        assert!(p3 > p4 && p4 > p5);
        assert!(p5 < 0.06);
    }

    #[test]
    fn density_report_csv_schema() {
        let t = table();
        let odds: IndexSet = "ap:1 mod 2".parse().unwrap();
        let rep = theorem1_partial_sums(&odds, &[100, 1000], &t).unwrap();
        let csv = rep.to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), "N,partial_sum,target,error");
        let row: Vec<&str> = lines.next().unwrap().split(',').collect();
        assert_eq!(row.len(), 4);
        assert_eq!(row[0], "100");
        assert_eq!(row[2], "0.5");
    }

    #[test]
    fn truncation_validation() {
        let t = table();
        let odds: IndexSet = "ap:1 mod 2".parse().unwrap();
        assert!(theorem1_partial_sums(&odds, &[], &t).is_err());
        assert!(theorem1_partial_sums(&odds, &[100, 100], &t).is_err());
        assert!(theorem1_partial_sums(&odds, &[1000, 100], &t).is_err());
    }
}
