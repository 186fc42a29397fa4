//! The supernorm map, its inverse, and the integer bijections it induces:
//! conjugation acting on prime factorizations, and the merge/split bijection
//! between power-free integers and integers with restricted factor indices.

use num_bigint::BigUint;
use num_traits::One;

use crate::error::{Error, Result};
use crate::partition::Partition;
use crate::primes::PrimeTable;

/// Supernorm: the integer whose prime factorization has exponent m_i at the
/// i-th prime, where m_i is the multiplicity of part i. The empty partition
/// maps to 1.
pub fn supernorm(p: &Partition, table: &PrimeTable) -> Result<BigUint> {
    let mut acc = BigUint::one();
    for &(part, mult) in p.multiplicities() {
        let prime = table.nth_prime(part)?;
        acc *= BigUint::from(prime).pow(u32::try_from(mult).expect("multiplicity fits u32"));
    }
    Ok(acc)
}

/// Inverse of the supernorm: factor n and read each prime's index as a part.
pub fn supernorm_inverse(n: u64, table: &PrimeTable) -> Result<Partition> {
    if n == 0 {
        return Err(Error::BelowDomain { got: 0, min: 1 });
    }
    let factored = table.factor(n)?;
    let pairs = factored
        .factors
        .iter()
        .map(|&(p, e)| Ok((table.index_of(p)?, e as u64)))
        .collect::<Result<Vec<_>>>()?;
    Partition::from_multiplicities(pairs)
}

/// Replace each part by the prime it indexes. The norm of the result equals
/// the supernorm of the input.
pub fn superpartition(p: &Partition, table: &PrimeTable) -> Result<Partition> {
    let pairs = p
        .multiplicities()
        .iter()
        .map(|&(part, mult)| Ok((table.nth_prime(part)?, mult)))
        .collect::<Result<Vec<_>>>()?;
    Partition::from_multiplicities(pairs)
}

/// Conjugate partition (transpose of the Young diagram).
pub fn conjugate(p: &Partition) -> Partition {
    // Column c of the diagram has height #{parts >= c}, which is constant on
    // each band of columns (prev_part, part] between distinct part values.
    let mults = p.multiplicities();
    let mut count_ge = 0u64;
    let mut bands: Vec<(u64, u64)> = Vec::with_capacity(mults.len()); // (part, #parts >= part)
    for &(part, mult) in mults.iter().rev() {
        count_ge += mult;
        bands.push((part, count_ge));
    }
    let mut out: Vec<(u64, u64)> = Vec::with_capacity(bands.len());
    let mut prev = 0u64;
    for &(part, height) in bands.iter().rev() {
        out.push((height, part - prev));
        prev = part;
    }
    Partition::from_multiplicities(out).expect("heights are positive")
}

/// Conjugation lifted to integers: with k prime factors counted with
/// multiplicity on one side and largest prime factor p_k on the other.
/// 1 maps to 1. The result can be astronomically large (a prime with index
/// m becomes 2^m), hence the big-integer return type.
pub fn example1_bijection(n: u64, table: &PrimeTable) -> Result<BigUint> {
    let lambda = supernorm_inverse(n, table)?;
    supernorm(&conjugate(&lambda), table)
}

/// Sum of prime-factor indices of n, with multiplicity.
pub fn index_sum(n: u64, table: &PrimeTable) -> Result<u64> {
    Ok(supernorm_inverse(n, table)?.size())
}

/// Split every part divisible by k into k-free parts: a part i*k^e (k does
/// not divide i) with multiplicity m becomes m*k^e copies of i. Requires all
/// multiplicities < k, the domain on which this inverts `glaisher_merge`.
pub fn glaisher_split(p: &Partition, k: u64) -> Result<Partition> {
    if k < 2 {
        return Err(Error::BelowDomain { got: k, min: 2 });
    }
    if let Some(&(part, mult)) = p.multiplicities().iter().find(|&&(_, m)| m >= k) {
        return Err(Error::OutsideDomain(format!(
            "part {part} has multiplicity {mult} >= {k}"
        )));
    }
    let mut pairs: Vec<(u64, u64)> = Vec::new();
    for &(part, mult) in p.multiplicities() {
        let mut base = part;
        let mut copies = mult;
        while base % k == 0 {
            base /= k;
            copies = copies.checked_mul(k).expect("split multiplicity overflow");
        }
        pairs.push((base, copies));
    }
    Partition::from_multiplicities(pairs)
}

/// Merge k equal parts into one part k*i until all multiplicities are < k.
/// Requires no part divisible by k (the image of `glaisher_split`); computed
/// directly from the base-k digits of each multiplicity.
pub fn glaisher_merge(p: &Partition, k: u64) -> Result<Partition> {
    if k < 2 {
        return Err(Error::BelowDomain { got: k, min: 2 });
    }
    if let Some(&(part, _)) = p.multiplicities().iter().find(|&&(q, _)| q % k == 0) {
        return Err(Error::OutsideDomain(format!(
            "part {part} is divisible by {k}"
        )));
    }
    let mut pairs: Vec<(u64, u64)> = Vec::new();
    for &(part, mult) in p.multiplicities() {
        let mut digits = mult;
        let mut scale = 1u64;
        while digits > 0 {
            let digit = digits % k;
            if digit > 0 {
                pairs.push((
                    part.checked_mul(scale).expect("merged part overflow"),
                    digit,
                ));
            }
            digits /= k;
            scale = scale.checked_mul(k).expect("merged part overflow");
        }
    }
    Partition::from_multiplicities(pairs)
}

/// The split bijection lifted to integers: maps k-th-power-free integers onto
/// integers none of whose prime factors has index divisible by k. Errors if
/// n is not k-th-power-free.
pub fn example2_bijection(n: u64, k: u64, table: &PrimeTable) -> Result<BigUint> {
    let lambda = supernorm_inverse(n, table)?;
    let split = glaisher_split(&lambda, k)
        .map_err(|_| Error::OutsideDomain(format!("{n} is not {k}th-power-free")))?;
    supernorm(&split, table)
}

/// Inverse direction of `example2_bijection`, for integers whose prime
/// factor indices are all coprime to multiples of k.
pub fn example2_inverse(n: u64, k: u64, table: &PrimeTable) -> Result<BigUint> {
    let lambda = supernorm_inverse(n, table)?;
    let merged = glaisher_merge(&lambda, k).map_err(|_| {
        Error::OutsideDomain(format!(
            "{n} has a prime factor whose index is divisible by {k}"
        ))
    })?;
    supernorm(&merged, table)
}
