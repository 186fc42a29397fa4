//! Prime sieve and the classical arithmetic functions used throughout:
//! indexing of primes, factorization, Moebius, divisor counts, primorials.

use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use num_bigint::BigUint;
use num_traits::One;

use crate::error::{Error, Result};

const CACHE_MAGIC: &[u8; 5] = b"SNLB1";

/// Sieve-backed table of primes up to a fixed limit, with a smallest-prime-
/// factor table for direct factorization. Immutable after construction;
/// `extended` builds a fresh, larger table.
pub struct PrimeTable {
    limit: u64,
    primes: Vec<u64>,
    /// spf[n] = smallest prime factor of n for composite n; 0 for primes and
    /// for n < 2.
    spf: Vec<u32>,
}

/// A positive integer together with its prime factorization.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactoredInteger {
    pub n: u64,
    /// `(prime, exponent)` pairs, primes strictly increasing.
    pub factors: Vec<(u64, u32)>,
}

impl FactoredInteger {
    /// Number of divisors, from the exponents.
    pub fn divisor_count(&self) -> u64 {
        self.factors.iter().map(|&(_, e)| e as u64 + 1).product()
    }

    /// Number of prime factors counted with multiplicity.
    pub fn big_omega(&self) -> u64 {
        self.factors.iter().map(|&(_, e)| e as u64).sum()
    }

    /// All divisors, ascending.
    pub fn divisors(&self) -> Vec<u64> {
        let mut out = vec![1u64];
        for &(p, e) in &self.factors {
            let prev = out.clone();
            let mut pk = 1u64;
            for _ in 0..e {
                pk *= p;
                out.extend(prev.iter().map(|d| d * pk));
            }
        }
        out.sort_unstable();
        out
    }
}

impl PrimeTable {
    /// Sieve everything up to `limit` (inclusive) with a linear sieve.
    pub fn new(limit: u64) -> Self {
        assert!(limit >= 2, "sieve limit must be at least 2");
        assert!(limit <= u32::MAX as u64, "sieve limit must fit in u32");
        let mut spf = vec![0u32; limit as usize + 1];
        let mut primes: Vec<u64> = Vec::new();
        for i in 2..=limit {
            if spf[i as usize] == 0 {
                primes.push(i);
            }
            for &p in &primes {
                let m = i.saturating_mul(p);
                if m > limit {
                    break;
                }
                spf[m as usize] = p as u32;
                if i % p == 0 {
                    break;
                }
            }
        }
        PrimeTable { limit, primes, spf }
    }

    /// A table guaranteed to contain the first `n` primes, sized from the
    /// Rosser upper bound p_n < n(ln n + ln ln n) for n >= 6.
    pub fn covering_nth_prime(n: u64) -> Self {
        if n < 6 {
            return Self::new(16);
        }
        let x = n as f64;
        let bound = x * (x.ln() + x.ln().ln());
        Self::new(bound.ceil() as u64 + 16)
    }

    /// Fresh table with a larger limit.
    pub fn extended(&self, new_limit: u64) -> Self {
        Self::new(new_limit.max(self.limit))
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    /// All sieved primes, ascending.
    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    pub fn is_prime(&self, n: u64) -> Result<bool> {
        if n > self.limit {
            return Err(Error::SieveExhausted {
                limit: self.limit,
                needed: n,
            });
        }
        Ok(n >= 2 && self.spf[n as usize] == 0)
    }

    /// The nth prime, 1-based; by convention the 0th "prime" is 1.
    pub fn nth_prime(&self, n: u64) -> Result<u64> {
        if n == 0 {
            return Ok(1);
        }
        self.primes
            .get(n as usize - 1)
            .copied()
            .ok_or(Error::SieveExhausted {
                limit: self.limit,
                needed: n,
            })
    }

    /// pi(x): the number of primes not exceeding x.
    pub fn prime_count(&self, x: u64) -> Result<u64> {
        if x > self.limit {
            return Err(Error::SieveExhausted {
                limit: self.limit,
                needed: x,
            });
        }
        Ok(self.primes.partition_point(|&p| p <= x) as u64)
    }

    /// Index of a prime in the ascending sequence of primes; idx(1) = 0.
    pub fn index_of(&self, p: u64) -> Result<u64> {
        if p == 1 {
            return Ok(0);
        }
        if p > self.limit {
            return Err(Error::SieveExhausted {
                limit: self.limit,
                needed: p,
            });
        }
        match self.primes.binary_search(&p) {
            Ok(i) => Ok(i as u64 + 1),
            Err(_) => Err(Error::NotPrime(p)),
        }
    }

    /// Prime factorization. Uses the spf table for n <= limit and falls back
    /// to trial division by sieved primes up to sqrt(n) beyond it.
    pub fn factor(&self, n: u64) -> Result<FactoredInteger> {
        if n == 0 {
            return Err(Error::BelowDomain { got: 0, min: 1 });
        }
        let mut factors: Vec<(u64, u32)> = Vec::new();
        if n <= self.limit {
            let mut x = n;
            while x > 1 {
                let p = match self.spf[x as usize] {
                    0 => x,
                    p => p as u64,
                };
                let mut e = 0u32;
                while x % p == 0 {
                    x /= p;
                    e += 1;
                }
                factors.push((p, e));
            }
        } else {
            let mut x = n;
            for &p in &self.primes {
                if p.saturating_mul(p) > x {
                    break;
                }
                if x % p == 0 {
                    let mut e = 0u32;
                    while x % p == 0 {
                        x /= p;
                        e += 1;
                    }
                    factors.push((p, e));
                }
            }
            if x > 1 {
                let last = *self.primes.last().expect("table has primes");
                if last.saturating_mul(last) < x {
                    return Err(Error::SieveExhausted {
                        limit: self.limit,
                        needed: x.isqrt() + 1,
                    });
                }
                factors.push((x, 1));
            }
        }
        factors.sort_unstable_by_key(|&(p, _)| p);
        Ok(FactoredInteger { n, factors })
    }

    /// Smallest prime factor of n >= 2.
    pub fn smallest_prime_factor(&self, n: u64) -> Result<u64> {
        if n < 2 {
            return Err(Error::BelowDomain { got: n, min: 2 });
        }
        if n <= self.limit {
            Ok(match self.spf[n as usize] {
                0 => n,
                p => p as u64,
            })
        } else {
            Ok(self.factor(n)?.factors[0].0)
        }
    }

    /// Largest prime factor of n >= 2.
    pub fn largest_prime_factor(&self, n: u64) -> Result<u64> {
        if n < 2 {
            return Err(Error::BelowDomain { got: n, min: 2 });
        }
        Ok(self.factor(n)?.factors.last().expect("n >= 2").0)
    }

    /// Omega(n): number of prime factors with multiplicity; Omega(1) = 0.
    pub fn big_omega(&self, n: u64) -> Result<u64> {
        Ok(self.factor(n)?.big_omega())
    }

    /// Classical Moebius function.
    pub fn mobius(&self, n: u64) -> Result<i8> {
        Ok(self.mobius_spf(n)?.0)
    }

    /// mu*(n) := -mu(n).
    pub fn mobius_star(&self, n: u64) -> Result<i8> {
        Ok(-self.mobius(n)?)
    }

    /// (mu(n), smallest prime factor of n) in one spf walk; spf is 0 for n = 1.
    /// Allocation-free fast path for the series accumulators.
    pub fn mobius_spf(&self, n: u64) -> Result<(i8, u64)> {
        if n == 0 {
            return Err(Error::BelowDomain { got: 0, min: 1 });
        }
        if n == 1 {
            return Ok((1, 0));
        }
        if n > self.limit {
            let f = self.factor(n)?;
            let smallest = f.factors[0].0;
            if f.factors.iter().any(|&(_, e)| e >= 2) {
                return Ok((0, smallest));
            }
            return Ok((if f.factors.len() % 2 == 0 { 1 } else { -1 }, smallest));
        }
        let mut x = n;
        let mut k = 0u32;
        let mut smallest = 0u64;
        while x > 1 {
            let p = match self.spf[x as usize] {
                0 => x,
                p => p as u64,
            };
            if smallest == 0 {
                smallest = p;
            }
            x /= p;
            if x % p == 0 {
                // Squared factor: mu = 0, but keep the spf we already found.
                return Ok((0, smallest));
            }
            k += 1;
        }
        Ok((if k % 2 == 0 { 1 } else { -1 }, smallest))
    }

    /// d(n): number of divisors.
    pub fn divisor_count(&self, n: u64) -> Result<u64> {
        if n == 0 {
            return Err(Error::BelowDomain { got: 0, min: 1 });
        }
        if n > self.limit {
            return Ok(self.factor(n)?.divisor_count());
        }
        let mut x = n;
        let mut count = 1u64;
        while x > 1 {
            let p = match self.spf[x as usize] {
                0 => x,
                p => p as u64,
            };
            let mut e = 0u64;
            while x % p == 0 {
                x /= p;
                e += 1;
            }
            count *= e + 1;
        }
        Ok(count)
    }

    /// Product of the first n primes; primorial(0) = 1.
    pub fn primorial(&self, n: u64) -> Result<BigUint> {
        if n as usize > self.primes.len() {
            return Err(Error::SieveExhausted {
                limit: self.limit,
                needed: n,
            });
        }
        let mut acc = BigUint::one();
        for &p in &self.primes[..n as usize] {
            acc *= BigUint::from(p);
        }
        Ok(acc)
    }

    /// Write the odd-only primality bitset: magic "SNLB1", then the limit as
    /// a little-endian u64, then the bitset in little-endian u64 words.
    pub fn write_cache(&self, path: &Path) -> Result<()> {
        let odd_count = self.limit.div_ceil(2);
        let words = odd_count.div_ceil(64) as usize;
        let mut bits = vec![0u64; words];
        for &p in &self.primes {
            if p % 2 == 1 {
                let i = (p - 1) / 2;
                bits[(i / 64) as usize] |= 1u64 << (i % 64);
            }
        }
        let mut file = fs::File::create(path)?;
        file.write_all(CACHE_MAGIC)?;
        file.write_all(&self.limit.to_le_bytes())?;
        for w in bits {
            file.write_all(&w.to_le_bytes())?;
        }
        Ok(())
    }

    /// Load a table from a cache produced by `write_cache`, validating the
    /// magic bytes, the limit, and the payload length. The spf table is
    /// rebuilt from the cached primes.
    pub fn from_cache(path: &Path) -> Result<Self> {
        let mut raw = Vec::new();
        fs::File::open(path)?.read_to_end(&mut raw)?;
        if raw.len() < 13 || &raw[..5] != CACHE_MAGIC {
            return Err(Error::InvalidCache("bad magic bytes".into()));
        }
        let limit = u64::from_le_bytes(raw[5..13].try_into().expect("8 bytes"));
        if !(2..=u32::MAX as u64).contains(&limit) {
            return Err(Error::InvalidCache(format!("implausible limit {limit}")));
        }
        let odd_count = limit.div_ceil(2);
        let words = odd_count.div_ceil(64) as usize;
        if raw.len() != 13 + 8 * words {
            return Err(Error::InvalidCache(format!(
                "expected {} payload words, file holds {} bytes",
                words,
                raw.len() - 13
            )));
        }
        let mut bits = Vec::with_capacity(words);
        for w in 0..words {
            let start = 13 + 8 * w;
            bits.push(u64::from_le_bytes(
                raw[start..start + 8].try_into().expect("8 bytes"),
            ));
        }
        // Bits past odd_count and the bit for 1 must be clear.
        if bits[0] & 1 != 0 {
            return Err(Error::InvalidCache("1 marked prime".into()));
        }
        if odd_count % 64 != 0 && bits[words - 1] >> (odd_count % 64) != 0 {
            return Err(Error::InvalidCache("stray bits past the limit".into()));
        }

        let mut primes = vec![2u64];
        for i in 0..odd_count {
            if bits[(i / 64) as usize] >> (i % 64) & 1 == 1 {
                primes.push(2 * i + 1);
            }
        }
        let mut spf = vec![0u32; limit as usize + 1];
        let mut m = 4u64;
        while m <= limit {
            spf[m as usize] = 2;
            m += 2;
        }
        for &p in primes.iter().skip(1) {
            if p.saturating_mul(p) > limit {
                break;
            }
            let mut m = p * p;
            while m <= limit {
                if spf[m as usize] == 0 {
                    spf[m as usize] = p as u32;
                }
                m += 2 * p;
            }
        }
        Ok(PrimeTable { limit, primes, spf })
    }
}
