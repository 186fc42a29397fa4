//! Integer partitions and the supernorm map onto prime factorizations.
//!
//! The crate provides exact partition arithmetic (`partition`), a prime
//! sieve with the classical arithmetic functions (`primes`), the supernorm
//! bijection and the integer bijections it induces (`bijections`),
//! closed-form identities for partition statistics (`formulas`), sweep
//! verifiers for the supernorm bounds (`bounds`), arithmetic-density series
//! machinery (`density`), and a divisor-count model of prime gaps (`gaps`).

pub mod bijections;
pub mod bounds;
pub mod density;
pub mod error;
pub mod formulas;
pub mod gaps;
pub mod partition;
pub mod primes;

pub use error::{Error, Result};
pub use partition::{partitions_of_norm, partitions_of_size, Constraints, Partition};
pub use primes::{FactoredInteger, PrimeTable};
