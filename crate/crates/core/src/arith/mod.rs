//! Exact integer arithmetic: sieving, quadratic symbols, Möbius and
//! squarefree parts, and the exponent-parity split of prime-tuple products.

pub mod factor;
pub mod sieve;
pub mod symbol;

pub use factor::{
    factorize, gcd, is_squarefree, mobius, parity_decompose, radical, squarefree_part,
    ParityDecomposition,
};
pub use sieve::{isqrt, sieve_primes, sieve_primes_segmented, PrimeTable};
pub use symbol::{associated_discriminant, jacobi, kronecker, quadratic_character};
