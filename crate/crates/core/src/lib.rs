//! Multiplicities in the cohomology of Frobenius kernels of `SL_2`.
//!
//! The central quantity is `N_r(p, m, n)`: the number of tuples
//! `(a_1..a_r, b_1..b_r)` with `a_i >= 0`, `b_i in {0, 1}` solving
//!
//! ```text
//! m + 2 b_1 + 2p (a_1 + b_2) + ... + 2p^(r-1) (a_(r-1) + b_r) + 2p^r a_r = n p^r
//! ```
//!
//! (`p` odd; for `p = 2` the b-variables disappear). From these counts the
//! crate assembles weight characters of `H(B_r, mω)` and `H(G_r, H⁰(mω))`,
//! degree-wise decompositions, the Poincaré series of `H(U_r, k)`, the
//! quantum analogs `N'_r(p, n)`, and the free basis / Hilbert series of the
//! reduced `B_r`-cohomology ring.
//!
//! Every counting routine has a brute-force counterpart in [`oracle`].

pub mod bench;
pub mod characters;
pub mod counting;
mod decimal;
mod error;
pub mod oracle;
mod params;
pub mod reduced_ring;

pub use error::{Error, Result};
pub use num_bigint::BigUint;
pub use params::{is_prime, CountParams};

/// An exact, nonnegative count.
pub type CountValue = BigUint;
