//! Exact counting of ordered balls-into-bins configurations.
//!
//! The central quantities are
//!
//! * `B(n, k)`: compositions of `n` (any number of parts) whose largest part is exactly `k`;
//! * `M(n, l, k)`: compositions of `n` into exactly `l` parts whose largest part is exactly `k`;
//! * `R(n, l, k)`: weak compositions of `n` into `l` parts, each part at most `k`;
//! * `K(n, l)` and `N(l, k)`: the sums of `M` over `k` and over `n` respectively.
//!
//! Every formula is checked against the brute-force enumerators in [`oracle`].

pub mod bounds;
pub mod cli;
pub mod closed_forms;
pub mod combinatorics;
mod error;
pub mod generalized;
pub mod oracle;
pub mod verify;

pub use error::{Error, Result};

/// Arbitrary-precision nonnegative count.
pub type Count = num_bigint::BigUint;
