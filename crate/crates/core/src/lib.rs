//! Promise constraint satisfaction toolkit: partial assignment systems and
//! solution extraction from them, polymorphism minions, label cover and the
//! long-code reductions, each backed by a brute-force oracle.

pub mod csp;
pub mod error;
pub mod format;
pub mod labelcover;
pub mod minion;
pub mod pas;
pub mod reduction;
pub mod report;
pub mod subset;

pub use error::{Error, Result};

/// Gap parameters in exact arithmetic.
pub type GapParams = pas::GapParameters<num_bigint::BigUint>;
/// Gap parameters in 64-bit arithmetic, for small value sequences.
pub type GapParamsU64 = pas::GapParameters<u64>;
