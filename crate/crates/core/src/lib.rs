//! Search for rational approximations `a/b²` of a real `xi` with
//! `|xi - a/b²| < c/b³`, combining a brute-force scan for small `b` with
//! modular quadratic congruences on continued-fraction convergents.
//! A companion search finds approximations `a/p` with `p` prime.

pub mod cf;
pub mod error;
pub mod modular;
pub mod primes;
pub mod realnum;
pub mod report;
pub mod search;
mod serde_str;

pub use error::{Error, Result};
