//! Test support: fixture loading, seeded generators and brute-force oracles.
//!
//! Oracles here deliberately avoid the library's own algorithms: they work
//! from the raw relation list, use quadratic or exhaustive searches, and
//! decide geometry in arbitrary-precision rationals.

pub mod fixtures;
pub mod gen;
pub mod oracle;
