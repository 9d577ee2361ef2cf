//! Exact computation of Igusa local zeta functions of semiquasihomogeneous
//! polynomials over `Q_p` and `F_p((π))`.
//!
//! The zeta function is produced as a rational function of `t = p^{-s}` by
//! repeated application of the stationary phase formula along a tree of
//! dilatations, and checked against brute-force congruence counts through the
//! Poincaré series.

pub mod analysis;
pub mod cli;
pub mod coeff;
pub mod error;
pub mod neron;
pub mod poly;
pub mod ratfun;
pub mod region;
pub mod spf;
pub mod sqh;

pub use error::{Error, Result};
