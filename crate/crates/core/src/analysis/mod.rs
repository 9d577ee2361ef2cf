//! Counting, Poincaré series and independent reference computations.

mod bound;
mod closed_form;
mod oracle;
mod poincare;

pub use bound::{bound_check, BoundBranch, BoundReport};
pub use closed_form::binomial_closed_form;
pub use oracle::{oracle_counts, oracle_counts_region, OracleResult};
pub use poincare::{poincare_from_zeta, PoincareSeries};
