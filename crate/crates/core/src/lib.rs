//! Privacy-mechanism toolkit for transaction graphs and mixing services.
//!
//! Two halves:
//!
//! * [`merge_avoidance`]: splitting a transaction into as few single-input
//!   transfers as possible. The single-target variant is solved greedily; the
//!   multi-target variant is NP-hard and solved exactly by branch and bound on
//!   small instances, with a partition-problem reduction for cross-checking.
//! * [`mixing_scheme`] and [`econ_sim`]: reward-and-tax schemes for
//!   concealment routes, exact checks of their resistance to Sybil edge
//!   insertion, and a ledger simulation of the resulting credit supply.
//!
//! All money is exact rational arithmetic ([`domain::Amount`]).

pub mod cli;
pub mod domain;
pub mod econ_sim;
pub mod error;
pub mod merge_avoidance;
pub mod mixing_scheme;

pub use error::{Error, Result};
