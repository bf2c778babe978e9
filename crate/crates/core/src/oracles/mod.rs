//! Independent checks for every limit and extremum the library claims.
//!
//! * [`limits`]: finite-n path-space divergences and exponential integrals
//!   by log-domain recursion, reported against the claimed rates.
//! * [`search`]: seeded random search and hill climbing over feasible sets.
//! * [`generators`]: random distributions, stationary pair measures, matrices.
//!
//! Nothing here calls the closed-form solvers in `var_iid` or `var_markov`.

pub mod generators;
pub mod limits;
pub mod search;

pub use limits::{
    easyvar_finite_n_oracle, easyvar_oracle, rel_entropy_rate_oracle, renyi_rate_oracle, ConvergenceReport,
    LimitReport, Mode,
};
pub use search::{
    random_search_extremum, HillClimb, SearchProblem, SearchReport, HILL_CLIMB_SWEEPS, HILL_CLIMB_TOLERANCE,
    SEARCH_TOLERANCE,
};
