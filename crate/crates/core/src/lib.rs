//! Minimum-cost flow solvers.
//!
//! Seven algorithm families share one network type and one report shape:
//! simple, minimum-mean and cancel-and-tighten cycle canceling, successive
//! shortest paths, capacity scaling, cost scaling (push-relabel, augment-relabel
//! and partial augment-relabel) and primal network simplex with five pivot rules.
//!
//! ```
//! use mcf_core::{solve, Algorithm, NetworkBuilder};
//!
//! let net = NetworkBuilder::new(3)
//!     .supply(0, 2)
//!     .supply(2, -2)
//!     .arc(0, 1, 2, 1)
//!     .arc(1, 2, 1, 1)
//!     .arc(0, 2, 2, 3)
//!     .build()
//!     .unwrap();
//! let sol = solve(&net, &Algorithm::Ns(Default::default()), None).unwrap();
//! assert_eq!(sol.report.objective, Some(5));
//! ```

pub mod aug_path;
pub mod cost_scaling;
pub mod cycle_cancel;
pub mod error;
pub mod io;
pub mod minmean;
pub mod network;
pub mod residual;
pub mod simplex;
pub mod solver;
pub mod verify;

mod bellman;
mod heap;
mod maxflow;

pub use error::{McfError, Result};
pub use network::{FlowState, Network, NetworkBuilder};
pub use solver::{
    run, solve, Algorithm, CasParams, CosParams, CosVariant, Heuristics, NsParams, PivotRule, Solution, SolverReport,
    Status,
};
