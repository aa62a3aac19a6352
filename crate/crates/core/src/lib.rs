//! One-dimensional cutting stock with divisible items.
//!
//! Every demanded item may be cut as a whole, or split into two pieces that
//! land in different stocks and are welded back together afterwards. A plan
//! is scored by the weighted sum of counted trim loss and weld count.
//!
//! The crate is organised as:
//!
//! * [`model`]: instances, parameters, plans, the feasibility checker and
//!   plan statistics.
//! * [`dp`]: the subset-sum dynamic programming heuristic.
//! * [`oracle`]: exhaustive exact solvers for desk-scale instances.
//! * [`io`]: text formats for instances and plans, plus a seeded generator.
//! * [`cli`]: the `divcut` command line front-end.

pub mod cli;
pub mod dp;
pub mod io;
pub mod model;
pub mod oracle;

pub use dp::{solve_heuristic, solve_heuristic_with, DivisionMode, HeuristicError};
pub use model::{
    check_plan_feasibility, compute_stats, plan_cost, validate_instance, CuttingPlan, Division,
    Instance, Item, ItemId, Params, PlacedResidual, PlanStats, RawInstance, StockPattern,
    Violation,
};
pub use oracle::{exact_solve_classical, exact_solve_divisible, OracleError, OracleLimits};
