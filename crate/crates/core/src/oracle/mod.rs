//! Exact reference optimum, the min-cost assignment primitive, and the
//! solution verifier.

mod exact;
mod flow;
mod verify;

pub use exact::{exact_opt, ExactOptimum, EXACT_GUARD};
pub use flow::{min_cost_assignment, scaled_capacities, Assignment};
pub use verify::{verify_solution, Finding, VerifyReport};
