//! LP-rounding bi-factor approximations for hard capacitated k-median and
//! k-facility location.
//!
//! The pipelines all start from an optimal basic solution of the Ck-FL
//! relaxation ([`lp::solve_ckfl`]), cluster facilities into bundles around
//! far-apart clients ([`bundling`]), and then round:
//!
//! * [`nonuniform::solve_ckm_nonuniform`]: non-uniform capacities, capacity
//!   violation at most 3 + 3ε.
//! * [`uniform::solve_kfl_match6`]: uniform capacities with opening costs,
//!   violation at most 6.
//! * [`uniform::solve_kfl_group`]: uniform capacities, violation at most
//!   2 + 3/(ℓ − 1).
//!
//! Every bound is checked in exact rational arithmetic.

pub mod bounds;
pub mod bundling;
pub mod depround;
pub mod error;
pub mod instance;
pub mod lp;
pub mod nonuniform;
pub mod oracle;
pub mod rational;
pub mod uniform;

pub use error::{Error, Result};
pub use instance::{
    eval_solution, gen_instance, gen_random, gen_ring, load_instance, save_instance, CapacityMode, CostMode, Instance, IntegralSolution, Layout,
    SolutionStats,
};
pub use lp::{FractionalSolution, StarOpening};
pub use rational::Rational;
pub use bounds::BoundCheck;
pub use bundling::{prepare, Prepared, BundleSet, StarInstance, TransportPlan};
