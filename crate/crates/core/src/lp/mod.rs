//! The Ck-FL relaxation and the per-star LP.

mod ckfl;
mod dump;
mod scalar;
pub mod simplex;
mod star;

pub use ckfl::{build_ckfl_lp, solve_ckfl, x_var, y_var, FractionalSolution};
pub use dump::to_lp_format;
pub use scalar::Scalar;
pub use star::{
    build_star_lp, nearest_first_shares, star_almost_integral, star_extreme_point, star_from_lp_opening,
    star_initial_solution, StarOpening,
};
