//! Grid sampling and the checks every construction is certified with.

mod checks;
mod grid;
mod report;

pub use checks::{
    flat_order_along, germ_compare, jacobi_residual, jacobi_residual_with, poly_schouten, rank_map,
    rank_map_with, support_check, worst_of, BivectorTape, RankMap, GERM_TOL, JACOBI_TOL,
};
pub use grid::{contains, GridSpec, Sampling, T_MAX};
pub use report::{table, VerificationReport};
