//! Game-theoretic solver for the infinity Laplacian with mixed
//! Dirichlet/Neumann boundary conditions.
//!
//! The token-moving game runs on a bounded convex domain whose boundary
//! splits into an absorbing part (value zero) and a payoff part carrying a
//! positive Lipschitz function `g`. Each turn a fair coin picks the player
//! who moves the token within an eps-ball; running payoff `eps*g/2`
//! accrues in an eps-strip near the payoff boundary and a small interior
//! term elsewhere. The expected total payoff solves the fixed-point
//! equation `u = (sup u + inf u)/2 + f` over the ball, and as `eps -> 0`
//! the values approach a solution of the Neumann problem for the
//! 1-homogeneous infinity Laplacian.
//!
//! The crate provides:
//!
//! - [`geometry`]: domains (interval, convex polygon, disk), boundary
//!   labeling, normals, distances, transversality estimates;
//! - [`dpp`]: grids, running payoffs, and the fixed-point solver;
//! - [`oracle1d`]: exact 1-D cell values used as oracles;
//! - [`game`]: Monte Carlo episode simulation under pluggable strategies;
//! - [`analysis`]: barrier supersolution scans, Lipschitz/modulus
//!   estimates, operator residuals, and eps-convergence studies;
//! - [`config`] and [`commands`]: the batch experiment front end backing
//!   the `tow` binary.
//!
//! See the `examples/` directory for one runnable program per capability.

// Parameter guards of the form `!(x > 0.0)` also reject NaN; the negated
// comparison is intentional.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod commands;
pub mod config;
pub mod dpp;
pub mod error;
pub mod game;
pub mod geometry;
pub mod oracle1d;

pub use dpp::{
    build_grid, dpp_operator, solve_dpp, GField, Grid, GridMode, PayoffVariant, RunningPayoff,
    ValueFunction,
};
pub use error::{Error, Result};
pub use game::{estimate_value, play_episode, GameTrace, McEstimate, Player, Strategy};
pub use geometry::{BoundaryLabel, BoundaryPoint, DiskArc, Domain, Point};
pub use oracle1d::{check_recurrences, limit_gap, oracle_values, Oracle1DParams, Variant1D};
