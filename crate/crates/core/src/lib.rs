//! Equilibrium computation and valuation design for multi-player Tullock
//! contests.
//!
//! Player `i` bids `x_i >= 0` and earns `v_i * x_i / sum(x) - c_i * x_i`.
//! The crate provides:
//!
//! * [`contest`]: the pure-strategy Nash equilibrium in closed form, via the
//!   total-bid parameter `alpha` found by a sort-and-scan over relative costs
//!   `w_i = c_i / v_i` (with a bisection path for cross-checking).
//! * [`oracle`]: best responses, damped round-robin best-response iteration and a
//!   Nash deviation check, all independent of the closed form.
//! * [`design`]: a coordinator that owns a coalition of players and chooses
//!   the valuations reported to them, subject to the coalition's payments
//!   summing to the coordinator's prize value at equilibrium.
//!
//! Everything is `no_std` with `alloc`; all functions are pure.
#![no_std]
#![forbid(unsafe_code)]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod contest;
pub mod design;
mod error;
pub mod oracle;
pub mod root;

pub use contest::{
    coordinator_utility, equilibrium, solve_alpha, solve_alpha_bisection, three_player_equilibrium,
    utility, AlphaSolution, ContestInstance, Equilibrium, Player,
};
pub use design::{
    design_general, design_three_player, feasibility_residual, interior_three_player, linear_grid,
    solve_feasible_companion, subordinate_excluded_three_player, sweep, CoordinatorInstance,
    DesignResult, Regime, SweepPoint, SweepRow,
};
pub use error::{Error, Result};
pub use oracle::{best_response, br_fixed_point, verify_nash, NashReport};
