//! Equilibrium checks built only from the payoff function and its
//! first-order condition, without going through `alpha`.
//!
//! Against a fixed opponent total `S > 0`, the payoff `v x / (x + S) - c x`
//! is concave in `x` with stationary point `x = sqrt(v S / c) - S`.

use alloc::vec::Vec;

use crate::contest::{utility, ContestInstance};
use crate::error::{Error, Result};

/// Bid returned against an empty field, as a fraction of `v / c`.
pub const EMPTY_FIELD_BID: f64 = 1e-12;

/// Payoff-maximizing bid against opponents bidding `opponent_total` in sum:
/// `[sqrt(v S / c) - S]^+`.
///
/// Against `S = 0` any positive bid wins the whole prize and the supremum is
/// not attained; we return the small positive bid `1e-12 * v / c` instead.
pub fn best_response(valuation: f64, cost: f64, opponent_total: f64) -> f64 {
    if opponent_total <= 0.0 {
        return EMPTY_FIELD_BID * valuation / cost;
    }
    (libm::sqrt(valuation * opponent_total / cost) - opponent_total).max(0.0)
}

/// Sweeps without a halving of the residual before the step is damped further.
const STALL_SWEEPS: usize = 30;
const MIN_DAMPING: f64 = 1.0 / 64.0;
/// A Newton candidate must bring `max |gap| / total bid` below this.
const NEWTON_MAX_MERIT: f64 = 0.5;
const LINE_SEARCH_STEPS: usize = 40;

/// Round-robin best-response iteration.
///
/// Each sweep moves players in index order toward their best response to the
/// latest bids of everyone else. Plain best responses cycle on asymmetric
/// instances, so a move is scaled by `1 / (1 + |slope|)` where `slope` is the
/// derivative of the player's best response, a bid never drops below half its
/// value in one move, and the scale is halved (down to 1/64) whenever the
/// residual stalls. After every sweep a Newton step on `x - BR(x)` is tried and
/// kept only if it lowers the residual relative to the total bid.
///
/// Returns once `|best_response(v_i, c_i, S_-i) - x_i| <= tol` for every player.
pub fn br_fixed_point(
    instance: &ContestInstance,
    initial_bids: &[f64],
    tol: f64,
    max_iter: usize,
) -> Result<Vec<f64>> {
    let n = instance.len();
    if initial_bids.len() != n {
        return Err(Error::BidLengthMismatch {
            expected: n,
            found: initial_bids.len(),
        });
    }
    if let Some((i, &b)) = initial_bids
        .iter()
        .enumerate()
        .find(|(_, b)| !(b.is_finite() && **b > 0.0))
    {
        return Err(Error::InvalidBid {
            player: i,
            value: b,
        });
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument("tolerance must be positive"));
    }

    let mut bids = initial_bids.to_vec();
    let mut damping = 1.0;
    let mut best = f64::INFINITY;
    let mut stalled = 0;
    for _ in 0..max_iter {
        for i in 0..n {
            let others = others_total(&bids, i);
            let p = instance.players()[i];
            let target = best_response(p.valuation, p.cost, others);
            let step = damping / (1.0 + br_slope(p.valuation, p.cost, others).abs());
            bids[i] = (bids[i] + step * (target - bids[i])).max(0.5 * bids[i]);
            if target == 0.0 && bids[i] <= tol {
                bids[i] = 0.0;
            }
        }
        if residual(instance, &bids) <= tol {
            return Ok(bids);
        }
        if let Some(next) = newton_step(instance, &bids) {
            bids = next;
        }
        let r = residual(instance, &bids);
        if r <= tol {
            return Ok(bids);
        }
        if r < 0.5 * best {
            best = r;
            stalled = 0;
        } else {
            stalled += 1;
            if stalled > STALL_SWEEPS {
                damping = (0.5 * damping).max(MIN_DAMPING);
                best = r;
                stalled = 0;
            }
        }
    }
    Err(Error::NoConvergence {
        sweeps: max_iter,
        last: bids,
    })
}

fn others_total(bids: &[f64], i: usize) -> f64 {
    bids.iter()
        .enumerate()
        .filter(|&(j, _)| j != i)
        .map(|(_, &b)| b)
        .sum()
}

/// Derivative of the unclipped best response `sqrt(v S / c) - S` in `S`.
fn br_slope(valuation: f64, cost: f64, opponent_total: f64) -> f64 {
    if opponent_total > 0.0 {
        0.5 * libm::sqrt(valuation / (cost * opponent_total)) - 1.0
    } else {
        0.0
    }
}

/// `max_i |x_i - BR_i(S_-i)|`.
fn residual(instance: &ContestInstance, bids: &[f64]) -> f64 {
    instance
        .players()
        .iter()
        .enumerate()
        .fold(0.0, |acc: f64, (i, p)| {
            let target = best_response(p.valuation, p.cost, others_total(bids, i));
            acc.max((bids[i] - target).abs())
        })
}

/// Best of two Newton candidates: one linearizes the clipped best responses as
/// they stand, the other treats every player as active so that a player just
/// past the participation threshold can be pulled back in.
fn newton_step(instance: &ContestInstance, bids: &[f64]) -> Option<Vec<f64>> {
    let total: f64 = bids.iter().sum();
    let merit = residual(instance, bids) / total;
    let mut chosen: Option<(f64, Vec<f64>)> = None;
    for all_active in [false, true] {
        let Some(dir) = newton_direction(instance, bids, all_active) else {
            continue;
        };
        let mut t = 1.0;
        for _ in 0..LINE_SEARCH_STEPS {
            let trial: Vec<f64> = bids
                .iter()
                .zip(&dir)
                .map(|(x, d)| (x + t * d).max(0.0))
                .collect();
            let trial_total: f64 = trial.iter().sum();
            if trial_total > 0.0 {
                let m = residual(instance, &trial) / trial_total;
                if m < (merit * (1.0 - 1e-4 * t)).min(NEWTON_MAX_MERIT) {
                    if chosen.as_ref().is_none_or(|(best, _)| m < *best) {
                        chosen = Some((m, trial));
                    }
                    break;
                }
            }
            t *= 0.5;
        }
    }
    chosen.map(|(_, x)| x)
}

/// Solves `J d = -(x - BR(x))` with `J = I - B`, where row `i` of `B` holds the
/// best-response slope `s_i` off the diagonal. Then `J = D - s 1^T` with
/// `D = diag(1 + s_i)`, which Sherman-Morrison inverts directly.
fn newton_direction(
    instance: &ContestInstance,
    bids: &[f64],
    all_active: bool,
) -> Option<Vec<f64>> {
    let n = bids.len();
    let mut gap = Vec::with_capacity(n);
    let mut slope = Vec::with_capacity(n);
    for (i, p) in instance.players().iter().enumerate() {
        let others = others_total(bids, i);
        let target = best_response(p.valuation, p.cost, others);
        if all_active && others > 0.0 {
            let unclipped = libm::sqrt(p.valuation * others / p.cost) - others;
            gap.push(bids[i] - unclipped);
            slope.push(br_slope(p.valuation, p.cost, others));
        } else {
            gap.push(bids[i] - target);
            slope.push(if target > 0.0 {
                br_slope(p.valuation, p.cost, others)
            } else {
                0.0
            });
        }
    }
    let mut d_inv_b = Vec::with_capacity(n);
    let mut d_inv_s = Vec::with_capacity(n);
    for i in 0..n {
        let diag = 1.0 + slope[i];
        if !(diag.abs() > 1e-300) {
            return None;
        }
        d_inv_b.push(-gap[i] / diag);
        d_inv_s.push(slope[i] / diag);
    }
    let denom = 1.0 - d_inv_s.iter().sum::<f64>();
    if !(denom.abs() > 1e-300) {
        return None;
    }
    let scale = d_inv_b.iter().sum::<f64>() / denom;
    let dir: Vec<f64> = d_inv_b
        .iter()
        .zip(&d_inv_s)
        .map(|(b, s)| b + s * scale)
        .collect();
    dir.iter().all(|d| d.is_finite()).then_some(dir)
}

/// Outcome of a unilateral-deviation check.
#[derive(Debug, Clone, PartialEq)]
pub struct NashReport {
    /// Largest payoff improvement any single player can get by deviating.
    pub max_deviation_gain: f64,
    pub per_player_gain: Vec<f64>,
    pub tolerance: f64,
    /// `max_deviation_gain <= tolerance`.
    pub is_nash: bool,
}

/// Measures, for each player, how much switching to a best response against
/// the others' bids would raise that player's payoff.
pub fn verify_nash(instance: &ContestInstance, bids: &[f64], tol: f64) -> Result<NashReport> {
    let n = instance.len();
    // Validates length, sign and the all-zero profile.
    utility(instance, bids, 0)?;

    let mut per_player_gain = Vec::with_capacity(n);
    let mut deviated = bids.to_vec();
    for i in 0..n {
        let p = instance.players()[i];
        let others: f64 = bids
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, &b)| b)
            .sum();
        let current = utility(instance, bids, i)?;
        deviated[i] = best_response(p.valuation, p.cost, others);
        let best = utility(instance, &deviated, i)?;
        deviated[i] = bids[i];
        per_player_gain.push(best - current);
    }
    let max_deviation_gain = per_player_gain
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(NashReport {
        max_deviation_gain,
        per_player_gain,
        tolerance: tol,
        is_nash: max_deviation_gain <= tol,
    })
}
