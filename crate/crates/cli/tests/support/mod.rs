//! Brute-force valuation search, independent of the design solvers: no
//! square-root structure, no scan over a proportionality constant.
//!
//! Candidate valuation vectors are pulled onto the balanced set along the
//! ray through the origin. Scaling the reports by `s` between
//! `v_K / max(v)` and `v_K / min(v)` moves every report from at most `v_K` to
//! at least `v_K`, so the payment imbalance changes sign on that interval and
//! bisection finds a balanced point. Coordinate descent with a shrinking step
//! then explores directions from many random starts.

#![allow(dead_code)]

use rand::Rng;
use tullock_core::{coordinator_utility, equilibrium, feasibility_residual, CoordinatorInstance};

pub const STARTS: usize = 100;
pub const MIN_STEP: f64 = 1e-7;

#[derive(Debug, Clone)]
pub struct BruteForce {
    pub utility: f64,
    pub valuations: Vec<f64>,
    pub residual: f64,
}

pub fn utility_at(coord: &CoordinatorInstance, valuations: &[f64]) -> f64 {
    let game = coord.contest(valuations).unwrap();
    let eq = equilibrium(&game);
    coordinator_utility(
        &game,
        &coord.coalition(),
        coord.coordinator_valuation(),
        &eq.bids,
    )
    .unwrap()
}

/// The balanced point on the ray through `direction` and its payoff.
pub fn project(coord: &CoordinatorInstance, direction: &[f64]) -> BruteForce {
    let v_k = coord.coordinator_valuation();
    let max = direction.iter().copied().fold(0.0, f64::max);
    let min = direction.iter().copied().fold(f64::INFINITY, f64::min);
    let scaled = |s: f64| direction.iter().map(|&d| s * d).collect::<Vec<f64>>();
    let residual = |s: f64| feasibility_residual(coord, &scaled(s)).unwrap();

    let (mut lo, mut hi) = (v_k / max, v_k / min);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if !(mid > lo && mid < hi) {
            break;
        }
        if residual(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let s = if residual(lo).abs() <= residual(hi).abs() {
        lo
    } else {
        hi
    };
    let valuations = scaled(s);
    BruteForce {
        utility: utility_at(coord, &valuations),
        residual: residual(s),
        valuations,
    }
}

pub fn brute_force_design<R: Rng>(
    coord: &CoordinatorInstance,
    rng: &mut R,
    starts: usize,
) -> BruteForce {
    let v_k = coord.coordinator_valuation();
    let k = coord.subordinate_costs().len();
    let mut best: Option<BruteForce> = None;
    for _ in 0..starts {
        let start: Vec<f64> = (0..k).map(|_| rng.gen_range(1e-9..=5.0 * v_k)).collect();
        let mut current = project(coord, &start);
        let mut step = v_k;
        while step >= MIN_STEP {
            let mut improved = false;
            for i in 0..k {
                for sign in [1.0, -1.0] {
                    let mut trial = current.valuations.clone();
                    trial[i] += sign * step;
                    if trial[i] <= 0.0 {
                        continue;
                    }
                    let candidate = project(coord, &trial);
                    if candidate.utility > current.utility {
                        current = candidate;
                        improved = true;
                    }
                }
            }
            if !improved {
                step *= 0.5;
            }
        }
        if best.as_ref().is_none_or(|b| current.utility > b.utility) {
            best = Some(current);
        }
    }
    best.expect("at least one start")
}
