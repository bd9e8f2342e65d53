//! Valuation design for a coordinator that owns a coalition of players.
//!
//! The coordinator values the prize at `v_K` and earns
//! `v_K * sum_{i in K} x_i / sum_j x_j`. It cannot set bids, only the
//! valuations `v_i` reported to its subordinates, and the redistribution is
//! valid when the subordinates' payments balance at equilibrium:
//! `sum_{i in K} v_i x_i* = v_K * sum_{i in K} x_i*`.
//!
//! Optimal reports are proportional to `sqrt(c_i)`, so the general solver
//! searches the single parameter `beta` in `v_i = beta * sqrt(c_i)` for roots
//! of the balance condition and keeps the best one.

use alloc::vec::Vec;

use crate::contest::{self, ContestInstance, Equilibrium, Player};
use crate::error::{Error, Result};
use crate::root;

/// Points in the `beta` scan.
pub const BETA_GRID_POINTS: usize = 4096;
/// Times the `beta` scan's upper end may be doubled.
pub const MAX_RANGE_EXPANSIONS: usize = 4;
/// Absolute bisection tolerance on `beta`.
pub const BETA_TOL: f64 = 1e-11;
/// Points in the companion-valuation scan.
pub const COMPANION_GRID_POINTS: usize = 2048;

/// Opponents with fixed valuations, plus subordinates whose valuations are
/// the coordinator's design variables.
///
/// The induced contest lists opponents first (indices `0..m`) and then the
/// subordinates in the order given.
#[derive(Debug, Clone, PartialEq)]
pub struct CoordinatorInstance {
    opponents: Vec<Player>,
    subordinate_costs: Vec<f64>,
    coordinator_valuation: f64,
}

impl CoordinatorInstance {
    pub fn new(
        opponents: Vec<Player>,
        subordinate_costs: Vec<f64>,
        coordinator_valuation: f64,
    ) -> Result<Self> {
        if opponents.is_empty() {
            return Err(Error::WrongShape(
                "the coordinator needs at least one opponent",
            ));
        }
        if subordinate_costs.is_empty() {
            return Err(Error::WrongShape(
                "the coordinator needs at least one subordinate",
            ));
        }
        for (i, p) in opponents.iter().enumerate() {
            if !(p.valuation.is_finite() && p.valuation > 0.0) {
                return Err(Error::NonPositiveValuation {
                    player: i,
                    value: p.valuation,
                });
            }
            if !(p.cost.is_finite() && p.cost > 0.0) {
                return Err(Error::NonPositiveCost {
                    player: i,
                    value: p.cost,
                });
            }
        }
        for (j, &c) in subordinate_costs.iter().enumerate() {
            if !(c.is_finite() && c > 0.0) {
                return Err(Error::NonPositiveCost {
                    player: opponents.len() + j,
                    value: c,
                });
            }
        }
        if !(coordinator_valuation.is_finite() && coordinator_valuation > 0.0) {
            return Err(Error::InvalidArgument(
                "coordinator valuation must be positive",
            ));
        }
        Ok(CoordinatorInstance {
            opponents,
            subordinate_costs,
            coordinator_valuation,
        })
    }

    pub fn opponents(&self) -> &[Player] {
        &self.opponents
    }

    pub fn subordinate_costs(&self) -> &[f64] {
        &self.subordinate_costs
    }

    pub fn coordinator_valuation(&self) -> f64 {
        self.coordinator_valuation
    }

    /// Indices of the subordinates in the induced contest.
    pub fn coalition(&self) -> Vec<usize> {
        (self.opponents.len()..self.opponents.len() + self.subordinate_costs.len()).collect()
    }

    /// The contest played when the subordinates are told `valuations`.
    pub fn contest(&self, valuations: &[f64]) -> Result<ContestInstance> {
        if valuations.len() != self.subordinate_costs.len() {
            return Err(Error::BidLengthMismatch {
                expected: self.subordinate_costs.len(),
                found: valuations.len(),
            });
        }
        let mut players = self.opponents.clone();
        players.extend(
            valuations
                .iter()
                .zip(&self.subordinate_costs)
                .map(|(&valuation, &cost)| Player { valuation, cost }),
        );
        ContestInstance::new(players)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Regime {
    /// Every opponent abstains and the coordinator takes the whole prize.
    OpponentExcluded,
    /// Opponents bid but some subordinate abstains.
    SubordinateExcluded,
    Interior,
}

impl Regime {
    pub fn as_str(self) -> &'static str {
        match self {
            Regime::OpponentExcluded => "opponent-excluded",
            Regime::SubordinateExcluded => "subordinate-excluded",
            Regime::Interior => "interior",
        }
    }
}

impl core::fmt::Display for Regime {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DesignResult {
    /// Reported valuations, in subordinate order.
    pub valuations: Vec<f64>,
    /// Proportionality constant: `valuations[i] = beta * sqrt(c_i)`.
    pub beta: f64,
    /// Equilibrium total bid under the reported valuations.
    pub alpha: f64,
    pub coordinator_utility: f64,
    pub regime: Regime,
    /// Payment imbalance at the induced equilibrium; zero for a valid design.
    pub feasibility_residual: f64,
}

/// The induced equilibrium and the quantities the design solvers need.
struct Induced {
    equilibrium: Equilibrium,
    residual: f64,
    utility: f64,
    subordinates_active: bool,
    all_subordinates_active: bool,
    opponents_inactive: bool,
}

impl Induced {
    fn regime(&self) -> Regime {
        if self.opponents_inactive {
            Regime::OpponentExcluded
        } else if !self.all_subordinates_active {
            Regime::SubordinateExcluded
        } else {
            Regime::Interior
        }
    }
}

fn induce(coord: &CoordinatorInstance, valuations: &[f64]) -> Result<Induced> {
    let game = coord.contest(valuations)?;
    let equilibrium = contest::equilibrium(&game);
    let m = coord.opponents.len();
    let sub_bids = &equilibrium.bids[m..];
    let residual = valuations
        .iter()
        .zip(sub_bids)
        .map(|(&v, &x)| (v - coord.coordinator_valuation) * x)
        .sum();
    let utility = contest::coordinator_utility(
        &game,
        &coord.coalition(),
        coord.coordinator_valuation,
        &equilibrium.bids,
    )?;
    Ok(Induced {
        residual,
        utility,
        subordinates_active: sub_bids.iter().any(|&x| x > 0.0),
        all_subordinates_active: sub_bids.iter().all(|&x| x > 0.0),
        opponents_inactive: equilibrium.bids[..m].iter().all(|&x| x == 0.0),
        equilibrium,
    })
}

/// Payment imbalance `sum_{i in K} v_i x_i* - v_K sum_{i in K} x_i*` at the
/// equilibrium induced by the reported `valuations`.
pub fn feasibility_residual(coord: &CoordinatorInstance, valuations: &[f64]) -> Result<f64> {
    Ok(induce(coord, valuations)?.residual)
}

fn result_from(
    coord: &CoordinatorInstance,
    beta: f64,
    utility: Option<f64>,
) -> Result<DesignResult> {
    let valuations: Vec<f64> = coord
        .subordinate_costs
        .iter()
        .map(|&c| beta * libm::sqrt(c))
        .collect();
    let induced = induce(coord, &valuations)?;
    Ok(DesignResult {
        regime: induced.regime(),
        alpha: induced.equilibrium.alpha(),
        coordinator_utility: utility.unwrap_or(induced.utility),
        feasibility_residual: induced.residual,
        valuations,
        beta,
    })
}

/// Closed-form optimum for one opponent against two subordinates.
///
/// With `w_1 = c_1 / v_1` and `s_i = sqrt(c_i)`:
///
/// - `v_K w_1 >= 2 s_2 s_3`: the subordinates can shut the opponent out and
///   the coordinator collects `v_K`. Every balanced report with
///   `c_2/v_2 + c_3/v_3 <= w_1` is optimal there; we return the one on the
///   `sqrt(c)` ray, `beta = v_K (s_2 + s_3) / (2 s_2 s_3)`.
/// - `v_K w_1 <= s_min (s_max - s_min)`: the opponent is so weak relative to
///   the cost gap that the costlier subordinate cannot be kept in a balanced
///   design. The cheaper one reports `v_K`, the other abstains, and the
///   coordinator earns `v_K w_1 / (w_1 + c_min / v_K)`.
/// - Otherwise both subordinates bid,
///   `beta = (2 v_K w_1 + (s_2 - s_3)^2) / (w_1 (s_2 + s_3))` and the
///   coordinator earns `v_K (2 v_K w_1 + (s_2 - s_3)^2) / (v_K w_1 + c_2 + c_3)`.
pub fn design_three_player(coord: &CoordinatorInstance) -> Result<DesignResult> {
    if coord.opponents.len() != 1 || coord.subordinate_costs.len() != 2 {
        return Err(Error::WrongShape(
            "closed-form design needs one opponent and two subordinates",
        ));
    }
    let v_k = coord.coordinator_valuation;
    let w1 = coord.opponents[0].relative_cost();
    let (c2, c3) = (coord.subordinate_costs[0], coord.subordinate_costs[1]);
    let (s2, s3) = (libm::sqrt(c2), libm::sqrt(c3));
    let (s_min, s_max) = (s2.min(s3), s2.max(s3));

    let (beta, utility, regime) = if v_k * w1 >= 2.0 * s2 * s3 {
        (
            v_k * (s2 + s3) / (2.0 * s2 * s3),
            v_k,
            Regime::OpponentExcluded,
        )
    } else if v_k * w1 <= s_min * (s_max - s_min) {
        let (beta, utility) = subordinate_excluded_three_player(v_k, w1, c2, c3);
        (beta, utility, Regime::SubordinateExcluded)
    } else {
        let (beta, utility) = interior_three_player(v_k, w1, c2, c3);
        (beta, utility, Regime::Interior)
    };
    let mut result = result_from(coord, beta, Some(utility))?;
    result.regime = regime;
    Ok(result)
}

/// The branch of [`design_three_player`] where the costlier subordinate
/// abstains, as `(beta, utility)`, evaluated without checking which regime
/// applies.
pub fn subordinate_excluded_three_player(v_k: f64, w1: f64, c2: f64, c3: f64) -> (f64, f64) {
    let c_min = c2.min(c3);
    (v_k / libm::sqrt(c_min), v_k * w1 / (w1 + c_min / v_k))
}

/// The interior branch of [`design_three_player`] as `(beta, utility)`,
/// evaluated without checking which regime applies.
pub fn interior_three_player(v_k: f64, w1: f64, c2: f64, c3: f64) -> (f64, f64) {
    let (s2, s3) = (libm::sqrt(c2), libm::sqrt(c3));
    let spread = (s2 - s3) * (s2 - s3);
    let numerator = 2.0 * v_k * w1 + spread;
    let beta = numerator / (w1 * (s2 + s3));
    let utility = v_k * numerator / (v_k * w1 + c2 + c3);
    (beta, utility)
}

struct BetaProbe {
    beta: f64,
    g: f64,
    subordinates_active: bool,
    opponents_inactive: bool,
}

fn probe_beta(coord: &CoordinatorInstance, sqrt_c: &[f64], beta: f64) -> Result<BetaProbe> {
    let valuations: Vec<f64> = sqrt_c.iter().map(|&s| beta * s).collect();
    let game = coord.contest(&valuations)?;
    let sol = contest::solve_alpha(&game);
    let alpha = sol.alpha;
    let v_k = coord.coordinator_valuation;
    let m = coord.opponents.len();
    // sum_{k in K} (beta sqrt(c_k) - v_K) [beta - alpha sqrt(c_k)]^+, restricted
    // to the active set so that abstainers contribute exactly zero.
    let mut g = 0.0;
    let mut subordinates_active = false;
    let mut opponents_inactive = true;
    for &i in sol.active_players() {
        if i < m {
            opponents_inactive = false;
        } else {
            let s = sqrt_c[i - m];
            subordinates_active = true;
            g += (beta * s - v_k) * (beta - alpha * s).max(0.0);
        }
    }
    Ok(BetaProbe {
        beta,
        g,
        subordinates_active,
        opponents_inactive,
    })
}

/// General solver over `v_i = beta * sqrt(c_i)`.
///
/// Scans `beta` on a geometric grid, brackets every sign change of the
/// balance condition among grid points where some subordinate is active,
/// polishes each by bisection and returns the root with the highest
/// coordinator payoff (the smallest `beta` on ties). A run of grid points
/// where the condition vanishes with all opponents out is reported as an
/// opponent-excluded optimum. The grid's upper end is doubled while the
/// condition has not yet turned positive there.
pub fn design_general(coord: &CoordinatorInstance) -> Result<DesignResult> {
    let v_k = coord.coordinator_valuation;
    let sqrt_c: Vec<f64> = coord
        .subordinate_costs
        .iter()
        .map(|&c| libm::sqrt(c))
        .collect();
    let max_s = sqrt_c.iter().copied().fold(0.0, f64::max);
    let min_s = sqrt_c.iter().copied().fold(f64::INFINITY, f64::min);
    let lo = 1e-6 * v_k;
    let mut hi = 10.0 * v_k * max_s / min_s;

    let mut roots: Vec<f64> = Vec::new();
    let mut continuum: Option<f64> = None;
    for expansion in 0..=MAX_RANGE_EXPANSIONS {
        roots.clear();
        continuum = None;
        let probes = root::geometric_grid(lo, hi, BETA_GRID_POINTS)
            .map(|b| probe_beta(coord, &sqrt_c, b))
            .collect::<Result<Vec<_>>>()?;

        let mut run_start: Option<usize> = None;
        let mut touches_boundary = false;
        for (i, p) in probes.iter().enumerate() {
            let flat = p.subordinates_active
                && p.opponents_inactive
                && p.g.abs() <= 1e-13 * p.beta * (p.beta * max_s + v_k);
            match (flat, run_start) {
                (true, None) => run_start = Some(i),
                (false, Some(s)) => {
                    if i - s >= 2 && continuum.is_none() {
                        continuum = Some(probes[s].beta);
                    }
                    run_start = None;
                }
                _ => {}
            }
            if p.subordinates_active && p.g == 0.0 {
                roots.push(p.beta);
                continue;
            }
            let Some(next) = probes.get(i + 1) else {
                continue;
            };
            if p.subordinates_active
                && next.subordinates_active
                && (p.g < 0.0) != (next.g < 0.0)
                && next.g != 0.0
            {
                if i + 2 == probes.len() {
                    touches_boundary = true;
                }
                roots.push(root::bisect(
                    |b| probe_beta(coord, &sqrt_c, b).map_or(f64::NAN, |p| p.g),
                    p.beta,
                    next.beta,
                    BETA_TOL,
                    200,
                ));
            }
        }
        if let Some(s) = run_start {
            if probes.len() - s >= 2 && continuum.is_none() {
                continuum = Some(probes[s].beta);
                touches_boundary = true;
            }
        }
        let last = probes.last().expect("grid is nonempty");
        if !(last.subordinates_active && last.g > 0.0) {
            touches_boundary = true;
        }
        if !touches_boundary || expansion == MAX_RANGE_EXPANSIONS {
            break;
        }
        hi *= 2.0;
    }

    if let Some(beta) = continuum {
        let mut result = result_from(coord, beta, Some(v_k))?;
        result.regime = Regime::OpponentExcluded;
        return Ok(result);
    }

    let mut best: Option<(f64, f64)> = None;
    for &beta in &roots {
        let valuations: Vec<f64> = sqrt_c.iter().map(|&s| beta * s).collect();
        let induced = induce(coord, &valuations)?;
        if !induced.subordinates_active {
            continue;
        }
        if best.is_none_or(|(_, u)| induced.utility > u) {
            best = Some((beta, induced.utility));
        }
    }
    let (beta, _) = best.ok_or(Error::NoFeasibleBeta)?;
    result_from(coord, beta, None)
}

/// For two subordinates, the valuation `v3` of the second that balances the
/// mechanism when the first is told `v2`.
///
/// Scans `v3` downward from a large value (where the imbalance is positive)
/// and returns the first crossing at which the second subordinate still bids.
/// When two balancing values exist this is the larger one, which lies on the
/// branch through the `v2 = v3 = v_K` design.
pub fn solve_feasible_companion(coord: &CoordinatorInstance, v2: f64) -> Result<f64> {
    if coord.subordinate_costs.len() != 2 {
        return Err(Error::WrongShape(
            "companion search needs exactly two subordinates",
        ));
    }
    if !(v2.is_finite() && v2 > 0.0) {
        return Err(Error::InvalidArgument("v2 must be positive"));
    }
    let v_k = coord.coordinator_valuation;
    let lo = 1e-6 * v_k;
    let mut hi = 10.0 * v_k.max(v2);
    let eval = |v3: f64| -> Result<(f64, bool)> {
        let induced = induce(coord, &[v2, v3])?;
        let m = coord.opponents.len();
        Ok((induced.residual, induced.equilibrium.bids[m + 1] > 0.0))
    };

    for _ in 0..=MAX_RANGE_EXPANSIONS {
        let grid: Vec<f64> = root::geometric_grid(lo, hi, COMPANION_GRID_POINTS).collect();
        let (top, _) = eval(hi)?;
        if top <= 0.0 {
            hi *= 2.0;
            continue;
        }
        for i in (0..grid.len() - 1).rev() {
            let (r, active) = eval(grid[i])?;
            if !active {
                break;
            }
            if r == 0.0 {
                return Ok(grid[i]);
            }
            if r < 0.0 {
                return Ok(root::bisect(
                    |v3| eval(v3).map_or(f64::NAN, |(r, _)| r),
                    grid[i],
                    grid[i + 1],
                    0.0,
                    200,
                ));
            }
        }
        break;
    }
    Err(Error::NoFeasibleCompanion { v2 })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPoint {
    pub v3: f64,
    pub coordinator_utility: f64,
    pub alpha: f64,
}

/// One grid point of [`sweep`]; `point` is `None` when no companion exists.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub v2: f64,
    pub point: Option<SweepPoint>,
}

/// Traces the balanced designs for two subordinates along `v2_grid`.
pub fn sweep(coord: &CoordinatorInstance, v2_grid: &[f64]) -> Result<Vec<SweepRow>> {
    if coord.subordinate_costs.len() != 2 {
        return Err(Error::WrongShape("sweep needs exactly two subordinates"));
    }
    if v2_grid.is_empty() {
        return Err(Error::InvalidArgument("sweep grid is empty"));
    }
    Ok(v2_grid
        .iter()
        .map(|&v2| {
            let point = solve_feasible_companion(coord, v2).ok().and_then(|v3| {
                let induced = induce(coord, &[v2, v3]).ok()?;
                Some(SweepPoint {
                    v3,
                    coordinator_utility: induced.utility,
                    alpha: induced.equilibrium.alpha(),
                })
            });
            SweepRow { v2, point }
        })
        .collect())
}

/// Evenly spaced grid of `points` values on `[min, max]`, endpoints exact.
pub fn linear_grid(min: f64, max: f64, points: usize) -> Vec<f64> {
    let last = (points.max(2) - 1) as f64;
    (0..points)
        .map(|i| min + (max - min) * i as f64 / last)
        .collect()
}
