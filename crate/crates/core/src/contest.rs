//! Pure-strategy Nash equilibrium of the n-player Tullock contest.
//!
//! With relative costs `w_i = c_i / v_i`, the equilibrium total bid `alpha`
//! is the unique root of `sum_i [1 - w_i * alpha]^+ = 1`, and the bids are
//! `x_i = alpha * [1 - w_i * alpha]^+`. Players with `w_i * alpha >= 1`
//! abstain.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::root;

/// Absolute tolerance on `alpha` for the bisection path.
pub const BISECTION_TOL: f64 = 1e-12;
/// Iteration cap for the bisection path.
pub const BISECTION_MAX_ITER: usize = 200;

/// A contestant: prize valuation and cost per unit of bid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Player {
    pub valuation: f64,
    pub cost: f64,
}

impl Player {
    pub fn new(valuation: f64, cost: f64) -> Result<Self> {
        let p = Player { valuation, cost };
        p.validate(0)?;
        Ok(p)
    }

    /// `c / v`, the cost of one unit of winning probability at the margin.
    #[inline]
    pub fn relative_cost(&self) -> f64 {
        self.cost / self.valuation
    }

    fn validate(&self, index: usize) -> Result<()> {
        if !(self.valuation.is_finite() && self.valuation > 0.0) {
            return Err(Error::NonPositiveValuation {
                player: index,
                value: self.valuation,
            });
        }
        if !(self.cost.is_finite() && self.cost > 0.0) {
            return Err(Error::NonPositiveCost {
                player: index,
                value: self.cost,
            });
        }
        Ok(())
    }
}

/// A validated contest with at least two players. Player identity is the
/// index in the original order.
#[derive(Debug, Clone, PartialEq)]
pub struct ContestInstance {
    players: Vec<Player>,
}

impl ContestInstance {
    pub fn new(players: Vec<Player>) -> Result<Self> {
        for (i, p) in players.iter().enumerate() {
            p.validate(i)?;
        }
        if players.len() < 2 {
            return Err(Error::TooFewPlayers(players.len()));
        }
        Ok(ContestInstance { players })
    }

    /// Builds an instance from `(valuation, cost)` pairs.
    pub fn from_pairs(pairs: &[(f64, f64)]) -> Result<Self> {
        Self::new(
            pairs
                .iter()
                .map(|&(valuation, cost)| Player { valuation, cost })
                .collect(),
        )
    }

    pub fn players(&self) -> &[Player] {
        &self.players
    }

    pub fn len(&self) -> usize {
        self.players.len()
    }

    pub fn is_empty(&self) -> bool {
        self.players.is_empty()
    }

    pub fn relative_costs(&self) -> Vec<f64> {
        self.players.iter().map(Player::relative_cost).collect()
    }

    /// Largest `v_i / c_i`; `alpha` never exceeds it.
    pub fn max_ratio(&self) -> f64 {
        self.players
            .iter()
            .map(|p| p.valuation / p.cost)
            .fold(0.0, f64::max)
    }
}

/// The equilibrium total bid together with the active set.
#[derive(Debug, Clone, PartialEq)]
pub struct AlphaSolution {
    pub alpha: f64,
    /// First active position (0-based) in `sorted_order`. Positions before
    /// it abstain.
    pub cutoff_index: usize,
    /// `sorted_order[p]` is the original index of the player at position `p`
    /// when players are sorted by `v / c` ascending (ties by original index).
    pub sorted_order: Vec<usize>,
}

impl AlphaSolution {
    /// Whether the player with original index `player` bids a positive amount.
    pub fn is_active(&self, player: usize) -> bool {
        self.sorted_order[self.cutoff_index..].contains(&player)
    }

    pub fn active_players(&self) -> &[usize] {
        &self.sorted_order[self.cutoff_index..]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Equilibrium {
    pub alpha_solution: AlphaSolution,
    /// Equilibrium bids, in original player order.
    pub bids: Vec<f64>,
    /// Equilibrium utilities `v_i x_i / alpha - c_i x_i = v_i [1 - w_i alpha]^2`
    /// for active players, 0 otherwise.
    pub payoffs: Vec<f64>,
    /// Expected prize value `v_i x_i / alpha = [v_i - c_i alpha]^+`, i.e. the
    /// payoff before bid costs.
    pub prize_values: Vec<f64>,
}

impl Equilibrium {
    #[inline]
    pub fn alpha(&self) -> f64 {
        self.alpha_solution.alpha
    }

    pub fn is_active(&self, player: usize) -> bool {
        self.alpha_solution.is_active(player)
    }

    pub fn total_bid(&self) -> f64 {
        self.bids.iter().sum()
    }
}

fn check_bids(instance: &ContestInstance, bids: &[f64]) -> Result<f64> {
    if bids.len() != instance.len() {
        return Err(Error::BidLengthMismatch {
            expected: instance.len(),
            found: bids.len(),
        });
    }
    for (i, &b) in bids.iter().enumerate() {
        if !(b.is_finite() && b >= 0.0) {
            return Err(Error::InvalidBid {
                player: i,
                value: b,
            });
        }
    }
    let total: f64 = bids.iter().sum();
    if total <= 0.0 {
        return Err(Error::UndefinedShare);
    }
    Ok(total)
}

/// Payoff of player `i` at the bid profile `bids`:
/// `v_i * x_i / sum(x) - c_i * x_i`.
pub fn utility(instance: &ContestInstance, bids: &[f64], i: usize) -> Result<f64> {
    if i >= instance.len() {
        return Err(Error::IndexOutOfRange {
            index: i,
            len: instance.len(),
        });
    }
    let total = check_bids(instance, bids)?;
    let p = instance.players[i];
    Ok(p.valuation * bids[i] / total - p.cost * bids[i])
}

/// Solves for `alpha` by sorting players by `v / c` ascending and scanning
/// for the first position whose suffix forms a self-consistent active set.
///
/// For a suffix starting at position `p` with `m` players and relative cost
/// sum `S`, the candidate is `alpha = (m - 1) / S`; the suffix is the active
/// set iff its first player satisfies `(m - 1) * w_p < S`. A player with
/// `w * alpha == 1` exactly is classified inactive.
pub fn solve_alpha(instance: &ContestInstance) -> AlphaSolution {
    let w = instance.relative_costs();
    let n = w.len();
    let mut order: Vec<usize> = (0..n).collect();
    // Descending w is ascending v/c; the sort is stable so ties keep index order.
    order.sort_by(|&a, &b| w[b].total_cmp(&w[a]));

    // suffix[p] = sum of w over sorted positions p..n, accumulated from the
    // smallest terms.
    let mut suffix = alloc::vec![0.0; n + 1];
    for p in (0..n).rev() {
        suffix[p] = suffix[p + 1] + w[order[p]];
    }

    // The last pair always qualifies: w_{n-2} < w_{n-2} + w_{n-1}.
    let mut cutoff = n - 2;
    for p in 0..n - 1 {
        let m = (n - p) as f64;
        if (m - 1.0) * w[order[p]] < suffix[p] {
            cutoff = p;
            break;
        }
    }
    let alpha = (n - cutoff - 1) as f64 / suffix[cutoff];
    AlphaSolution {
        alpha,
        cutoff_index: cutoff,
        sorted_order: order,
    }
}

/// `sum_i [1 - w_i * alpha]^+ - 1`, strictly decreasing on `(0, max v/c)`.
pub fn alpha_residual(w: &[f64], alpha: f64) -> f64 {
    w.iter().map(|&wi| (1.0 - wi * alpha).max(0.0)).sum::<f64>() - 1.0
}

/// Bisection root of [`alpha_residual`] on `(0, max v/c]`. Independent of the
/// sort-and-scan path in [`solve_alpha`].
pub fn solve_alpha_bisection(instance: &ContestInstance) -> f64 {
    let w = instance.relative_costs();
    root::bisect(
        |a| alpha_residual(&w, a),
        0.0,
        instance.max_ratio(),
        BISECTION_TOL,
        BISECTION_MAX_ITER,
    )
}

fn build_equilibrium(instance: &ContestInstance, sol: AlphaSolution) -> Equilibrium {
    let n = instance.len();
    let alpha = sol.alpha;
    let mut bids = alloc::vec![0.0; n];
    let mut payoffs = alloc::vec![0.0; n];
    let mut prize_values = alloc::vec![0.0; n];
    for &i in sol.active_players() {
        let p = instance.players[i];
        let slack = (1.0 - p.relative_cost() * alpha).max(0.0);
        bids[i] = alpha * slack;
        prize_values[i] = (p.valuation - p.cost * alpha).max(0.0);
        payoffs[i] = p.valuation * slack * slack;
    }
    Equilibrium {
        alpha_solution: sol,
        bids,
        payoffs,
        prize_values,
    }
}

/// The equilibrium bids `x_i = alpha [1 - w_i alpha]^+` and the matching
/// payoffs.
pub fn equilibrium(instance: &ContestInstance) -> Equilibrium {
    build_equilibrium(instance, solve_alpha(instance))
}

/// Closed forms for three players, evaluated without the general scan.
///
/// With players relabelled so that the first has the largest relative cost:
/// if `w_2 + w_3 <= w_1` the first player abstains and
/// `x_2 = w_3 / (w_2 + w_3)^2`, `x_3 = w_2 / (w_2 + w_3)^2`; otherwise
/// `x_i = (2 W - 4 w_i) / W^2` with `W = w_1 + w_2 + w_3`.
pub fn three_player_equilibrium(instance: &ContestInstance) -> Result<Equilibrium> {
    if instance.len() != 3 {
        return Err(Error::WrongShape(
            "three_player_equilibrium needs exactly 3 players",
        ));
    }
    let w = instance.relative_costs();
    let mut order: Vec<usize> = (0..3).collect();
    order.sort_by(|&a, &b| w[b].total_cmp(&w[a]));
    let (w1, w2, w3) = (w[order[0]], w[order[1]], w[order[2]]);

    let mut bids = alloc::vec![0.0; 3];
    let mut prize_values = alloc::vec![0.0; 3];
    let mut payoffs = alloc::vec![0.0; 3];
    let (alpha, cutoff_index);
    if w2 + w3 <= w1 {
        let pair = w2 + w3;
        alpha = 1.0 / pair;
        cutoff_index = 1;
        let (i2, i3) = (order[1], order[2]);
        bids[i2] = w3 / (pair * pair);
        bids[i3] = w2 / (pair * pair);
        prize_values[i2] = instance.players[i2].valuation * w3 / pair;
        prize_values[i3] = instance.players[i3].valuation * w2 / pair;
        for &i in &[i2, i3] {
            payoffs[i] = prize_values[i] * prize_values[i] / instance.players[i].valuation;
        }
    } else {
        let total = w1 + w2 + w3;
        alpha = 2.0 / total;
        cutoff_index = 0;
        for i in 0..3 {
            let p = instance.players[i];
            bids[i] = (2.0 * total - 4.0 * w[i]) / (total * total);
            prize_values[i] = p.valuation - 2.0 * p.cost / total;
            payoffs[i] = prize_values[i] * prize_values[i] / p.valuation;
        }
    }
    Ok(Equilibrium {
        alpha_solution: AlphaSolution {
            alpha,
            cutoff_index,
            sorted_order: order,
        },
        bids,
        payoffs,
        prize_values,
    })
}

fn check_coalition(n: usize, coalition: &[usize]) -> Result<()> {
    if coalition.is_empty() || coalition.len() >= n {
        return Err(Error::InvalidCoalition);
    }
    let mut seen = alloc::vec![false; n];
    for &k in coalition {
        if k >= n {
            return Err(Error::IndexOutOfRange { index: k, len: n });
        }
        if core::mem::replace(&mut seen[k], true) {
            return Err(Error::InvalidCoalition);
        }
    }
    Ok(())
}

/// Coordinator payoff `v_K * sum_{i in K} x_i / sum_j x_j` for the coalition
/// `coalition` (0-based player indices).
pub fn coordinator_utility(
    instance: &ContestInstance,
    coalition: &[usize],
    coordinator_valuation: f64,
    bids: &[f64],
) -> Result<f64> {
    check_coalition(instance.len(), coalition)?;
    if !(coordinator_valuation.is_finite() && coordinator_valuation > 0.0) {
        return Err(Error::InvalidArgument(
            "coordinator valuation must be positive",
        ));
    }
    let total = check_bids(instance, bids)?;
    let mut in_coalition = alloc::vec![false; instance.len()];
    for &k in coalition {
        in_coalition[k] = true;
    }
    // Summed in index order so that a coalition holding every positive bid
    // reproduces `total` bit for bit.
    let coalition_total: f64 = bids
        .iter()
        .zip(&in_coalition)
        .map(|(&b, &inside)| if inside { b } else { 0.0 })
        .sum();
    Ok(coordinator_valuation * (coalition_total / total))
}

#[cfg(test)]
mod tests {
    use super::*;

    const EPS: f64 = 1e-12;

    fn inst(pairs: &[(f64, f64)]) -> ContestInstance {
        ContestInstance::from_pairs(pairs).unwrap()
    }

    fn reference() -> ContestInstance {
        inst(&[(1.0, 9.0), (1.0, 10.0), (1.0, 3.0)])
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1.0)
    }

    #[test]
    fn rejects_bad_players() {
        assert_eq!(
            ContestInstance::from_pairs(&[(1.0, 1.0), (1.0, -1.0)]),
            Err(Error::NonPositiveCost {
                player: 1,
                value: -1.0
            })
        );
        assert!(matches!(
            ContestInstance::from_pairs(&[(0.0, 1.0), (1.0, 1.0)]),
            Err(Error::NonPositiveValuation { player: 0, .. })
        ));
        assert!(matches!(
            ContestInstance::from_pairs(&[(f64::NAN, 1.0), (1.0, 1.0)]),
            Err(Error::NonPositiveValuation { .. })
        ));
        assert_eq!(
            ContestInstance::from_pairs(&[(1.0, 1.0)]),
            Err(Error::TooFewPlayers(1))
        );
        assert!(Player::new(1.0, 0.0).is_err());
    }

    #[test]
    fn utility_examples() {
        let two = inst(&[(1.0, 1.0), (1.0, 1.0)]);
        assert_eq!(utility(&two, &[0.0, 0.5], 0).unwrap(), 0.0);
        assert_eq!(utility(&two, &[1.0, 1.0], 1).unwrap(), -0.5);
        assert_eq!(utility(&two, &[0.0, 0.0], 0), Err(Error::UndefinedShare));
        assert!(matches!(
            utility(&two, &[1.0, 1.0], 2),
            Err(Error::IndexOutOfRange { .. })
        ));
        assert!(matches!(
            utility(&two, &[1.0], 0),
            Err(Error::BidLengthMismatch { .. })
        ));
        assert!(matches!(
            utility(&two, &[-1.0, 2.0], 0),
            Err(Error::InvalidBid { .. })
        ));

        // Player 3 of the reference baseline: x3 = 8/121, alpha = 1/11.
        // 1 * (8/121) / (1/11) - 3 * 8/121 = 8/11 - 24/121 = 64/121.
        let g = reference();
        let eq = equilibrium(&g);
        assert!(close(utility(&g, &eq.bids, 2).unwrap(), 64.0 / 121.0, EPS));
    }

    #[test]
    fn alpha_examples() {
        let sym = solve_alpha(&inst(&[(1.0, 1.0); 3]));
        assert!(close(sym.alpha, 2.0 / 3.0, EPS));
        assert_eq!(sym.cutoff_index, 0);
        assert_eq!(sym.sorted_order, [0, 1, 2]);

        let f = solve_alpha(&reference());
        assert!(close(f.alpha, 1.0 / 11.0, EPS));
        assert_eq!(f.cutoff_index, 0);
        assert_eq!(f.sorted_order, [1, 0, 2]);

        let abst = solve_alpha(&inst(&[(1.0, 10.0), (1.0, 1.0), (1.0, 1.0)]));
        assert!(close(abst.alpha, 0.5, EPS));
        assert_eq!(abst.cutoff_index, 1);
        assert!(!abst.is_active(0));
        assert!(abst.is_active(1) && abst.is_active(2));
    }

    #[test]
    fn boundary_tie_is_inactive() {
        // w = (2, 1, 1): w1 * alpha = 2 * 1/2 = 1 exactly.
        let eq = equilibrium(&inst(&[(1.0, 2.0), (1.0, 1.0), (1.0, 1.0)]));
        assert_eq!(eq.alpha(), 0.5);
        assert!(!eq.is_active(0));
        assert_eq!(eq.bids[0], 0.0);
        assert_eq!(eq.bids[1], 0.25);
    }

    #[test]
    fn bisection_agrees() {
        for g in [
            reference(),
            inst(&[(1.0, 10.0), (1.0, 1.0), (1.0, 1.0)]),
            inst(&[(3.0, 0.2), (0.5, 7.0)]),
        ] {
            let a = solve_alpha(&g).alpha;
            let b = solve_alpha_bisection(&g);
            assert!((a - b).abs() <= 1e-10, "{a} vs {b}");
        }
    }

    #[test]
    fn equilibrium_examples() {
        let two = equilibrium(&inst(&[(1.0, 1.0), (1.0, 1.0)]));
        assert_eq!(two.bids, [0.25, 0.25]);
        assert_eq!(two.prize_values, [0.5, 0.5]);
        assert_eq!(two.payoffs, [0.25, 0.25]);

        let f = equilibrium(&reference());
        for (x, e) in f.bids.iter().zip([2.0 / 121.0, 1.0 / 121.0, 8.0 / 121.0]) {
            assert!(close(*x, e, EPS));
        }
        for (u, e) in f
            .prize_values
            .iter()
            .zip([2.0 / 11.0, 1.0 / 11.0, 8.0 / 11.0])
        {
            assert!(close(*u, e, EPS));
        }

        let a = equilibrium(&inst(&[(1.0, 10.0), (1.0, 1.0), (1.0, 1.0)]));
        assert_eq!(a.bids[0], 0.0);
        assert!(close(a.bids[1], 0.25, EPS) && close(a.bids[2], 0.25, EPS));
        assert_eq!(a.prize_values[0], 0.0);
        assert!(close(a.prize_values[1], 0.5, EPS));
    }

    #[test]
    fn three_player_closed_forms_match() {
        let cases = [
            reference(),
            inst(&[(1.0, 10.0), (1.0, 1.0), (1.0, 1.0)]),
            inst(&[(1.0, 1.0); 3]),
            inst(&[(2.0, 0.3), (1.0, 5.0), (4.0, 1.0)]),
        ];
        for g in cases {
            let a = equilibrium(&g);
            let b = three_player_equilibrium(&g).unwrap();
            assert!(close(a.alpha(), b.alpha(), 1e-10));
            assert_eq!(a.alpha_solution.cutoff_index, b.alpha_solution.cutoff_index);
            for i in 0..3 {
                assert!(close(a.bids[i], b.bids[i], 1e-10));
                assert!(close(a.payoffs[i], b.payoffs[i], 1e-10));
                assert!(close(a.prize_values[i], b.prize_values[i], 1e-10));
            }
        }
        let sym = three_player_equilibrium(&inst(&[(1.0, 1.0); 3])).unwrap();
        for i in 0..3 {
            assert!(close(sym.bids[i], 2.0 / 9.0, EPS));
            assert!(close(sym.prize_values[i], 1.0 / 3.0, EPS));
        }
        assert!(three_player_equilibrium(&inst(&[(1.0, 1.0); 2])).is_err());
    }

    #[test]
    fn coordinator_utility_examples() {
        let g = reference();
        let eq = equilibrium(&g);
        let u = coordinator_utility(&g, &[1, 2], 1.0, &eq.bids).unwrap();
        assert!(close(u, 9.0 / 11.0, EPS));
        assert!(close(
            coordinator_utility(&g, &[1, 2], 1.0, &[1.0; 3]).unwrap(),
            2.0 / 3.0,
            EPS
        ));
        assert_eq!(
            coordinator_utility(&g, &[1, 2], 1.0, &[0.3, 0.0, 0.0]).unwrap(),
            0.0
        );
        assert_eq!(
            coordinator_utility(&g, &[], 1.0, &[1.0; 3]),
            Err(Error::InvalidCoalition)
        );
        assert_eq!(
            coordinator_utility(&g, &[0, 1, 2], 1.0, &[1.0; 3]),
            Err(Error::InvalidCoalition)
        );
        assert_eq!(
            coordinator_utility(&g, &[1, 1], 1.0, &[1.0; 3]),
            Err(Error::InvalidCoalition)
        );
        assert_eq!(
            coordinator_utility(&g, &[1], 1.0, &[0.0; 3]),
            Err(Error::UndefinedShare)
        );
    }
}
