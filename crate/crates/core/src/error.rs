use alloc::vec::Vec;
use core::fmt;

pub type Result<T, E = Error> = core::result::Result<T, E>;

/// Errors produced by the solvers.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A player's valuation is not a finite positive number.
    NonPositiveValuation {
        player: usize,
        value: f64,
    },
    /// A player's per-unit cost is not a finite positive number.
    NonPositiveCost {
        player: usize,
        value: f64,
    },
    /// Contests need at least two players.
    TooFewPlayers(usize),
    /// Every bid is zero, so the winning share is 0/0.
    UndefinedShare,
    /// A bid vector does not have one entry per player.
    BidLengthMismatch {
        expected: usize,
        found: usize,
    },
    /// A bid is negative or not finite.
    InvalidBid {
        player: usize,
        value: f64,
    },
    IndexOutOfRange {
        index: usize,
        len: usize,
    },
    /// The coalition is empty, repeats a player, or contains every player.
    InvalidCoalition,
    /// The instance does not have the shape the solver requires.
    WrongShape(&'static str),
    /// A scalar argument is outside its domain.
    InvalidArgument(&'static str),
    /// Best-response iteration hit its sweep limit. Carries the last iterate.
    NoConvergence {
        sweeps: usize,
        last: Vec<f64>,
    },
    /// No root of the feasibility condition was found along the
    /// `v_i = beta * sqrt(c_i)` ray.
    NoFeasibleBeta,
    /// No companion valuation satisfies the feasibility condition.
    NoFeasibleCompanion {
        v2: f64,
    },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::NonPositiveValuation { player, value } => {
                write!(
                    f,
                    "player {player}: valuation must be positive and finite, got {value}"
                )
            }
            Error::NonPositiveCost { player, value } => {
                write!(
                    f,
                    "player {player}: cost must be positive and finite, got {value}"
                )
            }
            Error::TooFewPlayers(n) => write!(f, "a contest needs at least 2 players, got {n}"),
            Error::UndefinedShare => f.write_str("undefined-share: all bids are zero"),
            Error::BidLengthMismatch { expected, found } => {
                write!(f, "expected {expected} bids, got {found}")
            }
            Error::InvalidBid { player, value } => {
                write!(
                    f,
                    "player {player}: bid must be nonnegative and finite, got {value}"
                )
            }
            Error::IndexOutOfRange { index, len } => {
                write!(f, "player index {index} out of range for {len} players")
            }
            Error::InvalidCoalition => f.write_str(
                "invalid-coalition: coalition must be a nonempty strict subset without repeats",
            ),
            Error::WrongShape(what) => write!(f, "wrong instance shape: {what}"),
            Error::InvalidArgument(what) => write!(f, "invalid argument: {what}"),
            Error::NoConvergence { sweeps, .. } => {
                write!(
                    f,
                    "no-convergence: best-response iteration did not settle in {sweeps} sweeps"
                )
            }
            Error::NoFeasibleBeta => {
                f.write_str("no-feasible-beta: no feasible proportionality constant found")
            }
            Error::NoFeasibleCompanion { v2 } => {
                write!(
                    f,
                    "no-feasible-companion: no v3 balances the mechanism for v2 = {v2}"
                )
            }
        }
    }
}
