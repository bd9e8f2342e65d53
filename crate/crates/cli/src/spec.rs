//! Contest input files.
//!
//! An input file is a JSON object:
//!
//! ```json
//! { "players": [{ "v": 1, "c": 9 }, { "v": 1, "c": 10 }, { "v": 1, "c": 3 }],
//!   "coalition": [2, 3],
//!   "v_K": 1 }
//! ```
//!
//! `coalition` lists 1-based player indices and must appear together with
//! `v_K`. Machine-readable reports repeat these keys and add one result
//! section (`solve`, `verify`, `design` or `sweep`), so a report is itself a
//! valid input file.

use std::fmt;
use std::path::Path;

use serde::de::IgnoredAny;
use serde::{Deserialize, Serialize};
use tullock_core::{ContestInstance, CoordinatorInstance, Player};

#[derive(Debug, Clone, PartialEq)]
pub struct ContestSpec {
    pub players: Vec<Player>,
    pub coalition: Option<Coalition>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Coalition {
    /// 0-based player indices in file order.
    pub members: Vec<usize>,
    pub v_k: f64,
}

/// A problem with an input file, tied to the key that caused it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpecError {
    pub key: String,
    pub message: String,
}

impl SpecError {
    fn new(key: impl Into<String>, message: impl Into<String>) -> Self {
        SpecError {
            key: key.into(),
            message: message.into(),
        }
    }
}

impl fmt::Display for SpecError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.key, self.message)
    }
}

impl std::error::Error for SpecError {}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpec {
    players: Vec<RawPlayer>,
    #[serde(default)]
    coalition: Option<Vec<usize>>,
    #[serde(rename = "v_K", default)]
    v_k: Option<f64>,
    #[serde(default)]
    solve: Option<IgnoredAny>,
    #[serde(default)]
    verify: Option<IgnoredAny>,
    #[serde(default)]
    design: Option<IgnoredAny>,
    #[serde(default)]
    sweep: Option<IgnoredAny>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPlayer {
    v: f64,
    c: f64,
}

impl ContestSpec {
    pub fn from_path(path: &Path) -> Result<Self, SpecError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| SpecError::new(path.display().to_string(), e.to_string()))?;
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Self, SpecError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let raw: RawSpec = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            let key = if path == "." {
                "spec".to_string()
            } else {
                path
            };
            SpecError::new(key, e.into_inner().to_string())
        })?;
        let _ = (raw.solve, raw.verify, raw.design, raw.sweep);

        let mut players = Vec::with_capacity(raw.players.len());
        for (i, p) in raw.players.iter().enumerate() {
            if !(p.v.is_finite() && p.v > 0.0) {
                return Err(SpecError::new(
                    format!("players[{i}].v"),
                    format!("valuation must be positive and finite (got {})", p.v),
                ));
            }
            if !(p.c.is_finite() && p.c > 0.0) {
                return Err(SpecError::new(
                    format!("players[{i}].c"),
                    format!("cost must be positive and finite (got {})", p.c),
                ));
            }
            players.push(Player {
                valuation: p.v,
                cost: p.c,
            });
        }
        if players.len() < 2 {
            return Err(SpecError::new(
                "players",
                format!("a contest needs at least 2 players (got {})", players.len()),
            ));
        }

        let coalition = match (raw.coalition, raw.v_k) {
            (None, None) => None,
            (Some(_), None) => {
                return Err(SpecError::new("v_K", "required when coalition is given"))
            }
            (None, Some(_)) => {
                return Err(SpecError::new("coalition", "required when v_K is given"))
            }
            (Some(indices), Some(v_k)) => Some(Coalition {
                members: check_coalition(&indices, players.len())?,
                v_k: check_v_k(v_k)?,
            }),
        };
        Ok(ContestSpec { players, coalition })
    }

    pub fn instance(&self) -> ContestInstance {
        ContestInstance::new(self.players.clone()).expect("validated at parse time")
    }

    /// Opponents in index order and subordinate costs in coalition order.
    pub fn coordinator(&self) -> Result<CoordinatorInstance, SpecError> {
        let coalition = self
            .coalition
            .as_ref()
            .ok_or_else(|| SpecError::new("coalition", "this command needs coalition and v_K"))?;
        let opponents = (0..self.players.len())
            .filter(|i| !coalition.members.contains(i))
            .map(|i| self.players[i])
            .collect();
        let costs = coalition
            .members
            .iter()
            .map(|&i| self.players[i].cost)
            .collect();
        Ok(CoordinatorInstance::new(opponents, costs, coalition.v_k)
            .expect("validated at parse time"))
    }

    /// The input part of a machine-readable report.
    pub fn echo(&self) -> SpecEcho {
        SpecEcho {
            players: self
                .players
                .iter()
                .map(|p| PlayerEcho {
                    v: p.valuation,
                    c: p.cost,
                })
                .collect(),
            coalition: self
                .coalition
                .as_ref()
                .map(|k| k.members.iter().map(|i| i + 1).collect()),
            v_k: self.coalition.as_ref().map(|k| k.v_k),
        }
    }
}

fn check_coalition(indices: &[usize], n: usize) -> Result<Vec<usize>, SpecError> {
    if indices.is_empty() {
        return Err(SpecError::new("coalition", "must name at least one player"));
    }
    let mut members = Vec::with_capacity(indices.len());
    for (j, &k) in indices.iter().enumerate() {
        if k == 0 || k > n {
            return Err(SpecError::new(
                format!("coalition[{j}]"),
                format!("player index must be between 1 and {n} (got {k})"),
            ));
        }
        if members.contains(&(k - 1)) {
            return Err(SpecError::new(
                format!("coalition[{j}]"),
                format!("duplicate player index {k}"),
            ));
        }
        members.push(k - 1);
    }
    if members.len() == n {
        return Err(SpecError::new(
            "coalition",
            "must leave at least one player outside",
        ));
    }
    Ok(members)
}

fn check_v_k(v_k: f64) -> Result<f64, SpecError> {
    if v_k.is_finite() && v_k > 0.0 {
        Ok(v_k)
    } else {
        Err(SpecError::new(
            "v_K",
            format!("coordinator valuation must be positive and finite (got {v_k})"),
        ))
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SpecEcho {
    pub players: Vec<PlayerEcho>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coalition: Option<Vec<usize>>,
    #[serde(rename = "v_K", skip_serializing_if = "Option::is_none")]
    pub v_k: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct PlayerEcho {
    pub v: f64,
    pub c: f64,
}
