use std::io::Write;
use std::path::Path;

use serde::Serialize;
use tullock_core::{
    br_fixed_point, coordinator_utility, design_general, design_three_player, equilibrium,
    linear_grid, sweep, verify_nash, DesignResult, Error, SweepRow,
};

use crate::number::{exact, human};
use crate::spec::{ContestSpec, SpecEcho};
use crate::{Cli, Command, Failure, Status};

/// Stopping tolerance for the best-response iteration in `verify`.
const ORACLE_TOL: f64 = 1e-12;
const ORACLE_MAX_SWEEPS: usize = 10_000;
/// Largest bid gap between the iteration and the closed form that passes.
const ORACLE_AGREEMENT: f64 = 1e-7;

pub(crate) fn execute(cli: &Cli, out: &mut dyn Write) -> Result<Status, Failure> {
    match &cli.command {
        Command::Solve { spec } => solve(&ContestSpec::from_path(spec)?, cli.json, out),
        Command::Verify { spec, tol } => {
            verify(&ContestSpec::from_path(spec)?, *tol, cli.json, out)
        }
        Command::Design { spec, general } => {
            design(&ContestSpec::from_path(spec)?, *general, cli.json, out)
        }
        Command::Sweep {
            spec,
            v2_min,
            v2_max,
            points,
            out: path,
        } => {
            let spec = ContestSpec::from_path(spec)?;
            let range = SweepRange {
                v2_min: *v2_min,
                v2_max: *v2_max,
                points: *points,
            };
            sweep_cmd(&spec, range, path, cli.json, out)
        }
    }
}

#[derive(Serialize)]
struct Report<T: Serialize> {
    #[serde(flatten)]
    spec: SpecEcho,
    #[serde(flatten)]
    section: T,
}

fn emit_json<T: Serialize>(
    spec: &ContestSpec,
    section: T,
    out: &mut dyn Write,
) -> Result<(), Failure> {
    let report = Report {
        spec: spec.echo(),
        section,
    };
    let text = serde_json::to_string_pretty(&report).expect("reports hold only finite numbers");
    writeln!(out, "{text}")?;
    Ok(())
}

#[derive(Serialize)]
struct SolveSection {
    solve: SolveOut,
}

#[derive(Serialize)]
struct SolveOut {
    alpha: f64,
    bids: Vec<f64>,
    payoffs: Vec<f64>,
    prize_values: Vec<f64>,
    active: Vec<bool>,
    #[serde(rename = "U_K", skip_serializing_if = "Option::is_none")]
    coordinator_utility: Option<f64>,
}

fn solve(spec: &ContestSpec, json: bool, out: &mut dyn Write) -> Result<Status, Failure> {
    let game = spec.instance();
    let eq = equilibrium(&game);
    let u_k = spec.coalition.as_ref().map(|k| {
        coordinator_utility(&game, &k.members, k.v_k, &eq.bids).expect("validated coalition")
    });
    if json {
        let active = (0..game.len()).map(|i| eq.is_active(i)).collect();
        let solve = SolveOut {
            alpha: eq.alpha(),
            bids: eq.bids.clone(),
            payoffs: eq.payoffs.clone(),
            prize_values: eq.prize_values.clone(),
            active,
            coordinator_utility: u_k,
        };
        emit_json(spec, SolveSection { solve }, out)?;
    } else {
        writeln!(out, "alpha = {}", human(eq.alpha()))?;
        writeln!(
            out,
            "{:>6} {:>12} {:>12} {:>12} {:>12} {:>12}  active",
            "player", "v", "c", "bid", "payoff", "prize value"
        )?;
        for (i, p) in game.players().iter().enumerate() {
            writeln!(
                out,
                "{:>6} {:>12} {:>12} {:>12} {:>12} {:>12}  {}",
                i + 1,
                human(p.valuation),
                human(p.cost),
                human(eq.bids[i]),
                human(eq.payoffs[i]),
                human(eq.prize_values[i]),
                if eq.is_active(i) { "yes" } else { "no" },
            )?;
        }
        if let Some(u) = u_k {
            writeln!(out, "U_K = {}", human(u))?;
        }
    }
    Ok(Status::Success)
}

#[derive(Serialize)]
struct VerifySection {
    verify: VerifyOut,
}

#[derive(Serialize)]
struct VerifyOut {
    tol: f64,
    oracle_bids: Vec<f64>,
    oracle_max_difference: f64,
    max_deviation_gain: f64,
    per_player_gain: Vec<f64>,
    pass: bool,
}

fn verify(
    spec: &ContestSpec,
    tol: f64,
    json: bool,
    out: &mut dyn Write,
) -> Result<Status, Failure> {
    if !(tol.is_finite() && tol >= 0.0) {
        return Err(Failure::input(format!(
            "--tol must be a nonnegative number (got {tol})"
        )));
    }
    let game = spec.instance();
    let n = game.len() as f64;
    let start: Vec<f64> = game
        .players()
        .iter()
        .map(|p| p.valuation / (2.0 * p.cost * n))
        .collect();
    let oracle = match br_fixed_point(&game, &start, ORACLE_TOL, ORACLE_MAX_SWEEPS) {
        Ok(bids) => bids,
        Err(Error::NoConvergence { sweeps, last }) => {
            let last: Vec<String> = last.iter().map(|&x| exact(x)).collect();
            return Err(Failure {
                status: Status::NoConvergence,
                message: format!(
                    "best-response iteration did not converge in {sweeps} sweeps; last bids [{}]",
                    last.join(", ")
                ),
            });
        }
        Err(e) => return Err(Failure::input(e.to_string())),
    };
    let eq = equilibrium(&game);
    let report = verify_nash(&game, &eq.bids, tol).expect("equilibrium bids are valid");
    let gap = oracle
        .iter()
        .zip(&eq.bids)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    let pass = report.is_nash && gap <= ORACLE_AGREEMENT;

    if json {
        let verify = VerifyOut {
            tol,
            oracle_bids: oracle,
            oracle_max_difference: gap,
            max_deviation_gain: report.max_deviation_gain,
            per_player_gain: report.per_player_gain,
            pass,
        };
        emit_json(spec, VerifySection { verify }, out)?;
    } else {
        writeln!(
            out,
            "best-response iteration vs closed form: max |difference| = {}",
            human(gap)
        )?;
        writeln!(
            out,
            "max deviation gain = {} (tol {})",
            human(report.max_deviation_gain),
            human(tol)
        )?;
        writeln!(out, "{}", if pass { "PASS" } else { "FAIL" })?;
    }
    Ok(if pass {
        Status::Success
    } else {
        Status::VerificationFailed
    })
}

#[derive(Serialize)]
struct DesignSection {
    design: DesignOut,
}

#[derive(Serialize)]
struct DesignOut {
    solver: &'static str,
    regime: &'static str,
    beta: f64,
    valuations: Vec<f64>,
    alpha: f64,
    #[serde(rename = "U_K")]
    coordinator_utility: f64,
    feasibility_residual: f64,
}

fn design(
    spec: &ContestSpec,
    force_general: bool,
    json: bool,
    out: &mut dyn Write,
) -> Result<Status, Failure> {
    let coord = spec.coordinator()?;
    let closed_form =
        !force_general && coord.opponents().len() == 1 && coord.subordinate_costs().len() == 2;
    let result: DesignResult = if closed_form {
        design_three_player(&coord)
    } else {
        design_general(&coord)
    }
    .map_err(|e| match e {
        Error::NoFeasibleBeta => Failure {
            status: Status::Infeasible,
            message: e.to_string(),
        },
        other => Failure::input(other.to_string()),
    })?;
    let solver = if closed_form {
        "closed-form"
    } else {
        "general"
    };
    let members = &spec
        .coalition
        .as_ref()
        .expect("coordinator() checked the coalition")
        .members;

    if json {
        let design = DesignOut {
            solver,
            regime: result.regime.as_str(),
            beta: result.beta,
            valuations: result.valuations,
            alpha: result.alpha,
            coordinator_utility: result.coordinator_utility,
            feasibility_residual: result.feasibility_residual,
        };
        emit_json(spec, DesignSection { design }, out)?;
    } else {
        writeln!(out, "{:<22}{}", "solver", solver)?;
        writeln!(out, "{:<22}{}", "regime", result.regime)?;
        writeln!(out, "{:<22}{}", "beta", human(result.beta))?;
        for (&i, &v) in members.iter().zip(&result.valuations) {
            writeln!(out, "{:<22}{}", format!("v*_{}", i + 1), human(v))?;
        }
        writeln!(out, "{:<22}{}", "alpha", human(result.alpha))?;
        writeln!(out, "{:<22}{}", "U_K", human(result.coordinator_utility))?;
        writeln!(
            out,
            "{:<22}{}",
            "feasibility residual",
            human(result.feasibility_residual)
        )?;
    }
    Ok(Status::Success)
}

struct SweepRange {
    v2_min: Option<f64>,
    v2_max: Option<f64>,
    points: usize,
}

#[derive(Serialize)]
struct SweepSection {
    sweep: SweepOut,
}

#[derive(Serialize)]
struct SweepOut {
    v2_min: f64,
    v2_max: f64,
    points: usize,
    out: String,
    infeasible_rows: usize,
    argmax: Option<RowOut>,
    baseline: Option<RowOut>,
}

#[derive(Serialize)]
struct RowOut {
    v2: f64,
    v3: Option<f64>,
    #[serde(rename = "U_K")]
    coordinator_utility: Option<f64>,
    alpha: Option<f64>,
}

impl From<&SweepRow> for RowOut {
    fn from(row: &SweepRow) -> Self {
        RowOut {
            v2: row.v2,
            v3: row.point.map(|p| p.v3),
            coordinator_utility: row.point.map(|p| p.coordinator_utility),
            alpha: row.point.map(|p| p.alpha),
        }
    }
}

/// `v2,v3,U_K,alpha` with 17 significant digits and `NA` where no balancing
/// `v3` exists.
pub(crate) fn csv(rows: &[SweepRow]) -> String {
    let mut text = String::from("v2,v3,U_K,alpha\n");
    for row in rows {
        text.push_str(&exact(row.v2));
        match row.point {
            Some(p) => {
                for x in [p.v3, p.coordinator_utility, p.alpha] {
                    text.push(',');
                    text.push_str(&exact(x));
                }
            }
            None => text.push_str(",NA,NA,NA"),
        }
        text.push('\n');
    }
    text
}

fn sweep_cmd(
    spec: &ContestSpec,
    range: SweepRange,
    path: &Path,
    json: bool,
    out: &mut dyn Write,
) -> Result<Status, Failure> {
    let coord = spec.coordinator()?;
    if coord.subordinate_costs().len() != 2 {
        return Err(Failure::input(
            "coalition: sweep needs exactly two coalition members",
        ));
    }
    let v_k = coord.coordinator_valuation();
    let v2_min = range.v2_min.unwrap_or(0.5 * v_k);
    let v2_max = range.v2_max.unwrap_or(2.5 * v_k);
    if !(v2_min.is_finite() && v2_min > 0.0) {
        return Err(Failure::input(format!(
            "--v2-min must be positive (got {v2_min})"
        )));
    }
    if !(v2_max.is_finite() && v2_max > v2_min) {
        return Err(Failure::input(format!(
            "--v2-max must exceed --v2-min (got {v2_max} <= {v2_min})"
        )));
    }
    if range.points < 2 {
        return Err(Failure::input(format!(
            "--points must be at least 2 (got {})",
            range.points
        )));
    }

    let failure = |e: Error| Failure::input(e.to_string());
    let rows = sweep(&coord, &linear_grid(v2_min, v2_max, range.points)).map_err(failure)?;
    std::fs::write(path, csv(&rows))
        .map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;

    let mut argmax: Option<&SweepRow> = None;
    for row in &rows {
        if let Some(p) = row.point {
            if argmax
                .and_then(|a| a.point)
                .is_none_or(|a| p.coordinator_utility > a.coordinator_utility)
            {
                argmax = Some(row);
            }
        }
    }
    let baseline = if (v2_min..=v2_max).contains(&v_k) {
        sweep(&coord, &[v_k]).map_err(failure)?.pop()
    } else {
        None
    };
    let infeasible_rows = rows.iter().filter(|r| r.point.is_none()).count();

    if json {
        let sweep = SweepOut {
            v2_min,
            v2_max,
            points: range.points,
            out: path.display().to_string(),
            infeasible_rows,
            argmax: argmax.map(RowOut::from),
            baseline: baseline.as_ref().map(RowOut::from),
        };
        emit_json(spec, SweepSection { sweep }, out)?;
    } else {
        writeln!(
            out,
            "wrote {} rows to {} ({} without a balancing v3)",
            rows.len(),
            path.display(),
            infeasible_rows
        )?;
        match argmax {
            Some(row) => writeln!(out, "argmax    {}", describe(row))?,
            None => writeln!(out, "argmax    none (no row has a balancing v3)")?,
        }
        if let Some(row) = &baseline {
            writeln!(out, "baseline  {}", describe(row))?;
        }
    }
    Ok(Status::Success)
}

fn describe(row: &SweepRow) -> String {
    match row.point {
        Some(p) => format!(
            "v2 = {}  v3 = {}  U_K = {}  alpha = {}",
            human(row.v2),
            human(p.v3),
            human(p.coordinator_utility),
            human(p.alpha)
        ),
        None => format!("v2 = {}  no balancing v3", human(row.v2)),
    }
}
