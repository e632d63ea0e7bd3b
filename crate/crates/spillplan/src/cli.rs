//! Command front end: validate scenarios, solve, explain the backbone,
//! and export trajectory traces.
//!
//! Every command is deterministic — the same inputs produce byte-identical
//! artifacts — and never mutates the scenario file. Exit codes: 0 success,
//! 1 input error (parse/validation/usage), 2 degenerate model.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::backbone::{build_backbone, DecisionBackbone, StrategyKind};
use crate::equipment::AircraftKind;
use crate::error::SpillError;
use crate::scenario::{load_scenario, validate, Scenario};
use crate::solver::{
    backward_induct, brute_force, value_of_surveillance, ReturnTable, SolveResult,
};
use crate::trajectory::{run_trajectory, TrajectoryTrace};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommandKind {
    Validate,
    Solve,
    Explain,
    Trace,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Text,
    Machine,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverChoice {
    Staged,
    Brute,
    Both,
}

/// Resolved invocation.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: CommandKind,
    pub scenario_path: PathBuf,
    pub output_dir: PathBuf,
    pub format: OutputFormat,
    pub solver: SolverChoice,
    /// Trace: policy name to run.
    pub policy: Option<String>,
    /// Trace: optional observation period.
    pub observe_at: Option<usize>,
}

impl RunConfig {
    pub fn new(command: CommandKind, scenario_path: impl Into<PathBuf>) -> RunConfig {
        RunConfig {
            command,
            scenario_path: scenario_path.into(),
            output_dir: PathBuf::from("."),
            format: OutputFormat::Text,
            solver: SolverChoice::Staged,
            policy: None,
            observe_at: None,
        }
    }
}

/// Failures mapped to process exit codes.
#[derive(Debug, Error)]
pub enum CliError {
    /// Exit 1: bad input, bad usage, unreadable or invalid scenario.
    #[error("{0}")]
    Input(String),
    /// Exit 2: structurally valid scenario with no baseline impact.
    #[error("{0}")]
    Degenerate(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 1,
            CliError::Degenerate(_) => 2,
        }
    }
}

impl From<SpillError> for CliError {
    fn from(e: SpillError) -> CliError {
        match e {
            SpillError::DegenerateScenario => CliError::Degenerate(e.to_string()),
            other => CliError::Input(other.to_string()),
        }
    }
}

/// Runs one command, writing artifacts under the output directory, and
/// returns the text printed to stdout.
pub fn run(cfg: &RunConfig) -> Result<String, CliError> {
    match cfg.command {
        CommandKind::Validate => cmd_validate(cfg),
        CommandKind::Solve => cmd_solve(cfg),
        CommandKind::Explain => cmd_explain(cfg),
        CommandKind::Trace => cmd_trace(cfg),
    }
}

fn load(cfg: &RunConfig) -> Result<Scenario, CliError> {
    Ok(load_scenario(&cfg.scenario_path)?)
}

fn ensure_out_dir(cfg: &RunConfig) -> Result<(), CliError> {
    std::fs::create_dir_all(&cfg.output_dir)
        .map_err(|e| CliError::Input(format!("cannot create {}: {e}", cfg.output_dir.display())))
}

fn write_artifact(dir: &Path, name: &str, contents: &str) -> Result<(), CliError> {
    std::fs::write(dir.join(name), contents)
        .map_err(|e| CliError::Input(format!("cannot write {name}: {e}")))
}

fn cmd_validate(cfg: &RunConfig) -> Result<String, CliError> {
    let text = std::fs::read_to_string(&cfg.scenario_path)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", cfg.scenario_path.display())))?;
    let scenario: Scenario = serde_json::from_str(&text)
        .map_err(|e| CliError::Input(format!("cannot parse {}: {e}", cfg.scenario_path.display())))?;
    let violations = validate(&scenario);
    if violations.is_empty() {
        Ok(format!("ok: {} sectors, horizon {}\n", scenario.sector_count(), scenario.horizon()))
    } else {
        let mut msg = String::new();
        for v in &violations {
            let _ = writeln!(msg, "violation: {v}");
        }
        Err(CliError::Input(msg))
    }
}

/// Solves the scenario and writes the solve record plus stage tables.
pub fn cmd_solve(cfg: &RunConfig) -> Result<String, CliError> {
    if cfg.solver == SolverChoice::Both && cfg.format != OutputFormat::Machine {
        return Err(CliError::Input(
            "--solver both emits a comparison record and requires --format machine".into(),
        ));
    }
    let scenario = load(cfg)?;
    let backbone = build_backbone(&scenario)?;
    ensure_out_dir(cfg)?;
    let surveillance = value_of_surveillance(&scenario, &backbone)?;

    let (record, summary) = match cfg.solver {
        SolverChoice::Staged => {
            let result = backward_induct(&scenario, &backbone)?;
            let summary = format!(
                "optimal policy {} value {:.4} ({} staged evaluations)\n",
                result.optimal_policy.name(),
                result.value,
                result.evaluations_staged
            );
            (
                serde_json::json!({
                    "solver": "staged",
                    "result": result,
                    "surveillance_value": surveillance,
                }),
                summary,
            )
        }
        SolverChoice::Brute => {
            let result = brute_force(&scenario, &backbone)?;
            let summary = format!(
                "optimal policy {} value {:.4} ({} policies enumerated)\n",
                result.optimal_policy.name(),
                result.value,
                result.evaluations_bruteforce
            );
            (
                serde_json::json!({
                    "solver": "brute",
                    "result": result,
                    "surveillance_value": surveillance,
                }),
                summary,
            )
        }
        SolverChoice::Both => {
            let brute = brute_force(&scenario, &backbone)?;
            let staged = backward_induct(&scenario, &backbone)?;
            let argmin_match = brute.optimal_policy == staged.optimal_policy;
            let summary = format!(
                "optimal policy {} value {:.4} ({} brute-force vs {} staged evaluations; argmins {})\n",
                staged.optimal_policy.name(),
                staged.value,
                brute.evaluations_bruteforce,
                staged.evaluations_staged,
                if argmin_match { "match" } else { "differ" }
            );
            (
                serde_json::json!({
                    "solver": "both",
                    "brute": brute,
                    "staged": staged,
                    "argmin_match": argmin_match,
                    "value_delta": (brute.value - staged.value).abs(),
                    "surveillance_value": surveillance,
                }),
                summary,
            )
        }
    };

    let json = serde_json::to_string_pretty(&record)
        .map_err(|e| CliError::Input(format!("serialize: {e}")))?;
    write_artifact(&cfg.output_dir, "solve_result.json", &(json + "\n"))?;

    if cfg.format == OutputFormat::Text {
        // Text renders mirror the report tables: two decimals, `*` for
        // cells excluded by best practice.
        let result: SolveResult = match cfg.solver {
            SolverChoice::Staged => backward_induct(&scenario, &backbone)?,
            _ => brute_force(&scenario, &backbone)?,
        };
        for (idx, table) in result.stage_tables.iter().enumerate() {
            let name = format!("stage{}_table.txt", 2 - idx);
            write_artifact(&cfg.output_dir, &name, &render_table(table))?;
        }
    }
    Ok(summary)
}

/// Prints the decision backbone: points, admissible actions with arrival
/// periods, and every pruned action with its reason.
pub fn cmd_explain(cfg: &RunConfig) -> Result<String, CliError> {
    let scenario = load(cfg)?;
    let backbone = build_backbone(&scenario)?;
    ensure_out_dir(cfg)?;
    let text = render_backbone(&scenario, &backbone);
    write_artifact(&cfg.output_dir, "explain.txt", &text)?;
    Ok(text)
}

/// Exports per-period trace CSVs for one named policy.
pub fn cmd_trace(cfg: &RunConfig) -> Result<String, CliError> {
    let scenario = load(cfg)?;
    let backbone = build_backbone(&scenario)?;
    let name = cfg.policy.as_deref().unwrap_or("none");
    let Some((first, aircraft, second)) = parse_policy_name(&backbone, name) else {
        return Err(CliError::Input(format!(
            "unknown policy {:?}; valid names:\n{}",
            name,
            valid_policy_names(&backbone).join("\n")
        )));
    };
    if let Some(j) = cfg.observe_at {
        if j >= scenario.horizon() {
            return Err(CliError::Input(format!(
                "observation period {j} outside horizon {}",
                scenario.horizon()
            )));
        }
    }
    ensure_out_dir(cfg)?;
    let deployment = backbone.deployment_for(&scenario, first, aircraft, second)?;
    let blind = run_trajectory(&scenario, &deployment, None)?;
    write_artifact(&cfg.output_dir, &format!("trace_{name}_blind.csv"), &render_csv(&scenario, &blind))?;
    let mut summary = format!("wrote trace_{name}_blind.csv ({} periods)\n", blind.states.len());
    if let Some(j) = cfg.observe_at {
        let observed = run_trajectory(&scenario, &deployment, Some(j))?;
        write_artifact(
            &cfg.output_dir,
            &format!("trace_{name}_observed.csv"),
            &render_csv(&scenario, &observed),
        )?;
        let _ = writeln!(summary, "wrote trace_{name}_observed.csv (collapse at period {j})");
    }
    Ok(summary)
}

fn parse_policy_name(
    b: &DecisionBackbone,
    name: &str,
) -> Option<(StrategyKind, AircraftKind, StrategyKind)> {
    if name == "none" {
        return Some((StrategyKind::None, AircraftKind::Surveil, StrategyKind::None));
    }
    let parts: Vec<&str> = name.split('-').collect();
    if parts.len() != 3 {
        return None;
    }
    let first = StrategyKind::parse(parts[0])?;
    let aircraft = match parts[1] {
        "surveil" => AircraftKind::Surveil,
        "disperse" => AircraftKind::Disperse,
        _ => return None,
    };
    let second = StrategyKind::parse(parts[2])?;
    if !b.first_strategies().contains(&first)
        || !b.aircraft_options.contains(&aircraft)
        || !b.second_strategies().contains(&second)
    {
        return None;
    }
    Some((first, aircraft, second))
}

fn valid_policy_names(b: &DecisionBackbone) -> Vec<String> {
    let mut names = vec!["none".to_string()];
    for f in b.first_strategies() {
        for a in &b.aircraft_options {
            for s in b.second_strategies() {
                names.push(format!("{}-{}-{}", f.name(), a.name(), s.name()));
            }
        }
    }
    names
}

/// Renders a return table as aligned text, two decimals, `*` for cells
/// excluded by best practice.
pub fn render_table(table: &ReturnTable) -> String {
    let label = |l: &str| if l == "none" { "(none)".to_string() } else { l.to_string() };
    let width = 10usize;
    let row_width = table
        .row_labels
        .iter()
        .map(|l| label(l).len())
        .max()
        .unwrap_or(0)
        .max(12);
    let mut out = String::new();
    let _ = writeln!(out, "{}", table.title);
    let _ = write!(out, "{:row_width$}", "");
    for col in &table.col_labels {
        let _ = write!(out, "{:>width$}", label(col));
    }
    out.push('\n');
    for (r, row_label) in table.row_labels.iter().enumerate() {
        let _ = write!(out, "{:row_width$}", label(row_label));
        for value in &table.values[r] {
            match value {
                Some(v) => {
                    let _ = write!(out, "{:>width$.2}", v);
                }
                None => {
                    let _ = write!(out, "{:>width$}", "*");
                }
            }
        }
        out.push('\n');
    }
    let (r, c) = table.optimal_cell;
    let _ = writeln!(out, "optimal: {} / {}", label(&table.row_labels[r]), label(&table.col_labels[c]));
    out
}

fn render_backbone(s: &Scenario, b: &DecisionBackbone) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "decision backbone ({} policies)", b.policy_space_size());
    let _ = writeln!(out, "second decision period: {}", b.second_decision_period);
    if let Some(t) = &b.disperse_target {
        let _ = writeln!(out, "dispersant target: {t}");
    }
    for point in &b.points {
        let observes = if point.index == 1 {
            "observes nothing".to_string()
        } else if point.observes_trajectory_if_surveil {
            "observes trajectory iff surveillance was flown".to_string()
        } else {
            "observes nothing".to_string()
        };
        let _ = writeln!(out, "decision point {} ({observes}):", point.index);
        for strategy in &point.strategies {
            let map: Vec<String> = strategy
                .allocation
                .iter()
                .map(|(t, c)| format!("{t}:{c}"))
                .collect();
            let alloc = if map.is_empty() { "-".to_string() } else { map.join(" ") };
            let _ = writeln!(out, "  {:<10} {}", strategy.kind.name(), alloc);
            if point.index == 1 {
                let first = b.first_allocation(strategy.kind);
                for a in &first.assignments {
                    let _ = writeln!(
                        out,
                        "    {} -> {} (coverage {}, arrives period {})",
                        a.boom_id, a.sector, a.coverage, a.arrival_period
                    );
                }
            }
        }
    }
    let aircraft: Vec<&str> = b.aircraft_options.iter().map(|a| a.name()).collect();
    let _ = writeln!(
        out,
        "aircraft commitment: {} (executes period {})",
        aircraft.join(" | "),
        b.second_decision_period
    );
    if !b.shortfalls.is_empty() {
        let _ = writeln!(out, "shortfalls:");
        for sfall in &b.shortfalls {
            let _ = writeln!(out, "  {sfall}");
        }
    }
    let _ = writeln!(out, "pruned actions ({}):", b.pruned.len());
    for p in &b.pruned {
        let _ = writeln!(out, "  [{}] {}", p.reason.name(), p.description);
    }
    let _ = writeln!(
        out,
        "sector oil arrivals (undisturbed forecast): {}",
        s.sectors
            .iter()
            .enumerate()
            .map(|(i, sector)| match b.oil_arrival[i] {
                Some(j) => format!("{}:{}", sector.id, j),
                None => format!("{}:-", sector.id),
            })
            .collect::<Vec<_>>()
            .join(" ")
    );
    out
}

/// One row per period 0..=T, one column per sector, header row of sector ids.
pub fn render_csv(s: &Scenario, trace: &TrajectoryTrace) -> String {
    let mut out = String::new();
    let header: Vec<&str> = s.sectors.iter().map(|x| x.id.as_str()).collect();
    let _ = writeln!(out, "{}", header.join(","));
    for state in &trace.states {
        let row: Vec<String> = state.quantities.iter().map(|q| format!("{q:.6}")).collect();
        let _ = writeln!(out, "{}", row.join(","));
    }
    out
}
