//! Acceptance suite: one test per criterion, each printing a pass line
//! with the measured figures. Tolerances are pinned here, not configurable.

mod common;

use std::time::Instant;

use common::{next_solvable_scenario, Rng};
use spillplan::backbone::{build_backbone, StrategyKind};
use spillplan::cli::{self, CommandKind, OutputFormat, RunConfig, SolverChoice};
use spillplan::demo_scenario_path;
use spillplan::equipment::AircraftKind;
use spillplan::scenario::{load_scenario, Scenario};
use spillplan::solver::{
    backward_induct, brute_force, brute_force_unpruned, evaluate_plan, stage_return_table,
    value_of_surveillance, Policy, SecondChoice,
};
use spillplan::trajectory::{propagate, Matrix, OilState};

fn demo() -> Scenario {
    load_scenario(demo_scenario_path()).expect("demo scenario loads")
}

fn pass(n: u32, detail: &str) {
    println!("criterion {n:2} PASS: {detail}");
}

#[test]
fn acceptance_01_structural_counts() {
    let start = Instant::now();
    let s = demo();
    let b = build_backbone(&s).unwrap();
    let brute = brute_force(&s, &b).unwrap();
    let staged = backward_induct(&s, &b).unwrap();
    assert_eq!(brute.evaluations_bruteforce, 24, "3 x 2 x 4 policies");
    assert_eq!(staged.evaluations_staged, 11, "8 + 3 staged evaluations");
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 1.0, "took {elapsed:?}");
    pass(1, &format!("24 brute-force policies, 11 staged evaluations in {elapsed:?}"));
}

#[test]
fn acceptance_02_oracle_equivalence() {
    let start = Instant::now();
    let s = demo();
    let b = build_backbone(&s).unwrap();
    let brute = brute_force(&s, &b).unwrap();
    let staged = backward_induct(&s, &b).unwrap();
    assert!((brute.value - staged.value).abs() <= 1e-12);
    assert_eq!(brute.optimal_policy, staged.optimal_policy);

    let mut rng = Rng::new(0x5eed_0002);
    let mut max_delta: f64 = 0.0;
    for case in 0..100 {
        let (s, full) = next_solvable_scenario(&mut rng);
        // restrict to at most 3 actions per decision point
        let subset = |rng: &mut Rng, options: &[StrategyKind]| -> Vec<StrategyKind> {
            let take = 1 + rng.below(options.len().min(3) as u64) as usize;
            let mut picked: Vec<StrategyKind> = Vec::new();
            let mut offset = rng.below(options.len() as u64) as usize;
            while picked.len() < take {
                let cand = options[offset % options.len()];
                if !picked.contains(&cand) {
                    picked.push(cand);
                }
                offset += 1;
            }
            picked
        };
        let firsts = subset(&mut rng, &full.first_strategies());
        let seconds = subset(&mut rng, &full.second_strategies());
        let restricted = full.restricted(&firsts, &seconds);
        let brute = brute_force(&s, &restricted).unwrap();
        let staged = backward_induct(&s, &restricted).unwrap();
        let delta = (brute.value - staged.value).abs();
        assert!(
            delta <= 1e-12,
            "case {case}: brute {} vs staged {}",
            brute.value,
            staged.value
        );
        assert_eq!(
            brute.optimal_policy, staged.optimal_policy,
            "case {case}: argmin mismatch"
        );
        max_delta = max_delta.max(delta);
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 10.0, "took {elapsed:?}");
    pass(2, &format!("demo + 100 random backbones agree, max |delta| = {max_delta:.2e}, {elapsed:?}"));
}

#[test]
fn acceptance_03_normalization_anchor() {
    let s = demo();
    let b = build_backbone(&s).unwrap();
    let classes = s.hypotheses().len();
    let value = evaluate_plan(&s, &b, &Policy::none(classes)).unwrap();
    assert!((value - 1.0).abs() <= 1e-12, "none policy value {value}");
    let table = stage_return_table(&s, &b, 2).unwrap();
    let row = table.row_labels.iter().position(|l| l == "none").unwrap();
    let col = table.col_labels.iter().position(|l| l == "surveil").unwrap();
    let cell = table.values[row][col].unwrap();
    assert!((cell - 1.0).abs() <= 1e-12, "(none, surveil) cell {cell}");
    pass(3, &format!("none policy = {value:.15}, (none, surveil) cell = {cell:.15}"));
}

#[test]
fn acceptance_04_table1_ordinal_reproduction() {
    let s = demo();
    let b = build_backbone(&s).unwrap();
    let table = stage_return_table(&s, &b, 2).unwrap();
    let surveil = table.col_labels.iter().position(|l| l == "surveil").unwrap();
    let disperse = table.col_labels.iter().position(|l| l == "disperse").unwrap();
    for (r, label) in table.row_labels.iter().enumerate() {
        let sv = table.values[r][surveil].unwrap();
        let dv = table.values[r][disperse].unwrap();
        assert!(dv <= sv, "row {label}: disperse {dv} > surveil {sv}");
    }
    let (r, c) = table.optimal_cell;
    assert!(
        table.row_labels[r] == "protect" || table.row_labels[r] == "stabilize",
        "stage-2 argmin boom row is {}",
        table.row_labels[r]
    );
    assert_eq!(table.col_labels[c], "disperse");
    pass(4, &format!(
        "dispersants dominate surveillance in every boom row; stage-2 argmin = ({}, {})",
        table.row_labels[r], table.col_labels[c]
    ));
}

#[test]
fn acceptance_05_headline_result() {
    let s = demo();
    let b = build_backbone(&s).unwrap();
    let result = backward_induct(&s, &b).unwrap();
    assert!(result.value <= 0.05, "optimal value {}", result.value);
    assert_eq!(result.optimal_policy.first_boom, StrategyKind::Stabilize);
    pass(5, &format!(
        "optimal value {:.4} <= 0.05 with first-period stabilize ({})",
        result.value,
        result.optimal_policy.name()
    ));
}

#[test]
fn acceptance_06_conservation_and_stochasticity() {
    let start = Instant::now();
    let s = demo();
    let t = spillplan::trajectory::build_transitions(&s);
    for j in 0..s.horizon() {
        assert!(t.observed[j].is_row_stochastic(1e-9));
        assert!(t.uncertain[j].is_row_stochastic(1e-9));
    }

    let mut rng = Rng::new(0x5eed_0006);
    let mut steps = 0usize;
    while steps < 1000 {
        let dim = 3 + rng.below(4) as usize;
        let absorbing = 1 + rng.below(dim as u64 - 1) as usize;
        let mut rows = Vec::with_capacity(dim);
        for i in 0..dim {
            if i >= dim - absorbing {
                let mut row = vec![0.0; dim];
                row[i] = 1.0;
                rows.push(row);
            } else {
                let mut row: Vec<f64> = (0..dim).map(|_| rng.unit()).collect();
                let total: f64 = row.iter().sum();
                for x in &mut row {
                    *x /= total;
                }
                rows.push(row);
            }
        }
        let m = Matrix::from_rows(rows);
        assert!(m.is_row_stochastic(1e-9));
        // products of stochastic matrices stay stochastic
        assert!(m.mul(&m).unwrap().is_row_stochastic(1e-9));

        let mut state = OilState {
            quantities: (0..dim).map(|_| 1000.0 * rng.unit()).collect(),
            fractile_p: 0.5,
            period: 0,
        };
        for _ in 0..10 {
            let removal: Vec<f64> = state
                .quantities
                .iter()
                .enumerate()
                .map(|(i, &q)| if i < dim - absorbing { q * rng.unit() } else { 0.0 })
                .collect();
            let before: f64 = state.total();
            let removed: f64 = removal.iter().sum();
            let shore_before: f64 = state.quantities[dim - absorbing..].iter().sum();
            let next = propagate(&state, &m, &removal).unwrap();
            let shore_after: f64 = next.quantities[dim - absorbing..].iter().sum();
            assert!(
                (next.total() - (before - removed)).abs() <= 1e-9,
                "mass balance violated"
            );
            assert!(shore_after >= shore_before - 1e-9, "shore mass decreased");
            state = next;
            steps += 1;
        }
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 5.0, "took {elapsed:?}");
    pass(6, &format!("{steps} randomized propagation steps conserved mass, {elapsed:?}"));
}

#[test]
fn acceptance_07_free_information() {
    let mut rng = Rng::new(0x5eed_0007);
    let mut checked = 0;
    let mut min_voi = f64::INFINITY;
    let mut max_voi: f64 = 0.0;
    while checked < 100 {
        let (s, b) = next_solvable_scenario(&mut rng);
        if s.hypotheses().len() < 2 {
            continue;
        }
        let voi = value_of_surveillance(&s, &b).unwrap();
        assert!(
            voi.free_voi >= -1e-12,
            "free information hurt: {}",
            voi.free_voi
        );
        min_voi = min_voi.min(voi.free_voi);
        max_voi = max_voi.max(voi.free_voi);
        checked += 1;
    }
    pass(7, &format!(
        "free_voi in [{min_voi:.2e}, {max_voi:.2e}] over {checked} multi-hypothesis scenarios"
    ));
}

#[test]
fn acceptance_08_pruning_soundness() {
    let s = demo();
    let b = build_backbone(&s).unwrap();
    let pruned_opt = brute_force(&s, &b).unwrap().value;
    let unpruned_opt = brute_force_unpruned(&s, &b).unwrap();
    assert!(
        (pruned_opt - unpruned_opt).abs() <= 1e-12,
        "demo: pruned {pruned_opt} vs unpruned {unpruned_opt}"
    );

    let mut rng = Rng::new(0x5eed_0008);
    for case in 0..50 {
        let (s, b) = next_solvable_scenario(&mut rng);
        let pruned = brute_force(&s, &b).unwrap().value;
        let unpruned = brute_force_unpruned(&s, &b).unwrap();
        assert!(
            (pruned - unpruned).abs() <= 1e-12,
            "case {case}: pruned {pruned} vs unpruned {unpruned}"
        );
    }
    pass(8, "dominance pruning never removed an optimum (demo + 50 random scenarios)");
}

#[test]
fn acceptance_09_scale_invariance() {
    let s = demo();
    let b = build_backbone(&s).unwrap();
    let reference: Vec<((StrategyKind, AircraftKind, StrategyKind), f64)> =
        policy_values(&s, &b);
    for factor in [0.5, 2.0, 10.0] {
        let mut scaled = s.clone();
        scaled.spill.rate *= factor;
        let sb = build_backbone(&scaled).unwrap();
        let values = policy_values(&scaled, &sb);
        for ((key, base), (skey, scaled_value)) in reference.iter().zip(&values) {
            assert_eq!(key, skey);
            assert!(
                (base - scaled_value).abs() <= 1e-9,
                "{key:?} at x{factor}: {base} vs {scaled_value}"
            );
        }
    }
    pass(9, &format!(
        "all {} policy legs invariant under spill-rate scaling by 0.5, 2, 10",
        reference.len()
    ));
}

fn policy_values(
    s: &Scenario,
    b: &spillplan::backbone::DecisionBackbone,
) -> Vec<((StrategyKind, AircraftKind, StrategyKind), f64)> {
    let classes = s.hypotheses().len();
    let mut out = Vec::new();
    for f in b.first_strategies() {
        for a in b.aircraft_options.clone() {
            for b2 in b.second_strategies() {
                let policy = match a {
                    AircraftKind::Disperse => Policy {
                        first_boom: f,
                        aircraft: a,
                        second_boom: SecondChoice::Fixed(b2),
                    },
                    AircraftKind::Surveil => Policy {
                        first_boom: f,
                        aircraft: a,
                        second_boom: SecondChoice::Contingent(vec![b2; classes]),
                    },
                };
                out.push(((f, a, b2), evaluate_plan(s, b, &policy).unwrap()));
            }
        }
    }
    out
}

#[test]
fn acceptance_10_cli_contract() {
    let dir = tempfile::tempdir().unwrap();
    let golden_dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden");

    // machine comparison record with identical argmins
    let mut cfg = RunConfig::new(CommandKind::Solve, demo_scenario_path());
    cfg.solver = SolverChoice::Both;
    cfg.format = OutputFormat::Machine;
    cfg.output_dir = dir.path().to_path_buf();
    let summary = cli::run(&cfg).unwrap();
    assert!(summary.contains("24 brute-force vs 11 staged evaluations"));
    assert!(summary.contains("argmins match"));
    let record: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("solve_result.json")).unwrap())
            .unwrap();
    assert_eq!(record["argmin_match"], serde_json::Value::Bool(true));
    assert_eq!(record["brute"]["optimal_policy"], record["staged"]["optimal_policy"]);
    assert_eq!(record["brute"]["evaluations_bruteforce"], 24);
    assert_eq!(record["staged"]["evaluations_staged"], 11);

    // golden text tables: two decimals, `*` cells
    let mut cfg = RunConfig::new(CommandKind::Solve, demo_scenario_path());
    cfg.output_dir = dir.path().to_path_buf();
    cli::run(&cfg).unwrap();
    for name in ["stage2_table.txt", "stage1_table.txt"] {
        let got = std::fs::read_to_string(dir.path().join(name)).unwrap();
        let want = std::fs::read_to_string(golden_dir.join(name)).unwrap();
        assert_eq!(got, want, "{name} differs from golden");
    }

    // golden trace CSV: header + 25 rows x 12 sector columns
    let mut cfg = RunConfig::new(CommandKind::Trace, demo_scenario_path());
    cfg.policy = Some("none".into());
    cfg.output_dir = dir.path().to_path_buf();
    cli::run(&cfg).unwrap();
    let csv = std::fs::read_to_string(dir.path().join("trace_none_blind.csv")).unwrap();
    let lines: Vec<&str> = csv.trim_end().lines().collect();
    assert_eq!(lines.len(), 26, "header + 25 periods");
    for line in &lines {
        assert_eq!(line.split(',').count(), 12, "12 sector columns");
    }
    let want = std::fs::read_to_string(golden_dir.join("trace_none_blind.csv")).unwrap();
    assert_eq!(csv, want, "trace CSV differs from golden");

    pass(10, "comparison record consistent; text tables and trace CSV match goldens");
}
