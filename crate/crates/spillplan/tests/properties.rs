//! Property suites for the transport and solver invariants.

mod common;

use common::{next_solvable_scenario, Rng};
use proptest::prelude::*;
use spillplan::scenario::validate;
use spillplan::solver::brute_force;
use spillplan::trajectory::{apply_uncertainty, propagate, Matrix, OilState};

fn stochastic_matrix(dim: usize) -> impl Strategy<Value = Matrix> {
    proptest::collection::vec(proptest::collection::vec(1e-3..1.0f64, dim), dim).prop_map(
        |rows| {
            let normalized: Vec<Vec<f64>> = rows
                .into_iter()
                .map(|row| {
                    let total: f64 = row.iter().sum();
                    row.into_iter().map(|x| x / total).collect()
                })
                .collect();
            Matrix::from_rows(normalized)
        },
    )
}

fn state_and_removal(dim: usize) -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    (
        proptest::collection::vec(0.0..1e4f64, dim),
        proptest::collection::vec(0.0..1.0f64, dim),
    )
        .prop_map(|(q, fractions)| {
            let removal = q.iter().zip(&fractions).map(|(a, b)| a * b).collect();
            (q, removal)
        })
}

proptest! {
    /// Products of row-stochastic matrices stay row-stochastic.
    #[test]
    fn stochasticity_is_closed_under_products(
        a in stochastic_matrix(12),
        b in stochastic_matrix(12),
    ) {
        let product = apply_uncertainty(&a, &b).unwrap();
        prop_assert!(product.is_row_stochastic(1e-9));
    }

    /// One propagation step conserves the post-removal mass.
    #[test]
    fn propagation_conserves_mass(
        m in stochastic_matrix(6),
        (quantities, removal) in state_and_removal(6),
    ) {
        let state = OilState { quantities, fractile_p: 0.5, period: 0 };
        let removed: f64 = removal.iter().sum();
        let next = propagate(&state, &m, &removal).unwrap();
        let expected = state.total() - removed;
        prop_assert!((next.total() - expected).abs() <= 1e-9 * expected.max(1.0));
    }

    /// Transport is linear: scaling the state and removal scales the result.
    #[test]
    fn propagation_is_homogeneous(
        m in stochastic_matrix(5),
        (quantities, removal) in state_and_removal(5),
        alpha in 0.0..8.0f64,
    ) {
        let state = OilState { quantities: quantities.clone(), fractile_p: 0.5, period: 0 };
        let scaled = OilState {
            quantities: quantities.iter().map(|q| q * alpha).collect(),
            fractile_p: 0.5,
            period: 0,
        };
        let scaled_removal: Vec<f64> = removal.iter().map(|r| r * alpha).collect();
        let base = propagate(&state, &m, &removal).unwrap();
        let big = propagate(&scaled, &m, &scaled_removal).unwrap();
        for (x, y) in base.quantities.iter().zip(&big.quantities) {
            prop_assert!((y - x * alpha).abs() <= 1e-9 * (x * alpha).abs().max(1.0));
        }
    }

    /// Removal fractions compose symmetrically and never exceed one.
    #[test]
    fn removal_composition_is_bounded_and_symmetric(f in 0.0..1.0f64, g in 0.0..1.0f64) {
        let fg = 1.0 - (1.0 - f) * (1.0 - g);
        let gf = 1.0 - (1.0 - g) * (1.0 - f);
        prop_assert!((0.0..=1.0).contains(&fg));
        prop_assert_eq!(fg, gf);
    }
}

/// Serialization round-trips random scenarios field for field.
#[test]
fn scenario_round_trip_is_identity() {
    let mut rng = Rng::new(0x5eed_0100);
    for _ in 0..50 {
        let s = common::random_scenario(&mut rng);
        if !validate(&s).is_empty() {
            continue;
        }
        let text = s.serialize_to_string().unwrap();
        let back: spillplan::scenario::Scenario = serde_json::from_str(&text).unwrap();
        assert_eq!(s, back);
    }
}

/// Widening the action sets never worsens the optimum.
#[test]
fn monotonicity_in_available_actions() {
    let mut rng = Rng::new(0x5eed_0101);
    for _ in 0..20 {
        let (s, b) = next_solvable_scenario(&mut rng);
        let full = brute_force(&s, &b).unwrap().value;
        let firsts = b.first_strategies();
        let seconds = b.second_strategies();
        if firsts.len() < 2 && seconds.len() < 2 {
            continue;
        }
        let restricted = b.restricted(&firsts[..1.max(firsts.len() - 1)], &seconds);
        let fewer = brute_force(&s, &restricted).unwrap().value;
        assert!(full <= fewer + 1e-12, "full {full} vs restricted {fewer}");
    }
}

/// Surveillance collapse keeps the observed support inside the blind one
/// up to the observation period. Past it the comparison loses meaning:
/// the widened trace also reaches the absorbing shore faster, so its sea
/// residuals can fall under the support threshold while the observed
/// trace still holds measurable oil.
#[test]
fn collapse_support_is_contained_on_random_scenarios() {
    let mut rng = Rng::new(0x5eed_0102);
    let mut checked = 0;
    while checked < 25 {
        let (s, b) = next_solvable_scenario(&mut rng);
        if s.physics.uncertainty_factor == 0.0 {
            continue;
        }
        let idle = spillplan::equipment::Deployment::idle(&s);
        let t_obs = b.second_decision_period;
        let blind = spillplan::trajectory::run_trajectory(&s, &idle, None).unwrap();
        let observed = spillplan::trajectory::run_trajectory(&s, &idle, Some(t_obs)).unwrap();
        for j in 0..=t_obs {
            let blind_support = blind.support_at(j);
            for idx in observed.support_at(j) {
                assert!(
                    blind_support.contains(&idx),
                    "period {j}: observed sector {idx} missing from blind support"
                );
            }
        }
        checked += 1;
    }
}
