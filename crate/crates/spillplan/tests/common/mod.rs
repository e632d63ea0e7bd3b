//! Shared test support: a tiny deterministic RNG and random scenario
//! generation for oracle-equivalence and property suites.
#![allow(dead_code)] // each test binary uses a different slice of this

use std::collections::BTreeMap;

use spillplan::scenario::{
    Aircraft, Boom, EquipmentInventory, Hypothesis, Physics, Scenario, Sector, SectorKind, Spill,
    Thickness,
};

/// splitmix64: deterministic forever, no external dependency.
pub struct Rng(pub u64);

impl Rng {
    pub fn new(seed: u64) -> Rng {
        Rng(seed)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }

    /// Uniform in 0..n.
    pub fn below(&mut self, n: u64) -> u64 {
        self.next_u64() % n
    }

    /// Uniform in [0, 1).
    pub fn unit(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }
}

/// Builds a small random scenario with <= 6 sectors, two sensitive shore
/// areas, and rounded parameters. Always validates cleanly; the caller
/// should still skip scenarios whose baseline impact is degenerate.
pub fn random_scenario(rng: &mut Rng) -> Scenario {
    let n_sea = 2 + rng.below(2) as usize; // 2..=3
    let n_shore = 2 + rng.below(2) as usize; // 2..=3
    let mut sectors = Vec::new();
    for i in 0..n_sea {
        sectors.push(Sector {
            id: format!("A{}", i + 1),
            kind: SectorKind::Sea,
            sensitive: false,
            span: 100.0 * (1 + rng.below(6)) as f64,
        });
    }
    for i in 0..n_shore {
        sectors.push(Sector {
            id: format!("Z{}", i + 1),
            kind: SectorKind::Shore,
            sensitive: i < 2,
            span: 100.0 * (1 + rng.below(6)) as f64,
        });
    }

    let mut adjacency: Vec<[String; 2]> = Vec::new();
    let push_edge = |adjacency: &mut Vec<[String; 2]>, from: String, to: String| {
        if !adjacency.iter().any(|[f, t]| f == &from && t == &to) {
            adjacency.push([from, to]);
        }
    };
    for i in 0..n_sea {
        let from = format!("A{}", i + 1);
        if i + 1 < n_sea {
            push_edge(&mut adjacency, from.clone(), format!("A{}", i + 2));
        }
        // one random shore outlet per sea sector
        let shore = format!("Z{}", 1 + rng.below(n_shore as u64));
        push_edge(&mut adjacency, from.clone(), shore);
    }
    // sensitive areas stay reachable from the chain's end
    push_edge(&mut adjacency, format!("A{n_sea}"), "Z1".into());
    if rng.below(2) == 0 {
        push_edge(&mut adjacency, format!("A{n_sea}"), "Z2".into());
    }

    let n_booms = 1 + rng.below(3) as usize;
    let mut booms = Vec::new();
    for i in 0..n_booms {
        let mut transit_hours = BTreeMap::new();
        transit_hours.insert("A1".to_string(), 0.5 * rng.below(5) as f64);
        for z in 1..=2u64 {
            // occasionally a sensitive area is out of reach
            if rng.below(5) > 0 {
                transit_hours.insert(format!("Z{z}"), 0.5 * rng.below(7) as f64);
            }
        }
        booms.push(Boom {
            id: format!("R{}", i + 1),
            length: 100.0 * (2 + rng.below(8)) as f64,
            staging_site: "site".into(),
            transit_hours,
        });
    }

    let classes = 1 + rng.below(3);
    let hypotheses = match classes {
        1 => vec![],
        2 => vec![
            Hypothesis { weight: 0.5, spread_scale: -1.0 },
            Hypothesis { weight: 0.5, spread_scale: 1.0 },
        ],
        _ => vec![
            Hypothesis { weight: 0.25, spread_scale: -1.0 },
            Hypothesis { weight: 0.5, spread_scale: 0.0 },
            Hypothesis { weight: 0.25, spread_scale: 1.0 },
        ],
    };

    Scenario {
        sectors,
        adjacency,
        source: "A1".into(),
        spill: Spill {
            rate: 50.0 * (1 + rng.below(6)) as f64,
            duration: 1 + rng.below(3) as u32,
        },
        physics: Physics {
            horizon: 12 + 2 * rng.below(7) as u32,
            spread_rate: 0.4 + 0.05 * rng.below(9) as f64,
            uncertainty_factor: 0.05 * rng.below(4) as f64,
            thickness: Thickness { default: 1.0, per_sector: BTreeMap::new() },
            natural_decay: 0.0,
            spread_overrides: vec![],
            hypotheses,
        },
        inventory: EquipmentInventory {
            booms,
            aircraft: Aircraft {
                prep_hours: 0.5 * (1 + rng.below(5)) as f64,
                dispersant_efficiency: 0.1 * (1 + rng.below(8)) as f64,
            },
            boom_max_fraction: 0.5 + 0.1 * rng.below(5) as f64,
            boom_curve_exponent: 1.0,
            reference_thickness: 1.0,
            relocation_delay: 1 + rng.below(2) as u32,
        },
    }
}

/// Yields the next random scenario that validates, builds a backbone, and
/// has a non-degenerate baseline.
pub fn next_solvable_scenario(
    rng: &mut Rng,
) -> (Scenario, spillplan::backbone::DecisionBackbone) {
    loop {
        let s = random_scenario(rng);
        if !spillplan::scenario::validate(&s).is_empty() {
            continue;
        }
        let Ok(b) = spillplan::backbone::build_backbone(&s) else {
            continue;
        };
        if spillplan::solver::brute_force(&s, &b).is_ok() {
            return (s, b);
        }
    }
}
