//! Deterministic constraint layer standing in for the generative planner.
//!
//! From a scenario it derives the feasible equipment employments, orders
//! them completely by arrival time, prunes dominated boom choices, and
//! emits a two-period decision backbone: three first-period boom
//! strategies, an aircraft commitment (surveil or disperse), and four
//! second-period boom strategies. Only action sets and orderings are
//! produced here — the backbone never consults the objective function.
//!
//! Second-period strategies adjust the deployed picture without moving
//! equipment (deployed booms persist, staged booms fill deficits); only
//! the chase strategy relocates deployed booms, paying the relocation
//! delay. A relocation whose destination already saw oil before the boom
//! can arrive is against the spreading direction and flags the pair as
//! excluded by best practice.

use serde::Serialize;
use std::collections::BTreeMap;

use crate::equipment::{arrival_period, AircraftAction, AircraftKind, BoomAssignment, Deployment, Relocation};
use crate::error::SpillError;
use crate::scenario::{Scenario, SectorKind};
use crate::trajectory::{build_transitions, run_trajectory_with, SUPPORT_EPSILON};

/// Boom employment strategies, in report row order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum StrategyKind {
    /// One layer at the ship and at each protectable sensitive area.
    Equal,
    /// Three layers at the ship, sacrificing the smallest sensitive area.
    Stabilize,
    /// Three layers at the smallest sensitive area, ship uncontained.
    Protect,
    /// Switch to the protect allocation mid-plan by relocating deployed
    /// booms, paying the relocation delay.
    Chase,
    /// No boom employment.
    None,
}

impl StrategyKind {
    pub fn name(self) -> &'static str {
        match self {
            StrategyKind::Equal => "equal",
            StrategyKind::Stabilize => "stabilize",
            StrategyKind::Protect => "protect",
            StrategyKind::Chase => "chase",
            StrategyKind::None => "none",
        }
    }

    pub fn parse(name: &str) -> Option<StrategyKind> {
        match name {
            "equal" => Some(StrategyKind::Equal),
            "stabilize" => Some(StrategyKind::Stabilize),
            "protect" => Some(StrategyKind::Protect),
            "chase" => Some(StrategyKind::Chase),
            "none" => Some(StrategyKind::None),
            _ => None,
        }
    }
}

/// A named strategy with its target coverage map.
#[derive(Debug, Clone, PartialEq)]
pub struct Strategy {
    pub kind: StrategyKind,
    /// Required times-coverage per target sector id. Explicit zeros mark
    /// deliberate sacrifices.
    pub allocation: BTreeMap<String, u32>,
}

/// One feasible boom-to-target assignment, before pruning.
#[derive(Debug, Clone, PartialEq)]
pub struct FeasibleAction {
    pub boom_id: String,
    pub target: String,
    /// Layers this boom alone can provide at the target.
    pub coverage: u32,
    pub arrival_period: usize,
}

/// Why an action was removed from consideration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PruneReason {
    Dominance,
    InfeasibleByArrival,
    BestPractice,
}

impl PruneReason {
    pub fn name(self) -> &'static str {
        match self {
            PruneReason::Dominance => "dominance",
            PruneReason::InfeasibleByArrival => "infeasible-by-arrival",
            PruneReason::BestPractice => "best-practice",
        }
    }
}

/// A pruned action together with its machine-readable reason.
#[derive(Debug, Clone, PartialEq)]
pub struct PrunedAction {
    pub description: String,
    pub reason: PruneReason,
}

/// One decision point of the backbone.
#[derive(Debug, Clone)]
pub struct DecisionPoint {
    /// 1 or 2.
    pub index: u8,
    pub strategies: Vec<Strategy>,
    /// Whether the trajectory state is revealed before this choice when the
    /// aircraft was committed to surveillance. Always false at point 1.
    pub observes_trajectory_if_surveil: bool,
}

/// First-period boom placement resolved from a strategy map.
#[derive(Debug, Clone, Default)]
pub struct FirstAllocation {
    pub assignments: Vec<BoomAssignment>,
    /// Booms left at their staging sites.
    pub staged: Vec<String>,
}

/// Second-period completion for one (first, second) strategy pair.
#[derive(Debug, Clone, Default)]
pub struct PairPlan {
    pub fresh: Vec<BoomAssignment>,
    pub relocations: Vec<Relocation>,
    /// Relocations that run against the spreading direction; a non-empty
    /// list marks the pair as excluded by best practice.
    pub against_spread: Vec<String>,
}

/// The two-period decision backbone consumed by the solver.
#[derive(Debug, Clone)]
pub struct DecisionBackbone {
    pub points: Vec<DecisionPoint>,
    pub aircraft_options: Vec<AircraftKind>,
    pub pruned: Vec<PrunedAction>,
    /// Coverage requirements that could not be met with available boom
    /// length (informational).
    pub shortfalls: Vec<String>,
    /// Period of the second decision point (aircraft ready).
    pub second_decision_period: usize,
    /// Sector the dispersant sortie targets, chosen from the undisturbed
    /// forecast, not from objective values.
    pub disperse_target: Option<String>,
    /// First period the undisturbed unobserved trace exceeds the support
    /// threshold, per sector.
    pub oil_arrival: Vec<Option<usize>>,
    first_allocations: BTreeMap<StrategyKind, FirstAllocation>,
    pair_plans: BTreeMap<(StrategyKind, StrategyKind), PairPlan>,
}

impl DecisionBackbone {
    pub fn first_strategies(&self) -> Vec<StrategyKind> {
        self.points[0].strategies.iter().map(|s| s.kind).collect()
    }

    pub fn second_strategies(&self) -> Vec<StrategyKind> {
        self.points[1].strategies.iter().map(|s| s.kind).collect()
    }

    /// Cardinality of the policy product space.
    pub fn policy_space_size(&self) -> usize {
        self.points[0].strategies.len()
            * self.aircraft_options.len()
            * self.points[1].strategies.len()
    }

    pub fn first_allocation(&self, kind: StrategyKind) -> &FirstAllocation {
        self.first_allocations.get(&kind).expect("allocation built for every point-1 strategy")
    }

    pub fn pair_plan(&self, first: StrategyKind, second: StrategyKind) -> &PairPlan {
        self.pair_plans.get(&(first, second)).expect("pair plan built for every pair")
    }

    /// True when the (first, second) combination was excluded by best
    /// practice (its relocations move boom against the spreading direction).
    pub fn is_best_practice_pruned(&self, first: StrategyKind, second: StrategyKind) -> bool {
        self.pair_plans
            .get(&(first, second))
            .map(|p| !p.against_spread.is_empty())
            .unwrap_or(false)
    }

    /// Builds the concrete equipment plan for one policy leg.
    pub fn deployment_for(
        &self,
        s: &Scenario,
        first: StrategyKind,
        aircraft: AircraftKind,
        second: StrategyKind,
    ) -> Result<Deployment, SpillError> {
        let alloc = self.first_allocation(first);
        let pair = self.pair_plan(first, second);
        self.deployment_from_parts(s, alloc, pair, aircraft)
    }

    /// As [`Self::deployment_for`], but from an explicit first allocation
    /// (used when enumerating the unpruned assignment space).
    pub fn deployment_for_alloc(
        &self,
        s: &Scenario,
        alloc: &FirstAllocation,
        aircraft: AircraftKind,
        second: StrategyKind,
    ) -> Result<Deployment, SpillError> {
        let second_strategy = strategy_for(self, second);
        let pair = complete_second(
            s,
            alloc,
            &second_strategy,
            relocation_enabled_for(second),
            self.second_decision_period,
            &self.oil_arrival,
        );
        self.deployment_from_parts(s, alloc, &pair, aircraft)
    }

    /// The first-period deployment alone: no second-period completion, no
    /// dispersant. Its removal schedule matches any full policy leg on the
    /// periods before the second decision.
    pub fn deployment_from_first_only(
        &self,
        s: &Scenario,
        alloc: &FirstAllocation,
    ) -> Result<Deployment, SpillError> {
        self.deployment_from_parts(s, alloc, &PairPlan::default(), AircraftKind::Surveil)
    }

    fn deployment_from_parts(
        &self,
        s: &Scenario,
        alloc: &FirstAllocation,
        pair: &PairPlan,
        aircraft: AircraftKind,
    ) -> Result<Deployment, SpillError> {
        let mut booms = alloc.assignments.clone();
        booms.extend(pair.fresh.clone());
        let action = AircraftAction {
            kind: aircraft,
            sector: if aircraft == AircraftKind::Disperse {
                self.disperse_target.clone()
            } else {
                None
            },
            execute_period: self.second_decision_period,
        };
        Deployment::new(s, booms, action, pair.relocations.clone())
    }

    /// Restricts the action sets, for solver analysis on reduced spaces.
    pub fn restricted(
        &self,
        first: &[StrategyKind],
        second: &[StrategyKind],
    ) -> DecisionBackbone {
        let mut out = self.clone();
        out.points[0].strategies.retain(|s| first.contains(&s.kind));
        out.points[1].strategies.retain(|s| second.contains(&s.kind));
        out
    }

    /// The first-period assignment space with dominance pruning disabled:
    /// the dominant allocation plus every variant in which assignments are
    /// served by later-arriving equivalents (the choices the dominance rule
    /// removed). Only a boom's length at the target and its arrival period
    /// enter the dynamics, so a dominated alternative is exactly a later
    /// arrival for the same role.
    pub fn alternative_first_allocations(
        &self,
        s: &Scenario,
        kind: StrategyKind,
    ) -> Vec<FirstAllocation> {
        let canonical = self.first_allocation(kind).clone();
        let horizon = s.horizon();
        // Later arrivals available for each slot, from any boom option at
        // that target (capped to keep the product space small).
        let slot_arrivals: Vec<Vec<usize>> = canonical
            .assignments
            .iter()
            .map(|a| {
                let mut arrivals: Vec<usize> = s
                    .inventory
                    .booms
                    .iter()
                    .filter_map(|boom| arrival_period(&s.inventory, &boom.id, &a.sector, 0).ok())
                    .filter(|&x| x > a.arrival_period && x < horizon)
                    .collect();
                arrivals.sort_unstable();
                arrivals.dedup();
                arrivals.truncate(2);
                arrivals.insert(0, a.arrival_period);
                arrivals
            })
            .collect();
        let mut results = Vec::new();
        let mut indices = vec![0usize; slot_arrivals.len()];
        loop {
            let mut variant = canonical.clone();
            for (slot, &idx) in indices.iter().enumerate() {
                variant.assignments[slot].arrival_period = slot_arrivals[slot][idx];
            }
            results.push(variant);
            // advance mixed-radix counter
            let mut slot = 0;
            loop {
                if slot == indices.len() {
                    return results;
                }
                indices[slot] += 1;
                if indices[slot] < slot_arrivals[slot].len() {
                    break;
                }
                indices[slot] = 0;
                slot += 1;
            }
        }
    }
}

/// Second-period strategies other than protect adjust the picture by any
/// means, relocations included; protect is the pure continuation (chase is
/// its relocation variant).
fn relocation_enabled_for(kind: StrategyKind) -> bool {
    kind != StrategyKind::Protect && kind != StrategyKind::None
}

fn strategy_for(b: &DecisionBackbone, kind: StrategyKind) -> Strategy {
    b.points
        .iter()
        .flat_map(|p| &p.strategies)
        .find(|s| s.kind == kind)
        .cloned()
        .unwrap_or(Strategy { kind, allocation: BTreeMap::new() })
}

/// Enumerates every boom-to-target assignment with an achievable coverage
/// in {1,2,3} whose arrival period is inside the horizon, sorted by arrival
/// (ties: lower coverage, then boom id, then target id) — the complete
/// ordering of employment actions.
pub fn enumerate_feasible(s: &Scenario) -> Vec<FeasibleAction> {
    let (feasible, _) = enumerate_with_infeasible(s);
    feasible
}

fn enumerate_with_infeasible(s: &Scenario) -> (Vec<FeasibleAction>, Vec<PrunedAction>) {
    let mut actions = Vec::new();
    let mut infeasible = Vec::new();
    let horizon = s.horizon();
    for target in boom_targets(s) {
        let span = s.sector(&target).expect("target exists").span;
        for boom in &s.inventory.booms {
            let Ok(arrival) = arrival_period(&s.inventory, &boom.id, &target, 0) else {
                continue;
            };
            let max_cov = ((boom.length / span).floor() as u32).min(3);
            if max_cov == 0 {
                continue;
            }
            if arrival >= horizon {
                infeasible.push(PrunedAction {
                    description: format!(
                        "{} -> {} (arrival {} beyond horizon {})",
                        boom.id, target, arrival, horizon
                    ),
                    reason: PruneReason::InfeasibleByArrival,
                });
                continue;
            }
            for coverage in 1..=max_cov {
                actions.push(FeasibleAction {
                    boom_id: boom.id.clone(),
                    target: target.clone(),
                    coverage,
                    arrival_period: arrival,
                });
            }
        }
    }
    actions.sort_by(|a, b| {
        a.arrival_period
            .cmp(&b.arrival_period)
            .then(a.coverage.cmp(&b.coverage))
            .then(a.boom_id.cmp(&b.boom_id))
            .then(a.target.cmp(&b.target))
    });
    (actions, infeasible)
}

/// Keeps, per (target, coverage), only the earliest-arriving boom option;
/// later arrivals are dominated. Best-practice exclusions are pair-level
/// and recorded by [`build_backbone`], not here.
pub fn prune_dominated(actions: &[FeasibleAction]) -> (Vec<FeasibleAction>, Vec<PrunedAction>) {
    let mut best: BTreeMap<(String, u32), &FeasibleAction> = BTreeMap::new();
    for action in actions {
        let key = (action.target.clone(), action.coverage);
        let better = match best.get(&key) {
            Some(b) => {
                (action.arrival_period, action.boom_id.as_str())
                    < (b.arrival_period, b.boom_id.as_str())
            }
            None => true,
        };
        if better {
            best.insert(key, action);
        }
    }
    let mut kept = Vec::new();
    let mut pruned = Vec::new();
    for action in actions {
        let winner = best[&(action.target.clone(), action.coverage)];
        if winner == action {
            kept.push(action.clone());
        } else {
            pruned.push(PrunedAction {
                description: format!(
                    "{} -> {} coverage {} (arrival {}; {} arrives at {})",
                    action.boom_id,
                    action.target,
                    action.coverage,
                    action.arrival_period,
                    winner.boom_id,
                    winner.arrival_period
                ),
                reason: PruneReason::Dominance,
            });
        }
    }
    (kept, pruned)
}

/// Boom targets: the source sector plus every sensitive area.
fn boom_targets(s: &Scenario) -> Vec<String> {
    let mut targets = vec![s.source.clone()];
    for sector in s.sensitive_targets() {
        targets.push(sector.id.clone());
    }
    targets
}

/// Target iteration order: higher coverage first, then larger span, then id.
fn ordered_targets(s: &Scenario, map: &BTreeMap<String, u32>) -> Vec<(String, u32)> {
    let mut entries: Vec<(String, u32)> = map.iter().map(|(t, &c)| (t.clone(), c)).collect();
    entries.sort_by(|a, b| {
        let span = |t: &str| s.sector(t).map(|x| x.span).unwrap_or(0.0);
        b.1.cmp(&a.1)
            .then(span(&b.0).partial_cmp(&span(&a.0)).expect("spans are finite"))
            .then(a.0.cmp(&b.0))
    });
    entries
}

/// Greedy first-period allocation: for each required target, take booms in
/// arrival order (smallest adequate length first) until the coverage length
/// is met. Returns None when some requirement cannot be met.
fn allocate_first(s: &Scenario, strategy: &Strategy) -> Option<FirstAllocation> {
    let horizon = s.horizon();
    let mut available: Vec<&crate::scenario::Boom> = s.inventory.booms.iter().collect();
    let mut assignments = Vec::new();
    for (target, coverage) in ordered_targets(s, &strategy.allocation) {
        if coverage == 0 {
            continue;
        }
        let span = s.sector(&target)?.span;
        let required = coverage as f64 * span;
        let mut candidates: Vec<(usize, usize)> = available
            .iter()
            .enumerate()
            .filter_map(|(i, boom)| {
                arrival_period(&s.inventory, &boom.id, &target, 0)
                    .ok()
                    .filter(|&a| a < horizon)
                    .map(|a| (i, a))
            })
            .collect();
        candidates.sort_by(|&(i, a), &(j, b)| {
            a.cmp(&b)
                .then(available[i].length.partial_cmp(&available[j].length).expect("finite"))
                .then(available[i].id.cmp(&available[j].id))
        });
        let mut length = 0.0;
        let mut taken = Vec::new();
        for (i, arrival) in candidates {
            if length >= required {
                break;
            }
            length += available[i].length;
            taken.push((i, arrival));
        }
        if length < required {
            return None;
        }
        taken.sort_by_key(|&(i, _)| std::cmp::Reverse(i));
        for (i, arrival) in taken {
            let boom = available.remove(i);
            assignments.push(BoomAssignment {
                boom_id: boom.id.clone(),
                sector: target.clone(),
                coverage: ((boom.length / span).floor() as u32).min(3),
                arrival_period: arrival,
            });
        }
    }
    let staged = available.iter().map(|b| b.id.clone()).collect();
    assignments.sort_by(|a, b| {
        a.arrival_period
            .cmp(&b.arrival_period)
            .then(a.boom_id.cmp(&b.boom_id))
    });
    Some(FirstAllocation { assignments, staged })
}

/// Resolves the second-period picture for a (first allocation, second
/// strategy) pair.
///
/// Deployed booms persist. Deficits against the second strategy's map are
/// filled from staged booms (chase instead pulls deployed surplus booms
/// first — that is the chase mechanic), then, for relocation-enabled
/// strategies, by relocating surplus booms. Relocations arriving after oil
/// already reached the destination are flagged as against the spreading
/// direction.
fn complete_second(
    s: &Scenario,
    first: &FirstAllocation,
    second: &Strategy,
    relocation_enabled: bool,
    t2: usize,
    oil_arrival: &[Option<usize>],
) -> PairPlan {
    let horizon = s.horizon();
    let mut plan = PairPlan::default();
    // Current boom positions (boom id -> sector).
    let mut positions: BTreeMap<String, String> = first
        .assignments
        .iter()
        .map(|a| (a.boom_id.clone(), a.sector.clone()))
        .collect();
    let mut staged: Vec<String> = first.staged.clone();
    let length_of = |id: &str| {
        s.inventory.booms.iter().find(|b| b.id == id).map(|b| b.length).unwrap_or(0.0)
    };
    let have_at = |positions: &BTreeMap<String, String>, target: &str| -> f64 {
        positions
            .iter()
            .filter(|(_, sector)| sector.as_str() == target)
            .map(|(id, _)| length_of(id))
            .sum()
    };
    let requirement = |target: &str| -> f64 {
        let span = s.sector(target).map(|x| x.span).unwrap_or(f64::INFINITY);
        second.allocation.get(target).copied().unwrap_or(0) as f64 * span
    };

    for (target, coverage) in ordered_targets(s, &second.allocation) {
        if coverage == 0 {
            continue;
        }
        let span = s.sector(&target).map(|x| x.span).unwrap_or(f64::INFINITY);
        let mut deficit = coverage as f64 * span - have_at(&positions, &target);
        if deficit <= 0.0 {
            continue;
        }

        let pull_fresh = |deficit: &mut f64,
                              positions: &mut BTreeMap<String, String>,
                              staged: &mut Vec<String>,
                              plan: &mut PairPlan| {
            let mut candidates: Vec<(String, usize, f64)> = staged
                .iter()
                .filter_map(|id| {
                    arrival_period(&s.inventory, id, &target, t2)
                        .ok()
                        .filter(|&a| a < horizon)
                        .map(|a| (id.clone(), a, length_of(id)))
                })
                .collect();
            candidates.sort_by(|a, b| {
                a.1.cmp(&b.1)
                    .then(a.2.partial_cmp(&b.2).expect("finite"))
                    .then(a.0.cmp(&b.0))
            });
            for (id, arrival, length) in candidates {
                if *deficit <= 0.0 {
                    break;
                }
                staged.retain(|x| x != &id);
                positions.insert(id.clone(), target.clone());
                plan.fresh.push(BoomAssignment {
                    boom_id: id,
                    sector: target.clone(),
                    coverage: ((length / span).floor() as u32).min(3),
                    arrival_period: arrival,
                });
                *deficit -= length;
            }
        };

        let pull_donors = |deficit: &mut f64,
                               positions: &mut BTreeMap<String, String>,
                               plan: &mut PairPlan| {
            loop {
                if *deficit <= 0.0 {
                    break;
                }
                // Surplus booms: removal keeps the donor target at its own
                // requirement. Pull from the latest-threatened target first.
                let mut donors: Vec<(String, String, f64)> = positions
                    .iter()
                    .filter(|(_, sector)| sector.as_str() != target.as_str())
                    .filter(|(id, sector)| {
                        have_at(positions, sector) - length_of(id) >= requirement(sector)
                    })
                    .map(|(id, sector)| (id.clone(), sector.clone(), length_of(id)))
                    .collect();
                donors.sort_by(|a, b| {
                    let urgency = |sector: &str| {
                        s.sector_index(sector)
                            .and_then(|i| oil_arrival[i])
                            .unwrap_or(usize::MAX)
                    };
                    urgency(&b.1)
                        .cmp(&urgency(&a.1))
                        .then(a.2.partial_cmp(&b.2).expect("finite"))
                        .then(a.0.cmp(&b.0))
                });
                let Some((id, from, length)) = donors.into_iter().next() else {
                    break;
                };
                let depart = t2;
                let arrive = t2 + s.inventory.relocation_delay as usize;
                if arrive >= horizon {
                    break;
                }
                positions.insert(id.clone(), target.clone());
                plan.relocations.push(Relocation {
                    boom_id: id.clone(),
                    from_sector: from.clone(),
                    to_sector: target.clone(),
                    depart_period: depart,
                    arrive_period: arrive,
                });
                let dest_oil = s.sector_index(&target).and_then(|i| oil_arrival[i]);
                if let Some(oil) = dest_oil {
                    if oil < arrive {
                        plan.against_spread.push(format!(
                            "{} {} -> {} (oil reaches {} at period {}, boom at {})",
                            id, from, target, target, oil, arrive
                        ));
                    }
                }
                *deficit -= length;
            }
        };

        if relocation_enabled && second.kind == StrategyKind::Chase {
            pull_donors(&mut deficit, &mut positions, &mut plan);
            pull_fresh(&mut deficit, &mut positions, &mut staged, &mut plan);
        } else {
            pull_fresh(&mut deficit, &mut positions, &mut staged, &mut plan);
            if relocation_enabled {
                pull_donors(&mut deficit, &mut positions, &mut plan);
            }
        }
    }
    plan
}

fn build_strategy(
    s: &Scenario,
    kind: StrategyKind,
    protectable: &[String],
    smallest: Option<&str>,
) -> Strategy {
    let mut allocation = BTreeMap::new();
    match kind {
        StrategyKind::Equal => {
            allocation.insert(s.source.clone(), 1);
            for t in protectable {
                allocation.insert(t.clone(), 1);
            }
        }
        StrategyKind::Stabilize => {
            allocation.insert(s.source.clone(), 3);
            for t in protectable {
                let cov = if Some(t.as_str()) == smallest { 0 } else { 1 };
                allocation.insert(t.clone(), cov);
            }
        }
        StrategyKind::Protect | StrategyKind::Chase => {
            for t in protectable {
                let cov = if Some(t.as_str()) == smallest { 3 } else { 1 };
                allocation.insert(t.clone(), cov);
            }
        }
        StrategyKind::None => {}
    }
    Strategy { kind, allocation }
}

/// Builds the two-period decision backbone for a validated scenario.
///
/// Point 1 offers the surviving first-period boom strategies plus the
/// aircraft commitment; point 2 offers the second-period strategies
/// (including chase) and observes the trajectory exactly when the aircraft
/// flew surveillance.
pub fn build_backbone(s: &Scenario) -> Result<DecisionBackbone, SpillError> {
    let violations = crate::scenario::validate(s);
    if !violations.is_empty() {
        return Err(SpillError::Invalid(violations));
    }
    if s.sensitive_targets().len() < 2 {
        return Err(SpillError::UnsupportedStructure(
            "at least two sensitive areas required".into(),
        ));
    }
    let horizon = s.horizon();
    let t2 = (s.inventory.aircraft.prep_hours.ceil() as usize).clamp(1, horizon - 1);

    // Undisturbed unobserved forecast: threat times and the dispersant target.
    let transitions = build_transitions(s);
    let forecast = run_trajectory_with(s, &transitions, &Deployment::idle(s), None)?;
    let oil_arrival: Vec<Option<usize>> = (0..s.sector_count())
        .map(|i| (0..=horizon).find(|&j| forecast.states[j].quantities[i] > SUPPORT_EPSILON))
        .collect();
    // Forecast quantities during the sortie period, injection included.
    let mut sortie_forecast = forecast.states[t2].quantities.clone();
    if (t2 as u32) < s.spill.duration {
        let source = s.sector_index(&s.source).expect("validated");
        sortie_forecast[source] += s.spill.rate;
    }
    let disperse_target = s
        .sectors
        .iter()
        .enumerate()
        .filter(|(_, sector)| sector.kind == SectorKind::Sea)
        .max_by(|(i, _), (k, _)| {
            sortie_forecast[*i]
                .partial_cmp(&sortie_forecast[*k])
                .expect("finite")
                .then(k.cmp(i))
        })
        .map(|(_, sector)| sector.id.clone());

    let mut pruned = Vec::new();
    let (feasible, infeasible) = enumerate_with_infeasible(s);
    pruned.extend(infeasible);
    let (_kept, dominated) = prune_dominated(&feasible);
    pruned.extend(dominated);

    // Protectable sensitive areas: at least one boom option inside the horizon.
    let protectable: Vec<String> = s
        .sensitive_targets()
        .iter()
        .map(|sector| sector.id.clone())
        .filter(|id| feasible.iter().any(|a| &a.target == id))
        .collect();
    let smallest_sensitive = s
        .sensitive_targets()
        .iter()
        .min_by(|a, b| a.span.partial_cmp(&b.span).expect("finite").then(a.id.cmp(&b.id)))
        .map(|sector| sector.id.clone());
    let smallest_protectable = smallest_sensitive
        .as_deref()
        .filter(|id| protectable.iter().any(|p| p == id));

    let mut shortfalls = Vec::new();
    let mut first_allocations: BTreeMap<StrategyKind, FirstAllocation> = BTreeMap::new();
    let mut first_strategies: Vec<Strategy> = Vec::new();
    for kind in [StrategyKind::Equal, StrategyKind::Stabilize, StrategyKind::Protect] {
        if matches!(kind, StrategyKind::Protect) && smallest_protectable.is_none() {
            if !s.inventory.booms.is_empty() {
                pruned.push(PrunedAction {
                    description: format!(
                        "strategy protect (smallest sensitive area {} cannot be reached in time)",
                        smallest_sensitive.as_deref().unwrap_or("-")
                    ),
                    reason: PruneReason::InfeasibleByArrival,
                });
            }
            continue;
        }
        let strategy = build_strategy(s, kind, &protectable, smallest_protectable);
        match allocate_first(s, &strategy) {
            Some(alloc) => {
                first_allocations.insert(kind, alloc);
                first_strategies.push(strategy);
            }
            None => {
                if !s.inventory.booms.is_empty() {
                    shortfalls.push(format!(
                        "strategy {}: inventory boom length cannot meet its coverage map",
                        kind.name()
                    ));
                }
            }
        }
    }
    if first_strategies.is_empty() {
        first_strategies.push(Strategy { kind: StrategyKind::None, allocation: BTreeMap::new() });
        first_allocations.insert(
            StrategyKind::None,
            FirstAllocation {
                assignments: Vec::new(),
                staged: s.inventory.booms.iter().map(|b| b.id.clone()).collect(),
            },
        );
    }

    let mut second_strategies: Vec<Strategy> = Vec::new();
    for kind in [StrategyKind::Equal, StrategyKind::Stabilize, StrategyKind::Protect, StrategyKind::Chase] {
        if matches!(kind, StrategyKind::Protect | StrategyKind::Chase)
            && smallest_protectable.is_none()
        {
            if kind == StrategyKind::Chase && !s.inventory.booms.is_empty() {
                pruned.push(PrunedAction {
                    description: "strategy chase (no protect target to chase toward)".into(),
                    reason: PruneReason::InfeasibleByArrival,
                });
            }
            continue;
        }
        let strategy = build_strategy(s, kind, &protectable, smallest_protectable);
        // A second-period strategy is offered when the corresponding
        // first-period map was coverable at all (chase shares protect's map).
        let base_feasible = first_strategies.iter().any(|f| f.kind != StrategyKind::None)
            || s.inventory.booms.is_empty();
        if !s.inventory.booms.is_empty() && base_feasible {
            second_strategies.push(strategy);
        }
    }
    if second_strategies.is_empty() {
        second_strategies.push(Strategy { kind: StrategyKind::None, allocation: BTreeMap::new() });
    }

    // None appears in tables and as the normalization anchor, so its
    // allocation and pair plans are always built too.
    first_allocations.entry(StrategyKind::None).or_insert_with(|| FirstAllocation {
        assignments: Vec::new(),
        staged: s.inventory.booms.iter().map(|b| b.id.clone()).collect(),
    });

    let mut pair_plans = BTreeMap::new();
    let mut first_kinds: Vec<StrategyKind> = first_allocations.keys().copied().collect();
    if !first_kinds.contains(&StrategyKind::None) {
        first_kinds.push(StrategyKind::None);
    }
    let mut second_kinds: Vec<StrategyKind> =
        second_strategies.iter().map(|x| x.kind).collect();
    if !second_kinds.contains(&StrategyKind::None) {
        second_kinds.push(StrategyKind::None);
    }
    for &f in &first_kinds {
        let alloc = first_allocations.get(&f).expect("built above");
        for &b2 in &second_kinds {
            let strategy = second_strategies
                .iter()
                .find(|x| x.kind == b2)
                .cloned()
                .unwrap_or(Strategy { kind: b2, allocation: BTreeMap::new() });
            let relocation_enabled = relocation_enabled_for(b2);
            let plan = complete_second(s, alloc, &strategy, relocation_enabled, t2, &oil_arrival);
            for violation in &plan.against_spread {
                pruned.push(PrunedAction {
                    description: format!(
                        "{} then {}: relocation {}",
                        f.name(),
                        b2.name(),
                        violation
                    ),
                    reason: PruneReason::BestPractice,
                });
            }
            pair_plans.insert((f, b2), plan);
        }
    }

    let points = vec![
        DecisionPoint {
            index: 1,
            strategies: first_strategies,
            observes_trajectory_if_surveil: false,
        },
        DecisionPoint {
            index: 2,
            strategies: second_strategies,
            observes_trajectory_if_surveil: true,
        },
    ];

    Ok(DecisionBackbone {
        points,
        aircraft_options: vec![AircraftKind::Surveil, AircraftKind::Disperse],
        pruned,
        shortfalls,
        second_decision_period: t2,
        disperse_target,
        oil_arrival,
        first_allocations,
        pair_plans,
    })
}
