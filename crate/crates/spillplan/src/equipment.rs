//! The removal function e_j(s_j): boom containment at discrete coverage
//! levels, dispersant pulses, and arrival-time arithmetic.
//!
//! Removal is fractional — each active piece of equipment takes a fixed
//! fraction of whatever oil sits in its sector that period — which keeps
//! the dynamics linear in the oil quantities and lets transition matrices
//! be pre-calculated independently of the plan. Independent layers compose
//! as survival products: removing fractions f and g together removes
//! 1 - (1-f)(1-g).

use serde::Serialize;

use crate::error::SpillError;
use crate::scenario::{EquipmentInventory, Scenario, SectorKind};
use crate::trajectory::OilState;

/// What the single aircraft is tasked with.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum AircraftKind {
    /// Fly the spill and observe the true trajectory.
    Surveil,
    /// Spread chemical dispersants over one sector.
    Disperse,
}

impl AircraftKind {
    pub fn name(self) -> &'static str {
        match self {
            AircraftKind::Surveil => "surveil",
            AircraftKind::Disperse => "disperse",
        }
    }
}

/// The one aircraft sortie of a plan.
#[derive(Debug, Clone, PartialEq)]
pub struct AircraftAction {
    pub kind: AircraftKind,
    /// Target sector; meaningful only when dispersing.
    pub sector: Option<String>,
    pub execute_period: usize,
}

/// One boom stationed at a target sector.
#[derive(Debug, Clone, PartialEq)]
pub struct BoomAssignment {
    pub boom_id: String,
    pub sector: String,
    /// Layers of coverage this boom alone provides at the target, in {0,1,2,3}.
    pub coverage: u32,
    pub arrival_period: usize,
}

/// A deployed boom picked up and moved to a new sector. Reuse takes time:
/// the boom contributes nowhere between departure and arrival.
#[derive(Debug, Clone, PartialEq)]
pub struct Relocation {
    pub boom_id: String,
    pub from_sector: String,
    pub to_sector: String,
    pub depart_period: usize,
    pub arrive_period: usize,
}

/// A complete equipment plan, compiled at construction into a per-period,
/// per-sector removal-fraction schedule.
#[derive(Debug, Clone)]
pub struct Deployment {
    pub booms: Vec<BoomAssignment>,
    pub aircraft: AircraftAction,
    pub relocations: Vec<Relocation>,
    /// fractions[j][k]: share of sector k's oil removed in period j.
    fractions: Vec<Vec<f64>>,
}

impl Deployment {
    /// Validates the plan against the scenario and compiles its removal
    /// schedule.
    pub fn new(
        s: &Scenario,
        booms: Vec<BoomAssignment>,
        aircraft: AircraftAction,
        relocations: Vec<Relocation>,
    ) -> Result<Deployment, SpillError> {
        for a in &booms {
            if a.coverage > 3 {
                return Err(SpillError::CoverageOutOfRange(a.coverage));
            }
            if s.sector_index(&a.sector).is_none() {
                return Err(SpillError::UnknownSector(a.sector.clone()));
            }
            boom_spec(&s.inventory, &a.boom_id)?;
        }
        let mut assigned: Vec<&str> = booms.iter().map(|a| a.boom_id.as_str()).collect();
        assigned.sort_unstable();
        if let Some(w) = assigned.windows(2).find(|w| w[0] == w[1]) {
            return Err(SpillError::BoomConflict { boom: w[0].to_string(), period: 0 });
        }
        for r in &relocations {
            if r.arrive_period <= r.depart_period {
                return Err(SpillError::InvalidPolicy(format!(
                    "relocation of {:?} must arrive strictly after departing",
                    r.boom_id
                )));
            }
            let placed = booms
                .iter()
                .find(|a| a.boom_id == r.boom_id && a.sector == r.from_sector);
            if placed.is_none() {
                return Err(SpillError::InvalidPolicy(format!(
                    "relocation of {:?} from {:?} does not match any assignment",
                    r.boom_id, r.from_sector
                )));
            }
            if s.sector_index(&r.to_sector).is_none() {
                return Err(SpillError::UnknownSector(r.to_sector.clone()));
            }
        }
        if aircraft.kind == AircraftKind::Disperse {
            match &aircraft.sector {
                None => {
                    return Err(SpillError::InvalidPolicy(
                        "disperse action needs a target sector".into(),
                    ))
                }
                Some(id) if s.sector_index(id).is_none() => {
                    return Err(SpillError::UnknownSector(id.clone()))
                }
                _ => {}
            }
        }
        let fractions = compile_schedule(s, &booms, &aircraft, &relocations);
        Ok(Deployment { booms, aircraft, relocations, fractions })
    }

    /// The empty plan: no booms, aircraft held for surveillance.
    pub fn idle(s: &Scenario) -> Deployment {
        let execute = s.inventory.aircraft.prep_hours.ceil() as usize;
        Deployment::new(
            s,
            Vec::new(),
            AircraftAction { kind: AircraftKind::Surveil, sector: None, execute_period: execute },
            Vec::new(),
        )
        .expect("empty deployment is always valid")
    }

    /// Barrels removed per sector in `period`, proportional to the state.
    pub fn removal_vector(&self, state: &OilState, period: usize) -> Vec<f64> {
        let row = &self.fractions[period.min(self.fractions.len() - 1)];
        state.quantities.iter().zip(row).map(|(&q, &f)| q * f).collect()
    }

    /// The compiled removal-fraction schedule (periods x sectors).
    pub fn fraction_schedule(&self) -> &[Vec<f64>] {
        &self.fractions
    }
}

/// Fraction of a sector's oil a boom deployment contains per period.
///
/// Zero at coverage 0 — anything under one full layer is useless, the oil
/// just flows around it — then strictly increasing over {1,2,3} along
/// f(c) = boom_max_fraction * (c/3)^exponent, scaled down when the slick
/// is thinner than the reference thickness.
pub fn boom_removal_fraction(
    inventory: &EquipmentInventory,
    coverage: u32,
    thickness_mm: f64,
) -> Result<f64, SpillError> {
    if coverage > 3 {
        return Err(SpillError::CoverageOutOfRange(coverage));
    }
    if coverage == 0 {
        return Ok(0.0);
    }
    let base = inventory.boom_max_fraction
        * (coverage as f64 / 3.0).powf(inventory.boom_curve_exponent);
    let thickness_factor = (thickness_mm / inventory.reference_thickness).min(1.0);
    Ok(base * thickness_factor)
}

/// Period a boom reaches a sector when dispatched at `depart_period`:
/// transit hours round up to whole periods.
pub fn arrival_period(
    inventory: &EquipmentInventory,
    boom_id: &str,
    sector_id: &str,
    depart_period: usize,
) -> Result<usize, SpillError> {
    let boom = boom_spec(inventory, boom_id)?;
    let hours = boom.transit_hours.get(sector_id).ok_or_else(|| SpillError::Unreachable {
        boom: boom_id.to_string(),
        sector: sector_id.to_string(),
    })?;
    Ok(depart_period + hours.ceil() as usize)
}

fn boom_spec<'a>(
    inventory: &'a EquipmentInventory,
    boom_id: &str,
) -> Result<&'a crate::scenario::Boom, SpillError> {
    inventory
        .booms
        .iter()
        .find(|b| b.id == boom_id)
        .ok_or_else(|| SpillError::UnknownBoom(boom_id.to_string()))
}

fn compile_schedule(
    s: &Scenario,
    booms: &[BoomAssignment],
    aircraft: &AircraftAction,
    relocations: &[Relocation],
) -> Vec<Vec<f64>> {
    let horizon = s.horizon();
    let n = s.sector_count();

    // Presence windows: (sector index, boom length, from period, to period).
    let mut windows: Vec<(usize, f64, usize, usize)> = Vec::new();
    for a in booms {
        let sector = s.sector_index(&a.sector).expect("validated");
        let length = boom_spec(&s.inventory, &a.boom_id).expect("validated").length;
        let until = relocations
            .iter()
            .find(|r| r.boom_id == a.boom_id && r.from_sector == a.sector)
            .map(|r| r.depart_period)
            .unwrap_or(horizon);
        windows.push((sector, length, a.arrival_period, until));
    }
    for r in relocations {
        let sector = s.sector_index(&r.to_sector).expect("validated");
        let length = boom_spec(&s.inventory, &r.boom_id).expect("validated").length;
        windows.push((sector, length, r.arrive_period, horizon));
    }

    let mut schedule = vec![vec![0.0; n]; horizon];
    for (j, row) in schedule.iter_mut().enumerate() {
        for (k, sector) in s.sectors.iter().enumerate() {
            let length: f64 = windows
                .iter()
                .filter(|&&(sec, _, from, to)| sec == k && j >= from && j < to)
                .map(|&(_, len, _, _)| len)
                .sum();
            let layers = ((length / sector.span).floor() as u32).min(3);
            let boom_fraction =
                boom_removal_fraction(&s.inventory, layers, s.physics.thickness.at(&sector.id))
                    .expect("layers capped at 3");
            let mut survival = 1.0 - boom_fraction;
            if aircraft.kind == AircraftKind::Disperse
                && j == aircraft.execute_period
                && aircraft.sector.as_deref() == Some(sector.id.as_str())
            {
                survival *= 1.0 - s.inventory.aircraft.dispersant_efficiency;
            }
            if sector.kind == SectorKind::Sea {
                survival *= 1.0 - s.physics.natural_decay;
            }
            row[k] = 1.0 - survival;
        }
    }
    schedule
}
