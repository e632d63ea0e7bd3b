//! World-model data types: sectors, spill parameters, equipment inventory.
//!
//! A scenario file is a strict JSON document (unknown keys rejected) whose
//! sector ordering is authoritative: it fixes the row/column indexing of
//! every transition matrix built downstream. See `docs/scenario-format.md`
//! for the field-by-field reference.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use crate::error::SpillError;

/// Whether a sector is open water or coastline.
///
/// Shore sectors are absorbing: oil that lands there never re-enters the
/// water, so their transition-matrix rows are unit vectors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SectorKind {
    Sea,
    Shore,
}

/// One cell of the discretized water/coast grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sector {
    pub id: String,
    pub kind: SectorKind,
    /// Environmentally sensitive shoreline. Only meaningful for shore sectors.
    #[serde(default)]
    pub sensitive: bool,
    /// Enclosing extent in meters; the basis for boom-length sizing.
    pub span: f64,
}

/// Spill source term: constant release rate over a fixed number of hours.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Spill {
    /// Barrels per hour entering the source sector.
    pub rate: f64,
    /// Number of one-hour periods during which the release continues.
    pub duration: u32,
}

/// Scenario-wide slick thickness, optionally refined per sector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Thickness {
    /// Millimeters, applied to every sector without an explicit entry.
    pub default: f64,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub per_sector: BTreeMap<String, f64>,
}

impl Thickness {
    pub fn at(&self, sector_id: &str) -> f64 {
        self.per_sector.get(sector_id).copied().unwrap_or(self.default)
    }
}

/// Per-period override of the spreading rate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpreadOverride {
    pub period: u32,
    pub spread_rate: f64,
}

/// One member of the discrete set of trajectory hypotheses.
///
/// A hypothesis perturbs the base spreading rate by
/// `spread_scale * uncertainty_factor`; the surveillance branch of the
/// solver learns which hypothesis holds. With `uncertainty_factor = 0`
/// all hypotheses coincide and observation reveals nothing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Hypothesis {
    pub weight: f64,
    pub spread_scale: f64,
}

/// Physical transport parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Physics {
    /// Count of one-hour periods simulated. Defaults to 24.
    #[serde(default = "default_horizon")]
    pub horizon: u32,
    /// Fraction of a sea sector's oil leaving it per hour, split evenly
    /// over its out-neighbors.
    pub spread_rate: f64,
    /// Extra spreading applied on top of `spread_rate` when the trajectory
    /// has not been observed; builds the uncertainty matrix P.
    pub uncertainty_factor: f64,
    pub thickness: Thickness,
    /// Fraction of sea-sector oil lost to weathering per period. An
    /// extension hook, not part of the core transport model; defaults to 0.
    #[serde(default, skip_serializing_if = "is_zero")]
    pub natural_decay: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub spread_overrides: Vec<SpreadOverride>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub hypotheses: Vec<Hypothesis>,
}

fn default_horizon() -> u32 {
    24
}

fn is_zero(v: &f64) -> bool {
    *v == 0.0
}

/// A containment boom staged at a shore site.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Boom {
    pub id: String,
    /// Meters of boom.
    pub length: f64,
    pub staging_site: String,
    /// Hours to tow the boom from its staging site to each sector.
    /// Sectors absent from the map cannot be reached by this boom.
    pub transit_hours: BTreeMap<String, f64>,
}

/// The single response aircraft shared by surveillance and dispersant sorties.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Aircraft {
    /// Hours of preparation and refueling before the sortie; fixes the
    /// second decision period.
    pub prep_hours: f64,
    /// Fraction of a sector's oil removed by one dispersant application.
    pub dispersant_efficiency: f64,
}

/// Response equipment available to the planner, plus its calibration
/// constants (these live here rather than in a separate config file).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EquipmentInventory {
    pub booms: Vec<Boom>,
    pub aircraft: Aircraft,
    /// Containment fraction of a full three-layer boom at reference
    /// thickness. Booms leak, so demo configs keep this below 1.
    pub boom_max_fraction: f64,
    /// Exponent of the coverage curve f(c) = boom_max_fraction * (c/3)^gamma.
    #[serde(default = "default_curve_exponent")]
    pub boom_curve_exponent: f64,
    /// Thickness (mm) at which booms reach full rated efficiency.
    pub reference_thickness: f64,
    /// Periods needed to move a deployed boom between sectors.
    #[serde(default = "default_relocation_delay")]
    pub relocation_delay: u32,
}

fn default_curve_exponent() -> f64 {
    1.0
}

fn default_relocation_delay() -> u32 {
    2
}

/// A complete spill-response planning problem.
///
/// Immutable after load; all types here are `Send + Sync` and safe to share
/// across threads.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub sectors: Vec<Sector>,
    /// Directed `[from, to]` pairs. Shore sectors must have no outgoing edges.
    pub adjacency: Vec<[String; 2]>,
    /// Sector id of the foundered ship; must be a sea sector.
    pub source: String,
    pub spill: Spill,
    pub physics: Physics,
    pub inventory: EquipmentInventory,
}

/// A named invariant violation found by [`validate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub field: String,
    pub rule: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.rule)
    }
}

impl Scenario {
    /// Index of a sector id in file order, which is also its matrix row.
    pub fn sector_index(&self, id: &str) -> Option<usize> {
        self.sectors.iter().position(|s| s.id == id)
    }

    pub fn sector(&self, id: &str) -> Option<&Sector> {
        self.sectors.iter().find(|s| s.id == id)
    }

    pub fn sector_count(&self) -> usize {
        self.sectors.len()
    }

    pub fn horizon(&self) -> usize {
        self.physics.horizon as usize
    }

    /// Out-neighbor indices of each sector, in file order.
    pub fn out_neighbors(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.sectors.len()];
        for [from, to] in &self.adjacency {
            if let (Some(f), Some(t)) = (self.sector_index(from), self.sector_index(to)) {
                out[f].push(t);
            }
        }
        out
    }

    /// Sensitive shore sectors, in file order.
    pub fn sensitive_targets(&self) -> Vec<&Sector> {
        self.sectors.iter().filter(|s| s.sensitive).collect()
    }

    /// Hypothesis set, defaulting to the single unperturbed world.
    pub fn hypotheses(&self) -> Vec<Hypothesis> {
        if self.physics.hypotheses.is_empty() {
            vec![Hypothesis { weight: 1.0, spread_scale: 0.0 }]
        } else {
            self.physics.hypotheses.clone()
        }
    }

    /// Spreading rate in force at `period` for hypothesis scale `scale`,
    /// clamped to [0, 1].
    pub fn spread_rate_at(&self, period: usize, scale: f64) -> f64 {
        let base = self
            .physics
            .spread_overrides
            .iter()
            .find(|o| o.period as usize == period)
            .map(|o| o.spread_rate)
            .unwrap_or(self.physics.spread_rate);
        (base + scale * self.physics.uncertainty_factor).clamp(0.0, 1.0)
    }

    pub fn serialize_to_string(&self) -> Result<String, SpillError> {
        serde_json::to_string_pretty(self).map_err(SpillError::Serialize)
    }
}

/// Loads and validates a scenario file.
///
/// Fails on malformed JSON, unknown keys, or any invariant violation; the
/// error names the offending field.
pub fn load_scenario(path: impl AsRef<Path>) -> Result<Scenario, SpillError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|e| SpillError::Io { path: path.display().to_string(), source: e })?;
    let scenario: Scenario = serde_json::from_str(&text)
        .map_err(|e| SpillError::Parse { path: path.display().to_string(), source: e })?;
    let violations = validate(&scenario);
    if violations.is_empty() {
        Ok(scenario)
    } else {
        Err(SpillError::Invalid(violations))
    }
}

/// Checks every type invariant and returns the violations found.
///
/// Violations are data, not errors: an empty list means the scenario is
/// well-formed. Pure: same input, same output.
pub fn validate(s: &Scenario) -> Vec<Violation> {
    // NaN fails these checks too, unlike the `<=` complements.
    let positive = |x: f64| x > 0.0;
    let non_negative = |x: f64| x >= 0.0;
    let mut v = Vec::new();
    let mut push = |field: &str, rule: String| v.push(Violation { field: field.to_string(), rule });

    if s.sectors.is_empty() {
        push("sectors", "at least one sector required".into());
    }
    let mut seen = BTreeMap::new();
    for sector in &s.sectors {
        if seen.insert(sector.id.clone(), ()).is_some() {
            push("sectors", format!("duplicate sector id {:?}", sector.id));
        }
        if sector.sensitive && sector.kind != SectorKind::Shore {
            push("sectors", format!("sector {:?}: sensitive requires kind=shore", sector.id));
        }
        if !positive(sector.span) {
            push("sectors", format!("sector {:?}: span must be > 0", sector.id));
        }
    }

    let mut seen_edges = BTreeMap::new();
    for [from, to] in &s.adjacency {
        match (s.sector(from), s.sector(to)) {
            (None, _) => push("adjacency", format!("unknown sector {:?}", from)),
            (_, None) => push("adjacency", format!("unknown sector {:?}", to)),
            (Some(f), Some(_)) => {
                if from == to {
                    push("adjacency", format!("self-edge on {:?}", from));
                }
                if f.kind == SectorKind::Shore {
                    push(
                        "adjacency",
                        format!("shore sector {:?} has an outgoing edge (must be absorbing)", from),
                    );
                }
                if seen_edges.insert((from.clone(), to.clone()), ()).is_some() {
                    push("adjacency", format!("duplicate edge {:?} -> {:?}", from, to));
                }
            }
        }
    }

    match s.sector(&s.source) {
        None => push("source", format!("unknown sector {:?}", s.source)),
        Some(src) if src.kind != SectorKind::Sea => {
            push("source", format!("source {:?} must be a sea sector", s.source))
        }
        _ => {}
    }

    if !positive(s.spill.rate) {
        push("spill.rate", "must be > 0".into());
    }
    if s.physics.horizon < 2 {
        push("physics.horizon", "must be >= 2".into());
    }
    if s.spill.duration > s.physics.horizon {
        push("spill.duration", "must be <= physics.horizon".into());
    }
    let unit = |name: &str, x: f64, v: &mut Vec<Violation>| {
        if !(0.0..=1.0).contains(&x) {
            v.push(Violation { field: name.to_string(), rule: "out of [0,1]".into() });
        }
    };
    unit("physics.spread_rate", s.physics.spread_rate, &mut v);
    unit("physics.uncertainty_factor", s.physics.uncertainty_factor, &mut v);
    unit("physics.natural_decay", s.physics.natural_decay, &mut v);
    for o in &s.physics.spread_overrides {
        unit("physics.spread_overrides.spread_rate", o.spread_rate, &mut v);
        if o.period >= s.physics.horizon {
            v.push(Violation {
                field: "physics.spread_overrides.period".into(),
                rule: format!("period {} outside horizon", o.period),
            });
        }
    }
    if !positive(s.physics.thickness.default) {
        v.push(Violation { field: "physics.thickness.default".into(), rule: "must be > 0".into() });
    }
    for (id, t) in &s.physics.thickness.per_sector {
        if s.sector(id).is_none() {
            v.push(Violation {
                field: "physics.thickness.per_sector".into(),
                rule: format!("unknown sector {:?}", id),
            });
        }
        if !positive(*t) {
            v.push(Violation {
                field: "physics.thickness.per_sector".into(),
                rule: format!("sector {:?}: thickness must be > 0", id),
            });
        }
    }
    if !s.physics.hypotheses.is_empty() {
        let total: f64 = s.physics.hypotheses.iter().map(|h| h.weight).sum();
        if (total - 1.0).abs() > 1e-9 {
            v.push(Violation {
                field: "physics.hypotheses".into(),
                rule: format!("weights sum to {total}, expected 1"),
            });
        }
        for h in &s.physics.hypotheses {
            if !positive(h.weight) {
                v.push(Violation {
                    field: "physics.hypotheses.weight".into(),
                    rule: "must be > 0".into(),
                });
            }
        }
    }

    let mut seen_booms = BTreeMap::new();
    for boom in &s.inventory.booms {
        if seen_booms.insert(boom.id.clone(), ()).is_some() {
            v.push(Violation {
                field: "inventory.booms".into(),
                rule: format!("duplicate boom id {:?}", boom.id),
            });
        }
        if !positive(boom.length) {
            v.push(Violation {
                field: "inventory.booms.length".into(),
                rule: format!("boom {:?}: length must be > 0", boom.id),
            });
        }
        for (sector, hours) in &boom.transit_hours {
            if s.sector(sector).is_none() {
                v.push(Violation {
                    field: "inventory.booms.transit_hours".into(),
                    rule: format!("boom {:?}: unknown sector {:?}", boom.id, sector),
                });
            }
            if !non_negative(*hours) {
                v.push(Violation {
                    field: "inventory.booms.transit_hours".into(),
                    rule: format!("boom {:?}: transit to {:?} must be >= 0", boom.id, sector),
                });
            }
        }
    }
    if !non_negative(s.inventory.aircraft.prep_hours) {
        v.push(Violation { field: "inventory.aircraft.prep_hours".into(), rule: "must be >= 0".into() });
    }
    unit("inventory.aircraft.dispersant_efficiency", s.inventory.aircraft.dispersant_efficiency, &mut v);
    unit("inventory.boom_max_fraction", s.inventory.boom_max_fraction, &mut v);
    if !positive(s.inventory.boom_curve_exponent) {
        v.push(Violation { field: "inventory.boom_curve_exponent".into(), rule: "must be > 0".into() });
    }
    if !positive(s.inventory.reference_thickness) {
        v.push(Violation { field: "inventory.reference_thickness".into(), rule: "must be > 0".into() });
    }
    if s.inventory.relocation_delay < 1 {
        v.push(Violation { field: "inventory.relocation_delay".into(), rule: "must be >= 1".into() });
    }

    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::demo_scenario_path;

    fn demo() -> Scenario {
        load_scenario(demo_scenario_path()).expect("demo scenario loads")
    }

    #[test]
    fn demo_has_six_sea_and_six_shore_sectors() {
        let s = demo();
        assert_eq!(s.sectors.len(), 12);
        assert_eq!(s.sectors.iter().filter(|x| x.kind == SectorKind::Sea).count(), 6);
        assert_eq!(s.sectors.iter().filter(|x| x.kind == SectorKind::Shore).count(), 6);
        assert!(validate(&s).is_empty());
    }

    #[test]
    fn demo_horizon_and_duration_accepted() {
        let s = demo();
        assert_eq!(s.physics.horizon, 24);
        assert!(s.spill.duration <= s.physics.horizon);
    }

    #[test]
    fn round_trip_is_identity() {
        let s = demo();
        let text = s.serialize_to_string().unwrap();
        let back: Scenario = serde_json::from_str(&text).unwrap();
        assert_eq!(s, back);
    }

    #[test]
    fn shore_outgoing_edge_is_a_violation() {
        let mut s = demo();
        let shore = s
            .sectors
            .iter()
            .find(|x| x.kind == SectorKind::Shore)
            .unwrap()
            .id
            .clone();
        s.adjacency.push([shore.clone(), s.source.clone()]);
        let v = validate(&s);
        assert!(v.iter().any(|x| x.rule.contains("absorbing")), "{v:?}");
    }

    #[test]
    fn spread_rate_out_of_range_is_one_violation() {
        let mut s = demo();
        s.physics.spread_rate = 1.5;
        let v = validate(&s);
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].field, "physics.spread_rate");
        assert_eq!(v[0].rule, "out of [0,1]");
    }

    #[test]
    fn sensitive_sea_sector_is_a_violation() {
        let mut s = demo();
        let sea = s.sectors.iter().position(|x| x.kind == SectorKind::Sea).unwrap();
        s.sectors[sea].sensitive = true;
        let v = validate(&s);
        assert_eq!(v.len(), 1);
        assert!(v[0].rule.contains("sensitive"));
    }

    #[test]
    fn horizon_defaults_to_24_when_omitted() {
        let text = std::fs::read_to_string(demo_scenario_path()).unwrap();
        let mut doc: serde_json::Value = serde_json::from_str(&text).unwrap();
        doc["physics"].as_object_mut().unwrap().remove("horizon");
        let s: Scenario = serde_json::from_value(doc).unwrap();
        assert_eq!(s.physics.horizon, 24);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let text = std::fs::read_to_string(demo_scenario_path()).unwrap();
        let patched = text.replacen("\"sectors\"", "\"sectorz\"", 1);
        assert!(serde_json::from_str::<Scenario>(&patched).is_err());
    }

    #[test]
    fn validate_is_pure() {
        let s = demo();
        assert_eq!(validate(&s), validate(&s));
    }

    #[test]
    fn scenario_is_send_and_sync() {
        fn check<T: Send + Sync>() {}
        check::<Scenario>();
    }
}
