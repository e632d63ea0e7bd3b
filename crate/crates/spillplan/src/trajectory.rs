//! Sector-discretized Markov transport of the oil slick.
//!
//! Transport is row-stochastic: entry `m[i][k]` is the fraction of sector
//! i's oil that moves to sector k in one period, so one step is
//!
//!   s_{j+1}[k] = sum_i (s_j[i] - e_j[i]) * m[i][k]
//!
//! with e_j the removal vector. Shore sectors are absorbing states. The
//! unobserved trajectory replaces the observed matrix M' with M = P * M',
//! where P is an extra spreading step built from the uncertainty factor;
//! the single vector computed per period is then read as the median
//! fractile s^0.5 of the uncertain oil quantity rather than the quantity
//! itself. Surveillance collapses the widened trajectory: the whole trace
//! is recomputed with the observed matrices.

use crate::equipment::Deployment;
use crate::error::SpillError;
use crate::scenario::{Scenario, SectorKind};

/// Tolerance for row-stochasticity and mass-conservation checks.
pub const STOCHASTIC_TOL: f64 = 1e-9;

/// Probability level of the quantity fractile carried by every state.
pub const FRACTILE_P: f64 = 0.5;

/// Oil quantities below this many barrels count as "no oil present" when
/// comparing trajectory supports.
pub const SUPPORT_EPSILON: f64 = 1e-6;

/// Dense square matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    dim: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(dim: usize) -> Self {
        Matrix { dim, data: vec![0.0; dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Matrix::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = 1.0;
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Self {
        let dim = rows.len();
        let mut data = Vec::with_capacity(dim * dim);
        for row in rows {
            assert_eq!(row.len(), dim, "matrix rows must be square");
            data.extend(row);
        }
        Matrix { dim, data }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, k: usize) -> f64 {
        self.data[i * self.dim + k]
    }

    pub fn set(&mut self, i: usize, k: usize, v: f64) {
        self.data[i * self.dim + k] = v;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    /// Standard matrix product `self * other`.
    pub fn mul(&self, other: &Matrix) -> Result<Matrix, SpillError> {
        if self.dim != other.dim {
            return Err(SpillError::DimensionMismatch(self.dim, other.dim));
        }
        let n = self.dim;
        let mut out = Matrix::zeros(n);
        for i in 0..n {
            for m in 0..n {
                let a = self.get(i, m);
                if a == 0.0 {
                    continue;
                }
                for k in 0..n {
                    out.data[i * n + k] += a * other.get(m, k);
                }
            }
        }
        Ok(out)
    }

    /// Row-vector product `v * self`.
    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.dim);
        let mut out = vec![0.0; self.dim];
        for (i, &vi) in v.iter().enumerate() {
            if vi == 0.0 {
                continue;
            }
            for (o, &m) in out.iter_mut().zip(self.row(i)) {
                *o += vi * m;
            }
        }
        out
    }

    /// Column action `self * v`, used by backward value sweeps.
    pub fn apply_transposed(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.dim);
        (0..self.dim)
            .map(|i| self.row(i).iter().zip(v).map(|(m, x)| m * x).sum())
            .collect()
    }

    pub fn is_row_stochastic(&self, tol: f64) -> bool {
        (0..self.dim).all(|i| {
            let row = self.row(i);
            row.iter().all(|&x| x >= -tol) && (row.iter().sum::<f64>() - 1.0).abs() <= tol
        })
    }
}

/// Pre-calculated transition matrices for every period of a scenario.
#[derive(Debug, Clone)]
pub struct TransitionSet {
    /// M'_j: the spreading process as it actually unfolds, one per period.
    pub observed: Vec<Matrix>,
    /// M_j = P * M'_j: spreading widened by location uncertainty.
    pub uncertain: Vec<Matrix>,
    /// The uncertainty spreading step P.
    pub uncertainty: Matrix,
}

impl TransitionSet {
    pub fn matrices(&self, observed: bool) -> &[Matrix] {
        if observed {
            &self.observed
        } else {
            &self.uncertain
        }
    }
}

/// Per-sector oil quantities at one period, tagged with the fractile level
/// the vector represents.
#[derive(Debug, Clone, PartialEq)]
pub struct OilState {
    pub quantities: Vec<f64>,
    pub fractile_p: f64,
    pub period: usize,
}

impl OilState {
    pub fn zero(sector_count: usize) -> Self {
        OilState { quantities: vec![0.0; sector_count], fractile_p: FRACTILE_P, period: 0 }
    }

    pub fn total(&self) -> f64 {
        self.quantities.iter().sum()
    }
}

/// Full account of one trajectory run: states for j = 0..=T, the removal
/// applied each period, and whether (and when) the trajectory was observed.
#[derive(Debug, Clone)]
pub struct TrajectoryTrace {
    pub states: Vec<OilState>,
    pub observed_at: Option<usize>,
    pub removals: Vec<Vec<f64>>,
}

impl TrajectoryTrace {
    pub fn terminal(&self) -> &OilState {
        self.states.last().expect("trace has at least the initial state")
    }

    /// Sector indices holding more than [`SUPPORT_EPSILON`] barrels at `period`.
    pub fn support_at(&self, period: usize) -> Vec<usize> {
        self.states[period]
            .quantities
            .iter()
            .enumerate()
            .filter(|(_, &q)| q > SUPPORT_EPSILON)
            .map(|(i, _)| i)
            .collect()
    }
}

fn spreading_matrix(s: &Scenario, rate: f64) -> Matrix {
    let n = s.sector_count();
    let neighbors = s.out_neighbors();
    let mut m = Matrix::zeros(n);
    for (i, sector) in s.sectors.iter().enumerate() {
        if sector.kind == SectorKind::Shore || neighbors[i].is_empty() {
            m.set(i, i, 1.0);
            continue;
        }
        let share = rate / neighbors[i].len() as f64;
        for &k in &neighbors[i] {
            m.set(i, k, share);
        }
        m.set(i, i, 1.0 - rate);
    }
    m
}

/// Builds the per-period transition matrices for a scenario, perturbing the
/// spreading rate by `spread_scale * uncertainty_factor` (pass 0 for the
/// base world).
///
/// Construction rule: a sea sector with out-neighbors N spreads
/// `rate / |N|` to each neighbor and keeps the rest; shore rows are unit
/// vectors. P uses the same rule with the uncertainty factor.
pub fn build_transitions_scaled(s: &Scenario, spread_scale: f64) -> TransitionSet {
    let horizon = s.horizon();
    let uncertainty = spreading_matrix(s, s.physics.uncertainty_factor);
    let mut observed = Vec::with_capacity(horizon);
    let mut uncertain = Vec::with_capacity(horizon);
    for j in 0..horizon {
        let mprime = spreading_matrix(s, s.spread_rate_at(j, spread_scale));
        let m = uncertainty.mul(&mprime).expect("same dimension by construction");
        observed.push(mprime);
        uncertain.push(m);
    }
    TransitionSet { observed, uncertain, uncertainty }
}

/// Builds the transition matrices for the unperturbed scenario.
pub fn build_transitions(s: &Scenario) -> TransitionSet {
    build_transitions_scaled(s, 0.0)
}

/// Widens an observed spreading matrix by the uncertainty step: M = P * M'.
pub fn apply_uncertainty(mprime: &Matrix, p_matrix: &Matrix) -> Result<Matrix, SpillError> {
    p_matrix.mul(mprime)
}

/// One propagation step: moves `state - removal` through `m` and advances
/// the period. Total mass of the result equals total of `state - removal`.
pub fn propagate(state: &OilState, m: &Matrix, removal: &[f64]) -> Result<OilState, SpillError> {
    if removal.len() != state.quantities.len() || m.dim() != state.quantities.len() {
        return Err(SpillError::DimensionMismatch(m.dim(), state.quantities.len()));
    }
    let mut net = Vec::with_capacity(state.quantities.len());
    for (i, (&q, &r)) in state.quantities.iter().zip(removal).enumerate() {
        if r < -STOCHASTIC_TOL || r > q + STOCHASTIC_TOL {
            return Err(SpillError::RemovalExceedsQuantity { sector: i, removal: r, quantity: q });
        }
        net.push((q - r).max(0.0));
    }
    Ok(OilState {
        quantities: m.apply(&net),
        fractile_p: state.fractile_p,
        period: state.period + 1,
    })
}

/// Runs a full trajectory for one deployment.
///
/// Spill mass enters the source sector at the start of each period, before
/// removal. Without an observation the widened matrices M_j drive the
/// trace; when `observe_at` is set the entire trace is recomputed with the
/// observed matrices M'_j (the surveillance collapse), which then also
/// govern the periods after the observation.
pub fn run_trajectory(
    s: &Scenario,
    deployment: &Deployment,
    observe_at: Option<usize>,
) -> Result<TrajectoryTrace, SpillError> {
    let transitions = build_transitions(s);
    run_trajectory_with(s, &transitions, deployment, observe_at)
}

/// As [`run_trajectory`], reusing pre-built transition matrices.
pub fn run_trajectory_with(
    s: &Scenario,
    transitions: &TransitionSet,
    deployment: &Deployment,
    observe_at: Option<usize>,
) -> Result<TrajectoryTrace, SpillError> {
    let horizon = s.horizon();
    if let Some(j) = observe_at {
        if j >= horizon {
            return Err(SpillError::InvalidPolicy(format!(
                "observation period {j} outside horizon {horizon}"
            )));
        }
    }
    let matrices = transitions.matrices(observe_at.is_some());
    let source = s
        .sector_index(&s.source)
        .ok_or_else(|| SpillError::UnknownSector(s.source.clone()))?;

    let mut states = Vec::with_capacity(horizon + 1);
    let mut removals = Vec::with_capacity(horizon);
    let mut state = OilState::zero(s.sector_count());
    states.push(state.clone());
    for (j, matrix) in matrices.iter().enumerate().take(horizon) {
        if (j as u32) < s.spill.duration {
            state.quantities[source] += s.spill.rate;
        }
        let removal = deployment.removal_vector(&state, j);
        state = propagate(&state, matrix, &removal)?;
        removals.push(removal);
        states.push(state.clone());
    }
    Ok(TrajectoryTrace { states, observed_at: observe_at, removals })
}

/// Barrels sitting in the given sectors at the end of the trace.
pub fn terminal_mass(trace: &TrajectoryTrace, sectors: &[usize]) -> f64 {
    let terminal = trace.terminal();
    sectors.iter().map(|&i| terminal.quantities[i]).sum()
}
