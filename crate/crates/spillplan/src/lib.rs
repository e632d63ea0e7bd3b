//! Planning-under-uncertainty engine for oil spill response.
//!
//! The pipeline has three layers:
//!
//! 1. [`trajectory`] — a sector-discretized absorbing Markov model of the
//!    spreading slick, with a widened variant for the unobserved trajectory
//!    and a surveillance collapse back to the observed one.
//! 2. [`backbone`] — a deterministic constraint layer that orders feasible
//!    equipment employments by arrival time, prunes dominated options, and
//!    reduces the problem to a two-period decision backbone.
//! 3. [`solver`] — policy evaluation over that backbone: brute-force
//!    enumeration, exact Bellman backward induction, stage return tables,
//!    and value-of-surveillance analysis.
//!
//! [`scenario`] supplies the world model, [`equipment`] the removal
//! function, and [`cli`] the command front end used by the `spillplan`
//! binary.

pub mod backbone;
pub mod cli;
pub mod equipment;
pub mod error;
pub mod scenario;
pub mod solver;
pub mod trajectory;

pub use error::SpillError;

/// Path to the demo scenario shipped in-repo, for tests and docs.
pub fn demo_scenario_path() -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../scenarios/demo.json")
}
