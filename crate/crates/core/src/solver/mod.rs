//! Numerical oracle for periodic points.
//!
//! The period-`n` points of a planar map are the affine solutions of
//! `F^n(x, y) = (x, y)`. They are found by resultant elimination and Newton
//! refinement, then each candidate orbit is replayed on the original
//! recurrence and rejected if it meets a pole, escapes, or fails to close.

mod census;
mod newton;
mod system;

use serde::{Deserialize, Serialize};

pub use census::{census, points_csv, validate_orbit, OrbitCheck, PeriodicPoint, PeriodicReport, RejectReason, Rejection, ResidualStats, Verdict};
pub use system::{fixed_point_system, solve_system, Solution};

/// Tolerances and knobs shared by the solver and the sampling routines.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverOptions {
    /// Relative radius under which two solutions are the same point.
    pub cluster_radius: f64,
    /// Normwise backward error a refined solution must reach.
    pub newton_tol: f64,
    /// Relative size under which a denominator counts as a pole.
    pub pole_guard: f64,
    /// Coordinate magnitude beyond which an orbit has left the affine chart.
    pub overflow_guard: f64,
    /// Bound on `|F^n(p) - p| / max(1, |p|)` for a valid orbit.
    pub closure_tol: f64,
    /// Below this relative Jacobian determinant a solution is singular.
    pub singular_threshold: f64,
    /// Mantissa bits; above 53 enables the double-double Newton fallback.
    pub precision: u32,
    pub seed: u64,
    /// Charts tried before a genericity failure is reported.
    pub max_attempts: usize,
    /// Cap on the raw degree of a composition.
    pub degree_budget: u32,
}

pub const DEFAULT_SEED: u64 = 20_240_611;

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            cluster_radius: 1e-6,
            newton_tol: 1e-10,
            pole_guard: 1e-8,
            overflow_guard: 1e8,
            closure_tol: 1e-8,
            singular_threshold: 1e-7,
            precision: 106,
            seed: DEFAULT_SEED,
            max_attempts: 6,
            degree_budget: crate::proj_map::DEFAULT_DEGREE_BUDGET,
        }
    }
}
