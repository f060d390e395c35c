//! Numeric tolerances and solver limits, with the defaults used across the
//! toolkit and the command line.

/// Membership tolerance on unit-normalized cone vectors.
pub const TOL_CONE: f64 = 1e-9;
/// Membership tolerance for upper-set points.
pub const TOL_SET: f64 = 1e-7;
/// Stationarity residual accepted as a solved scalarization.
pub const TOL_KKT: f64 = 1e-8;
/// Constraint violation accepted as feasible.
pub const TOL_FEAS: f64 = 1e-8;

pub const DEFAULT_RESOLUTION_DEG: f64 = 1.0;
pub const DEFAULT_EPS: f64 = 1e-2;
pub const DEFAULT_WEIGHT_BUDGET: usize = 512;
pub const DEFAULT_SEED: u64 = 42;
pub const THREADS_ENV_VAR: &str = "CVOP_THREADS";

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Tolerances {
    pub cone: f64,
    pub set: f64,
    pub kkt: f64,
    pub feas: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            cone: TOL_CONE,
            set: TOL_SET,
            kkt: TOL_KKT,
            feas: TOL_FEAS,
        }
    }
}

/// Limits and thresholds of the scalar solver.
///
/// A scalarization is declared divergent only after at least
/// `min_divergence_steps` accepted descent steps have pushed the objective
/// below `-obj_divergence` while staying feasible. Iterates escaping past
/// `iterate_divergence` in norm without that objective collapse stop the
/// solve as MAXITER instead: flat-but-bounded objectives must not be
/// reported unbounded.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SolverConfig {
    pub tol: Tolerances,
    pub obj_divergence: f64,
    pub iterate_divergence: f64,
    pub mu_shrink: f64,
    pub max_outer: usize,
    pub max_inner: usize,
    pub min_divergence_steps: usize,
    pub qp_iter_factor: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            tol: Tolerances::default(),
            obj_divergence: 1e8,
            iterate_divergence: 1e8,
            mu_shrink: 0.2,
            max_outer: 200,
            max_inner: 100,
            min_divergence_steps: 50,
            qp_iter_factor: 10,
        }
    }
}
