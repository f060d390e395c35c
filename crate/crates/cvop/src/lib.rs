//! Deciding tractability of convex vector optimization problems by
//! polyhedral approximation.
//!
//! The crate is organized around six areas:
//!
//! * [`cone`]: polyhedral ordering cones kept in both generator and
//!   halfspace form, with duality, extremality and weight bases.
//! * [`upper_set`]: upper closed convex sets as `conv(points) + cone(rays)`,
//!   the Minkowski calculus on them, and distance / Hausdorff queries.
//! * [`problem`] and [`solver`]: smooth problem descriptions, weighted-sum
//!   scalarizations and the barrier Newton engine with divergence
//!   certification.
//! * [`classify`]: the boundedness taxonomy of a problem (bounded,
//!   self-bounded unbounded, not self-bounded, undetermined) built from
//!   scalarization probes over weight grids.
//! * [`sandwich`]: inner and outer polyhedral approximations of the upper
//!   image with a certified gap.
//! * [`registry`] and [`setops`]: built-in benchmark problems, JSON
//!   loading, and a small expression language over upper sets.
//!
//! Everything numerical funnels through two kernels: a double description
//! converter ([`dd`]) and an active-set nonnegative QP solver ([`qp`]).

pub mod classify;
pub mod cone;
pub mod config;
pub mod dd;
pub mod error;
pub mod jsonio;
pub mod problem;
pub mod qp;
pub mod registry;
pub mod sandwich;
pub mod setops;
pub mod solver;
pub mod upper_set;

pub use classify::{
    anchor_point, angle_between, classify, estimate_recc_p, estimate_w, Boundedness,
    BoundednessReport, BoundaryProbe, ClassifyConfig, WEstimate,
};
pub use cone::{weight_base, PolyCone, WeightBase};
pub use config::{SolverConfig, Tolerances};
pub use error::CvopError;
pub use problem::{AffineMap, ConvexityReport, CvopProblem, FnMap, VectorMap};
pub use sandwich::{
    divergence_demo, initial_outer, sandwich_solve, DivergenceOutcome, DivergenceTrace,
    SandwichConfig, SandwichResult,
};
pub use solver::{distance_to_upper_image, solve_weighted, ScalarStatus, ScalarVerdict};
pub use upper_set::{
    finite_dominating_subset, hausdorff, hausdorff_lower_bound, point_set_distance, Distance,
    DistanceReport, Halfspace, UpperSet,
};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub type Result<T> = std::result::Result<T, CvopError>;
