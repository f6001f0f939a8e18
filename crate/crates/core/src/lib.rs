//! Computable model of the space of continuous quasinorms on `R^n` modulo
//! dilation.
//!
//! * [`projgrid`]: projective directions and sampling grids.
//! * [`quasinorm`]: the [`NormSpec`] algebra, polytope gauges, convexity
//!   diagnostics, polyhedral approximation.
//! * [`qmetric`]: Khare's multiplicative distance with witnesses and the
//!   log-profile model.
//! * [`qspace`]: vector-space operations, limits, axiom suite.
//! * [`bm`]: Banach–Mazur estimation, pullbacks, isometry groups and the
//!   symmetry-breaking construction.
//! * [`schema`]: the JSON norm-spec format.

pub mod bm;
pub mod error;
mod linalg;
pub mod linmap;
pub mod projgrid;
pub mod qmetric;
pub mod qspace;
pub mod quasinorm;
pub mod schema;

pub use error::{BallViolation, NormError, Result};
pub use linmap::LinearMap;
pub use projgrid::{canonicalize, make_grid, refine_near, Direction, ProjectiveGrid};
pub use qmetric::{khare_distance, LogProfile, MetricWitness};
pub use quasinorm::{NormSpec, PolytopeBall};
