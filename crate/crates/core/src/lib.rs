//! Shortest curvature-constrained 3D paths for a vehicle with independent
//! pitch and yaw turning-radius limits.
//!
//! A path starts on one of the four spheres tangent to the initial
//! configuration, crosses a connecting surface (a cylinder, a plane or a
//! third sphere) and ends on a sphere tangent to the final configuration.
//! [`planner::plan`] searches all twelve sphere pairings.

pub mod cylinder;
pub mod dubins2d;
pub mod envelope;
pub mod error;
pub mod geom;
pub mod io;
pub mod kinematics;
pub mod plane;
pub mod planner;
pub mod search;
pub mod sphere;
pub mod trajectory;

pub use error::{Error, Result};
pub use kinematics::{Configuration, CurvaturePair, SphereSide, VehicleParams};
pub use planner::{plan, validate_trajectory, CandidatePath, PlanResult, PlannerConfig, SphereSelection};
pub use trajectory::{Sample, Trajectory};
