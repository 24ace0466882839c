//! Top-level planner: runs every sphere pairing of the three path classes
//! and keeps the shortest result.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cylinder::best_cylinder_path;
use crate::envelope::best_sphere_envelope_path;
use crate::error::{Error, Result};
use crate::geom::{orthonormality_error, rotation_log, Vec3};
use crate::kinematics::{tangent_sphere_center, Configuration, SphereSide, VehicleParams};
use crate::plane::best_plane_path;
use crate::sphere::{lift_spherical_path, solve_spherical_dubins, SphericalConfig, SphericalPath, SphericalPathParams};
use crate::trajectory::Trajectory;

/// Tangent spheres used at the two ends of a path.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SphereSelection {
    pub initial: SphereSide,
    pub terminal: SphereSide,
}

impl SphereSelection {
    pub fn new(initial: SphereSide, terminal: SphereSide) -> Self {
        Self { initial, terminal }
    }

    pub fn from_deltas(io_initial: i8, lr_initial: i8, io_final: i8, lr_final: i8) -> Result<Self> {
        Ok(Self { initial: SphereSide::from_deltas(io_initial, lr_initial)?, terminal: SphereSide::from_deltas(io_final, lr_final)? })
    }

    /// Same side at both ends (cylinder and sphere-envelope classes).
    pub fn is_same_type(&self) -> bool {
        self.initial == self.terminal
    }

    /// Opposite sides of the same kind (plane class).
    pub fn is_opposite_type(&self) -> bool {
        self.initial.opposite() == self.terminal
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PathClass {
    Cylinder,
    Plane,
    SphereEnvelope,
}

impl PathClass {
    pub const ALL: [PathClass; 3] = [PathClass::Cylinder, PathClass::Plane, PathClass::SphereEnvelope];

    /// The four sphere pairings of this class, in tie-break order.
    pub fn pairings(self) -> [SphereSelection; 4] {
        use SphereSide::*;
        match self {
            PathClass::Plane => [
                SphereSelection::new(Inner, Outer),
                SphereSelection::new(Outer, Inner),
                SphereSelection::new(Left, Right),
                SphereSelection::new(Right, Left),
            ],
            _ => SphereSide::ALL.map(|s| SphereSelection::new(s, s)),
        }
    }

    /// Label such as `cyc_right`, `pl_inner_outer` or `sphere_left`.
    pub fn label(self, sel: &SphereSelection) -> String {
        match self {
            PathClass::Cylinder => format!("cyc_{}", sel.initial.name()),
            PathClass::Plane => format!("pl_{}_{}", sel.initial.name(), sel.terminal.name()),
            PathClass::SphereEnvelope => format!("sphere_{}", sel.initial.name()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlannerConfig {
    pub theta_disc: usize,
    pub phi_disc: usize,
    /// Trajectory sampling step in meters.
    pub step: f64,
    /// Golden-section refinement around the best grid point.
    pub refine: bool,
}

impl PlannerConfig {
    pub const DEFAULT_DISC: usize = 15;

    pub fn new(theta_disc: usize, phi_disc: usize, step: f64, refine: bool) -> Result<Self> {
        if theta_disc < 2 || phi_disc < 2 {
            return Err(Error::invalid(format!("grid sizes must be at least 2, got {theta_disc} and {phi_disc}")));
        }
        if !(step > 0.0 && step.is_finite()) {
            return Err(Error::invalid(format!("sampling step must be positive, got {step}")));
        }
        Ok(Self { theta_disc, phi_disc, step, refine })
    }

    /// Default grid with the default step for `params`.
    pub fn default_for(params: &VehicleParams) -> Self {
        Self { theta_disc: Self::DEFAULT_DISC, phi_disc: Self::DEFAULT_DISC, step: params.default_step(), refine: false }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CandidatePath {
    pub class: PathClass,
    pub selection: SphereSelection,
    pub label: String,
    /// Winning boundary parameters, by name.
    pub parameters: Vec<(String, f64)>,
    /// Initial sphere, connecting surface, final sphere.
    pub segment_lengths: [f64; 3],
    pub total_length: f64,
    pub trajectory: Trajectory,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum CandidateStatus {
    Feasible { total_length: f64, parameters: Vec<(String, f64)> },
    Infeasible { reason: String, message: String },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CandidateSummary {
    pub class: PathClass,
    pub selection: SphereSelection,
    pub label: String,
    #[serde(flatten)]
    pub status: CandidateStatus,
}

impl CandidateSummary {
    pub fn total_length(&self) -> Option<f64> {
        match &self.status {
            CandidateStatus::Feasible { total_length, .. } => Some(*total_length),
            CandidateStatus::Infeasible { .. } => None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct PlanResult {
    pub best: CandidatePath,
    /// One entry per pairing, in tie-break order.
    pub summaries: Vec<CandidateSummary>,
}

/// Short machine-readable reason for a failed pairing.
pub fn reason_code(err: &Error) -> &'static str {
    match err {
        Error::InvalidArgument(_) => "invalid_argument",
        Error::UnsupportedRadius { .. } => "unsupported_radius",
        Error::InfeasibleSubproblem(_) => "infeasible_subproblem",
        Error::ClassInfeasible(_) => "class_infeasible",
        Error::PlannerInfeasible => "planner_infeasible",
        Error::Parse { .. } => "parse",
        Error::Validation(_) => "validation",
        Error::Io(_) | Error::Csv(_) => "io",
    }
}

fn solve_class(
    class: PathClass,
    start: &Configuration,
    goal: &Configuration,
    sel: SphereSelection,
    params: &VehicleParams,
    cfg: &PlannerConfig,
) -> Result<CandidatePath> {
    match class {
        PathClass::Cylinder => best_cylinder_path(start, goal, sel, params, cfg),
        PathClass::Plane => best_plane_path(start, goal, sel, params, cfg),
        PathClass::SphereEnvelope => best_sphere_envelope_path(start, goal, sel, params, cfg),
    }
}

/// Shortest path over all twelve pairings. Ties go to the earlier class
/// (cylinder, plane, sphere envelope), then the earlier pairing.
pub fn plan(start: &Configuration, goal: &Configuration, params: &VehicleParams, cfg: &PlannerConfig) -> Result<PlanResult> {
    PlannerConfig::new(cfg.theta_disc, cfg.phi_disc, cfg.step, cfg.refine)?;
    let jobs: Vec<(PathClass, SphereSelection)> =
        PathClass::ALL.iter().flat_map(|&c| c.pairings().map(|s| (c, s))).collect();
    let results: Vec<Result<CandidatePath>> =
        jobs.par_iter().map(|&(c, s)| solve_class(c, start, goal, s, params, cfg)).collect();

    let mut best: Option<CandidatePath> = None;
    let mut summaries = Vec::with_capacity(jobs.len());
    for ((class, selection), res) in jobs.into_iter().zip(results) {
        let label = class.label(&selection);
        let status = match res {
            Ok(cand) => {
                let status = CandidateStatus::Feasible { total_length: cand.total_length, parameters: cand.parameters.clone() };
                if best.as_ref().map_or(true, |b| cand.total_length < b.total_length) {
                    best = Some(cand);
                }
                status
            }
            Err(e) => CandidateStatus::Infeasible { reason: reason_code(&e).to_string(), message: e.to_string() },
        };
        summaries.push(CandidateSummary { class, selection, label, status });
    }
    let best = best.ok_or(Error::PlannerInfeasible)?;
    Ok(PlanResult { best, summaries })
}

/// One end of a path: a boundary configuration and its tangent sphere.
#[derive(Clone, Copy, Debug)]
pub(crate) struct EndSphere {
    pub side: SphereSide,
    pub center: Vec3,
    pub params: SphericalPathParams,
    pub boundary: SphericalConfig,
}

impl EndSphere {
    pub fn new(config: &Configuration, side: SphereSide, params: &VehicleParams) -> Result<Self> {
        let sp = SphericalPathParams::for_side(side, params);
        let center = tangent_sphere_center(config, side, params);
        let boundary = SphericalConfig::from_configuration(config, &center, sp.r_bar)?;
        Ok(Self { side, center, params: sp, boundary })
    }

    fn on_sphere(&self, x: &Vec3, t: &Vec3) -> Result<SphericalConfig> {
        SphericalConfig::new(x - self.center, *t, self.params.r_bar)
    }

    /// Path from the boundary configuration to the surface state `(x, t)`.
    pub fn path_to(&self, x: &Vec3, t: &Vec3) -> Result<SphericalPath> {
        solve_spherical_dubins(&self.boundary, &self.on_sphere(x, t)?, &self.params)
    }

    /// Path from the surface state `(x, t)` to the boundary configuration.
    pub fn path_from(&self, x: &Vec3, t: &Vec3) -> Result<SphericalPath> {
        solve_spherical_dubins(&self.on_sphere(x, t)?, &self.boundary, &self.params)
    }

    pub fn lift(&self, path: &SphericalPath, step: f64) -> Result<Trajectory> {
        lift_spherical_path(path, &self.center, self.side, step)
    }
}

/// Concatenates path pieces into one trajectory.
pub(crate) fn assemble(pieces: Vec<Trajectory>) -> Trajectory {
    let mut out = Trajectory::default();
    for p in pieces {
        out.append(p);
    }
    out
}

/// Numeric audit of a sampled trajectory.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub samples: usize,
    /// Largest yaw-rate estimate from consecutive frames.
    pub max_kappa_g: f64,
    /// Largest pitch-rate estimate from consecutive frames.
    pub max_kappa_n: f64,
    /// Largest roll-rate estimate; zero for a rotation-minimizing frame.
    pub max_roll_rate: f64,
    pub max_orthonormality_error: f64,
    /// Largest amount by which a chord exceeds its arc-length increment.
    pub max_chord_excess: f64,
    pub start_position_error: Option<f64>,
    pub start_frame_error: Option<f64>,
    pub goal_position_error: Option<f64>,
    pub goal_frame_error: Option<f64>,
    /// Curvature estimates within the bounds to the relative tolerance.
    pub curvature_ok: bool,
    /// Arc length strictly increasing.
    pub monotone: bool,
}

impl ValidationReport {
    /// All checks with the given absolute tolerances.
    pub fn passes(&self, position_tol: f64, frame_tol: f64, roll_tol: f64) -> bool {
        let within = |v: Option<f64>, tol: f64| v.map_or(true, |e| e <= tol);
        self.curvature_ok
            && self.monotone
            && self.max_roll_rate <= roll_tol
            && self.max_orthonormality_error <= frame_tol
            && self.max_chord_excess <= position_tol
            && within(self.start_position_error, position_tol)
            && within(self.goal_position_error, position_tol)
            && within(self.start_frame_error, frame_tol)
            && within(self.goal_frame_error, frame_tol)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "n={} |kg|max={:.3e} |kn|max={:.3e} roll={:.3e} ortho={:.3e} chord={:.3e} goal_pos={:?} goal_frame={:?}",
            self.samples,
            self.max_kappa_g,
            self.max_kappa_n,
            self.max_roll_rate,
            self.max_orthonormality_error,
            self.max_chord_excess,
            self.goal_position_error,
            self.goal_frame_error
        )
    }
}

/// Estimates curvatures and roll rate from the relative rotation of
/// consecutive frames and checks them against the vehicle bounds with
/// relative tolerance `tol`.
pub fn validate_trajectory(
    traj: &Trajectory,
    params: &VehicleParams,
    tol: f64,
    start: Option<&Configuration>,
    goal: Option<&Configuration>,
) -> ValidationReport {
    let mut r = ValidationReport { samples: traj.len(), monotone: true, ..Default::default() };
    for smp in &traj.samples {
        r.max_orthonormality_error = r.max_orthonormality_error.max(orthonormality_error(&smp.config.frame()));
    }
    for w in traj.samples.windows(2) {
        let ds = w[1].s - w[0].s;
        if !(ds > 0.0) {
            r.monotone = false;
            continue;
        }
        let rate = rotation_log(&(w[0].config.frame().transpose() * w[1].config.frame())) / ds;
        r.max_roll_rate = r.max_roll_rate.max(rate.x.abs());
        r.max_kappa_n = r.max_kappa_n.max(rate.y.abs());
        r.max_kappa_g = r.max_kappa_g.max(rate.z.abs());
        let chord = (w[1].config.position - w[0].config.position).norm();
        r.max_chord_excess = r.max_chord_excess.max(chord - ds);
    }
    r.curvature_ok = r.max_kappa_g <= params.kappa_g_max() * (1.0 + tol) && r.max_kappa_n <= params.kappa_n_max() * (1.0 + tol);
    if let (Some(s), Some(first)) = (start, traj.first()) {
        r.start_position_error = Some(first.config.position_error(s));
        r.start_frame_error = Some(first.config.frame_error(s));
    }
    if let (Some(g), Some(last)) = (goal, traj.last()) {
        r.goal_position_error = Some(last.config.position_error(g));
        r.goal_frame_error = Some(last.config.frame_error(g));
    }
    r
}
