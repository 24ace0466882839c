//! Cylinder class: two tangent spheres of the same type joined by a path
//! on the cylinder enveloping both. The cylinder is developed onto a plane,
//! solved there as a planar Dubins problem and wrapped back.

use std::f64::consts::{PI, TAU};

use crate::dubins2d::{sample_planar_path, solve_planar_dubins, PlanarConfig, PlanarDubinsPath, PlanarSample};
use crate::error::{Error, Result};
use crate::geom::{orthonormal_complement, wrap_to_pi, Mat3, Vec3};
use crate::kinematics::{Configuration, CurvaturePair, SphereSide, VehicleParams};
use crate::planner::{assemble, CandidatePath, EndSphere, PathClass, PlannerConfig, SphereSelection};
use crate::search::{closed_grid, par_argmin, periodic_grid, refine_coordinates, RefineAxis};
use crate::sphere::SphericalPath;
use crate::trajectory::{Sample, Trajectory};

/// Heights below this fraction of the radius are treated as zero.
const ZERO_HEIGHT: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CylinderGeometry {
    pub base_center: Vec3,
    pub axis: Vec3,
    pub height: f64,
    pub r_bar: f64,
    /// Columns `x`, `y`, `k`.
    pub body_frame: Mat3,
}

impl CylinderGeometry {
    pub fn new(r_i: &Vec3, r_f: &Vec3, r_bar: f64) -> Result<Self> {
        let d = r_f - r_i;
        let height = d.norm();
        if height <= ZERO_HEIGHT * r_bar {
            return Err(Error::ClassInfeasible("sphere centers coincide, cylinder has zero height".into()));
        }
        let axis = d / height;
        let x = orthonormal_complement(&axis);
        let y = axis.cross(&x);
        Ok(Self { base_center: *r_i, axis, height, r_bar, body_frame: Mat3::from_columns(&[x, y, axis]) })
    }

    /// Global point at cylinder angle `theta` and axial offset `v`.
    pub fn point(&self, theta: f64, v: f64) -> Vec3 {
        let (s, c) = theta.sin_cos();
        self.base_center + self.body_frame * Vec3::new(self.r_bar * c, self.r_bar * s, v)
    }

    /// Unit outward radial direction at angle `theta`.
    pub fn radial(&self, theta: f64) -> Vec3 {
        let (s, c) = theta.sin_cos();
        self.body_frame * Vec3::new(c, s, 0.0)
    }

    /// Unit tangent at angle `theta` with heading `psi` from the
    /// circumferential direction toward the axis.
    pub fn tangent(&self, theta: f64, psi: f64) -> Vec3 {
        let (s, c) = theta.sin_cos();
        let (sp, cp) = psi.sin_cos();
        self.body_frame * Vec3::new(-s * cp, c * cp, sp)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CylinderBoundary {
    pub theta_ic: f64,
    pub phi_ic: f64,
    pub theta_oc: f64,
    pub phi_oc: f64,
}

/// Entry and exit states `(X_ic, T_ic, X_oc, T_oc)` in the global frame.
pub fn cylinder_boundary_configs(geom: &CylinderGeometry, b: &CylinderBoundary) -> (Vec3, Vec3, Vec3, Vec3) {
    (
        geom.point(b.theta_ic, 0.0),
        geom.tangent(b.theta_ic, b.phi_ic),
        geom.point(b.theta_oc, geom.height),
        geom.tangent(b.theta_oc, b.phi_oc),
    )
}

/// Angular offsets of the two goal images for `delta = theta_oc - theta_ic`.
pub fn image_angles(delta: f64) -> [f64; 2] {
    let d = wrap_to_pi(delta);
    let t1 = if d < 0.0 { d + TAU } else { d };
    let t2 = if d >= 0.0 { d - TAU } else { d };
    [t1, t2]
}

/// The two developed-plane images of the exit state. The entry state maps
/// to `(0, 0, phi_ic)`.
pub fn unwrap_goal(b: &CylinderBoundary, geom: &CylinderGeometry) -> [PlanarConfig; 2] {
    image_angles(b.theta_oc - b.theta_ic).map(|t| PlanarConfig::new(geom.r_bar * t, geom.height, b.phi_oc))
}

/// Maps developed-plane samples onto the cylinder. The planar path must
/// start at the origin; `side` is the sphere type at both ends.
pub fn wrap_path(planar: &[PlanarSample], geom: &CylinderGeometry, b: &CylinderBoundary, side: SphereSide) -> Result<Trajectory> {
    let Some(first) = planar.first() else {
        return Ok(Trajectory::default());
    };
    if first.config.u.hypot(first.config.v) > 1e-12 * geom.r_bar.max(1.0) {
        return Err(Error::invalid("developed path must start at the origin"));
    }
    let r_bar = geom.r_bar;
    let samples = planar
        .iter()
        .map(|p| {
            let theta = b.theta_ic + p.config.u / r_bar;
            let psi = p.config.psi;
            let t = geom.tangent(theta, psi);
            let frame = side.frame_from_surface(&t, &geom.radial(theta));
            let bend = psi.cos().powi(2) / r_bar;
            let curvature = if side.is_pitch() {
                let d = side.delta();
                CurvaturePair::new(-d * p.curvature, d * bend)
            } else {
                let d = side.delta();
                CurvaturePair::new(d * bend, d * p.curvature)
            };
            Sample { s: p.s, config: Configuration::from_frame_unchecked(geom.point(theta, p.config.v), &frame), curvature }
        })
        .collect();
    Ok(Trajectory::from_samples(samples))
}

/// Turning radius of the developed-plane problem.
pub fn planar_radius(side: SphereSide, params: &VehicleParams) -> f64 {
    if side.is_pitch() {
        params.r_yaw
    } else {
        params.r_pitch
    }
}

/// Shorter of the two image paths for one boundary.
fn best_image(geom: &CylinderGeometry, b: &CylinderBoundary, radius: f64) -> Option<PlanarDubinsPath> {
    let start = PlanarConfig::new(0.0, 0.0, b.phi_ic);
    let mut best: Option<PlanarDubinsPath> = None;
    for goal in unwrap_goal(b, geom) {
        if let Ok(p) = solve_planar_dubins(&start, &goal, radius) {
            if best.as_ref().map_or(true, |q| p.total_length < q.total_length) {
                best = Some(p);
            }
        }
    }
    best
}

struct Problem<'a> {
    geom: CylinderGeometry,
    initial: EndSphere,
    terminal: EndSphere,
    radius: f64,
    side: SphereSide,
    sel: SphereSelection,
    cfg: &'a PlannerConfig,
}

impl Problem<'_> {
    fn legs(&self, b: &CylinderBoundary) -> Result<(SphericalPath, PlanarDubinsPath, SphericalPath)> {
        let (x_ic, t_ic, x_oc, t_oc) = cylinder_boundary_configs(&self.geom, b);
        let first = self.initial.path_to(&x_ic, &t_ic)?;
        let last = self.terminal.path_from(&x_oc, &t_oc)?;
        let mid = best_image(&self.geom, b, self.radius).ok_or_else(|| Error::InfeasibleSubproblem("planar".into()))?;
        Ok((first, mid, last))
    }

    fn length(&self, b: &CylinderBoundary) -> Option<f64> {
        self.legs(b).ok().map(|(a, m, c)| a.total_length + m.total_length + c.total_length)
    }

    fn build(&self, b: &CylinderBoundary) -> Result<CandidatePath> {
        let (first, mid, last) = self.legs(b)?;
        let step = self.cfg.step;
        let planar = sample_planar_path(&mid, &PlanarConfig::new(0.0, 0.0, b.phi_ic), step)?;
        let traj = assemble(vec![
            self.initial.lift(&first, step)?,
            wrap_path(&planar, &self.geom, b, self.side)?,
            self.terminal.lift(&last, step)?,
        ]);
        let segment_lengths = [first.total_length, mid.total_length, last.total_length];
        Ok(CandidatePath {
            class: PathClass::Cylinder,
            selection: self.sel,
            label: PathClass::Cylinder.label(&self.sel),
            parameters: vec![
                ("theta_ic".into(), b.theta_ic),
                ("phi_ic".into(), b.phi_ic),
                ("theta_oc".into(), b.theta_oc),
                ("phi_oc".into(), b.phi_oc),
            ],
            segment_lengths,
            total_length: segment_lengths.iter().sum(),
            trajectory: traj,
        })
    }
}

/// Both boundary configurations on one sphere: the cylinder collapses and
/// the path is a single sphere path.
fn single_sphere_path(start: &Configuration, goal: &Configuration, sel: SphereSelection, params: &VehicleParams, step: f64) -> Result<CandidatePath> {
    let a = EndSphere::new(start, sel.initial, params)?;
    let b = EndSphere::new(goal, sel.terminal, params)?;
    let path = a.path_to(&(b.boundary.x + b.center), &b.boundary.t)?;
    let traj = a.lift(&path, step)?;
    Ok(CandidatePath {
        class: PathClass::Cylinder,
        selection: sel,
        label: PathClass::Cylinder.label(&sel),
        parameters: Vec::new(),
        segment_lengths: [path.total_length, 0.0, 0.0],
        total_length: path.total_length,
        trajectory: traj,
    })
}

/// Best cylinder-class path over the boundary grid.
pub fn best_cylinder_path(
    start: &Configuration,
    goal: &Configuration,
    sel: SphereSelection,
    params: &VehicleParams,
    cfg: &PlannerConfig,
) -> Result<CandidatePath> {
    if !sel.is_same_type() {
        return Err(Error::invalid("cylinder class needs the same sphere type at both ends"));
    }
    let side = sel.initial;
    let initial = EndSphere::new(start, side, params)?;
    let terminal = EndSphere::new(goal, side, params)?;
    let r_bar = initial.params.r_bar;
    let geom = match CylinderGeometry::new(&initial.center, &terminal.center, r_bar) {
        Ok(g) => g,
        Err(Error::ClassInfeasible(_)) => return single_sphere_path(start, goal, sel, params, cfg.step),
        Err(e) => return Err(e),
    };
    let problem = Problem { geom, initial, terminal, radius: planar_radius(side, params), side, sel, cfg };

    let thetas = periodic_grid(cfg.theta_disc);
    let phis = closed_grid(0.0, PI, cfg.phi_disc);
    let (nt, np) = (thetas.len(), phis.len());

    // sphere legs depend on only one end of the boundary, so cache them
    let first_legs: Vec<Option<f64>> = crate::search::par_map(nt * np, |i| {
        let (th, ph) = (thetas[i / np], phis[i % np]);
        let (x, t, _, _) = cylinder_boundary_configs(&geom, &CylinderBoundary { theta_ic: th, phi_ic: ph, theta_oc: 0.0, phi_oc: 0.0 });
        problem.initial.path_to(&x, &t).ok().map(|p| p.total_length)
    });
    let last_legs: Vec<Option<f64>> = crate::search::par_map(nt * np, |i| {
        let (th, ph) = (thetas[i / np], phis[i % np]);
        let (_, _, x, t) = cylinder_boundary_configs(&geom, &CylinderBoundary { theta_ic: 0.0, phi_ic: 0.0, theta_oc: th, phi_oc: ph });
        problem.terminal.path_from(&x, &t).ok().map(|p| p.total_length)
    });

    let per_end = nt * np;
    let best = par_argmin(per_end * per_end, |i| {
        let (ie, io) = (i / per_end, i % per_end);
        let first = first_legs[ie]?;
        let last = last_legs[io]?;
        let b = CylinderBoundary {
            theta_ic: thetas[ie / np],
            phi_ic: phis[ie % np],
            theta_oc: thetas[io / np],
            phi_oc: phis[io % np],
        };
        let mid = best_image(&geom, &b, problem.radius)?;
        Some((first + mid.total_length + last, b))
    })
    .ok_or_else(|| Error::InfeasibleSubproblem("no cylinder grid point has feasible sphere legs".into()))?;

    let (_, mut length, mut b) = best;
    if cfg.refine {
        let dt = TAU / nt as f64;
        let dp = PI / (np - 1) as f64;
        let x0 = [b.theta_ic, b.phi_ic, b.theta_oc, b.phi_oc];
        let axes = [
            RefineAxis { half_width: dt, bounds: None },
            RefineAxis { half_width: dp, bounds: Some((0.0, PI)) },
            RefineAxis { half_width: dt, bounds: None },
            RefineAxis { half_width: dp, bounds: Some((0.0, PI)) },
        ];
        let eval = |p: &[f64]| problem.length(&CylinderBoundary { theta_ic: p[0], phi_ic: p[1], theta_oc: p[2], phi_oc: p[3] });
        let (x, l) = refine_coordinates(eval, &x0, length, &axes);
        b = CylinderBoundary { theta_ic: x[0], phi_ic: x[1], theta_oc: x[2], phi_oc: x[3] };
        length = l;
    }
    let cand = problem.build(&b)?;
    debug_assert!((cand.total_length - length).abs() <= 1e-9 * length.max(1.0));
    Ok(cand)
}
