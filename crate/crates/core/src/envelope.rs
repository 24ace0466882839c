//! Sphere-envelope class: two tangent spheres of the same type joined
//! through an intermediary sphere tangent to both. Used when the endpoints
//! are close.

use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::geom::{orthonormal_complement, Vec3};
use crate::kinematics::{Configuration, VehicleParams};
use crate::planner::{assemble, CandidatePath, EndSphere, PathClass, PlannerConfig, SphereSelection};
use crate::search::{par_argmin, par_map, periodic_closed_grid, periodic_grid, refine_coordinates, RefineAxis};
use crate::sphere::{solve_spherical_dubins, SphericalConfig, SphericalPath};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IntermediarySphereGeometry {
    pub r_i: Vec3,
    pub r_f: Vec3,
    pub alpha: f64,
    pub locus_center: Vec3,
    pub locus_radius: f64,
    pub axis: Vec3,
    pub x_axis: Vec3,
    pub y_axis: Vec3,
    pub r_bar: f64,
}

impl IntermediarySphereGeometry {
    /// Exists when the centers are at most `4 r_bar` apart. Coincident
    /// centers use the global `z` axis as the locus axis.
    pub fn new(r_i: &Vec3, r_f: &Vec3, r_bar: f64) -> Result<Self> {
        let d = r_f - r_i;
        let dist = d.norm();
        if dist > 4.0 * r_bar * (1.0 + 1e-12) {
            return Err(Error::ClassInfeasible(format!(
                "no intermediary sphere (center distance {dist:.6} > {:.6})",
                4.0 * r_bar
            )));
        }
        let alpha = (dist / (4.0 * r_bar)).min(1.0).acos();
        let axis = if dist > 1e-12 * r_bar { d / dist } else { Vec3::z() };
        let x_axis = orthonormal_complement(&axis);
        let y_axis = axis.cross(&x_axis);
        Ok(Self {
            r_i: *r_i,
            r_f: *r_f,
            alpha,
            locus_center: (r_i + r_f) / 2.0,
            locus_radius: 2.0 * r_bar * alpha.sin(),
            axis,
            x_axis,
            y_axis,
            r_bar,
        })
    }

    fn direction(&self, theta: f64) -> Vec3 {
        let (s, c) = theta.sin_cos();
        self.x_axis * c + self.y_axis * s
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SphereEnvelopeBoundary {
    pub theta: f64,
    pub phi_ic: f64,
    pub phi_oc: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IntermediaryConfigs {
    pub x_c: Vec3,
    pub x_ic: Vec3,
    pub t_ic: Vec3,
    pub x_oc: Vec3,
    pub t_oc: Vec3,
}

/// Center of the intermediary sphere at locus angle `theta`.
pub fn intermediary_center(geom: &IntermediarySphereGeometry, theta: f64) -> Vec3 {
    geom.locus_center + geom.direction(theta) * geom.locus_radius
}

/// Entry point on the initial sphere at `(theta, phi_ic)`.
fn entry(geom: &IntermediarySphereGeometry, theta: f64, phi: f64) -> (Vec3, Vec3) {
    let e = geom.direction(theta);
    let (sa, ca) = geom.alpha.sin_cos();
    let radial = geom.axis * ca + e * sa;
    let x = geom.axis * sa - e * ca;
    (geom.r_i + radial * geom.r_bar, x * phi.cos() + radial.cross(&x) * phi.sin())
}

/// Exit point on the final sphere at `(theta, phi_oc)`.
fn exit(geom: &IntermediarySphereGeometry, theta: f64, phi: f64) -> (Vec3, Vec3) {
    let e = geom.direction(theta);
    let (sa, ca) = geom.alpha.sin_cos();
    let radial = -geom.axis * ca + e * sa;
    let x = -geom.axis * sa - e * ca;
    (geom.r_f + radial * geom.r_bar, x * phi.cos() + radial.cross(&x) * phi.sin())
}

pub fn intermediary_sphere_configs(geom: &IntermediarySphereGeometry, b: &SphereEnvelopeBoundary) -> IntermediaryConfigs {
    let (x_ic, t_ic) = entry(geom, b.theta, b.phi_ic);
    let (x_oc, t_oc) = exit(geom, b.theta, b.phi_oc);
    IntermediaryConfigs { x_c: intermediary_center(geom, b.theta), x_ic, t_ic, x_oc, t_oc }
}

struct Problem<'a> {
    geom: IntermediarySphereGeometry,
    initial: EndSphere,
    terminal: EndSphere,
    sel: SphereSelection,
    cfg: &'a PlannerConfig,
}

impl Problem<'_> {
    fn middle(&self, c: &IntermediaryConfigs) -> Result<SphericalPath> {
        let r = self.geom.r_bar;
        let a = SphericalConfig::new(c.x_ic - c.x_c, c.t_ic, r)?;
        let b = SphericalConfig::new(c.x_oc - c.x_c, c.t_oc, r)?;
        solve_spherical_dubins(&a, &b, &self.initial.params)
    }

    fn legs(&self, b: &SphereEnvelopeBoundary) -> Result<(IntermediaryConfigs, SphericalPath, SphericalPath, SphericalPath)> {
        let c = intermediary_sphere_configs(&self.geom, b);
        let first = self.initial.path_to(&c.x_ic, &c.t_ic)?;
        let last = self.terminal.path_from(&c.x_oc, &c.t_oc)?;
        let mid = self.middle(&c)?;
        Ok((c, first, mid, last))
    }

    fn length(&self, b: &SphereEnvelopeBoundary) -> Option<f64> {
        self.legs(b).ok().map(|(_, a, m, c)| a.total_length + m.total_length + c.total_length)
    }

    fn build(&self, b: &SphereEnvelopeBoundary) -> Result<CandidatePath> {
        let (c, first, mid, last) = self.legs(b)?;
        let step = self.cfg.step;
        // the intermediary sphere touches the end spheres from outside, so
        // its surface normal convention is the opposite type
        let middle = EndSphere { side: self.sel.initial.opposite(), center: c.x_c, params: self.initial.params, boundary: mid.start };
        let traj = assemble(vec![self.initial.lift(&first, step)?, middle.lift(&mid, step)?, self.terminal.lift(&last, step)?]);
        let segment_lengths = [first.total_length, mid.total_length, last.total_length];
        Ok(CandidatePath {
            class: PathClass::SphereEnvelope,
            selection: self.sel,
            label: PathClass::SphereEnvelope.label(&self.sel),
            parameters: vec![("theta".into(), b.theta), ("phi_ic".into(), b.phi_ic), ("phi_oc".into(), b.phi_oc)],
            segment_lengths,
            total_length: segment_lengths.iter().sum(),
            trajectory: traj,
        })
    }
}

/// Best sphere-envelope path over the boundary grid.
pub fn best_sphere_envelope_path(
    start: &Configuration,
    goal: &Configuration,
    sel: SphereSelection,
    params: &VehicleParams,
    cfg: &PlannerConfig,
) -> Result<CandidatePath> {
    if !sel.is_same_type() {
        return Err(Error::invalid("sphere-envelope class needs the same sphere type at both ends"));
    }
    let initial = EndSphere::new(start, sel.initial, params)?;
    let terminal = EndSphere::new(goal, sel.terminal, params)?;
    let geom = IntermediarySphereGeometry::new(&initial.center, &terminal.center, initial.params.r_bar)?;
    let problem = Problem { geom, initial, terminal, sel, cfg };

    let thetas = periodic_grid(cfg.theta_disc);
    let phis = periodic_closed_grid(cfg.phi_disc);
    let (nt, np) = (thetas.len(), phis.len());
    let boundary = |it: usize, ii: usize, io: usize| SphereEnvelopeBoundary { theta: thetas[it], phi_ic: phis[ii], phi_oc: phis[io] };

    let first_legs: Vec<Option<f64>> = par_map(nt * np, |i| {
        let (x, t) = entry(&geom, thetas[i / np], phis[i % np]);
        problem.initial.path_to(&x, &t).ok().map(|p| p.total_length)
    });
    let last_legs: Vec<Option<f64>> = par_map(nt * np, |i| {
        let (x, t) = exit(&geom, thetas[i / np], phis[i % np]);
        problem.terminal.path_from(&x, &t).ok().map(|p| p.total_length)
    });

    let (_, mut length, mut b) = par_argmin(nt * np * np, |i| {
        let (it, ii, io) = (i / (np * np), (i / np) % np, i % np);
        let first = first_legs[it * np + ii]?;
        let last = last_legs[it * np + io]?;
        let b = boundary(it, ii, io);
        let mid = problem.middle(&intermediary_sphere_configs(&geom, &b)).ok()?;
        Some((first + mid.total_length + last, b))
    })
    .ok_or_else(|| Error::InfeasibleSubproblem("no sphere-envelope grid point has feasible sphere legs".into()))?;

    if cfg.refine {
        let dt = TAU / nt as f64;
        let dp = TAU / np as f64;
        let axes = [
            RefineAxis { half_width: dt, bounds: None },
            RefineAxis { half_width: dp, bounds: None },
            RefineAxis { half_width: dp, bounds: None },
        ];
        let eval = |p: &[f64]| problem.length(&SphereEnvelopeBoundary { theta: p[0], phi_ic: p[1], phi_oc: p[2] });
        let (x, l) = refine_coordinates(eval, &[b.theta, b.phi_ic, b.phi_oc], length, &axes);
        b = SphereEnvelopeBoundary { theta: x[0], phi_ic: x[1], phi_oc: x[2] };
        length = l;
    }
    let cand = problem.build(&b)?;
    debug_assert!((cand.total_length - length).abs() <= 1e-9 * length.max(1.0));
    Ok(cand)
}
