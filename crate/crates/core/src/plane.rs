//! Plane class: tangent spheres of opposite type joined by a planar Dubins
//! path on a plane tangent to both (a cross-tangent plane).

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use crate::dubins2d::{sample_planar_path, solve_planar_dubins, PlanarConfig, PlanarDubinsPath, PlanarSample};
use crate::error::{Error, Result};
use crate::geom::{orthonormal_complement, Vec3};
use crate::kinematics::{Configuration, CurvaturePair, SphereSide, VehicleParams};
use crate::planner::{assemble, CandidatePath, EndSphere, PathClass, PlannerConfig, SphereSelection};
use crate::search::{closed_grid, par_argmin, par_map, periodic_grid, refine_coordinates, RefineAxis};
use crate::sphere::SphericalPath;
use crate::trajectory::{Sample, Trajectory};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CrossTangentGeometry {
    pub r_i: Vec3,
    pub r_f: Vec3,
    /// Centers of the two tangency circles.
    pub a: Vec3,
    pub b: Vec3,
    pub alpha: f64,
    pub axis: Vec3,
    pub x_axis: Vec3,
    pub y_axis: Vec3,
    pub r_bar: f64,
}

impl CrossTangentGeometry {
    /// Exists when the centers are at least `2 r_bar` apart.
    pub fn new(r_i: &Vec3, r_f: &Vec3, r_bar: f64) -> Result<Self> {
        let d = r_f - r_i;
        let dist = d.norm();
        if dist < 2.0 * r_bar * (1.0 - 1e-12) || dist == 0.0 {
            return Err(Error::ClassInfeasible(format!("spheres intersect (center distance {dist:.6} < {:.6})", 2.0 * r_bar)));
        }
        let alpha = (2.0 * r_bar / dist).min(1.0).acos();
        let axis = d / dist;
        let x_axis = orthonormal_complement(&axis);
        let y_axis = axis.cross(&x_axis);
        let shift = axis * (r_bar * alpha.cos());
        Ok(Self { r_i: *r_i, r_f: *r_f, a: r_i + shift, b: r_f - shift, alpha, axis, x_axis, y_axis, r_bar })
    }

    pub fn tangency_radius(&self) -> f64 {
        self.r_bar * self.alpha.sin()
    }

    fn direction(&self, theta: f64) -> Vec3 {
        let (s, c) = theta.sin_cos();
        self.x_axis * c + self.y_axis * s
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PlaneBoundary {
    pub theta: f64,
    pub phi_ic: f64,
    pub phi_oc: f64,
}

/// Entry/exit points, tangents and the plane basis.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CrossTangentConfigs {
    pub x_ic: Vec3,
    pub t_ic: Vec3,
    pub x_oc: Vec3,
    pub t_oc: Vec3,
    /// Unit vector from `x_ic` to `x_oc`.
    pub t: Vec3,
    /// `n x t` with `n` the outward normal of the initial sphere at `x_ic`.
    pub w: Vec3,
    /// Outward normal of the initial sphere at `x_ic`.
    pub n: Vec3,
    /// Distance from `x_ic` to `x_oc`.
    pub distance: f64,
}

pub fn cross_tangent_configs(geom: &CrossTangentGeometry, b: &PlaneBoundary) -> CrossTangentConfigs {
    let e = geom.direction(b.theta);
    let rho = geom.tangency_radius();
    let x_ic = geom.a + e * rho;
    let x_oc = geom.b - e * rho;
    let n = (x_ic - geom.r_i) / geom.r_bar;
    let chord = x_oc - x_ic;
    let distance = chord.norm();
    let t = if distance > 1e-12 * geom.r_bar { chord / distance } else { e };
    // the second basis vector uses the initial sphere normal at both ends
    let w = n.cross(&t);
    let tangent = |phi: f64| t * phi.cos() + w * phi.sin();
    CrossTangentConfigs { x_ic, t_ic: tangent(b.phi_ic), x_oc, t_oc: tangent(b.phi_oc), t, w, n, distance }
}

/// Turning radius on the plane: `R_yaw` for pitch pairs, `R_pitch` for yaw
/// pairs.
pub fn planar_radius(side: SphereSide, params: &VehicleParams) -> f64 {
    if side.is_pitch() {
        params.r_yaw
    } else {
        params.r_pitch
    }
}

/// Maps plane samples to configurations; the surface normal is that of the
/// `initial` sphere side at the entry point.
pub fn lift_plane_path(planar: &[PlanarSample], c: &CrossTangentConfigs, initial: SphereSide) -> Trajectory {
    let samples = planar
        .iter()
        .map(|p| {
            let (sp, cp) = p.config.psi.sin_cos();
            let tan = c.t * cp + c.w * sp;
            let frame = initial.frame_from_surface(&tan, &c.n);
            let d = initial.delta();
            let curvature = if initial.is_pitch() {
                CurvaturePair::new(-d * p.curvature, 0.0)
            } else {
                CurvaturePair::new(0.0, d * p.curvature)
            };
            let pos = c.x_ic + c.t * p.config.u + c.w * p.config.v;
            Sample { s: p.s, config: Configuration::from_frame_unchecked(pos, &frame), curvature }
        })
        .collect();
    Trajectory::from_samples(samples)
}

struct Problem<'a> {
    geom: CrossTangentGeometry,
    initial: EndSphere,
    terminal: EndSphere,
    radius: f64,
    sel: SphereSelection,
    cfg: &'a PlannerConfig,
}

impl Problem<'_> {
    fn planar(&self, c: &CrossTangentConfigs, b: &PlaneBoundary) -> Result<PlanarDubinsPath> {
        solve_planar_dubins(&PlanarConfig::new(0.0, 0.0, b.phi_ic), &PlanarConfig::new(c.distance, 0.0, b.phi_oc), self.radius)
    }

    fn legs(&self, b: &PlaneBoundary) -> Result<(CrossTangentConfigs, SphericalPath, PlanarDubinsPath, SphericalPath)> {
        let c = cross_tangent_configs(&self.geom, b);
        let first = self.initial.path_to(&c.x_ic, &c.t_ic)?;
        let last = self.terminal.path_from(&c.x_oc, &c.t_oc)?;
        let mid = self.planar(&c, b)?;
        Ok((c, first, mid, last))
    }

    fn length(&self, b: &PlaneBoundary) -> Option<f64> {
        self.legs(b).ok().map(|(_, a, m, c)| a.total_length + m.total_length + c.total_length)
    }

    fn build(&self, b: &PlaneBoundary) -> Result<CandidatePath> {
        let (c, first, mid, last) = self.legs(b)?;
        let step = self.cfg.step;
        let planar = sample_planar_path(&mid, &PlanarConfig::new(0.0, 0.0, b.phi_ic), step)?;
        let traj = assemble(vec![
            self.initial.lift(&first, step)?,
            lift_plane_path(&planar, &c, self.sel.initial),
            self.terminal.lift(&last, step)?,
        ]);
        let segment_lengths = [first.total_length, mid.total_length, last.total_length];
        Ok(CandidatePath {
            class: PathClass::Plane,
            selection: self.sel,
            label: PathClass::Plane.label(&self.sel),
            parameters: vec![("theta".into(), b.theta), ("phi_ic".into(), b.phi_ic), ("phi_oc".into(), b.phi_oc)],
            segment_lengths,
            total_length: segment_lengths.iter().sum(),
            trajectory: traj,
        })
    }
}

/// Best plane-class path over the boundary grid.
pub fn best_plane_path(
    start: &Configuration,
    goal: &Configuration,
    sel: SphereSelection,
    params: &VehicleParams,
    cfg: &PlannerConfig,
) -> Result<CandidatePath> {
    if !sel.is_opposite_type() {
        return Err(Error::invalid("plane class needs opposite sphere types at the two ends"));
    }
    let initial = EndSphere::new(start, sel.initial, params)?;
    let terminal = EndSphere::new(goal, sel.terminal, params)?;
    let geom = CrossTangentGeometry::new(&initial.center, &terminal.center, initial.params.r_bar)?;
    let problem = Problem { geom, initial, terminal, radius: planar_radius(sel.initial, params), sel, cfg };

    let thetas = periodic_grid(cfg.theta_disc);
    let phis = closed_grid(-FRAC_PI_2, FRAC_PI_2, cfg.phi_disc);
    let (nt, np) = (thetas.len(), phis.len());
    let boundary = |it: usize, ii: usize, io: usize| PlaneBoundary { theta: thetas[it], phi_ic: phis[ii], phi_oc: phis[io] };

    let first_legs: Vec<Option<f64>> = par_map(nt * np, |i| {
        let c = cross_tangent_configs(&geom, &boundary(i / np, i % np, 0));
        problem.initial.path_to(&c.x_ic, &c.t_ic).ok().map(|p| p.total_length)
    });
    let last_legs: Vec<Option<f64>> = par_map(nt * np, |i| {
        let c = cross_tangent_configs(&geom, &boundary(i / np, 0, i % np));
        problem.terminal.path_from(&c.x_oc, &c.t_oc).ok().map(|p| p.total_length)
    });

    let (_, mut length, mut b) = par_argmin(nt * np * np, |i| {
        let (it, ii, io) = (i / (np * np), (i / np) % np, i % np);
        let first = first_legs[it * np + ii]?;
        let last = last_legs[it * np + io]?;
        let b = boundary(it, ii, io);
        let mid = problem.planar(&cross_tangent_configs(&geom, &b), &b).ok()?;
        Some((first + mid.total_length + last, b))
    })
    .ok_or_else(|| Error::InfeasibleSubproblem("no plane grid point has feasible sphere legs".into()))?;

    if cfg.refine {
        let dp = PI / (np - 1) as f64;
        let axes = [
            RefineAxis { half_width: TAU / nt as f64, bounds: None },
            RefineAxis { half_width: dp, bounds: Some((-FRAC_PI_2, FRAC_PI_2)) },
            RefineAxis { half_width: dp, bounds: Some((-FRAC_PI_2, FRAC_PI_2)) },
        ];
        let eval = |p: &[f64]| problem.length(&PlaneBoundary { theta: p[0], phi_ic: p[1], phi_oc: p[2] });
        let (x, l) = refine_coordinates(eval, &[b.theta, b.phi_ic, b.phi_oc], length, &axes);
        b = PlaneBoundary { theta: x[0], phi_ic: x[1], phi_oc: x[2] };
        length = l;
    }
    let cand = problem.build(&b)?;
    debug_assert!((cand.total_length - length).abs() <= 1e-9 * length.max(1.0));
    Ok(cand)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::EulerZYX;
    use proptest::prelude::*;

    #[test]
    fn alpha_for_four_radii() {
        let g = CrossTangentGeometry::new(&Vec3::zeros(), &Vec3::new(0.0, 0.0, 8.0), 2.0).unwrap();
        assert!((g.alpha - PI / 3.0).abs() < 1e-12);
        assert!((g.tangency_radius() - 3f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn intersecting_spheres_rejected() {
        assert!(matches!(CrossTangentGeometry::new(&Vec3::zeros(), &Vec3::x(), 1.0), Err(Error::ClassInfeasible(_))));
        assert!(CrossTangentGeometry::new(&Vec3::zeros(), &Vec3::zeros(), 1.0).is_err());
        // touching spheres are allowed
        let g = CrossTangentGeometry::new(&Vec3::zeros(), &Vec3::new(2.0, 0.0, 0.0), 1.0).unwrap();
        assert_eq!(g.alpha, 0.0);
        let c = cross_tangent_configs(&g, &PlaneBoundary { theta: 0.3, phi_ic: 0.0, phi_oc: 0.0 });
        assert!(c.distance < 1e-12);
    }

    #[test]
    fn zero_phi_tangent_is_chord_direction() {
        let g = CrossTangentGeometry::new(&Vec3::new(1.0, 2.0, 3.0), &Vec3::new(10.0, -4.0, 8.0), 2.0).unwrap();
        let c = cross_tangent_configs(&g, &PlaneBoundary { theta: 1.1, phi_ic: 0.0, phi_oc: 0.0 });
        assert_eq!(c.t_ic, c.t);
    }

    #[test]
    fn identical_boundaries() {
        let p = VehicleParams::new(40.0, 30.0).unwrap();
        let c = Configuration::from_euler(Vec3::zeros(), EulerZYX::from_degrees(10.0, 0.0, 0.0));
        let cfg = PlannerConfig::new(4, 3, 1.0, false).unwrap();
        // same-type pairing is not a plane pairing at all
        assert!(best_plane_path(&c, &c, SphereSelection::new(SphereSide::Inner, SphereSide::Inner), &p, &cfg).is_err());
        // the inner and outer spheres of one configuration touch at the vehicle
        let cand = best_plane_path(&c, &c, SphereSelection::new(SphereSide::Inner, SphereSide::Outer), &p, &cfg).unwrap();
        assert!(cand.segment_lengths[1] < 1e-9);
    }

    #[test]
    fn plane_leg_has_constant_normal_and_reaches_goal() {
        let p = VehicleParams::new(40.0, 30.0).unwrap();
        let start = Configuration::from_euler(Vec3::new(0.0, 0.0, 0.0), EulerZYX::from_degrees(0.0, 10.0, 0.0));
        let goal = Configuration::from_euler(Vec3::new(300.0, 50.0, -60.0), EulerZYX::from_degrees(40.0, -10.0, 10.0));
        let cfg = PlannerConfig::new(6, 5, 0.5, false).unwrap();
        for sel in PathClass::Plane.pairings() {
            let cand = best_plane_path(&start, &goal, sel, &p, &cfg).unwrap();
            let last = cand.trajectory.last().unwrap().config;
            assert!(last.position_error(&goal) < 1e-5, "{}", cand.label);
            assert!(last.frame_error(&goal) < 1e-5, "{}", cand.label);
            // samples of the plane leg
            let s0 = cand.segment_lengths[0];
            let s1 = s0 + cand.segment_lengths[1];
            let plane: Vec<_> = cand.trajectory.samples.iter().filter(|s| s.s >= s0 && s.s <= s1).collect();
            let normal = |s: &Sample| if sel.initial.is_pitch() { s.config.u } else { s.config.y };
            let n0 = normal(plane[0]);
            for s in &plane {
                assert!((normal(s) - n0).norm() < 1e-9);
            }
        }
    }

    proptest! {
        #[test]
        fn cross_tangency(theta in 0.0..TAU, d in 2.0f64..20.0, dir in prop::array::uniform3(-1.0f64..1.0)) {
            let v = Vec3::from(dir);
            prop_assume!(v.norm() > 0.1);
            let r_i = Vec3::new(1.0, -2.0, 0.5);
            let r_f = r_i + v.normalize() * d;
            let g = CrossTangentGeometry::new(&r_i, &r_f, 1.0).unwrap();
            let c = cross_tangent_configs(&g, &PlaneBoundary { theta, phi_ic: 0.4, phi_oc: -0.3 });
            prop_assert!(((c.x_ic - r_i).norm() - 1.0).abs() < 1e-9);
            prop_assert!(((c.x_oc - r_f) + (c.x_ic - r_i)).norm() < 1e-9);
            // plane through the midpoint with normal n: centers at +-r_bar
            let mid = (r_i + r_f) / 2.0;
            prop_assert!(((r_i - mid).dot(&c.n) + 1.0).abs() < 1e-9);
            prop_assert!(((r_f - mid).dot(&c.n) - 1.0).abs() < 1e-9);
            prop_assert!((c.x_oc - mid).dot(&c.n).abs() < 1e-9);
            prop_assert!(c.t_oc.dot(&c.n).abs() < 1e-9 && c.t_ic.dot(&c.n).abs() < 1e-9);
        }
    }
}
