//! Shortest bounded-curvature paths on a sphere, and lifting them to full
//! vehicle configurations.
//!
//! Paths are computed on the unit sphere with the frame `F = [X T N]`,
//! `N = X x T`. A segment with constant scaled geodesic curvature `u`
//! evolves the frame as `F <- F * Rot(a, phi)` with axis
//! `a = (u, 0, 1) / sqrt(1 + u^2)`, so a word is a product of axis-angle
//! rotations and the boundary-value problem is `E1 E2 ... En = F0^T F1`.

use std::f64::consts::{FRAC_1_SQRT_2, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{orthonormal_complement, rodrigues, wrap_to_2pi, Mat3, Vec3};
use crate::kinematics::{sample_arc_lengths, Configuration, CurvaturePair, SphereSide, VehicleParams};
use crate::trajectory::{Sample, Trajectory};

/// Largest supported normalized turning radius.
pub const MAX_R_HAT: f64 = 0.866_025_403_784_438_6;

/// Boundary-value residual (Frobenius, unit sphere) accepted for a word.
pub const RESIDUAL_TOL: f64 = 1e-6;

const ZERO_ANGLE_SNAP: f64 = 1e-10;
const REGIME_SLACK: f64 = 1e-12;
const SCAN_STEPS: usize = 360;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SphericalConfig {
    /// Position relative to the sphere center.
    pub x: Vec3,
    pub t: Vec3,
    /// `x x t / |x|`.
    pub n: Vec3,
}

impl SphericalConfig {
    /// Validates `|x| = r_bar` and `x . t = 0` to `1e-9` (relative), then
    /// re-orthonormalizes.
    pub fn new(x: Vec3, t: Vec3, r_bar: f64) -> Result<Self> {
        if !(r_bar > 0.0) {
            return Err(Error::invalid(format!("sphere radius must be positive, got {r_bar}")));
        }
        let xn = x.norm();
        if (xn - r_bar).abs() > 1e-9 * r_bar {
            return Err(Error::invalid(format!("point at distance {xn} is not on the sphere of radius {r_bar}")));
        }
        let tn = t.norm();
        let xh = x / xn;
        if (tn - 1.0).abs() > 1e-9 || xh.dot(&t).abs() > 1e-9 {
            return Err(Error::invalid("tangent must be a unit vector tangent to the sphere"));
        }
        let t = (t - xh * xh.dot(&t)).normalize();
        Ok(Self { x: xh * r_bar, t, n: xh.cross(&t) })
    }

    /// Spherical state of `config` relative to `center`.
    pub fn from_configuration(config: &Configuration, center: &Vec3, r_bar: f64) -> Result<Self> {
        Self::new(config.position - center, config.t, r_bar)
    }

    pub fn radius(&self) -> f64 {
        self.x.norm()
    }

    /// Unit-sphere frame `[X/|X| T N]`.
    pub fn unit_frame(&self) -> Mat3 {
        Mat3::from_columns(&[self.x / self.x.norm(), self.t, self.n])
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SphericalPathParams {
    pub r_bar: f64,
    /// Minimum turning radius on the sphere.
    pub r: f64,
    /// Geodesic-curvature bound.
    pub u_max: f64,
}

impl SphericalPathParams {
    pub fn new(r_bar: f64, u_max: f64) -> Result<Self> {
        if !(r_bar > 0.0 && r_bar.is_finite()) || !(u_max >= 0.0 && u_max.is_finite()) {
            return Err(Error::invalid(format!("invalid sphere parameters r_bar={r_bar}, u_max={u_max}")));
        }
        let r = r_bar / (1.0 + (u_max * r_bar).powi(2)).sqrt();
        Ok(Self { r_bar, r, u_max })
    }

    /// Parameters for a tangent sphere: pitch spheres have radius `R_pitch`
    /// and bound `1/R_yaw`, yaw spheres the other way around.
    pub fn for_side(side: SphereSide, params: &VehicleParams) -> Self {
        let (r_bar, other) = if side.is_pitch() { (params.r_pitch, params.r_yaw) } else { (params.r_yaw, params.r_pitch) };
        // both radii are validated positive by VehicleParams
        Self::new(r_bar, 1.0 / other).expect("vehicle radii are positive")
    }

    pub fn r_hat(&self) -> f64 {
        self.r / self.r_bar
    }

    /// Bound on the unit sphere.
    pub fn u_max_hat(&self) -> f64 {
        self.u_max * self.r_bar
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SphereTurn {
    L,
    R,
    G,
}

impl SphereTurn {
    /// Scaled geodesic curvature for bound `u_max_hat`.
    pub fn control(self, u_max_hat: f64) -> f64 {
        match self {
            SphereTurn::L => u_max_hat,
            SphereTurn::R => -u_max_hat,
            SphereTurn::G => 0.0,
        }
    }

    /// Rotation axis of the unit-sphere frame, in body coordinates.
    pub fn axis(self, u_max_hat: f64) -> Vec3 {
        Vec3::new(self.control(u_max_hat), 0.0, 1.0).normalize()
    }

    /// Unit-sphere arc length per radian of frame rotation.
    pub fn length_per_angle(self, u_max_hat: f64) -> f64 {
        1.0 / (1.0 + self.control(u_max_hat).powi(2)).sqrt()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PathFamily {
    Cgc,
    Ccc,
    Cccc,
    Ccccc,
    /// `CCC` with a middle arc of exactly `pi`.
    CcPiC,
}

impl PathFamily {
    fn words(self) -> &'static [&'static [SphereTurn]] {
        use SphereTurn::*;
        match self {
            PathFamily::Cgc => &[&[L, G, L], &[L, G, R], &[R, G, L], &[R, G, R]],
            PathFamily::Ccc | PathFamily::CcPiC => &[&[L, R, L], &[R, L, R]],
            PathFamily::Cccc => &[&[L, R, L, R], &[R, L, R, L]],
            PathFamily::Ccccc => &[&[L, R, L, R, L], &[R, L, R, L, R]],
        }
    }
}

/// Candidate families for a normalized turning radius.
pub fn candidate_families(r_hat: f64) -> Result<Vec<PathFamily>> {
    if !(r_hat > 0.0) || r_hat > MAX_R_HAT + REGIME_SLACK {
        return Err(Error::UnsupportedRadius { r_hat });
    }
    Ok(if r_hat <= 0.5 + REGIME_SLACK {
        vec![PathFamily::Cgc, PathFamily::Ccc]
    } else if r_hat <= FRAC_1_SQRT_2 + REGIME_SLACK {
        vec![PathFamily::Cgc, PathFamily::Cccc]
    } else {
        vec![PathFamily::Cgc, PathFamily::Ccccc, PathFamily::CcPiC]
    })
}

/// Families actually searched. General `CCC` is a degenerate member of the
/// longer families and is always included; it also covers `CC_pi C`.
fn solver_families(r_hat: f64) -> Result<Vec<PathFamily>> {
    let mut fams: Vec<PathFamily> =
        candidate_families(r_hat)?.into_iter().filter(|f| *f != PathFamily::CcPiC).collect();
    if !fams.contains(&PathFamily::Ccc) {
        fams.push(PathFamily::Ccc);
    }
    Ok(fams)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SphericalSegment {
    pub turn: SphereTurn,
    /// Frame rotation angle in radians.
    pub angle: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SphericalPath {
    pub start: SphericalConfig,
    pub params: SphericalPathParams,
    pub segments: Vec<SphericalSegment>,
    pub total_length: f64,
}

impl SphericalPath {
    /// Length of one segment in meters.
    pub fn segment_length(&self, seg: &SphericalSegment) -> f64 {
        self.params.r_bar * seg.turn.length_per_angle(self.params.u_max_hat()) * seg.angle
    }

    /// Word as a string such as `"LGR"`.
    pub fn word(&self) -> String {
        self.segments
            .iter()
            .map(|s| match s.turn {
                SphereTurn::L => 'L',
                SphereTurn::R => 'R',
                SphereTurn::G => 'G',
            })
            .collect()
    }

    /// Unit-sphere frame at the end of the path.
    pub fn end_frame(&self) -> Mat3 {
        let u = self.params.u_max_hat();
        self.segments
            .iter()
            .fold(self.start.unit_frame(), |f, s| f * rodrigues(&s.turn.axis(u), s.angle))
    }
}

fn snap_angle(a: f64) -> f64 {
    let a = wrap_to_2pi(a);
    if a < ZERO_ANGLE_SNAP || a > TAU - ZERO_ANGLE_SNAP {
        0.0
    } else {
        a
    }
}

/// Angle of the rotation about unit `axis` taking `v` to `w`, if `v` is not
/// parallel to the axis.
fn angle_taking(axis: &Vec3, v: &Vec3, w: &Vec3) -> Option<f64> {
    let vp = v - axis * axis.dot(v);
    let wp = w - axis * axis.dot(w);
    if vp.norm() < 1e-9 || wp.norm() < 1e-9 {
        return None;
    }
    Some(axis.dot(&vp.cross(&wp)).atan2(vp.dot(&wp)))
}

/// Rotation angle of `m`, assumed to be a rotation about unit `axis`.
fn angle_about(axis: &Vec3, m: &Mat3) -> f64 {
    let p = orthonormal_complement(axis);
    let q = m * p;
    axis.dot(&p.cross(&q)).atan2(p.dot(&q))
}

/// Completes a solution given the product `mid` of the inner segments:
/// finds the first and last angles and checks the residual.
fn complete(first: &Vec3, last: &Vec3, mid: &Mat3, goal: &Mat3) -> Option<(f64, f64)> {
    let v = mid * last;
    let w = goal * last;
    let phi1 = snap_angle(angle_taking(first, &v, &w).unwrap_or(0.0));
    let head = rodrigues(first, phi1) * mid;
    let phi_last = snap_angle(angle_about(last, &(head.transpose() * goal)));
    let residual = (head * rodrigues(last, phi_last) - goal).norm();
    (residual <= RESIDUAL_TOL).then_some((phi1, phi_last))
}

/// All solutions `(phi1, phi2, phi3)` of `E(a1,phi1) E(a2,phi2) E(a3,phi3) = goal`.
fn solve_three(a: [Vec3; 3], goal: &Mat3) -> Vec<[f64; 3]> {
    let [a1, a2, a3] = a;
    let d12 = a1.dot(&a2);
    let d23 = a2.dot(&a3);
    let ca = a1.dot(&a3) - d12 * d23;
    let cb = a1.dot(&a2.cross(&a3));
    let cc = a1.dot(&(goal * a3)) - d12 * d23;
    let rho = ca.hypot(cb);
    if rho < 1e-12 {
        return Vec::new();
    }
    let ratio = cc / rho;
    if ratio.abs() > 1.0 + 1e-9 {
        return Vec::new();
    }
    let base = cb.atan2(ca);
    let delta = ratio.clamp(-1.0, 1.0).acos();
    let mut out = Vec::with_capacity(2);
    for phi2 in [base - delta, base + delta] {
        let phi2 = snap_angle(phi2);
        if out.iter().any(|s: &[f64; 3]| s[1] == phi2) {
            continue;
        }
        if let Some((phi1, phi3)) = complete(&a1, &a3, &rodrigues(&a2, phi2), goal) {
            out.push([phi1, phi2, phi3]);
        }
    }
    out
}

fn middle_product(mids: &[Vec3], psi: f64) -> Mat3 {
    mids.iter().fold(Mat3::identity(), |m, a| m * rodrigues(a, psi))
}

/// Solutions with the inner segments sharing one angle `psi`, found by a
/// scan over `psi` with bisection on sign changes. Returns the full angle
/// vector per solution.
fn solve_equal_middle(axes: &[Vec3], goal: &Mat3) -> Vec<Vec<f64>> {
    let n = axes.len();
    let (first, last, mids) = (axes[0], axes[n - 1], &axes[1..n - 1]);
    let target = first.dot(&(goal * last));
    let f = |psi: f64| first.dot(&(middle_product(mids, psi) * last)) - target;

    let mut roots = Vec::new();
    let mut prev_psi = 0.0;
    let mut prev_f = f(0.0);
    for i in 1..=SCAN_STEPS {
        let psi = TAU * i as f64 / SCAN_STEPS as f64;
        let fv = f(psi);
        if prev_f == 0.0 {
            roots.push(prev_psi);
        } else if prev_f.signum() != fv.signum() && fv != 0.0 {
            let (mut lo, mut hi, mut flo) = (prev_psi, psi, prev_f);
            for _ in 0..100 {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                let fm = f(mid);
                if fm.signum() == flo.signum() {
                    lo = mid;
                    flo = fm;
                } else {
                    hi = mid;
                }
            }
            roots.push(0.5 * (lo + hi));
        }
        prev_psi = psi;
        prev_f = fv;
    }

    roots
        .into_iter()
        .filter_map(|psi| {
            let psi = snap_angle(psi);
            let (phi1, phi_last) = complete(&first, &last, &middle_product(mids, psi), goal)?;
            let mut v = Vec::with_capacity(n);
            v.push(phi1);
            v.extend(std::iter::repeat(psi).take(n - 2));
            v.push(phi_last);
            Some(v)
        })
        .collect()
}

/// Shortest path among the candidate families whose boundary residual is
/// below [`RESIDUAL_TOL`]. Ties go to the earlier family and word.
pub fn solve_spherical_dubins(
    start: &SphericalConfig,
    goal: &SphericalConfig,
    params: &SphericalPathParams,
) -> Result<SphericalPath> {
    let tol = 1e-9 * params.r_bar;
    if (start.radius() - params.r_bar).abs() > tol || (goal.radius() - params.r_bar).abs() > tol {
        return Err(Error::invalid("boundary configurations are not on the parameter sphere"));
    }
    let r_hat = params.r_hat();
    let families = solver_families(r_hat)?;
    let u = params.u_max_hat();
    let g = start.unit_frame().transpose() * goal.unit_frame();

    let mut best: Option<SphericalPath> = None;
    for family in families {
        for word in family.words() {
            let axes: Vec<Vec3> = word.iter().map(|t| t.axis(u)).collect();
            let solutions: Vec<Vec<f64>> = if axes.len() == 3 {
                solve_three([axes[0], axes[1], axes[2]], &g).into_iter().map(|s| s.to_vec()).collect()
            } else {
                solve_equal_middle(&axes, &g)
            };
            for angles in solutions {
                let length: f64 = params.r_bar
                    * word.iter().zip(&angles).map(|(t, a)| t.length_per_angle(u) * a).sum::<f64>();
                if best.as_ref().is_some_and(|b| length >= b.total_length) {
                    continue;
                }
                let segments =
                    word.iter().zip(&angles).map(|(&turn, &angle)| SphericalSegment { turn, angle }).collect();
                best = Some(SphericalPath { start: *start, params: *params, segments, total_length: length });
            }
        }
    }
    best.ok_or_else(|| Error::InfeasibleSubproblem(format!("no spherical word connects the boundary states (r_hat={r_hat:.4})")))
}

/// 3D curvatures of a sphere segment with scaled control `u_hat`.
fn lifted_curvature(side: SphereSide, r_bar: f64, u_hat: f64) -> CurvaturePair {
    let ug = u_hat / r_bar;
    if side.is_pitch() {
        let d = f64::from(side.delta_io());
        CurvaturePair::new(-d * ug, d / r_bar)
    } else {
        let d = f64::from(side.delta_lr());
        CurvaturePair::new(d / r_bar, d * ug)
    }
}

/// Samples a spherical path as vehicle configurations. The sphere must be
/// the `side` tangent sphere of the boundary configurations, centered at
/// `center`.
pub fn lift_spherical_path(path: &SphericalPath, center: &Vec3, side: SphereSide, step: f64) -> Result<Trajectory> {
    if !(step > 0.0) {
        return Err(Error::invalid(format!("sampling step must be positive, got {step}")));
    }
    let r_bar = path.params.r_bar;
    let u = path.params.u_max_hat();
    let make = |s: f64, f: &Mat3, curvature: CurvaturePair| {
        let xh: Vec3 = f.column(0).into_owned();
        let t: Vec3 = f.column(1).into_owned();
        let frame = side.frame_from_surface(&t, &xh);
        Sample { s, config: Configuration::from_frame_unchecked(center + xh * r_bar, &frame), curvature }
    };

    let mut frame = path.start.unit_frame();
    let first_curv = lifted_curvature(side, r_bar, path.segments.first().map_or(0.0, |s| s.turn.control(u)));
    let mut samples = vec![make(0.0, &frame, first_curv)];
    let mut s0 = 0.0;
    for seg in &path.segments {
        let len = path.segment_length(seg);
        if len <= 0.0 {
            continue;
        }
        let curv = lifted_curvature(side, r_bar, seg.turn.control(u));
        if let Some(last) = samples.last_mut() {
            last.curvature = curv;
        }
        let axis = seg.turn.axis(u);
        for ds in sample_arc_lengths(len, step).into_iter().skip(1) {
            let f = frame * rodrigues(&axis, seg.angle * ds / len);
            samples.push(make(s0 + ds, &f, curv));
        }
        frame *= rodrigues(&axis, seg.angle);
        s0 += len;
    }
    Ok(Trajectory::from_samples(samples))
}
