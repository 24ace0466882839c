//! Rotation-minimizing-frame vehicle model.
//!
//! The vehicle state is a position `X` and an orthonormal frame `[T Y U]`.
//! With arc length `s` as the parameter (unit speed), the frame evolves as
//!
//! ```text
//! X' = T,  T' = kg Y + kn U,  Y' = -kg T,  U' = -kn T
//! ```
//!
//! where `kg` (yaw rate) and `kn` (pitch rate) are bounded by `1/R_yaw` and
//! `1/R_pitch`. For constant curvatures the solution is a closed-form
//! homogeneous transform, see [`segment_transform`].

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{euler_to_frame, is_rotation, EulerZYX, HomogeneousTransform, Mat3, Vec3, ORTHO_TOL};
use crate::trajectory::{Sample, Trajectory};

/// Curvatures below this magnitude are treated as a straight segment.
pub const STRAIGHT_EPS: f64 = 1e-10;

/// Slack allowed on the curvature bounds.
pub const CURVATURE_SLACK: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Configuration {
    pub position: Vec3,
    pub t: Vec3,
    pub y: Vec3,
    pub u: Vec3,
}

impl Configuration {
    /// Builds a configuration from a position and a frame with columns
    /// `[T Y U]`; the frame must be a proper rotation within `1e-9`.
    pub fn new(position: Vec3, frame: Mat3) -> Result<Self> {
        if !position.iter().all(|v| v.is_finite()) {
            return Err(Error::invalid("configuration position must be finite"));
        }
        if !is_rotation(&frame, ORTHO_TOL) {
            return Err(Error::invalid("configuration frame is not a proper rotation matrix"));
        }
        Ok(Self::from_frame_unchecked(position, &frame))
    }

    pub(crate) fn from_frame_unchecked(position: Vec3, frame: &Mat3) -> Self {
        Self {
            position,
            t: frame.column(0).into_owned(),
            y: frame.column(1).into_owned(),
            u: frame.column(2).into_owned(),
        }
    }

    pub fn from_euler(position: Vec3, angles: EulerZYX) -> Self {
        Self::from_frame_unchecked(position, &euler_to_frame(angles))
    }

    pub fn identity() -> Self {
        Self::from_frame_unchecked(Vec3::zeros(), &Mat3::identity())
    }

    pub fn frame(&self) -> Mat3 {
        Mat3::from_columns(&[self.t, self.y, self.u])
    }

    pub fn to_transform(&self) -> HomogeneousTransform {
        HomogeneousTransform::new(self.frame(), self.position)
    }

    pub fn from_transform(h: &HomogeneousTransform) -> Self {
        Self::from_frame_unchecked(h.translation, &h.rotation)
    }

    /// Applies a body-frame transform: `[R X; 0 1] * h`.
    pub fn compose(&self, h: &HomogeneousTransform) -> Self {
        Self::from_transform(&(self.to_transform() * *h))
    }

    /// Applies a global rigid motion to the configuration.
    pub fn transformed_by(&self, g: &HomogeneousTransform) -> Self {
        Self::from_transform(&(*g * self.to_transform()))
    }

    pub fn position_error(&self, other: &Configuration) -> f64 {
        (self.position - other.position).norm()
    }

    /// Frobenius norm of the difference between the two frames.
    pub fn frame_error(&self, other: &Configuration) -> f64 {
        (self.frame() - other.frame()).norm()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct VehicleParams {
    pub r_pitch: f64,
    pub r_yaw: f64,
}

impl VehicleParams {
    pub fn new(r_pitch: f64, r_yaw: f64) -> Result<Self> {
        for (name, v) in [("r_pitch", r_pitch), ("r_yaw", r_yaw)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::invalid(format!("{name} must be positive and finite, got {v}")));
            }
        }
        Ok(Self { r_pitch, r_yaw })
    }

    pub fn kappa_g_max(&self) -> f64 {
        1.0 / self.r_yaw
    }

    pub fn kappa_n_max(&self) -> f64 {
        1.0 / self.r_pitch
    }

    /// Default sampling step, `min(R_pitch, R_yaw) / 50`.
    pub fn default_step(&self) -> f64 {
        self.r_pitch.min(self.r_yaw) / 50.0
    }

    /// Turning radius when both curvatures are saturated.
    pub fn saturated_turn_radius(&self) -> f64 {
        1.0 / (self.kappa_g_max().powi(2) + self.kappa_n_max().powi(2)).sqrt()
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CurvaturePair {
    pub kappa_g: f64,
    pub kappa_n: f64,
}

impl CurvaturePair {
    pub const STRAIGHT: CurvaturePair = CurvaturePair { kappa_g: 0.0, kappa_n: 0.0 };

    pub fn new(kappa_g: f64, kappa_n: f64) -> Self {
        Self { kappa_g, kappa_n }
    }

    /// `sqrt(kg^2 + kn^2)`, the rotation rate of the frame.
    pub fn magnitude(&self) -> f64 {
        self.kappa_g.hypot(self.kappa_n)
    }

    pub fn within_bounds(&self, params: &VehicleParams) -> bool {
        self.kappa_g.abs() <= params.kappa_g_max() + CURVATURE_SLACK
            && self.kappa_n.abs() <= params.kappa_n_max() + CURVATURE_SLACK
    }
}

/// The nine constant-curvature primitives obtained from bang-bang values of
/// the two curvatures.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MotionPrimitive {
    /// Left turn on the inner sphere.
    LSi,
    RSi,
    /// Left turn on the outer sphere.
    LSo,
    RSo,
    /// Great circle on the inner pitch sphere (pure pitch up).
    GSi,
    GSo,
    /// Pure yaw turns.
    Lp,
    Rp,
    S,
}

impl MotionPrimitive {
    pub const ALL: [MotionPrimitive; 9] = [
        MotionPrimitive::LSi,
        MotionPrimitive::RSi,
        MotionPrimitive::LSo,
        MotionPrimitive::RSo,
        MotionPrimitive::GSi,
        MotionPrimitive::GSo,
        MotionPrimitive::Lp,
        MotionPrimitive::Rp,
        MotionPrimitive::S,
    ];

    /// Sign of `kg` and `kn` (each in `{-1, 0, 1}`).
    pub fn signs(self) -> (i8, i8) {
        use MotionPrimitive::*;
        match self {
            LSi => (1, 1),
            RSi => (-1, 1),
            LSo => (1, -1),
            RSo => (-1, -1),
            GSi => (0, 1),
            GSo => (0, -1),
            Lp => (1, 0),
            Rp => (-1, 0),
            S => (0, 0),
        }
    }

    pub fn curvatures(self, params: &VehicleParams) -> CurvaturePair {
        let (g, n) = self.signs();
        CurvaturePair::new(f64::from(g) * params.kappa_g_max(), f64::from(n) * params.kappa_n_max())
    }

    pub fn label(self) -> &'static str {
        use MotionPrimitive::*;
        match self {
            LSi => "L_si",
            RSi => "R_si",
            LSo => "L_so",
            RSo => "R_so",
            GSi => "G_si",
            GSo => "G_so",
            Lp => "L_p",
            Rp => "R_p",
            S => "S",
        }
    }
}

/// One of the four spheres tangent to a configuration.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SphereSide {
    /// Pitch sphere centered along `+U`.
    Inner,
    /// Pitch sphere centered along `-U`.
    Outer,
    /// Yaw sphere centered along `+Y`.
    Left,
    /// Yaw sphere centered along `-Y`.
    Right,
}

impl SphereSide {
    pub const ALL: [SphereSide; 4] = [SphereSide::Inner, SphereSide::Outer, SphereSide::Left, SphereSide::Right];

    /// Exactly one of the two flags must be nonzero, and it must be `+-1`.
    pub fn from_deltas(delta_io: i8, delta_lr: i8) -> Result<Self> {
        match (delta_io, delta_lr) {
            (1, 0) => Ok(SphereSide::Inner),
            (-1, 0) => Ok(SphereSide::Outer),
            (0, 1) => Ok(SphereSide::Left),
            (0, -1) => Ok(SphereSide::Right),
            _ => Err(Error::invalid(format!(
                "sphere selection needs exactly one nonzero unit flag, got (delta_io={delta_io}, delta_lr={delta_lr})"
            ))),
        }
    }

    pub fn delta_io(self) -> i8 {
        match self {
            SphereSide::Inner => 1,
            SphereSide::Outer => -1,
            _ => 0,
        }
    }

    pub fn delta_lr(self) -> i8 {
        match self {
            SphereSide::Left => 1,
            SphereSide::Right => -1,
            _ => 0,
        }
    }

    pub fn is_pitch(self) -> bool {
        matches!(self, SphereSide::Inner | SphereSide::Outer)
    }

    /// The nonzero flag, `+1` or `-1`.
    pub fn delta(self) -> f64 {
        f64::from(self.delta_io() + self.delta_lr())
    }

    pub fn opposite(self) -> Self {
        match self {
            SphereSide::Inner => SphereSide::Outer,
            SphereSide::Outer => SphereSide::Inner,
            SphereSide::Left => SphereSide::Right,
            SphereSide::Right => SphereSide::Left,
        }
    }

    pub fn radius(self, params: &VehicleParams) -> f64 {
        if self.is_pitch() {
            params.r_pitch
        } else {
            params.r_yaw
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            SphereSide::Inner => "inner",
            SphereSide::Outer => "outer",
            SphereSide::Left => "left",
            SphereSide::Right => "right",
        }
    }

    /// Completes a frame from position-independent surface data.
    ///
    /// `outward` is the unit radial direction of the surface at the vehicle
    /// (pointing away from the sphere or cylinder axis, or the plane normal on
    /// the side of the initial sphere). The surface normal axis is
    /// `-delta * outward`; `U` for pitch surfaces, `Y` for yaw surfaces.
    pub fn frame_from_surface(self, t: &Vec3, outward: &Vec3) -> Mat3 {
        let n = -outward * self.delta();
        if self.is_pitch() {
            let u = n;
            let y = u.cross(t);
            Mat3::from_columns(&[*t, y, u])
        } else {
            let y = n;
            let u = t.cross(&y);
            Mat3::from_columns(&[*t, y, u])
        }
    }
}

/// `r = X + delta_io R_pitch U + delta_lr R_yaw Y`.
pub fn tangent_sphere_center(config: &Configuration, side: SphereSide, params: &VehicleParams) -> Vec3 {
    config.position
        + config.u * (f64::from(side.delta_io()) * params.r_pitch)
        + config.y * (f64::from(side.delta_lr()) * params.r_yaw)
}

/// Closed-form body-frame transform for a constant-curvature segment.
///
/// No bound checks; `arc_length` may be any finite value.
pub fn segment_transform_raw(kappa_g: f64, kappa_n: f64, arc_length: f64) -> HomogeneousTransform {
    let k = kappa_g.hypot(kappa_n);
    if k < STRAIGHT_EPS {
        return HomogeneousTransform::new(Mat3::identity(), Vec3::new(arc_length, 0.0, 0.0));
    }
    let phi = arc_length * k;
    let (s, c) = phi.sin_cos();
    let (g, n) = (kappa_g / k, kappa_n / k);
    let omc = 1.0 - c;
    let rotation = Mat3::new(
        c,
        -g * s,
        -n * s,
        g * s,
        n * n + c * g * g,
        -g * n * omc,
        n * s,
        -g * n * omc,
        g * g + n * n * c,
    );
    let translation = Vec3::new(s / k, g * omc / k, n * omc / k);
    HomogeneousTransform::new(rotation, translation)
}

/// Body-frame transform `H` such that the pose after `arc_length` is
/// `[R X; 0 1] * H`.
pub fn segment_transform(curv: CurvaturePair, arc_length: f64, params: &VehicleParams) -> Result<HomogeneousTransform> {
    if !(arc_length >= 0.0) || !arc_length.is_finite() {
        return Err(Error::invalid(format!("arc length must be finite and non-negative, got {arc_length}")));
    }
    if !curv.within_bounds(params) {
        return Err(Error::invalid(format!(
            "curvatures (kg={}, kn={}) exceed the vehicle bounds",
            curv.kappa_g, curv.kappa_n
        )));
    }
    Ok(segment_transform_raw(curv.kappa_g, curv.kappa_n, arc_length))
}

/// Checks that a saturated segment started at the identity lies on the
/// sphere predicted for it, returning the worst radial deviation over
/// `n_samples` arc angles in `[0, 2pi]`.
///
/// With `|kn| = 1/R_pitch` the sphere has radius `R_pitch` and center
/// `(0, 0, sign(kn) R_pitch)`; otherwise `|kg| = 1/R_yaw` and the sphere has
/// radius `R_yaw` and center `(0, sign(kg) R_yaw, 0)`.
pub fn verify_sphere_membership(curv: CurvaturePair, params: &VehicleParams, n_samples: usize) -> Result<f64> {
    let pitch_saturated = (curv.kappa_n.abs() * params.r_pitch - 1.0).abs() <= 1e-12;
    let yaw_saturated = (curv.kappa_g.abs() * params.r_yaw - 1.0).abs() <= 1e-12;
    let (center, radius) = if pitch_saturated {
        (Vec3::new(0.0, 0.0, curv.kappa_n.signum() * params.r_pitch), params.r_pitch)
    } else if yaw_saturated {
        (Vec3::new(0.0, curv.kappa_g.signum() * params.r_yaw, 0.0), params.r_yaw)
    } else {
        return Err(Error::invalid("neither curvature is saturated"));
    };
    if !curv.within_bounds(params) {
        return Err(Error::invalid("curvatures exceed the vehicle bounds"));
    }
    let k = curv.magnitude();
    let n = n_samples.max(2);
    let worst = (0..n)
        .map(|i| {
            let phi = std::f64::consts::TAU * i as f64 / (n - 1) as f64;
            let h = segment_transform_raw(curv.kappa_g, curv.kappa_n, phi / k);
            ((h.translation - center).norm() - radius).abs()
        })
        .fold(0.0, f64::max);
    Ok(worst)
}

/// Arc lengths `0, step, 2 step, ...` followed by `arc_length` itself.
pub(crate) fn sample_arc_lengths(arc_length: f64, step: f64) -> Vec<f64> {
    let mut out = vec![0.0];
    if arc_length <= 0.0 {
        return out;
    }
    let mut k = 1usize;
    loop {
        let s = k as f64 * step;
        if s >= arc_length - 1e-9 * step {
            break;
        }
        out.push(s);
        k += 1;
    }
    out.push(arc_length);
    out
}

/// Dense samples of a constant-curvature segment starting at `start`.
pub fn sample_segment(
    start: &Configuration,
    curv: CurvaturePair,
    arc_length: f64,
    step: f64,
    params: &VehicleParams,
) -> Result<Trajectory> {
    if !(step > 0.0) {
        return Err(Error::invalid(format!("sampling step must be positive, got {step}")));
    }
    // validates arc length and bounds
    segment_transform(curv, arc_length, params)?;
    let base = start.to_transform();
    let samples = sample_arc_lengths(arc_length, step)
        .into_iter()
        .map(|s| {
            let h = base * segment_transform_raw(curv.kappa_g, curv.kappa_n, s);
            Sample { s, config: Configuration::from_transform(&h), curvature: curv }
        })
        .collect();
    Ok(Trajectory::from_samples(samples))
}
