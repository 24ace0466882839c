//! Elementary 3D geometry: vectors, rotation matrices, homogeneous transforms
//! and ZYX orientation angles.
//!
//! Frames are stored as 3x3 matrices whose columns are the vehicle axes
//! `[T Y U]` (longitudinal, lateral, normal) expressed in the global frame.

use std::f64::consts::{PI, TAU};
use std::ops::Mul;

use nalgebra::{Matrix3, Matrix4, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Vec3 = Vector3<f64>;
pub type Mat3 = Matrix3<f64>;

/// Tolerance for unit norms and orthonormality of frames.
pub const ORTHO_TOL: f64 = 1e-9;

/// `|v . X|` above which the Gram-Schmidt seed switches from the global X
/// axis to the global Y axis.
pub const GRAM_SCHMIDT_SWITCH: f64 = 0.9;

/// ZYX (yaw, pitch, roll) angles in radians.
///
/// Positive pitch is a rotation about the body `-y` axis, so a positive
/// value points the nose up.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EulerZYX {
    pub yaw: f64,
    pub pitch: f64,
    pub roll: f64,
}

impl EulerZYX {
    pub fn new(yaw: f64, pitch: f64, roll: f64) -> Self {
        Self { yaw, pitch, roll }
    }

    pub fn from_degrees(yaw: f64, pitch: f64, roll: f64) -> Self {
        Self::new(yaw.to_radians(), pitch.to_radians(), roll.to_radians())
    }
}

pub fn rot_x(angle: f64) -> Mat3 {
    let (s, c) = angle.sin_cos();
    Mat3::new(1.0, 0.0, 0.0, 0.0, c, -s, 0.0, s, c)
}

pub fn rot_y(angle: f64) -> Mat3 {
    let (s, c) = angle.sin_cos();
    Mat3::new(c, 0.0, s, 0.0, 1.0, 0.0, -s, 0.0, c)
}

pub fn rot_z(angle: f64) -> Mat3 {
    let (s, c) = angle.sin_cos();
    Mat3::new(c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0)
}

/// `Rz(yaw) * Ry(-pitch) * Rx(roll)`; columns are `T`, `Y`, `U`.
pub fn euler_to_frame(angles: EulerZYX) -> Mat3 {
    rot_z(angles.yaw) * rot_y(-angles.pitch) * rot_x(angles.roll)
}

/// Inverse of [`euler_to_frame`], for diagnostics only. The result is
/// unspecified at `|pitch| = pi/2`.
pub fn frame_to_euler(frame: &Mat3) -> EulerZYX {
    // frame = Rz(y) Ry(-p) Rx(r): frame[(2,0)] = sin(p).
    let pitch = frame[(2, 0)].clamp(-1.0, 1.0).asin();
    let yaw = frame[(1, 0)].atan2(frame[(0, 0)]);
    let roll = frame[(2, 1)].atan2(frame[(2, 2)]);
    EulerZYX { yaw, pitch, roll }
}

pub fn skew(v: &Vec3) -> Mat3 {
    Mat3::new(0.0, -v.z, v.y, v.z, 0.0, -v.x, -v.y, v.x, 0.0)
}

/// Rodrigues rotation without checking the axis norm.
#[inline]
pub(crate) fn rodrigues(axis: &Vec3, angle: f64) -> Mat3 {
    let (s, c) = angle.sin_cos();
    let k = skew(axis);
    Mat3::identity() + k * s + k * k * (1.0 - c)
}

/// Rotation by `angle` about the unit `axis`.
pub fn axis_angle_exp(axis: &Vec3, angle: f64) -> Result<Mat3> {
    let n = axis.norm();
    if !n.is_finite() || (n - 1.0).abs() > ORTHO_TOL {
        return Err(Error::invalid(format!("rotation axis must be unit length, got norm {n}")));
    }
    if !angle.is_finite() {
        return Err(Error::invalid("rotation angle must be finite"));
    }
    Ok(rodrigues(axis, angle))
}

/// Rotation vector `w` with `exp([w]x) = r`. Angle is in `[0, pi]`.
pub fn rotation_log(r: &Mat3) -> Vec3 {
    let vee = Vec3::new(r[(2, 1)] - r[(1, 2)], r[(0, 2)] - r[(2, 0)], r[(1, 0)] - r[(0, 1)]);
    let sin_theta = 0.5 * vee.norm();
    let cos_theta = 0.5 * (r.trace() - 1.0);
    let theta = sin_theta.atan2(cos_theta);
    if sin_theta > 1e-6 {
        return vee * (theta / (2.0 * sin_theta));
    }
    if cos_theta > 0.0 {
        // theta ~ 0: theta/sin(theta) = 1 + theta^2/6.
        return vee * (0.5 * (1.0 + theta * theta / 6.0));
    }
    // theta ~ pi: axis from the symmetric part.
    let b = (r + Mat3::identity()) * 0.5;
    let diag = Vec3::new(b[(0, 0)], b[(1, 1)], b[(2, 2)]);
    let i = diag.imax();
    let mut axis = b.column(i).into_owned();
    axis /= axis.norm();
    if axis.dot(&vee) < 0.0 {
        axis = -axis;
    }
    axis * theta
}

/// Unit vector perpendicular to the unit vector `v`, obtained by
/// Gram-Schmidt from the global X axis (or Y when `v` is nearly along X).
pub fn orthonormal_complement(v: &Vec3) -> Vec3 {
    let seed = if v.x.abs() > GRAM_SCHMIDT_SWITCH { Vec3::y() } else { Vec3::x() };
    let w = seed - v * v.dot(&seed);
    w / w.norm()
}

/// Frobenius norm of `R^T R - I`.
pub fn orthonormality_error(r: &Mat3) -> f64 {
    (r.transpose() * r - Mat3::identity()).norm()
}

pub fn is_rotation(r: &Mat3, tol: f64) -> bool {
    orthonormality_error(r) <= tol && (r.determinant() - 1.0).abs() <= tol
}

/// Nearest rotation matrix (polar factor).
pub fn project_to_rotation(r: &Mat3) -> Mat3 {
    let svd = r.svd(true, true);
    let (u, v_t) = (svd.u.unwrap(), svd.v_t.unwrap());
    let mut d = Mat3::identity();
    if (u * v_t).determinant() < 0.0 {
        d[(2, 2)] = -1.0;
    }
    u * d * v_t
}

/// Re-projects `r` onto SO(3) only when it has drifted past [`ORTHO_TOL`].
pub fn reorthonormalize(r: &Mat3) -> Mat3 {
    if orthonormality_error(r) > ORTHO_TOL {
        project_to_rotation(r)
    } else {
        *r
    }
}

/// Normalizes an angle to `(-pi, pi]`.
pub fn wrap_to_pi(angle: f64) -> f64 {
    let mut a = angle.rem_euclid(TAU);
    if a > PI {
        a -= TAU;
    }
    a
}

/// Normalizes an angle to `[0, 2pi)`.
pub fn wrap_to_2pi(angle: f64) -> f64 {
    let a = angle.rem_euclid(TAU);
    if a >= TAU {
        0.0
    } else {
        a
    }
}

/// Rigid transform with bottom row `(0, 0, 0, 1)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HomogeneousTransform {
    pub rotation: Mat3,
    pub translation: Vec3,
}

impl HomogeneousTransform {
    pub fn new(rotation: Mat3, translation: Vec3) -> Self {
        Self { rotation, translation }
    }

    pub fn identity() -> Self {
        Self::new(Mat3::identity(), Vec3::zeros())
    }

    pub fn inverse(&self) -> Self {
        let rt = self.rotation.transpose();
        Self::new(rt, -(rt * self.translation))
    }

    pub fn transform_point(&self, p: &Vec3) -> Vec3 {
        self.rotation * p + self.translation
    }

    pub fn transform_vector(&self, v: &Vec3) -> Vec3 {
        self.rotation * v
    }

    pub fn to_matrix(&self) -> Matrix4<f64> {
        let mut m = Matrix4::identity();
        m.fixed_view_mut::<3, 3>(0, 0).copy_from(&self.rotation);
        m.fixed_view_mut::<3, 1>(0, 3).copy_from(&self.translation);
        m
    }
}

impl Mul for HomogeneousTransform {
    type Output = HomogeneousTransform;

    fn mul(self, rhs: HomogeneousTransform) -> HomogeneousTransform {
        HomogeneousTransform::new(
            self.rotation * rhs.rotation,
            self.rotation * rhs.translation + self.translation,
        )
    }
}
