//! Planar Dubins paths with a single minimum turning radius.
//!
//! Degenerate paths (`CS`, `SC`, `C`, `S`) are represented by the six
//! standard words with zero-length segments.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::wrap_to_pi;
use crate::kinematics::sample_arc_lengths;

/// Slack on the `CCC` existence test (`|cos(middle)| <= 1`).
const CCC_SLACK: f64 = 1e-12;

/// Arc angles this close to `2 pi` are snapped to zero.
const FULL_TURN_SNAP: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlanarConfig {
    pub u: f64,
    pub v: f64,
    /// Heading measured from the first in-plane axis.
    pub psi: f64,
}

impl PlanarConfig {
    /// Heading is normalized to `(-pi, pi]`.
    pub fn new(u: f64, v: f64, psi: f64) -> Self {
        Self { u, v, psi: wrap_to_pi(psi) }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PlanarWord {
    LSL,
    LSR,
    RSL,
    RSR,
    LRL,
    RLR,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PlanarSegment {
    Left,
    Straight,
    Right,
}

impl PlanarSegment {
    /// Signed curvature times the radius.
    fn turn(self) -> f64 {
        match self {
            PlanarSegment::Left => 1.0,
            PlanarSegment::Straight => 0.0,
            PlanarSegment::Right => -1.0,
        }
    }
}

impl PlanarWord {
    pub const ALL: [PlanarWord; 6] =
        [PlanarWord::LSL, PlanarWord::LSR, PlanarWord::RSL, PlanarWord::RSR, PlanarWord::LRL, PlanarWord::RLR];

    pub fn segments(self) -> [PlanarSegment; 3] {
        use PlanarSegment::*;
        match self {
            PlanarWord::LSL => [Left, Straight, Left],
            PlanarWord::LSR => [Left, Straight, Right],
            PlanarWord::RSL => [Right, Straight, Left],
            PlanarWord::RSR => [Right, Straight, Right],
            PlanarWord::LRL => [Left, Right, Left],
            PlanarWord::RLR => [Right, Left, Right],
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlanarDubinsPath {
    pub word: PlanarWord,
    /// Lengths in meters (not angles).
    pub segment_lengths: [f64; 3],
    pub radius: f64,
    pub total_length: f64,
}

impl PlanarDubinsPath {
    /// Endpoint reached by driving the path from `start`.
    pub fn endpoint(&self, start: &PlanarConfig) -> PlanarConfig {
        let mut q = *start;
        for (seg, len) in self.word.segments().into_iter().zip(self.segment_lengths) {
            q = advance(&q, seg, len, self.radius);
        }
        PlanarConfig::new(q.u, q.v, q.psi)
    }
}

/// Drives `len` meters along one segment. The heading is not wrapped.
fn advance(q: &PlanarConfig, seg: PlanarSegment, len: f64, radius: f64) -> PlanarConfig {
    let turn = seg.turn();
    if turn == 0.0 {
        let (s, c) = q.psi.sin_cos();
        return PlanarConfig { u: q.u + len * c, v: q.v + len * s, psi: q.psi };
    }
    let psi1 = q.psi + turn * len / radius;
    let r = turn * radius;
    PlanarConfig {
        u: q.u + r * (psi1.sin() - q.psi.sin()),
        v: q.v - r * (psi1.cos() - q.psi.cos()),
        psi: psi1,
    }
}

fn mod2pi(a: f64) -> f64 {
    let m = a.rem_euclid(TAU);
    if m > TAU - FULL_TURN_SNAP {
        0.0
    } else {
        m
    }
}

/// Normalized `(t, p, q)` candidates for one word (angles for arcs, length
/// over radius for the straight part).
fn word_candidates(word: PlanarWord, d: f64, alpha: f64, beta: f64) -> Vec<[f64; 3]> {
    let (sa, ca) = alpha.sin_cos();
    let (sb, cb) = beta.sin_cos();
    let cab = (alpha - beta).cos();
    let mut out = Vec::with_capacity(2);
    match word {
        PlanarWord::LSL => {
            let p2 = 2.0 + d * d - 2.0 * cab + 2.0 * d * (sa - sb);
            if p2 >= 0.0 {
                let tmp = (cb - ca).atan2(d + sa - sb);
                out.push([mod2pi(tmp - alpha), p2.sqrt(), mod2pi(beta - tmp)]);
            }
        }
        PlanarWord::RSR => {
            let p2 = 2.0 + d * d - 2.0 * cab + 2.0 * d * (sb - sa);
            if p2 >= 0.0 {
                let tmp = (ca - cb).atan2(d - sa + sb);
                out.push([mod2pi(alpha - tmp), p2.sqrt(), mod2pi(tmp - beta)]);
            }
        }
        PlanarWord::LSR => {
            let p2 = -2.0 + d * d + 2.0 * cab + 2.0 * d * (sa + sb);
            if p2 >= 0.0 {
                let p = p2.sqrt();
                let tmp = (-ca - cb).atan2(d + sa + sb) - (-2.0f64).atan2(p);
                out.push([mod2pi(tmp - alpha), p, mod2pi(tmp - beta)]);
            }
        }
        PlanarWord::RSL => {
            let p2 = -2.0 + d * d + 2.0 * cab - 2.0 * d * (sa + sb);
            if p2 >= 0.0 {
                let p = p2.sqrt();
                let tmp = (ca + cb).atan2(d - sa - sb) - 2.0f64.atan2(p);
                out.push([mod2pi(alpha - tmp), p, mod2pi(beta - tmp)]);
            }
        }
        PlanarWord::RLR => {
            let c = (6.0 - d * d + 2.0 * cab + 2.0 * d * (sa - sb)) / 8.0;
            if c.abs() <= 1.0 + CCC_SLACK {
                let base = (ca - cb).atan2(d - sa + sb);
                let acos = c.clamp(-1.0, 1.0).acos();
                for p in [mod2pi(TAU - acos), acos] {
                    let t = mod2pi(alpha - base + p / 2.0);
                    out.push([t, p, mod2pi(alpha - beta - t + p)]);
                }
            }
        }
        PlanarWord::LRL => {
            let c = (6.0 - d * d + 2.0 * cab + 2.0 * d * (sb - sa)) / 8.0;
            if c.abs() <= 1.0 + CCC_SLACK {
                let base = (ca - cb).atan2(d + sa - sb);
                let acos = c.clamp(-1.0, 1.0).acos();
                for p in [mod2pi(TAU - acos), acos] {
                    let t = mod2pi(-alpha - base + p / 2.0);
                    out.push([t, p, mod2pi(beta - alpha - t + p)]);
                }
            }
        }
    }
    out
}

/// Shortest planar Dubins path between two configurations.
///
/// Ties are broken by word order `LSL < LSR < RSL < RSR < LRL < RLR`.
pub fn solve_planar_dubins(start: &PlanarConfig, goal: &PlanarConfig, radius: f64) -> Result<PlanarDubinsPath> {
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::invalid(format!("turning radius must be positive, got {radius}")));
    }
    let (dx, dy) = (goal.u - start.u, goal.v - start.v);
    let d = dx.hypot(dy) / radius;
    let theta = if d > 0.0 { dy.atan2(dx) } else { 0.0 };
    let alpha = (start.psi - theta).rem_euclid(TAU);
    let beta = (goal.psi - theta).rem_euclid(TAU);
    let tol = 1e-9 * radius.max(dx.hypot(dy)).max(1.0);

    let mut best: Option<PlanarDubinsPath> = None;
    for word in PlanarWord::ALL {
        for tpq in word_candidates(word, d, alpha, beta) {
            let lengths = tpq.map(|x| x * radius);
            let total = lengths.iter().sum::<f64>();
            if best.as_ref().is_some_and(|b| total >= b.total_length) {
                continue;
            }
            let path = PlanarDubinsPath { word, segment_lengths: lengths, radius, total_length: total };
            let end = path.endpoint(start);
            let heading_err = wrap_to_pi(end.psi - goal.psi).abs();
            if (end.u - goal.u).hypot(end.v - goal.v) <= tol && heading_err <= 1e-9 {
                best = Some(path);
            }
        }
    }
    // Some word always lands; reaching here means the input was not finite.
    best.ok_or_else(|| Error::invalid("planar Dubins inputs must be finite"))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PlanarSample {
    pub s: f64,
    /// Heading is continuous along the path (not wrapped).
    pub config: PlanarConfig,
    /// Signed curvature: `+1/r` left, `-1/r` right, `0` straight.
    pub curvature: f64,
}

/// Samples a path at spacing `step` within each segment; segment
/// junctions and both endpoints are always included.
pub fn sample_planar_path(path: &PlanarDubinsPath, start: &PlanarConfig, step: f64) -> Result<Vec<PlanarSample>> {
    if !(step > 0.0) {
        return Err(Error::invalid(format!("sampling step must be positive, got {step}")));
    }
    let mut out = vec![PlanarSample { s: 0.0, config: *start, curvature: 0.0 }];
    let mut q = *start;
    let mut s0 = 0.0;
    for (seg, len) in path.word.segments().into_iter().zip(path.segment_lengths) {
        if len <= 0.0 {
            continue;
        }
        let kappa = seg.turn() / path.radius;
        // the first sample of a segment carries that segment's curvature
        if let Some(last) = out.last_mut() {
            last.curvature = kappa;
        }
        for ds in sample_arc_lengths(len, step).into_iter().skip(1) {
            out.push(PlanarSample { s: s0 + ds, config: advance(&q, seg, ds, path.radius), curvature: kappa });
        }
        q = advance(&q, seg, len, path.radius);
        s0 += len;
    }
    Ok(out)
}
