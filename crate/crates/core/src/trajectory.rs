//! Arc-length ordered samples of a path.

use crate::kinematics::{Configuration, CurvaturePair};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Sample {
    pub s: f64,
    pub config: Configuration,
    pub curvature: CurvaturePair,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Trajectory {
    pub samples: Vec<Sample>,
}

impl Trajectory {
    pub fn from_samples(samples: Vec<Sample>) -> Self {
        Self { samples }
    }

    pub fn single(config: Configuration) -> Self {
        Self::from_samples(vec![Sample { s: 0.0, config, curvature: CurvaturePair::STRAIGHT }])
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn first(&self) -> Option<&Sample> {
        self.samples.first()
    }

    pub fn last(&self) -> Option<&Sample> {
        self.samples.last()
    }

    /// Arc-length span covered by the samples.
    pub fn arc_length(&self) -> f64 {
        match (self.samples.first(), self.samples.last()) {
            (Some(a), Some(b)) => b.s - a.s,
            _ => 0.0,
        }
    }

    /// Sum of straight-line distances between consecutive samples.
    pub fn chord_length(&self) -> f64 {
        self.samples
            .windows(2)
            .map(|w| (w[1].config.position - w[0].config.position).norm())
            .sum()
    }

    /// Appends `other`, shifting its arc lengths so it starts where `self`
    /// ends. The first sample of `other` is dropped when `self` is non-empty
    /// since it duplicates the junction.
    pub fn append(&mut self, other: Trajectory) {
        let Some(first_other) = other.samples.first().map(|s| s.s) else {
            return;
        };
        match self.samples.last().map(|s| s.s) {
            None => self.samples.extend(other.samples.into_iter().map(|mut s| {
                s.s -= first_other;
                s
            })),
            Some(end) => self.samples.extend(other.samples.into_iter().skip(1).map(|mut s| {
                s.s = s.s - first_other + end;
                s
            })),
        }
    }
}
