//! Seeded synthetic point sets.
//!
//! All geometry lives in the unit square and every shape parameter is a
//! documented constant, so `(shape, n, seed)` fully determines the output.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::{Dataset, Point};
use crate::error::{Error, Result};

/// Centers of the three `blobs` components.
pub const BLOBS_CENTERS: [(f64, f64); 3] = [(0.25, 0.3), (0.75, 0.3), (0.5, 0.75)];
/// Standard deviation of each `blobs` component.
pub const BLOBS_SPREAD: f64 = 0.06;

/// Centers of the two dense `bridge` blobs.
pub const BRIDGE_BLOB_CENTERS: [(f64, f64); 2] = [(0.25, 0.3), (0.75, 0.3)];
/// Standard deviation of each `bridge` blob.
pub const BRIDGE_BLOB_SPREAD: f64 = 0.04;
/// Share of points placed on the connecting chain.
pub const BRIDGE_FRACTION: f64 = 0.15;
/// The chain follows the upper half of the circle through both blob centers,
/// centered on their midpoint. It bows away from the bulk of the data.
pub const BRIDGE_ARC_RADIUS: f64 = 0.25;
/// Chord distance from a blob center at which the chain starts.
pub const BRIDGE_START_OFFSET: f64 = 0.08;
/// Radial jitter of chain points around the arc.
pub const BRIDGE_JITTER: f64 = 0.003;

/// Tight component of `mixed_density`.
pub const MIXED_TIGHT_CENTER: (f64, f64) = (0.3, 0.65);
pub const MIXED_TIGHT_SPREAD: f64 = 0.03;
/// Diffuse component of `mixed_density`.
pub const MIXED_DIFFUSE_CENTER: (f64, f64) = (0.65, 0.35);
pub const MIXED_DIFFUSE_SPREAD: f64 = 0.12;
/// Share of uniformly scattered outliers in `mixed_density`.
pub const MIXED_OUTLIER_FRACTION: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Shape {
    Blobs,
    Bridge,
    MixedDensity,
    Uniform,
}

impl Shape {
    pub const ALL: [Shape; 4] = [Shape::Blobs, Shape::Bridge, Shape::MixedDensity, Shape::Uniform];

    pub fn name(self) -> &'static str {
        match self {
            Shape::Blobs => "blobs",
            Shape::Bridge => "bridge",
            Shape::MixedDensity => "mixed_density",
            Shape::Uniform => "uniform",
        }
    }
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Shape {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Shape::ALL
            .into_iter()
            .find(|shape| shape.name() == s)
            .ok_or_else(|| Error::UnknownShape(s.to_string()))
    }
}

/// Ground-truth component each generated point was drawn from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Group {
    Blob(usize),
    Bridge,
    Outlier,
    Background,
}

#[derive(Debug, Clone)]
pub struct Synthetic {
    pub dataset: Dataset,
    pub groups: Vec<Group>,
}

impl Synthetic {
    pub fn indices_of(&self, group: Group) -> Vec<usize> {
        self.groups
            .iter()
            .enumerate()
            .filter(|&(_, g)| *g == group)
            .map(|(i, _)| i)
            .collect()
    }
}

pub fn generate(shape: Shape, n: usize, seed: u64) -> Result<Dataset> {
    generate_labeled(shape, n, seed).map(|s| s.dataset)
}

pub fn generate_labeled(shape: Shape, n: usize, seed: u64) -> Result<Synthetic> {
    if n == 0 {
        return Err(Error::EmptyDataset);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Builder::with_capacity(n);
    match shape {
        Shape::Uniform => {
            for _ in 0..n {
                out.push(uniform_point(&mut rng), Group::Background);
            }
        }
        Shape::Blobs => {
            for i in 0..n {
                let c = i % BLOBS_CENTERS.len();
                out.push(gaussian(&mut rng, BLOBS_CENTERS[c], BLOBS_SPREAD), Group::Blob(c));
            }
        }
        Shape::Bridge => {
            let chain = share(n, BRIDGE_FRACTION);
            let blob_total = n - chain;
            for i in 0..blob_total {
                let c = i % 2;
                out.push(
                    gaussian(&mut rng, BRIDGE_BLOB_CENTERS[c], BRIDGE_BLOB_SPREAD),
                    Group::Blob(c),
                );
            }
            for p in bridge_chain(&mut rng, chain) {
                out.push(p, Group::Bridge);
            }
        }
        Shape::MixedDensity => {
            let outliers = share(n, MIXED_OUTLIER_FRACTION);
            let blob_total = n - outliers;
            let tight = blob_total.div_ceil(2);
            for _ in 0..tight {
                out.push(
                    gaussian(&mut rng, MIXED_TIGHT_CENTER, MIXED_TIGHT_SPREAD),
                    Group::Blob(0),
                );
            }
            for _ in tight..blob_total {
                out.push(
                    gaussian(&mut rng, MIXED_DIFFUSE_CENTER, MIXED_DIFFUSE_SPREAD),
                    Group::Blob(1),
                );
            }
            for _ in 0..outliers {
                out.push(uniform_point(&mut rng), Group::Outlier);
            }
        }
    }
    out.finish()
}

struct Builder {
    points: Vec<Point>,
    groups: Vec<Group>,
}

impl Builder {
    fn with_capacity(n: usize) -> Self {
        Self {
            points: Vec::with_capacity(n),
            groups: Vec::with_capacity(n),
        }
    }

    fn push(&mut self, p: Point, g: Group) {
        self.points.push(p);
        self.groups.push(g);
    }

    fn finish(self) -> Result<Synthetic> {
        Ok(Synthetic {
            dataset: Dataset::new(self.points)?,
            groups: self.groups,
        })
    }
}

/// Number of points given to a minority component; never more than `n - 1`
/// so the main components keep at least one point.
fn share(n: usize, fraction: f64) -> usize {
    ((n as f64 * fraction).round() as usize).min(n.saturating_sub(1))
}

fn uniform_point(rng: &mut ChaCha8Rng) -> Point {
    Point::new(rng.random::<f64>(), rng.random::<f64>())
}

fn gaussian(rng: &mut ChaCha8Rng, center: (f64, f64), spread: f64) -> Point {
    let normal = Normal::new(0.0, spread).expect("spread constants are positive");
    Point::new(center.0 + normal.sample(rng), center.1 + normal.sample(rng))
}

/// Evenly spaced points along the upper arc between the two bridge blobs,
/// starting `BRIDGE_START_OFFSET` away from each blob center.
fn bridge_chain(rng: &mut ChaCha8Rng, count: usize) -> Vec<Point> {
    if count == 0 {
        return Vec::new();
    }
    let (ax, ay) = BRIDGE_BLOB_CENTERS[0];
    let (bx, by) = BRIDGE_BLOB_CENTERS[1];
    let (cx, cy) = ((ax + bx) / 2.0, (ay + by) / 2.0);
    // chord length 2R sin(dθ/2) = offset
    let margin = 2.0 * (BRIDGE_START_OFFSET / (2.0 * BRIDGE_ARC_RADIUS)).asin();
    let (start, end) = (PI - margin, margin);
    let jitter = Normal::new(0.0, BRIDGE_JITTER).expect("jitter constant is positive");
    (0..count)
        .map(|k| {
            let t = if count == 1 { 0.5 } else { k as f64 / (count - 1) as f64 };
            let angle = start + (end - start) * t;
            let r = BRIDGE_ARC_RADIUS + jitter.sample(rng);
            Point::new(cx + r * angle.cos(), cy + r * angle.sin())
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_for_fixed_seed() {
        for shape in Shape::ALL {
            let a = generate(shape, 50, 42).unwrap();
            let b = generate(shape, 50, 42).unwrap();
            assert_eq!(a, b, "{shape}");
            assert_eq!(a.len(), 50);
        }
        assert_ne!(
            generate(Shape::Uniform, 10, 1).unwrap(),
            generate(Shape::Uniform, 10, 2).unwrap()
        );
    }

    #[test]
    fn single_point_for_every_shape() {
        for shape in Shape::ALL {
            assert_eq!(generate(shape, 1, 0).unwrap().len(), 1);
        }
    }

    #[test]
    fn shape_names_round_trip() {
        for shape in Shape::ALL {
            assert_eq!(shape.name().parse::<Shape>().unwrap(), shape);
        }
        assert!(matches!("spiral".parse::<Shape>(), Err(Error::UnknownShape(_))));
    }

    #[test]
    fn bridge_groups_have_expected_sizes() {
        let s = generate_labeled(Shape::Bridge, 300, 7).unwrap();
        assert_eq!(s.indices_of(Group::Bridge).len(), 45);
        assert_eq!(s.indices_of(Group::Blob(0)).len(), 128);
        assert_eq!(s.indices_of(Group::Blob(1)).len(), 127);
    }

    #[test]
    fn mixed_density_has_outliers() {
        let s = generate_labeled(Shape::MixedDensity, 100, 3).unwrap();
        assert_eq!(s.indices_of(Group::Outlier).len(), 10);
        assert_eq!(s.indices_of(Group::Blob(0)).len(), 45);
    }
}
