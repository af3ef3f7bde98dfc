#![allow(dead_code)]

use std::collections::BTreeMap;

use drac::dataset::{Dataset, Point};
use drac::Label;

pub const BRIDGE_N: usize = 300;
pub const BRIDGE_SEED: u64 = 7;
pub const DELTA_GRID: [f64; 5] = [0.80, 0.85, 0.90, 0.95, 0.98];
pub const GAMMA_GRID: [f64; 5] = [0.5, 0.6, 0.7, 0.8, 0.9];
/// The documented setting for the bridge dataset.
pub const BRIDGE_DELTA: f64 = 0.85;
pub const BRIDGE_GAMMA: f64 = 0.9;

pub fn d3() -> Dataset {
    Dataset::from_xy(&[(0.0, 0.0), (1.0, 0.0), (2.0, 0.0)]).unwrap()
}

pub fn far_pairs() -> Dataset {
    Dataset::from_xy(&[(0.0, 0.0), (0.1, 0.0), (5.0, 0.0), (5.1, 0.0)]).unwrap()
}

/// Most frequent non-noise label among `members` (lowest id on ties) and the
/// fraction of `members` that carry it.
pub fn purity(labels: &[Label], members: &[usize]) -> (Option<usize>, f64) {
    let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
    for &i in members {
        if let Label::Cluster(c) = labels[i] {
            *counts.entry(c).or_default() += 1;
        }
    }
    let best = counts
        .iter()
        .fold(None, |acc: Option<(usize, usize)>, (&c, &k)| match acc {
            Some((_, bk)) if bk >= k => acc,
            _ => Some((c, k)),
        });
    match best {
        Some((c, k)) => (Some(c), k as f64 / members.len() as f64),
        None => (None, 0.0),
    }
}

/// Both groups reach the purity floor under different labels.
pub fn separates(labels: &[Label], a: &[usize], b: &[usize], floor: f64) -> bool {
    let (la, pa) = purity(labels, a);
    let (lb, pb) = purity(labels, b);
    la.is_some() && lb.is_some() && la != lb && pa >= floor && pb >= floor
}

pub fn nearest_point(dataset: &Dataset, target: (f64, f64)) -> usize {
    let t = Point::new(target.0, target.1);
    (0..dataset.len())
        .min_by(|&i, &j| dataset.point(i).distance(&t).total_cmp(&dataset.point(j).distance(&t)))
        .unwrap()
}

/// Thresholds strictly between consecutive distinct merge heights, plus one
/// below the first and one above the last.
pub fn threshold_grid(heights: &[f64]) -> Vec<f64> {
    let mut h = heights.to_vec();
    h.sort_by(f64::total_cmp);
    h.dedup();
    let mut out = vec![h[0] / 2.0];
    out.extend(h.windows(2).map(|w| (w[0] + w[1]) / 2.0));
    out.push(h[h.len() - 1] * 1.5);
    out
}
