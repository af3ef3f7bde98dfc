//! Baseline clusterers for comparison runs.

use std::collections::VecDeque;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::clustering::{Clustering, Label};
use crate::dataset::{Dataset, Point};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KMeansParams {
    pub k: usize,
    pub max_iters: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AgglomerativeParams {
    /// Clusters merge while their closest pair is at most this far apart.
    pub threshold: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DbscanParams {
    pub eps: f64,
    /// Neighborhood size, the point itself included, that makes a core point.
    pub min_pts: usize,
}

/// Lloyd iterations from `k` distinct seed points chosen with `seed`.
/// Clusters left empty are dropped and the rest renumbered in order.
pub fn kmeans(dataset: &Dataset, params: &KMeansParams) -> Result<Clustering> {
    let n = dataset.len();
    if params.k == 0 || params.k > n {
        return Err(Error::InvalidParameter {
            name: "k",
            reason: format!("must satisfy 1 <= k <= n = {n}, got {}", params.k),
        });
    }
    let pts = dataset.points();
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut seeds = rand::seq::index::sample(&mut rng, n, params.k).into_vec();
    seeds.sort_unstable();
    let mut centroids: Vec<Point> = seeds.iter().map(|&i| pts[i]).collect();

    let mut assign = vec![usize::MAX; n];
    for _ in 0..params.max_iters.max(1) {
        let mut changed = false;
        for (i, p) in pts.iter().enumerate() {
            let best = nearest(p, &centroids);
            if assign[i] != best {
                assign[i] = best;
                changed = true;
            }
        }
        if !changed {
            break;
        }
        let mut sums = vec![(0.0, 0.0, 0usize); params.k];
        for (p, &c) in pts.iter().zip(&assign) {
            sums[c].0 += p.x;
            sums[c].1 += p.y;
            sums[c].2 += 1;
        }
        for (c, (sx, sy, count)) in sums.into_iter().enumerate() {
            if count > 0 {
                centroids[c] = Point::new(sx / count as f64, sy / count as f64);
            }
        }
    }

    // compact ids, representative = point nearest its centroid
    let mut remap = vec![None; params.k];
    let mut centers = Vec::new();
    for c in 0..params.k {
        let members = (0..n).filter(|&i| assign[i] == c);
        let rep = members.min_by(|&a, &b| {
            pts[a]
                .distance(&centroids[c])
                .total_cmp(&pts[b].distance(&centroids[c]))
                .then(a.cmp(&b))
        });
        if let Some(rep) = rep {
            remap[c] = Some(centers.len());
            centers.push(rep);
        }
    }
    let labels = assign
        .iter()
        .map(|&c| Label::Cluster(remap[c].expect("assigned clusters are non-empty")))
        .collect();
    Ok(Clustering { labels, centers })
}

fn nearest(p: &Point, centroids: &[Point]) -> usize {
    let mut best = 0;
    let mut best_d = f64::INFINITY;
    for (c, q) in centroids.iter().enumerate() {
        let d = p.distance(q);
        if d < best_d {
            best_d = d;
            best = c;
        }
    }
    best
}

/// Single-linkage clustering cut at `threshold`: two points share a cluster
/// iff a chain of points with consecutive gaps `<= threshold` joins them.
/// Clusters are numbered by their lowest member, which is also the center.
pub fn agglomerative(dataset: &Dataset, params: &AgglomerativeParams) -> Result<Clustering> {
    if params.threshold.is_nan() || params.threshold <= 0.0 {
        return Err(Error::InvalidParameter {
            name: "threshold",
            reason: format!("must be positive, got {}", params.threshold),
        });
    }
    let n = dataset.len();
    let pts = dataset.points();
    let mut uf = UnionFind::new(n);
    for i in 0..n {
        for j in (i + 1)..n {
            if pts[i].distance(&pts[j]) <= params.threshold {
                uf.union(i, j);
            }
        }
    }
    let mut ids = vec![None; n];
    let mut labels = Vec::with_capacity(n);
    let mut centers = Vec::new();
    for i in 0..n {
        let root = uf.find(i);
        let id = *ids[root].get_or_insert_with(|| {
            centers.push(i);
            centers.len() - 1
        });
        labels.push(Label::Cluster(id));
    }
    Ok(Clustering { labels, centers })
}

/// Edge lengths of a Euclidean minimum spanning tree, ascending. These are
/// exactly the thresholds at which the single-linkage partition changes.
pub fn single_linkage_heights(dataset: &Dataset) -> Vec<f64> {
    let n = dataset.len();
    let pts = dataset.points();
    let mut in_tree = vec![false; n];
    let mut best = vec![f64::INFINITY; n];
    let mut heights = Vec::with_capacity(n.saturating_sub(1));
    best[0] = 0.0;
    for step in 0..n {
        let u = (0..n)
            .filter(|&v| !in_tree[v])
            .min_by(|&a, &b| best[a].total_cmp(&best[b]))
            .expect("vertices remain");
        in_tree[u] = true;
        if step > 0 {
            heights.push(best[u]);
        }
        for v in 0..n {
            if !in_tree[v] {
                best[v] = best[v].min(pts[u].distance(&pts[v]));
            }
        }
    }
    heights.sort_by(f64::total_cmp);
    heights
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            // keep the lower index as root
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo;
        }
    }
}

/// DBSCAN in index order. Border points go to the first cluster that
/// reaches them; points reachable from no core point are noise. A cluster's
/// center is the core point that started it.
pub fn dbscan(dataset: &Dataset, params: &DbscanParams) -> Result<Clustering> {
    if params.eps.is_nan() || params.eps <= 0.0 {
        return Err(Error::InvalidParameter {
            name: "eps",
            reason: format!("must be positive, got {}", params.eps),
        });
    }
    if params.min_pts == 0 {
        return Err(Error::InvalidParameter {
            name: "min_pts",
            reason: "must be at least 1".into(),
        });
    }
    let n = dataset.len();
    let pts = dataset.points();
    let neighbors: Vec<Vec<usize>> = (0..n)
        .map(|i| (0..n).filter(|&j| pts[i].distance(&pts[j]) <= params.eps).collect())
        .collect();
    let core: Vec<bool> = neighbors.iter().map(|nb| nb.len() >= params.min_pts).collect();

    let mut labels: Vec<Option<usize>> = vec![None; n];
    let mut centers = Vec::new();
    for start in 0..n {
        if labels[start].is_some() || !core[start] {
            continue;
        }
        let id = centers.len();
        centers.push(start);
        labels[start] = Some(id);
        let mut frontier = VecDeque::from([start]);
        while let Some(p) = frontier.pop_front() {
            for &q in &neighbors[p] {
                if labels[q].is_none() {
                    labels[q] = Some(id);
                    if core[q] {
                        frontier.push_back(q);
                    }
                }
            }
        }
    }
    Ok(Clustering {
        labels: labels
            .into_iter()
            .map(|l| l.map_or(Label::Noise, Label::Cluster))
            .collect(),
        centers,
    })
}
