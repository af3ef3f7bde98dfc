//! Density-restricted agglomerative clustering.
//!
//! Clusters are grown one at a time from the unallocated point with the
//! largest Shapley value (the center). A cluster whose center has Shapley
//! value `l_max` uses the similarity threshold `β = δ·√(l_max / g_max)`, so
//! centers in sparse regions reach further. Growth is breadth-first through
//! an expansion queue: the queue head absorbs every unallocated point at
//! similarity at least `β`, and an absorbed point is itself queued only if
//! its Shapley value is at least `γ·l_max`. A cluster that absorbs nothing is
//! reported as noise.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::clustering::{Clustering, Label};
use crate::dataset::{Dataset, SimilarityMatrix};
use crate::error::{Error, Result};
use crate::game::ClusteringGame;

/// Shapley values within this fraction of `g_max` of the current maximum are
/// treated as tied when choosing a center; the lowest index wins.
pub const SHAPLEY_TIE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DracParams {
    /// Similarity threshold for the densest center.
    pub delta: f64,
    /// Fraction of the center's Shapley value needed to join the queue.
    pub gamma: f64,
}

impl DracParams {
    pub fn new(delta: f64, gamma: f64) -> Result<Self> {
        let p = Self { delta, gamma };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("delta", self.delta), ("gamma", self.gamma)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::InvalidParameter {
                    name,
                    reason: format!("must lie in [0, 1], got {v}"),
                });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DracCluster {
    pub center: usize,
    /// Shapley value of the center.
    pub l_max: f64,
    pub beta: f64,
    pub size: usize,
}

/// Final labeling plus per-cluster thresholds. `clusters[c]` describes
/// `Label::Cluster(c)`; clusters are numbered in creation order, skipping
/// centers that ended up as noise.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusterState {
    pub labels: Vec<Label>,
    pub clusters: Vec<DracCluster>,
    pub shapley: Vec<f64>,
    pub g_max: f64,
}

impl ClusterState {
    pub fn to_clustering(&self) -> Clustering {
        Clustering {
            labels: self.labels.clone(),
            centers: self.clusters.iter().map(|c| c.center).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum TraceEvent {
    CenterSelected { point: usize, l_max: f64 },
    Threshold { beta: f64 },
    Joined { point: usize, head: usize, similarity: f64 },
    Enqueued { point: usize },
    Dequeued { point: usize },
    Noise { point: usize },
}

pub fn drac_cluster(dataset: &Dataset, params: &DracParams) -> Result<ClusterState> {
    run(dataset, params, |_| {})
}

/// Runs the algorithm and records every decision in execution order.
pub fn drac_trace(dataset: &Dataset, params: &DracParams) -> Result<(ClusterState, Vec<TraceEvent>)> {
    let mut events = Vec::new();
    let state = run(dataset, params, |e| events.push(e))?;
    Ok((state, events))
}

/// Rebuilds the labeling of `n` points from a trace.
pub fn replay(n: usize, events: &[TraceEvent]) -> Result<Clustering> {
    let mut labels: Vec<Option<Label>> = vec![None; n];
    let mut centers = Vec::new();
    let mut open: Option<(usize, Vec<usize>)> = None;
    let check = |p: usize| -> Result<()> {
        if p >= n {
            return Err(Error::IndexOutOfRange { index: p, n });
        }
        Ok(())
    };
    let close = |open: Option<(usize, Vec<usize>)>, labels: &mut Vec<Option<Label>>, centers: &mut Vec<usize>| {
        if let Some((center, members)) = open {
            if members.len() > 1 {
                let id = centers.len();
                centers.push(center);
                for m in members {
                    labels[m] = Some(Label::Cluster(id));
                }
            }
        }
    };
    for e in events {
        match *e {
            TraceEvent::CenterSelected { point, .. } => {
                check(point)?;
                close(open.take(), &mut labels, &mut centers);
                open = Some((point, vec![point]));
            }
            TraceEvent::Joined { point, .. } => {
                check(point)?;
                if let Some((_, members)) = open.as_mut() {
                    members.push(point);
                }
            }
            TraceEvent::Noise { point } => {
                check(point)?;
                labels[point] = Some(Label::Noise);
                open = None;
            }
            TraceEvent::Threshold { .. } | TraceEvent::Enqueued { .. } | TraceEvent::Dequeued { .. } => {}
        }
    }
    close(open.take(), &mut labels, &mut centers);
    let labels = labels
        .into_iter()
        .enumerate()
        .map(|(i, l)| l.ok_or(Error::IndexOutOfRange { index: i, n }))
        .collect::<Result<Vec<_>>>()?;
    Ok(Clustering { labels, centers })
}

fn run(dataset: &Dataset, params: &DracParams, mut emit: impl FnMut(TraceEvent)) -> Result<ClusterState> {
    params.validate()?;
    let n = dataset.len();
    if n == 1 {
        emit(TraceEvent::CenterSelected { point: 0, l_max: 0.0 });
        emit(TraceEvent::Noise { point: 0 });
        return Ok(ClusterState {
            labels: vec![Label::Noise],
            clusters: Vec::new(),
            shapley: vec![0.0],
            g_max: 0.0,
        });
    }

    let game = ClusteringGame::from_dataset(dataset)?;
    let shapley = game.shapley();
    let phi = shapley.phi;
    let g_max = shapley.g_max;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| phi[b].total_cmp(&phi[a]).then(a.cmp(&b)));

    let mut labels = vec![Label::Noise; n];
    let mut clusters = Vec::new();

    if g_max <= 0.0 {
        // Zero density everywhere: no threshold is defined, every point is noise.
        for &p in &order {
            emit(TraceEvent::CenterSelected {
                point: p,
                l_max: phi[p],
            });
            emit(TraceEvent::Noise { point: p });
        }
        return Ok(ClusterState {
            labels,
            clusters,
            shapley: phi,
            g_max,
        });
    }

    let sim: &SimilarityMatrix = game.similarity();
    let tie = SHAPLEY_TIE_TOL * g_max;
    let mut allocated = vec![false; n];
    let mut unallocated: Vec<usize> = (0..n).collect();
    let mut cursor = 0usize;
    let mut queue: VecDeque<usize> = VecDeque::new();

    loop {
        while cursor < n && allocated[order[cursor]] {
            cursor += 1;
        }
        if cursor == n {
            break;
        }
        let top = phi[order[cursor]];
        let center = order[cursor..]
            .iter()
            .copied()
            .take_while(|&p| phi[p] >= top - tie)
            .filter(|&p| !allocated[p])
            .min()
            .expect("cursor points at an unallocated point");

        let l_max = phi[center];
        let beta = params.delta * (l_max / g_max).sqrt();
        allocated[center] = true;
        unallocated.retain(|&p| p != center);
        emit(TraceEvent::CenterSelected { point: center, l_max });
        emit(TraceEvent::Threshold { beta });

        let enqueue_floor = params.gamma * l_max;
        let mut members = vec![center];
        queue.push_back(center);
        emit(TraceEvent::Enqueued { point: center });
        while let Some(&head) = queue.front() {
            let row = sim.row(head);
            unallocated.retain(|&q| {
                let s = row[q];
                if s < beta {
                    return true;
                }
                allocated[q] = true;
                members.push(q);
                emit(TraceEvent::Joined {
                    point: q,
                    head,
                    similarity: s,
                });
                if phi[q] >= enqueue_floor {
                    queue.push_back(q);
                    emit(TraceEvent::Enqueued { point: q });
                }
                false
            });
            queue.pop_front();
            emit(TraceEvent::Dequeued { point: head });
        }

        if members.len() == 1 {
            emit(TraceEvent::Noise { point: center });
        } else {
            let id = clusters.len();
            for &m in &members {
                labels[m] = Label::Cluster(id);
            }
            clusters.push(DracCluster {
                center,
                l_max,
                beta,
                size: members.len(),
            });
        }
    }

    Ok(ClusterState {
        labels,
        clusters,
        shapley: phi,
        g_max,
    })
}
