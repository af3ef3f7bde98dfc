//! The labels document written by `drac cluster`: a JSON record of the input
//! points with their labels (`-1` for noise) plus run metadata.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::clustering::{Clustering, Label};
use crate::dataset::{Dataset, Point};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterEntry {
    pub id: usize,
    pub center: usize,
    pub size: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub l_max: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabelsDocument {
    pub algorithm: String,
    pub parameters: BTreeMap<String, serde_json::Value>,
    pub source: String,
    pub seed: u64,
    pub n_points: usize,
    pub n_clusters: usize,
    pub n_noise: usize,
    pub clusters: Vec<ClusterEntry>,
    pub points: Vec<[f64; 2]>,
    pub labels: Vec<i64>,
}

impl LabelsDocument {
    pub fn new(
        algorithm: &str,
        parameters: BTreeMap<String, serde_json::Value>,
        source: String,
        seed: u64,
        dataset: &Dataset,
        clustering: &Clustering,
    ) -> Self {
        let sizes = clustering.sizes();
        Self {
            algorithm: algorithm.to_string(),
            parameters,
            source,
            seed,
            n_points: dataset.len(),
            n_clusters: clustering.num_clusters(),
            n_noise: clustering.noise_count(),
            clusters: clustering
                .centers
                .iter()
                .enumerate()
                .map(|(id, &center)| ClusterEntry {
                    id,
                    center,
                    size: sizes[id],
                    l_max: None,
                    beta: None,
                })
                .collect(),
            points: dataset.points().iter().map(|p| [p.x, p.y]).collect(),
            labels: clustering.labels.iter().map(|l| l.as_i64()).collect(),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: Self = serde_json::from_str(text)?;
        if doc.points.len() != doc.labels.len() {
            return Err(Error::DimensionMismatch {
                expected: doc.points.len(),
                found: doc.labels.len(),
            });
        }
        Ok(doc)
    }

    pub fn dataset(&self) -> Result<Dataset> {
        Dataset::new(self.points.iter().map(|&[x, y]| Point::new(x, y)).collect())
    }

    pub fn clustering(&self) -> Result<Clustering> {
        let labels = self
            .labels
            .iter()
            .map(|&v| {
                Label::from_i64(v)
                    .filter(|l| l.cluster().is_none_or(|c| c < self.clusters.len()))
                    .ok_or(Error::InvalidParameter {
                        name: "labels",
                        reason: format!("label {v} does not name a cluster"),
                    })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Clustering {
            labels,
            centers: self.clusters.iter().map(|c| c.center).collect(),
        })
    }
}
