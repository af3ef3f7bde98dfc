//! Clustering with cooperative game theory.
//!
//! Points of a planar dataset are players of a transferable-utility game whose
//! coalition worth is the total pairwise similarity inside the coalition. The
//! Shapley value of this game acts as a density score and drives
//! density-restricted agglomerative clustering ([`drac`]). The
//! [`solution`] module computes other classical solution concepts from first
//! principles, and [`verify`] checks that they coincide with the Shapley value.

pub mod baselines;
pub mod bench;
pub mod cli;
pub mod clustering;
pub mod dataset;
pub mod drac;
pub mod error;
pub mod game;
pub mod labels;
pub mod solution;
pub mod svg;
pub mod verify;

pub use clustering::{Clustering, Label};
pub use dataset::{Dataset, DistanceSummary, Point, Shape, SimilarityMatrix};
pub use drac::{drac_cluster, drac_trace, ClusterState, DracParams, TraceEvent};
pub use error::{Error, Result};
pub use game::{ClusteringGame, Coalition, ShapleyVector};
pub use solution::Imputation;
