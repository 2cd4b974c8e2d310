//! Measuring how much link-based similarity rankings change when the same
//! information is stored under a different graph schema.
//!
//! - [`graph`]: typed, labeled, undirected simple graphs and their TSV form.
//! - [`transforms`]: invertible schema rewrites and meta-path translation.
//! - [`similarity`]: random walk with restart, SimRank and PathSim.
//! - [`metrics`]: Kendall distances between rankings.
//! - [`datagen`]: seeded IMDb- and DBLP-shaped generators.
//! - [`harness`]: the end-to-end experiment and its report.

pub mod datagen;
pub mod fixtures;
pub mod graph;
pub mod harness;
pub mod metrics;
pub mod similarity;
pub mod transforms;

pub use graph::{graph_equal, NodeId, NodeType, TypedGraph};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Graph(#[from] graph::GraphError),
    #[error(transparent)]
    Transform(#[from] transforms::TransformError),
    #[error(transparent)]
    Similarity(#[from] similarity::SimilarityError),
    #[error(transparent)]
    Metric(#[from] metrics::MetricError),
    #[error(transparent)]
    Datagen(#[from] datagen::DatagenError),
    #[error(transparent)]
    Harness(#[from] harness::HarnessError),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
