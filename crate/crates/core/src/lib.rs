//! CosRA vertex similarity and diffusion-based recommendation on user-object
//! bipartite networks, with a seeded k-fold evaluation harness.
//!
//! The pipeline is: [`graph::parse_ratings`] → [`graph::build_graph`] →
//! [`xval::run_experiment`], which builds a [`recommend::RecommendationModel`]
//! per fold and scores it with the functions in [`metrics`].

pub mod error;
pub mod graph;
pub mod metrics;
pub mod recommend;
pub mod similarity;
pub mod xval;

pub use error::{Error, Result};
pub use graph::{build_graph, parse_ratings, parse_ratings_str, BipartiteGraph, FormatSpec, GraphStats, RatingRecord};
pub use metrics::{MetricsRow, TestSet};
pub use recommend::{Algorithm, RecommendationList, RecommendationModel, ScoreVector};
pub use similarity::{GeneralizedParams, SimilarityKind, SimilarityMatrix};
pub use xval::{ExperimentConfig, FoldSplit, Report, SweepReport};
