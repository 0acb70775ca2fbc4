//! Three-lambda collaborative network growth model.
//!
//! A network grows one interaction at a time: a randomly chosen proactive
//! node pulls in Poisson-many of its neighbours, brand-new nodes, and
//! existing strangers, and every participant pair becomes connected.
//! This crate provides the generator, the temporal graph it produces,
//! structural metrics, Louvain communities, publication-stream analysis
//! and the experiment drivers built on top of them.

pub mod community;
pub mod error;
pub mod experiments;
pub mod generator;
pub mod graph;
pub mod ingest;
pub mod metrics;
pub mod rng;
pub mod stats;

pub use community::{louvain, modularity, Partition};
pub use error::{Error, Result};
pub use generator::{edge_bounds, generate, interaction_size, Generated, Generator, GeneratorConfig, RoleDraw};
pub use graph::{EdgeDelta, Interaction, NodeId, TemporalGraph};
pub use metrics::{InteractionStats, MetricsReport, PathMode};
pub use rng::RngState;
