//! Nonlinear spectral gaps between regular graphs at desk scale.
//!
//! Random regular graphs, exact and certified Poincaré constants
//! `γ(G, dist_H^p)`, expansion and embedding property checkers, the dyadic
//! decomposition and random compression of vertex maps, and universal
//! approximator multigraphs.

pub mod approximator;
pub mod cli;
pub mod compression;
pub mod constants;
pub mod cut_embed;
pub mod error;
pub mod experiment;
pub mod graph;
pub mod lp;
pub mod poincare;
pub mod properties;
pub mod rng;
pub mod spectral;

pub use error::{Error, Result};
pub use graph::{Graph, MetricMatrix, Multigraph};
