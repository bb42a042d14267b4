//! Laboratory for grid embeddings in random blow-ups of bounded-degree hosts.
//!
//! The crate builds blow-up graphs, runs a sparse lower-regularity refinement
//! over a host's matching decomposition, embeds square grids row by row into
//! the resulting regular cycle of sets, and cross-checks everything against
//! brute-force oracles at small scale.

pub mod blowup;
pub mod embedder;
pub mod error;
pub mod graph;
pub mod io;
pub mod oracle;
pub mod pipeline;
pub mod rational;
pub mod regularity;
pub mod rng;

pub use error::{Error, Result};
pub use graph::{EdgeColouring, Graph, VertexSet};
