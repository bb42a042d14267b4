//! Row-by-row grid embedding into a cycle of regular sets.

mod engine;
mod verify;

use serde::{Deserialize, Serialize};

pub use engine::{
    backward_filter, embed_grid, embed_in_sets, embed_row, filter_well_connected, seed_first_row, EmbedContext,
    EmbedFailure, EmbedLog, EmbedOutcome, EmbedParams, EmbedStage, RowState,
};
pub use verify::{verify_grid_embedding, Cell, GridCheck, Violation};

/// Injective map from grid cells to vertices, stored row-major.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridEmbedding {
    pub rows: usize,
    pub cols: usize,
    pub colour: u8,
    pub image: Vec<usize>,
}

impl GridEmbedding {
    pub fn image(&self, i: usize, j: usize) -> usize {
        self.image[i * self.cols + j]
    }
}
