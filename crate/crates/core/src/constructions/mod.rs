//! Explicit sets and measures built in the proofs, and the word searches.

mod grid;
mod search;
mod sharpness;

pub use grid::{grid_measure, GridCell, GridLevel, GridMeasure, GridOp, GridPoint};
pub use search::{
    audit_cone_search, cone_inclusion_search, separation_word_search, theorem41_exponents, ConeAudit, ConeNets,
    ConeSearchResult, ConeWitness, SeparationResult, Theorem41Exponents, EXPONENT_SLACK,
};
pub use sharpness::{build_sharpness, sharpness_product_bound, RemovedPiece, SharpnessConstruction, SharpnessLevel};
