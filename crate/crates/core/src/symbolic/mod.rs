//! Self-similar systems, symbolic codings and the preset systems.

mod presets;
mod similitude;
mod system;
mod word;

pub use presets::{cantor13, preset, prop43, prop43_exact, unit_interval};
pub use similitude::Similitude;
pub use system::{moran_exponent, ExactData, PointEnclosure, SelfSimilarSystem};
pub use word::{Coding, SymbolWord, Tail, WordsOfLength};
