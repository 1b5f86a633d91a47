//! Train tracks, Whitehead graphs and ideal decompositions for free group
//! automorphisms given as sequences of Nielsen generators on the rose.
//!
//! The numeric parts are generic: transition matrices over any [`Count`]
//! and index lists over any [`IndexScalar`]. The aliases below fix the
//! everyday choices.

pub mod decomposition;
pub mod diagram;
pub mod direction_map;
pub mod error;
pub mod graph;
pub mod ltt;
pub mod map;
pub mod matrix;
pub mod nielsen;
pub mod permutation;
pub mod scalar;
pub mod synthesis;
pub mod whitehead;
pub mod word;

pub use decomposition::Decomposition;
pub use direction_map::DirectionMap;
pub use error::{Error, Result};
pub use graph::{ColoredPairLabeledGraph, EdgeColor, IsoOptions, VertexColor};
pub use ltt::{build_ltt, LttStructure};
pub use map::{GraphMap, NielsenGenerator, RoseMap};
pub use matrix::Matrix;
pub use nielsen::{search_inps, Bounds, PnpCertificate, Verdict};
pub use permutation::PairPermutation;
pub use scalar::{Count, IndexScalar};
pub use word::{Direction, Turn, Word};

/// Transition matrix with machine-word entries.
pub type TransitionMatrix = Matrix<u64>;
/// Transition matrix with exact entries, for high powers.
pub type ExactMatrix = Matrix<num_bigint::BigUint>;
/// Exact index-list entry.
pub type Index = num_rational::Ratio<i64>;
