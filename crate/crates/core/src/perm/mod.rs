//! Finite permutation groups.

mod group;
mod permutation;

pub use group::{PermutationGroup, SlpOp};
pub use permutation::{compose, Permutation};
