//! Numerical decomposition of finite-dimensional unitary representations of
//! compact groups into irreducible subrepresentations.
//!
//! The pipeline only needs two things from the user: a way to sample group
//! elements and the image map `g -> rho(g)`. From these it
//!
//! 1. samples a generic Hermitian element of the commutant algebra by group
//!    averaging a GUE/GOE matrix ([`commutant`]),
//! 2. splits the representation space along the eigenspaces of that sample
//!    ([`decompose::eigsplit`]),
//! 3. groups equivalent irreducible pieces with an intertwiner computed from a
//!    second, independent commutant sample, and rotates them into a common
//!    basis ([`decompose::equivalence_test`], [`decompose::harmonize`]).
//!
//! The resulting change of basis block-diagonalizes every invariant matrix,
//! which [`sdp`] uses to shrink invariant semidefinite programs.

pub mod cli;
pub mod commutant;
pub mod compact;
pub mod decompose;
pub mod error;
pub mod io;
pub mod linalg;
pub mod perm;
pub mod rep;
pub mod sdp;

pub use commutant::{CommutantSample, ProjectionConfig};
pub use compact::{CompactGroup, CompactKind};
pub use decompose::{
    DecomposeConfig, EquivalenceWitness, IrrepDecomposition, IsotypicComponent, RealType,
    SubrepBasis, VerificationReport,
};
pub use error::{Error, Result};
pub use linalg::{Field, Matrix, C64};
pub use perm::{Permutation, PermutationGroup};
pub use rep::{Element, Group, Representation};
pub use sdp::{BlockDiagonalizedSdp, SdpProblem};
