//! Haar sampling for the unitary and orthogonal groups.
//!
//! A compact group enters the decomposition pipeline only through its Haar
//! sampler; the sampled matrices are the group elements themselves.

use nalgebra::DMatrix;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, Field, Matrix, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CompactKind {
    Unitary,
    Orthogonal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CompactGroup {
    kind: CompactKind,
    dimension: usize,
}

impl CompactGroup {
    pub fn new(kind: CompactKind, dimension: usize) -> Result<Self> {
        if dimension == 0 {
            return Err(Error::InvalidDimension(0));
        }
        Ok(CompactGroup { kind, dimension })
    }

    pub fn unitary(dimension: usize) -> Result<Self> {
        Self::new(CompactKind::Unitary, dimension)
    }

    pub fn orthogonal(dimension: usize) -> Result<Self> {
        Self::new(CompactKind::Orthogonal, dimension)
    }

    pub fn kind(&self) -> CompactKind {
        self.kind
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    /// The field of the defining representation.
    pub fn field(&self) -> Field {
        match self.kind {
            CompactKind::Unitary => Field::Complex,
            CompactKind::Orthogonal => Field::Real,
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Matrix {
        match self.kind {
            CompactKind::Unitary => haar_unitary(self.dimension, rng),
            CompactKind::Orthogonal => haar_orthogonal(self.dimension, rng),
        }
        .expect("dimension validated at construction")
    }
}

impl std::fmt::Display for CompactGroup {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self.kind {
            CompactKind::Unitary => "unitary",
            CompactKind::Orthogonal => "orthogonal",
        };
        write!(f, "{name}:{}", self.dimension)
    }
}

/// Haar-distributed unitary: QR of a complex Ginibre matrix, with the columns
/// of Q multiplied by the phases of R's diagonal.
pub fn haar_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Result<Matrix> {
    if d == 0 {
        return Err(Error::InvalidDimension(0));
    }
    let ginibre = linalg::gaussian(d, d, Field::Complex, rng);
    let qr = ginibre.qr();
    let (mut q, r) = qr.unpack();
    for j in 0..d {
        let rjj = r[(j, j)];
        let phase = if rjj.norm() > 0.0 {
            rjj / rjj.norm()
        } else {
            C64::new(1.0, 0.0)
        };
        for i in 0..d {
            q[(i, j)] *= phase;
        }
    }
    Ok(q)
}

/// Haar-distributed orthogonal matrix: QR of a real Ginibre matrix with the
/// signs of R's diagonal folded into Q.
pub fn haar_orthogonal<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Result<Matrix> {
    if d == 0 {
        return Err(Error::InvalidDimension(0));
    }
    let ginibre: DMatrix<f64> = linalg::gaussian(d, d, Field::Real, rng).map(|z| z.re);
    let (mut q, r) = ginibre.qr().unpack();
    for j in 0..d {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    Ok(linalg::from_real(&q))
}
