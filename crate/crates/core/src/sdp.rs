//! Symmetry reduction of invariant semidefinite programs.
//!
//! For an invariant matrix `X`, `U X U† = ⊕_i Ξ_i ⊗ 1_{D_i}`, so the `n×n`
//! constraint `X ⪰ 0` becomes the smaller constraints `Ξ_i ⪰ 0` with
//! `Ξ_i` of size `M_i`, and inner products pick up the weights `D_i`:
//! `⟨A, X⟩ = Σ_i D_i ⟨Ξ_i(A), Ξ_i(X)⟩`.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::commutant::{self, ProjectionConfig};
use crate::decompose::IrrepDecomposition;
use crate::error::{Error, Result};
use crate::linalg::{self, Field, Matrix, C64};
use crate::rep::Representation;

const HERMITIAN_TOL: f64 = 1e-10;

/// `min/max ⟨C, X⟩` subject to `X ⪰ 0` and `⟨A_k, X⟩ = b_k`.
#[derive(Debug, Clone)]
pub struct SdpProblem {
    pub field: Field,
    pub c: Matrix,
    pub a: Vec<Matrix>,
    pub b: Vec<f64>,
}

impl SdpProblem {
    pub fn new(field: Field, c: Matrix, a: Vec<Matrix>, b: Vec<f64>) -> Result<Self> {
        let n = c.nrows();
        if a.len() != b.len() {
            return Err(Error::Shape(format!(
                "{} constraint matrices but {} right-hand sides",
                a.len(),
                b.len()
            )));
        }
        for (k, m) in std::iter::once(&c).chain(&a).enumerate() {
            if m.nrows() != n || m.ncols() != n {
                return Err(Error::Shape(format!("matrix {k} is not {n}x{n}")));
            }
            if linalg::frobenius(&(m - m.adjoint())) > HERMITIAN_TOL * linalg::frobenius(m).max(1.0) {
                return Err(Error::Shape(format!("matrix {k} is not Hermitian")));
            }
            if field == Field::Real && m.iter().any(|z| z.im != 0.0) {
                return Err(Error::UnsupportedField(format!("matrix {k} has complex entries")));
            }
        }
        Ok(SdpProblem { field, c, a, b })
    }

    pub fn n(&self) -> usize {
        self.c.nrows()
    }

    pub fn m(&self) -> usize {
        self.a.len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlockOptions {
    /// Relative invariance tolerance on the entries outside the block pattern.
    pub tol: f64,
    /// Project the data onto the commutant before reducing it.
    pub symmetrize_first: bool,
    pub projection: ProjectionConfig,
}

impl Default for BlockOptions {
    fn default() -> Self {
        BlockOptions {
            tol: 1e-6,
            symmetrize_first: false,
            projection: ProjectionConfig::default(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SdpBlock {
    pub dimension: usize,
    pub multiplicity: usize,
    pub c: Matrix,
    pub a: Vec<Matrix>,
    /// Worst relative leakage in this component's rows over all data matrices.
    pub residual: f64,
}

#[derive(Debug, Clone)]
pub struct BlockDiagonalizedSdp {
    pub field: Field,
    pub blocks: Vec<SdpBlock>,
    pub b: Vec<f64>,
    /// Worst relative leakage outside the block pattern over all data matrices.
    pub residual: f64,
    pub decomposition: IrrepDecomposition,
}

impl BlockDiagonalizedSdp {
    pub fn block_sizes(&self) -> Vec<usize> {
        self.blocks.iter().map(|b| b.multiplicity).collect()
    }
}

/// Reynolds average of `x`: exact for finite groups, iterated for compact ones.
pub fn symmetrize_matrix<R: Rng + ?Sized>(
    rep: &Representation,
    x: &Matrix,
    config: &ProjectionConfig,
    rng: &mut R,
) -> Result<Matrix> {
    Ok(commutant::project(rep, x, config, rng)?.matrix)
}

/// Extracts `Ξ_i` from `U X U†`, averaging the `D_i` diagonal copies.
///
/// Returns the blocks and the relative norm of everything outside the
/// `⊕ Ξ_i ⊗ 1_{D_i}` pattern; fails when that exceeds `tol`.
pub fn block_diagonalize_matrix(
    decomposition: &IrrepDecomposition,
    x: &Matrix,
    tol: f64,
) -> Result<(Vec<Matrix>, f64)> {
    let r = reduce(decomposition, x)?;
    if r.residual > tol {
        return Err(Error::NotInvariant {
            residual: r.residual,
            tol,
        });
    }
    Ok((r.blocks, r.residual))
}

struct Reduced {
    blocks: Vec<Matrix>,
    residual: f64,
    /// Leakage in each component's rows, relative to `‖X‖`.
    component_residuals: Vec<f64>,
}

fn reduce(decomposition: &IrrepDecomposition, x: &Matrix) -> Result<Reduced> {
    let n = decomposition.dimension();
    if x.nrows() != n || x.ncols() != n {
        return Err(Error::Shape(format!(
            "matrix is {}x{}, decomposition dimension {n}",
            x.nrows(),
            x.ncols()
        )));
    }
    let u = decomposition.basis();
    let hat = u * x * u.adjoint();
    let mut blocks = Vec::with_capacity(decomposition.components().len());
    // Whatever remains after removing the block pattern is leakage.
    let mut leak = hat.clone();
    for (c, o) in decomposition.components().iter().zip(decomposition.offsets()) {
        let (d, m) = (c.dimension, c.multiplicity);
        let mut xi = Matrix::from_fn(m, m, |a, b| {
            (0..d).map(|k| hat[(o + a * d + k, o + b * d + k)]).sum::<C64>() / d as f64
        });
        xi = linalg::hermitian_part(&xi);
        if decomposition.field() == Field::Real {
            xi.iter_mut().for_each(|z| z.im = 0.0);
        }
        for a in 0..m {
            for b in 0..m {
                for k in 0..d {
                    leak[(o + a * d + k, o + b * d + k)] -= xi[(a, b)];
                }
            }
        }
        blocks.push(xi);
    }
    let norm = linalg::frobenius(x);
    let relative = |v: f64| if norm > 0.0 { v / norm } else { 0.0 };
    let component_residuals = decomposition
        .components()
        .iter()
        .zip(decomposition.offsets())
        .map(|(c, o)| relative(leak.rows(o, c.size()).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()))
        .collect();
    Ok(Reduced {
        blocks,
        residual: relative(linalg::frobenius(&leak)),
        component_residuals,
    })
}

/// `U† (⊕_i Ξ_i ⊗ 1_{D_i}) U`.
pub fn reconstruct(decomposition: &IrrepDecomposition, blocks: &[Matrix]) -> Result<Matrix> {
    let components = decomposition.components();
    if blocks.len() != components.len() {
        return Err(Error::Shape(format!(
            "{} blocks for {} components",
            blocks.len(),
            components.len()
        )));
    }
    let n = decomposition.dimension();
    let mut hat = Matrix::zeros(n, n);
    for ((c, o), xi) in components.iter().zip(decomposition.offsets()).zip(blocks) {
        if xi.nrows() != c.multiplicity || xi.ncols() != c.multiplicity {
            return Err(Error::Shape(format!(
                "block is {}x{}, expected {m}x{m}",
                xi.nrows(),
                xi.ncols(),
                m = c.multiplicity
            )));
        }
        let expanded = linalg::kron(xi, &linalg::identity(c.dimension));
        hat.view_mut((o, o), (c.size(), c.size())).copy_from(&expanded);
    }
    let u = decomposition.basis();
    Ok(linalg::hermitian_part(&(u.adjoint() * hat * u)))
}

/// `Σ_i D_i ⟨Ξ_i(A), Ξ_i(X)⟩`, equal to `⟨A, X⟩` for invariant `A`, `X`.
pub fn weighted_inner(decomposition: &IrrepDecomposition, a: &[Matrix], x: &[Matrix]) -> f64 {
    decomposition
        .components()
        .iter()
        .zip(a.iter().zip(x))
        .map(|(c, (p, q))| c.dimension as f64 * linalg::inner(p, q).re)
        .sum()
}

/// Block-diagonalizes the objective and constraint matrices of an invariant SDP.
pub fn block_diagonalize_sdp<R: Rng + ?Sized>(
    rep: &Representation,
    decomposition: &IrrepDecomposition,
    problem: &SdpProblem,
    options: &BlockOptions,
    rng: &mut R,
) -> Result<BlockDiagonalizedSdp> {
    if problem.n() != decomposition.dimension() || problem.n() != rep.dimension() {
        return Err(Error::Shape(format!(
            "SDP of size {} for a representation of dimension {}",
            problem.n(),
            rep.dimension()
        )));
    }
    let mut matrices: Vec<Matrix> = std::iter::once(&problem.c)
        .chain(&problem.a)
        .cloned()
        .collect();
    if options.symmetrize_first {
        matrices = matrices
            .iter()
            .map(|m| symmetrize_matrix(rep, m, &options.projection, rng))
            .collect::<Result<_>>()?;
    }
    let reduced: Vec<Reduced> = matrices
        .par_iter()
        .map(|m| reduce(decomposition, m))
        .collect::<Result<_>>()?;
    let residual = reduced.iter().map(|r| r.residual).fold(0.0, f64::max);
    if residual > options.tol {
        return Err(Error::NotInvariant {
            residual,
            tol: options.tol,
        });
    }

    let mut blocks: Vec<SdpBlock> = decomposition
        .components()
        .iter()
        .map(|c| SdpBlock {
            dimension: c.dimension,
            multiplicity: c.multiplicity,
            c: Matrix::zeros(0, 0),
            a: Vec::with_capacity(problem.m()),
            residual: 0.0,
        })
        .collect();
    for (k, r) in reduced.into_iter().enumerate() {
        for ((block, xi), res) in blocks.iter_mut().zip(r.blocks).zip(r.component_residuals) {
            block.residual = block.residual.max(res);
            if k == 0 {
                block.c = xi;
            } else {
                block.a.push(xi);
            }
        }
    }
    Ok(BlockDiagonalizedSdp {
        field: problem.field,
        blocks,
        b: problem.b.clone(),
        residual,
        decomposition: decomposition.clone(),
    })
}
