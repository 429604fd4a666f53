//! Sampling generic Hermitian elements of the commutant algebra.
//!
//! A GUE (complex) or GOE (real) matrix is projected onto the commutant by
//! group averaging `X ↦ avg_g ρ(g) X ρ(g)†`. For permutation groups the
//! average over the whole group factorizes through the transversal sets of
//! the stabilizer chain, so it costs `Σ|T_i|` conjugations instead of `|G|`.
//! For compact groups the average is approximated by `ν` rounds of averaging
//! over small sets of Haar samples; the result is checked against fresh
//! samples and extended if needed.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, Field, Matrix};
use crate::rep::{Element, Group, Representation};

pub const DEFAULT_FINITE_TOL: f64 = 1e-10;
pub const DEFAULT_COMPACT_TOL: f64 = 1e-8;
/// Haar samples used to measure the commutation residual of a compact-group projection.
const RESIDUAL_SAMPLES: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProjectionConfig {
    /// Averaging rounds for compact groups.
    pub nu: usize,
    /// Haar samples per round.
    pub set_size: usize,
    /// Relative commutation tolerance; `None` picks 1e-10 for finite and
    /// 1e-8 for compact groups.
    pub commutation_tol: Option<f64>,
    /// Extensions by `ν/10` rounds allowed before giving up.
    pub max_resamples: usize,
}

impl Default for ProjectionConfig {
    fn default() -> Self {
        ProjectionConfig {
            nu: 1000,
            set_size: 3,
            commutation_tol: None,
            max_resamples: 3,
        }
    }
}

impl ProjectionConfig {
    pub fn validate(&self) -> Result<()> {
        if self.nu < 1 || self.set_size < 2 || self.commutation_tol.is_some_and(|t| t.is_nan() || t <= 0.0) {
            return Err(Error::Shape(format!(
                "invalid projection config: nu={} set_size={} commutation_tol={:?}",
                self.nu, self.set_size, self.commutation_tol
            )));
        }
        Ok(())
    }

    pub fn tolerance_for(&self, group: &Group) -> f64 {
        self.commutation_tol.unwrap_or(if group.is_finite() {
            DEFAULT_FINITE_TOL
        } else {
            DEFAULT_COMPACT_TOL
        })
    }
}

/// A Hermitian element of the commutant together with its measured
/// relative commutation residual.
#[derive(Debug, Clone)]
pub struct CommutantSample {
    pub matrix: Matrix,
    pub residual: f64,
    pub field: Field,
}

/// GUE sample `(A + A†)/2` for the complex field, GOE `(A + Aᵀ)/2` for the real one.
pub fn sample_gue<R: Rng + ?Sized>(n: usize, field: Field, rng: &mut R) -> Matrix {
    let a = linalg::gaussian(n, n, field, rng);
    linalg::hermitian_part(&a)
}

/// `Σ_{g∈T} ρ(g) X ρ(g)† / |T|`.
pub fn partial_average(rep: &Representation, set: &[Element], x: &Matrix) -> Result<Matrix> {
    if set.is_empty() {
        return Err(Error::EmptySet);
    }
    check_square(rep, x)?;
    Ok(average_conjugations(rep, set.iter(), x))
}

fn average_conjugations<'a>(
    rep: &Representation,
    set: impl ExactSizeIterator<Item = &'a Element>,
    x: &Matrix,
) -> Matrix {
    let count = set.len() as f64;
    let mut acc = Matrix::zeros(x.nrows(), x.ncols());
    for g in set {
        let r = rep.image(g);
        acc += &r * x * r.adjoint();
    }
    acc.unscale(count)
}

fn check_square(rep: &Representation, x: &Matrix) -> Result<()> {
    let n = rep.dimension();
    if x.nrows() != n || x.ncols() != n {
        return Err(Error::Shape(format!(
            "matrix is {}x{}, representation dimension {n}",
            x.nrows(),
            x.ncols()
        )));
    }
    Ok(())
}

/// `max_g ‖X ρ(g) − ρ(g) X‖_F / ‖X‖_F` over the given elements.
pub fn commutation_residual<'a>(
    rep: &Representation,
    elements: impl IntoIterator<Item = &'a Element>,
    x: &Matrix,
) -> f64 {
    let norm = linalg::frobenius(x);
    if norm == 0.0 {
        return 0.0;
    }
    elements
        .into_iter()
        .map(|g| {
            let r = rep.image(g);
            linalg::frobenius(&(x * &r - &r * x)) / norm
        })
        .fold(0.0, f64::max)
}

/// Exact group average through the chain of transversal sets. `hermitian`
/// re-symmetrizes after every partial average.
fn reynolds_finite(rep: &Representation, x: &Matrix, hermitian: bool) -> Result<Matrix> {
    let group = rep.group().as_finite().ok_or(Error::NotFinite)?;
    let mut current = x.clone();
    for set in group.transversal_sets() {
        let elements: Vec<Element> = set.into_iter().map(Element::Perm).collect();
        current = average_conjugations(rep, elements.iter(), &current);
        if hermitian {
            current = linalg::hermitian_part(&current);
        }
    }
    Ok(current)
}

fn generator_elements(rep: &Representation) -> Vec<Element> {
    match rep.group() {
        Group::Finite(g) => g.generators().iter().cloned().map(Element::Perm).collect(),
        Group::Compact(_) => Vec::new(),
    }
}

/// Exact projection onto the commutant for a permutation group. The residual
/// is measured on the generators, which suffices for membership.
pub fn project_commutant_finite(rep: &Representation, x: &Matrix) -> Result<CommutantSample> {
    project_commutant_finite_with_tol(rep, x, DEFAULT_FINITE_TOL)
}

fn project_commutant_finite_with_tol(
    rep: &Representation,
    x: &Matrix,
    tol: f64,
) -> Result<CommutantSample> {
    check_square(rep, x)?;
    let matrix = reynolds_finite(rep, &linalg::hermitian_part(x), true)?;
    let residual = commutation_residual(rep, &generator_elements(rep), &matrix);
    if residual > tol {
        return Err(Error::ProjectionDidNotConverge {
            residual,
            rounds: 1,
        });
    }
    Ok(CommutantSample {
        matrix,
        residual,
        field: rep.field(),
    })
}

fn iterate_rounds<R: Rng + ?Sized>(
    rep: &Representation,
    mut x: Matrix,
    rounds: usize,
    set_size: usize,
    hermitian: bool,
    rng: &mut R,
) -> Matrix {
    for _ in 0..rounds {
        let set: Vec<Element> = (0..set_size).map(|_| rep.group().sample(rng)).collect();
        x = average_conjugations(rep, set.iter(), &x);
        if hermitian {
            x = linalg::hermitian_part(&x);
        }
    }
    x
}

fn fresh_residual<R: Rng + ?Sized>(rep: &Representation, x: &Matrix, rng: &mut R) -> f64 {
    let probes: Vec<Element> = (0..RESIDUAL_SAMPLES)
        .map(|_| rep.group().sample(rng))
        .collect();
    commutation_residual(rep, &probes, x)
}

/// Iterated randomized averaging for compact groups.
pub fn project_commutant_compact<R: Rng + ?Sized>(
    rep: &Representation,
    x: &Matrix,
    config: &ProjectionConfig,
    rng: &mut R,
) -> Result<CommutantSample> {
    config.validate()?;
    check_square(rep, x)?;
    let tol = config.tolerance_for(rep.group());
    let mut matrix = iterate_rounds(rep, linalg::hermitian_part(x), config.nu, config.set_size, true, rng);
    let mut rounds = config.nu;
    let mut residual = fresh_residual(rep, &matrix, rng);
    let extension = (config.nu / 10).max(1);
    let mut extensions = 0;
    while residual > tol {
        if extensions == config.max_resamples {
            return Err(Error::ProjectionDidNotConverge { residual, rounds });
        }
        matrix = iterate_rounds(rep, matrix, extension, config.set_size, true, rng);
        rounds += extension;
        extensions += 1;
        residual = fresh_residual(rep, &matrix, rng);
    }
    Ok(CommutantSample {
        matrix,
        residual,
        field: rep.field(),
    })
}

/// Projects a Hermitian matrix onto the commutant with the method suited to the group.
pub fn project<R: Rng + ?Sized>(
    rep: &Representation,
    x: &Matrix,
    config: &ProjectionConfig,
    rng: &mut R,
) -> Result<CommutantSample> {
    match rep.group() {
        Group::Finite(_) => project_commutant_finite_with_tol(rep, x, config.tolerance_for(rep.group())),
        Group::Compact(_) => project_commutant_compact(rep, x, config, rng),
    }
}

/// Group average of an arbitrary (not necessarily Hermitian) matrix.
pub(crate) fn project_general<R: Rng + ?Sized>(
    rep: &Representation,
    x: &Matrix,
    config: &ProjectionConfig,
    rng: &mut R,
) -> Result<Matrix> {
    match rep.group() {
        Group::Finite(_) => reynolds_finite(rep, x, false),
        Group::Compact(_) => Ok(iterate_rounds(rep, x.clone(), config.nu, config.set_size, false, rng)),
    }
}

/// A generic Hermitian element of the commutant: a GUE/GOE draw, projected.
pub fn sample_commutant<R: Rng + ?Sized>(
    rep: &Representation,
    config: &ProjectionConfig,
    rng: &mut R,
) -> Result<CommutantSample> {
    let x = sample_gue(rep.dimension(), rep.field(), rng);
    project(rep, &x, config, rng)
}
