//! Dense complex matrix helpers shared by the rest of the crate.
//!
//! Every matrix is stored as a `DMatrix<C64>`; representations over the real
//! field simply keep all imaginary parts at zero. Routines that must stay real
//! (eigenvectors, Gaussian draws) dispatch on [`Field`].

use nalgebra::{DMatrix, SymmetricEigen};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

pub use num_complex::Complex64 as C64;

pub type Matrix = DMatrix<C64>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Field {
    Real,
    Complex,
}

impl Field {
    pub fn as_str(self) -> &'static str {
        match self {
            Field::Real => "real",
            Field::Complex => "complex",
        }
    }
}

impl std::fmt::Display for Field {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Field {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "real" => Ok(Field::Real),
            "complex" => Ok(Field::Complex),
            other => Err(format!("unknown field `{other}` (expected `real` or `complex`)")),
        }
    }
}

pub fn identity(n: usize) -> Matrix {
    Matrix::identity(n, n)
}

pub fn frobenius(a: &Matrix) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Largest singular value.
pub fn spectral_norm(a: &Matrix) -> f64 {
    if a.is_empty() {
        return 0.0;
    }
    a.clone()
        .singular_values()
        .iter()
        .cloned()
        .fold(0.0, f64::max)
}

/// `‖A†A − I‖_F`.
pub fn unitarity_residual(a: &Matrix) -> f64 {
    let n = a.ncols();
    frobenius(&(a.adjoint() * a - identity(n)))
}

/// `‖A·A† − I‖_F`, for matrices with orthonormal rows.
pub fn row_orthonormality_residual(a: &Matrix) -> f64 {
    let k = a.nrows();
    frobenius(&(a * a.adjoint() - identity(k)))
}

pub fn hermitian_part(a: &Matrix) -> Matrix {
    (a + a.adjoint()).scale(0.5)
}

/// Kronecker product, row-major blocks: entry `((i1,i2),(j1,j2))` is `a[i1,j1]·b[i2,j2]`
/// with composite index `i1·rows(b) + i2`.
pub fn kron(a: &Matrix, b: &Matrix) -> Matrix {
    a.kronecker(b)
}

pub fn direct_sum(a: &Matrix, b: &Matrix) -> Matrix {
    let (ra, ca) = a.shape();
    let (rb, cb) = b.shape();
    let mut out = Matrix::zeros(ra + rb, ca + cb);
    out.view_mut((0, 0), (ra, ca)).copy_from(a);
    out.view_mut((ra, ca), (rb, cb)).copy_from(b);
    out
}

pub fn from_real(a: &DMatrix<f64>) -> Matrix {
    a.map(|x| C64::new(x, 0.0))
}

/// Frobenius inner product `tr(A† B)`.
pub fn inner(a: &Matrix, b: &Matrix) -> C64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

/// Eigendecomposition of a Hermitian matrix: eigenvalues ascending and the
/// matching orthonormal eigenvectors as columns. Over the real field the
/// eigenvectors are real.
pub fn hermitian_eigen(x: &Matrix, field: Field) -> (Vec<f64>, Matrix) {
    let n = x.nrows();
    let (values, vectors): (Vec<f64>, Matrix) = match field {
        Field::Real => {
            let re = x.map(|z| z.re);
            let sym = (&re + re.transpose()) * 0.5;
            let eig = SymmetricEigen::new(sym);
            (eig.eigenvalues.iter().cloned().collect(), from_real(&eig.eigenvectors))
        }
        Field::Complex => {
            let eig = SymmetricEigen::new(hermitian_part(x));
            (eig.eigenvalues.iter().cloned().collect(), eig.eigenvectors)
        }
    };
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let sorted_values = order.iter().map(|&i| values[i]).collect();
    let sorted_vectors = Matrix::from_fn(n, n, |r, c| vectors[(r, order[c])]);
    (sorted_values, sorted_vectors)
}

/// Minimum eigenvalue of a Hermitian matrix.
pub fn min_eigenvalue(x: &Matrix) -> f64 {
    if x.is_empty() {
        return f64::INFINITY;
    }
    SymmetricEigen::new(hermitian_part(x))
        .eigenvalues
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min)
}

/// Matrix of iid standard Gaussians. Complex entries have `E|z|² = 1`.
pub fn gaussian<R: Rng + ?Sized>(rows: usize, cols: usize, field: Field, rng: &mut R) -> Matrix {
    match field {
        Field::Real => Matrix::from_fn(rows, cols, |_, _| {
            C64::new(rng.sample::<f64, _>(StandardNormal), 0.0)
        }),
        Field::Complex => {
            let s = std::f64::consts::FRAC_1_SQRT_2;
            Matrix::from_fn(rows, cols, |_, _| {
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                C64::new(s * re, s * im)
            })
        }
    }
}

/// Rank of a set of matrices seen as vectors, counting singular values above
/// `rel_tol` times the largest one.
pub fn span_rank(mats: &[Matrix], rel_tol: f64) -> usize {
    if mats.is_empty() {
        return 0;
    }
    let len = mats[0].len();
    let stacked = Matrix::from_fn(len, mats.len(), |r, c| mats[c][r]);
    let sv = stacked.singular_values();
    let max = sv.iter().cloned().fold(0.0, f64::max);
    if max == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > rel_tol * max).count()
}
