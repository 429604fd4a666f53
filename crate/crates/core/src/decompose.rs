//! Decomposition of a representation into isotypic components.
//!
//! The eigenspaces of a generic commutant sample are irreducible invariant
//! subspaces. A second, independent commutant sample `X'` compressed between
//! two such subspaces, `F = U_i X' U_j†`, is an intertwiner: by Schur's lemma
//! it vanishes exactly when the two pieces are inequivalent, and otherwise is
//! a multiple of a unitary `A` with `σ_i(g) = A σ_j(g) A†`. Rotating every
//! copy by its `A` expresses all copies of an irrep in the same basis, so that
//!
//! ```text
//! U ρ(g) U† = ⊕_i 1_{M_i} ⊗ ρ̂_i(g)       U X U† = ⊕_i Ξ_i ⊗ 1_{D_i}
//! ```
//!
//! for every group element `g` and every invariant matrix `X`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::commutant::{self, CommutantSample, ProjectionConfig};
use crate::error::{Error, Result};
use crate::linalg::{self, Field, Matrix, C64};
use crate::rep::Representation;

/// Samples drawn when estimating the commutant dimension of a real irrep.
const CLASSIFY_SAMPLES: usize = 8;
const CLASSIFY_RANK_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecomposeConfig {
    pub projection: ProjectionConfig,
    /// Eigenvalue gaps larger than `gap_tol` times the spectral range split clusters.
    pub gap_tol: f64,
    /// `‖F‖_F ≤ zero_tol·‖X'‖_F` declares two pieces inequivalent.
    pub zero_tol: f64,
    /// Tolerance on the unitarity and intertwining checks of a nonzero `F`.
    pub equivalence_tol: f64,
    /// Random elements used to validate each intertwiner.
    pub equivalence_trials: usize,
    /// Restarts with fresh samples after a genericity failure.
    pub max_resamples: usize,
}

impl Default for DecomposeConfig {
    fn default() -> Self {
        DecomposeConfig {
            projection: ProjectionConfig::default(),
            gap_tol: 1e-6,
            zero_tol: 1e-6,
            equivalence_tol: 1e-6,
            equivalence_trials: 10,
            max_resamples: 3,
        }
    }
}

/// Orthonormal rows spanning one eigenspace of a commutant sample.
#[derive(Debug, Clone)]
pub struct SubrepBasis {
    pub rows: Matrix,
    pub eigenvalue: f64,
}

impl SubrepBasis {
    pub fn dimension(&self) -> usize {
        self.rows.nrows()
    }

    /// `σ(g) = U ρ(g) U†`.
    pub fn image(&self, rep: &Representation, g: &crate::rep::Element) -> Matrix {
        &self.rows * rep.image(g) * self.rows.adjoint()
    }
}

/// `F = U_i X' U_j†` together with `α = ‖F‖₂`; `F/α` is unitary.
#[derive(Debug, Clone)]
pub struct EquivalenceWitness {
    pub f: Matrix,
    pub alpha: f64,
}

impl EquivalenceWitness {
    pub fn unitary(&self) -> Matrix {
        self.f.unscale(self.alpha)
    }

    /// Witness for the reversed pair.
    pub fn adjoint(&self) -> Self {
        EquivalenceWitness {
            f: self.f.adjoint(),
            alpha: self.alpha,
        }
    }
}

/// Type of a real irreducible representation, from the dimension of its commutant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RealType {
    Real,
    Complex,
    Quaternionic,
    NotApplicable,
}

impl RealType {
    pub fn as_str(self) -> &'static str {
        match self {
            RealType::Real => "real",
            RealType::Complex => "complex",
            RealType::Quaternionic => "quaternionic",
            RealType::NotApplicable => "not_applicable",
        }
    }
}

impl std::str::FromStr for RealType {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "real" => Ok(RealType::Real),
            "complex" => Ok(RealType::Complex),
            "quaternionic" => Ok(RealType::Quaternionic),
            "not_applicable" => Ok(RealType::NotApplicable),
            other => Err(format!("unknown real type `{other}`")),
        }
    }
}

/// `M` copies of one irrep of dimension `D`. The basis has `M·D` rows, laid
/// out as `M` consecutive groups of `D` rows, all carrying the irrep in the
/// same basis.
#[derive(Debug, Clone)]
pub struct IsotypicComponent {
    pub dimension: usize,
    pub multiplicity: usize,
    pub basis: Matrix,
    pub real_type: RealType,
    /// Smallest commutant eigenvalue among the copies; used for ordering.
    pub eigenvalue: f64,
}

impl IsotypicComponent {
    pub fn size(&self) -> usize {
        self.dimension * self.multiplicity
    }

    /// Rows of the `copy`-th irrep block.
    pub fn copy_basis(&self, copy: usize) -> Matrix {
        let d = self.dimension;
        self.basis.rows(copy * d, d).into_owned()
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct Diagnostics {
    pub attempts: usize,
    /// Commutation residuals of the two commutant samples.
    pub sample_residual: f64,
    pub witness_sample_residual: f64,
    /// Worst intertwiner unitarity/equivariance defect over accepted witnesses.
    pub witness_residual: f64,
}

#[derive(Debug, Clone)]
pub struct IrrepDecomposition {
    basis: Matrix,
    components: Vec<IsotypicComponent>,
    field: Field,
    pub diagnostics: Diagnostics,
}

impl IrrepDecomposition {
    /// Assembles a decomposition from stacked component bases (in order).
    pub fn from_components(components: Vec<IsotypicComponent>, field: Field) -> Result<Self> {
        let n: usize = components.iter().map(IsotypicComponent::size).sum();
        let cols = components.first().map_or(0, |c| c.basis.ncols());
        if n != cols {
            return Err(Error::Shape(format!(
                "components cover {n} rows for a space of dimension {cols}"
            )));
        }
        let mut basis = Matrix::zeros(n, n);
        let mut row = 0;
        for c in &components {
            if c.basis.nrows() != c.size() || c.basis.ncols() != n {
                return Err(Error::Shape(format!(
                    "component basis is {}x{}, expected {}x{n}",
                    c.basis.nrows(),
                    c.basis.ncols(),
                    c.size()
                )));
            }
            basis.rows_mut(row, c.size()).copy_from(&c.basis);
            row += c.size();
        }
        Ok(IrrepDecomposition {
            basis,
            components,
            field,
            diagnostics: Diagnostics::default(),
        })
    }

    /// Splits a stacked change of basis according to `(D, M, type)` layout.
    pub fn from_basis(
        basis: Matrix,
        layout: &[(usize, usize, RealType)],
        field: Field,
    ) -> Result<Self> {
        let mut row = 0;
        let mut components = Vec::with_capacity(layout.len());
        for &(dimension, multiplicity, real_type) in layout {
            let size = dimension * multiplicity;
            if size == 0 || row + size > basis.nrows() {
                return Err(Error::Shape("layout does not match basis rows".into()));
            }
            components.push(IsotypicComponent {
                dimension,
                multiplicity,
                basis: basis.rows(row, size).into_owned(),
                real_type,
                eigenvalue: 0.0,
            });
            row += size;
        }
        if row != basis.nrows() || basis.nrows() != basis.ncols() {
            return Err(Error::Shape("layout does not cover the basis".into()));
        }
        Self::from_components(components, field)
    }

    /// The change of basis `U`; rows are basis vectors (conjugated).
    pub fn basis(&self) -> &Matrix {
        &self.basis
    }

    pub fn components(&self) -> &[IsotypicComponent] {
        &self.components
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn dimension(&self) -> usize {
        self.basis.nrows()
    }

    /// `(D, M)` pairs in component order.
    pub fn dims_and_multiplicities(&self) -> Vec<(usize, usize)> {
        self.components
            .iter()
            .map(|c| (c.dimension, c.multiplicity))
            .collect()
    }

    /// Sorted `(D, M)` pairs, for order-independent comparisons.
    pub fn multiset(&self) -> Vec<(usize, usize)> {
        let mut v = self.dims_and_multiplicities();
        v.sort_unstable();
        v
    }

    /// Row offset of each component inside `U`.
    pub fn offsets(&self) -> Vec<usize> {
        let mut offset = 0;
        self.components
            .iter()
            .map(|c| {
                let o = offset;
                offset += c.size();
                o
            })
            .collect()
    }
}

/// Splits the space along the eigenspaces of `xbar`.
///
/// Eigenvalues are sorted ascending and a new cluster starts at every gap
/// larger than `gap_tol` times the spectral range. A cluster whose own spread
/// exceeds `gap_tol/10` of the range means the sample is not generic enough
/// to separate eigenspaces, reported as [`Error::Genericity`].
pub fn eigsplit(xbar: &CommutantSample, gap_tol: f64) -> Result<Vec<SubrepBasis>> {
    let n = xbar.matrix.nrows();
    let (values, vectors) = linalg::hermitian_eigen(&xbar.matrix, xbar.field);
    if n == 0 {
        return Ok(Vec::new());
    }
    let max_abs = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let range = values[n - 1] - values[0];
    let scale = range.max(1e-8 * max_abs).max(f64::MIN_POSITIVE);

    let mut clusters: Vec<(usize, usize)> = Vec::new();
    let mut start = 0;
    for i in 1..=n {
        if i == n || values[i] - values[i - 1] > gap_tol * scale {
            clusters.push((start, i));
            start = i;
        }
    }
    clusters
        .into_iter()
        .map(|(a, b)| {
            let spread = values[b - 1] - values[a];
            if spread > gap_tol / 10.0 * scale {
                return Err(Error::Genericity(format!(
                    "eigenvalue cluster of size {} has spread {spread:.3e}",
                    b - a
                )));
            }
            let mean = values[a..b].iter().sum::<f64>() / (b - a) as f64;
            Ok(SubrepBasis {
                rows: vectors.columns(a, b - a).adjoint(),
                eigenvalue: mean,
            })
        })
        .collect()
}

/// Tests two irreducible pieces for equivalence.
///
/// Returns `None` when they are inequivalent (different dimensions, or a
/// vanishing intertwiner), a validated witness otherwise. An intertwiner that
/// is neither negligible nor a scaled unitary is a genericity failure.
pub fn equivalence_test<R: Rng + ?Sized>(
    rep: &Representation,
    b1: &SubrepBasis,
    b2: &SubrepBasis,
    xprime: &CommutantSample,
    config: &DecomposeConfig,
    rng: &mut R,
) -> Result<Option<EquivalenceWitness>> {
    let k = b1.dimension();
    if k != b2.dimension() {
        return Ok(None);
    }
    let f = &b1.rows * &xprime.matrix * b2.rows.adjoint();
    if linalg::frobenius(&f) <= config.zero_tol * linalg::frobenius(&xprime.matrix) {
        return Ok(None);
    }
    let witness = EquivalenceWitness {
        alpha: linalg::spectral_norm(&f),
        f,
    };
    let defect = witness_defect(rep, b1, b2, &witness, config.equivalence_trials, rng);
    if defect > config.equivalence_tol * k as f64 {
        return Err(Error::Genericity(format!(
            "intertwiner is neither zero nor a scaled unitary (defect {defect:.3e})"
        )));
    }
    Ok(Some(witness))
}

/// Worst of the unitarity residual of `F/α` and the equivariance residual
/// `‖σ_1(g) A − A σ_2(g)‖_F` over random elements.
fn witness_defect<R: Rng + ?Sized>(
    rep: &Representation,
    b1: &SubrepBasis,
    b2: &SubrepBasis,
    witness: &EquivalenceWitness,
    trials: usize,
    rng: &mut R,
) -> f64 {
    let a = witness.unitary();
    let mut worst = linalg::unitarity_residual(&a);
    for _ in 0..trials {
        let g = rep.group().sample(rng);
        let lhs = b1.image(rep, &g) * &a;
        let rhs = &a * b2.image(rep, &g);
        worst = worst.max(linalg::frobenius(&(lhs - rhs)));
    }
    worst
}

/// Rewrites `b2` in the basis of the piece it is equivalent to: `Ũ = A·U`.
pub fn harmonize(b2: &SubrepBasis, witness: &EquivalenceWitness) -> SubrepBasis {
    SubrepBasis {
        rows: witness.unitary() * &b2.rows,
        eigenvalue: b2.eigenvalue,
    }
}

fn find(parent: &mut [usize], i: usize) -> usize {
    let mut root = i;
    while parent[root] != root {
        root = parent[root];
    }
    let mut k = i;
    while parent[k] != root {
        let next = parent[k];
        parent[k] = root;
        k = next;
    }
    root
}

fn union(parent: &mut [usize], a: usize, b: usize) {
    let (ra, rb) = (find(parent, a), find(parent, b));
    if ra != rb {
        // the smaller index stays the representative
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        parent[hi] = lo;
    }
}

/// Computes `U`, the irrep dimensions and multiplicities of `rep`.
///
/// Genericity failures (near-degenerate spectra, inconsistent intertwiners,
/// unclassifiable real types, non-converged compact projections) restart the
/// whole pipeline with fresh samples, up to `config.max_resamples` times.
pub fn decompose<R: Rng + ?Sized>(
    rep: &Representation,
    config: &DecomposeConfig,
    rng: &mut R,
) -> Result<IrrepDecomposition> {
    config.projection.validate()?;
    let mut last = String::new();
    for attempt in 0..=config.max_resamples {
        match decompose_once(rep, config, rng) {
            Ok(mut d) => {
                d.diagnostics.attempts = attempt + 1;
                return Ok(d);
            }
            Err(e) if e.is_resample_signal() => last = e.to_string(),
            Err(e) => return Err(e),
        }
    }
    Err(Error::ResampleBudgetExhausted {
        attempts: config.max_resamples + 1,
        last,
    })
}

fn decompose_once<R: Rng + ?Sized>(
    rep: &Representation,
    config: &DecomposeConfig,
    rng: &mut R,
) -> Result<IrrepDecomposition> {
    let xbar = commutant::sample_commutant(rep, &config.projection, rng)?;
    let pieces = eigsplit(&xbar, config.gap_tol)?;
    let xprime = commutant::sample_commutant(rep, &config.projection, rng)?;

    let count = pieces.len();
    let mut parent: Vec<usize> = (0..count).collect();
    let mut witnesses: Vec<Vec<Option<EquivalenceWitness>>> = vec![vec![None; count]; count];
    let mut witness_residual: f64 = 0.0;
    for i in 0..count {
        for j in 0..i {
            if let Some(w) = equivalence_test(rep, &pieces[i], &pieces[j], &xprime, config, rng)? {
                union(&mut parent, i, j);
                witnesses[i][j] = Some(w);
            }
        }
    }

    let mut classes: Vec<Vec<usize>> = Vec::new();
    let mut class_of_root = vec![usize::MAX; count];
    for i in 0..count {
        let root = find(&mut parent, i);
        if class_of_root[root] == usize::MAX {
            class_of_root[root] = classes.len();
            classes.push(Vec::new());
        }
        classes[class_of_root[root]].push(i);
    }

    let mut components = Vec::with_capacity(classes.len());
    for members in classes {
        let root = members[0];
        let d = pieces[root].dimension();
        let mut basis = Matrix::zeros(d * members.len(), rep.dimension());
        for (copy, &j) in members.iter().enumerate() {
            let rows = if j == root {
                pieces[j].rows.clone()
            } else {
                // the pair was tested as (j, root): σ_j = A σ_root A†
                let w = witnesses[j][root].as_ref().ok_or_else(|| {
                    Error::Genericity("equivalence is not transitive across samples".into())
                })?;
                let to_root = w.adjoint();
                witness_residual = witness_residual.max(linalg::unitarity_residual(&to_root.unitary()));
                harmonize(&pieces[j], &to_root).rows
            };
            basis.rows_mut(copy * d, d).copy_from(&rows);
        }
        components.push(IsotypicComponent {
            dimension: d,
            multiplicity: members.len(),
            basis,
            real_type: RealType::NotApplicable,
            eigenvalue: pieces[root].eigenvalue,
        });
    }

    components.sort_by(|a, b| {
        b.dimension
            .cmp(&a.dimension)
            .then(b.multiplicity.cmp(&a.multiplicity))
            .then(a.eigenvalue.total_cmp(&b.eigenvalue))
    });

    if rep.field() == Field::Real {
        for c in &mut components {
            c.real_type = classify_real_type(rep, c, &config.projection, rng)?;
        }
    }

    let mut decomposition = IrrepDecomposition::from_components(components, rep.field())?;
    decomposition.diagnostics = Diagnostics {
        attempts: 1,
        sample_residual: xbar.residual,
        witness_sample_residual: xprime.residual,
        witness_residual,
    };
    Ok(decomposition)
}

/// Classifies a real irrep by the dimension of its commutant algebra:
/// 1 for real, 2 for complex and 4 for quaternionic type.
///
/// The commutant of the restriction to one copy is sampled by averaging
/// general (non-symmetric) Gaussian matrices, since the symmetric part alone
/// only ever contains the scalars.
pub fn classify_real_type<R: Rng + ?Sized>(
    rep: &Representation,
    component: &IsotypicComponent,
    config: &ProjectionConfig,
    rng: &mut R,
) -> Result<RealType> {
    if rep.field() != Field::Real {
        return Err(Error::UnsupportedField(
            "real type classification needs a real representation".into(),
        ));
    }
    let d = component.dimension;
    let restricted = rep.restricted(component.copy_basis(0))?;
    let samples = (0..CLASSIFY_SAMPLES)
        .map(|_| {
            let x = linalg::gaussian(d, d, Field::Real, rng);
            commutant::project_general(&restricted, &x, config, rng)
        })
        .collect::<Result<Vec<_>>>()?;
    match linalg::span_rank(&samples, CLASSIFY_RANK_TOL) {
        1 => Ok(RealType::Real),
        2 => Ok(RealType::Complex),
        4 => Ok(RealType::Quaternionic),
        rank => Err(Error::Genericity(format!(
            "commutant of a real irrep has dimension {rank}"
        ))),
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VerificationReport {
    pub trials: usize,
    pub tol: f64,
    /// `‖U†U − I‖_F`.
    pub unitarity: f64,
    /// Largest relative norm of `Uρ(g)U†` outside the diagonal component blocks.
    pub off_block: f64,
    /// Largest relative deviation of a component block from `1_M ⊗ ρ̂(g)`.
    pub copy_deviation: f64,
    pub passed: bool,
}

/// Checks the block structure of `U ρ(g) U†` on random group elements.
pub fn verify_decomposition<R: Rng + ?Sized>(
    rep: &Representation,
    decomposition: &IrrepDecomposition,
    trials: usize,
    tol: f64,
    rng: &mut R,
) -> Result<VerificationReport> {
    let u = decomposition.basis();
    if u.nrows() != rep.dimension() || u.ncols() != rep.dimension() {
        return Err(Error::Shape(format!(
            "basis is {}x{}, representation dimension {}",
            u.nrows(),
            u.ncols(),
            rep.dimension()
        )));
    }
    let unitarity = linalg::unitarity_residual(u);
    let offsets = decomposition.offsets();
    let mut off_block: f64 = 0.0;
    let mut copy_deviation: f64 = 0.0;
    for _ in 0..trials {
        let g = rep.group().sample(rng);
        let image = rep.image(&g);
        let norm = linalg::frobenius(&image).max(f64::MIN_POSITIVE);
        let b = u * &image * u.adjoint();
        // Zero out the diagonal blocks and measure what is left, rather than
        // subtracting squared norms, which loses half the digits.
        let mut outside = b.clone();
        for (c, &o) in decomposition.components().iter().zip(&offsets) {
            outside.view_mut((o, o), (c.size(), c.size())).fill(C64::new(0.0, 0.0));
            let block = b.view((o, o), (c.size(), c.size()));
            let d = c.dimension;
            let reference = block.view((0, 0), (d, d)).into_owned();
            let mut deviation = 0.0;
            for p in 0..c.multiplicity {
                for q in 0..c.multiplicity {
                    let sub = block.view((p * d, q * d), (d, d));
                    deviation += if p == q {
                        linalg::frobenius(&(sub - &reference)).powi(2)
                    } else {
                        sub.iter().map(|z| z.norm_sqr()).sum::<f64>()
                    };
                }
            }
            copy_deviation = copy_deviation.max(deviation.sqrt() / norm);
        }
        off_block = off_block.max(linalg::frobenius(&outside) / norm);
    }
    let passed = unitarity <= tol && off_block <= tol && copy_deviation <= tol;
    Ok(VerificationReport {
        trials,
        tol,
        unitarity,
        off_block,
        copy_deviation,
        passed,
    })
}
