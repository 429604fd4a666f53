//! Representations as image oracles `g ↦ ρ(g)`.
//!
//! A [`Representation`] is a small expression tree over one group: leaves are
//! the natural permutation action, user-supplied generator images, the
//! defining representation of a compact group or a trivial block; inner nodes
//! are tensor products, direct sums, complex conjugation and restriction to an
//! invariant subspace.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::compact::CompactGroup;
use crate::error::{Error, Result};
use crate::linalg::{self, Field, Matrix, C64};
use crate::perm::{Permutation, PermutationGroup, SlpOp};

/// Non-unitary generator images above this residual are rejected.
const UNITARITY_TOL: f64 = 1e-8;
/// Relative tolerance of the homomorphism spot check on generator images.
const CONSISTENCY_TOL: f64 = 1e-8;
const CONSISTENCY_PAIRS: usize = 20;

#[derive(Debug, Clone)]
pub enum Group {
    Finite(Arc<PermutationGroup>),
    Compact(CompactGroup),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Element {
    Perm(Permutation),
    Matrix(Matrix),
}

impl Group {
    pub fn is_finite(&self) -> bool {
        matches!(self, Group::Finite(_))
    }

    pub fn as_finite(&self) -> Option<&PermutationGroup> {
        match self {
            Group::Finite(g) => Some(g),
            Group::Compact(_) => None,
        }
    }

    pub fn identity(&self) -> Element {
        match self {
            Group::Finite(g) => Element::Perm(g.identity()),
            Group::Compact(c) => Element::Matrix(linalg::identity(c.dimension())),
        }
    }

    /// Uniform (finite) or Haar (compact) random element.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Element {
        match self {
            Group::Finite(g) => Element::Perm(g.sample_uniform(rng)),
            Group::Compact(c) => Element::Matrix(c.sample(rng)),
        }
    }

    pub fn same_as(&self, other: &Group) -> bool {
        match (self, other) {
            (Group::Finite(a), Group::Finite(b)) => Arc::ptr_eq(a, b) || a == b,
            (Group::Compact(a), Group::Compact(b)) => a == b,
            _ => false,
        }
    }
}

impl From<PermutationGroup> for Group {
    fn from(g: PermutationGroup) -> Self {
        Group::Finite(Arc::new(g))
    }
}

impl From<Arc<PermutationGroup>> for Group {
    fn from(g: Arc<PermutationGroup>) -> Self {
        Group::Finite(g)
    }
}

impl From<CompactGroup> for Group {
    fn from(g: CompactGroup) -> Self {
        Group::Compact(g)
    }
}

impl Element {
    /// Group product `self · other`.
    pub fn mul(&self, other: &Element) -> Element {
        match (self, other) {
            (Element::Perm(a), Element::Perm(b)) => Element::Perm(a.after(b)),
            (Element::Matrix(a), Element::Matrix(b)) => Element::Matrix(a * b),
            _ => panic!("cannot multiply elements of different group kinds"),
        }
    }
}

#[derive(Debug)]
enum Node {
    Natural,
    Trivial,
    Defining,
    GeneratorImages {
        /// Per chain level, the image of the transversal element for each
        /// orbit point (indexed by point).
        levels: Vec<Vec<Option<Matrix>>>,
    },
    Tensor(Representation, Representation),
    DirectSum(Representation, Representation),
    Conjugate(Representation),
    Restricted {
        parent: Representation,
        basis: Matrix,
    },
}

#[derive(Debug, Clone)]
pub struct Representation {
    group: Group,
    field: Field,
    dimension: usize,
    node: Arc<Node>,
}

impl Representation {
    fn make(group: Group, field: Field, dimension: usize, node: Node) -> Self {
        Representation {
            group,
            field,
            dimension,
            node: Arc::new(node),
        }
    }

    pub fn group(&self) -> &Group {
        &self.group
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    /// Permutation matrices with entry `(g[k], k) = 1`.
    pub fn natural(group: impl Into<Group>, field: Field) -> Result<Self> {
        let group = group.into();
        let degree = match &group {
            Group::Finite(g) => g.degree(),
            Group::Compact(_) => {
                return Err(Error::NotFinite);
            }
        };
        Ok(Self::make(group, field, degree, Node::Natural))
    }

    /// `dimension` copies of the trivial representation.
    pub fn trivial(group: impl Into<Group>, dimension: usize, field: Field) -> Result<Self> {
        if dimension == 0 {
            return Err(Error::InvalidDimension(0));
        }
        Ok(Self::make(group.into(), field, dimension, Node::Trivial))
    }

    /// The defining representation of a compact group: sampled matrices are their own images.
    pub fn defining(group: CompactGroup) -> Self {
        let field = group.field();
        Self::make(group.into(), field, group.dimension(), Node::Defining)
    }

    /// Defining representation over an explicit field; orthogonal groups may
    /// be taken over the complex numbers, unitary groups only over them.
    pub fn defining_over(group: CompactGroup, field: Field) -> Result<Self> {
        if group.field() == Field::Complex && field == Field::Real {
            return Err(Error::UnsupportedField(
                "the unitary group has no real defining representation".into(),
            ));
        }
        Ok(Self::make(group.into(), field, group.dimension(), Node::Defining))
    }

    /// Representation fixed by the images of the group's generators.
    ///
    /// Every transversal element of the stabilizer chain gets its image once,
    /// by replaying the word that built it; arbitrary elements are then sifted
    /// and their transversal images multiplied. The images are checked for
    /// unitarity, for reproducing the generator images, and on random pairs
    /// for the homomorphism property.
    pub fn from_generator_images(
        group: Arc<PermutationGroup>,
        images: Vec<Matrix>,
        field: Field,
    ) -> Result<Self> {
        if images.len() != group.generators().len() {
            return Err(Error::ImageCountMismatch {
                expected: group.generators().len(),
                found: images.len(),
            });
        }
        let n = match images.first() {
            Some(m) => m.nrows(),
            None => 1,
        };
        for (index, m) in images.iter().enumerate() {
            if m.nrows() != n || m.ncols() != n || n == 0 {
                return Err(Error::Shape(format!(
                    "generator image {index} is {}x{}, expected {n}x{n}",
                    m.nrows(),
                    m.ncols()
                )));
            }
            if field == Field::Real && m.iter().any(|z| z.im != 0.0) {
                return Err(Error::UnsupportedField(format!(
                    "generator image {index} has complex entries in a real representation"
                )));
            }
            let residual = linalg::unitarity_residual(m);
            if residual > UNITARITY_TOL {
                return Err(Error::NonUnitaryImage { index, residual });
            }
        }

        let levels = transversal_images(&group, &images, n);
        let rep = Self::make(
            Group::Finite(group.clone()),
            field,
            n,
            Node::GeneratorImages { levels },
        );

        let tol = CONSISTENCY_TOL * n as f64;
        for (g, expected) in group.generators().iter().zip(&images) {
            let residual = linalg::frobenius(&(rep.image_of_perm(g) - expected));
            if residual > tol {
                return Err(Error::InconsistentImages { residual });
            }
        }
        let mut rng = ChaCha20Rng::seed_from_u64(0x5eed_c0de);
        for _ in 0..CONSISTENCY_PAIRS {
            let g = group.sample_uniform(&mut rng);
            let h = group.sample_uniform(&mut rng);
            let lhs = rep.image_of_perm(&g) * rep.image_of_perm(&h);
            let residual = linalg::frobenius(&(lhs - rep.image_of_perm(&g.after(&h))));
            if residual > tol {
                return Err(Error::InconsistentImages { residual });
            }
        }
        Ok(rep)
    }

    fn check_compatible(&self, other: &Representation) -> Result<()> {
        if !self.group.same_as(&other.group) {
            return Err(Error::GroupMismatch);
        }
        if self.field != other.field {
            return Err(Error::FieldMismatch);
        }
        Ok(())
    }

    /// Kronecker product, row-major block convention (see [`linalg::kron`]).
    pub fn tensor(&self, other: &Representation) -> Result<Self> {
        self.check_compatible(other)?;
        Ok(Self::make(
            self.group.clone(),
            self.field,
            self.dimension * other.dimension,
            Node::Tensor(self.clone(), other.clone()),
        ))
    }

    pub fn direct_sum(&self, other: &Representation) -> Result<Self> {
        self.check_compatible(other)?;
        Ok(Self::make(
            self.group.clone(),
            self.field,
            self.dimension + other.dimension,
            Node::DirectSum(self.clone(), other.clone()),
        ))
    }

    /// `k`-fold tensor power, `k ≥ 1`.
    pub fn tensor_power(&self, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidDimension(0));
        }
        let mut out = self.clone();
        for _ in 1..k {
            out = out.tensor(self)?;
        }
        Ok(out)
    }

    /// Entrywise complex conjugate. Complex field only.
    pub fn conjugate(&self) -> Result<Self> {
        if self.field != Field::Complex {
            return Err(Error::UnsupportedField(
                "conjugation requires a complex representation".into(),
            ));
        }
        Ok(Self::make(
            self.group.clone(),
            self.field,
            self.dimension,
            Node::Conjugate(self.clone()),
        ))
    }

    /// Restriction to the invariant subspace spanned by the orthonormal rows
    /// of `basis`: `g ↦ B ρ(g) B†`.
    pub fn restricted(&self, basis: Matrix) -> Result<Self> {
        if basis.ncols() != self.dimension || basis.nrows() == 0 {
            return Err(Error::Shape(format!(
                "restriction basis is {}x{}, representation dimension {}",
                basis.nrows(),
                basis.ncols(),
                self.dimension
            )));
        }
        Ok(Self::make(
            self.group.clone(),
            self.field,
            basis.nrows(),
            Node::Restricted {
                parent: self.clone(),
                basis,
            },
        ))
    }

    /// Image of a group element.
    ///
    /// Panics when the element does not belong to the representation's group.
    pub fn image(&self, g: &Element) -> Matrix {
        match &*self.node {
            Node::Natural => match g {
                Element::Perm(p) => {
                    let mut m = Matrix::zeros(self.dimension, self.dimension);
                    for k in 0..p.degree() {
                        m[(p.apply(k), k)] = C64::new(1.0, 0.0);
                    }
                    m
                }
                Element::Matrix(_) => panic!("natural representation needs a permutation"),
            },
            Node::Trivial => linalg::identity(self.dimension),
            Node::Defining => match g {
                Element::Matrix(m) => m.clone(),
                Element::Perm(_) => panic!("defining representation needs a matrix element"),
            },
            Node::GeneratorImages { .. } => match g {
                Element::Perm(p) => self.image_of_perm(p),
                Element::Matrix(_) => panic!("finite-group representation needs a permutation"),
            },
            Node::Tensor(a, b) => linalg::kron(&a.image(g), &b.image(g)),
            Node::DirectSum(a, b) => linalg::direct_sum(&a.image(g), &b.image(g)),
            Node::Conjugate(a) => a.image(g).map(|z| z.conj()),
            Node::Restricted { parent, basis } => basis * parent.image(g) * basis.adjoint(),
        }
    }

    fn image_of_perm(&self, p: &Permutation) -> Matrix {
        let Node::GeneratorImages { levels } = &*self.node else {
            return self.image(&Element::Perm(p.clone()));
        };
        let group = self.group.as_finite().expect("finite group");
        let points = group
            .factorize(p)
            .unwrap_or_else(|| panic!("permutation {p} is not in the group"));
        let mut out = linalg::identity(self.dimension);
        for (level, gamma) in levels.iter().zip(points) {
            if let Some(m) = &level[gamma] {
                out *= m;
            }
        }
        out
    }
}

/// Replays the straight-line program on matrices for every transversal
/// element. Identity transversal elements are stored as `None`.
fn transversal_images(
    group: &PermutationGroup,
    generator_images: &[Matrix],
    n: usize,
) -> Vec<Vec<Option<Matrix>>> {
    let slp = group.slp();
    let nodes = group.transversal_nodes();
    let mut needed = vec![false; slp.len()];
    for level in &nodes {
        for &(_, node) in level {
            needed[node] = true;
        }
    }
    for i in (0..slp.len()).rev() {
        if !needed[i] {
            continue;
        }
        match slp[i] {
            SlpOp::Product(a, b) => {
                needed[a] = true;
                needed[b] = true;
            }
            SlpOp::Inverse(a) => needed[a] = true,
            SlpOp::Identity | SlpOp::Generator(_) => {}
        }
    }
    let mut values: Vec<Option<Matrix>> = vec![None; slp.len()];
    for i in 0..slp.len() {
        if !needed[i] {
            continue;
        }
        let value = match slp[i] {
            SlpOp::Identity => linalg::identity(n),
            SlpOp::Generator(g) => generator_images[g].clone(),
            SlpOp::Product(a, b) => values[a].as_ref().unwrap() * values[b].as_ref().unwrap(),
            SlpOp::Inverse(a) => values[a].as_ref().unwrap().adjoint(),
        };
        values[i] = Some(value);
    }
    nodes
        .iter()
        .map(|level| {
            let mut by_point = vec![None; group.degree()];
            for &(point, node) in level {
                if slp[node] != SlpOp::Identity {
                    by_point[point] = values[node].clone();
                }
            }
            by_point
        })
        .collect()
}
