use std::collections::{HashSet, VecDeque};

use rand::Rng;

use super::permutation::Permutation;
use crate::error::{Error, Result};

/// One instruction of the straight-line program recording how every stored
/// group element was built from the user generators. Representation images of
/// transversal elements are obtained by replaying it on matrices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SlpOp {
    Identity,
    Generator(usize),
    /// `a ∘ b`, apply `b` first.
    Product(usize, usize),
    Inverse(usize),
}

#[derive(Debug, Clone)]
struct Tracked {
    perm: Permutation,
    node: usize,
}

#[derive(Debug, Clone)]
struct Level {
    base_point: usize,
    /// Orbit of the base point in discovery order.
    orbit: Vec<usize>,
    /// Indexed by point; `Some` for orbit points.
    transversal: Vec<Option<Tracked>>,
}

impl Level {
    fn new(base_point: usize, degree: usize, identity_node: usize) -> Self {
        let mut transversal = vec![None; degree];
        transversal[base_point] = Some(Tracked {
            perm: Permutation::identity(degree),
            node: identity_node,
        });
        Level {
            base_point,
            orbit: vec![base_point],
            transversal,
        }
    }
}

/// A permutation group stored as a stabilizer chain.
///
/// The base is the increasing sequence where each point is the smallest point
/// moved by the pointwise stabilizer of the previous ones, so it only depends
/// on the group, not on the generators.
#[derive(Debug, Clone)]
pub struct PermutationGroup {
    degree: usize,
    generators: Vec<Permutation>,
    levels: Vec<Level>,
    slp: Vec<SlpOp>,
}

impl PartialEq for PermutationGroup {
    fn eq(&self, other: &Self) -> bool {
        self.degree == other.degree && self.generators == other.generators
    }
}

struct Builder {
    degree: usize,
    slp: Vec<SlpOp>,
    strong: Vec<Tracked>,
    levels: Vec<Level>,
    /// Per level, the (point, strong generator) pairs whose Schreier generator
    /// is already known to sift through the levels below.
    checked: Vec<HashSet<(usize, usize)>>,
}

impl Builder {
    fn push(&mut self, op: SlpOp) -> usize {
        self.slp.push(op);
        self.slp.len() - 1
    }

    fn fixes_prefix(&self, p: &Permutation, level: usize) -> bool {
        self.levels[..level]
            .iter()
            .all(|l| p.apply(l.base_point) == l.base_point)
    }

    fn level_generators(&self, level: usize) -> Vec<usize> {
        (0..self.strong.len())
            .filter(|&s| self.fixes_prefix(&self.strong[s].perm, level))
            .collect()
    }

    fn extend_orbits(&mut self) {
        for l in 0..self.levels.len() {
            let gens = self.level_generators(l);
            let mut queue: VecDeque<usize> = self.levels[l].orbit.iter().cloned().collect();
            while let Some(gamma) = queue.pop_front() {
                for &s in &gens {
                    let image = self.strong[s].perm.apply(gamma);
                    if self.levels[l].transversal[image].is_some() {
                        continue;
                    }
                    let t = self.levels[l].transversal[gamma].clone().unwrap();
                    let perm = self.strong[s].perm.after(&t.perm);
                    let node = self.push(SlpOp::Product(self.strong[s].node, t.node));
                    self.levels[l].transversal[image] = Some(Tracked { perm, node });
                    self.levels[l].orbit.push(image);
                    queue.push_back(image);
                }
            }
        }
    }

    /// Sifts `h` starting at `level`; returns the residue and the transversal
    /// elements divided out on the way.
    fn sift(&self, mut h: Permutation, level: usize) -> (Permutation, Vec<(usize, usize)>) {
        let mut used = Vec::new();
        for l in level..self.levels.len() {
            let gamma = h.apply(self.levels[l].base_point);
            match &self.levels[l].transversal[gamma] {
                Some(t) => {
                    h = t.perm.inverse().after(&h);
                    used.push((l, gamma));
                }
                None => break,
            }
        }
        (h, used)
    }

    /// Finds one Schreier generator that does not sift, adds its residue to
    /// the strong generating set and returns true; false when the chain is
    /// complete.
    fn add_missing_generator(&mut self) -> bool {
        for l in 0..self.levels.len() {
            let gens = self.level_generators(l);
            let orbit = self.levels[l].orbit.clone();
            for &gamma in &orbit {
                for &s in &gens {
                    if self.checked[l].contains(&(gamma, s)) {
                        continue;
                    }
                    let t_gamma = self.levels[l].transversal[gamma].clone().unwrap();
                    let s_perm = self.strong[s].perm.clone();
                    let t_image = self.levels[l].transversal[s_perm.apply(gamma)]
                        .clone()
                        .unwrap();
                    let h = t_image.perm.inverse().after(&s_perm.after(&t_gamma.perm));
                    let (residue, used) = self.sift(h, l + 1);
                    self.checked[l].insert((gamma, s));
                    if residue.is_identity() {
                        continue;
                    }
                    let s_t = self.push(SlpOp::Product(self.strong[s].node, t_gamma.node));
                    let inv = self.push(SlpOp::Inverse(t_image.node));
                    let mut node = self.push(SlpOp::Product(inv, s_t));
                    for (ul, point) in used {
                        let tn = self.levels[ul].transversal[point].as_ref().unwrap().node;
                        let inv = self.push(SlpOp::Inverse(tn));
                        node = self.push(SlpOp::Product(inv, node));
                    }
                    self.strong.push(Tracked {
                        perm: residue,
                        node,
                    });
                    return true;
                }
            }
        }
        false
    }
}

impl PermutationGroup {
    /// Builds the stabilizer chain with deterministic Schreier–Sims. An empty
    /// generator list gives the trivial group.
    pub fn from_generators(degree: usize, generators: Vec<Permutation>) -> Result<Self> {
        if degree == 0 {
            return Err(Error::InvalidDimension(0));
        }
        for g in &generators {
            if g.degree() != degree {
                return Err(Error::DegreeMismatch {
                    expected: degree,
                    found: g.degree(),
                });
            }
        }
        let mut builder = Builder {
            degree,
            slp: vec![SlpOp::Identity],
            strong: Vec::new(),
            levels: Vec::new(),
            checked: Vec::new(),
        };
        let mut seen = HashSet::new();
        for (i, g) in generators.iter().enumerate() {
            if !g.is_identity() && seen.insert(g.clone()) {
                let node = builder.push(SlpOp::Generator(i));
                builder.strong.push(Tracked {
                    perm: g.clone(),
                    node,
                });
            }
        }
        // Every moved point of G is a (possibly redundant) base point; levels
        // with trivial orbits are dropped at the end.
        let mut moved: Vec<usize> = generators.iter().flat_map(|g| g.moved_points()).collect();
        moved.sort_unstable();
        moved.dedup();
        builder.levels = moved.iter().map(|&b| Level::new(b, degree, 0)).collect();
        builder.checked = vec![HashSet::new(); builder.levels.len()];

        loop {
            builder.extend_orbits();
            if !builder.add_missing_generator() {
                break;
            }
        }

        let levels = builder
            .levels
            .into_iter()
            .filter(|l| l.orbit.len() > 1)
            .collect();
        debug_assert_eq!(builder.degree, degree);
        Ok(PermutationGroup {
            degree,
            generators,
            levels,
            slp: builder.slp,
        })
    }

    pub fn trivial(degree: usize) -> Result<Self> {
        Self::from_generators(degree, Vec::new())
    }

    /// The symmetric group on `degree` points, generated by a transposition and a full cycle.
    pub fn symmetric(degree: usize) -> Result<Self> {
        if degree < 2 {
            return Self::trivial(degree.max(1));
        }
        let mut swap: Vec<usize> = (0..degree).collect();
        swap.swap(0, 1);
        let cycle: Vec<usize> = (0..degree).map(|k| (k + 1) % degree).collect();
        Self::from_generators(
            degree,
            vec![Permutation::new(swap)?, Permutation::new(cycle)?],
        )
    }

    pub fn cyclic(degree: usize) -> Result<Self> {
        if degree < 2 {
            return Self::trivial(degree.max(1));
        }
        let cycle: Vec<usize> = (0..degree).map(|k| (k + 1) % degree).collect();
        Self::from_generators(degree, vec![Permutation::new(cycle)?])
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn generators(&self) -> &[Permutation] {
        &self.generators
    }

    pub fn base(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.base_point).collect()
    }

    pub fn chain_length(&self) -> usize {
        self.levels.len()
    }

    /// Product of the transversal sizes.
    ///
    /// Panics if the order does not fit in a `u128`.
    pub fn order(&self) -> u128 {
        self.levels.iter().fold(1u128, |acc, l| {
            acc.checked_mul(l.orbit.len() as u128)
                .expect("group order overflows u128")
        })
    }

    pub fn identity(&self) -> Permutation {
        Permutation::identity(self.degree)
    }

    /// Orbit points `γ_0, γ_1, …` (one per level) with
    /// `p = T_0[γ_0] ∘ T_1[γ_1] ∘ …`, or `None` if `p` is not in the group.
    pub fn factorize(&self, p: &Permutation) -> Option<Vec<usize>> {
        let mut h = p.clone();
        let mut points = Vec::with_capacity(self.levels.len());
        for level in &self.levels {
            let gamma = h.apply(level.base_point);
            let t = level.transversal[gamma].as_ref()?;
            h = t.perm.inverse().after(&h);
            points.push(gamma);
        }
        h.is_identity().then_some(points)
    }

    pub fn contains(&self, p: &Permutation) -> Result<bool> {
        if p.degree() != self.degree {
            return Err(Error::DegreeMismatch {
                expected: self.degree,
                found: p.degree(),
            });
        }
        Ok(self.factorize(p).is_some())
    }

    /// Uniform random element: one uniform coset representative per level.
    pub fn sample_uniform<R: Rng + ?Sized>(&self, rng: &mut R) -> Permutation {
        self.levels.iter().fold(self.identity(), |acc, level| {
            let gamma = level.orbit[rng.random_range(0..level.orbit.len())];
            acc.after(&level.transversal[gamma].as_ref().unwrap().perm)
        })
    }

    /// Transversal sets `T_1, …, T_ν` ordered from the deepest stabilizer
    /// upwards, so every element is uniquely `t_ν ∘ … ∘ t_1` with `t_i ∈ T_i`.
    pub fn transversal_sets(&self) -> Vec<Vec<Permutation>> {
        self.levels
            .iter()
            .rev()
            .map(|level| {
                level
                    .orbit
                    .iter()
                    .map(|&g| level.transversal[g].as_ref().unwrap().perm.clone())
                    .collect()
            })
            .collect()
    }

    /// All elements, by enumerating transversal products. Only sensible for small groups.
    pub fn elements(&self) -> Vec<Permutation> {
        let mut out = vec![self.identity()];
        for level in self.levels.iter().rev() {
            let mut next = Vec::with_capacity(out.len() * level.orbit.len());
            for &gamma in &level.orbit {
                let t = &level.transversal[gamma].as_ref().unwrap().perm;
                next.extend(out.iter().map(|h| t.after(h)));
            }
            out = next;
        }
        out
    }

    pub(crate) fn slp(&self) -> &[SlpOp] {
        &self.slp
    }

    /// SLP node of each transversal element, per level in orbit order.
    pub(crate) fn transversal_nodes(&self) -> Vec<Vec<(usize, usize)>> {
        self.levels
            .iter()
            .map(|level| {
                level
                    .orbit
                    .iter()
                    .map(|&g| (g, level.transversal[g].as_ref().unwrap().node))
                    .collect()
            })
            .collect()
    }
}
